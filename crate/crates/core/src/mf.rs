//! Periodic multiplicative functions with bounded partial sums.
//!
//! A function in this class is determined by its period `M` and its values
//! on the prime powers dividing `M`. Construction validates the three
//! defining conditions:
//!
//! 1. for some prime q | M the weighted power sum vanishes:
//!    `sum_{k=0}^{a-1} f(q^k)/q^k + f(q^a)/(q^{a-1}(q-1)) = 0`
//!    (the closed form of `sum_{k>=0} f(q^k)/q^k` once the values
//!    stabilize at exponent a);
//! 2. for each p^a || M, `f(p^k) = f(p^a)` for all k >= a;
//! 3. `f(p^k) = 1` for every prime p not dividing M.
//!
//! All checks run in exact rational arithmetic by default. A tolerance mode
//! (for tables that only approximate irrational values) accepts residuals up
//! to a caller-supplied bound instead of exact zero.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, Factorization};
use crate::exact::{format_rational, parse_rational, ExactScalar};
use crate::Error;

/// A multiplicative function given by a finite prime-power value table.
///
/// Primes outside the table take the value 1 on all powers; exponents beyond
/// the table's maximum for a prime repeat the last tabulated value. Both
/// rules mirror the class's conditions ii and iii.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicativeFunction {
    table: BTreeMap<(u64, u32), ExactScalar>,
    max_exp: BTreeMap<u64, u32>,
}

impl MultiplicativeFunction {
    pub fn from_table(table: BTreeMap<(u64, u32), ExactScalar>) -> Self {
        let mut max_exp = BTreeMap::new();
        for &(p, k) in table.keys() {
            let e = max_exp.entry(p).or_insert(0u32);
            *e = (*e).max(k);
        }
        Self { table, max_exp }
    }

    pub fn table(&self) -> &BTreeMap<(u64, u32), ExactScalar> {
        &self.table
    }

    /// Value at a prime power p^k (k >= 1).
    pub fn eval_prime_power(&self, p: u64, k: u32) -> ExactScalar {
        match self.max_exp.get(&p) {
            None => ExactScalar::one(),
            Some(&a) => {
                let k = k.min(a);
                self.table
                    .get(&(p, k))
                    .cloned()
                    .unwrap_or_else(ExactScalar::one)
            }
        }
    }

    pub fn eval_factored(&self, f: &Factorization) -> ExactScalar {
        let mut out = ExactScalar::one();
        for &(p, k) in f.pairs() {
            out *= &self.eval_prime_power(p, k);
        }
        out
    }

    pub fn eval(&self, n: u64) -> Result<ExactScalar, Error> {
        Ok(self.eval_factored(&factorize(n)?))
    }
}

/// How validation residuals are compared against zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Validation {
    /// Exact rational equality (the default).
    Exact,
    /// Residual magnitudes up to the bound are accepted.
    Tolerance(f64),
}

impl Validation {
    pub const DEFAULT_TOLERANCE: f64 = 1e-12;

    fn accepts(&self, z: &ExactScalar) -> bool {
        match self {
            Validation::Exact => z.is_zero(),
            Validation::Tolerance(tol) => z.abs_bound_f64() <= *tol,
        }
    }
}

/// One violated construction condition, with enough context to report it.
#[derive(Debug, Clone, PartialEq)]
pub enum ConditionViolation {
    /// The table keys are not exactly {(p, j) : p^a || M, 1 <= j <= a}.
    TableShape {
        missing: Vec<(u64, u32)>,
        unexpected: Vec<(u64, u32)>,
    },
    /// Condition i fails for every prime divisor of M; one residual per q.
    WeightedPowerSum { residuals: Vec<(u64, String)> },
    /// Condition ii: value at p^k differs from the stabilized value.
    Stabilization { p: u64, k: u32 },
    /// Condition iii: value at a prime power coprime to M is not 1.
    OffPeriodValue { p: u64, k: u32 },
    /// f(n + M) != f(n) for the sampled n.
    Periodicity { n: u64 },
    /// The values over one period do not sum to zero.
    PeriodSum { sum: String },
    /// M = 1 has no prime divisor to witness condition i.
    NoPrimeDivisor,
}

impl fmt::Display for ConditionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionViolation::TableShape { missing, unexpected } => {
                write!(f, "table keys do not match the prime powers of M")?;
                if !missing.is_empty() {
                    write!(f, "; missing {missing:?}")?;
                }
                if !unexpected.is_empty() {
                    write!(f, "; unexpected {unexpected:?}")?;
                }
                Ok(())
            }
            ConditionViolation::WeightedPowerSum { residuals } => {
                write!(f, "condition i fails for every prime divisor:")?;
                for (q, r) in residuals {
                    write!(f, " q={q} residual {r};")?;
                }
                Ok(())
            }
            ConditionViolation::Stabilization { p, k } => {
                write!(f, "condition ii fails at {p}^{k}")
            }
            ConditionViolation::OffPeriodValue { p, k } => {
                write!(f, "condition iii fails at {p}^{k}")
            }
            ConditionViolation::Periodicity { n } => {
                write!(f, "f(n+M) != f(n) at n={n}")
            }
            ConditionViolation::PeriodSum { sum } => {
                write!(f, "values over one period sum to {sum}, not 0")
            }
            ConditionViolation::NoPrimeDivisor => {
                write!(f, "M=1 has no prime divisor to witness condition i")
            }
        }
    }
}

/// Structured rejection: every violated condition, not just the first.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationFailure {
    pub period: u64,
    pub violations: Vec<ConditionViolation>,
}

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "period-{} function rejected:", self.period)?;
        for v in &self.violations {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

/// A validated periodic multiplicative function with bounded partial sums.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicMF {
    period: u64,
    base: MultiplicativeFunction,
    witness: u64,
    period_value_is_zero: bool,
}

impl PeriodicMF {
    /// Validate and construct; exact arithmetic throughout.
    pub fn new(
        period: u64,
        table: BTreeMap<(u64, u32), ExactScalar>,
    ) -> Result<Self, Error> {
        Self::with_validation(period, table, Validation::Exact)
    }

    pub fn with_validation(
        period: u64,
        table: BTreeMap<(u64, u32), ExactScalar>,
        mode: Validation,
    ) -> Result<Self, Error> {
        let mut violations = Vec::new();
        if period == 0 {
            return Err(Error::InvalidPeriod);
        }
        let pf = factorize(period)?;
        if pf.pairs().is_empty() {
            violations.push(ConditionViolation::NoPrimeDivisor);
        }

        // Table keys must be exactly {(p, j) : p^a || M, 1 <= j <= a}.
        let mut expected: Vec<(u64, u32)> = Vec::new();
        for &(p, a) in pf.pairs() {
            for j in 1..=a {
                expected.push((p, j));
            }
        }
        let missing: Vec<(u64, u32)> = expected
            .iter()
            .filter(|k| !table.contains_key(k))
            .copied()
            .collect();
        let unexpected: Vec<(u64, u32)> = table
            .keys()
            .filter(|k| !expected.contains(k))
            .copied()
            .collect();
        if !missing.is_empty() || !unexpected.is_empty() {
            violations.push(ConditionViolation::TableShape { missing, unexpected });
            return Err(Error::Validation(ValidationFailure { period, violations }));
        }

        let base = MultiplicativeFunction::from_table(table);

        // Condition i: the weighted power sum must vanish for some q | M.
        let mut witness = 0u64;
        let mut residuals = Vec::new();
        for &(q, a) in pf.pairs() {
            let r = weighted_power_sum(&base, q, a);
            if mode.accepts(&r) {
                witness = q;
                break;
            }
            residuals.push((q, r.to_string()));
        }
        if witness == 0 && !pf.pairs().is_empty() {
            violations.push(ConditionViolation::WeightedPowerSum { residuals });
        }

        // Condition ii: stabilization beyond the exponent in M (k <= a+10).
        'outer_ii: for &(p, a) in pf.pairs() {
            let stable = base.eval_prime_power(p, a);
            for k in a + 1..=a + 10 {
                if base.eval_prime_power(p, k) != stable {
                    violations.push(ConditionViolation::Stabilization { p, k });
                    break 'outer_ii;
                }
            }
        }

        // Condition iii: sampled primes coprime to M take the value 1.
        'outer_iii: for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19] {
            if period % p == 0 {
                continue;
            }
            for k in 1..=4u32 {
                if !base.eval_prime_power(p, k).is_one() {
                    violations.push(ConditionViolation::OffPeriodValue { p, k });
                    break 'outer_iii;
                }
            }
        }

        let candidate = PeriodicMF {
            period,
            base,
            witness,
            period_value_is_zero: false,
        };

        // Periodicity f(n + M) = f(n), sampled over two periods.
        for n in 1..=2 * period {
            let a = candidate.eval(n).expect("n >= 1");
            let b = candidate.eval(n + period).expect("n >= 1");
            let mut diff = a;
            diff -= &b;
            if !mode.accepts(&diff) {
                violations.push(ConditionViolation::Periodicity { n });
                break;
            }
        }

        // Period sum must vanish.
        let sum = candidate.partial_sum(period).expect("period >= 1");
        if !mode.accepts(&sum) {
            violations.push(ConditionViolation::PeriodSum { sum: sum.to_string() });
        }

        if !violations.is_empty() {
            return Err(Error::Validation(ValidationFailure { period, violations }));
        }

        let period_value_is_zero = candidate.eval(period).expect("period >= 1").is_zero();
        Ok(PeriodicMF {
            period_value_is_zero,
            ..candidate
        })
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    /// The prime divisor of M that witnesses condition i.
    pub fn witness(&self) -> u64 {
        self.witness
    }

    /// Advisory flag: the class's forward classification assumes f(M) != 0,
    /// but the converse direction holds either way, so f(M) = 0 is accepted
    /// and merely recorded.
    pub fn period_value_is_zero(&self) -> bool {
        self.period_value_is_zero
    }

    pub fn base(&self) -> &MultiplicativeFunction {
        &self.base
    }

    pub fn eval(&self, n: u64) -> Result<ExactScalar, Error> {
        self.base.eval(n)
    }

    /// Exact partial sum `sum_{n <= x} f(n)`.
    pub fn partial_sum(&self, x: u64) -> Result<ExactScalar, Error> {
        let mut acc = ExactScalar::zero();
        for n in 1..=x {
            acc += &self.eval(n)?;
        }
        Ok(acc)
    }

    /// The 2-periodic member f(n) = (-1)^(n+1).
    pub fn parity() -> Self {
        let mut t = BTreeMap::new();
        t.insert((2u64, 1u32), ExactScalar::from_int(-1));
        Self::new(2, t).expect("parity function is valid")
    }

    /// The unique 3-periodic member with f(3) != 0, i.e. f(3) = -2.
    pub fn three_periodic() -> Self {
        let mut t = BTreeMap::new();
        t.insert((3u64, 1u32), ExactScalar::from_int(-2));
        Self::new(3, t).expect("3-periodic member is valid")
    }
}

/// Closed form of `sum_{k>=0} f(q^k)/q^k` for a table stabilizing at
/// exponent a: the finite head plus the geometric tail
/// `f(q^a)/(q^(a-1)(q-1))`.
fn weighted_power_sum(f: &MultiplicativeFunction, q: u64, a: u32) -> ExactScalar {
    let mut acc = ExactScalar::one(); // k = 0 term
    let mut qk = BigInt::from(1);
    for k in 1..a {
        qk *= q;
        let term = f.eval_prime_power(q, k);
        let w = BigRational::new(BigInt::from(1), qk.clone());
        acc += &ExactScalar::new(&term.re * &w, &term.im * &w);
    }
    // tail: f(q^a) / (q^(a-1) (q-1))
    let mut qa1 = BigInt::from(1);
    for _ in 1..a {
        qa1 *= q;
    }
    let den = qa1 * BigInt::from(q - 1);
    let last = f.eval_prime_power(q, a);
    let w = BigRational::new(BigInt::from(1), den);
    acc += &ExactScalar::new(&last.re * &w, &last.im * &w);
    acc
}

// --- JSON wire format -------------------------------------------------------

/// Serialized form: rationals as "num/den" strings.
#[derive(Debug, Serialize, Deserialize)]
pub struct PeriodicMFSpec {
    #[serde(rename = "M")]
    pub period: u64,
    pub values: Vec<PrimePowerValue>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PrimePowerValue {
    pub p: u64,
    pub k: u32,
    pub re: String,
    pub im: String,
}

impl PeriodicMFSpec {
    pub fn from_function(f: &PeriodicMF) -> Self {
        let values = f
            .base
            .table()
            .iter()
            .map(|(&(p, k), v)| PrimePowerValue {
                p,
                k,
                re: format_rational(&v.re),
                im: format_rational(&v.im),
            })
            .collect();
        Self { period: f.period, values }
    }

    pub fn table(&self) -> Result<BTreeMap<(u64, u32), ExactScalar>, Error> {
        let mut t = BTreeMap::new();
        for v in &self.values {
            let re = parse_rational(&v.re)?;
            let im = parse_rational(&v.im)?;
            t.insert((v.p, v.k), ExactScalar::new(re, im));
        }
        Ok(t)
    }

    pub fn build(&self, mode: Validation) -> Result<PeriodicMF, Error> {
        PeriodicMF::with_validation(self.period, self.table()?, mode)
    }
}

/// Residual of condition i for a given q | M, reported by the CLI validator.
pub fn condition_i_residual(f: &PeriodicMF, q: u64) -> Option<ExactScalar> {
    let pf = factorize(f.period).ok()?;
    let a = pf.pairs().iter().find(|&&(p, _)| p == q).map(|&(_, a)| a)?;
    Some(weighted_power_sum(&f.base, q, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::{BigRational, Zero};

    fn table1(p: u64, v: i64) -> BTreeMap<(u64, u32), ExactScalar> {
        let mut t = BTreeMap::new();
        t.insert((p, 1u32), ExactScalar::from_int(v));
        t
    }

    #[test]
    fn parity_is_valid_with_witness_2() {
        let f = PeriodicMF::new(2, table1(2, -1)).unwrap();
        assert_eq!(f.witness(), 2);
        assert!(!f.period_value_is_zero());
    }

    #[test]
    fn wrong_sign_parity_rejected_on_condition_i() {
        let err = PeriodicMF::new(2, table1(2, 1)).unwrap_err();
        match err {
            Error::Validation(fail) => {
                assert!(fail
                    .violations
                    .iter()
                    .any(|v| matches!(v, ConditionViolation::WeightedPowerSum { .. })));
                // 1 + f(2) = 2 != 0 also breaks the period sum
                assert!(fail
                    .violations
                    .iter()
                    .any(|v| matches!(v, ConditionViolation::PeriodSum { .. })));
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn unique_three_periodic_member() {
        let f = PeriodicMF::new(3, table1(3, -2)).unwrap();
        assert_eq!(f.witness(), 3);
        // any other value of f(3) fails
        for v in [-3i64, -1, 0, 1, 2] {
            assert!(PeriodicMF::new(3, table1(3, v)).is_err(), "f(3)={v}");
        }
    }

    #[test]
    fn eval_examples() {
        let parity = PeriodicMF::parity();
        assert_eq!(parity.eval(7).unwrap(), ExactScalar::from_int(1));
        assert_eq!(parity.eval(8).unwrap(), ExactScalar::from_int(-1));
        let f3 = PeriodicMF::three_periodic();
        assert_eq!(f3.eval(18).unwrap(), ExactScalar::from_int(-2));
    }

    #[test]
    fn partial_sum_examples() {
        let parity = PeriodicMF::parity();
        assert!(parity.partial_sum(10).unwrap().is_zero());
        assert_eq!(parity.partial_sum(9).unwrap(), ExactScalar::from_int(1));
        assert!(PeriodicMF::three_periodic().partial_sum(3).unwrap().is_zero());
    }

    #[test]
    fn partial_sums_bounded_within_one_period() {
        for f in [PeriodicMF::parity(), PeriodicMF::three_periodic()] {
            let m = f.period();
            let max_over = |hi: u64| -> BigRational {
                let mut best = BigRational::zero();
                let mut acc = ExactScalar::zero();
                for n in 1..=hi {
                    acc += &f.eval(n).unwrap();
                    let s = acc.norm_sq();
                    if s > best {
                        best = s;
                    }
                }
                best
            };
            assert_eq!(max_over(10 * m), max_over(m));
        }
    }

    #[test]
    fn six_periodic_product_table_is_valid() {
        // period 6 = 2 * 3 with the parity and 3-periodic values combined
        let mut t = BTreeMap::new();
        t.insert((2u64, 1u32), ExactScalar::from_int(-1));
        t.insert((3u64, 1u32), ExactScalar::from_int(-2));
        let f = PeriodicMF::new(6, t).unwrap();
        assert_eq!(f.witness(), 2);
        assert!(f.partial_sum(6).unwrap().is_zero());
    }

    #[test]
    fn table_shape_mismatch_rejected() {
        // M = 4 needs (2,1) and (2,2)
        let err = PeriodicMF::new(4, table1(2, -1)).unwrap_err();
        match err {
            Error::Validation(fail) => assert!(matches!(
                fail.violations[0],
                ConditionViolation::TableShape { .. }
            )),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn m4_stabilized_parity_table_is_valid() {
        // f(2) = f(4) = -1 satisfies i-iii with M = 4 (same function as parity)
        let mut t = BTreeMap::new();
        t.insert((2u64, 1u32), ExactScalar::from_int(-1));
        t.insert((2u64, 2u32), ExactScalar::from_int(-1));
        let f = PeriodicMF::new(4, t).unwrap();
        assert_eq!(f.witness(), 2);
        for n in 1..=16 {
            assert_eq!(f.eval(n).unwrap(), PeriodicMF::parity().eval(n).unwrap());
        }
    }

    #[test]
    fn tolerance_mode_accepts_tiny_residuals() {
        // perturb f(2) by 1e-15: exact validation fails, tolerant passes
        let mut t = BTreeMap::new();
        t.insert(
            (2u64, 1u32),
            ExactScalar::new(
                BigRational::new((-1_000_000_000_000_001i64).into(), 1_000_000_000_000_000i64.into()),
                BigRational::zero(),
            ),
        );
        assert!(PeriodicMF::new(2, t.clone()).is_err());
        let f = PeriodicMF::with_validation(2, t, Validation::Tolerance(1e-12)).unwrap();
        assert_eq!(f.witness(), 2);
    }

    #[test]
    fn period_one_rejected() {
        let err = PeriodicMF::new(1, BTreeMap::new()).unwrap_err();
        match err {
            Error::Validation(fail) => assert!(fail
                .violations
                .iter()
                .any(|v| matches!(v, ConditionViolation::NoPrimeDivisor))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let f = PeriodicMF::parity();
        let spec = PeriodicMFSpec::from_function(&f);
        let json = serde_json::to_string(&spec).unwrap();
        let back: PeriodicMFSpec = serde_json::from_str(&json).unwrap();
        let g = back.build(Validation::Exact).unwrap();
        assert_eq!(f, g);
    }
}
