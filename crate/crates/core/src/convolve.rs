//! Dirichlet convolution on divisor-closed supports and the coefficient
//! vector g = f1 * f2 * mu * mu expressing partial sums of f1 * f2 as a
//! finite combination of divisor error terms.

use std::collections::BTreeMap;

use crate::arith::{divisors, factorize};
use crate::exact::ExactScalar;
use crate::mf::PeriodicMF;
use crate::Error;

/// Value map on the divisors of some N.
pub type ValueMap = BTreeMap<u64, ExactScalar>;

/// (f * g)(n) = sum_{d | n} f(d) g(n/d) for every divisor n of `n_max`,
/// exact. Both maps must be defined on all divisors of `n_max`.
pub fn dirichlet_convolve(
    f: &ValueMap,
    g: &ValueMap,
    n_max: u64,
) -> Result<ValueMap, Error> {
    let divs = divisors(n_max)?;
    fn need(m: &ValueMap, d: u64) -> Result<&ExactScalar, Error> {
        m.get(&d).ok_or(Error::MissingDivisorValue(d))
    }
    let mut out = ValueMap::new();
    for &n in &divs {
        let mut acc = ExactScalar::zero();
        for &d in factorize(n)?.divisors().iter() {
            acc += &(need(f, d)? * need(g, n / d)?);
        }
        out.insert(n, acc);
    }
    Ok(out)
}

/// Tabulate an arithmetic function on the divisors of n.
pub fn tabulate(
    n: u64,
    mut f: impl FnMut(u64) -> Result<ExactScalar, Error>,
) -> Result<ValueMap, Error> {
    let mut out = ValueMap::new();
    for d in divisors(n)? {
        out.insert(d, f(d)?);
    }
    Ok(out)
}

/// The Möbius function tabulated on the divisors of n.
pub fn mu_map(n: u64) -> Result<ValueMap, Error> {
    tabulate(n, |d| Ok(ExactScalar::from_int(factorize(d)?.mu())))
}

/// The coefficients g(n) = (f1 * f2 * mu * mu)(n) on the divisors of M1*M2.
///
/// Since (f_i * mu) vanishes off the divisors of M_i, this support carries
/// the whole function.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    modulus_product: u64,
    coeffs: ValueMap,
}

impl CoefficientVector {
    pub fn modulus_product(&self) -> u64 {
        self.modulus_product
    }

    pub fn coeffs(&self) -> &ValueMap {
        &self.coeffs
    }

    pub fn get(&self, n: u64) -> ExactScalar {
        self.coeffs.get(&n).cloned().unwrap_or_else(ExactScalar::zero)
    }

    /// Divisors of M1*M2 with a nonzero coefficient.
    pub fn support(&self) -> Vec<u64> {
        self.coeffs
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(&n, _)| n)
            .collect()
    }
}

/// Compute g = f1 * f2 * mu * mu restricted to the divisors of M1*M2.
pub fn g_coefficients(f1: &PeriodicMF, f2: &PeriodicMF) -> Result<CoefficientVector, Error> {
    let n = f1.period() * f2.period();
    let mu = mu_map(n)?;
    let t1 = tabulate(n, |d| f1.eval(d))?;
    let t2 = tabulate(n, |d| f2.eval(d))?;
    let h1 = dirichlet_convolve(&t1, &mu, n)?;
    let h2 = dirichlet_convolve(&t2, &mu, n)?;
    let coeffs = dirichlet_convolve(&h1, &h2, n)?;
    Ok(CoefficientVector { modulus_product: n, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_map(n: u64) -> ValueMap {
        tabulate(n, |_| Ok(ExactScalar::one())).unwrap()
    }

    #[test]
    fn mobius_inversion_identity() {
        // (mu * 1)(n) = [n = 1] on the divisors of 60
        let conv = dirichlet_convolve(&mu_map(60).unwrap(), &one_map(60), 60).unwrap();
        for (&n, v) in &conv {
            if n == 1 {
                assert!(v.is_one());
            } else {
                assert!(v.is_zero(), "n={n}");
            }
        }
    }

    #[test]
    fn parity_self_convolution_values() {
        let parity = PeriodicMF::parity();
        let t = tabulate(4, |d| parity.eval(d)).unwrap();
        let sq = dirichlet_convolve(&t, &t, 4).unwrap();
        assert_eq!(sq[&2], ExactScalar::from_int(-2));
        assert_eq!(sq[&4], ExactScalar::from_int(-1)); // -1 + 1 - 1
    }

    #[test]
    fn missing_divisor_is_named() {
        let mut f = one_map(6);
        f.remove(&3);
        match dirichlet_convolve(&f, &one_map(6), 6) {
            Err(Error::MissingDivisorValue(3)) => {}
            other => panic!("expected missing divisor 3, got {other:?}"),
        }
    }

    #[test]
    fn g_for_parity_squared() {
        let g = g_coefficients(&PeriodicMF::parity(), &PeriodicMF::parity()).unwrap();
        assert_eq!(g.modulus_product(), 4);
        assert_eq!(g.get(1), ExactScalar::from_int(1));
        assert_eq!(g.get(2), ExactScalar::from_int(-4));
        assert_eq!(g.get(4), ExactScalar::from_int(4));
        assert_eq!(g.support(), vec![1, 2, 4]);
    }

    #[test]
    fn g_for_three_periodic_squared() {
        let f = PeriodicMF::three_periodic();
        let g = g_coefficients(&f, &f).unwrap();
        assert_eq!(g.get(1), ExactScalar::from_int(1));
        assert_eq!(g.get(3), ExactScalar::from_int(-6));
        assert_eq!(g.get(9), ExactScalar::from_int(9));
    }

    #[test]
    fn g_for_mixed_periods_has_product_structure() {
        let g = g_coefficients(&PeriodicMF::parity(), &PeriodicMF::three_periodic()).unwrap();
        assert_eq!(g.modulus_product(), 6);
        assert_eq!(g.get(1), ExactScalar::from_int(1));
        assert_eq!(g.get(2), ExactScalar::from_int(-2));
        assert_eq!(g.get(3), ExactScalar::from_int(-3));
        assert_eq!(g.get(6), ExactScalar::from_int(6));
    }

    #[test]
    fn g_of_one_is_one() {
        let g = g_coefficients(&PeriodicMF::parity(), &PeriodicMF::three_periodic()).unwrap();
        assert!(g.get(1).is_one());
    }

    #[test]
    fn convolution_is_commutative_and_associative() {
        let n = 36;
        let parity = PeriodicMF::parity();
        let f = tabulate(n, |d| parity.eval(d)).unwrap();
        let g = mu_map(n).unwrap();
        let h = tabulate(n, |d| Ok(ExactScalar::from_int(d as i64 % 5 - 2))).unwrap();
        assert_eq!(
            dirichlet_convolve(&f, &g, n).unwrap(),
            dirichlet_convolve(&g, &f, n).unwrap()
        );
        let fg_h = dirichlet_convolve(&dirichlet_convolve(&f, &g, n).unwrap(), &h, n).unwrap();
        let f_gh = dirichlet_convolve(&f, &dirichlet_convolve(&g, &h, n).unwrap(), n).unwrap();
        assert_eq!(fg_h, f_gh);
    }
}
