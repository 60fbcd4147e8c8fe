//! GCD/LCM-structured matrices and their positive-definiteness machinery:
//! Sylvester certificates from leading principal minors, the
//! diagonalization determinant for completely multiplicative weights,
//! tensor factorization of the quadratic form over primes, and the
//! bidiagonal conjugation that reduces the prime-power correlation matrix
//! to a banded closed form.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{divisors, factorize, gcd, lcm};
use crate::special::{beta, correlation_limit, phi_star, phi_star_at};
use crate::Error;

/// Default seed for randomized property checks; override per call.
pub const DEFAULT_SEED: u64 = 0x5eed_d1fa_c702;

// --- dense symmetric-friendly matrix ----------------------------------------

/// Small dense row-major matrix of doubles.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    a: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![0.0; n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.a[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let v = self.get(i, k);
                if v == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += v * rhs.get(k, j);
                }
            }
        }
        out
    }

    /// Determinant by partial-pivot elimination; deterministic order.
    pub fn det(&self) -> f64 {
        let n = self.n;
        let mut a = self.a.clone();
        let mut det = 1.0f64;
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].abs();
            for r in col + 1..n {
                let v = a[r * n + col].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return 0.0;
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            let d = a[col * n + col];
            det *= d;
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
            }
        }
        det
    }

    fn leading_submatrix(&self, k: usize) -> Matrix {
        Matrix::from_fn(k, |i, j| self.get(i, j))
    }

    /// det of every leading principal k x k block, k = 1..=n.
    pub fn leading_principal_minors(&self) -> Vec<f64> {
        (1..=self.n).map(|k| self.leading_submatrix(k).det()).collect()
    }

    /// Largest absolute row sum; an upper bound for the spectral radius.
    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Smallest-eigenvalue estimate for a symmetric matrix via power
    /// iteration on the Gershgorin-shifted complement R*I - M.
    pub fn min_eigenvalue_estimate(&self, seed: u64) -> f64 {
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        let shift = self.max_abs_row_sum() + 1.0;
        let shifted = Matrix::from_fn(n, |i, j| {
            let id = if i == j { shift } else { 0.0 };
            id - self.get(i, j)
        });
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        normalize(&mut v);
        let mut rayleigh = 0.0;
        for _ in 0..600 {
            let mut w = vec![0.0; n];
            for i in 0..n {
                for j in 0..n {
                    w[i] += shifted.get(i, j) * v[j];
                }
            }
            rayleigh = dot(&w, &v);
            normalize(&mut w);
            v = w;
        }
        shift - rayleigh
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}

// --- index sets and weights --------------------------------------------------

/// A finite set of positive integers containing every divisor of each of
/// its elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorClosedSet {
    elements: Vec<u64>,
}

impl DivisorClosedSet {
    /// Validate closure; the first missing divisor is named in the error.
    pub fn new(mut elements: Vec<u64>) -> Result<Self, Error> {
        elements.sort_unstable();
        elements.dedup();
        assert!(!elements.is_empty(), "index set must be non-empty");
        for &e in &elements {
            for d in divisors(e)? {
                if elements.binary_search(&d).is_err() {
                    return Err(Error::NotDivisorClosed(d));
                }
            }
        }
        Ok(Self { elements })
    }

    /// All divisors of n, always divisor closed.
    pub fn divisors_of(n: u64) -> Result<Self, Error> {
        Ok(Self { elements: divisors(n)? })
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Primes appearing in the set, with the largest exponent present.
    pub fn prime_components(&self) -> Result<BTreeMap<u64, u32>, Error> {
        let mut out: BTreeMap<u64, u32> = BTreeMap::new();
        for &e in &self.elements {
            for &(p, k) in factorize(e)?.pairs() {
                let cur = out.entry(p).or_insert(0);
                *cur = (*cur).max(k);
            }
        }
        Ok(out)
    }

    /// Products of prime powers drawn from distinct prime components that
    /// are missing from the set (empty iff the set is product closed).
    pub fn missing_products(&self) -> Result<Vec<u64>, Error> {
        let comps = self.prime_components()?;
        // prime powers of each prime actually present in the set
        let mut choices: Vec<Vec<u64>> = Vec::new();
        for &p in comps.keys() {
            let mut c = vec![1u64];
            let mut pw = p;
            while self.elements.binary_search(&pw).is_ok() {
                c.push(pw);
                pw = match pw.checked_mul(p) {
                    Some(v) => v,
                    None => break,
                };
            }
            choices.push(c);
        }
        let mut products = vec![1u64];
        for c in &choices {
            let prev = std::mem::take(&mut products);
            for &q in c {
                for &v in &prev {
                    products.push(v * q);
                }
            }
        }
        let mut missing: Vec<u64> = products
            .into_iter()
            .filter(|v| self.elements.binary_search(v).is_err())
            .collect();
        missing.sort_unstable();
        missing.dedup();
        Ok(missing)
    }
}

/// Multiplicative weight used to fill gcd/lcm matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightFn {
    /// Explicit values on prime powers; exponents beyond the table repeat
    /// the last entry, primes outside take 1.
    Table(BTreeMap<(u64, u32), f64>),
    /// Completely multiplicative: phi(p^k) = phi(p)^k.
    CompletelyMultiplicative(BTreeMap<u64, f64>),
    /// The correlation weight phi(p^k) = (k beta(p) + 1) / p^k; with the
    /// gcd^{-1/2} prefactor this reproduces the correlation matrix up to
    /// the global constant.
    Phi,
    /// The rescaled weight phi*(p^k) = p^{k/4} phi(p^k).
    PhiStar,
    /// phi(n) = n^e.
    Power(f64),
}

impl WeightFn {
    pub fn eval(&self, n: u64) -> Result<f64, Error> {
        if n == 1 {
            return Ok(1.0);
        }
        match self {
            WeightFn::Table(t) => {
                let mut v = 1.0;
                for &(p, k) in factorize(n)?.pairs() {
                    let max_k = t
                        .keys()
                        .filter(|&&(q, _)| q == p)
                        .map(|&(_, j)| j)
                        .max();
                    v *= match max_k {
                        None => 1.0,
                        Some(a) => *t.get(&(p, k.min(a))).ok_or(Error::WeightUndefined(n))?,
                    };
                }
                Ok(v)
            }
            WeightFn::CompletelyMultiplicative(t) => {
                let mut v = 1.0;
                for &(p, k) in factorize(n)?.pairs() {
                    let w = *t.get(&p).ok_or(Error::WeightUndefined(p))?;
                    v *= w.powi(k as i32);
                }
                Ok(v)
            }
            WeightFn::Phi => crate::special::phi_at(n),
            WeightFn::PhiStar => phi_star_at(n),
            WeightFn::Power(e) => Ok((n as f64).powf(*e)),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            WeightFn::Table(_) => "prime-power table".into(),
            WeightFn::CompletelyMultiplicative(t) => {
                let mut s = String::from("completely multiplicative");
                for (p, v) in t {
                    let _ = write!(s, " {p}:{v:.6}");
                }
                s
            }
            WeightFn::Phi => "phi".into(),
            WeightFn::PhiStar => "phi-star".into(),
            WeightFn::Power(e) => format!("n^{e}"),
        }
    }

    /// Random completely multiplicative weight with p^{1/4} phi(p) drawn
    /// uniformly from (lo, hi) for each prime of the set.
    pub fn random_admissible(
        set: &DivisorClosedSet,
        seed: u64,
        lo: f64,
        hi: f64,
    ) -> Result<Self, Error> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = BTreeMap::new();
        for &p in set.prime_components()?.keys() {
            let u: f64 = rng.gen_range(lo..hi);
            t.insert(p, u * (p as f64).powf(-0.25));
        }
        Ok(WeightFn::CompletelyMultiplicative(t))
    }
}

// --- gcd/lcm matrices ---------------------------------------------------------

/// Symmetric matrix with entries
/// `gcd(a,b)^{-1/2} * phi(lcm(a,b)/gcd(a,b))` over an index set S.
#[derive(Debug, Clone)]
pub struct GcdLcmMatrix {
    index: Vec<u64>,
    matrix: Matrix,
    descriptor: String,
}

impl GcdLcmMatrix {
    pub fn index(&self) -> &[u64] {
        &self.index
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    /// Row-major CSV with the index set as header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.index.iter().map(|v| v.to_string()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for i in 0..self.index.len() {
            let row: Vec<String> = (0..self.index.len())
                .map(|j| format!("{}", self.matrix.get(i, j)))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Build the gcd/lcm matrix for a divisor-closed index set and weight.
/// Weight values must be finite and non-negative with phi(1) = 1.
pub fn build_matrix(set: &DivisorClosedSet, weight: &WeightFn) -> Result<GcdLcmMatrix, Error> {
    let idx = set.elements();
    let n = idx.len();
    let mut m = Matrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let g = gcd(idx[i], idx[j]);
            let l = lcm(idx[i], idx[j]);
            let w = weight.eval(l / g)?;
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InadmissibleWeight { p: l / g, value: w });
            }
            let v = w / (g as f64).sqrt();
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    Ok(GcdLcmMatrix {
        index: idx.to_vec(),
        matrix: m,
        descriptor: weight.describe(),
    })
}

/// The correlation-limit matrix (c_{a,b}) over the divisors of n.
pub fn correlation_matrix(n: u64) -> Result<GcdLcmMatrix, Error> {
    let idx = divisors(n)?;
    let size = idx.len();
    let mut m = Matrix::zeros(size);
    for i in 0..size {
        for j in i..size {
            let v = correlation_limit(idx[i], idx[j])?.value;
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    Ok(GcdLcmMatrix {
        index: idx,
        matrix: m,
        descriptor: "correlation-limit".into(),
    })
}

// --- Sylvester criterion -------------------------------------------------------

/// Leading principal minors and the positive-definiteness flag.
/// Symmetry is required up to 1e-12.
pub fn sylvester_pd(m: &Matrix) -> Result<(bool, Vec<f64>), Error> {
    for i in 0..m.dim() {
        for j in i + 1..m.dim() {
            let dev = (m.get(i, j) - m.get(j, i)).abs();
            if dev > 1e-12 * (1.0 + m.get(i, j).abs().max(m.get(j, i).abs())) {
                return Err(Error::NotSymmetric { i, j, dev });
            }
        }
    }
    let minors = m.leading_principal_minors();
    let pd = minors.iter().all(|&d| d > 0.0);
    Ok((pd, minors))
}

/// Positive-definiteness certificate for the correlation matrix over the
/// divisors of a modulus product.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PdCertificate {
    pub index_set: Vec<u64>,
    pub minors: Vec<f64>,
    pub positive_definite: bool,
}

/// Certificate for (c_{a,b})_{a,b | M1 M2}; any non-positive minor is a
/// hard error since the form is provably positive definite.
pub fn pd_certificate(
    f1: &crate::mf::PeriodicMF,
    f2: &crate::mf::PeriodicMF,
) -> Result<PdCertificate, Error> {
    pd_certificate_for_modulus(f1.period() * f2.period())
}

pub fn pd_certificate_for_modulus(n: u64) -> Result<PdCertificate, Error> {
    let mat = correlation_matrix(n)?;
    let (pd, minors) = sylvester_pd(mat.matrix())?;
    if !pd {
        let (index, &value) = minors
            .iter()
            .enumerate()
            .find(|(_, &v)| v <= 0.0)
            .expect("a non-positive minor exists");
        return Err(Error::NonPositiveMinor { index: index + 1, value });
    }
    Ok(PdCertificate {
        index_set: mat.index().to_vec(),
        minors,
        positive_definite: pd,
    })
}

// --- diagonalization determinant ------------------------------------------------

/// Closed-form determinant of the gcd/lcm matrix for a completely
/// multiplicative weight with p^{1/4} phi(p) in (0, 1) on a divisor-closed
/// set: `prod_{d in S} phi(d)^2 (mu * psi)(d)` with
/// `psi(p) = 1 / (sqrt(p) phi(p)^2)`.
pub fn selberg_determinant(set: &DivisorClosedSet, weight: &WeightFn) -> Result<f64, Error> {
    let primes = set.prime_components()?;
    let phi_p = |p: u64| -> Result<f64, Error> {
        let v = weight.eval(p)?;
        let scaled = (p as f64).powf(0.25) * v;
        // strictly inside (0, 1); the boundary gives only non-negativity
        if !(scaled > 0.0 && scaled < 1.0 - 1e-12) {
            return Err(Error::InadmissibleWeight { p, value: v });
        }
        Ok(v)
    };
    // admissibility + complete multiplicativity over the set's primes
    let mut phis = BTreeMap::new();
    for (&p, &max_k) in &primes {
        let v = phi_p(p)?;
        phis.insert(p, v);
        // the closed form needs phi(p^k) = phi(p)^k on the set
        for k in 1..=max_k {
            let direct = weight.eval(p.pow(k))?;
            if (direct - v.powi(k as i32)).abs() > 1e-12 * direct.abs().max(1.0) {
                return Err(Error::InadmissibleWeight { p: p.pow(k), value: direct });
            }
        }
    }
    let mut det = 1.0f64;
    for &d in set.elements() {
        let mut term = weight.eval(d)?.powi(2);
        // (mu * psi)(d) = prod_{p^k || d} psi(p)^{k-1} (psi(p) - 1)
        for &(p, k) in factorize(d)?.pairs() {
            let psi = 1.0 / ((p as f64).sqrt() * phis[&p] * phis[&p]);
            term *= psi.powi(k as i32 - 1) * (psi - 1.0);
        }
        det *= term;
    }
    Ok(det)
}

// --- tensor factorization ---------------------------------------------------------

/// Evaluate both sides of the prime-by-prime factorization of the
/// quadratic form `sum_{a,b in S} gcd^{-1/2} phi(lcm/gcd) x_a x_b` for a
/// multiplicatively split vector x (given by its values on the prime
/// powers of S; x_1 = 1). The set must contain all products of prime
/// powers drawn from distinct primes, otherwise the missing products are
/// reported.
pub fn tensor_factor_check(
    set: &DivisorClosedSet,
    weight: &WeightFn,
    split: &BTreeMap<u64, f64>,
) -> Result<(f64, f64), Error> {
    let missing = set.missing_products()?;
    if !missing.is_empty() {
        return Err(Error::NotProductClosed(missing));
    }
    let x_at = |a: u64| -> Result<f64, Error> {
        let mut v = 1.0;
        for &(p, k) in factorize(a)?.pairs() {
            v *= *split.get(&p.pow(k)).ok_or(Error::WeightUndefined(p.pow(k)))?;
        }
        Ok(v)
    };
    let elems = set.elements();
    let mut lhs = 0.0;
    for &a in elems {
        for &b in elems {
            let g = gcd(a, b);
            let l = lcm(a, b);
            lhs += weight.eval(l / g)? / (g as f64).sqrt() * x_at(a)? * x_at(b)?;
        }
    }
    let mut rhs = 1.0;
    for &p in set.prime_components()?.keys() {
        // exponents of p present in S, including 0
        let mut exps = vec![0u32];
        let mut pw = p;
        let mut k = 1u32;
        while set.elements().binary_search(&pw).is_ok() {
            exps.push(k);
            pw = match pw.checked_mul(p) {
                Some(v) => v,
                None => break,
            };
            k += 1;
        }
        let xv = |k: u32| -> Result<f64, Error> {
            if k == 0 {
                Ok(1.0)
            } else {
                split
                    .get(&p.pow(k))
                    .copied()
                    .ok_or(Error::WeightUndefined(p.pow(k)))
            }
        };
        let mut local = 0.0;
        for &k in &exps {
            for &l in &exps {
                let w = weight.eval(p.pow(k.abs_diff(l)))?;
                local += w / (p as f64).powf(k.min(l) as f64 / 2.0) * xv(k)? * xv(l)?;
            }
        }
        rhs *= local;
    }
    Ok((lhs, rhs))
}

// --- conjugation of the prime-power correlation matrix -----------------------------

/// The lower-bidiagonal conjugation matrix with unit diagonal,
/// -p^{-3/4} on the first subdiagonal and the single extra entry
/// -p^{-3/4} at (K-1, K); determinant 1 - p^{-3/2}.
#[derive(Debug, Clone)]
pub struct ConjugationMatrix {
    pub dim: usize,
    pub p: u64,
    matrix: Matrix,
}

impl ConjugationMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Closed-form determinant 1 - p^{-3/2}.
    pub fn det_closed_form(&self) -> f64 {
        1.0 - (self.p as f64).powf(-1.5)
    }
}

/// Build the conjugation matrix of dimension K for the prime p.
/// Indices are 1-based in the entry rule; row i corresponds to p^{i-1}.
pub fn build_conjugation(k: usize, p: u64) -> Result<ConjugationMatrix, Error> {
    if k < 2 {
        return Err(Error::ConjugationDimension(k));
    }
    let q = (p as f64).powf(-0.75);
    let mut m = Matrix::identity(k);
    for i in 1..k {
        m.set(i, i - 1, -q); // (i+1, i) in 1-based indexing
    }
    m.set(k - 2, k - 1, -q); // (K-1, K) in 1-based indexing
    Ok(ConjugationMatrix { dim: k, p, matrix: m })
}

/// The symmetric prime-power matrix (phi*(p^{|i-j|}))_{i,j <= K}.
pub fn phi_star_toeplitz(k: usize, p: u64) -> Result<Matrix, Error> {
    let vals: Result<Vec<f64>, Error> =
        (0..k as u32).map(|m| phi_star(p, m)).collect();
    let vals = vals?;
    Ok(Matrix::from_fn(k, |i, j| vals[i.abs_diff(j)]))
}

/// A = U^T M U.
pub fn conjugate(m: &Matrix, u: &ConjugationMatrix) -> Matrix {
    u.matrix().transpose().mul(&m.mul(u.matrix()))
}

/// Conjugate the prime-power matrix and compare against its banded closed
/// form `beta (1 - p^{-3/2}) p^{-3|i-j|/4}` on the leading (K-1)-block and
/// the (K, K) corner, zero elsewhere. Returns the max absolute deviation;
/// deviations above 1e-10 are an error naming the worst entry.
pub fn check_conjugation_identity(k: usize, p: u64) -> Result<f64, Error> {
    let u = build_conjugation(k, p)?;
    let m = phi_star_toeplitz(k, p)?;
    let a = conjugate(&m, &u);
    let b = beta(p)?;
    let scale = b * (1.0 - (p as f64).powf(-1.5));
    let mut worst = 0.0f64;
    let mut worst_at = (0usize, 0usize);
    for i in 0..k {
        for j in 0..k {
            // 1-based rule: inside the leading (K-1) block or the corner
            let inside = (i < k - 1 && j < k - 1) || (i == k - 1 && j == k - 1);
            let closed = if inside {
                scale * (p as f64).powf(-0.75 * i.abs_diff(j) as f64)
            } else {
                0.0
            };
            let dev = (a.get(i, j) - closed).abs();
            if dev > worst {
                worst = dev;
                worst_at = (i, j);
            }
        }
    }
    if worst > 1e-10 {
        return Err(Error::IdentityDeviation {
            i: worst_at.0 + 1,
            j: worst_at.1 + 1,
            dev: worst,
        });
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn divisor_closed_validation() {
        assert!(DivisorClosedSet::new(vec![1, 2, 3, 6]).is_ok());
        match DivisorClosedSet::new(vec![1, 2, 6]) {
            Err(Error::NotDivisorClosed(3)) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn build_matrix_examples() {
        let s1 = DivisorClosedSet::new(vec![1]).unwrap();
        let m = build_matrix(&s1, &WeightFn::Power(-0.75)).unwrap();
        assert_eq!(m.entry(0, 0), 1.0);

        let s = DivisorClosedSet::new(vec![1, 2]).unwrap();
        let m = build_matrix(&s, &WeightFn::Power(-0.75)).unwrap();
        assert_relative_eq!(m.entry(0, 1), 2f64.powf(-0.75), max_relative = 1e-15);
        assert_relative_eq!(m.entry(1, 1), 2f64.powf(-0.5), max_relative = 1e-15);

        let s4 = DivisorClosedSet::divisors_of(4).unwrap();
        let m = build_matrix(&s4, &WeightFn::PhiStar).unwrap();
        // entry (2, 4): gcd 2, lcm/gcd = 2
        assert_relative_eq!(
            m.entry(1, 2),
            2f64.powf(-0.5) * phi_star(2, 1).unwrap(),
            max_relative = 1e-15
        );
        // diagonal is a^{-1/2}
        for (i, &a) in m.index().iter().enumerate() {
            assert_relative_eq!(m.entry(i, i), (a as f64).powf(-0.5), max_relative = 1e-15);
        }
    }

    #[test]
    fn sylvester_examples() {
        let id = Matrix::identity(3);
        let (pd, minors) = sylvester_pd(&id).unwrap();
        assert!(pd);
        assert_eq!(minors, vec![1.0, 1.0, 1.0]);

        let m = Matrix::from_fn(2, |i, j| if i == j { 1.0 } else { 2.0 });
        let (pd, minors) = sylvester_pd(&m).unwrap();
        assert!(!pd);
        assert_eq!(minors, vec![1.0, -3.0]);

        let mut asym = Matrix::identity(2);
        asym.set(0, 1, 0.5);
        assert!(matches!(sylvester_pd(&asym), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn correlation_weight_matrix_divisors_of_12_is_positive_definite() {
        // with the gcd^{-1/2} prefactor the positive-definite family uses
        // the unstarred weight (the matrix is the correlation matrix over
        // the global constant); the starred weight belongs to the Toeplitz
        // prime-power blocks without the prefactor
        let s = DivisorClosedSet::divisors_of(12).unwrap();
        let m = build_matrix(&s, &WeightFn::Phi).unwrap();
        let (pd, _) = sylvester_pd(m.matrix()).unwrap();
        assert!(pd);
        // cross-check with the smallest-eigenvalue estimate
        assert!(m.matrix().min_eigenvalue_estimate(DEFAULT_SEED) > 0.0);
        // and the phi* Toeplitz blocks themselves are positive definite
        for p in [2u64, 3] {
            let t = phi_star_toeplitz(6, p).unwrap();
            let (pd, _) = sylvester_pd(&t).unwrap();
            assert!(pd, "p={p}");
        }
    }

    #[test]
    fn correlation_weight_matrix_is_proportional_to_correlation_matrix() {
        let m = build_matrix(
            &DivisorClosedSet::divisors_of(12).unwrap(),
            &WeightFn::Phi,
        )
        .unwrap();
        let c = correlation_matrix(12).unwrap();
        let scale = crate::special::tong_constant();
        for i in 0..m.index().len() {
            for j in 0..m.index().len() {
                assert_relative_eq!(
                    scale * m.entry(i, j),
                    c.entry(i, j),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn sylvester_agrees_with_eigenvalue_sign() {
        let cases: Vec<Matrix> = vec![
            Matrix::identity(4),
            Matrix::from_fn(2, |i, j| if i == j { 1.0 } else { 2.0 }),
            build_matrix(
                &DivisorClosedSet::divisors_of(36).unwrap(),
                &WeightFn::Power(-0.75),
            )
            .unwrap()
            .matrix()
            .clone(),
        ];
        for (i, m) in cases.iter().enumerate() {
            let (pd, _) = sylvester_pd(m).unwrap();
            let lam = m.min_eigenvalue_estimate(DEFAULT_SEED + i as u64);
            assert_eq!(pd, lam > 0.0, "case {i}: pd={pd} lambda_min={lam}");
        }
    }

    #[test]
    fn selberg_determinant_examples() {
        let s1 = DivisorClosedSet::new(vec![1]).unwrap();
        assert_eq!(selberg_determinant(&s1, &WeightFn::Power(-0.75)).unwrap(), 1.0);

        let s = DivisorClosedSet::new(vec![1, 2]).unwrap();
        let det = selberg_determinant(&s, &WeightFn::Power(-0.75)).unwrap();
        assert_relative_eq!(
            det,
            2f64.powf(-0.5) - 2f64.powf(-1.5),
            max_relative = 1e-14
        );
        assert_relative_eq!(det, 0.353553, max_relative = 1e-5);
    }

    #[test]
    fn selberg_determinant_matches_direct_for_360() {
        let s = DivisorClosedSet::divisors_of(360).unwrap();
        let w = WeightFn::Power(-0.75);
        let closed = selberg_determinant(&s, &w).unwrap();
        let direct = build_matrix(&s, &w).unwrap().matrix().det();
        assert_relative_eq!(closed, direct, max_relative = 1e-9);
    }

    #[test]
    fn selberg_rejects_boundary_weight() {
        // phi(p) = p^{-1/4} sits exactly on the boundary
        let s = DivisorClosedSet::new(vec![1, 2]).unwrap();
        assert!(matches!(
            selberg_determinant(&s, &WeightFn::Power(-0.25)),
            Err(Error::InadmissibleWeight { .. })
        ));
    }

    #[test]
    fn squarefree_random_weights_are_nonnegative() {
        // divisor-closed squarefree set: all eigenvalues >= -1e-10
        let s = DivisorClosedSet::divisors_of(30).unwrap();
        for seed in 0..10u64 {
            let w = WeightFn::random_admissible(&s, DEFAULT_SEED + seed, 0.05, 0.999).unwrap();
            let m = build_matrix(&s, &w).unwrap();
            let lam = m.matrix().min_eigenvalue_estimate(seed);
            assert!(lam >= -1e-10, "seed {seed}: lambda_min = {lam}");
        }
    }

    #[test]
    fn tensor_factorization_examples() {
        // single prime: the factorization is the form itself
        let s = DivisorClosedSet::new(vec![1, 2]).unwrap();
        let mut split = BTreeMap::new();
        split.insert(2u64, 0.7);
        let (lhs, rhs) = tensor_factor_check(&s, &WeightFn::Power(-0.75), &split).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-14);

        // divisors of 6 with unit split values
        let s6 = DivisorClosedSet::divisors_of(6).unwrap();
        let mut ones = BTreeMap::new();
        ones.insert(2u64, 1.0);
        ones.insert(3u64, 1.0);
        let (lhs, rhs) = tensor_factor_check(&s6, &WeightFn::PhiStar, &ones).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
    }

    #[test]
    fn tensor_factorization_rejects_missing_products() {
        let s = DivisorClosedSet::new(vec![1, 2, 3, 5, 6, 10]).unwrap();
        match tensor_factor_check(&s, &WeightFn::Power(-0.75), &BTreeMap::new()) {
            Err(Error::NotProductClosed(missing)) => {
                assert!(missing.contains(&30), "missing = {missing:?}");
                assert!(missing.contains(&15));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn conjugation_matrix_shape_and_determinant() {
        let u = build_conjugation(2, 2).unwrap();
        let q = 2f64.powf(-0.75);
        assert_eq!(u.matrix().get(0, 0), 1.0);
        assert_eq!(u.matrix().get(1, 1), 1.0);
        assert_relative_eq!(u.matrix().get(1, 0), -q, max_relative = 1e-15);
        assert_relative_eq!(u.matrix().get(0, 1), -q, max_relative = 1e-15);

        let u = build_conjugation(5, 3).unwrap();
        assert_relative_eq!(
            u.matrix().det(),
            1.0 - 3f64.powf(-1.5),
            max_relative = 1e-12
        );
        assert_relative_eq!(u.matrix().det(), u.det_closed_form(), max_relative = 1e-12);
        assert_relative_eq!(u.det_closed_form(), 0.807550, max_relative = 1e-5);

        assert!(matches!(
            build_conjugation(1, 2),
            Err(Error::ConjugationDimension(1))
        ));
    }

    #[test]
    fn conjugated_matrix_closed_form_k2() {
        let dev = check_conjugation_identity(2, 2).unwrap();
        assert!(dev <= 1e-12, "deviation {dev}");
        // the diagonal equals beta(2) (1 - 2^{-3/2}) and (1,2) vanishes
        let u = build_conjugation(2, 2).unwrap();
        let a = conjugate(&phi_star_toeplitz(2, 2).unwrap(), &u);
        let expect = beta(2).unwrap() * (1.0 - 2f64.powf(-1.5));
        assert_relative_eq!(a.get(0, 0), expect, max_relative = 1e-12);
        assert_relative_eq!(a.get(1, 1), expect, max_relative = 1e-12);
        assert!(a.get(0, 1).abs() <= 1e-12);
    }

    #[test]
    fn conjugated_matrix_closed_form_larger() {
        for p in [2u64, 3, 5] {
            for k in 2..=8usize {
                let dev = check_conjugation_identity(k, p).unwrap();
                assert!(dev <= 1e-12, "p={p} K={k}: {dev}");
                // last column vanishes off the corner
                let u = build_conjugation(k, p).unwrap();
                let a = conjugate(&phi_star_toeplitz(k, p).unwrap(), &u);
                for i in 0..k - 1 {
                    assert!(a.get(i, k - 1).abs() <= 1e-12, "p={p} K={k} i={i}");
                    assert!(a.get(k - 1, i).abs() <= 1e-12, "p={p} K={k} i={i}");
                }
            }
        }
    }

    #[test]
    fn conjugation_determinant_relation() {
        for p in [2u64, 3] {
            for k in 2..=8usize {
                let u = build_conjugation(k, p).unwrap();
                let m = phi_star_toeplitz(k, p).unwrap();
                let a = conjugate(&m, &u);
                let lhs = a.det();
                let rhs = u.det_closed_form().powi(2) * m.det();
                assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn pd_certificates() {
        // 1x1 case: the single minor is Tong's constant
        let c = pd_certificate_for_modulus(1).unwrap();
        assert_eq!(c.index_set, vec![1]);
        assert!((c.minors[0] - 0.6543).abs() < 1e-4);

        // parity (x) parity: divisors of 4
        let c = pd_certificate(&crate::mf::PeriodicMF::parity(), &crate::mf::PeriodicMF::parity())
            .unwrap();
        assert_eq!(c.index_set, vec![1, 2, 4]);
        assert_eq!(c.minors.len(), 3);
        assert!(c.positive_definite);
        assert!(c.minors.iter().all(|&m| m > 0.0));

        let c = pd_certificate_for_modulus(36).unwrap();
        assert_eq!(c.minors.len(), 9);
        assert!(c.minors.iter().all(|&m| m > 0.0));
    }

    #[test]
    fn csv_export_shape() {
        let s = DivisorClosedSet::divisors_of(4).unwrap();
        let m = build_matrix(&s, &WeightFn::PhiStar).unwrap();
        let csv = m.to_csv();
        let lines: Vec<&str> = csv.trim().lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "1,2,4");
    }
}
