//! Closed-form analytic constants: zeta values, the Euler-product value of
//! the tau correlation series, the correlation limits of scaled divisor
//! error terms, the local weights phi / phi* / beta, and the explicit
//! second-moment limit for a pair of periodic multiplicative functions.

use std::f64::consts::PI;

use crate::arith::{factorize, gcd, is_prime_u64};
use crate::convolve::{g_coefficients, CoefficientVector};
use crate::mf::PeriodicMF;
use crate::Error;

/// Initial terms summed directly in the Euler-Maclaurin zeta evaluation.
pub const ZETA_INITIAL_TERMS: u32 = 50;
/// Bernoulli correction terms applied after the integral term.
pub const ZETA_CORRECTION_TERMS: usize = 10;

/// B_2, B_4, ..., B_20.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Riemann zeta for real s > 1, via Euler-Maclaurin with
/// [`ZETA_INITIAL_TERMS`] direct terms and [`ZETA_CORRECTION_TERMS`]
/// Bernoulli corrections. Relative error is far below 1e-12 in this range.
pub fn zeta(s: f64) -> Result<f64, Error> {
    zeta_with(s, ZETA_INITIAL_TERMS, ZETA_CORRECTION_TERMS)
}

/// Euler-Maclaurin evaluation with explicit truncation parameters.
pub fn zeta_with(s: f64, initial_terms: u32, corrections: usize) -> Result<f64, Error> {
    if !(s > 1.0 + 1e-6) {
        return Err(Error::ZetaDomain(s));
    }
    let n = initial_terms.max(2) as f64;
    let mut sum = 0.0;
    let mut comp = 0.0;
    for k in 1..initial_terms.max(2) {
        kahan_add(&mut sum, &mut comp, (k as f64).powf(-s));
    }
    // integral term + half of f(N)
    kahan_add(&mut sum, &mut comp, n.powf(1.0 - s) / (s - 1.0));
    kahan_add(&mut sum, &mut comp, 0.5 * n.powf(-s));
    // Bernoulli corrections: B_{2k}/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
    let mut rising = s; // s ... (s + 2k - 2), odd number of factors
    let mut fact = 1.0f64; // (2k)!
    for (k, b) in BERNOULLI_EVEN
        .iter()
        .enumerate()
        .take(corrections.min(BERNOULLI_EVEN.len()))
    {
        let two_k = 2 * (k + 1);
        fact *= (two_k - 1) as f64 * two_k as f64;
        let term = b / fact * rising * n.powf(-s - two_k as f64 + 1.0);
        kahan_add(&mut sum, &mut comp, term);
        rising *= (s + two_k as f64 - 1.0) * (s + two_k as f64);
    }
    Ok(sum + comp)
}

fn kahan_add(sum: &mut f64, comp: &mut f64, v: f64) {
    let y = v - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}

/// Closed form of `sum_{n >= 1} tau(c n) tau(d n) / n^s` for coprime c, d:
/// `tau(cd) zeta(s)^4 / zeta(2s) * prod_{p^k || cd} (1 + p^-s)^{-1}
/// (1 - (k-1)/(k+1) p^-s)`.
pub fn tau_correlation_sum(c: u64, d: u64, s: f64) -> Result<f64, Error> {
    if gcd(c, d) != 1 {
        return Err(Error::NotCoprime { c, d });
    }
    let cd = factorize(c * d)?;
    let mut v = cd.tau() as f64 * zeta(s)?.powi(4) / zeta(2.0 * s)?;
    for &(p, k) in cd.pairs() {
        let ps = (p as f64).powf(-s);
        v *= (1.0 - (k as f64 - 1.0) / (k as f64 + 1.0) * ps) / (1.0 + ps);
    }
    Ok(v)
}

/// Brute-force partial sum `sum_{n <= n_limit} tau(c n) tau(d n) / n^s`,
/// the independent oracle for [`tau_correlation_sum`]. Compensated
/// accumulation keeps the positive-term sum overflow- and rounding-safe.
pub fn tau_correlation_partial(c: u64, d: u64, s: f64, n_limit: u64) -> Result<f64, Error> {
    let fc = factorize(c)?;
    let fd = factorize(d)?;
    // smallest-prime-factor sieve for fast factorization of every n
    let n_limit_us = n_limit as usize;
    let mut spf = vec![0u32; n_limit_us + 1];
    for i in 2..=n_limit_us {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n_limit_us {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    let tau_scaled = |f: &crate::arith::Factorization, n: u64| -> f64 {
        // tau(base * n) with base's factorization given
        let mut t = f.tau();
        let mut m = n as usize;
        while m > 1 {
            let p = spf[m] as u64;
            let mut e = 0u64;
            while m % p as usize == 0 {
                m /= p as usize;
                e += 1;
            }
            let ec = f
                .pairs()
                .iter()
                .find(|&&(q, _)| q == p)
                .map(|&(_, k)| k as u64)
                .unwrap_or(0);
            t = t / (ec + 1) * (ec + e + 1);
        }
        t as f64
    };
    let mut sum = 0.0;
    let mut comp = 0.0;
    for n in 1..=n_limit {
        let term = tau_scaled(&fc, n) * tau_scaled(&fd, n) / (n as f64).powf(s);
        kahan_add(&mut sum, &mut comp, term);
    }
    Ok(sum + comp)
}

/// Explicit upper bound for the tail `sum_{n > n_limit}` of the series at
/// s = 3/2: `40 tau(cd) * integral_{n_limit}^inf t^{-3/2} (ln t)^2 dt`,
/// with the integral in closed form.
pub fn tau_correlation_tail_bound(c: u64, d: u64, n_limit: u64) -> Result<f64, Error> {
    let t = n_limit as f64;
    let l = t.ln();
    let integral = 2.0 / t.sqrt() * (l * l + 4.0 * l + 8.0);
    Ok(40.0 * factorize(c * d)?.tau() as f64 * integral)
}

/// The correlation limit `lim (1/X^{3/2}) int_1^X delta(x/a) delta(x/b) dx`
/// together with the reduced data it is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationConstant {
    pub a: u64,
    pub b: u64,
    /// gcd(a, b)
    pub lambda: u64,
    /// a / lambda
    pub c: u64,
    /// b / lambda
    pub d: u64,
    pub value: f64,
}

/// Closed form of the correlation limit:
/// `tau(cd) / (6 pi^2 sqrt(lambda) c d) * zeta(3/2)^4 / zeta(3) *
/// prod_{p^k || cd} (1 - (k-1)/(k+1) p^{-3/2}) / (1 + p^{-3/2})`.
pub fn correlation_limit(a: u64, b: u64) -> Result<CorrelationConstant, Error> {
    assert!(a >= 1 && b >= 1, "scales must be positive");
    let lambda = gcd(a, b);
    let c = a / lambda;
    let d = b / lambda;
    let series = tau_correlation_sum(c, d, 1.5)?;
    // c*d as one integer keeps the value bitwise symmetric in (a, b)
    let value = series / (6.0 * PI * PI * (lambda as f64).sqrt() * (c * d) as f64);
    Ok(CorrelationConstant { a, b, lambda, c, d, value })
}

/// Tong's constant `zeta(3/2)^4 / (6 pi^2 zeta(3))`, the a = b = 1 limit.
pub fn tong_constant() -> f64 {
    correlation_limit(1, 1).expect("constant scales").value
}

/// beta(p) = (1 - p^{-3/2}) / (1 + p^{-3/2}).
pub fn beta(p: u64) -> Result<f64, Error> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    let q = (p as f64).powf(-1.5);
    Ok((1.0 - q) / (1.0 + q))
}

/// phi(p^k) = (k beta(p) + 1) / p^k; phi(p^0) = 1.
pub fn phi(p: u64, k: u32) -> Result<f64, Error> {
    let b = beta(p)?;
    Ok((k as f64 * b + 1.0) / (p as f64).powi(k as i32))
}

/// phi*(p^k) = p^{k/4} phi(p^k) = (k beta(p) + 1) / p^{3k/4}.
pub fn phi_star(p: u64, k: u32) -> Result<f64, Error> {
    let b = beta(p)?;
    Ok((k as f64 * b + 1.0) / (p as f64).powf(0.75 * k as f64))
}

/// phi* evaluated at an arbitrary positive integer by multiplicativity.
pub fn phi_star_at(n: u64) -> Result<f64, Error> {
    let mut v = 1.0;
    for &(p, k) in factorize(n)?.pairs() {
        v *= phi_star(p, k)?;
    }
    Ok(v)
}

/// phi evaluated at an arbitrary positive integer by multiplicativity.
pub fn phi_at(n: u64) -> Result<f64, Error> {
    let mut v = 1.0;
    for &(p, k) in factorize(n)?.pairs() {
        v *= phi(p, k)?;
    }
    Ok(v)
}

/// The second-moment limit
/// `lim (1/X^{3/2}) int_1^X |sum_{n <= x} (f1*f2)(n)|^2 dx`,
/// assembled as the bilinear form
/// `sum_{n,m | M1 M2} g(n) conj(g(m)) c_{n,m}`.
///
/// The imaginary part of the form must vanish to 1e-10 (it is discarded
/// after the check), and a non-positive result is a hard error: the limit
/// is provably positive, so a violation indicates a bug.
pub fn second_moment_limit(f1: &PeriodicMF, f2: &PeriodicMF) -> Result<f64, Error> {
    second_moment_limit_from_g(&g_coefficients(f1, f2)?)
}

pub fn second_moment_limit_from_g(g: &CoefficientVector) -> Result<f64, Error> {
    let entries: Vec<(u64, f64, f64)> = g
        .coeffs()
        .iter()
        .map(|(&n, v)| (n, v.re_f64(), v.im_f64()))
        .collect();
    let mut re = 0.0;
    let mut im = 0.0;
    for &(n, nr, ni) in &entries {
        for &(m, mr, mi) in &entries {
            let c = correlation_limit(n, m)?.value;
            // g(n) * conj(g(m))
            re += c * (nr * mr + ni * mi);
            im += c * (ni * mr - nr * mi);
        }
    }
    if im.abs() > 1e-10 {
        return Err(Error::ResidualImaginary(im.abs()));
    }
    if re <= 0.0 {
        return Err(Error::NonPositiveLimit(re));
    }
    Ok(re)
}
