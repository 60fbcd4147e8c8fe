//! Exact-route machinery: partial sums of f1 * f2 as scaled Gaussian
//! integers, the step-function square integral, and the identity check
//! against the error-term decomposition.
//!
//! All values are multiples of 1/Q for a fixed integer Q derived from the
//! denominators of the inputs, so running sums and their squares are plain
//! integer arithmetic; doubles appear only at emission.

use num::bigint::BigInt;
use num::{Integer, One, ToPrimitive};
use rayon::prelude::*;

use crate::convolve::{g_coefficients, CoefficientVector};
use crate::delta::{delta_or_zero, divisor_summatory, TauStream};
use crate::mf::PeriodicMF;
use crate::Error;

use super::MomentParams;

/// g scaled to Gaussian integers: (divisor, Q*re, Q*im) plus Q itself.
pub(super) struct ScaledCoefficients {
    pub entries: Vec<(u64, i64, i64)>,
    pub q: i64,
}

pub(super) fn scale_coefficients(g: &CoefficientVector) -> Result<ScaledCoefficients, Error> {
    let mut q = BigInt::one();
    for v in g.coeffs().values() {
        q = q.lcm(v.re.denom()).lcm(v.im.denom());
    }
    let qi = q.to_i64().ok_or(Error::ExactOverflow)?;
    let mut entries = Vec::new();
    for (&d, v) in g.coeffs() {
        if v.is_zero() {
            continue;
        }
        let re = (&v.re * &q)
            .to_integer()
            .to_i64()
            .ok_or(Error::ExactOverflow)?;
        let im = (&v.im * &q)
            .to_integer()
            .to_i64()
            .ok_or(Error::ExactOverflow)?;
        entries.push((d, re, im));
    }
    Ok(ScaledCoefficients { entries, q: qi })
}

/// Q * S(m) = sum_d Q g(d) D(m / d), exact: the combinatorial identity
/// between partial sums of g * tau and the divisor summatory function.
pub(super) fn scaled_partial_sum(sc: &ScaledCoefficients, m: u64) -> (i128, i128) {
    let mut re = 0i128;
    let mut im = 0i128;
    for &(d, gr, gi) in &sc.entries {
        let dd = divisor_summatory(m / d) as i128;
        re += gr as i128 * dd;
        im += gi as i128 * dd;
    }
    (re, im)
}

/// Integer chunk plan covering (0, floor(X)]: floors of all grid points
/// plus span-sized subdivisions.
fn integer_bounds(grid: &[f64], span: u64) -> Vec<u64> {
    let span = span.max(16);
    let mut bounds = vec![0u64];
    let mut prev = 0u64;
    for &g in grid {
        let m = g as u64;
        let mut c = (prev / span) * span + span;
        while c < m {
            if c > prev {
                bounds.push(c);
            }
            c += span;
        }
        if m > prev {
            bounds.push(m);
            prev = m;
        }
    }
    bounds
}

/// Sum of |Q S(n)|^2 over n in (lo, hi], exact.
fn chunk_square_sum(sc: &ScaledCoefficients, lo: u64, hi: u64, seg_len: u64) -> Result<i128, Error> {
    let len = (hi - lo) as usize;
    let mut coeff = vec![(0i64, 0i64); len];
    for &(d, gr, gi) in &sc.entries {
        let m0 = lo / d + 1; // first m with d*m > lo
        if d * m0 > hi {
            continue;
        }
        let needed = hi / d - m0 + 2;
        let mut stream = TauStream::new(m0, seg_len.min(needed))?;
        let mut n = d * m0;
        while n <= hi {
            let t = stream.next_tau()? as i64;
            let slot = &mut coeff[(n - lo - 1) as usize];
            slot.0 = slot.0.checked_add(gr.checked_mul(t).ok_or(Error::ExactOverflow)?)
                .ok_or(Error::ExactOverflow)?;
            slot.1 = slot.1.checked_add(gi.checked_mul(t).ok_or(Error::ExactOverflow)?)
                .ok_or(Error::ExactOverflow)?;
            n += d;
        }
    }
    let (mut re, mut im) = scaled_partial_sum(sc, lo);
    let mut acc = 0i128;
    for &(cr, ci) in &coeff {
        re += cr as i128;
        im += ci as i128;
        let sq = re
            .checked_mul(re)
            .and_then(|a| im.checked_mul(im).and_then(|b| a.checked_add(b)))
            .ok_or(Error::ExactOverflow)?;
        acc = acc.checked_add(sq).ok_or(Error::ExactOverflow)?;
    }
    Ok(acc)
}

/// `int_1^X |S(x)|^2 dx` at each grid point:
/// `sum_{n < floor(X)} |S(n)|^2 + (X - floor(X)) |S(floor(X))|^2`,
/// accumulated in scaled integers.
pub(super) fn step_square_integral(
    g: &CoefficientVector,
    params: &MomentParams,
) -> Result<Vec<f64>, Error> {
    let sc = scale_coefficients(g)?;
    let bounds = integer_bounds(&params.grid, params.chunk_span as u64);
    let chunks: Vec<(u64, u64)> = bounds.windows(2).map(|w| (w[0], w[1])).collect();
    let partials: Result<Vec<i128>, Error> = chunks
        .par_iter()
        .map(|&(lo, hi)| chunk_square_sum(&sc, lo, hi, params.tau_segment_len))
        .collect();
    let partials = partials?;

    // exact prefix at each chunk boundary
    let mut prefix_at = std::collections::BTreeMap::new();
    prefix_at.insert(0u64, 0i128);
    let mut acc = 0i128;
    for ((_, hi), p) in chunks.iter().zip(&partials) {
        acc = acc.checked_add(*p).ok_or(Error::ExactOverflow)?;
        prefix_at.insert(*hi, acc);
    }

    let q2 = (sc.q as f64) * (sc.q as f64);
    let mut out = Vec::with_capacity(params.grid.len());
    for &gx in &params.grid {
        let m = gx as u64;
        let prefix = *prefix_at.get(&m).expect("grid floors are chunk bounds");
        let (sr, si) = scaled_partial_sum(&sc, m);
        let s2 = (sr * sr + si * si) as f64;
        let frac = gx - m as f64;
        out.push((prefix as f64 - (1.0 - frac) * s2) / q2);
    }
    Ok(out)
}

/// Values of a periodic multiplicative function on 1..=n_max as Gaussian
/// integers scaled by Q (the lcm of the table denominators per prime),
/// built with a smallest-prime-factor sieve.
fn scaled_values(f: &PeriodicMF, n_max: usize) -> Result<(Vec<(i64, i64)>, i64), Error> {
    // per-prime scaled tables (num_re, num_im, den) for exponents 1..
    let mut ptables: std::collections::BTreeMap<u64, Vec<(i64, i64, i64)>> =
        std::collections::BTreeMap::new();
    let mut q = BigInt::one();
    let e_cap = 64 - (n_max as u64).leading_zeros();
    for &(p, _) in crate::arith::factorize(f.period())?.pairs() {
        let mut col = Vec::new();
        let mut den_lcm = BigInt::one();
        for e in 1..=e_cap {
            let v = f.base().eval_prime_power(p, e);
            den_lcm = den_lcm.lcm(v.re.denom()).lcm(v.im.denom());
            col.push(v);
        }
        let den = den_lcm.to_i64().ok_or(Error::ExactOverflow)?;
        let scaled: Result<Vec<(i64, i64, i64)>, Error> = col
            .iter()
            .map(|v| {
                let re = (&v.re * &den_lcm).to_integer().to_i64().ok_or(Error::ExactOverflow)?;
                let im = (&v.im * &den_lcm).to_integer().to_i64().ok_or(Error::ExactOverflow)?;
                Ok((re, im, den))
            })
            .collect();
        ptables.insert(p, scaled?);
        q = q.lcm(&den_lcm);
    }
    let qi = q.to_i64().ok_or(Error::ExactOverflow)?;

    let mut spf = vec![0u32; n_max + 1];
    for i in 2..=n_max {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n_max {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    let mut vals = vec![(0i64, 0i64); n_max + 1];
    if n_max >= 1 {
        vals[1] = (qi, 0);
    }
    for n in 2..=n_max {
        let p = spf[n] as usize;
        let mut m = n;
        let mut e = 0u32;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        let (mr, mi) = vals[m];
        vals[n] = match ptables.get(&(p as u64)) {
            None => (mr, mi), // value 1 off the period
            Some(col) => {
                let (pr, pi, den) = col[(e - 1) as usize];
                // (mr + i mi)(pr + i pi) / den, exact by construction
                let re = (mr as i128 * pr as i128 - mi as i128 * pi as i128) / den as i128;
                let im = (mr as i128 * pi as i128 + mi as i128 * pr as i128) / den as i128;
                (
                    re.to_i64().ok_or(Error::ExactOverflow)?,
                    im.to_i64().ok_or(Error::ExactOverflow)?,
                )
            }
        };
    }
    Ok((vals, qi))
}

/// Max |lhs - rhs| over the samples, where lhs is the directly convolved
/// partial sum (no g involved) and rhs = sum_d g(d) delta(x/d) with terms
/// below argument 1 counted as zero. Deviations above 1e-4 are an error
/// naming the worst sample.
pub(super) fn identity_check(
    f1: &PeriodicMF,
    f2: &PeriodicMF,
    samples: &[f64],
) -> Result<f64, Error> {
    assert!(!samples.is_empty(), "need at least one sample");
    let n_max = samples.iter().fold(1.0f64, |a, &b| a.max(b)) as usize;
    let (v1, q1) = scaled_values(f1, n_max)?;
    let (v2, q2) = scaled_values(f2, n_max)?;

    // direct convolution by the d-loop; i128 against overflow
    let mut conv = vec![(0i128, 0i128); n_max + 1];
    for d in 1..=n_max {
        let (ar, ai) = v1[d];
        if ar == 0 && ai == 0 {
            continue;
        }
        for m in 1..=n_max / d {
            let (br, bi) = v2[m];
            let c = &mut conv[d * m];
            c.0 += ar as i128 * br as i128 - ai as i128 * bi as i128;
            c.1 += ar as i128 * bi as i128 + ai as i128 * br as i128;
        }
    }

    let g = g_coefficients(f1, f2)?;
    let gv: Vec<(u64, f64, f64)> = g
        .coeffs()
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(&d, v)| (d, v.re_f64(), v.im_f64()))
        .collect();

    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&i, &j| samples[i].partial_cmp(&samples[j]).unwrap());

    let q12 = q1 as f64 * q2 as f64;
    let mut acc = (0i128, 0i128);
    let mut n = 0usize;
    let mut worst = 0.0f64;
    let mut worst_x = 0.0f64;
    for &i in &order {
        let x = samples[i];
        while n < x as usize {
            n += 1;
            acc.0 += conv[n].0;
            acc.1 += conv[n].1;
        }
        let lhs_re = acc.0 as f64 / q12;
        let lhs_im = acc.1 as f64 / q12;
        let mut rhs_re = 0.0;
        let mut rhs_im = 0.0;
        for &(d, gr, gi) in &gv {
            let dl = delta_or_zero(x / d as f64);
            rhs_re += gr * dl;
            rhs_im += gi * dl;
        }
        let dev = ((lhs_re - rhs_re).powi(2) + (lhs_im - rhs_im).powi(2)).sqrt();
        if dev > worst {
            worst = dev;
            worst_x = x;
        }
    }
    if worst > 1e-4 {
        return Err(Error::IdentityCheckFailed { x: worst_x, dev: worst });
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ExactScalar;

    fn brute_square_integral(f1: &PeriodicMF, f2: &PeriodicMF, x: f64) -> f64 {
        // direct rational S(n), unit-interval accumulation
        let m = x as u64;
        let conv_at = |n: u64| {
            let mut acc = ExactScalar::zero();
            for d in crate::arith::divisors(n).unwrap() {
                acc += &(&f1.eval(d).unwrap() * &f2.eval(n / d).unwrap());
            }
            acc
        };
        let mut s = ExactScalar::zero();
        let mut total = 0.0;
        for n in 1..=m {
            s += &conv_at(n);
            let sq = s.norm_sq();
            let w = if n < m { 1.0 } else { x - m as f64 };
            total += w * num::ToPrimitive::to_f64(&sq).unwrap();
        }
        total
    }

    #[test]
    fn step_square_matches_brute_force() {
        let parity = PeriodicMF::parity();
        let f3 = PeriodicMF::three_periodic();
        for (f1, f2) in [(&parity, &parity), (&parity, &f3), (&f3, &f3)] {
            let g = g_coefficients(f1, f2).unwrap();
            for x in [1.0f64, 2.0, 17.5, 64.25, 200.0] {
                let params = MomentParams::new(vec![x]).unwrap();
                let got = step_square_integral(&g, &params).unwrap()[0];
                let brute = brute_square_integral(f1, f2, x);
                assert!(
                    (got - brute).abs() <= 1e-9 * brute.abs().max(1.0),
                    "x={x}: {got} vs {brute}"
                );
            }
        }
    }

    #[test]
    fn integral_at_one_is_zero() {
        let g = g_coefficients(&PeriodicMF::parity(), &PeriodicMF::parity()).unwrap();
        let params = MomentParams::new(vec![1.0]).unwrap();
        assert_eq!(step_square_integral(&g, &params).unwrap()[0], 0.0);
    }

    #[test]
    fn unnormalized_integral_is_monotone() {
        let g = g_coefficients(&PeriodicMF::parity(), &PeriodicMF::three_periodic()).unwrap();
        let grid: Vec<f64> = (1..=20).map(|k| (k * 50) as f64).collect();
        let params = MomentParams::new(grid).unwrap();
        let vals = step_square_integral(&g, &params).unwrap();
        for w in vals.windows(2) {
            assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn seeded_partial_sum_matches_direct_prefix() {
        let parity = PeriodicMF::parity();
        let f3 = PeriodicMF::three_periodic();
        let g = g_coefficients(&parity, &f3).unwrap();
        let sc = scale_coefficients(&g).unwrap();
        let (v1, q1) = scaled_values(&parity, 400).unwrap();
        let (v2, q2) = scaled_values(&f3, 400).unwrap();
        // direct convolution prefix, rescaled to sc.q
        assert_eq!(q1 * q2 % sc.q, 0);
        let rescale = (q1 * q2 / sc.q) as i128;
        let mut conv = vec![(0i128, 0i128); 401];
        for d in 1..=400usize {
            for m in 1..=400 / d {
                let (ar, ai) = v1[d];
                let (br, bi) = v2[m];
                conv[d * m].0 += ar as i128 * br as i128 - ai as i128 * bi as i128;
                conv[d * m].1 += ar as i128 * bi as i128 + ai as i128 * br as i128;
            }
        }
        let mut acc = (0i128, 0i128);
        for n in 1..=400u64 {
            acc.0 += conv[n as usize].0;
            acc.1 += conv[n as usize].1;
            let (sr, si) = scaled_partial_sum(&sc, n);
            assert_eq!((sr * rescale, si * rescale), acc, "n={n}");
        }
    }

    #[test]
    fn scaled_value_sieve_matches_eval() {
        let f3 = PeriodicMF::three_periodic();
        let (vals, q) = scaled_values(&f3, 300).unwrap();
        for n in 1..=300u64 {
            let direct = f3.eval(n).unwrap();
            let got_re = num::BigRational::new(vals[n as usize].0.into(), q.into());
            assert_eq!(got_re, direct.re, "n={n}");
            assert_eq!(vals[n as usize].1, 0);
        }
    }

    #[test]
    fn identity_check_parity_example() {
        // x = 100: partial sum vs delta(100) - 4 delta(50) + 4 delta(25)
        let parity = PeriodicMF::parity();
        let dev = identity_check(&parity, &parity, &[100.0]).unwrap();
        assert!(dev <= 1e-9, "dev = {dev}");
    }

    #[test]
    fn identity_check_at_exact_modulus_product() {
        let parity = PeriodicMF::parity();
        let f3 = PeriodicMF::three_periodic();
        for (f1, f2) in [(&parity, &parity), (&parity, &f3), (&f3, &f3)] {
            let m = (f1.period() * f2.period()) as f64;
            let dev = identity_check(f1, f2, &[m]).unwrap();
            assert!(dev <= 1e-9, "dev = {dev}");
        }
    }
}
