//! Piecewise closed-form integration of `delta(s1 x) delta(s2 x)` between
//! the jump points of the two scaled floor functions.
//!
//! On an interval with no jumps, each factor is `D - u ln u - cu` with
//! constant D and u = s x, i.e. `P - delta_incr(t)` in local coordinates
//! x = x1 + t, where the increment
//! `delta_incr(t) = s (K t + (x1 + t) ln(1 + t/x1))`, K = ln(s x1) + c,
//! stays small over the interval. The product then needs only
//! `int t dt`, `int (x1+t) L dt`, `int t (x1+t) L dt`, `int (x1+t)^2 L^2 dt`
//! with L = ln(1 + t/x1), all in closed form. Working in the local frame
//! avoids the catastrophic cancellation of evaluating x^3 (ln x)^2
//! antiderivatives at large absolute x.

use rayon::prelude::*;

use crate::delta::{divisor_summatory, TauStream, TWO_GAMMA_MINUS_ONE};
use crate::Error;

use super::MomentParams;

/// The scaled argument u = s * x of one error-term factor, with the exact
/// positions of its jump points.
#[derive(Debug, Clone, Copy)]
pub enum Scale {
    /// u = x / a; jumps at the exact integer multiples of a.
    IntReciprocal(u64),
    /// u = theta x; jumps at m / theta, one division each.
    Theta(f64),
}

impl Scale {
    pub fn int_reciprocal(a: u64) -> Self {
        Scale::IntReciprocal(a)
    }

    pub fn theta(t: f64) -> Self {
        Scale::Theta(t)
    }

    /// The multiplier s with u = s * x.
    fn factor(self) -> f64 {
        match self {
            Scale::IntReciprocal(a) => 1.0 / a as f64,
            Scale::Theta(t) => t,
        }
    }

    /// Position of the m-th jump (where floor(u) reaches m).
    fn jump(self, m: u64) -> f64 {
        match self {
            Scale::IntReciprocal(a) => (m * a) as f64,
            Scale::Theta(t) => m as f64 / t,
        }
    }

    /// Largest m with jump(m) <= x under the same float comparisons the
    /// streaming loop uses, so chunk seeding agrees with streaming exactly.
    fn index_at(self, x: f64) -> u64 {
        let mut m = match self {
            Scale::IntReciprocal(a) => (x / a as f64).floor() as u64,
            Scale::Theta(t) => (t * x).floor().max(0.0) as u64,
        };
        while self.jump(m + 1) <= x {
            m += 1;
        }
        while m > 0 && self.jump(m) > x {
            m -= 1;
        }
        m
    }
}

/// Chunk boundaries: every grid point plus all multiples of the span in
/// between. A pure function of (grid, span) so that the arithmetic is
/// identical no matter how many threads execute the plan.
fn chunk_boundaries(grid: &[f64], span: f64) -> Vec<f64> {
    let span = span.max(16.0);
    let mut bounds = vec![1.0f64];
    let mut prev = 1.0f64;
    for &g in grid {
        let mut c = (prev / span).floor() * span + span;
        while c < g {
            if c > prev {
                bounds.push(c);
            }
            c += span;
        }
        if g > prev {
            bounds.push(g);
        }
        prev = g;
    }
    bounds
}

/// Integrate `delta(s1 x) delta(s2 x)` over [1, X]; returns the running
/// integral at each grid point. Factors with u < 1 count as zero.
pub fn integrate_pair(s1: Scale, s2: Scale, params: &MomentParams) -> Result<Vec<f64>, Error> {
    let bounds = chunk_boundaries(&params.grid, params.chunk_span);
    let chunks: Vec<(f64, f64)> = bounds.windows(2).map(|w| (w[0], w[1])).collect();

    let done = std::sync::atomic::AtomicUsize::new(0);
    let partials: Result<Vec<f64>, Error> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let v = integrate_chunk(s1, s2, lo, hi, params.tau_segment_len);
            if params.progress {
                let d = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
                let n = chunks.len();
                if d % (n / 20).max(1) == 0 || d == n {
                    eprint!("\r  integrating: {:3}%", 100 * d / n);
                    if d == n {
                        eprintln!();
                    }
                }
            }
            v
        })
        .collect();
    let partials = partials?;

    // ordered compensated reduction; emit at grid boundaries
    let mut values = Vec::with_capacity(params.grid.len());
    let mut grid_iter = params.grid.iter().peekable();
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    // a grid point of exactly 1.0 precedes all chunks
    while grid_iter.peek().is_some_and(|&&g| g <= 1.0) {
        values.push(0.0);
        grid_iter.next();
    }
    for ((_, hi), p) in chunks.iter().zip(&partials) {
        kahan(&mut sum, &mut comp, *p);
        if grid_iter.peek().is_some_and(|&&g| g == *hi) {
            values.push(sum + comp);
            grid_iter.next();
        }
    }
    debug_assert_eq!(values.len(), params.grid.len());
    Ok(values)
}

fn kahan(sum: &mut f64, comp: &mut f64, v: f64) {
    let y = v - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}

fn integrate_chunk(
    s1: Scale,
    s2: Scale,
    lo: f64,
    hi: f64,
    tau_seg_len: u64,
) -> Result<f64, Error> {
    let mut m1 = s1.index_at(lo);
    let mut m2 = s2.index_at(lo);
    let mut d1 = divisor_summatory(m1) as f64;
    let mut d2 = divisor_summatory(m2) as f64;
    let mut tau1 = TauStream::new(m1 + 1, tau_seg_len)?;
    let mut tau2 = TauStream::new(m2 + 1, tau_seg_len)?;
    let f1 = s1.factor();
    let f2 = s2.factor();

    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut x1 = lo;
    loop {
        let n1 = s1.jump(m1 + 1);
        let n2 = s2.jump(m2 + 1);
        let x2 = n1.min(n2).min(hi);
        if x2 > x1 && m1 >= 1 && m2 >= 1 {
            kahan(&mut sum, &mut comp, interval_product(d1, f1, d2, f2, x1, x2));
        }
        if x2 >= hi {
            break;
        }
        if n1 <= x2 {
            m1 += 1;
            d1 += tau1.next_tau()? as f64;
        }
        if n2 <= x2 {
            m2 += 1;
            d2 += tau2.next_tau()? as f64;
        }
        x1 = x2;
    }
    Ok(sum + comp)
}

/// Closed-form integral of
/// `(D1 - u1 ln u1 - c u1)(D2 - u2 ln u2 - c u2)` over [x1, x2],
/// u_i = f_i * x, in the local frame.
#[inline]
fn interval_product(d1: f64, f1: f64, d2: f64, f2: f64, x1: f64, x2: f64) -> f64 {
    let c = TWO_GAMMA_MINUS_ONE;
    let w = x2 - x1;
    let u1 = f1 * x1;
    let u2 = f2 * x1;
    // value of each factor at the left end
    let p1 = d1 - u1 * (u1.ln() + c);
    let p2 = d2 - u2 * (u2.ln() + c);
    let k1 = u1.ln() + c;
    let k2 = u2.ln() + c;

    // primitives of the local logarithm lam(y) = ln(y / x1) over [x1, x2]
    let lam = (w / x1).ln_1p();
    let d2_ = w * (x1 + x2); // x2^2 - x1^2
    let d3_ = w * (x1 * x1 + x1 * x2 + x2 * x2); // x2^3 - x1^3
    let a1 = 0.5 * x2 * x2 * lam - 0.25 * d2_; // int y lam dy
    let a2 = x2 * x2 * x2 * lam / 3.0 - d3_ / 9.0; // int y^2 lam dy
    let a3 = x2 * x2 * x2 * lam * lam / 3.0 - 2.0 / 3.0 * a2; // int y^2 lam^2 dy
    let g1 = a2 - x1 * a1; // int t (x1 + t) lam dt

    // int of each increment and of their product
    let s1 = f1 * (k1 * 0.5 * w * w + a1);
    let s2 = f2 * (k2 * 0.5 * w * w + a1);
    let s12 = f1 * f2 * (k1 * k2 * w * w * w / 3.0 + (k1 + k2) * g1 + a3);

    p1 * p2 * w - (p1 * s2 + p2 * s1) + s12
}

/// Independent quadrature oracle: 5-point Gauss-Legendre on every
/// jump-free interval. Test-grade accuracy for modest X; used to verify
/// the closed-form path.
pub fn correlation_oracle_quadrature(s1f: f64, s2f: f64, breaks: &[f64]) -> f64 {
    // 5-point Gauss-Legendre nodes/weights on [-1, 1]
    const NODES: [f64; 5] = [
        -0.906179845938664,
        -0.5384693101056831,
        0.0,
        0.5384693101056831,
        0.906179845938664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.23692688505618908,
        0.47862867049936647,
        0.5688888888888889,
        0.47862867049936647,
        0.23692688505618908,
    ];
    let delta_at = |x: f64, s: f64| crate::delta::delta_or_zero(s * x);
    let mut total = 0.0;
    for win in breaks.windows(2) {
        let (a, b) = (win[0], win[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (n, w) in NODES.iter().zip(WEIGHTS) {
            let x = mid + half * n;
            acc += w * delta_at(x, s1f) * delta_at(x, s2f);
        }
        total += acc * half;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn merged_breaks(s1: Scale, s2: Scale, x_max: f64) -> Vec<f64> {
        let mut b = vec![1.0];
        for s in [s1, s2] {
            let mut m = 1u64;
            loop {
                let x = s.jump(m);
                if x > x_max {
                    break;
                }
                if x > 1.0 {
                    b.push(x);
                }
                m += 1;
            }
        }
        b.push(x_max);
        b.sort_by(|a, b| a.partial_cmp(b).unwrap());
        b.dedup();
        b
    }

    #[test]
    fn closed_form_matches_quadrature_oracle_integer_scales() {
        for (a, b, x) in [(1u64, 1u64, 200.0f64), (1, 2, 300.0), (2, 3, 500.0)] {
            let params = MomentParams::new(vec![x]).unwrap();
            let got = integrate_pair(
                Scale::int_reciprocal(a),
                Scale::int_reciprocal(b),
                &params,
            )
            .unwrap()[0];
            let breaks = merged_breaks(
                Scale::int_reciprocal(a),
                Scale::int_reciprocal(b),
                x,
            );
            let oracle =
                correlation_oracle_quadrature(1.0 / a as f64, 1.0 / b as f64, &breaks);
            assert_relative_eq!(got, oracle, max_relative = 1e-9);
        }
    }

    #[test]
    fn closed_form_matches_quadrature_oracle_theta() {
        let theta = (1.0 + 5f64.sqrt()) / 2.0;
        let x = 150.0;
        let params = MomentParams::new(vec![x]).unwrap();
        let got =
            integrate_pair(Scale::int_reciprocal(1), Scale::theta(theta), &params).unwrap()[0];
        let breaks = merged_breaks(Scale::int_reciprocal(1), Scale::theta(theta), x);
        let oracle = correlation_oracle_quadrature(1.0, theta, &breaks);
        assert_relative_eq!(got, oracle, max_relative = 1e-9);
    }

    #[test]
    fn chunking_invariance() {
        // one chunk vs many small chunks: relative 1e-9 contract
        let grid = vec![5_000.0f64, 20_000.0];
        let one = MomentParams {
            grid: grid.clone(),
            chunk_span: 1e18,
            tau_segment_len: 1 << 14,
            progress: false,
        };
        let many = MomentParams {
            grid,
            chunk_span: 777.0,
            tau_segment_len: 1 << 10,
            progress: false,
        };
        for (a, b) in [(1u64, 1u64), (1, 2)] {
            let v1 =
                integrate_pair(Scale::int_reciprocal(a), Scale::int_reciprocal(b), &one).unwrap();
            let v2 =
                integrate_pair(Scale::int_reciprocal(a), Scale::int_reciprocal(b), &many).unwrap();
            for (x, y) in v1.iter().zip(&v2) {
                assert_relative_eq!(x, y, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn scale_order_is_bit_exact_symmetric() {
        let params = MomentParams::new(vec![1_000.0, 30_000.0]).unwrap();
        let ab =
            integrate_pair(Scale::int_reciprocal(2), Scale::int_reciprocal(3), &params).unwrap();
        let ba =
            integrate_pair(Scale::int_reciprocal(3), Scale::int_reciprocal(2), &params).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn index_at_agrees_with_jumps() {
        let theta = (1.0 + 5f64.sqrt()) / 2.0;
        for s in [Scale::int_reciprocal(3), Scale::theta(theta)] {
            for m in 1..200u64 {
                let x = s.jump(m);
                assert_eq!(s.index_at(x), m, "at the jump itself");
                let before = f64::from_bits(x.to_bits() - 1);
                assert_eq!(s.index_at(before), m - 1, "just before the jump");
            }
        }
    }

    #[test]
    fn substitution_identity_for_doubled_scales() {
        // normalized (2,2) at X equals normalized (1,1) at X/2 over sqrt 2
        let x = 40_000.0f64;
        let p22 = MomentParams::new(vec![x]).unwrap();
        let p11 = MomentParams::new(vec![x / 2.0]).unwrap();
        let v22 = integrate_pair(Scale::int_reciprocal(2), Scale::int_reciprocal(2), &p22)
            .unwrap()[0]
            / x.powf(1.5);
        let v11 = integrate_pair(Scale::int_reciprocal(1), Scale::int_reciprocal(1), &p11)
            .unwrap()[0]
            / (x / 2.0).powf(1.5);
        assert_relative_eq!(v22, v11 / 2f64.sqrt(), max_relative = 1e-9);
    }
}
