//! The divisor summatory function D(x), its error term
//! `delta(x) = D(floor(x)) - x ln x - (2 gamma - 1) x`, a segmented tau
//! sieve for streaming consumers, and the truncated oscillating-series
//! approximation of the error term.

use crate::arith::isqrt;
use crate::Error;

/// Euler-Mascheroni constant, fixed to 16 significant digits.
pub const EULER_MASCHERONI: f64 = 0.5772156649015329;

/// The linear coefficient 2*gamma - 1 in the divisor asymptotic.
pub const TWO_GAMMA_MINUS_ONE: f64 = 2.0 * EULER_MASCHERONI - 1.0;

/// Hard cap on sieve ranges; tau values below this bound fit in u16.
pub const TAU_RANGE_CAP: u64 = 1_000_000_000;

/// Default memory budget for one segment, in entries (u16 each).
pub const DEFAULT_SEGMENT_BUDGET: u64 = 1 << 25;

/// A contiguous block of tau values starting at `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauSegment {
    base: u64,
    values: Vec<u16>,
}

impl TauSegment {
    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn values(&self) -> &[u16] {
        &self.values
    }

    pub fn get(&self, n: u64) -> Option<u64> {
        n.checked_sub(self.base)
            .and_then(|i| self.values.get(i as usize))
            .map(|&t| t as u64)
    }
}

/// Sieve tau(n) for n in [lo, hi]: every divisor d <= sqrt(hi) marks the
/// multiples d*k with k >= d, counting the pair (d, k) twice and the
/// perfect square d = k once.
pub fn tau_segment(lo: u64, hi: u64) -> Result<TauSegment, Error> {
    tau_segment_with_budget(lo, hi, DEFAULT_SEGMENT_BUDGET)
}

pub fn tau_segment_with_budget(lo: u64, hi: u64, budget: u64) -> Result<TauSegment, Error> {
    if lo < 1 || lo > hi || hi > TAU_RANGE_CAP {
        return Err(Error::SieveRange { lo, hi, cap: TAU_RANGE_CAP });
    }
    let len = hi - lo + 1;
    if len > budget {
        return Err(Error::SieveBudget { requested: len, budget });
    }
    let mut values = vec![0u16; len as usize];
    let r = isqrt(hi);
    for d in 1..=r {
        // smallest k with d*k >= lo and k >= d
        let k0 = (lo.div_ceil(d)).max(d);
        let mut n = d * k0;
        let mut k = k0;
        while n <= hi {
            values[(n - lo) as usize] += if k == d { 1 } else { 2 };
            n += d;
            k += 1;
        }
    }
    Ok(TauSegment { base: lo, values })
}

/// Sequential tau values from `start` upward, sieved one segment at a time.
pub struct TauStream {
    next: u64,
    seg: TauSegment,
    seg_len: u64,
}

impl TauStream {
    pub fn new(start: u64, seg_len: u64) -> Result<Self, Error> {
        let seg_len = seg_len.max(1);
        let seg = tau_segment(start.max(1), (start.max(1) + seg_len - 1).min(TAU_RANGE_CAP))?;
        Ok(Self { next: start.max(1), seg, seg_len })
    }

    /// tau(self.position()), advancing by one.
    pub fn next_tau(&mut self) -> Result<u64, Error> {
        if self.seg.get(self.next).is_none() {
            let lo = self.next;
            let hi = (lo + self.seg_len - 1).min(TAU_RANGE_CAP);
            self.seg = tau_segment(lo, hi)?;
        }
        let t = self.seg.get(self.next).expect("segment covers position");
        self.next += 1;
        Ok(t)
    }

    pub fn position(&self) -> u64 {
        self.next
    }
}

/// Exact D(x) = sum_{n <= x} tau(n) via the hyperbola identity
/// `2 sum_{n <= sqrt(x)} floor(x/n) - floor(sqrt(x))^2`, O(sqrt(x)).
pub fn divisor_summatory(x: u64) -> u64 {
    if x == 0 {
        return 0;
    }
    let r = isqrt(x);
    let mut s = 0u64;
    for n in 1..=r {
        s += x / n;
    }
    2 * s - r * r
}

/// The divisor error term. Rejects x < 1.
pub fn delta(x: f64) -> Result<f64, Error> {
    if !(x >= 1.0) {
        return Err(Error::DeltaDomain(x));
    }
    Ok(delta_unchecked(x))
}

fn delta_unchecked(x: f64) -> f64 {
    let d = divisor_summatory(x as u64) as f64;
    d - x * x.ln() - TWO_GAMMA_MINUS_ONE * x
}

/// The error term extended by 0 below 1 (the convention used when a scaled
/// argument x/n drops under the summation threshold).
pub fn delta_or_zero(x: f64) -> f64 {
    if x < 1.0 {
        0.0
    } else {
        delta_unchecked(x)
    }
}

/// Evaluation context holding a cached tau prefix so that repeated
/// error-term evaluations over a window cost O(1) each.
pub struct DeltaContext {
    base_sum: u64,
    seg: Option<(u64, Vec<u64>)>, // (lo, cumulative D(lo), D(lo+1), ...)
}

impl DeltaContext {
    pub fn new() -> Self {
        Self { base_sum: 0, seg: None }
    }

    /// Cache D(n) for all n in [lo, hi].
    pub fn with_cache(lo: u64, hi: u64) -> Result<Self, Error> {
        let seg = tau_segment(lo, hi)?;
        let mut cum = Vec::with_capacity(seg.values().len());
        let mut d = divisor_summatory(lo - 1);
        for &t in seg.values() {
            d += t as u64;
            cum.push(d);
        }
        Ok(Self { base_sum: 0, seg: Some((lo, cum)) })
    }

    pub fn divisor_summatory(&self, x: u64) -> u64 {
        if let Some((lo, cum)) = &self.seg {
            if x >= *lo && x < lo + cum.len() as u64 {
                return self.base_sum + cum[(x - lo) as usize];
            }
        }
        divisor_summatory(x)
    }

    pub fn delta(&self, x: f64) -> Result<f64, Error> {
        if !(x >= 1.0) {
            return Err(Error::DeltaDomain(x));
        }
        let d = self.divisor_summatory(x as u64) as f64;
        Ok(d - x * x.ln() - TWO_GAMMA_MINUS_ONE * x)
    }
}

impl Default for DeltaContext {
    fn default() -> Self {
        Self::new()
    }
}

/// Truncated oscillating-series approximation of the error term:
/// `x^{1/4}/(pi sqrt 2) * sum_{n <= N} tau(n) n^{-3/4} cos(4 pi sqrt(n x) - pi/4)`.
///
/// The omitted remainder is O(x^eps + x^{1/2+eps}/sqrt(N)); only empirical
/// remainders are reported here.
pub fn voronoi_delta(x: f64, n_terms: u64) -> Result<f64, Error> {
    if n_terms == 0 {
        return Ok(0.0);
    }
    let ctx = VoronoiContext::new(n_terms)?;
    Ok(ctx.eval(x))
}

/// Reusable tau table for evaluating the truncated series at many points.
pub struct VoronoiContext {
    tau: TauSegment,
}

impl VoronoiContext {
    pub fn new(n_terms: u64) -> Result<Self, Error> {
        Ok(Self { tau: tau_segment(1, n_terms.max(1))? })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let four_pi = 4.0 * std::f64::consts::PI;
        let quarter_pi = std::f64::consts::FRAC_PI_4;
        let mut s = 0.0f64;
        for (i, &t) in self.tau.values().iter().enumerate() {
            let n = (i + 1) as f64;
            s += t as f64 * n.powf(-0.75) * (four_pi * (n * x).sqrt() - quarter_pi).cos();
        }
        x.powf(0.25) / (std::f64::consts::PI * std::f64::consts::SQRT_2) * s
    }
}
