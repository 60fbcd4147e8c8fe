//! Exact piecewise integration of correlation and second-moment integrals
//! over [1, X].
//!
//! Between consecutive jump points of the scaled floor functions the
//! integrands are products of `D - u ln u - (2 gamma - 1) u` factors with
//! constant D, so every interval integrates in closed form via
//! antiderivatives of x^i (ln x)^j with i, j <= 2; no quadrature is used.
//! The range is always split into a fixed chunk plan (a function of the
//! grid and chunk span only), chunks are integrated independently and
//! reduced in fixed order, so single-threaded and multi-threaded runs are
//! bit-identical.

mod engine;
mod exact;

use serde::Serialize;

use crate::special::{correlation_limit, second_moment_limit};
use crate::Error;

pub use engine::correlation_oracle_quadrature;

/// Cap on integration ranges (the tau sieve bound).
pub const RANGE_CAP: f64 = crate::delta::TAU_RANGE_CAP as f64;

/// Parameters shared by the integral drivers.
#[derive(Debug, Clone)]
pub struct MomentParams {
    /// Strictly increasing evaluation points in [1, RANGE_CAP]; the last
    /// one is the integration endpoint X.
    pub grid: Vec<f64>,
    /// Maximum chunk width in x; the chunk plan splits at multiples of
    /// this span plus all grid points, independent of the thread count.
    pub chunk_span: f64,
    /// Segment length of the streaming tau sieves.
    pub tau_segment_len: u64,
    /// Coarse progress reporting on stderr.
    pub progress: bool,
}

impl MomentParams {
    pub fn new(grid: Vec<f64>) -> Result<Self, Error> {
        let p = Self {
            grid,
            chunk_span: 524_288.0,
            tau_segment_len: 1 << 20,
            progress: false,
        };
        p.validate(1.0)?;
        Ok(p)
    }

    /// Log-spaced grid from lo to hi with `per_decade` points per decade.
    pub fn log_grid(lo: f64, hi: f64, per_decade: u32) -> Result<Vec<f64>, Error> {
        if !(lo >= 1.0 && hi >= lo && per_decade >= 1) {
            return Err(Error::BadGrid {
                cap: RANGE_CAP,
                msg: format!("log:{lo}:{hi}:{per_decade}"),
            });
        }
        let mut grid = Vec::new();
        let e0 = lo.log10();
        let e1 = hi.log10();
        let mut j = 0u32;
        loop {
            let e = e0 + j as f64 / per_decade as f64;
            if e > e1 + 1e-12 {
                break;
            }
            grid.push(10f64.powf(e));
            j += 1;
        }
        if let Some(last) = grid.last_mut() {
            if (*last - hi).abs() < 1e-9 * hi {
                *last = hi;
            } else if *last < hi {
                grid.push(hi);
            }
        }
        Ok(grid)
    }

    fn validate(&self, max_scale: f64) -> Result<(), Error> {
        if self.grid.is_empty() {
            return Err(Error::BadGrid { cap: RANGE_CAP, msg: "empty grid".into() });
        }
        let mut prev = 1.0 - 1e-12;
        for &g in &self.grid {
            if !(g > prev && g.is_finite()) {
                return Err(Error::BadGrid {
                    cap: RANGE_CAP,
                    msg: format!("grid point {g} not strictly increasing or < 1"),
                });
            }
            prev = g;
        }
        let x = *self.grid.last().expect("non-empty");
        if x * max_scale > RANGE_CAP {
            return Err(Error::BadGrid {
                cap: RANGE_CAP,
                msg: format!("X = {x} exceeds the sieve cap at scale {max_scale}"),
            });
        }
        Ok(())
    }
}

/// Declared arithmetic nature of the scale factor in a mixed correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaKind {
    /// theta as represented by the given double; jump points are generated
    /// as m / theta with one division each.
    Irrational(f64),
    /// theta = p / q exactly; routed through the integer-scale engine.
    Rational { p: u64, q: u64 },
}

/// A grid of normalized integral values with the attached theoretical
/// limit, if one exists.
#[derive(Debug, Clone, Serialize)]
pub struct MomentSeries {
    pub a: u64,
    pub b: Option<u64>,
    pub theta: Option<f64>,
    pub grid: Vec<f64>,
    pub normalized: Vec<f64>,
    pub limit: Option<f64>,
    pub relative_error: Option<Vec<f64>>,
    #[serde(skip)]
    pub elapsed_seconds: f64,
}

impl MomentSeries {
    fn attach_errors(&mut self) {
        if let Some(limit) = self.limit {
            if limit != 0.0 {
                self.relative_error = Some(
                    self.normalized
                        .iter()
                        .map(|v| (v - limit).abs() / limit.abs())
                        .collect(),
                );
            }
        }
    }

    /// Final normalized value, at the last grid point.
    pub fn final_value(&self) -> f64 {
        *self.normalized.last().expect("non-empty grid")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("X,normalized,limit,relative_error\n");
        for (i, (&x, &v)) in self.grid.iter().zip(&self.normalized).enumerate() {
            let limit = self
                .limit
                .map(|l| l.to_string())
                .unwrap_or_default();
            let rel = self
                .relative_error
                .as_ref()
                .map(|r| r[i].to_string())
                .unwrap_or_default();
            out.push_str(&format!("{x},{v},{limit},{rel}\n"));
        }
        out
    }
}

/// Running normalized values of `int_1^X delta(x/a) delta(x/b) dx` at the
/// grid points, with the closed-form limit attached.
pub fn correlation_integral(a: u64, b: u64, params: &MomentParams) -> Result<MomentSeries, Error> {
    assert!(a >= 1 && b >= 1, "scales must be positive integers");
    params.validate(1.0)?;
    let t0 = std::time::Instant::now();
    let values = engine::integrate_pair(
        engine::Scale::int_reciprocal(a),
        engine::Scale::int_reciprocal(b),
        params,
    )?;
    let mut series = MomentSeries {
        a,
        b: Some(b),
        theta: None,
        grid: params.grid.clone(),
        normalized: normalize(&params.grid, &values),
        limit: Some(correlation_limit(a, b)?.value),
        relative_error: None,
        elapsed_seconds: t0.elapsed().as_secs_f64(),
    };
    series.attach_errors();
    Ok(series)
}

/// Running normalized values of `int_1^X delta(x) delta(theta x) dx`.
///
/// For declared-rational theta = p/q the integral is rewritten by the
/// substitution z = p x as `(1/p) int delta(z/p) delta(z/q) dz` and routed
/// through the integer-scale engine; the limit `sqrt(p) c_{p,q}` is
/// attached. For irrational theta the limit is zero and none is attached.
pub fn theta_correlation(kind: ThetaKind, params: &MomentParams) -> Result<MomentSeries, Error> {
    let t0 = std::time::Instant::now();
    match kind {
        ThetaKind::Irrational(theta) => {
            if !(theta > 0.0 && theta.is_finite()) {
                return Err(Error::ThetaDomain(theta));
            }
            params.validate(theta.max(1.0))?;
            let values = engine::integrate_pair(
                engine::Scale::int_reciprocal(1),
                engine::Scale::theta(theta),
                params,
            )?;
            Ok(MomentSeries {
                a: 1,
                b: None,
                theta: Some(theta),
                grid: params.grid.clone(),
                normalized: normalize(&params.grid, &values),
                limit: None,
                relative_error: None,
                elapsed_seconds: t0.elapsed().as_secs_f64(),
            })
        }
        ThetaKind::Rational { p, q } => {
            if p == 0 || q == 0 {
                return Err(Error::ThetaDomain(p as f64 / q as f64));
            }
            let g = crate::arith::gcd(p, q);
            let (p, q) = (p / g, q / g);
            let scaled = MomentParams {
                grid: params.grid.iter().map(|&x| x * p as f64).collect(),
                ..params.clone()
            };
            scaled.validate(1.0)?;
            let values = engine::integrate_pair(
                engine::Scale::int_reciprocal(p),
                engine::Scale::int_reciprocal(q),
                &scaled,
            )?;
            let sqrt_p = (p as f64).sqrt();
            let normalized: Vec<f64> = scaled
                .grid
                .iter()
                .zip(&values)
                .map(|(&z, &v)| sqrt_p * v / z.powf(1.5))
                .collect();
            let mut series = MomentSeries {
                a: 1,
                b: None,
                theta: Some(p as f64 / q as f64),
                grid: params.grid.clone(),
                normalized,
                limit: Some(sqrt_p * correlation_limit(p, q)?.value),
                relative_error: None,
                elapsed_seconds: t0.elapsed().as_secs_f64(),
            };
            series.attach_errors();
            Ok(series)
        }
    }
}

/// Exact-route second moment: `S(x) = sum_{n <= x} (f1*f2)(n)` is a step
/// function, so `int_1^X |S|^2` is an exact rational accumulated in scaled
/// integers and converted to double only at the grid points.
pub fn second_moment_integral(
    f1: &crate::mf::PeriodicMF,
    f2: &crate::mf::PeriodicMF,
    params: &MomentParams,
) -> Result<MomentSeries, Error> {
    params.validate(1.0)?;
    let t0 = std::time::Instant::now();
    let g = crate::convolve::g_coefficients(f1, f2)?;
    let values = exact::step_square_integral(&g, params)?;
    let mut series = MomentSeries {
        a: 1,
        b: None,
        theta: None,
        grid: params.grid.clone(),
        normalized: normalize(&params.grid, &values),
        limit: Some(second_moment_limit(f1, f2)?),
        relative_error: None,
        elapsed_seconds: t0.elapsed().as_secs_f64(),
    };
    series.attach_errors();
    Ok(series)
}

/// Second moment via the error-term decomposition
/// `sum_{d,e} g(d) conj(g(e)) int delta(x/d) delta(x/e) dx`, the float
/// cross-check of the exact route.
pub fn second_moment_via_decomposition(
    f1: &crate::mf::PeriodicMF,
    f2: &crate::mf::PeriodicMF,
    params: &MomentParams,
) -> Result<Vec<f64>, Error> {
    params.validate(1.0)?;
    let g = crate::convolve::g_coefficients(f1, f2)?;
    let entries: Vec<(u64, f64, f64)> = g
        .coeffs()
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(&n, v)| (n, v.re_f64(), v.im_f64()))
        .collect();
    let mut acc = vec![0.0f64; params.grid.len()];
    for &(d, dr, di) in &entries {
        for &(e, er, ei) in &entries {
            // Re(g(d) conj(g(e)))
            let w = dr * er + di * ei;
            if w == 0.0 {
                continue;
            }
            let vals = engine::integrate_pair(
                engine::Scale::int_reciprocal(d),
                engine::Scale::int_reciprocal(e),
                params,
            )?;
            for (a, v) in acc.iter_mut().zip(&vals) {
                *a += w * v;
            }
        }
    }
    Ok(params
        .grid
        .iter()
        .zip(&acc)
        .map(|(&x, &v)| v / x.powf(1.5))
        .collect())
}

/// Max deviation over the sample points between the directly accumulated
/// partial sums of f1 * f2 and the finite combination
/// `sum_{n | M1 M2} g(n) delta(x/n)` (terms with x/n < 1 count as zero).
pub fn identity_check(
    f1: &crate::mf::PeriodicMF,
    f2: &crate::mf::PeriodicMF,
    samples: &[f64],
) -> Result<f64, Error> {
    exact::identity_check(f1, f2, samples)
}

/// Least-squares slope of `log |value - limit|` against `log X`;
/// residuals below 1e-14 are excluded. Purely diagnostic.
pub fn convergence_report(series: &MomentSeries) -> Result<f64, Error> {
    if series.grid.len() < 4 {
        return Err(Error::DegenerateResiduals);
    }
    let limit = series.limit.unwrap_or(0.0);
    let pts: Vec<(f64, f64)> = series
        .grid
        .iter()
        .zip(&series.normalized)
        .filter_map(|(&x, &v)| {
            let r = (v - limit).abs();
            (r > 1e-14).then(|| (x.ln(), r.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return Err(Error::DegenerateResiduals);
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(Error::DegenerateResiduals);
    }
    Ok((n * sxy - sx * sy) / denom)
}

fn normalize(grid: &[f64], values: &[f64]) -> Vec<f64> {
    grid.iter()
        .zip(values)
        .map(|(&x, &v)| v / x.powf(1.5))
        .collect()
}
