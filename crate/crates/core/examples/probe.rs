//! Quick numeric probe: prints normalized correlation and second-moment
//! values against their limits, with timings.

use divcorr_core::moment::{
    correlation_integral, second_moment_integral, theta_correlation, MomentParams, ThetaKind,
};
use divcorr_core::PeriodicMF;

fn main() {
    let t0 = std::time::Instant::now();
    let params = MomentParams::new(vec![1e4, 1e5, 1e6, 1e7]).unwrap();

    let s = correlation_integral(1, 1, &params).unwrap();
    println!(
        "(1,1): values {:?} limit {:.6} rels {:?} [{:.2}s]",
        s.normalized,
        s.limit.unwrap(),
        s.relative_error.as_ref().unwrap(),
        s.elapsed_seconds
    );

    for (a, b) in [(1u64, 2u64), (2, 3), (1, 4), (2, 4)] {
        let s = correlation_integral(a, b, &params).unwrap();
        println!(
            "({a},{b}): value(1e7) {:.6} limit {:.6} rel {:.4} [{:.2}s]",
            s.final_value(),
            s.limit.unwrap(),
            s.relative_error.as_ref().unwrap().last().unwrap(),
            s.elapsed_seconds
        );
    }

    let theta = (1.0 + 5f64.sqrt()) / 2.0;
    let s = theta_correlation(ThetaKind::Irrational(theta), &params).unwrap();
    println!(
        "theta=golden: values {:?} [{:.2}s]",
        s.normalized, s.elapsed_seconds
    );

    let parity = PeriodicMF::parity();
    let s = second_moment_integral(&parity, &parity, &params).unwrap();
    println!(
        "second moment parity: values {:?} limit {:.6} rels {:?} [{:.2}s]",
        s.normalized,
        s.limit.unwrap(),
        s.relative_error.as_ref().unwrap(),
        s.elapsed_seconds
    );

    println!("total: {:.2}s", t0.elapsed().as_secs_f64());
}
