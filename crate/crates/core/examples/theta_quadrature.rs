//! Independent check of the theta correlation at large X: streaming
//! 5-point Gauss-Legendre over every jump-free interval, evaluating the
//! error terms directly. Shares no rounding structure with the closed-form
//! local-frame path.

use divcorr_core::delta::{divisor_summatory, TauStream, TWO_GAMMA_MINUS_ONE};

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

fn main() {
    let theta = (1.0 + 5f64.sqrt()) / 2.0;
    let c = TWO_GAMMA_MINUS_ONE;
    for x_max in [1e5f64, 1e7] {
        let mut m1 = 1u64;
        let mut m2 = theta as u64; // floor(theta * 1)
        let mut d1 = divisor_summatory(m1) as f64;
        let mut d2 = divisor_summatory(m2) as f64;
        let mut t1 = TauStream::new(m1 + 1, 1 << 20).unwrap();
        let mut t2 = TauStream::new(m2 + 1, 1 << 20).unwrap();
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        let mut x1 = 1.0f64;
        loop {
            let n1 = (m1 + 1) as f64;
            let n2 = (m2 + 1) as f64 / theta;
            let x2 = n1.min(n2).min(x_max);
            if x2 > x1 {
                let mid = 0.5 * (x1 + x2);
                let half = 0.5 * (x2 - x1);
                let mut acc = 0.0;
                for (n, w) in NODES.iter().zip(WEIGHTS) {
                    let x = mid + half * n;
                    let u = theta * x;
                    let da = d1 - x * (x.ln() + c);
                    let db = d2 - u * (u.ln() + c);
                    acc += w * da * db;
                }
                let v = acc * half;
                let y = v - comp;
                let t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
            if x2 >= x_max {
                break;
            }
            if n1 <= x2 {
                m1 += 1;
                d1 += t1.next_tau().unwrap() as f64;
            }
            if n2 <= x2 {
                m2 += 1;
                d2 += t2.next_tau().unwrap() as f64;
            }
            x1 = x2;
        }
        println!("X={x_max:e}: GL5 normalized = {:e}", (sum + comp) / x_max.powf(1.5));
    }
}
