//! Elementary multiplicative machinery: factorization, divisor counting,
//! the Möbius function, divisor enumeration.

use crate::Error;

/// Prime factorization as (prime, exponent) pairs with strictly increasing
/// primes and exponents >= 1. The empty list is the factorization of 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pairs: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.pairs
    }

    pub fn value(&self) -> u64 {
        self.pairs
            .iter()
            .fold(1u64, |acc, &(p, k)| acc * p.pow(k))
    }

    pub fn is_squarefree(&self) -> bool {
        self.pairs.iter().all(|&(_, k)| k == 1)
    }

    /// Number of divisors tau(n) = prod (k+1).
    pub fn tau(&self) -> u64 {
        self.pairs.iter().map(|&(_, k)| (k as u64) + 1).product()
    }

    /// Möbius value: 0 unless squarefree, else (-1)^omega.
    pub fn mu(&self) -> i64 {
        if !self.is_squarefree() {
            0
        } else if self.pairs.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// All divisors, sorted ascending. Enumerated from the factorization,
    /// never by trial division over [1, n].
    pub fn divisors(&self) -> Vec<u64> {
        let mut out = vec![1u64];
        for &(p, k) in &self.pairs {
            let prev = out.clone();
            let mut pw = 1u64;
            for _ in 0..k {
                pw *= p;
                out.extend(prev.iter().map(|d| d * pw));
            }
        }
        out.sort_unstable();
        out
    }
}

const TRIAL_LIMIT: u64 = 1_000_000;

/// Factor n. Trial division handles factors below 10^6; anything left is
/// split with deterministic Miller-Rabin plus Brent's rho.
pub fn factorize(n: u64) -> Result<Factorization, Error> {
    if n == 0 {
        return Err(Error::ZeroFactorization);
    }
    let mut pairs = Vec::new();
    let mut m = n;
    let mut d = 2u64;
    while d <= TRIAL_LIMIT && d * d <= m {
        if m % d == 0 {
            let mut k = 0u32;
            while m % d == 0 {
                m /= d;
                k += 1;
            }
            pairs.push((d, k));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        if m <= TRIAL_LIMIT * TRIAL_LIMIT {
            // no factor below 10^6, so m is prime
            pairs.push((m, 1));
        } else {
            let mut large = Vec::new();
            split_large(m, &mut large);
            large.sort_unstable();
            let mut i = 0;
            while i < large.len() {
                let p = large[i];
                let mut k = 0u32;
                while i < large.len() && large[i] == p {
                    k += 1;
                    i += 1;
                }
                pairs.push((p, k));
            }
        }
    }
    pairs.sort_unstable();
    Ok(Factorization { pairs })
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    split_large(d, out);
    split_large(n / d, out);
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for u64 (the standard 12-base certificate).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// tau(n), the number of divisors.
pub fn tau(n: u64) -> Result<u64, Error> {
    Ok(factorize(n)?.tau())
}

/// mu(n), the Möbius function.
pub fn mu(n: u64) -> Result<i64, Error> {
    Ok(factorize(n)?.mu())
}

/// Sorted list of the divisors of n.
pub fn divisors(n: u64) -> Result<Vec<u64>, Error> {
    Ok(factorize(n)?.divisors())
}

/// Integer square root, exact.
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r > 0 && r.checked_mul(r).map_or(true, |rr| rr > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|rr| rr <= n) {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12).unwrap().pairs(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(1).unwrap().pairs(), &[]);
        assert_eq!(factorize(97).unwrap().pairs(), &[(97, 1)]);
        assert!(matches!(factorize(0), Err(Error::ZeroFactorization)));
    }

    #[test]
    fn factorize_large_inputs() {
        // two 10-digit primes: needs rho splitting
        let p = 2_147_483_647u64; // 2^31 - 1
        let q = 2_147_483_629u64;
        let f = factorize(p * q).unwrap();
        assert_eq!(f.pairs(), &[(q, 1), (p, 1)]);
        assert_eq!(f.value(), p * q);
        let f = factorize(u64::MAX).unwrap(); // 3 * 5 * 17 * 257 * 641 * 65537 * 6700417
        assert_eq!(f.value(), u64::MAX);
    }

    #[test]
    fn tau_mu_examples() {
        assert_eq!(tau(12).unwrap(), 6);
        assert_eq!(mu(30).unwrap(), -1);
        assert_eq!(mu(12).unwrap(), 0);
        assert_eq!(mu(1).unwrap(), 1);
    }

    #[test]
    fn divisors_sorted() {
        assert_eq!(divisors(60).unwrap(), vec![1, 2, 3, 4, 5, 6, 10, 12, 15, 20, 30, 60]);
        assert_eq!(divisors(1).unwrap(), vec![1]);
    }

    #[test]
    fn isqrt_boundaries() {
        for n in 0..2000u64 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n, "n={n}");
        }
        assert_eq!(isqrt(u64::MAX), 4_294_967_295);
    }
}
