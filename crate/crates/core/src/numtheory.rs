//! Integer primitives: factorisation, multiplicative functions and the
//! von Mangoldt sieve.

use std::sync::OnceLock;

use bitvec::prelude::*;
use rayon::prelude::*;

use crate::sum::KahanSum;
use crate::{Error, Result};

/// Default cap on sieve length.
pub const DEFAULT_SIEVE_CAP: u64 = 100_000_000;
/// Entries per sieve segment.
pub const SEGMENT_LEN: usize = 1 << 20;
/// Magic prefix of the binary Λ cache format.
pub const SIEVE_MAGIC: &[u8; 5] = b"GZSV1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    /// `(prime, exponent)` pairs sorted by prime.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Product of the distinct primes.
    pub fn radical(&self) -> u64 {
        self.primes().product()
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
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Brent's variant of Pollard rho; n must be odd and composite.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
        let mut x = y;
        let mut ys = y;
        let m = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn collect_prime_factors(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    collect_prime_factors(d, out);
    collect_prime_factors(n / d, out);
}

/// Prime factorisation by trial division up to 1000, then Pollard rho.
pub fn factorize(n: u64) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    let mut push = |p: u64, m: &mut u64| {
        let mut e = 0;
        while (*m).is_multiple_of(p) {
            *m /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    push(2, &mut m);
    let mut p = 3;
    while p <= 1000 && p * p <= m {
        push(p, &mut m);
        p += 2;
    }
    let mut rest = Vec::new();
    if m > 1 {
        if m < 1_000_000 {
            rest.push(m);
        } else {
            collect_prime_factors(m, &mut rest);
        }
    }
    rest.sort_unstable();
    for p in rest {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Factorization { n, factors }
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .factors
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

pub fn moebius(n: u64) -> i32 {
    let f = factorize(n);
    if !f.is_squarefree() {
        0
    } else if f.factors.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `∏_{p | n} (p − 2)` for odd squarefree `n`.
pub fn phi2(n: u64) -> Result<u64> {
    if n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("phi2 needs odd n, got {n}")));
    }
    let f = factorize(n);
    if !f.is_squarefree() {
        return Err(Error::InvalidArgument(format!(
            "phi2 needs squarefree n, got {n}"
        )));
    }
    Ok(f.primes().map(|p| p - 2).product())
}

/// Number of divisors.
pub fn tau(n: u64) -> u64 {
    factorize(n).factors.iter().map(|&(_, e)| e as u64 + 1).product()
}

/// Carmichael's function: the exponent of `(Z/nZ)^×`.
pub fn carmichael_lambda(n: u64) -> u64 {
    factorize(n).factors.iter().fold(1, |acc, &(p, e)| {
        let l = if p == 2 && e >= 3 {
            1 << (e - 2)
        } else {
            (p - 1) * p.pow(e - 1)
        };
        lcm(acc, l)
    })
}

/// All primes `≤ n` by a plain sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = bitvec![0; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite.set(j, true);
                j += i;
            }
        }
    }
    primes
}

/// Table of `Λ(n)` for `1 ≤ n ≤ limit`. Immutable once built.
#[derive(Debug)]
pub struct SieveTable {
    limit: u64,
    lambda: Vec<f64>,
    prime_power: BitVec,
    nearest_gap: OnceLock<Vec<u32>>,
}

impl SieveTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// `Λ(n)`; index 0 holds 0.
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    #[inline]
    pub fn lambda_at(&self, n: u64) -> f64 {
        self.lambda[n as usize]
    }

    pub fn is_prime_power(&self, n: u64) -> bool {
        self.prime_power[n as usize]
    }

    /// `ψ(u) = Σ_{n ≤ u} Λ(n)`.
    pub fn psi(&self, u: f64) -> f64 {
        if u < 1.0 {
            return 0.0;
        }
        let top = (u.floor() as u64).min(self.limit) as usize;
        self.lambda[1..=top].iter().copied().sum::<KahanSum>().value()
    }

    /// Cumulative `ψ(n)` for `0 ≤ n ≤ limit`.
    pub fn cumulative_psi(&self) -> Vec<f64> {
        let mut acc = KahanSum::new();
        self.lambda
            .iter()
            .map(|&v| {
                acc.add(v);
                acc.value()
            })
            .collect()
    }

    /// Per-residue-class cumulative `ψ(n; q, a)`; entry `[a][n]`.
    pub fn class_cumulative_psi(&self, q: u64) -> Vec<Vec<f64>> {
        (0..q)
            .map(|a| {
                let mut acc = KahanSum::new();
                self.lambda
                    .iter()
                    .enumerate()
                    .map(|(n, &v)| {
                        if n as u64 % q == a {
                            acc.add(v);
                        }
                        acc.value()
                    })
                    .collect()
            })
            .collect()
    }

    /// Distance from each `n ≤ limit` to the nearest prime power other than `n`.
    /// Built on first use. Prime powers beyond the table are not seen, so
    /// entries within `n` of the limit may overestimate.
    pub fn nearest_prime_power_gaps(&self) -> &[u32] {
        self.nearest_gap.get_or_init(|| {
            let n = self.limit as usize;
            let mut gaps = vec![u32::MAX; n + 1];
            let mut last: Option<usize> = None;
            for (i, gap) in gaps.iter_mut().enumerate() {
                if let Some(l) = last {
                    *gap = (i - l) as u32;
                }
                if self.prime_power[i] {
                    last = Some(i);
                }
            }
            let mut next: Option<usize> = None;
            for i in (0..=n).rev() {
                if let Some(nx) = next {
                    gaps[i] = gaps[i].min((nx - i) as u32);
                }
                if self.prime_power[i] {
                    next = Some(i);
                }
            }
            gaps
        })
    }

    /// `⟨x⟩`: distance from real `x` to the nearest prime power other than `x`.
    pub fn nearest_prime_power_distance(&self, x: f64) -> Result<f64> {
        if !(x >= 1.0) || 2.0 * x + 2.0 > self.limit as f64 {
            return Err(Error::OutOfRange(format!(
                "<x> needs 1 <= x and 2x + 2 <= sieve limit {}, got x = {x}",
                self.limit
            )));
        }
        let n = x.floor() as u64;
        if x == n as f64 {
            return Ok(self.nearest_prime_power_gaps()[n as usize] as f64);
        }
        let below = (1..=n).rev().find(|&m| self.is_prime_power(m));
        let above = (n + 1..=self.limit).find(|&m| self.is_prime_power(m));
        let d_below = below.map_or(f64::INFINITY, |m| x - m as f64);
        let d_above = above.map_or(f64::INFINITY, |m| m as f64 - x);
        Ok(d_below.min(d_above))
    }

    /// Binary cache encoding: magic, little-endian `u64` limit, then
    /// `Λ(1), ..., Λ(limit)` as little-endian `f64`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(13 + 8 * self.limit as usize);
        out.extend_from_slice(SIEVE_MAGIC);
        out.extend_from_slice(&self.limit.to_le_bytes());
        for v in &self.lambda[1..] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 13 || &bytes[..5] != SIEVE_MAGIC {
            return Err(Error::Corrupt("missing GZSV1 header".into()));
        }
        let limit = u64::from_le_bytes(bytes[5..13].try_into().unwrap());
        let body = &bytes[13..];
        if body.len() as u64 != 8 * limit {
            return Err(Error::Corrupt(format!(
                "sieve body holds {} bytes, expected {}",
                body.len(),
                8 * limit
            )));
        }
        let mut lambda = Vec::with_capacity(limit as usize + 1);
        lambda.push(0.0);
        lambda.extend(
            body.chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap())),
        );
        Ok(Self::from_lambda(lambda))
    }

    fn from_lambda(lambda: Vec<f64>) -> Self {
        let limit = lambda.len() as u64 - 1;
        let prime_power = lambda.iter().map(|&v| v > 0.0).collect();
        Self {
            limit,
            lambda,
            prime_power,
            nearest_gap: OnceLock::new(),
        }
    }
}

/// Segmented sieve for `Λ(n)`, `n ≤ x`, with the default capacity cap.
pub fn build_sieve(x: u64) -> Result<SieveTable> {
    build_sieve_capped(x, DEFAULT_SIEVE_CAP)
}

pub fn build_sieve_capped(x: u64, cap: u64) -> Result<SieveTable> {
    if x > cap {
        return Err(Error::Capacity {
            what: "sieve limit",
            value: x,
            limit: cap,
        });
    }
    if x < 2 {
        return Err(Error::InvalidArgument(format!("sieve limit must be >= 2, got {x}")));
    }
    let root = (x as f64).sqrt() as u64 + 1;
    let base = primes_up_to(root);
    let mut lambda = vec![0.0f64; x as usize + 1];

    lambda
        .par_chunks_mut(SEGMENT_LEN)
        .enumerate()
        .for_each(|(seg, chunk)| {
            let lo = (seg * SEGMENT_LEN) as u64;
            let hi = lo + chunk.len() as u64;
            let mut composite = bitvec![0; chunk.len()];
            for &p in &base {
                if p * p >= hi {
                    break;
                }
                let mut m = (p * p).max(lo.div_ceil(p) * p);
                while m < hi {
                    composite.set((m - lo) as usize, true);
                    m += p;
                }
            }
            for (i, slot) in chunk.iter_mut().enumerate() {
                let n = lo + i as u64;
                if n >= 2 && !composite[i] {
                    *slot = (n as f64).ln();
                }
            }
        });

    for &p in &base {
        if p * p > x {
            break;
        }
        let lp = (p as f64).ln();
        let mut pk = p * p;
        while pk <= x {
            lambda[pk as usize] = lp;
            match pk.checked_mul(p) {
                Some(v) => pk = v,
                None => break,
            }
        }
    }
    Ok(SieveTable::from_lambda(lambda))
}
