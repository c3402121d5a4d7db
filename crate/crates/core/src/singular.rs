//! The twin prime constant, the Hardy–Littlewood weight `J(n)` and the
//! singular series `𝔖_q(c)`.

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::lfunc::hurwitz::hurwitz_zeta;
use crate::numtheory::{euler_phi, factorize, moebius, primes_up_to};
use crate::sum::KahanSum;
use crate::{Error, Result};

/// Smallest prime cutoff accepted by [`compute_c2`].
pub const MIN_C2_CUTOFF: u64 = 100_000;

/// Largest `x` for [`JTable`] and [`j_average`].
pub const MAX_J_LIMIT: u64 = 10_000_000;

/// Highest power in the prime-zeta expansion of the tail.
const TAIL_TERMS: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularConstants {
    /// `C₂ = 2 ∏_{p>2} (1 − (p−1)⁻²)`.
    pub c2: f64,
    pub prime_cutoff: u64,
    /// `2 ∏_{2<p≤P} (1 − (p−1)⁻²)`, decreasing in `P`.
    pub partial_product: f64,
    /// Bound on `|c2 − C₂|`.
    pub tail_bound: f64,
}

/// `2 ∏_{3 ≤ p ≤ cutoff} (1 − 1/(p−1)²)`.
pub fn c2_partial_product(cutoff: u64) -> f64 {
    2.0 * log_partial(&primes_up_to(cutoff)).exp()
}

fn log_partial(primes: &[u64]) -> f64 {
    primes
        .iter()
        .filter(|&&p| p > 2)
        .map(|&p| {
            let d = (p - 1) as f64;
            (-1.0 / (d * d)).ln_1p()
        })
        .sum::<KahanSum>()
        .value()
}

/// `log ζ(s) + Σ_{p ≤ P} log(1 − p^{-s})`: the log of the zeta function with
/// the small Euler factors removed.
fn log_zeta_rough(s: f64, primes: &[u64]) -> f64 {
    let zeta = hurwitz_zeta(Complex64::new(s, 0.0), 1.0)
        .expect("real s > 1")
        .re;
    let mut acc = KahanSum::new();
    acc.add(zeta.ln());
    for &p in primes {
        let t = (p as f64).powf(-s);
        if t < 1e-300 {
            break;
        }
        acc.add((-t).ln_1p());
    }
    acc.value()
}

/// `Σ_{p > P} p^{-s}` through Möbius inversion of `log ζ`.
fn prime_zeta_tail(s: u32, primes: &[u64], cutoff: u64) -> f64 {
    let mut acc = KahanSum::new();
    for k in 1..=8u32 {
        let mu = moebius(k as u64);
        if mu == 0 {
            continue;
        }
        let ks = (k * s) as f64;
        if (cutoff as f64).powf(1.0 - ks) < 1e-40 {
            break;
        }
        acc.add(mu as f64 / k as f64 * log_zeta_rough(ks, primes));
    }
    acc.value()
}

/// `C₂` with the tail over `p > cutoff` summed by prime-zeta expansion.
pub fn compute_c2(cutoff: u64) -> Result<SingularConstants> {
    if cutoff < MIN_C2_CUTOFF {
        return Err(Error::InvalidArgument(format!(
            "prime cutoff {cutoff} below {MIN_C2_CUTOFF}"
        )));
    }
    let primes = primes_up_to(cutoff);
    let head = log_partial(&primes);
    // log(1 − (p−1)^{-2}) = −Σ_{n≥2} (2^n − 2)/n · p^{-n}
    let mut tail = KahanSum::new();
    for n in 2..=TAIL_TERMS {
        let w = (2f64.powi(n as i32) - 2.0) / n as f64;
        tail.add(-w * prime_zeta_tail(n, &primes, cutoff));
    }
    let p = cutoff as f64;
    let next = TAIL_TERMS + 1;
    let truncation = 2f64.powi(next as i32) / next as f64 * p.powf(1.0 - next as f64) * 2.0;
    let rounding = 64.0 * f64::EPSILON;
    let c2 = 2.0 * (head + tail.value()).exp();
    Ok(SingularConstants {
        c2,
        prime_cutoff: cutoff,
        partial_product: 2.0 * head.exp(),
        tail_bound: c2 * (truncation + rounding),
    })
}

impl SingularConstants {
    /// Constants at the default cutoff `10⁶`.
    pub fn standard() -> Self {
        compute_c2(1_000_000).expect("cutoff above minimum")
    }
}

/// `∏_{p | n, p > 2} (p−1)/(p−2)`.
fn odd_kernel_factor(n: u64) -> f64 {
    factorize(n)
        .primes()
        .filter(|&p| p > 2)
        .map(|p| (p - 1) as f64 / (p - 2) as f64)
        .product()
}

/// `J(n) = n C₂ ∏_{p | n, p > 2} (p−1)/(p−2)` for even `n`, zero for odd `n`.
pub fn j_weight(n: u64, constants: &SingularConstants) -> f64 {
    if n % 2 == 1 || n == 0 {
        return 0.0;
    }
    n as f64 * constants.c2 * odd_kernel_factor(n)
}

/// `𝔖_q(c) = φ(q)⁻¹ ∏_{p | q, p ∤ c} (p−2)/(p−1)`.
pub fn singular_series(q: u64, c: i64) -> Ratio<u64> {
    let c = c.rem_euclid(q as i64) as u64;
    let mut r = Ratio::new(1, euler_phi(q));
    for p in factorize(q).primes() {
        if !c.is_multiple_of(p) {
            r *= Ratio::new(p - 2, p - 1);
        }
    }
    r
}

pub fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `J(n)` for all `n ≤ x`.
#[derive(Clone, Debug)]
pub struct JTable {
    pub x: u64,
    pub values: Vec<f64>,
}

impl JTable {
    pub fn new(x: u64, constants: &SingularConstants) -> Result<Self> {
        if x > MAX_J_LIMIT {
            return Err(Error::Capacity {
                what: "J table limit",
                value: x,
                limit: MAX_J_LIMIT,
            });
        }
        let len = x as usize + 1;
        let mut factor = vec![1.0f64; len];
        for p in primes_up_to(x).into_iter().filter(|&p| p > 2) {
            let r = (p - 1) as f64 / (p - 2) as f64;
            for m in (p as usize..len).step_by(p as usize) {
                factor[m] *= r;
            }
        }
        let values = factor
            .iter()
            .enumerate()
            .map(|(n, &f)| {
                if n % 2 == 1 || n == 0 {
                    0.0
                } else {
                    n as f64 * constants.c2 * f
                }
            })
            .collect();
        Ok(Self { x, values })
    }

    /// `Σ_{n ≤ u, n ≡ c (q)} J(n)` for every class `c`, at `u = x`.
    pub fn class_sums(&self, q: u64, u: u64) -> Vec<f64> {
        let mut acc = vec![KahanSum::new(); q as usize];
        for (n, &v) in self.values[..=u.min(self.x) as usize].iter().enumerate() {
            acc[n % q as usize].add(v);
        }
        acc.iter().map(|k| k.value()).collect()
    }
}

/// One row of the congruence-class average of `J`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JAverage {
    pub x: u64,
    pub q: u64,
    pub c: u64,
    pub exact: f64,
    pub main: f64,
    pub residual: f64,
    /// `|residual| / (x log x)`.
    pub constant: f64,
}

impl JAverage {
    fn new(x: u64, q: u64, c: u64, exact: f64) -> Self {
        let main = ratio_to_f64(singular_series(q, c as i64)) * (x as f64).powi(2) / 2.0;
        let residual = exact - main;
        let xf = x as f64;
        Self {
            x,
            q,
            c,
            exact,
            main,
            residual,
            constant: residual.abs() / (xf * xf.ln().max(1.0)),
        }
    }
}

/// `Σ_{n ≤ x, n ≡ c (q)} J(n)` against `𝔖_q(c) x²/2`.
pub fn j_average(x: u64, q: u64, c: i64, constants: &SingularConstants) -> Result<JAverage> {
    if q == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    let table = JTable::new(x, constants)?;
    let c = c.rem_euclid(q as i64) as u64;
    Ok(JAverage::new(x, q, c, table.class_sums(q, x)[c as usize]))
}

/// [`j_average`] for every class mod `q` from a shared table.
pub fn j_averages(table: &JTable, x: u64, q: u64) -> Vec<JAverage> {
    table
        .class_sums(q, x)
        .into_iter()
        .enumerate()
        .map(|(c, s)| JAverage::new(x.min(table.x), q, c as u64, s))
        .collect()
}
