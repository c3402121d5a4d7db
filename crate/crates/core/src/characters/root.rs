//! Exact roots of unity and sums of them in `Z[ζ_m]`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numtheory::{gcd, lcm};

/// `e(k/m) = exp(2πi k/m)` held in lowest terms with `0 ≤ k < m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootOfUnity {
    k: u64,
    m: u64,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { k: 0, m: 1 };

    pub fn new(k: i64, m: u64) -> Self {
        assert!(m > 0, "root of unity needs a positive denominator");
        let k = k.rem_euclid(m as i64) as u64;
        if k == 0 {
            return Self::ONE;
        }
        let g = gcd(k, m);
        Self { k: k / g, m: m / g }
    }

    pub fn numerator(&self) -> u64 {
        self.k
    }

    pub fn denominator(&self) -> u64 {
        self.m
    }

    /// Multiplicative order (the reduced denominator).
    pub fn order(&self) -> u64 {
        self.m
    }

    pub fn conj(&self) -> Self {
        Self::new(-(self.k as i64), self.m)
    }

    pub fn pow(&self, e: u64) -> Self {
        Self::new(((self.k as u128 * e as u128) % self.m as u128) as i64, self.m)
    }

    /// Numerator of this root over the denominator `m`, which must be a multiple
    /// of [`order`](Self::order).
    pub fn numerator_over(&self, m: u64) -> u64 {
        assert_eq!(m % self.m, 0, "denominator {m} is not a multiple of {}", self.m);
        self.k * (m / self.m)
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.k == 0 {
            return Complex64::new(1.0, 0.0);
        }
        match (self.k, self.m) {
            (1, 2) => Complex64::new(-1.0, 0.0),
            (1, 4) => Complex64::new(0.0, 1.0),
            (3, 4) => Complex64::new(0.0, -1.0),
            _ => Complex64::from_polar(1.0, std::f64::consts::TAU * self.k as f64 / self.m as f64),
        }
    }
}

impl std::ops::Mul for RootOfUnity {
    type Output = RootOfUnity;
    fn mul(self, rhs: Self) -> Self {
        let m = lcm(self.m, rhs.m);
        Self::new(
            (self.numerator_over(m) + rhs.numerator_over(m)) as i64,
            m,
        )
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e({}/{})", self.k, self.m)
    }
}

fn cyclotomic_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of the cyclotomic polynomial `Φ_n`, lowest degree first.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<i64>> {
    if let Some(p) = cyclotomic_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n − 1 divided by Φ_d for each proper divisor d
    let mut poly = vec![0i64; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let divisor = cyclotomic_polynomial(d);
            poly = divide_exact(&poly, &divisor);
        }
    }
    let poly = Arc::new(poly);
    cyclotomic_cache()
        .lock()
        .unwrap()
        .insert(n, poly.clone());
    poly
}

fn divide_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = num.len() - 1;
    let mut quot = vec![0i64; nd - dd + 1];
    for i in (0..=nd - dd).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// An element `Σ_j c_j ζ^j` of `Z[ζ]`, `ζ = e(1/order)`, kept unreduced.
/// Equality is decided exactly by reduction modulo `Φ_order`.
#[derive(Clone, Debug)]
pub struct CycloInt {
    order: u64,
    coeffs: Vec<i64>,
}

impl CycloInt {
    pub fn zero(order: u64) -> Self {
        assert!(order > 0);
        Self {
            order,
            coeffs: vec![0; order as usize],
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Adds `times · root`; the root's order must divide `self.order()`.
    pub fn add_root(&mut self, root: RootOfUnity, times: i64) {
        let j = root.numerator_over(self.order);
        self.coeffs[j as usize] += times;
    }

    pub fn add_exponent(&mut self, j: u64, times: i64) {
        self.coeffs[(j % self.order) as usize] += times;
    }

    pub fn scaled_root(order: u64, root: RootOfUnity, times: i64) -> Self {
        let mut z = Self::zero(order);
        z.add_root(root, times);
        z
    }

    /// Same element expressed over `ζ_{order·f}`.
    pub fn lift(&self, order: u64) -> Self {
        assert_eq!(order % self.order, 0);
        let f = order / self.order;
        let mut z = Self::zero(order);
        for (j, &c) in self.coeffs.iter().enumerate() {
            z.coeffs[j * f as usize] = c;
        }
        z
    }

    /// Remainder modulo `Φ_order`: a canonical coefficient vector of length
    /// `φ(order)`.
    pub fn canonical(&self) -> Vec<i64> {
        let phi = cyclotomic_polynomial(self.order);
        let deg = phi.len() - 1;
        let mut rem = self.coeffs.clone();
        for i in (deg..rem.len()).rev() {
            let c = rem[i];
            if c != 0 {
                let shift = i - deg;
                for (j, &p) in phi.iter().enumerate() {
                    if p != 0 {
                        rem[shift + j] -= c * p;
                    }
                }
            }
        }
        rem.truncate(deg);
        rem
    }

    pub fn is_zero(&self) -> bool {
        self.canonical().iter().all(|&c| c == 0)
    }

    pub fn to_complex(&self) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| RootOfUnity::new(j as i64, self.order).to_complex() * c as f64)
            .sum()
    }
}

impl PartialEq for CycloInt {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            self.canonical() == other.canonical()
        } else {
            let m = lcm(self.order, other.order);
            self.lift(m).canonical() == other.lift(m).canonical()
        }
    }
}

impl Eq for CycloInt {}
