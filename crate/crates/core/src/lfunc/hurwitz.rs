//! Hurwitz zeta by Euler–Maclaurin summation.

use num_complex::Complex64;

use crate::special::BERNOULLI_EVEN;
use crate::{Error, Result};

/// Largest `|Im s|` for which the fixed truncation was validated.
pub const MAX_HEIGHT: f64 = 1.0e4;

/// `(2k)!` for `k = 1..=12`.
const FACTORIAL_EVEN: [f64; 12] = [
    2.0,
    24.0,
    720.0,
    40320.0,
    3628800.0,
    479001600.0,
    87178291200.0,
    20922789888000.0,
    6402373705728000.0,
    2432902008176640000.0,
    1124000727777607680000.0,
    620448401733239439360000.0,
];

/// Number of direct terms used at height `im`.
pub fn direct_terms(im: f64) -> usize {
    (2.0 * im.abs()).ceil().max(20.0) as usize
}

/// `ζ(s, α) = Σ_{n≥0} (n+α)^{-s}` for `0 < α ≤ 1`.
pub fn hurwitz_zeta(s: Complex64, alpha: f64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("hurwitz zeta at s = 1"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} not in (0, 1]")));
    }
    if s.im.abs() > MAX_HEIGHT || !s.re.is_finite() {
        return Err(Error::OutOfRange(format!("|Im s| = {} beyond {MAX_HEIGHT}", s.im.abs())));
    }
    Ok(hurwitz_unchecked(s, alpha, direct_terms(s.im)))
}

pub(crate) fn hurwitz_unchecked(s: Complex64, alpha: f64, n: usize) -> Complex64 {
    let mut head = Complex64::new(0.0, 0.0);
    // smallest terms first
    for k in (0..n).rev() {
        head += (-s * (k as f64 + alpha).ln()).exp();
    }
    let a = n as f64 + alpha;
    let ln_a = a.ln();
    let a_pow = (-s * ln_a).exp();
    // finite part at s = 1; the residues cancel in non-principal character sums
    let pole_term = if s == Complex64::new(1.0, 0.0) {
        Complex64::new(-ln_a, 0.0)
    } else {
        a_pow * a / (s - 1.0)
    };
    let mut tail = pole_term + a_pow * 0.5;
    // rising factorial s(s+1)...(s+2k-2) times a^{-s-2k+1}
    let mut rising = s;
    let mut power = a_pow / a;
    let inv_a2 = 1.0 / (a * a);
    for k in 0..12 {
        tail += rising * power * (BERNOULLI_EVEN[k] / FACTORIAL_EVEN[k]);
        let j = 2.0 * k as f64;
        rising *= (s + j + 1.0) * (s + j + 2.0);
        power *= inv_a2;
    }
    head + tail
}

/// Slow reference: direct sum to `terms` plus the integral tail and the first
/// two Euler–Maclaurin corrections. Only meaningful for `Re s > 1`.
pub fn hurwitz_direct(s: Complex64, alpha: f64, terms: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in (0..terms).rev() {
        acc += (-s * (k as f64 + alpha).ln()).exp();
    }
    let a = terms as f64 + alpha;
    let p = (-s * a.ln()).exp();
    acc + p * a / (s - 1.0) + p * 0.5 + s * p / a / 12.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
        (a - b).norm() <= rel * b.norm().max(1e-300)
    }

    #[test]
    fn riemann_values() {
        let z2 = hurwitz_zeta(c(2.0, 0.0), 1.0).unwrap();
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-14);
        let z3 = hurwitz_zeta(c(3.0, 0.0), 1.0).unwrap();
        assert!((z3.re - 1.202_056_903_159_594_2).abs() < 1e-14);
        let z0 = hurwitz_zeta(c(0.0, 0.0), 1.0).unwrap();
        assert!((z0.re + 0.5).abs() < 1e-14);
        let zm1 = hurwitz_zeta(c(-1.0, 0.0), 1.0).unwrap();
        assert!((zm1.re + 1.0 / 12.0).abs() < 1e-14);
        assert!(hurwitz_zeta(c(1.0, 0.0), 0.5).is_err());
        assert!(hurwitz_zeta(c(0.5, 2e4), 0.5).is_err());
    }

    #[test]
    fn direct_summation_oracle() {
        // Re s > 1 where the slow sum converges
        for &(s, a) in &[
            (c(2.0, 0.0), 1.0),
            (c(1.5, 3.0), 0.25),
            (c(3.0, -7.0), 0.6),
            (c(1.8, 40.0), 0.125),
            (c(2.5, 150.0), 0.9),
        ] {
            let fast = hurwitz_zeta(s, a).unwrap();
            let slow = hurwitz_direct(s, a, 2_000_000);
            assert!(close(fast, slow, 1e-12), "{s} {a}: {fast} vs {slow}");
        }
    }

    #[test]
    fn shift_identity() {
        for &s in &[c(0.5, 14.0), c(-0.5, 3.0), c(0.0, 0.0), c(0.3, 200.0), c(1.5, -800.0)] {
            for &a in &[0.2, 0.5, 0.75] {
                let lhs = hurwitz_unchecked(s, a, direct_terms(s.im));
                let rhs = hurwitz_unchecked(s, a + 1.0, direct_terms(s.im)) + (-s * a.ln()).exp();
                assert!(close(lhs, rhs, 1e-12), "{s} {a}");
            }
            let z = hurwitz_zeta(c(0.0, 0.0), 0.3).unwrap();
            assert!((z.re - 0.2).abs() < 1e-14);
        }
    }

    #[test]
    fn critical_line_against_known_zero() {
        let z = hurwitz_zeta(c(0.5, 14.134_725_141_734_693), 1.0).unwrap();
        assert!(z.norm() < 1e-12, "{z}");
    }

    #[test]
    fn truncation_stable_under_more_terms() {
        for &(s, tol) in &[
            (c(0.5, 1000.0), 1e-12),
            (c(0.5, 5000.0), 1e-12),
            (c(0.5, 9999.0), 1e-11),
            (c(-0.5, 300.0), 1e-10),
        ] {
            let base = hurwitz_unchecked(s, 0.5, direct_terms(s.im));
            let more = hurwitz_unchecked(s, 0.5, 2 * direct_terms(s.im) + 50);
            assert!((base - more).norm() < tol * more.norm().max(1.0), "{s} {}", (base - more).norm() / more.norm().max(1.0));
        }
    }
}
