//! Complex log-gamma and Bernoulli numbers.

use num_complex::Complex64;

/// `B_2, B_4, ..., B_24`.
pub const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const STIRLING_RADIUS: f64 = 15.0;

/// Log-gamma on the complex plane minus the non-positive integers.
///
/// The result is the analytic continuation of `ln Γ` from the positive reals
/// along paths avoiding the negative real axis; the imaginary part is therefore
/// a continuous argument of `Γ(z)` in the right half plane. Callers that only
/// need `Γ(z)` or its phase modulo `2π` may use it anywhere off the poles.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < STIRLING_RADIUS {
        shift += w.ln();
        w += 1.0;
    }
    stirling(w) - shift
}

fn stirling(z: Complex64) -> Complex64 {
    let mut acc = (z - 0.5) * z.ln() - z + LN_SQRT_2PI;
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    for (k, b) in BERNOULLI_EVEN.iter().take(10).enumerate() {
        let k = (k + 1) as f64;
        acc += pow * (b / (2.0 * k * (2.0 * k - 1.0)));
        pow *= inv2;
    }
    acc
}

/// `Γ(z)` for moderate `|Im z|` (underflows for `|Im z| ≳ 450`).
pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}
