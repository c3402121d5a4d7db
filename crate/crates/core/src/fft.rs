//! FFT-backed linear convolution.
//!
//! Real inputs are packed two at a time into one complex transform, so a real
//! convolution costs one forward and one inverse complex FFT of size
//! `next_power_of_two(len_a + len_b - 1)`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct Convolver {
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Convolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Convolver").field("size", &self.size).finish()
    }
}

impl Convolver {
    /// A convolver whose transforms are long enough for a linear convolution
    /// producing `output_len` coefficients.
    pub fn for_output_len(output_len: usize) -> Self {
        Self::with_size(output_len.max(1).next_power_of_two())
    }

    pub fn with_size(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn padded_real(&self, a: &[f64], b: &[f64]) -> Vec<Complex64> {
        assert!(a.len() <= self.size && b.len() <= self.size);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.size];
        for (i, &v) in a.iter().enumerate() {
            buf[i].re = v;
        }
        for (i, &v) in b.iter().enumerate() {
            buf[i].im = v;
        }
        buf
    }

    /// Spectra of two real sequences computed with one complex FFT.
    pub fn spectrum_pair(&self, a: &[f64], b: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut z = self.padded_real(a, b);
        self.forward.process(&mut z);
        let n = self.size;
        let mut sa = Vec::with_capacity(n);
        let mut sb = Vec::with_capacity(n);
        for k in 0..n {
            let zk = z[k];
            let zc = z[(n - k) % n].conj();
            sa.push((zk + zc) * 0.5);
            sb.push((zk - zc) * Complex64::new(0.0, -0.5));
        }
        (sa, sb)
    }

    pub fn spectrum_real(&self, a: &[f64]) -> Vec<Complex64> {
        let mut z = self.padded_real(a, &[]);
        self.forward.process(&mut z);
        z
    }

    pub fn spectrum_complex(&self, a: &[Complex64]) -> Vec<Complex64> {
        assert!(a.len() <= self.size);
        let mut z = vec![Complex64::new(0.0, 0.0); self.size];
        z[..a.len()].copy_from_slice(a);
        self.forward.process(&mut z);
        z
    }

    /// Inverse transform of `p`, normalised.
    pub fn inverse(&self, p: &[Complex64]) -> Vec<Complex64> {
        let mut z = p.to_vec();
        self.inverse.process(&mut z);
        let scale = 1.0 / self.size as f64;
        for v in &mut z {
            *v *= scale;
        }
        z
    }

    /// Inverse transforms of two spectra known to have real inverses, in one pass.
    pub fn inverse_real_pair(&self, p: &[Complex64], r: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let i = Complex64::new(0.0, 1.0);
        let packed: Vec<Complex64> = p.iter().zip(r).map(|(&a, &b)| a + i * b).collect();
        let z = self.inverse(&packed);
        (z.iter().map(|c| c.re).collect(), z.iter().map(|c| c.im).collect())
    }

    pub fn inverse_real(&self, p: &[Complex64]) -> Vec<f64> {
        self.inverse(p).into_iter().map(|c| c.re).collect()
    }
}

pub fn pointwise(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// Linear convolution of two real sequences.
pub fn convolve_real(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let len = a.len() + b.len() - 1;
    let conv = Convolver::for_output_len(len);
    let (sa, sb) = conv.spectrum_pair(a, b);
    let mut out = conv.inverse_real(&pointwise(&sa, &sb));
    out.truncate(len);
    out
}

/// Linear convolution of two complex sequences.
pub fn convolve_complex(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let len = a.len() + b.len() - 1;
    let conv = Convolver::for_output_len(len);
    let sa = conv.spectrum_complex(a);
    let sb = conv.spectrum_complex(b);
    let mut out = conv.inverse(&pointwise(&sa, &sb));
    out.truncate(len);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    #[test]
    fn matches_direct_convolution() {
        let a: Vec<f64> = (0..37).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let b: Vec<f64> = (0..21).map(|i| ((i * 104729) % 11) as f64 * 0.5).collect();
        let fast = convolve_real(&a, &b);
        for (x, y) in fast.iter().zip(direct(&a, &b)) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn complex_matches_real_parts() {
        let a: Vec<f64> = (0..16).map(|i| i as f64).collect();
        let ca: Vec<Complex64> = a.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let r = convolve_real(&a, &a);
        let c = convolve_complex(&ca, &ca);
        for (x, y) in r.iter().zip(&c) {
            assert!((x - y.re).abs() < 1e-9 && y.im.abs() < 1e-9);
        }
    }

    #[test]
    fn paired_inverse_splits_cleanly() {
        let conv = Convolver::with_size(8);
        let a = [1.0, 2.0, 3.0];
        let b = [0.0, -1.0];
        let (sa, sb) = conv.spectrum_pair(&a, &b);
        let (ra, rb) = conv.inverse_real_pair(&sa, &sb);
        assert!((ra[2] - 3.0).abs() < 1e-12 && (rb[1] + 1.0).abs() < 1e-12);
    }
}
