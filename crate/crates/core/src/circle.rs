//! Exponential sums on uniform grids and the circle-method integrals built
//! from them.
//!
//! With `α_j = j/N`, `T(α) = Σ_{n≤x} e(nα)` and `S(α, χ) = Σ_{n≤x} χ(n)Λ(n)e(nα)`
//! are trigonometric polynomials of degree `x`, so for `N ≥ 2x+1` the uniform
//! `N`-point mean of any product of three of them is the exact integral over
//! `[0, 1]`.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::characters::{build_group, DirichletCharacter};
use crate::goldbach::s_chi;
use crate::numtheory::SieveTable;
use crate::sum::{ComplexKahanSum, KahanSum};
use crate::{Error, Result};

/// Largest `x` for the DFT grids.
pub const MAX_GRID_X: u64 = 1_000_000;

/// `T(α_j)` and `S(α_j, χ)` for every character mod `q`.
#[derive(Clone, Debug)]
pub struct ExpSumGrid {
    pub x: u64,
    pub q: u64,
    pub n: usize,
    pub characters: Vec<DirichletCharacter>,
    pub t_values: Vec<Complex64>,
    /// `s_values[i][j] = S(α_j, characters[i])`.
    pub s_values: Vec<Vec<Complex64>>,
}

/// `Σ_k c_k e(kj/N)` for `j < N`.
fn synthesize(coeffs: Vec<Complex64>, n: usize) -> Vec<Complex64> {
    let mut buf = coeffs;
    buf.resize(n, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf
}

/// Builds the grid with `points` samples; requires `points ≥ 2x+1`.
pub fn build_grid(x: u64, q: u64, sieve: &SieveTable, points: usize) -> Result<ExpSumGrid> {
    if x > MAX_GRID_X {
        return Err(Error::Capacity {
            what: "grid x",
            value: x,
            limit: MAX_GRID_X,
        });
    }
    if x > sieve.limit() {
        return Err(Error::OutOfRange(format!("x = {x} beyond sieve limit {}", sieve.limit())));
    }
    let needed = 2 * x as usize + 1;
    if points < needed {
        return Err(Error::InexactGrid { x, points, needed });
    }
    let group = build_group(q)?;
    let characters = group.characters().to_vec();
    let lambda = &sieve.lambda()[..=x as usize];
    let ones: Vec<Complex64> = (0..=x)
        .map(|k| Complex64::new(if k == 0 { 0.0 } else { 1.0 }, 0.0))
        .collect();
    let t_values = synthesize(ones, points);
    let s_values = characters
        .par_iter()
        .map(|chi| {
            let table = chi.complex_table();
            let coeffs = lambda
                .iter()
                .enumerate()
                .map(|(k, &v)| table[k % q as usize] * v)
                .collect();
            synthesize(coeffs, points)
        })
        .collect();
    Ok(ExpSumGrid {
        x,
        q,
        n: points,
        characters,
        t_values,
        s_values,
    })
}

/// The smallest exact grid, `N = 2x + 1`.
pub fn build_exact_grid(x: u64, q: u64, sieve: &SieveTable) -> Result<ExpSumGrid> {
    build_grid(x, q, sieve, 2 * x as usize + 1)
}

impl ExpSumGrid {
    pub fn index_of(&self, chi: &DirichletCharacter) -> Result<usize> {
        if chi.modulus() != self.q {
            return Err(Error::ModulusMismatch(chi.modulus(), self.q));
        }
        self.characters
            .iter()
            .position(|c| c == chi)
            .ok_or_else(|| Error::BadLabel(chi.label()))
    }

    fn require_exact(&self) -> Result<()> {
        let needed = 2 * self.x as usize + 1;
        if self.n < needed {
            return Err(Error::InexactGrid {
                x: self.x,
                points: self.n,
                needed,
            });
        }
        Ok(())
    }

    fn delta(&self, i: usize) -> f64 {
        if self.characters[i].is_principal() {
            1.0
        } else {
            0.0
        }
    }

    /// `W(α_j, χ_i) = S(α_j, χ_i) − δ₀(χ_i) T(α_j)`.
    pub fn w_values(&self, i: usize) -> Vec<Complex64> {
        let d = self.delta(i);
        self.s_values[i]
            .iter()
            .zip(&self.t_values)
            .map(|(s, t)| s - t * d)
            .collect()
    }

    fn triple_mean(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        f.iter()
            .zip(g)
            .zip(&self.t_values)
            .map(|((a, b), t)| a * b * t.conj())
            .sum::<ComplexKahanSum>()
            .value()
            / self.n as f64
    }

    /// `∫₀¹ S(α, χ₁) S(α, χ₂) T(−α) dα` as a grid mean.
    pub fn s_quadrature(&self, i: usize, j: usize) -> Result<Complex64> {
        self.require_exact()?;
        Ok(self.triple_mean(&self.s_values[i], &self.s_values[j]))
    }
}

/// `|DFT value − direct convolution|` for `S(x; χ₁, χ₂)`.
pub fn decompose_check(
    chi1: &DirichletCharacter,
    chi2: &DirichletCharacter,
    grid: &ExpSumGrid,
    sieve: &SieveTable,
) -> Result<f64> {
    let (i, j) = (grid.index_of(chi1)?, grid.index_of(chi2)?);
    let dft = grid.s_quadrature(i, j)?;
    let direct = s_chi(grid.x, chi1, chi2, sieve)?;
    Ok((dft - direct).norm())
}

/// `R(x; χ₁, χ₂) = ∫₀¹ W(α, χ₁) W(α, χ₂) T(−α) dα`.
pub fn r_term(chi1: &DirichletCharacter, chi2: &DirichletCharacter, grid: &ExpSumGrid) -> Result<Complex64> {
    let (i, j) = (grid.index_of(chi1)?, grid.index_of(chi2)?);
    grid.require_exact()?;
    Ok(grid.triple_mean(&grid.w_values(i), &grid.w_values(j)))
}

/// The pieces of `S = δ₁δ₂ M + δ₂ C₁ + δ₁ C₂ + R` with `M = ∫T²T̄` and
/// `C_i = ∫ W(α, χ_i) T(α) T(−α) dα`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub s: Complex64,
    pub main: Complex64,
    pub cross1: Complex64,
    pub cross2: Complex64,
    pub r: Complex64,
    pub delta1: f64,
    pub delta2: f64,
}

impl Decomposition {
    pub fn reconstructed(&self) -> Complex64 {
        self.main * (self.delta1 * self.delta2)
            + self.cross1 * self.delta2
            + self.cross2 * self.delta1
            + self.r
    }

    pub fn identity_residual(&self) -> f64 {
        (self.s - self.reconstructed()).norm()
    }
}

pub fn decomposition(
    chi1: &DirichletCharacter,
    chi2: &DirichletCharacter,
    grid: &ExpSumGrid,
) -> Result<Decomposition> {
    let (i, j) = (grid.index_of(chi1)?, grid.index_of(chi2)?);
    grid.require_exact()?;
    let (w1, w2) = (grid.w_values(i), grid.w_values(j));
    let t = &grid.t_values;
    Ok(Decomposition {
        s: grid.triple_mean(&grid.s_values[i], &grid.s_values[j]),
        main: grid.triple_mean(t, t),
        cross1: grid.triple_mean(&w1, t),
        cross2: grid.triple_mean(&w2, t),
        r: grid.triple_mean(&w1, &w2),
        delta1: grid.delta(i),
        delta2: grid.delta(j),
    })
}

/// `J(χ) = ∫₀¹ |W(α, χ)|² |T(α)| dα` with a quadrature error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JChi {
    pub value: f64,
    /// Size of the Richardson correction from the `N/2` subgrid.
    pub quadrature_error: f64,
    pub points: usize,
}

/// Grid size used for [`j_chi`].
pub fn j_grid_points(x: u64) -> usize {
    8 * x as usize
}

pub fn j_chi(chi: &DirichletCharacter, grid: &ExpSumGrid) -> Result<JChi> {
    let i = grid.index_of(chi)?;
    grid.require_exact()?;
    let w = grid.w_values(i);
    let f: Vec<f64> = w
        .iter()
        .zip(&grid.t_values)
        .map(|(w, t)| w.norm_sqr() * t.norm())
        .collect();
    let full = f.iter().copied().sum::<KahanSum>().value() / grid.n as f64;
    let half_n = grid.n / 2;
    let half = f.iter().step_by(2).take(half_n).copied().sum::<KahanSum>().value() / half_n as f64;
    // kinks of |T| at m/x fall on nodes when x | N, leaving an h² error series
    let (value, quadrature_error) = if grid.n.is_multiple_of(2 * grid.x as usize) {
        (full + (full - half) / 3.0, (full - half).abs() / 3.0)
    } else {
        (full, (full - half).abs())
    };
    Ok(JChi {
        value,
        quadrature_error,
        points: grid.n,
    })
}

/// `∫_{−ξ}^{ξ} |W(α, χ)|² dα` by the trapezoidal rule on the grid.
pub fn w_mass(xi: f64, chi: &DirichletCharacter, grid: &ExpSumGrid) -> Result<f64> {
    if !(xi >= 1.0 / grid.x as f64 && xi <= 0.5) {
        return Err(Error::OutOfRange(format!("xi = {xi} outside [1/x, 1/2]")));
    }
    let i = grid.index_of(chi)?;
    let n = grid.n;
    let f: Vec<f64> = grid.w_values(i).iter().map(|w| w.norm_sqr()).collect();
    let at = |j: i64| f[j.rem_euclid(n as i64) as usize];
    let h = 1.0 / n as f64;
    let k = (xi * n as f64).floor() as i64;
    let mut acc = KahanSum::new();
    for j in -k..=k {
        acc.add(at(j));
    }
    acc.add(-0.5 * (at(k) + at(-k)));
    let mut total = acc.value() * h;
    let d = xi - k as f64 * h;
    if d > 0.0 {
        let frac = d / h;
        let right = at(k) + (at(k + 1) - at(k)) * frac;
        let left = at(-k) + (at(-k - 1) - at(-k)) * frac;
        total += d * (at(k) + right) / 2.0 + d * (at(-k) + left) / 2.0;
    }
    Ok(total)
}

/// `∫_x^{2x} |Σ_{t<n≤t+h} χ(n)Λ(n) − δ₀(χ)h|² dt`, integrated exactly over the
/// breakpoints `n` and `n − h` of the step function.
pub fn selberg_integral(x: f64, h: f64, chi: &DirichletCharacter, sieve: &SieveTable) -> Result<f64> {
    if !(h >= 2.0 && h <= x) {
        return Err(Error::OutOfRange(format!("h = {h} outside [2, x = {x}]")));
    }
    let top = (2.0 * x + h).floor() as u64;
    if top > sieve.limit() {
        return Err(Error::OutOfRange(format!(
            "2x + h = {} beyond sieve limit {}",
            2.0 * x + h,
            sieve.limit()
        )));
    }
    let table = chi.complex_table();
    let q = chi.modulus() as usize;
    let coeff = |n: u64| table[n as usize % q] * sieve.lambda_at(n);
    let shift = if chi.is_principal() { h } else { 0.0 };
    let end = 2.0 * x;
    let mut t = x;
    // window (t, t+h]
    let mut leave = t.floor() as u64 + 1;
    let mut enter = (t + h).floor() as u64 + 1;
    let mut window = ComplexKahanSum::new();
    for n in leave..enter {
        window.add(coeff(n));
    }
    let mut acc = KahanSum::new();
    while t < end {
        let t_leave = leave as f64;
        let t_enter = enter as f64 - h;
        let next = t_leave.min(t_enter).min(end);
        let v = window.value() - shift;
        acc.add(v.norm_sqr() * (next - t));
        t = next;
        if t >= end {
            break;
        }
        if t_leave <= t {
            window.add(-coeff(leave));
            leave += 1;
        }
        if t_enter <= t {
            window.add(coeff(enter));
            enter += 1;
        }
    }
    Ok(acc.value())
}

/// Midpoint-rule reference for [`selberg_integral`] with `steps` panels.
pub fn selberg_integral_midpoint(
    x: f64,
    h: f64,
    chi: &DirichletCharacter,
    sieve: &SieveTable,
    steps: usize,
) -> f64 {
    let table = chi.complex_table();
    let q = chi.modulus() as usize;
    let shift = if chi.is_principal() { h } else { 0.0 };
    let dt = x / steps as f64;
    (0..steps)
        .into_par_iter()
        .map(|k| {
            let t = x + (k as f64 + 0.5) * dt;
            let lo = t.floor() as u64 + 1;
            let hi = (t + h).floor() as u64;
            let s: Complex64 = (lo..=hi)
                .map(|n| table[n as usize % q] * sieve.lambda_at(n))
                .sum();
            (s - shift).norm_sqr() * dt
        })
        .sum()
}
