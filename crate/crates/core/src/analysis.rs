//! Residual measurement on geometric grids and least-squares exponent fits.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::DirichletCharacter;
use crate::explicit::{thm12_report, thm14_report};
use crate::goldbach::{build_class_convolution, goldbach_table};
use crate::lfunc::{ZeroCatalog, ZeroSet};
use crate::numtheory::{euler_phi, SieveTable};
use crate::sum::KahanSum;
use crate::{Error, Result};

/// Samples with `|Δ|` below this are left out of fits.
pub const FIT_FLOOR: f64 = 1e-9;
pub const MIN_FIT_SAMPLES: usize = 8;
pub const DEFAULT_GRID_POINTS: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    pub intercept: f64,
    /// RMS of the fit in `log|Δ|`.
    pub rms: f64,
    pub samples: usize,
    pub x_min: f64,
    pub x_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BStarParams {
    pub c1: f64,
    pub epsilon: f64,
}

impl Default for BStarParams {
    fn default() -> Self {
        Self {
            c1: 1.0,
            epsilon: 1.0 / 7.0,
        }
    }
}

impl BStarParams {
    pub fn new(c1: f64, epsilon: f64) -> Result<Self> {
        if !(c1 > 0.0) || !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "c1 = {c1} must be positive and epsilon = {epsilon} in (0, 1)"
            )));
        }
        Ok(Self { c1, epsilon })
    }
}

/// `points` values spaced evenly in `log x` from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || points < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid needs 0 < lo < hi and at least 2 points, got [{lo}, {hi}] with {points}"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect();
    grid[0] = lo;
    grid[points - 1] = hi;
    Ok(grid)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidualMode {
    /// `S(x; q, a, b) − x²/(2φ(q)²)`.
    Thm11,
    /// `S(x; q, a, b)` minus the zero-corrected right-hand side.
    Thm12,
    /// `Σ_{n ≤ x, n ≡ c} G(n)` minus its zero-corrected right-hand side.
    Thm14,
}

impl std::str::FromStr for ResidualMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thm11" => Ok(Self::Thm11),
            "thm12" => Ok(Self::Thm12),
            "thm14" => Ok(Self::Thm14),
            _ => Err(Error::InvalidArgument(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualParams {
    pub mode: ResidualMode,
    pub q: u64,
    pub a: u64,
    pub b: u64,
    /// Residue class for [`ResidualMode::Thm14`].
    pub c: u64,
    pub height: f64,
}

/// `(x, Δ(x))` over `grid`; zeros are required for the zero-corrected modes.
pub fn residual_grid(
    params: &ResidualParams,
    grid: &[f64],
    sieve: &SieveTable,
    zeros: Option<&ZeroCatalog>,
) -> Result<Vec<(f64, f64)>> {
    let x_max = grid.iter().fold(0.0f64, |m, &x| m.max(x)).floor() as u64;
    let need_zeros = || {
        zeros
            .filter(|z| z.modulus() == params.q)
            .ok_or_else(|| Error::MissingZeroSet(format!("zero catalog for q = {}", params.q)))
    };
    match params.mode {
        ResidualMode::Thm11 => {
            let conv = build_class_convolution(params.q, params.a as i64, params.b as i64, x_max, sieve)?;
            let phi = euler_phi(params.q) as f64;
            Ok(grid
                .par_iter()
                .map(|&x| (x, conv.s(x) - x * x / (2.0 * phi * phi)))
                .collect())
        }
        ResidualMode::Thm12 => {
            let conv = build_class_convolution(params.q, params.a as i64, params.b as i64, x_max, sieve)?;
            let report = thm12_report(grid, &conv, need_zeros()?, params.height)?;
            Ok(report.rows.iter().map(|r| (r.x, r.residual)).collect())
        }
        ResidualMode::Thm14 => {
            let table = goldbach_table(x_max, sieve)?;
            let report = thm14_report(grid, &table, params.c as i64, need_zeros()?, params.height)?;
            Ok(report.rows.iter().map(|r| (r.x, r.residual)).collect())
        }
    }
}

pub fn rms_of(residuals: &[(f64, f64)]) -> f64 {
    if residuals.is_empty() {
        return 0.0;
    }
    let s = residuals.iter().map(|(_, d)| d * d).sum::<KahanSum>().value();
    (s / residuals.len() as f64).sqrt()
}

/// Least-squares slope of `log|Δ|` against `log x`.
pub fn fit_exponent(residuals: &[(f64, f64)]) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> = residuals
        .iter()
        .filter(|(x, d)| *x > 0.0 && d.abs() >= FIT_FLOOR && d.is_finite())
        .map(|(x, d)| (x.ln(), d.abs().ln()))
        .collect();
    let x_min = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min).exp();
    let x_max = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max).exp();
    if pts.len() < MIN_FIT_SAMPLES || !(x_max / x_min >= 100.0 * (1.0 - 1e-12)) {
        return Err(Error::DegenerateSpread(format!(
            "{} usable samples over [{x_min}, {x_max}]",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let rms = (pts
        .iter()
        .map(|p| (p.1 - intercept - exponent * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(FitResult {
        exponent,
        intercept,
        rms,
        samples: pts.len(),
        x_min,
        x_max,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BStar {
    pub value: f64,
    pub eta: f64,
    /// The zero-free-region branch `1 − η` is below the observed exponent.
    pub region_limited: bool,
    /// `1 − η ≤ 0`, so the bound carries no power saving.
    pub degenerate: bool,
}

/// `min(B, 1 − c₁/min(q^ε, (log x)^{4/5}))`.
pub fn b_star(observed_b: f64, q: u64, x: f64, params: &BStarParams) -> BStar {
    let denom = (q as f64).powf(params.epsilon).min(x.ln().max(0.0).powf(0.8));
    let eta = if denom > 0.0 { params.c1 / denom } else { f64::INFINITY };
    let branch = 1.0 - eta;
    BStar {
        value: observed_b.min(branch),
        eta,
        region_limited: branch < observed_b,
        degenerate: branch <= 0.0,
    }
}

/// Measured zero sums divided by their bound shapes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroSumDiagnostics {
    pub height: f64,
    pub y: f64,
    /// `Σ_{|γ| ≤ T} 1/|ρ|`.
    pub inv_rho: f64,
    /// `inv_rho / (log 2qT)²`.
    pub inv_rho_constant: f64,
    /// `Σ_{|γ| > T} 1/|ρ|²`, measured to the set height plus the density tail beyond it.
    pub tail_inv_rho2: f64,
    /// `tail_inv_rho2 · T / log 2qT`.
    pub tail_constant: f64,
    /// `Σ_{|γ| ≤ T} 1/(1 + |γ − y|)`.
    pub offdiagonal: f64,
    /// `offdiagonal / (log 2q(T + |y|))²`.
    pub offdiagonal_constant: f64,
    /// Largest count of zeros in a unit window inside `[−T, T]`.
    pub max_window_count: u64,
    /// Largest window count over `log(q(|t| + 2))`.
    pub window_constant: f64,
}

pub fn zero_sum_diagnostics(
    chi: &DirichletCharacter,
    zeros: &ZeroSet,
    t: f64,
    y: f64,
) -> Result<ZeroSumDiagnostics> {
    zeros.require_height(t.max(y.abs() + 1.0))?;
    let q = chi.modulus() as f64;
    let log2qt = (2.0 * q * t).ln();
    let inside: Vec<_> = zeros.up_to(t).collect();
    let inv_rho = inside
        .iter()
        .map(|e| e.multiplicity as f64 / e.rho().norm())
        .sum::<KahanSum>()
        .value();
    let offdiagonal = inside
        .iter()
        .map(|e| e.multiplicity as f64 / (1.0 + (e.gamma - y).abs()))
        .sum::<KahanSum>()
        .value();
    let h = zeros.height;
    let measured_tail = zeros
        .entries
        .iter()
        .filter(|e| e.gamma.abs() > t && e.gamma.abs() <= h)
        .map(|e| e.multiplicity as f64 / e.rho().norm_sqr())
        .sum::<KahanSum>()
        .value();
    let conductor = chi.conductor() as f64;
    let beyond = (((conductor * h) / (2.0 * std::f64::consts::PI)).ln() + 1.0) / (std::f64::consts::PI * h);
    let tail_inv_rho2 = measured_tail + beyond.max(0.0);
    let mut gammas: Vec<(f64, u32)> = inside.iter().map(|e| (e.gamma, e.multiplicity)).collect();
    gammas.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut max_window_count = 0u64;
    let mut window_constant = 0.0f64;
    let mut hi = 0;
    let mut in_window = 0u64;
    for lo in 0..gammas.len() {
        while hi < gammas.len() && gammas[hi].0 <= gammas[lo].0 + 1.0 {
            in_window += gammas[hi].1 as u64;
            hi += 1;
        }
        max_window_count = max_window_count.max(in_window);
        let shape = (q * (gammas[lo].0.abs() + 2.0)).ln();
        window_constant = window_constant.max(in_window as f64 / shape);
        in_window -= gammas[lo].1 as u64;
    }
    let off_shape = (2.0 * q * (t + y.abs())).ln();
    Ok(ZeroSumDiagnostics {
        height: t,
        y,
        inv_rho,
        inv_rho_constant: inv_rho / (log2qt * log2qt),
        tail_inv_rho2,
        tail_constant: tail_inv_rho2 * t / log2qt,
        offdiagonal,
        offdiagonal_constant: offdiagonal / (off_shape * off_shape),
        max_window_count,
        window_constant,
    })
}
