//! Zero-sum right-hand sides of the explicit formulas for `S(x; q, a, b)` and
//! the class sums of `G(n)`, the Landau–Gonek sum, the gamma ratio of pair
//! terms, and the residues of the associated Dirichlet series.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::{char_sum_closed_form, DirichletCharacter};
use crate::goldbach::ClassConvolution;
use crate::lfunc::{ZeroCatalog, ZeroSet};
use crate::numtheory::{euler_phi, factorize, gcd};
use crate::singular::{ratio_to_f64, singular_series};
use crate::special::ln_gamma;
use crate::sum::ComplexKahanSum;
use crate::{Error, Result};

/// `x^ρ` with `x^β e^{iγ log x}`.
fn x_pow(x: f64, rho: Complex64) -> Complex64 {
    let lx = x.ln();
    Complex64::from_polar((rho.re * lx).exp(), rho.im * lx)
}

/// `Σ_{|γ| ≤ T} x^{ρ+1} / (ρ(ρ+1))` and its tail allowance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HTerm {
    pub value: Complex64,
    /// `x² log(qT) / T`.
    pub tail_bound: f64,
}

pub fn h_term(x: f64, chi: &DirichletCharacter, zeros: &ZeroSet, t: f64) -> Result<HTerm> {
    zeros.require_height(t)?;
    let value = zeros
        .up_to(t)
        .map(|e| {
            let rho = e.rho();
            x_pow(x, rho) * x / (rho * (rho + 1.0)) * e.multiplicity as f64
        })
        .sum::<ComplexKahanSum>()
        .value();
    let q = chi.modulus() as f64;
    Ok(HTerm {
        value,
        tail_bound: x * x * (q * t).ln().max(1.0) / t,
    })
}

/// Main term and zero correction; the right-hand side is `main − correction`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rhs {
    pub main: f64,
    pub correction: Complex64,
}

impl Rhs {
    pub fn total(&self) -> Complex64 {
        Complex64::new(self.main, 0.0) - self.correction
    }
}

/// `x²/(2φ(q)²) − φ(q)⁻² Σ_χ (χ̄(a) + χ̄(b)) h(x, χ, T)`.
pub fn thm12_rhs(x: f64, a: i64, b: i64, zeros: &ZeroCatalog, t: f64) -> Result<Rhs> {
    zeros.require_height(t)?;
    let phi = euler_phi(zeros.modulus()) as f64;
    let mut acc = ComplexKahanSum::new();
    for (chi, set) in zeros.iter() {
        let w = chi.value_complex(a).conj() + chi.value_complex(b).conj();
        if w.norm() > 0.0 {
            acc.add(w * h_term(x, chi, set, t)?.value);
        }
    }
    Ok(Rhs {
        main: x * x / (2.0 * phi * phi),
        correction: acc.value() / (phi * phi),
    })
}

/// `𝔖_q(c) x²/2 − (2/φ(q)²) Σ_χ (Σ_{(a(c−a),q)=1} χ̄(a)) h(x, χ, T)`.
pub fn thm14_rhs(x: f64, c: i64, zeros: &ZeroCatalog, t: f64) -> Result<Rhs> {
    zeros.require_height(t)?;
    let q = zeros.modulus();
    let cu = c.rem_euclid(q as i64) as u64;
    let phi = euler_phi(q) as f64;
    let mut acc = ComplexKahanSum::new();
    for (chi, set) in zeros.iter() {
        let w = char_sum_closed_form(chi, cu).to_complex().conj();
        if w.norm() > 1e-12 {
            acc.add(w * h_term(x, chi, set, t)?.value);
        }
    }
    Ok(Rhs {
        main: ratio_to_f64(singular_series(q, c)) * x * x / 2.0,
        correction: acc.value() * 2.0 / (phi * phi),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ReportTarget {
    /// `S(x; q, a, b)`.
    Pair { a: u64, b: u64 },
    /// `Σ_{n ≤ x, n ≡ c (q)} G(n)`.
    Class { c: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitRow {
    pub x: f64,
    pub exact: f64,
    pub main: f64,
    pub zero_correction: f64,
    /// Imaginary part of the correction, zero up to rounding.
    pub correction_imag: f64,
    /// `exact − main + zero_correction`.
    pub residual: f64,
    /// `x²/T (log qx)²`.
    pub truncation_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitReport {
    pub q: u64,
    pub target: ReportTarget,
    pub height: f64,
    /// False when any zero set is uncertified or carries imported off-line zeros.
    pub certified: bool,
    pub rows: Vec<ExplicitRow>,
}

impl ExplicitReport {
    pub fn rms_residual(&self) -> f64 {
        rms(self.rows.iter().map(|r| r.residual))
    }

    /// RMS of `exact − main`, the comparison without zeros.
    pub fn rms_main_only(&self) -> f64 {
        rms(self.rows.iter().map(|r| r.exact - r.main))
    }

    /// Largest `|Im| / |Re|` of the zero correction relative to the main term.
    pub fn max_relative_imag(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.correction_imag.abs() / r.main.abs().max(r.exact.abs()).max(1.0))
            .fold(0.0, f64::max)
    }
}

fn rms(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v * v, n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

fn row(x: f64, q: u64, exact: f64, rhs: Rhs, t: f64) -> ExplicitRow {
    let lq = (q as f64 * x).ln().max(1.0);
    ExplicitRow {
        x,
        exact,
        main: rhs.main,
        zero_correction: rhs.correction.re,
        correction_imag: rhs.correction.im,
        residual: exact - rhs.main + rhs.correction.re,
        truncation_bound: x * x / t * lq * lq,
    }
}

fn catalog_trusted(zeros: &ZeroCatalog) -> bool {
    zeros.certified() && zeros.sets().iter().all(|s| s.observed_b() == 0.5)
}

/// Theorem-style comparison for `S(x; q, a, b)` over a grid of `x ≤ exact.x`.
pub fn thm12_report(
    grid: &[f64],
    exact: &ClassConvolution,
    zeros: &ZeroCatalog,
    t: f64,
) -> Result<ExplicitReport> {
    if exact.q != zeros.modulus() {
        return Err(Error::ModulusMismatch(exact.q, zeros.modulus()));
    }
    check_grid(grid, exact.x)?;
    let rows = grid
        .par_iter()
        .map(|&x| {
            let rhs = thm12_rhs(x, exact.a as i64, exact.b as i64, zeros, t)?;
            Ok(row(x, exact.q, exact.s(x), rhs, t))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExplicitReport {
        q: exact.q,
        target: ReportTarget::Pair {
            a: exact.a,
            b: exact.b,
        },
        height: t,
        certified: catalog_trusted(zeros),
        rows,
    })
}

/// Comparison for `Σ_{n ≤ x, n ≡ c (q)} G(n)` from a `G(n)` table.
pub fn thm14_report(
    grid: &[f64],
    goldbach: &[f64],
    c: i64,
    zeros: &ZeroCatalog,
    t: f64,
) -> Result<ExplicitReport> {
    let q = zeros.modulus();
    let limit = goldbach.len().saturating_sub(1) as u64;
    check_grid(grid, limit)?;
    let cu = c.rem_euclid(q as i64) as u64;
    let mut acc = crate::sum::KahanSum::new();
    let cumulative: Vec<f64> = goldbach
        .iter()
        .enumerate()
        .map(|(n, &g)| {
            if n as u64 % q == cu {
                acc.add(g);
            }
            acc.value()
        })
        .collect();
    let rows = grid
        .par_iter()
        .map(|&x| {
            let rhs = thm14_rhs(x, c, zeros, t)?;
            Ok(row(x, q, cumulative[x.floor() as usize], rhs, t))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExplicitReport {
        q,
        target: ReportTarget::Class { c: cu },
        height: t,
        certified: catalog_trusted(zeros),
        rows,
    })
}

fn check_grid(grid: &[f64], limit: u64) -> Result<()> {
    match grid.iter().find(|&&x| !(x >= 1.0 && x <= limit as f64)) {
        Some(x) => Err(Error::OutOfRange(format!("grid point {x} outside [1, {limit}]"))),
        None => Ok(()),
    }
}

/// `Λ(n)` for an integer argument, computed by factoring.
fn mangoldt(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let f = factorize(n);
    if f.factors.len() == 1 {
        (f.factors[0].0 as f64).ln()
    } else {
        0.0
    }
}

fn is_prime_power(n: u64) -> bool {
    n >= 2 && factorize(n).factors.len() == 1
}

/// Distance from `x` to the nearest prime power other than `x` itself.
pub fn prime_power_distance(x: f64) -> f64 {
    let base = x.floor().max(1.0) as u64;
    let mut best = f64::INFINITY;
    let mut up = base;
    loop {
        if is_prime_power(up) && up as f64 != x {
            best = best.min(up as f64 - x);
            break;
        }
        up += 1;
    }
    let mut down = base;
    while down >= 2 && (x - down as f64) < best {
        if is_prime_power(down) && down as f64 != x {
            best = best.min(x - down as f64);
            break;
        }
        down -= 1;
    }
    best.abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandauGonek {
    pub sum: Complex64,
    pub prediction: Complex64,
    /// The three error terms with unit constants.
    pub error_budget: f64,
}

/// `Σ_{|γ| ≤ T} x^ρ` against `−(T/π) χ(x) Λ(x)`.
pub fn landau_gonek(
    x: f64,
    chi: &DirichletCharacter,
    zeros: &ZeroSet,
    t: f64,
) -> Result<LandauGonek> {
    if !chi.is_primitive() {
        return Err(Error::NotPrimitive(chi.label()));
    }
    if x <= 1.0 {
        return Err(Error::InvalidArgument(format!("x = {x} must exceed 1")));
    }
    zeros.require_height(t)?;
    let sum = zeros
        .up_to(t)
        .map(|e| x_pow(x, e.rho()) * e.multiplicity as f64)
        .sum::<ComplexKahanSum>()
        .value();
    let prediction = if x == x.floor() {
        let n = x as u64;
        chi.value_complex(n as i64) * (-(t / std::f64::consts::PI) * mangoldt(n))
    } else {
        Complex64::new(0.0, 0.0)
    };
    let q = chi.modulus() as f64;
    let lx = x.ln();
    let budget = x * (2.0 * q * x * t).ln() * (3.0 * x).ln().ln()
        + lx * t.min(x / prime_power_distance(x))
        + (2.0 * q * t).ln() * t.min(1.0 / lx);
    Ok(LandauGonek {
        sum,
        prediction,
        error_budget: budget,
    })
}

/// `𝒵(ρ, ρ′) = Γ(ρ)Γ(ρ′) / Γ(1+ρ+ρ′)`.
pub fn z_gamma_ratio(rho: Complex64, rho_prime: Complex64) -> Result<Complex64> {
    let is_pole = |z: Complex64| z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round();
    if is_pole(rho) || is_pole(rho_prime) {
        return Err(Error::Pole("gamma in the numerator"));
    }
    let sum = rho + rho_prime + 1.0;
    if is_pole(sum) {
        return Err(Error::Pole("gamma in the denominator"));
    }
    Ok((ln_gamma(rho) + ln_gamma(rho_prime) - ln_gamma(sum)).exp())
}

/// Same with `ln Γ(ρ)`, `ln Γ(ρ′)` supplied.
pub fn z_gamma_ratio_cached(
    rho: Complex64,
    ln_gamma_rho: Complex64,
    rho_prime: Complex64,
    ln_gamma_rho_prime: Complex64,
) -> Complex64 {
    (ln_gamma_rho + ln_gamma_rho_prime - ln_gamma(rho + rho_prime + 1.0)).exp()
}

const ZERO_MATCH: f64 = 1e-8;

/// Characters whose zero set contains `ρ`, with the multiplicity.
fn vanishing(
    rho: Complex64,
    zeros: &ZeroCatalog,
) -> Vec<(&DirichletCharacter, u32)> {
    zeros
        .iter()
        .filter_map(|(chi, set)| {
            set.entries
                .iter()
                .find(|e| (e.gamma - rho.im).abs() < ZERO_MATCH && (e.beta - rho.re).abs() < ZERO_MATCH)
                .map(|e| (chi, e.multiplicity))
        })
        .collect()
}

/// Residue of `Σ G(n; q, a, b) n^{-s}` at `s = ρ + 1`.
pub fn residue_r(rho: Complex64, a: i64, b: i64, zeros: &ZeroCatalog) -> Result<Complex64> {
    let hits = vanishing(rho, zeros);
    if hits.is_empty() {
        return Err(Error::NotAZero(rho.to_string()));
    }
    let phi = euler_phi(zeros.modulus()) as f64;
    let s: Complex64 = hits
        .iter()
        .map(|(chi, m)| (chi.value_complex(a).conj() + chi.value_complex(b).conj()) * *m as f64)
        .sum();
    Ok(-s / (rho * phi * phi))
}

/// Residue of `Σ_{n ≡ c (q)} G(n) n^{-s}` at `s = ρ + 1`.
pub fn residue_r1(rho: Complex64, c: i64, zeros: &ZeroCatalog) -> Result<Complex64> {
    let hits = vanishing(rho, zeros);
    if hits.is_empty() {
        return Err(Error::NotAZero(rho.to_string()));
    }
    let q = zeros.modulus();
    let cu = c.rem_euclid(q as i64) as u64;
    let phi = euler_phi(q) as f64;
    let s: Complex64 = hits
        .iter()
        .map(|(chi, m)| char_sum_closed_form(chi, cu).to_complex().conj() * *m as f64)
        .sum();
    Ok(-2.0 * s / (rho * phi * phi))
}

/// Whether `(ab, q) = 1`.
pub fn coprime_pair(q: u64, a: i64, b: i64) -> bool {
    let a = a.rem_euclid(q as i64) as u64;
    let b = b.rem_euclid(q as i64) as u64;
    q == 1 || gcd(a * b, q) == 1
}
