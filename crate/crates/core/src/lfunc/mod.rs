//! Dirichlet L-functions: evaluation, completed functions, zero sets and the
//! truncated explicit formula for `ψ(u, χ)`.

pub mod hurwitz;
mod zerofile;
mod zeros;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characters::{build_group, CharacterGroup, DirichletCharacter};
use crate::numtheory::SieveTable;
use crate::special::ln_gamma;
use crate::sum::ComplexKahanSum;
use crate::{Error, Result};

pub use hurwitz::hurwitz_zeta;
pub use zerofile::{
    certify, check_conjugate_pair, export_zeros, format_zeros, import_from_str, import_zeros,
    parse_zeros, ImportMode, ParsedZeros,
};
pub use zeros::{
    find_group_zeros, find_zeros, zero_count_argument, ZeroFinder, MAX_ZERO_HEIGHT, MAX_ZERO_MODULUS,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroSource {
    Computed,
    Imported,
}

/// A non-trivial zero `β + iγ` with multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroEntry {
    pub beta: f64,
    pub gamma: f64,
    pub multiplicity: u32,
    pub source: ZeroSource,
}

impl ZeroEntry {
    pub fn computed(gamma: f64) -> Self {
        Self {
            beta: 0.5,
            gamma,
            multiplicity: 1,
            source: ZeroSource::Computed,
        }
    }

    pub fn rho(&self) -> Complex64 {
        Complex64::new(self.beta, self.gamma)
    }
}

/// Zeros of one `L(s, χ)` with `|γ| ≤ height`, sorted by `γ`, both signs listed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub label: String,
    pub modulus: u64,
    pub height: f64,
    pub entries: Vec<ZeroEntry>,
    pub certified: bool,
}

impl ZeroSet {
    /// Largest real part among the entries (`1/2` for an empty set).
    pub fn observed_b(&self) -> f64 {
        self.entries.iter().map(|e| e.beta).fold(0.5, f64::max)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries with `|γ| ≤ t`.
    pub fn up_to(&self, t: f64) -> impl Iterator<Item = &ZeroEntry> + '_ {
        self.entries.iter().filter(move |e| e.gamma.abs() <= t)
    }

    /// Zeros with `|γ| ≤ t` counted with multiplicity.
    pub fn count_up_to(&self, t: f64) -> u64 {
        self.up_to(t).map(|e| e.multiplicity as u64).sum()
    }

    /// The set `γ ↦ −γ`, i.e. the zeros of the conjugate character.
    pub fn conjugated(&self, label: impl Into<String>) -> Self {
        let mut entries: Vec<ZeroEntry> = self
            .entries
            .iter()
            .map(|e| ZeroEntry {
                gamma: -e.gamma,
                ..*e
            })
            .collect();
        entries.reverse();
        Self {
            label: label.into(),
            entries,
            ..self.clone()
        }
    }

    pub fn require_height(&self, t: f64) -> Result<()> {
        if t > self.height {
            return Err(Error::InsufficientZeros {
                label: self.label.clone(),
                available: self.height,
                requested: t,
            });
        }
        Ok(())
    }

    /// Errors on any entry off the critical line.
    pub fn require_on_line(&self) -> Result<()> {
        match self.entries.iter().find(|e| e.beta != 0.5) {
            Some(e) => Err(Error::ExceptionalZero {
                label: self.label.clone(),
                beta: e.beta,
            }),
            None => Ok(()),
        }
    }
}

/// Zero sets for every character of one modulus, in group order.
#[derive(Clone, Debug)]
pub struct ZeroCatalog {
    group: CharacterGroup,
    sets: Vec<ZeroSet>,
}

impl ZeroCatalog {
    /// Computes and certifies zeros for every character mod `q`.
    pub fn compute(q: u64, height: f64) -> Result<Self> {
        let group = build_group(q)?;
        let sets = find_group_zeros(&group, height)?;
        Ok(Self { group, sets })
    }

    /// Assembles a catalog from existing sets, matched by label.
    pub fn from_sets(group: CharacterGroup, sets: Vec<ZeroSet>) -> Result<Self> {
        let ordered = group
            .iter()
            .map(|chi| {
                let label = chi.label();
                sets.iter()
                    .find(|s| s.label == label)
                    .cloned()
                    .ok_or(Error::MissingZeroSet(label))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            group,
            sets: ordered,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus()
    }

    pub fn group(&self) -> &CharacterGroup {
        &self.group
    }

    pub fn sets(&self) -> &[ZeroSet] {
        &self.sets
    }

    /// `(χ, zeros of L(s, χ))` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (&DirichletCharacter, &ZeroSet)> + '_ {
        self.group.iter().zip(&self.sets)
    }

    pub fn set_for(&self, chi: &DirichletCharacter) -> Result<&ZeroSet> {
        let label = chi.label();
        self.sets
            .iter()
            .find(|s| s.label == label)
            .ok_or(Error::MissingZeroSet(label))
    }

    pub fn certified(&self) -> bool {
        self.sets.iter().all(|s| s.certified)
    }

    /// Common height reached by every set.
    pub fn height(&self) -> f64 {
        self.sets.iter().map(|s| s.height).fold(f64::INFINITY, f64::min)
    }

    pub fn require_height(&self, t: f64) -> Result<()> {
        self.sets.iter().try_for_each(|s| s.require_height(t))
    }
}

/// `L(s, χ) = q^{-s} Σ_{a ≤ q} χ(a) ζ(s, a/q)` for any character.
pub fn l_value(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    if chi.is_principal() && s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("principal L-function at s = 1"));
    }
    if s.im.abs() > hurwitz::MAX_HEIGHT {
        return Err(Error::OutOfRange(format!("|Im s| = {}", s.im.abs())));
    }
    Ok(l_series(s, chi.modulus(), &chi.complex_table()))
}

/// Hurwitz-sum evaluation for a value table of period `q`.
pub(crate) fn l_series(s: Complex64, q: u64, table: &[Complex64]) -> Complex64 {
    let n = hurwitz::direct_terms(s.im);
    let qf = q as f64;
    let mut acc = ComplexKahanSum::new();
    for a in 1..=q {
        let v = table[(a % q) as usize];
        if v != Complex64::new(0.0, 0.0) {
            acc.add(v * hurwitz::hurwitz_unchecked(s, a as f64 / qf, n));
        }
    }
    acc.value() * (-s * qf.ln()).exp()
}

/// `ε(χ) = τ(χ) / (i^κ √q)` for primitive `χ`.
pub fn root_number(chi: &DirichletCharacter) -> Result<Complex64> {
    let tau = chi.gauss_sum()?;
    let ik = if chi.parity() == 1 {
        Complex64::new(0.0, 1.0)
    } else {
        Complex64::new(1.0, 0.0)
    };
    Ok(tau / (ik * (chi.modulus() as f64).sqrt()))
}

/// Precomputed data for evaluating `L(s, χ*)` and its completion.
#[derive(Clone, Debug)]
pub struct LFunction {
    primitive: DirichletCharacter,
    table: Vec<Complex64>,
    kappa: f64,
    log_q_over_pi: f64,
    epsilon: Complex64,
    half_phase: f64,
}

impl LFunction {
    /// The L-function of the primitive character inducing `chi`.
    pub fn new(chi: &DirichletCharacter) -> Self {
        let primitive = chi.induce_primitive();
        let epsilon = root_number(&primitive).expect("induced character is primitive");
        Self {
            table: primitive.complex_table(),
            kappa: primitive.parity() as f64,
            log_q_over_pi: (primitive.modulus() as f64 / PI).ln(),
            half_phase: epsilon.arg() / 2.0,
            epsilon,
            primitive,
        }
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.primitive
    }

    pub fn conductor(&self) -> u64 {
        self.primitive.modulus()
    }

    pub fn epsilon(&self) -> Complex64 {
        self.epsilon
    }

    pub fn has_poles(&self) -> bool {
        self.primitive.modulus() == 1
    }

    pub fn l(&self, s: Complex64) -> Complex64 {
        l_series(s, self.primitive.modulus(), &self.table)
    }

    /// `ln[(q/π)^{(s+κ)/2} Γ((s+κ)/2)]`, imaginary part defined modulo `2π`.
    pub fn ln_gamma_factor(&self, s: Complex64) -> Complex64 {
        let z = (s + self.kappa) / 2.0;
        z * self.log_q_over_pi + ln_gamma(z)
    }

    /// `ln Λ(s, χ*)`, imaginary part modulo `2π`.
    pub fn ln_completed(&self, s: Complex64) -> Complex64 {
        self.ln_gamma_factor(s) + self.l(s).ln()
    }

    pub fn completed(&self, s: Complex64) -> Complex64 {
        self.ln_gamma_factor(s).exp() * self.l(s)
    }

    /// `Λ(s)/|gamma factor|`: same phase as `Λ`, modulus `|L|`.
    pub fn completed_unit(&self, s: Complex64) -> Complex64 {
        let g = self.ln_gamma_factor(s);
        Complex64::from_polar(1.0, g.im) * self.l(s)
    }

    /// `ε^{-1/2} e^{iθ(t)} L(1/2 + it)`; real up to rounding.
    pub fn rotated(&self, t: f64) -> Complex64 {
        let s = Complex64::new(0.5, t);
        let theta = self.ln_gamma_factor(s).im - self.half_phase;
        Complex64::from_polar(1.0, theta) * self.l(s)
    }

    /// The real function whose sign changes locate zeros on the line.
    pub fn hardy_z(&self, t: f64) -> f64 {
        self.rotated(t).re
    }
}

/// `Λ(s, χ)` for primitive `χ`.
pub fn completed_lambda(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    if !chi.is_primitive() {
        return Err(Error::NotPrimitive(chi.label()));
    }
    let lf = LFunction::new(chi);
    if lf.has_poles() && (s == Complex64::new(1.0, 0.0) || s == Complex64::new(0.0, 0.0)) {
        return Err(Error::Pole("completed zeta"));
    }
    Ok(lf.completed(s))
}

/// `ψ(u, χ) = Σ_{n ≤ u} χ(n) Λ(n)`.
pub fn psi_chi(u: f64, chi: &DirichletCharacter, sieve: &SieveTable) -> Result<Complex64> {
    if u > sieve.limit() as f64 {
        return Err(Error::OutOfRange(format!(
            "u = {u} beyond sieve limit {}",
            sieve.limit()
        )));
    }
    if u < 1.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let table = chi.complex_table();
    let q = chi.modulus() as usize;
    let top = u.floor() as usize;
    let mut acc = ComplexKahanSum::new();
    for (n, &v) in sieve.lambda()[..=top].iter().enumerate() {
        if v != 0.0 {
            acc.add(table[n % q] * v);
        }
    }
    Ok(acc.value())
}

/// `δ₀(χ) u − Σ_{|γ| ≤ T} u^ρ / ρ`, the constant term omitted.
pub fn psi_explicit(
    u: f64,
    chi: &DirichletCharacter,
    zeros: &ZeroSet,
    t: f64,
) -> Result<Complex64> {
    zeros.require_height(t)?;
    let main = if chi.is_principal() { u } else { 0.0 };
    let ln_u = u.ln();
    let zero_sum: Complex64 = zeros
        .up_to(t)
        .map(|e| {
            let rho = e.rho();
            (rho * ln_u).exp() / rho * e.multiplicity as f64
        })
        .sum::<ComplexKahanSum>()
        .value();
    Ok(Complex64::new(main, 0.0) - zero_sum)
}

/// Measured `E(u, T, χ) = ψ(u, χ) − psi_explicit(u, χ, T)`.
pub fn explicit_error(
    u: f64,
    chi: &DirichletCharacter,
    sieve: &SieveTable,
    zeros: &ZeroSet,
    t: f64,
) -> Result<Complex64> {
    Ok(psi_chi(u, chi, sieve)? - psi_explicit(u, chi, zeros, t)?)
}
