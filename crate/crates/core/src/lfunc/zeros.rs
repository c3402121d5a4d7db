//! Locating zeros on the critical line and counting them by the argument
//! principle.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use super::{LFunction, ZeroEntry, ZeroSet};
use crate::characters::{CharacterGroup, DirichletCharacter};
use crate::{Error, Result};

pub const MAX_ZERO_MODULUS: u64 = 100;
pub const MAX_ZERO_HEIGHT: f64 = 1000.0;

/// Zero-finding parameters.
#[derive(Clone, Debug)]
pub struct ZeroFinder {
    /// Scan step as a fraction of the mean zero spacing.
    pub step_fraction: f64,
    /// Times the step is halved before giving up on certification.
    pub max_refinements: u32,
    /// Width of the independent scan windows.
    pub window: f64,
    /// Zeros closer than this to `±T` make the count unreliable.
    pub contour_margin: f64,
}

impl Default for ZeroFinder {
    fn default() -> Self {
        Self {
            step_fraction: 0.1,
            max_refinements: 3,
            window: 16.0,
            contour_margin: 1e-6,
        }
    }
}

fn wrap(d: f64) -> f64 {
    let r = d.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

fn mean_spacing(q: u64, t: f64) -> f64 {
    TAU / ((q as f64) * (t.abs() + 10.0) / TAU).ln().max(1.0)
}

fn check_envelope(chi: &DirichletCharacter, height: f64) -> Result<()> {
    if chi.modulus() > MAX_ZERO_MODULUS {
        return Err(Error::Capacity {
            what: "zero-finding modulus",
            value: chi.modulus(),
            limit: MAX_ZERO_MODULUS,
        });
    }
    if !(height > 0.0 && height <= MAX_ZERO_HEIGHT) {
        return Err(Error::OutOfRange(format!(
            "height {height} outside (0, {MAX_ZERO_HEIGHT}]"
        )));
    }
    Ok(())
}

struct Scan {
    zeros: Vec<f64>,
    /// Sample points where `|Z|` dips without changing sign.
    dips: Vec<(f64, f64)>,
}

fn bisect(lf: &LFunction, mut a: f64, mut b: f64, mut za: f64) -> f64 {
    loop {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            return m;
        }
        let zm = lf.hardy_z(m);
        if zm == 0.0 {
            return m;
        }
        if (zm < 0.0) == (za < 0.0) {
            a = m;
            za = zm;
        } else {
            b = m;
        }
    }
}

fn scan_window(lf: &LFunction, a: f64, b: f64, fraction: f64) -> Scan {
    let q = lf.conductor();
    let mut ts = vec![a];
    let mut t = a;
    while t < b {
        t = (t + fraction * mean_spacing(q, t)).min(b);
        ts.push(t);
    }
    let zs: Vec<f64> = ts.iter().map(|&t| lf.hardy_z(t)).collect();
    let mut zeros = Vec::new();
    let mut dips = Vec::new();
    for j in 0..ts.len() - 1 {
        if zs[j + 1] == 0.0 {
            zeros.push(ts[j + 1]);
        } else if zs[j] * zs[j + 1] < 0.0 {
            zeros.push(bisect(lf, ts[j], ts[j + 1], zs[j]));
        }
        if j > 0
            && zs[j - 1] * zs[j] > 0.0
            && zs[j] * zs[j + 1] > 0.0
            && zs[j].abs() < zs[j - 1].abs()
            && zs[j].abs() < zs[j + 1].abs()
        {
            dips.push((ts[j], zs[j].abs()));
        }
    }
    Scan { zeros, dips }
}

impl ZeroFinder {
    fn scan(&self, lf: &LFunction, lo: f64, hi: f64, fraction: f64) -> Scan {
        let n = ((hi - lo) / self.window).ceil().max(1.0) as usize;
        let width = (hi - lo) / n as f64;
        let parts: Vec<Scan> = (0..n)
            .into_par_iter()
            .map(|i| {
                let a = lo + width * i as f64;
                let b = if i + 1 == n { hi } else { lo + width * (i + 1) as f64 };
                scan_window(lf, a, b, fraction)
            })
            .collect();
        let mut zeros = Vec::new();
        let mut dips = Vec::new();
        for p in parts {
            zeros.extend(p.zeros);
            dips.extend(p.dips);
        }
        Scan { zeros, dips }
    }

    /// Zeros of `L(s, χ*)` with `|γ| ≤ height`, certified against the
    /// argument-principle count.
    pub fn find(&self, chi: &DirichletCharacter, height: f64) -> Result<ZeroSet> {
        check_envelope(chi, height)?;
        let lf = LFunction::new(chi);
        let label = chi.label();
        let argument = count_with(&lf, height, &label, self.contour_margin)?;
        let real = lf.character().is_real();
        let lo = if real { 0.0 } else { -height };
        let mut fraction = self.step_fraction;
        let mut last = None;
        for _ in 0..=self.max_refinements {
            let scan = self.scan(&lf, lo, height, fraction);
            let mut gammas = scan.zeros.clone();
            if real {
                gammas.extend(scan.zeros.iter().filter(|&&g| g > 0.0).map(|g| -g));
            }
            gammas.sort_by(f64::total_cmp);
            let set = ZeroSet {
                label: label.clone(),
                modulus: chi.modulus(),
                height,
                entries: gammas.iter().map(|&g| ZeroEntry::computed(g)).collect(),
                certified: gammas.len() as u64 == argument,
            };
            if set.certified {
                return Ok(set);
            }
            last = Some((set, scan.dips));
            fraction *= 0.5;
        }
        let (mut set, dips) = last.expect("at least one scan");
        let found = set.entries.len() as u64;
        if found < argument && !set.entries.is_empty() {
            let target = dips
                .iter()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map_or(set.entries[0].gamma, |d| d.0);
            let nearest = set
                .entries
                .iter_mut()
                .min_by(|a, b| (a.gamma - target).abs().total_cmp(&(b.gamma - target).abs()))
                .expect("non-empty");
            nearest.multiplicity += (argument - found) as u32;
        }
        Err(Error::CertificationFailure {
            label,
            argument_count: argument,
            sign_changes: found,
            partial: Box::new(set),
        })
    }

    /// `N(T, χ)` by the argument principle.
    pub fn count(&self, chi: &DirichletCharacter, height: f64) -> Result<u64> {
        check_envelope(chi, height)?;
        count_with(&LFunction::new(chi), height, &chi.label(), self.contour_margin)
    }
}

/// Phase change of `Λ` along the segment `[a, b]`, subdividing until each
/// piece moves the phase by well under `π`.
fn phase_change(lf: &LFunction, a: Complex64, b: Complex64, pa: f64, pb: f64, depth: u32) -> Option<f64> {
    let m = (a + b) * 0.5;
    let pm = lf.ln_completed(m).im;
    let d1 = wrap(pm - pa);
    let d2 = wrap(pb - pm);
    let d = wrap(pb - pa);
    if d1.abs() < 0.5 && d2.abs() < 0.5 && (d1 + d2 - d).abs() < 1e-9 {
        return Some(d1 + d2);
    }
    if depth == 0 {
        return None;
    }
    Some(phase_change(lf, a, m, pa, pm, depth - 1)? + phase_change(lf, m, b, pm, pb, depth - 1)?)
}

fn edge_change(lf: &LFunction, a: Complex64, b: Complex64, pieces: usize) -> Option<f64> {
    let points: Vec<Complex64> = (0..=pieces)
        .map(|i| a + (b - a) * (i as f64 / pieces as f64))
        .collect();
    let phases: Vec<f64> = points.par_iter().map(|&s| lf.ln_completed(s).im).collect();
    (0..pieces)
        .into_par_iter()
        .map(|i| phase_change(lf, points[i], points[i + 1], phases[i], phases[i + 1], 40))
        .sum()
}

fn count_with(lf: &LFunction, height: f64, label: &str, margin: f64) -> Result<u64> {
    let too_close = || Error::ContourTooClose {
        label: label.to_string(),
        height,
    };
    for t in [height, -height] {
        if lf.hardy_z(t - margin) * lf.hardy_z(t + margin) <= 0.0 {
            return Err(too_close());
        }
    }
    let q = lf.conductor();
    let step = 0.2 * mean_spacing(q, height);
    let vertical = ((2.0 * height) / step).ceil() as usize;
    let horizontal = (2.0 / step).ceil().max(8.0) as usize;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let corners = [c(1.5, -height), c(1.5, height), c(-0.5, height), c(-0.5, -height)];
    let mut total = 0.0;
    for k in 0..4 {
        let pieces = if k % 2 == 0 { vertical } else { horizontal };
        total += edge_change(lf, corners[k], corners[(k + 1) % 4], pieces).ok_or_else(too_close)?;
    }
    let winding = total / TAU;
    let rounded = winding.round();
    if (winding - rounded).abs() > 0.05 {
        return Err(too_close());
    }
    let poles = if lf.has_poles() { 2.0 } else { 0.0 };
    Ok((rounded + poles).max(0.0) as u64)
}

/// [`ZeroFinder::find`] with default parameters.
pub fn find_zeros(chi: &DirichletCharacter, height: f64) -> Result<ZeroSet> {
    ZeroFinder::default().find(chi, height)
}

/// [`ZeroFinder::count`] with default parameters.
pub fn zero_count_argument(chi: &DirichletCharacter, height: f64) -> Result<u64> {
    ZeroFinder::default().count(chi, height)
}

/// Zero sets for every character of `group`, in group order. Characters
/// induced by the same primitive character share one computation, and each
/// conjugate pair is computed once.
pub fn find_group_zeros(group: &CharacterGroup, height: f64) -> Result<Vec<ZeroSet>> {
    let finder = ZeroFinder::default();
    let mut reps: Vec<DirichletCharacter> = Vec::new();
    let mut key_of = Vec::with_capacity(group.len());
    let mut index: HashMap<String, (usize, bool)> = HashMap::new();
    for chi in group.iter() {
        let star = chi.induce_primitive();
        let key = star.label();
        let entry = match index.get(&key) {
            Some(&e) => e,
            None => {
                let conj_key = star.conj().label();
                match index.get(&conj_key) {
                    Some(&(i, _)) => {
                        index.insert(key, (i, true));
                        (i, true)
                    }
                    None => {
                        reps.push(star);
                        let e = (reps.len() - 1, false);
                        index.insert(key, e);
                        e
                    }
                }
            }
        };
        key_of.push(entry);
    }
    let sets: Vec<ZeroSet> = reps
        .par_iter()
        .map(|star| finder.find(star, height))
        .collect::<Result<_>>()?;
    Ok(group
        .iter()
        .zip(key_of)
        .map(|(chi, (i, conj))| {
            let base = &sets[i];
            let mut set = if conj {
                base.conjugated(chi.label())
            } else {
                ZeroSet {
                    label: chi.label(),
                    ..base.clone()
                }
            };
            set.modulus = chi.modulus();
            set
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::build_group;

    #[test]
    fn first_zeta_zero() {
        let g1 = build_group(1).unwrap();
        let set = find_zeros(g1.principal(), 15.0).unwrap();
        assert!(set.certified);
        assert_eq!(set.len(), 2);
        assert!((set.entries[1].gamma - 14.134_725_141_734_693).abs() < 1e-9);
        assert_eq!(set.entries[0].gamma, -set.entries[1].gamma);
        assert_eq!(set.observed_b(), 0.5);
    }

    #[test]
    fn zeta_counts() {
        let p = build_group(1).unwrap().principal().clone();
        assert_eq!(zero_count_argument(&p, 10.0).unwrap(), 0);
        assert_eq!(zero_count_argument(&p, 15.0).unwrap(), 2);
        // 29 zeros with 0 < γ < 100
        let set = find_zeros(&p, 100.0).unwrap();
        assert_eq!(set.len(), 58);
        assert_eq!(zero_count_argument(&p, 100.0).unwrap(), 58);
    }

    #[test]
    fn mod_four_first_zero() {
        let g4 = build_group(4).unwrap();
        let set = find_zeros(&g4.characters()[1], 7.0).unwrap();
        assert!(set.certified);
        assert_eq!(set.len(), 2);
        assert!((set.entries[1].gamma - 6.020_948_904_697_597).abs() < 1e-8);
    }

    #[test]
    fn conjugate_sets_mirror() {
        let g5 = build_group(5).unwrap();
        let sets = find_group_zeros(&g5, 30.0).unwrap();
        assert_eq!(sets.len(), 4);
        for (chi, set) in g5.iter().zip(&sets) {
            assert!(set.certified);
            assert_eq!(set.label, chi.label());
            let bar = chi.conj();
            let j = g5.iter().position(|c| *c == bar).unwrap();
            let mirrored: Vec<f64> = sets[j].entries.iter().rev().map(|e| -e.gamma).collect();
            let own: Vec<f64> = set.entries.iter().map(|e| e.gamma).collect();
            assert_eq!(own, mirrored);
        }
        // an independent computation of the conjugate agrees to the bisection precision
        let complex = g5.iter().find(|c| c.order() == 4).unwrap();
        let a = find_zeros(complex, 30.0).unwrap();
        let b = find_zeros(&complex.conj(), 30.0).unwrap();
        for (x, y) in a.entries.iter().zip(b.entries.iter().rev()) {
            assert!((x.gamma + y.gamma).abs() < 1e-9);
        }
    }

    #[test]
    fn imprimitive_uses_inducing_character() {
        let g12 = build_group(12).unwrap();
        let from3 = g12.iter().find(|c| c.conductor() == 3).unwrap();
        let direct = find_zeros(&from3.induce_primitive(), 20.0).unwrap();
        let lifted = find_zeros(from3, 20.0).unwrap();
        assert_eq!(direct.entries, lifted.entries);
        assert_eq!(lifted.modulus, 12);
    }

    #[test]
    fn envelope_and_contour_errors() {
        let p = build_group(1).unwrap().principal().clone();
        assert!(find_zeros(&p, 2000.0).is_err());
        assert!(find_zeros(build_group(101).unwrap().principal(), 10.0).is_err());
        assert!(matches!(
            zero_count_argument(&p, 14.134_725_141_734_693),
            Err(Error::ContourTooClose { .. })
        ));
    }

    #[test]
    fn counts_grow_like_t_log_t() {
        let g7 = build_group(7).unwrap();
        for chi in g7.iter() {
            for t in [20.0, 40.0, 80.0] {
                let n = zero_count_argument(chi, t).unwrap() as f64;
                let q = chi.conductor() as f64;
                let shape = t / PI * (q * t / (2.0 * PI * std::f64::consts::E)).ln().max(1.0);
                assert!(n <= 2.0 * shape + 10.0, "{chi} T={t}: {n} vs {shape}");
            }
        }
    }
}
