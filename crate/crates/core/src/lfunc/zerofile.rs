//! Line-oriented text format for zero sets.
//!
//! ```text
//! # GZZEROS v1
//! # char q=5;e=1
//! # height 30
//! 0.5 -29.5 1
//! ...
//! ```
//!
//! One zero per line as `<beta> <gamma> <multiplicity>`, `γ` ascending, both
//! signs listed. Other `#` lines are ignored; the `height` line is optional
//! and defaults to the largest `|γ|`.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use super::{zeros, LFunction, ZeroEntry, ZeroSet, ZeroSource};
use crate::characters::character_from_label;
use crate::{Error, Result};

pub const HEADER: &str = "# GZZEROS v1";

/// Largest `|L(ρ, χ*)|` accepted for an imported zero.
pub const IMPORT_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ImportMode {
    /// Every entry must be a zero of the L-function.
    #[default]
    Strict,
    /// Entries off the critical line are taken as given; the set is marked
    /// uncertified.
    Hypothetical,
}

pub fn format_zeros(set: &ZeroSet) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "# char {}", set.label).unwrap();
    writeln!(out, "# height {}", set.height).unwrap();
    for e in &set.entries {
        writeln!(out, "{} {} {}", e.beta, e.gamma, e.multiplicity).unwrap();
    }
    out
}

pub fn export_zeros(set: &ZeroSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_zeros(set)).map_err(|e| Error::io(path, e))
}

/// Parsed file contents with the line number of each entry.
pub struct ParsedZeros {
    pub label: String,
    pub height: Option<f64>,
    pub entries: Vec<(usize, ZeroEntry)>,
}

pub fn parse_zeros(text: &str) -> Result<ParsedZeros> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let parse_err = |line: usize, message: &str| Error::Parse {
        line,
        message: message.to_string(),
    };
    match lines.next() {
        Some((_, HEADER)) => {}
        _ => return Err(parse_err(1, "missing GZZEROS v1 header")),
    }
    let label = match lines.next() {
        Some((_, l)) if l.starts_with("# char ") => l["# char ".len()..].trim().to_string(),
        _ => return Err(parse_err(2, "missing '# char' line")),
    };
    let mut height = None;
    let mut entries = Vec::new();
    let mut previous = f64::NEG_INFINITY;
    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(h) = rest.trim().strip_prefix("height") {
                height = Some(
                    h.trim()
                        .parse::<f64>()
                        .map_err(|_| parse_err(n, "bad height"))?,
                );
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(n, "expected '<beta> <gamma> <multiplicity>'"));
        }
        let beta: f64 = fields[0].parse().map_err(|_| parse_err(n, "bad beta"))?;
        let gamma: f64 = fields[1].parse().map_err(|_| parse_err(n, "bad gamma"))?;
        let multiplicity: u32 = fields[2]
            .parse()
            .map_err(|_| parse_err(n, "bad multiplicity"))?;
        if !(beta > 0.0 && beta < 1.0) || !gamma.is_finite() || multiplicity == 0 {
            return Err(parse_err(n, "entry outside the critical strip or zero multiplicity"));
        }
        if gamma <= previous {
            return Err(parse_err(n, "ordinates not strictly ascending"));
        }
        previous = gamma;
        entries.push((
            n,
            ZeroEntry {
                beta,
                gamma,
                multiplicity,
                source: ZeroSource::Imported,
            },
        ));
    }
    Ok(ParsedZeros {
        label,
        height,
        entries,
    })
}

/// Reads and validates a zero file for the character `label`.
pub fn import_zeros(path: impl AsRef<Path>, label: &str, mode: ImportMode) -> Result<ZeroSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    import_from_str(&text, label, mode)
}

pub fn import_from_str(text: &str, label: &str, mode: ImportMode) -> Result<ZeroSet> {
    let parsed = parse_zeros(text)?;
    if parsed.label != label {
        return Err(Error::Validation {
            line: 2,
            message: format!("file is for {}, expected {label}", parsed.label),
        });
    }
    let chi = character_from_label(label)?;
    let lf = LFunction::new(&chi);
    for (line, e) in &parsed.entries {
        if e.beta != 0.5 {
            if mode == ImportMode::Hypothetical {
                continue;
            }
            return Err(Error::Validation {
                line: *line,
                message: format!("beta = {} off the critical line", e.beta),
            });
        }
        let v = lf.l(Complex64::new(e.beta, e.gamma)).norm();
        if !(v < IMPORT_TOLERANCE) {
            return Err(Error::Validation {
                line: *line,
                message: format!("|L(rho)| = {v:.3e} at gamma = {}", e.gamma),
            });
        }
    }
    let entries: Vec<ZeroEntry> = parsed.entries.into_iter().map(|(_, e)| e).collect();
    let height = parsed
        .height
        .unwrap_or_else(|| entries.iter().map(|e| e.gamma.abs()).fold(0.0, f64::max));
    Ok(ZeroSet {
        label: label.to_string(),
        modulus: chi.modulus(),
        height,
        entries,
        certified: false,
    })
}

/// Certifies an imported set against the argument-principle count at its height.
pub fn certify(set: &mut ZeroSet) -> Result<bool> {
    if set.entries.iter().any(|e| e.beta != 0.5) {
        set.certified = false;
        return Ok(false);
    }
    let chi = character_from_label(&set.label)?;
    let n = zeros::zero_count_argument(&chi, set.height)?;
    set.certified = n == set.count_up_to(set.height);
    Ok(set.certified)
}

/// Checks that `b` is `a` reflected through `γ ↦ −γ`.
pub fn check_conjugate_pair(a: &ZeroSet, b: &ZeroSet, tolerance: f64) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Validation {
            line: 0,
            message: format!(
                "{} has {} zeros but {} has {}",
                a.label,
                a.len(),
                b.label,
                b.len()
            ),
        });
    }
    for (i, (x, y)) in a.entries.iter().zip(b.entries.iter().rev()).enumerate() {
        if (x.gamma + y.gamma).abs() > tolerance
            || x.beta != y.beta
            || x.multiplicity != y.multiplicity
        {
            return Err(Error::Validation {
                line: b.len() - i,
                message: format!("{} has no partner for gamma = {}", b.label, x.gamma),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::build_group;
    use crate::lfunc::find_zeros;

    #[test]
    fn round_trip() {
        let p = build_group(1).unwrap().principal().clone();
        let set = find_zeros(&p, 50.0).unwrap();
        let text = format_zeros(&set);
        let back = import_from_str(&text, &set.label, ImportMode::Strict).unwrap();
        assert_eq!(back.height, set.height);
        assert_eq!(back.len(), set.len());
        for (a, b) in back.entries.iter().zip(&set.entries) {
            assert_eq!(a.gamma, b.gamma);
            assert_eq!(a.beta, b.beta);
            assert_eq!(a.source, ZeroSource::Imported);
        }
        let mut back = back;
        assert!(certify(&mut back).unwrap());

        let dir = tempdir();
        let path = dir.join("zeta.txt");
        export_zeros(&set, &path).unwrap();
        let file = import_zeros(&path, &set.label, ImportMode::Strict).unwrap();
        assert_eq!(file.len(), set.len());
    }

    fn tempdir() -> std::path::PathBuf {
        let d = std::env::temp_dir().join(format!("gz-zerofile-{}", std::process::id()));
        std::fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn corrupted_gamma_rejected() {
        let p = build_group(1).unwrap().principal().clone();
        let set = find_zeros(&p, 30.0).unwrap();
        let mut bad = set.clone();
        bad.entries[4].gamma += 0.1;
        let text = format_zeros(&bad);
        match import_from_str(&text, &set.label, ImportMode::Strict) {
            Err(Error::Validation { line, .. }) => assert_eq!(line, 8),
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_zeros("nope"), Err(Error::Parse { line: 1, .. })));
        let text = "# GZZEROS v1\n# char q=1;e=\n0.5 3.0 1\n0.5 2.0 1\n";
        assert!(matches!(parse_zeros(text), Err(Error::Parse { line: 4, .. })));
        let text = "# GZZEROS v1\n# char q=1;e=\n0.5 3.0\n";
        assert!(matches!(parse_zeros(text), Err(Error::Parse { line: 3, .. })));
        let text = "# GZZEROS v1\n# char q=1;e=\n# a comment\n";
        assert!(parse_zeros(text).unwrap().entries.is_empty());
        let text = "# GZZEROS v1\n# char q=1;e=\n";
        assert!(import_from_str(text, "q=3;e=1", ImportMode::Strict).is_err());
    }

    #[test]
    fn hypothetical_entries() {
        let text = "# GZZEROS v1\n# char q=1;e=\n# height 20\n0.7 -14.134725141734693 1\n\
                    0.5 14.134725141734693 1\n";
        assert!(import_from_str(text, "q=1;e=", ImportMode::Strict).is_err());
        let set = import_from_str(text, "q=1;e=", ImportMode::Hypothetical).unwrap();
        assert!(!set.certified);
        assert_eq!(set.observed_b(), 0.7);
        assert!(set.require_on_line().is_err());
    }

    #[test]
    fn conjugate_pairs() {
        let g5 = build_group(5).unwrap();
        let chi = g5.iter().find(|c| c.order() == 4).unwrap();
        let a = find_zeros(chi, 20.0).unwrap();
        let b = find_zeros(&chi.conj(), 20.0).unwrap();
        check_conjugate_pair(&a, &b, 1e-9).unwrap();
        let mut c = b.clone();
        c.entries[0].gamma += 0.01;
        assert!(check_conjugate_pair(&a, &c, 1e-9).is_err());
    }
}
