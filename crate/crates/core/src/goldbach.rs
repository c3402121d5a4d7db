//! Goldbach-type sums weighted by the von Mangoldt function.
//!
//! `G(n; q, a, b) = Σ_{ℓ+m=n, ℓ≡a, m≡b (q)} Λ(ℓ)Λ(m)` and its partial sums,
//! the character-twisted `S(x; χ₁, χ₂)`, and congruence-restricted sums of the
//! plain `G(n)`. Tables are built with one FFT convolution.

use std::io::Write;

use num_complex::Complex64;

use crate::characters::DirichletCharacter;
use crate::fft::{convolve_complex, convolve_real};
use crate::numtheory::{gcd, SieveTable};
use crate::sum::{ComplexKahanSum, KahanSum};
use crate::{Error, Result};

/// Any nonzero `G` value is a sum of products `Λ(ℓ)Λ(m) ≥ (log 2)²`, so FFT
/// noise below this is snapped to zero.
const SNAP: f64 = 0.1;

fn check_range(x: u64, sieve: &SieveTable) -> Result<()> {
    if x > sieve.limit() {
        return Err(Error::OutOfRange(format!(
            "{x} exceeds sieve limit {}",
            sieve.limit()
        )));
    }
    Ok(())
}

fn validate_modulus(q: u64) -> Result<()> {
    if q == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    Ok(())
}

/// `G(n; q, a, b)` by direct summation over decompositions.
pub fn goldbach_g(n: u64, q: u64, a: i64, b: i64, sieve: &SieveTable) -> Result<f64> {
    validate_modulus(q)?;
    check_range(n, sieve)?;
    let (a, b) = (a.rem_euclid(q as i64) as u64, b.rem_euclid(q as i64) as u64);
    let mut acc = KahanSum::new();
    for l in 1..n {
        let m = n - l;
        if l % q == a && m % q == b {
            let v = sieve.lambda_at(l);
            if v != 0.0 {
                acc.add(v * sieve.lambda_at(m));
            }
        }
    }
    Ok(acc.value())
}

/// `G(n; q, a, b)` and `S(n; q, a, b)` for every `n ≤ x`.
#[derive(Clone, Debug)]
pub struct ClassConvolution {
    pub q: u64,
    pub a: u64,
    pub b: u64,
    pub x: u64,
    pub values: Vec<f64>,
    pub cumulative: Vec<f64>,
}

impl ClassConvolution {
    /// Rebuilds the table from stored `G(n)` values, `n = 0..=x`.
    pub fn from_values(q: u64, a: u64, b: u64, values: Vec<f64>) -> Result<Self> {
        validate_modulus(q)?;
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty G table".into()));
        }
        let cumulative = cumulate(&values);
        Ok(Self {
            q,
            a: a % q,
            b: b % q,
            x: values.len() as u64 - 1,
            values,
            cumulative,
        })
    }

    /// Whether `gcd(ab, q) = 1`, the setting of the main asymptotics.
    pub fn is_coprime(&self) -> bool {
        gcd(self.a * self.b, self.q) == 1 || self.q == 1
    }

    pub fn g(&self, n: u64) -> f64 {
        self.values[n as usize]
    }

    /// `S(u; q, a, b)` for real `u ≤ x`.
    pub fn s(&self, u: f64) -> f64 {
        if u < 0.0 {
            return 0.0;
        }
        self.cumulative[(u.floor() as u64).min(self.x) as usize]
    }

    /// Writes `n,g,S` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,g,S")?;
        for (n, (g, s)) in self.values.iter().zip(&self.cumulative).enumerate() {
            writeln!(out, "{n},{g:.17e},{s:.17e}")?;
        }
        Ok(())
    }
}

fn class_restricted(sieve: &SieveTable, x: u64, q: u64, a: u64) -> Vec<f64> {
    sieve.lambda()[..=x as usize]
        .iter()
        .enumerate()
        .map(|(n, &v)| if n as u64 % q == a { v } else { 0.0 })
        .collect()
}

fn cumulate(values: &[f64]) -> Vec<f64> {
    let mut acc = KahanSum::new();
    values
        .iter()
        .map(|&v| {
            acc.add(v);
            acc.value()
        })
        .collect()
}

/// Builds the `G` and `S` tables for one residue pair.
pub fn build_class_convolution(
    q: u64,
    a: i64,
    b: i64,
    x: u64,
    sieve: &SieveTable,
) -> Result<ClassConvolution> {
    validate_modulus(q)?;
    check_range(x, sieve)?;
    let (a, b) = (a.rem_euclid(q as i64) as u64, b.rem_euclid(q as i64) as u64);
    let la = class_restricted(sieve, x, q, a);
    let conv = if a == b {
        convolve_real(&la, &la)
    } else {
        convolve_real(&la, &class_restricted(sieve, x, q, b))
    };
    let target = (a + b) % q;
    let values: Vec<f64> = conv[..=x as usize]
        .iter()
        .enumerate()
        .map(|(n, &v)| {
            if n as u64 % q != target || v < SNAP {
                0.0
            } else {
                v
            }
        })
        .collect();
    let cumulative = cumulate(&values);
    Ok(ClassConvolution {
        q,
        a,
        b,
        x,
        values,
        cumulative,
    })
}

/// `G(n)` for all `n ≤ x`.
pub fn goldbach_table(x: u64, sieve: &SieveTable) -> Result<Vec<f64>> {
    Ok(build_class_convolution(1, 0, 0, x, sieve)?.values)
}

/// `S(x; χ₁, χ₂) = Σ_{ℓ+m ≤ x} χ₁(ℓ)Λ(ℓ) χ₂(m)Λ(m)`.
pub fn s_chi(
    x: u64,
    chi1: &DirichletCharacter,
    chi2: &DirichletCharacter,
    sieve: &SieveTable,
) -> Result<Complex64> {
    if chi1.modulus() != chi2.modulus() {
        return Err(Error::ModulusMismatch(chi1.modulus(), chi2.modulus()));
    }
    check_range(x, sieve)?;
    let twist = |chi: &DirichletCharacter| -> Vec<Complex64> {
        let table = chi.complex_table();
        let q = chi.modulus() as usize;
        sieve.lambda()[..=x as usize]
            .iter()
            .enumerate()
            .map(|(n, &v)| table[n % q] * v)
            .collect()
    };
    let (u, v) = (twist(chi1), twist(chi2));
    let conv = convolve_complex(&u, &v);
    Ok(conv[..=x as usize]
        .iter()
        .copied()
        .sum::<ComplexKahanSum>()
        .value())
}

/// `S(x; χ₁, χ₂)` for every pair of characters in `chars`, indexed `[i][j]`.
pub fn s_chi_matrix(
    x: u64,
    chars: &[DirichletCharacter],
    sieve: &SieveTable,
) -> Result<Vec<Vec<Complex64>>> {
    use rayon::prelude::*;
    chars
        .par_iter()
        .map(|c1| chars.iter().map(|c2| s_chi(x, c1, c2, sieve)).collect())
        .collect()
}

/// `Σ_{n ≤ x, n ≡ c (q)} G(n)`.
pub fn restricted_sum(x: u64, q: u64, c: i64, sieve: &SieveTable) -> Result<f64> {
    validate_modulus(q)?;
    let table = goldbach_table(x, sieve)?;
    Ok(restricted_sum_from_table(&table, q, c))
}

/// As [`restricted_sum`], from a precomputed `G(n)` table; `x` is its last index.
pub fn restricted_sum_from_table(table: &[f64], q: u64, c: i64) -> f64 {
    let c = c.rem_euclid(q as i64) as u64;
    table
        .iter()
        .enumerate()
        .filter(|(n, _)| *n as u64 % q == c)
        .map(|(_, &v)| v)
        .sum::<KahanSum>()
        .value()
}

/// All classes at once: entry `c` is the sum over `n ≡ c (q)`.
pub fn restricted_sums(table: &[f64], q: u64) -> Vec<f64> {
    let mut acc = vec![KahanSum::new(); q as usize];
    for (n, &v) in table.iter().enumerate() {
        acc[n % q as usize].add(v);
    }
    acc.iter().map(|k| k.value()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::build_group;
    use crate::numtheory::{build_sieve, euler_phi};
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn sieve() -> &'static SieveTable {
        static S: OnceLock<SieveTable> = OnceLock::new();
        S.get_or_init(|| build_sieve(20_000).unwrap())
    }

    fn brute_g(n: usize, q: u64, a: u64, b: u64, lam: &[f64]) -> f64 {
        (1..n)
            .filter(|&l| l as u64 % q == a && (n - l) as u64 % q == b)
            .map(|l| lam[l] * lam[n - l])
            .sum()
    }

    #[test]
    fn hand_examples() {
        let s = sieve();
        let g = goldbach_g(12, 3, 1, 2, s).unwrap();
        let expected = 2f64.ln().powi(2) + 5f64.ln() * 7f64.ln();
        assert!((g - expected).abs() < 1e-12);
        assert!((g - 3.6123).abs() < 1e-4);
        assert_eq!(goldbach_g(3, 3, 1, 2, s).unwrap(), 0.0);
        assert_eq!(goldbach_g(10, 3, 1, 2, s).unwrap(), 0.0);
        assert!(goldbach_g(30_000, 1, 0, 0, s).is_err());
        for (q, a, b) in [(1, 0, 0), (3, 1, 2), (4, 1, 3), (5, 2, 2)] {
            assert_eq!(build_class_convolution(q, a, b, 3, s).unwrap().s(3.0), 0.0);
        }
    }

    #[test]
    fn fft_matches_double_loop() {
        let s = sieve();
        let lam = s.lambda();
        for q in [1u64, 3, 4, 5, 8] {
            for a in 0..q {
                for b in 0..q {
                    let cc = build_class_convolution(q, a as i64, b as i64, 2000, s).unwrap();
                    let mut total = 0.0;
                    for n in 0..=2000usize {
                        let direct = brute_g(n, q, a, b, lam);
                        total += direct;
                        let got = cc.values[n];
                        assert!(
                            (got - direct).abs() <= 1e-6 * direct.max(1.0),
                            "q={q} a={a} b={b} n={n}: {got} vs {direct}"
                        );
                        if n as u64 % q != (a + b) % q {
                            assert_eq!(got, 0.0);
                        }
                        assert!(got >= 0.0);
                    }
                    assert!((cc.s(2000.0) - total).abs() <= 1e-8 * total.max(1.0));
                    assert!(cc.cumulative.windows(2).all(|w| w[0] <= w[1]));
                }
            }
        }
    }

    #[test]
    fn symmetry_in_residues() {
        let s = sieve();
        for q in [3u64, 5, 7, 8] {
            for a in 1..q as i64 {
                for b in 1..q as i64 {
                    let ab = build_class_convolution(q, a, b, 5000, s).unwrap();
                    let ba = build_class_convolution(q, b, a, 5000, s).unwrap();
                    assert!((ab.s(5000.0) - ba.s(5000.0)).abs() <= 1e-9 * ab.s(5000.0).max(1.0));
                }
            }
        }
    }

    #[test]
    fn s_at_twenty_matches_direct() {
        let s = sieve();
        let lam = s.lambda();
        let mut direct = 0.0;
        for l in 1..=20usize {
            for m in 1..=20usize {
                if l + m <= 20 {
                    direct += lam[l] * lam[m];
                }
            }
        }
        let cc = build_class_convolution(1, 1, 1, 20, s).unwrap();
        assert!((cc.s(20.0) - direct).abs() < 1e-10);
    }

    #[test]
    fn pairs_reconstruct_full_sum() {
        let s = sieve();
        let x = 10_000;
        let full = build_class_convolution(1, 0, 0, x, s).unwrap().s(x as f64);
        let q = 6u64;
        let mut all = 0.0;
        let mut coprime = 0.0;
        for a in 0..q {
            for b in 0..q {
                let v = build_class_convolution(q, a as i64, b as i64, x, s).unwrap().s(x as f64);
                all += v;
                if gcd(a * b, q) == 1 {
                    coprime += v;
                }
            }
        }
        assert!((all - full).abs() <= 1e-9 * full);
        let bound = ((q * x) as f64).ln().powi(2) * x as f64;
        assert!(full - coprime >= 0.0);
        assert!(full - coprime <= bound, "{} > {bound}", full - coprime);
    }

    #[test]
    fn character_orthogonality_reconstruction() {
        let s = sieve();
        let x = 1000;
        let q = 3;
        let group = build_group(q).unwrap();
        let m = s_chi_matrix(x, group.characters(), s).unwrap();
        let psi = s.psi(x as f64);
        for c1 in group.iter() {
            for c2 in group.iter() {
                assert!(s_chi(x, c1, c2, s).unwrap().norm() <= psi * psi + 1e-6);
            }
        }
        let phi = euler_phi(q) as f64;
        for a in 1..3i64 {
            for b in 1..3i64 {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, c1) in group.iter().enumerate() {
                    for (j, c2) in group.iter().enumerate() {
                        acc += c1.value_complex(a).conj() * c2.value_complex(b).conj() * m[i][j];
                    }
                }
                acc /= phi * phi;
                let direct = build_class_convolution(q, a, b, x, s).unwrap().s(x as f64);
                assert!((acc.re - direct).abs() < 1e-6 * direct.max(1.0));
                assert!(acc.im.abs() < 1e-6 * direct.max(1.0));
            }
        }
        let g1 = build_group(1).unwrap();
        let p = g1.principal();
        let full = build_class_convolution(1, 1, 1, x, s).unwrap().s(x as f64);
        assert!((s_chi(x, p, p, s).unwrap().re - full).abs() < 1e-6 * full);
        assert!(s_chi(x, p, group.principal(), s).is_err());
    }

    #[test]
    fn restricted_sums_partition() {
        let s = sieve();
        let x = 10_000;
        let table = goldbach_table(x, s).unwrap();
        let full = build_class_convolution(1, 0, 0, x, s).unwrap().s(x as f64);
        assert!((restricted_sum(x, 1, 0, s).unwrap() - full).abs() < 1e-9 * full);
        for q in 2..=12 {
            let parts = restricted_sums(&table, q);
            let total: f64 = parts.iter().sum();
            assert!((total - full).abs() < 1e-9 * full);
            for c in 0..q {
                assert_eq!(parts[c as usize], restricted_sum_from_table(&table, q, c as i64));
            }
        }
        // odd n = 2^k + p^j only
        let odd = restricted_sum(x, 2, 1, s).unwrap();
        assert!(odd < 1e-2 * full, "{odd} vs {full}");
        let lam = s.lambda();
        let mut brute = 0.0;
        for n in (1..=x as usize).step_by(2) {
            let mut k = 2;
            while k < n {
                brute += 2.0 * lam[k] * lam[n - k];
                k *= 2;
            }
        }
        assert!((odd - brute).abs() < 1e-6 * brute.max(1.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn direct_and_fft_agree(q in 1u64..12, a in 0i64..12, b in 0i64..12, n in 4u64..1500) {
            let s = sieve();
            let cc = build_class_convolution(q, a, b, 1500, s).unwrap();
            let d = goldbach_g(n, q, a, b, s).unwrap();
            prop_assert!((cc.g(n) - d).abs() <= 1e-6 * d.max(1.0));
        }
    }
}
