//! Small exhaustive oracle suites, one line per check.

use std::time::Instant;

use num_complex::Complex64;

use gz_core::analysis::{fit_exponent, geometric_grid};
use gz_core::characters::{admissible_count, build_group, char_sum_brute, char_sum_closed_form};
use gz_core::circle::{build_exact_grid, decompose_check, selberg_integral, selberg_integral_midpoint, w_mass};
use gz_core::explicit::residue_r;
use gz_core::goldbach::{build_class_convolution, goldbach_g};
use gz_core::lfunc::hurwitz::{hurwitz_direct, hurwitz_zeta};
use gz_core::lfunc::{find_zeros, format_zeros, import_from_str, zero_count_argument, ImportMode, ZeroCatalog};
use gz_core::numtheory::{build_sieve, euler_phi, factorize, gcd, moebius};
use gz_core::singular::{c2_partial_product, singular_series, JTable, SingularConstants};

use crate::report::Report;

type Check = (&'static str, fn() -> (bool, String));

const CHECKS: [Check; 12] = [
    ("sieve vs factorisation", sieve_check),
    ("multiplicative functions", multiplicative_check),
    ("character orthogonality", orthogonality_check),
    ("character sum closed form", char_sum_check),
    ("admissible residue count", admissible_check),
    ("goldbach fft vs double loop", goldbach_check),
    ("hurwitz vs direct sum", hurwitz_check),
    ("zero count vs argument principle", zero_check),
    ("zero file round trip", zero_file_check),
    ("singular series average", singular_check),
    ("circle decomposition and parseval", circle_check),
    ("residues and fits", residue_fit_check),
];

pub fn run() -> Report {
    let mut r = Report::new("selfcheck", &["check", "pass", "detail"]);
    for (name, check) in CHECKS {
        let start = Instant::now();
        let (pass, detail) = check();
        eprintln!(
            "selfcheck {name}: {} ({:.2}s) {detail}",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
        r.row(vec![name.into(), pass.into(), detail.into()]);
        r.verify(pass);
    }
    r
}

fn sieve_check() -> (bool, String) {
    let s = build_sieve(20_000).unwrap();
    let bad = (1..=20_000u64)
        .filter(|&n| {
            let f = factorize(n);
            let expected = if f.factors.len() == 1 {
                (f.factors[0].0 as f64).ln()
            } else {
                0.0
            };
            (s.lambda_at(n) - expected).abs() > 1e-12
        })
        .count();
    (bad == 0, format!("n <= 20000, {bad} mismatches"))
}

fn multiplicative_check() -> (bool, String) {
    let mut bad = 0;
    for n in 1..=2000u64 {
        let phi = (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64;
        let squarefree = factorize(n).is_squarefree();
        let omega = factorize(n).factors.len() as i32;
        let mu = if squarefree { if omega % 2 == 0 { 1 } else { -1 } } else { 0 };
        if phi != euler_phi(n) || mu != moebius(n) {
            bad += 1;
        }
    }
    (bad == 0, format!("n <= 2000, {bad} mismatches"))
}

fn orthogonality_check() -> (bool, String) {
    let mut worst = 0.0f64;
    for q in 1..=40u64 {
        let g = build_group(q).unwrap();
        let tables: Vec<Vec<Complex64>> = g.iter().map(|c| c.complex_table()).collect();
        for (i, a) in tables.iter().enumerate() {
            for (j, b) in tables.iter().enumerate() {
                let s: Complex64 = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
                let expected = if i == j { euler_phi(q) as f64 } else { 0.0 };
                worst = worst.max((s - expected).norm());
            }
        }
    }
    (worst < 1e-9, format!("q <= 40, max deviation {worst:.1e}"))
}

fn char_sum_check() -> (bool, String) {
    let mut bad = 0;
    let mut total = 0;
    for q in 1..=60u64 {
        for chi in build_group(q).unwrap().iter() {
            for c in 1..=q {
                total += 1;
                if char_sum_closed_form(chi, c) != char_sum_brute(chi, c) {
                    bad += 1;
                }
            }
        }
    }
    (bad == 0, format!("{total} cases, {bad} mismatches"))
}

fn admissible_check() -> (bool, String) {
    let mut bad = 0;
    for q in 1..=150u64 {
        let phi = euler_phi(q);
        for c in 1..=q {
            let r = singular_series(q, c as i64) * (phi * phi);
            if !r.is_integer() || r.to_integer() != admissible_count(q, c) {
                bad += 1;
            }
        }
    }
    (bad == 0, format!("q <= 150, {bad} mismatches"))
}

fn goldbach_check() -> (bool, String) {
    let s = build_sieve(1000).unwrap();
    let mut worst = 0.0f64;
    for q in [1u64, 3, 4, 5] {
        for a in 0..q {
            for b in 0..q {
                let conv = build_class_convolution(q, a as i64, b as i64, 400, &s).unwrap();
                for n in (0..=400u64).step_by(7) {
                    let direct = goldbach_g(n, q, a as i64, b as i64, &s).unwrap();
                    worst = worst.max((conv.g(n) - direct).abs());
                }
            }
        }
    }
    (worst < 1e-9, format!("q in {{1,3,4,5}}, n <= 400, max error {worst:.1e}"))
}

fn hurwitz_check() -> (bool, String) {
    let mut worst = 0.0f64;
    for (s, a) in [(Complex64::new(2.0, 0.0), 0.25), (Complex64::new(3.5, 7.0), 0.75), (Complex64::new(2.5, -3.0), 1.0)] {
        let fast = hurwitz_zeta(s, a).unwrap();
        let slow = hurwitz_direct(s, a, 200_000);
        worst = worst.max((fast - slow).norm() / slow.norm());
    }
    (worst < 1e-8, format!("max relative error {worst:.1e}"))
}

fn zero_check() -> (bool, String) {
    let mut bad = Vec::new();
    for q in 1..=5u64 {
        for chi in build_group(q).unwrap().iter() {
            let found = find_zeros(chi, 60.0).map(|s| s.count_up_to(60.0));
            let arg = zero_count_argument(chi, 60.0);
            match (found, arg) {
                (Ok(a), Ok(b)) if a == b => {}
                (f, a) => bad.push(format!("{chi}: {f:?} vs {a:?}")),
            }
        }
    }
    (bad.is_empty(), format!("q <= 5, T = 60, mismatches {bad:?}"))
}

fn zero_file_check() -> (bool, String) {
    let chi = build_group(5).unwrap().characters()[1].clone();
    let set = find_zeros(&chi, 40.0).unwrap();
    let text = format_zeros(&set);
    let back = import_from_str(&text, &set.label, ImportMode::Strict);
    let ok = matches!(&back, Ok(b) if b.entries.iter().zip(&set.entries).all(|(x, y)| x.gamma == y.gamma) && b.len() == set.len());
    let corrupted = text.replacen(&format!("{}", set.entries[2].gamma), &format!("{}", set.entries[2].gamma + 0.01), 1);
    let rejected = import_from_str(&corrupted, &set.label, ImportMode::Strict).is_err();
    (ok && rejected, format!("{} zeros round trip {ok}, corruption rejected {rejected}", set.len()))
}

fn singular_check() -> (bool, String) {
    let c = SingularConstants::standard();
    let table = JTable::new(20_000, &c).unwrap();
    let worst = (1..=10u64)
        .flat_map(|q| gz_core::singular::j_averages(&table, 20_000, q))
        .map(|a| a.constant)
        .fold(0.0, f64::max);
    let converging = (c2_partial_product(1000) - c2_partial_product(100_000)).abs() < 1e-3;
    (worst <= 10.0 && converging, format!("x = 20000, q <= 10, max constant {worst:.3}"))
}

fn circle_check() -> (bool, String) {
    let s = build_sieve(5000).unwrap();
    let mut worst = 0.0f64;
    let mut parseval = 0.0f64;
    for q in [1u64, 3, 4] {
        let grid = build_exact_grid(500, q, &s).unwrap();
        for c1 in &grid.characters {
            let d = if c1.is_principal() { 1.0 } else { 0.0 };
            let table = c1.complex_table();
            let direct: f64 = (1..=500u64)
                .map(|n| (table[(n % q) as usize] * s.lambda_at(n) - d).norm_sqr())
                .sum();
            parseval = parseval.max((w_mass(0.5, c1, &grid).unwrap() - direct).abs() / direct);
            for c2 in &grid.characters {
                worst = worst.max(decompose_check(c1, c2, &grid, &s).unwrap());
            }
        }
    }
    let p = build_group(1).unwrap().principal().clone();
    let exact = selberg_integral(300.0, 10.0, &p, &s).unwrap();
    let mid = selberg_integral_midpoint(300.0, 10.0, &p, &s, 3000);
    let selberg = (exact - mid).abs() / exact;
    let pass = worst < 1e-6 && parseval < 1e-9 && selberg < 1e-9;
    (pass, format!("decomposition {worst:.1e}, parseval {parseval:.1e}, selberg {selberg:.1e}"))
}

fn residue_fit_check() -> (bool, String) {
    let cat = ZeroCatalog::compute(4, 30.0).unwrap();
    let odd = cat.iter().find(|(c, _)| !c.is_principal()).unwrap();
    let rho = odd.1.entries[0].rho();
    let cancel = residue_r(rho, 1, 3, &cat).unwrap().norm() < 1e-12;
    let grid = geometric_grid(1e2, 1e6, 30).unwrap();
    let law: Vec<_> = grid.iter().map(|&x| (x, x.powf(1.5))).collect();
    let slope = fit_exponent(&law).unwrap().exponent;
    let pass = cancel && (slope - 1.5).abs() < 1e-3;
    (pass, format!("chi(1)+chi(3) cancellation {cancel}, synthetic slope {slope:.6}"))
}
