use std::path::Path;

use rayon::prelude::*;

use gz_core::analysis::{b_star, fit_exponent, geometric_grid, residual_grid, rms_of, ResidualMode, ResidualParams};
use gz_core::characters::{build_group, DirichletCharacter};
use gz_core::circle::{build_grid, decompose_check, j_chi, j_grid_points, selberg_integral, w_mass};
use gz_core::explicit::{landau_gonek, thm12_report, thm14_report, ExplicitReport};
use gz_core::lfunc::{certify, export_zeros, import_zeros, ImportMode, ZeroCatalog, ZeroSet};
use gz_core::numtheory::{euler_phi, gcd, SieveTable};
use gz_core::singular::{compute_c2, j_averages, ratio_to_f64, singular_series, JTable, SingularConstants};

use crate::cache::CacheStatus;
use crate::error::{CliError, CliResult};
use crate::report::{Cell, Report};
use crate::{selfcheck, Command, Context, GridArgs};

/// Slack allowed between a fitted exponent and `1 + d`.
pub const FIT_SLACK: f64 = 0.05;

/// Largest `|J average residual| / (x log x)` accepted by `javg`.
pub const JAVG_BOUND: f64 = 10.0;

pub fn dispatch(command: &Command, ctx: &Context) -> CliResult<Report> {
    match command {
        Command::Sieve { limit, rows } => sieve(ctx, limit.unwrap_or(ctx.config.sieve_limit), *rows),
        Command::Characters { q } => characters(*q),
        Command::Zeros {
            q,
            height,
            label,
            export,
            import,
            hypothetical,
        } => zeros(ctx, *q, height.unwrap_or(ctx.config.height), label.as_deref(), export.as_deref(), import.as_deref(), *hypothetical),
        Command::Goldbach { q, a, b, xmax } => goldbach(ctx, *q, *a, *b, *xmax),
        Command::Singular { cutoff, q } => singular(*cutoff, *q),
        Command::Javg { q, xmax } => javg(*q, *xmax),
        Command::VerifyThm12 { q, a, b, height, grid } => {
            let q = q.unwrap_or(ctx.config.moduli[0]);
            verify(ctx, ResidualMode::Thm12, q, *a, *b, 0, height.unwrap_or(ctx.config.height), grid)
        }
        Command::VerifyThm14 { q, c, height, grid } => {
            let q = q.unwrap_or(ctx.config.moduli[0]);
            verify(ctx, ResidualMode::Thm14, q, 1, 1, *c, height.unwrap_or(ctx.config.height), grid)
        }
        Command::LandauGonek { q, label, x, height } => {
            landau(ctx, *q, label.as_deref(), *x, height.unwrap_or(ctx.config.height))
        }
        Command::Circle { q, x, xi, h } => circle(ctx, *q, *x, *xi, *h),
        Command::Fit {
            mode,
            q,
            a,
            b,
            c,
            height,
            d,
            grid,
        } => fit(
            ctx,
            mode.parse().map_err(|e: gz_core::Error| CliError::Usage(e.to_string()))?,
            q.unwrap_or(ctx.config.moduli[0]),
            (*a, *b, *c),
            height.unwrap_or(ctx.config.height),
            *d,
            grid,
        ),
        Command::Selfcheck => Ok(selfcheck::run()),
    }
}

fn load_sieve(ctx: &Context, needed: u64) -> CliResult<(SieveTable, CacheStatus)> {
    ctx.cache.sieve(needed.max(ctx.config.sieve_limit))
}

fn load_zeros(ctx: &Context, q: u64, height: f64) -> CliResult<(ZeroCatalog, CacheStatus)> {
    ctx.cache.zeros(q, height)
}

fn grid_of(ctx: &Context, g: &GridArgs) -> CliResult<Vec<f64>> {
    let spec = ctx.config.grid;
    let grid = geometric_grid(
        g.xmin.unwrap_or(spec.x_min),
        g.xmax.unwrap_or(spec.x_max),
        g.points.unwrap_or(spec.points),
    )?;
    Ok(grid)
}

fn sieve(ctx: &Context, limit: u64, rows: bool) -> CliResult<Report> {
    let (table, status) = ctx.cache.sieve(limit)?;
    let mut r = Report::new("sieve", &["n", "lambda", "psi"]);
    r.param("limit", limit);
    let prime_powers = (2..=limit).filter(|&n| table.is_prime_power(n)).count();
    r.summary("cache", status.as_str())
        .summary("prime_powers", prime_powers)
        .summary("psi", table.psi(limit as f64));
    if rows {
        let psi = table.cumulative_psi();
        for n in 1..=limit {
            r.row(vec![n.into(), table.lambda_at(n).into(), psi[n as usize].into()]);
        }
    }
    Ok(r)
}

fn characters(q: u64) -> CliResult<Report> {
    let group = build_group(q)?;
    let mut r = Report::new("characters", &["label", "order", "conductor", "parity", "primitive", "real"]);
    r.param("q", q);
    r.summary("count", group.len());
    for chi in group.iter() {
        r.row(vec![
            chi.label().into(),
            chi.order().into(),
            chi.conductor().into(),
            (chi.parity() as u64).into(),
            chi.is_primitive().into(),
            chi.is_real().into(),
        ]);
    }
    Ok(r)
}

fn zero_rows(r: &mut Report, set: &ZeroSet) {
    for e in &set.entries {
        let source = match e.source {
            gz_core::ZeroSource::Computed => "computed",
            gz_core::ZeroSource::Imported => "imported",
        };
        r.row(vec![
            set.label.clone().into(),
            e.beta.into(),
            e.gamma.into(),
            e.multiplicity.into(),
            source.into(),
        ]);
    }
}

fn file_name(label: &str) -> String {
    let clean: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    format!("zeros_{clean}.txt")
}

fn zeros(
    ctx: &Context,
    q: u64,
    height: f64,
    label: Option<&str>,
    export: Option<&Path>,
    import: Option<&Path>,
    hypothetical: bool,
) -> CliResult<Report> {
    let mut r = Report::new("zeros", &["label", "beta", "gamma", "multiplicity", "source"]);
    r.param("q", q).param("height", height);
    if let Some(path) = import {
        let label = label.expect("clap enforces --label with --import");
        let mode = if hypothetical {
            ImportMode::Hypothetical
        } else {
            ImportMode::Strict
        };
        let mut set = import_zeros(path, label, mode)?;
        let certified = certify(&mut set)?;
        r.param("import", path.display().to_string()).param("hypothetical", hypothetical);
        r.summary("certified", certified)
            .summary("count", set.len())
            .summary("observed_b", set.observed_b());
        zero_rows(&mut r, &set);
        if !hypothetical {
            r.verify(certified);
        }
        return Ok(r);
    }
    let (catalog, status) = load_zeros(ctx, q, height)?;
    r.summary("cache", status.as_str()).summary("certified", catalog.certified());
    if let Some(l) = label {
        r.param("label", l);
    }
    let mut counts = serde_json::Map::new();
    for (chi, set) in catalog.iter() {
        if label.is_some_and(|l| l != chi.label()) {
            continue;
        }
        counts.insert(set.label.clone(), set.len().into());
        zero_rows(&mut r, set);
        if let Some(dir) = export {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            export_zeros(set, dir.join(file_name(&set.label)))?;
        }
    }
    if counts.is_empty() {
        return Err(gz_core::Error::BadLabel(label.unwrap_or_default().to_string()).into());
    }
    r.summary("counts", counts);
    r.verify(catalog.certified());
    Ok(r)
}

fn goldbach(ctx: &Context, q: u64, a: u64, b: u64, xmax: u64) -> CliResult<Report> {
    let (conv, status) = ctx
        .cache
        .convolution(q, a, b, xmax, || Ok(load_sieve(ctx, xmax)?.0))?;
    let mut r = Report::new("goldbach", &["n", "g", "S"]);
    r.param("q", q).param("a", conv.a).param("b", conv.b).param("xmax", xmax);
    let phi = euler_phi(q) as f64;
    let x = xmax as f64;
    r.summary("cache", status.as_str())
        .summary("coprime", conv.is_coprime())
        .summary("S", conv.s(x))
        .summary("main", x * x / (2.0 * phi * phi));
    for n in 0..=xmax {
        r.row(vec![n.into(), conv.g(n).into(), conv.cumulative[n as usize].into()]);
    }
    Ok(r)
}

fn singular(cutoff: u64, q: Option<u64>) -> CliResult<Report> {
    let c = compute_c2(cutoff)?;
    let mut r = Report::new("singular", &["c", "series", "series_exact"]);
    r.param("cutoff", cutoff);
    r.summary("c2", c.c2)
        .summary("c2_half", c.c2 / 2.0)
        .summary("partial_product", c.partial_product)
        .summary("tail_bound", c.tail_bound);
    if let Some(q) = q {
        if q == 0 {
            return Err(CliError::Usage("--q must be positive".into()));
        }
        r.param("q", q);
        for class in 0..q {
            let s = singular_series(q, class as i64);
            r.row(vec![class.into(), ratio_to_f64(s).into(), s.to_string().into()]);
        }
    }
    Ok(r)
}

fn javg(q: u64, xmax: u64) -> CliResult<Report> {
    if q == 0 {
        return Err(CliError::Usage("--q must be positive".into()));
    }
    let table = JTable::new(xmax, &SingularConstants::standard())?;
    let mut r = Report::new("javg", &["x", "q", "c", "exact", "main", "residual", "constant"]);
    r.param("q", q).param("xmax", xmax);
    let rows = j_averages(&table, xmax, q);
    let worst = rows.iter().map(|a| a.constant).fold(0.0, f64::max);
    r.summary("max_constant", worst).summary("bound", JAVG_BOUND);
    for a in rows {
        r.row(vec![a.x.into(), a.q.into(), a.c.into(), a.exact.into(), a.main.into(), a.residual.into(), a.constant.into()]);
    }
    r.verify(worst <= JAVG_BOUND);
    Ok(r)
}

const EXPLICIT_COLUMNS: [&str; 7] = [
    "x",
    "exact",
    "main",
    "zero_correction",
    "correction_imag",
    "residual",
    "truncation_bound",
];

fn explicit_report(name: &str, rep: &ExplicitReport) -> Report {
    let mut r = Report::new(name, &EXPLICIT_COLUMNS);
    let (res, main) = (rep.rms_residual(), rep.rms_main_only());
    r.summary("certified", rep.certified)
        .summary("rms_residual", res)
        .summary("rms_main_only", main)
        .summary("max_relative_imag", rep.max_relative_imag());
    for row in &rep.rows {
        r.row(vec![
            row.x.into(),
            row.exact.into(),
            row.main.into(),
            row.zero_correction.into(),
            row.correction_imag.into(),
            row.residual.into(),
            row.truncation_bound.into(),
        ]);
    }
    r.verify(rep.certified && res <= 1.1 * main);
    r
}

#[allow(clippy::too_many_arguments)]
fn verify(
    ctx: &Context,
    mode: ResidualMode,
    q: u64,
    a: u64,
    b: u64,
    c: u64,
    height: f64,
    grid: &GridArgs,
) -> CliResult<Report> {
    let xs = grid_of(ctx, grid)?;
    let x_max = xs.iter().fold(0.0f64, |m, &x| m.max(x)).floor() as u64;
    let (catalog, zstatus) = load_zeros(ctx, q, height)?;
    let (rep, name, cstatus) = if mode == ResidualMode::Thm12 {
        let (conv, st) = ctx.cache.convolution(q, a, b, x_max, || Ok(load_sieve(ctx, x_max)?.0))?;
        (thm12_report(&xs, &conv, &catalog, height)?, "verify-thm12", st)
    } else {
        let (conv, st) = ctx.cache.convolution(1, 0, 0, x_max, || Ok(load_sieve(ctx, x_max)?.0))?;
        (thm14_report(&xs, &conv.values, c as i64, &catalog, height)?, "verify-thm14", st)
    };
    let mut r = explicit_report(name, &rep);
    r.param("q", q).param("height", height).param("points", xs.len());
    r.param("xmin", xs[0]).param("xmax", xs[xs.len() - 1]);
    if mode == ResidualMode::Thm12 {
        r.param("a", a).param("b", b);
    } else {
        r.param("c", c);
    }
    r.summary("cache_zeros", zstatus.as_str()).summary("cache_goldbach", cstatus.as_str());
    Ok(r)
}

fn landau(ctx: &Context, q: u64, label: Option<&str>, x: f64, height: f64) -> CliResult<Report> {
    let (catalog, status) = load_zeros(ctx, q, height)?;
    let chosen: Vec<(&DirichletCharacter, &ZeroSet)> = match label {
        Some(l) => {
            let chi = catalog.group().by_label(l)?;
            if !chi.is_primitive() {
                return Err(gz_core::Error::NotPrimitive(l.to_string()).into());
            }
            vec![(chi, catalog.set_for(chi)?)]
        }
        None => catalog.iter().filter(|(chi, _)| chi.is_primitive()).collect(),
    };
    if chosen.is_empty() {
        return Err(CliError::Usage(format!("no primitive characters mod {q}")));
    }
    let mut r = Report::new(
        "landau-gonek",
        &["label", "x", "sum_re", "sum_im", "prediction_re", "prediction_im", "error", "budget"],
    );
    r.param("q", q).param("x", x).param("height", height);
    r.summary("cache", status.as_str());
    for (chi, set) in chosen {
        let lg = landau_gonek(x, chi, set, height)?;
        let err = (lg.sum - lg.prediction).norm();
        r.row(vec![
            chi.label().into(),
            x.into(),
            lg.sum.re.into(),
            lg.sum.im.into(),
            lg.prediction.re.into(),
            lg.prediction.im.into(),
            err.into(),
            lg.error_budget.into(),
        ]);
        r.verify(err <= 10.0 * lg.error_budget);
    }
    Ok(r)
}

fn circle(ctx: &Context, q: u64, x: u64, xi: f64, h: Option<f64>) -> CliResult<Report> {
    let h = h.unwrap_or((x as f64).sqrt());
    let needed = (2.0 * x as f64 + h).floor() as u64 + 1;
    let (table, status) = load_sieve(ctx, needed)?;
    let grid = build_grid(x, q, &table, j_grid_points(x))?;
    let mut r = Report::new("circle", &["label", "j", "j_error", "w_mass", "selberg"]);
    r.param("q", q).param("x", x).param("xi", xi).param("h", h).param("points", grid.n);
    r.summary("cache", status.as_str());
    let rows = grid
        .characters
        .par_iter()
        .map(|chi| {
            let j = j_chi(chi, &grid)?;
            let w = w_mass(xi, chi, &grid)?;
            let s = selberg_integral(x as f64, h, chi, &table)?;
            Ok(vec![chi.label().into(), j.value.into(), j.quadrature_error.into(), w.into(), s.into()])
        })
        .collect::<gz_core::Result<Vec<Vec<Cell>>>>()?;
    for row in rows {
        r.row(row);
    }
    let phi = euler_phi(q);
    if phi * phi <= 64 {
        let mut worst = 0.0f64;
        for c1 in &grid.characters {
            for c2 in &grid.characters {
                worst = worst.max(decompose_check(c1, c2, &grid, &table)?);
            }
        }
        r.summary("max_decomposition_error", worst);
        r.verify(worst < 1e-6 * (x as f64).max(1.0));
    }
    Ok(r)
}

fn fit(
    ctx: &Context,
    mode: ResidualMode,
    q: u64,
    (a, b, c): (u64, u64, u64),
    height: f64,
    d: Option<f64>,
    grid: &GridArgs,
) -> CliResult<Report> {
    let xs = grid_of(ctx, grid)?;
    let x_max = xs.iter().fold(0.0f64, |m, &x| m.max(x));
    if mode != ResidualMode::Thm14 && gcd(a * b, q) != 1 && q != 1 {
        return Err(CliError::Usage(format!("(a b, q) = ({}, {q}) is not coprime", a * b)));
    }
    let (table, sstatus) = load_sieve(ctx, x_max.floor() as u64)?;
    let (catalog, zstatus) = load_zeros(ctx, q, height)?;
    let params = ResidualParams {
        mode,
        q,
        a,
        b,
        c,
        height,
    };
    let residuals = residual_grid(&params, &xs, &table, Some(&catalog))?;
    let fit = fit_exponent(&residuals)?;
    let observed_b = catalog.sets().iter().map(ZeroSet::observed_b).fold(0.0, f64::max);
    let bs = b_star(observed_b, q, x_max, &ctx.config.bstar);
    let mut r = Report::new("fit", &["x", "delta"]);
    r.param("mode", format!("{mode:?}").to_lowercase())
        .param("q", q)
        .param("height", height)
        .param("points", xs.len())
        .param("c1", ctx.config.bstar.c1)
        .param("epsilon", ctx.config.bstar.epsilon);
    match mode {
        ResidualMode::Thm14 => r.param("c", c),
        _ => r.param("a", a).param("b", b),
    };
    r.summary("fit", fit)
        .summary("rms_delta", rms_of(&residuals))
        .summary("observed_b", observed_b)
        .summary("b_star", bs)
        .summary("cache_sieve", sstatus.as_str())
        .summary("cache_zeros", zstatus.as_str());
    for &(x, delta) in &residuals {
        r.row(vec![x.into(), delta.into()]);
    }
    if let Some(d) = d {
        let consistent = fit.exponent <= 1.0 + d + FIT_SLACK;
        r.param("d", d).summary("consistent_with_d", consistent);
        r.verify(consistent);
    }
    if let Some(out) = &ctx.out {
        let companion = out.with_extension("csv");
        if companion != *out {
            crate::cache::atomic_write(&companion, r.to_csv().as_bytes())?;
        }
    }
    Ok(r)
}
