//! One function per subcommand. Each validates its arguments, runs the
//! library and returns tables plus summary statistics.

use std::path::Path;

use serde_json::json;
use wigner::deloc::{deloc_report, NormExponent};
use wigner::dbm::{convergence_order, dbm_path, heat_flow, compensated_density};
use wigner::ensemble::{sample_wigner, EnsembleSpec, EntryLaw};
use wigner::grid::DensityGrid;
use wigner::jkernel::{symmetric_normalized, ContourParams, KernelQuery};
use wigner::localstats::{iid_semicircle_spectrum, poisson_spectrum, pair_correlation, rescale_near, DEFAULT_MAX_DISTANCE};
use wigner::matrix::HermitianMatrix;
use wigner::mc::Runner;
use wigner::selftest::selftest;
use wigner::semicircle::{avg_dos_grid, deviation_fraction, dos_estimate, rho_sc, semicircle_quantiles, EnergyWindow};
use wigner::spectral::{eigenvalues, hermitian_eig};
use wigner::stats::MeanEstimate;
use wigner::stieltjes::{stieltjes_scan, UpperHalfPoint};

use crate::args::*;
use crate::output::{num, Criterion, RunOutput, Table};
use crate::CliError;

pub fn run(cli: &Cli) -> Result<RunOutput, CliError> {
    if cli.global.workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let runner = Runner::new(cli.global.seed, cli.global.workers);
    let seed = cli.global.seed;
    match &cli.command {
        Command::Sample(a) => sample(a, seed, &runner),
        Command::Dos(a) => dos(a, seed, &runner),
        Command::Stieltjes(a) => stieltjes(a, seed, &runner),
        Command::Deloc(a) => deloc(a, seed, &runner),
        Command::Spacing(a) => spacing(a, seed, &runner),
        Command::Dbm(a) => dbm(a, seed, &runner),
        Command::Flow(a) => flow(a),
        Command::Kernel(a) => kernel(a),
        Command::Selftest => self_test(),
    }
}

fn spec_of(a: &EnsembleArgs, seed: u64) -> Result<EnsembleSpec, CliError> {
    if a.reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }
    Ok(EnsembleSpec::new(a.n, EntryLaw::parse(&a.law)?, a.t, seed)?)
}

fn output(tables: Vec<Table>, statistics: serde_json::Value) -> RunOutput {
    RunOutput {
        tables,
        statistics,
        criteria: Vec::new(),
    }
}

fn sample(a: &SampleArgs, seed: u64, runner: &Runner) -> Result<RunOutput, CliError> {
    let spec = spec_of(&a.ensemble, seed)?;
    let spectra = runner.run(a.ensemble.reps, |_, s| eigenvalues(&sample_wigner::<f64>(&spec, s)?))?;
    let mut t = Table::new("spectra", &["rep", "index", "mu"]);
    for (r, eigs) in spectra.iter().enumerate() {
        for (i, mu) in eigs.iter().enumerate() {
            t.push(vec![r.to_string(), i.to_string(), num(*mu)]);
        }
    }
    let stats = json!({ "n": spec.n, "reps": a.ensemble.reps });
    Ok(output(vec![t], stats))
}

fn dos(a: &DosArgs, seed: u64, runner: &Runner) -> Result<RunOutput, CliError> {
    let spec = spec_of(&a.ensemble, seed)?;
    let reps = a.ensemble.reps;
    let mut t = Table::new("dos", &["E", "scale_kind", "scale", "estimate", "stderr", "reps", "seed"]);
    let mut stats = Vec::new();
    if a.average {
        if a.eps.is_empty() || !a.k.is_empty() || !a.eta.is_empty() {
            return Err(CliError::Usage("--average takes --eps only".into()));
        }
        let grid = avg_dos_grid::<f64>(&spec, &a.e, &a.eps, reps, runner)?;
        for (i, &e) in a.e.iter().enumerate() {
            for (j, &eps) in a.eps.iter().enumerate() {
                let m = grid[i][j];
                t.push(vec![num(e), "average-eps".into(), num(eps), num(m.mean), num(m.stderr), reps.to_string(), seed.to_string()]);
                stats.push(json!({ "E": e, "eps": eps, "mean": m.mean, "stderr": m.stderr, "rho_sc": rho_sc(e) }));
            }
        }
        return Ok(output(vec![t], json!({ "points": stats })));
    }
    let mut windows = Vec::new();
    for &e in &a.e {
        windows.extend(a.k.iter().map(|&k| EnergyWindow::microscopic(e, k)));
        windows.extend(a.eta.iter().map(|&v| EnergyWindow::absolute(e, v)));
        windows.extend(a.eps.iter().map(|&v| EnergyWindow::vanishing(e, v)));
        if a.k.is_empty() && a.eta.is_empty() && a.eps.is_empty() {
            windows.push(EnergyWindow::microscopic(e, 40.0));
        }
    }
    // one diagonalization per realization serves every window
    let per_rep = runner.run(reps, |_, s| {
        let eigs = eigenvalues(&sample_wigner::<f64>(&spec, s)?)?;
        windows.iter().map(|w| dos_estimate(&eigs, w, spec.n)).collect::<wigner::Result<Vec<_>>>()
    })?;
    for (k, w) in windows.iter().enumerate() {
        let xs: Vec<f64> = per_rep.iter().map(|r| r[k]).collect();
        let m = MeanEstimate::from_samples(&xs);
        t.push(vec![
            num(w.center),
            w.scale.kind().into(),
            num(w.scale.value()),
            num(m.mean),
            num(m.stderr),
            reps.to_string(),
            seed.to_string(),
        ]);
        let mut s = json!({ "E": w.center, "scale_kind": w.scale.kind(), "scale": w.scale.value(), "mean": m.mean, "stderr": m.stderr, "rho_sc": rho_sc(w.center) });
        if let Some(delta) = a.delta {
            s["tail"] = serde_json::to_value(deviation_fraction(&xs, rho_sc(w.center), delta)).expect("plain data");
            s["delta"] = json!(delta);
        }
        stats.push(s);
    }
    Ok(output(vec![t], json!({ "windows": stats })))
}

fn stieltjes(a: &StieltjesArgs, seed: u64, runner: &Runner) -> Result<RunOutput, CliError> {
    let spec = spec_of(&a.ensemble, seed)?;
    let mut etas: Vec<f64> = a.eta.clone();
    etas.extend(a.eta_scaled.iter().map(|c| c / spec.n as f64));
    if etas.is_empty() {
        etas.push(20.0 / spec.n as f64);
    }
    let points = a
        .e
        .iter()
        .flat_map(|&e| etas.iter().map(move |&eta| UpperHalfPoint::new(e, eta)))
        .collect::<wigner::Result<Vec<_>>>()?;
    let res = stieltjes_scan::<f64>(&spec, &points, a.ensemble.reps, runner)?;
    let mut t = Table::new(
        "stieltjes",
        &["E", "eta", "re_mN", "im_mN", "re_msc", "im_msc", "residual", "reps", "stderr"],
    );
    for p in &res {
        t.push(vec![
            num(p.e),
            num(p.eta),
            num(p.m_n.re),
            num(p.m_n.im),
            num(p.m_sc.re),
            num(p.m_sc.im),
            num(p.residual),
            p.reps.to_string(),
            num(p.stderr),
        ]);
    }
    let worst = res.iter().map(|p| (p.m_n - p.m_sc).norm()).fold(0.0, f64::max);
    Ok(output(vec![t], json!({ "max_abs_mN_minus_msc": worst, "points": res.len() })))
}

fn deloc(a: &DelocArgs, seed: u64, runner: &Runner) -> Result<RunOutput, CliError> {
    let spec = spec_of(&a.ensemble, seed)?;
    let p: NormExponent = a.p.parse()?;
    if !(a.bulk_margin >= 0.0 && a.bulk_margin < 2.0) {
        return Err(CliError::Usage("--bulk-margin must lie in [0, 2)".into()));
    }
    let reports = runner.run(a.ensemble.reps, |_, s| {
        let dec = hermitian_eig(&sample_wigner::<f64>(&spec, s)?, true)?;
        deloc_report(&dec, p, a.bulk_margin)
    })?;
    let mut t = Table::new("deloc", &["rep", "mu", "p", "M"]);
    let mut summary = Vec::new();
    let ln_n = (spec.n as f64).ln();
    for (r, rep) in reports.iter().enumerate() {
        for rec in &rep.records {
            t.push(vec![r.to_string(), num(rec.mu), rec.p.to_string(), num(rec.m)]);
        }
        summary.push(json!({
            "rep": r,
            "bulk_count": rep.bulk_count,
            "bulk_max": rep.bulk_max,
            "bulk_median": rep.bulk_median,
            "bulk_q90": rep.bulk_q90,
            "bulk_max_sq_over_ln_n": rep.bulk_max * rep.bulk_max / ln_n,
        }));
    }
    Ok(output(vec![t], json!({ "n": spec.n, "p": p.to_string(), "bulk_margin": a.bulk_margin, "reps": summary })))
}

fn spacing(a: &SpacingArgs, seed: u64, runner: &Runner) -> Result<RunOutput, CliError> {
    let spec = spec_of(&a.ensemble, seed)?;
    let (n, e, w) = (spec.n, a.e, a.half_width);
    let unfolded = runner.run(a.ensemble.reps, |_, s| {
        let raw = match a.source {
            SpacingSource::Ensemble => eigenvalues(&sample_wigner::<f64>(&spec, s)?)?,
            SpacingSource::Poisson => poisson_spectrum(e, n, w, s)?,
            SpacingSource::IidSemicircle => iid_semicircle_spectrum(n, s),
        };
        rescale_near(&raw, e, n, w)
    })?;
    let est = pair_correlation(&unfolded, w, a.bin_width, DEFAULT_MAX_DISTANCE, e)?;
    let mut t = Table::new("spacing", &["r", "R2_hat", "stderr", "R2_sine"]);
    for b in 0..est.centers.len() {
        t.push(vec![num(est.centers[b]), num(est.values[b]), num(est.stderr[b]), num(est.sine_reference[b])]);
    }
    let stats = json!({
        "E": e,
        "W": w,
        "bins": est.centers.len(),
        "bin_width": a.bin_width,
        "reps": est.reps,
        "seed": seed,
        "source": a.source,
        "max_sine_deviation_0.1_2.5": est.max_sine_deviation(0.1, 2.5),
        "max_flat_deviation_0.1_2.5": est.max_flat_deviation(0.1, 2.5),
    });
    Ok(output(vec![t], stats))
}

fn dbm(a: &DbmArgs, seed: u64, runner: &Runner) -> Result<RunOutput, CliError> {
    if a.reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }
    let start: Option<HermitianMatrix<f64>> = if a.y.is_empty() {
        None
    } else {
        Some(HermitianMatrix::diagonal(&a.y))
    };
    let n = start.as_ref().map_or(a.n, |h| h.n());
    let spec = EnsembleSpec::new(n, EntryLaw::parse(&a.law)?, 0.0, seed)?;
    let paths = runner.run(a.reps, |_, s| {
        let h0 = match &start {
            Some(h) => h.clone(),
            None => sample_wigner::<f64>(&spec, s)?,
        };
        dbm_path(&h0, &a.times, s)
    })?;
    let mut t = Table::new("dbm", &["path", "time", "index", "mu"]);
    for (k, p) in paths.iter().enumerate() {
        for (time, spec) in p.times.iter().zip(&p.spectra) {
            for (i, mu) in spec.iter().enumerate() {
                t.push(vec![k.to_string(), num(*time), i.to_string(), num(*mu)]);
            }
        }
    }
    Ok(output(vec![t], json!({ "n": n, "paths": a.reps, "times": a.times })))
}

fn flow(a: &FlowArgs) -> Result<RunOutput, CliError> {
    let h = match &a.density {
        Some(p) => DensityGrid::<f64>::load_csv(p)?,
        None => {
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(a.sigma > 0.0) || !(a.grid_half_width > 0.0) || a.points < 16 {
                return Err(CliError::Usage("need sigma > 0, grid half-width > 0 and at least 16 points".into()));
            }
            let dx = 2.0 * a.grid_half_width / (a.points - 1) as f64;
            let s2 = a.sigma * a.sigma;
            let norm = (2.0 * std::f64::consts::PI * s2).sqrt();
            DensityGrid::from_fn(-a.grid_half_width, dx, a.points, |x: f64| (-x * x / (2.0 * s2)).exp() / norm)?
        }
    };
    let mut errors = Table::new("errors", &["n", "t", "error"]);
    let mut dens = Table::new("density", &["n", "t", "x", "h", "h_tilde", "flowed"]);
    let mut fits = Vec::new();
    for &n in &a.orders {
        let fit = convergence_order(&h, &a.times, n)?;
        for (&t, &e) in fit.times.iter().zip(&fit.errors) {
            errors.push(vec![n.to_string(), num(t), num(e)]);
            let comp = compensated_density(&h, t, n)?;
            let back = heat_flow(&comp, t)?;
            for i in 0..comp.len() {
                dens.push(vec![
                    n.to_string(),
                    num(t),
                    num(comp.x(i)),
                    num(h.values()[i]),
                    num(comp.values[i]),
                    num(back.values[i]),
                ]);
            }
        }
        fits.push(fit);
    }
    let stats = json!({
        "orders": fits.iter().map(|f| json!({ "n": f.n, "fitted_order": f.order, "expected": f.n + 1 })).collect::<Vec<_>>(),
        "mass": h.mass(),
        "variance": h.variance(),
    });
    Ok(output(vec![errors, dens], stats))
}

fn read_y(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let cell = line.split(',').next().unwrap_or("").trim();
        if cell.is_empty() {
            continue;
        }
        match cell.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(CliError::Usage(format!("{}: line {}: not a number", path.display(), i + 1))),
        }
    }
    Ok(out)
}

fn kernel(a: &KernelArgs) -> Result<RunOutput, CliError> {
    let y = match &a.y_file {
        Some(p) => read_y(p)?,
        None => {
            if a.n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            semicircle_quantiles::<f64>(a.n)
        }
    };
    let n = y.len();
    let d = ContourParams::defaults(a.e, a.t, n);
    let params = ContourParams {
        delta: a.delta.unwrap_or(d.delta),
        kappa: a.kappa.unwrap_or(d.kappa),
        r: a.r.unwrap_or(d.r),
        half_length: a.s.unwrap_or(d.half_length),
        nodes: a.nodes.unwrap_or(d.nodes),
        tolerance: a.tolerance.unwrap_or(d.tolerance),
    };
    // validates y, t and the bulk condition up front
    KernelQuery::rescaled(a.e, a.t, y.clone(), a.x1, a.x1)?;
    let mut t = Table::new(
        "kernel",
        &["x1", "x2", "re_K", "im_K", "normalized", "sinc", "abs_err", "error_estimate"],
    );
    let mut worst: f64 = 0.0;
    for &x2 in &a.x2 {
        let row = symmetric_normalized(a.e, a.t, &y, a.x1, x2, &params)?;
        worst = worst.max(row.abs_err);
        t.push(vec![
            num(row.x1),
            num(row.x2),
            num(row.raw.re),
            num(row.raw.im),
            num(row.normalized),
            num(row.sinc),
            num(row.abs_err),
            num(row.error_estimate),
        ]);
    }
    let stats = json!({ "n": n, "t": a.t, "E": a.e, "contour": params, "max_abs_err": worst });
    Ok(output(vec![t], stats))
}

fn self_test() -> Result<RunOutput, CliError> {
    let report = selftest();
    let mut t = Table::new("selftest", &["check", "passed", "worst", "tolerance", "detail"]);
    let mut criteria = Vec::new();
    for c in &report.checks {
        t.push(vec![c.name.into(), c.passed.to_string(), num(c.worst), num(c.tolerance), c.detail.clone()]);
        criteria.push(Criterion {
            name: c.name.into(),
            passed: c.passed,
            detail: format!("worst {:e} vs tolerance {:e}", c.worst, c.tolerance),
        });
    }
    Ok(RunOutput {
        tables: vec![t],
        statistics: json!({ "passed": report.passed() }),
        criteria,
    })
}
