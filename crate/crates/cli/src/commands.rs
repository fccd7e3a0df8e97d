use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use casimir_core::force::{
    self, asymptote_crossover, asymptote_far_classical, asymptote_far_t0, asymptote_near_classical, asymptote_near_t0,
    fluctuation_variance, ForceError, ForceResult, ThermalState,
};
use casimir_core::sampler::{matsubara_channels, run_calibration, write_trace, SamplerConfig};
use casimir_core::spectrum::{spectrum_for, spectrum_rows, BoundaryCondition, CrossSection, RasterInfo, Spectrum};

use crate::config::{separation_grid, RegimeSpec, RunConfig, Units};
use crate::error::CliError;
use crate::output::{emit, Cell, Table};

/// Default `converge` grid, in units of the scale length.
const CONVERGE_GRID: (f64, f64, usize) = (0.05, 5.0, 30);

#[derive(Debug, Serialize)]
struct Provenance<'a> {
    program: &'static str,
    version: &'static str,
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    cross_section: Option<&'a CrossSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scale_length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    area: Option<f64>,
    n_per_set: usize,
    bcs: &'a [BoundaryCondition],
    #[serde(flatten)]
    regime: RegimeSpec,
    units: Units,
    tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    raster: Option<&'a RasterInfo>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    extra: serde_json::Value,
}

fn provenance<'a>(command: &'static str, cfg: &'a RunConfig, spec: Option<&'a Spectrum>) -> Provenance<'a> {
    Provenance {
        program: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        cross_section: cfg.geometry.as_ref(),
        scale_length: cfg.geometry.as_ref().map(CrossSection::scale_length),
        area: spec.map(|s| s.area),
        n_per_set: spec.map_or(cfg.modes, |s| s.n_requested),
        bcs: &cfg.bcs,
        regime: cfg.regime,
        units: cfg.units,
        tol: cfg.tol,
        raster: spec.and_then(|s| s.raster.as_ref()),
        extra: serde_json::Value::Null,
    }
}

fn write_table<P: Serialize>(cfg: &RunConfig, table: &Table, prov: &P) -> Result<(), CliError> {
    let bytes = table.render(cfg.format, prov)?;
    emit(cfg.out.as_deref(), &bytes)
}

pub fn spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = spectrum_for(cfg.geometry()?, cfg.modes, &cfg.bcs)?;
    let mut table = Table::new(["index", "bc", "lambda", "lambda_sq", "degeneracy", "label", "error_estimate"]);
    for (i, row) in spectrum_rows(&spec).into_iter().enumerate() {
        table.push(vec![
            i.into(),
            row.bc.as_str().into(),
            row.lambda.into(),
            row.lambda_sq.into(),
            row.degeneracy.into(),
            row.label.into(),
            row.error_estimate.into(),
        ]);
    }
    write_table(cfg, &table, &provenance("spectrum", cfg, Some(&spec)))
}

/// Force at one separation. A result that missed the tolerance comes back
/// with `converged = false` instead of as an error.
fn force_at(spec: &Spectrum, l: f64, regime: RegimeSpec, th: &ThermalState, tol: f64) -> Result<(ForceResult, bool), CliError> {
    let r = match regime {
        RegimeSpec::ZeroT => force::force_zero_t(spec, l, th, tol),
        RegimeSpec::FiniteT { .. } => force::force_finite_t(spec, l, th, tol),
        RegimeSpec::Classical { beta } => force::force_classical(spec, l, beta, tol),
    };
    match r {
        Ok(r) => Ok((r, true)),
        Err(ForceError::ToleranceUnreachable { partial, .. }) => Ok((*partial, false)),
        Err(e) => Err(e.into()),
    }
}

/// Near- and far-separation asymptotes. Finite temperature uses the
/// zero-temperature pair.
fn asymptotes(spec: &Spectrum, l: f64, regime: RegimeSpec, th: &ThermalState) -> (f64, f64) {
    let (lambda1, g1) = spec.lowest().unwrap_or((f64::NAN, 0));
    match regime {
        RegimeSpec::Classical { beta } => (
            asymptote_near_classical(spec.area, l, beta),
            asymptote_far_classical(g1, lambda1, l, beta),
        ),
        _ => {
            let t0 = ThermalState::zero_temperature().with_units(th.hbar, th.c);
            (asymptote_near_t0(spec.area, l, &t0), asymptote_far_t0(g1, lambda1, l, &t0))
        }
    }
}

fn unconverged(count: usize, total: usize) -> CliError {
    CliError::Tolerance(format!(
        "{count} of {total} rows missed the requested tolerance (converged = false in the output)"
    ))
}

pub fn force(cfg: &RunConfig) -> Result<(), CliError> {
    let cs = cfg.geometry()?;
    let ls = cfg
        .separations
        .as_ref()
        .ok_or_else(|| CliError::Config("force needs --L or --L-grid".into()))?;
    let spec = spectrum_for(cs, cfg.modes, &cfg.bcs)?;
    let th = cfg.thermal();
    let scale = cs.scale_length();

    let results: Vec<(ForceResult, bool)> = ls
        .par_iter()
        .map(|&l| force_at(&spec, l, cfg.regime, &th, cfg.tol))
        .collect::<Result<_, _>>()?;

    let mut table = Table::new([
        "L",
        "L_over_R",
        "force",
        "force_times_R2",
        "sigma2",
        "n_modes",
        "m_cutoff",
        "tail_estimate",
        "mode_tail_estimate",
        "regime",
        "asymptote_near",
        "asymptote_far",
        "converged",
    ]);
    for (&l, (r, ok)) in ls.iter().zip(&results) {
        let (near, far) = asymptotes(&spec, l, cfg.regime, &th);
        table.push(vec![
            l.into(),
            (l / scale).into(),
            r.force.into(),
            (r.force * scale * scale).into(),
            fluctuation_variance(r.force).into(),
            r.n_modes_used.into(),
            r.m_cutoff.into(),
            r.tail_estimate.into(),
            r.mode_tail_estimate.into(),
            r.regime.as_str().into(),
            near.into(),
            far.into(),
            (*ok).into(),
        ]);
    }
    write_table(cfg, &table, &provenance("force", cfg, Some(&spec)))?;

    let missed = results.iter().filter(|(_, ok)| !ok).count();
    if missed > 0 {
        return Err(unconverged(missed, results.len()));
    }
    Ok(())
}

pub fn converge(cfg: &RunConfig) -> Result<(), CliError> {
    let cs = cfg.geometry()?;
    let scale = cs.scale_length();
    let ls = match &cfg.separations {
        Some(ls) => ls.clone(),
        None => {
            let (lo, hi, n) = CONVERGE_GRID;
            separation_grid(lo * scale, hi * scale, n, true)?
        }
    };
    let n_max = *cfg.n_list.iter().max().expect("n_list is validated non-empty");
    let full = spectrum_for(cs, n_max, &cfg.bcs)?;
    let spectra: Vec<Spectrum> = cfg.n_list.iter().map(|&n| full.truncated_per_set(n)).collect();
    let th = cfg.thermal();

    let rows: Vec<Vec<(ForceResult, bool)>> = ls
        .par_iter()
        .map(|&l| {
            spectra
                .iter()
                .map(|s| force_at(s, l, cfg.regime, &th, cfg.tol))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;

    let mut columns = vec!["L".to_string(), "L_over_R".to_string()];
    columns.extend(cfg.n_list.iter().map(|n| format!("force_times_R2_N{n}")));
    columns.extend(["asymptote_near_times_R2", "asymptote_far_times_R2", "converged"].map(String::from));
    let mut table = Table::new(columns);
    let r2 = scale * scale;
    for (&l, forces) in ls.iter().zip(&rows) {
        let (near, far) = asymptotes(&full, l, cfg.regime, &th);
        let mut row: Vec<Cell> = vec![l.into(), (l / scale).into()];
        row.extend(forces.iter().map(|(r, _)| Cell::from(r.force * r2)));
        row.push((near * r2).into());
        row.push((far * r2).into());
        row.push(forces.iter().all(|(_, ok)| *ok).into());
        table.push(row);
    }

    let (lambda1, g1) = full.lowest().unwrap_or((f64::NAN, 0));
    let classical = matches!(cfg.regime, RegimeSpec::Classical { .. });
    let (l_cross, ratio) = asymptote_crossover(full.area, g1, lambda1, classical);
    eprintln!(
        "asymptote crossover (closest approach) at L/R = {:.4}, near/far = {:.4}",
        l_cross / scale,
        ratio
    );
    let mut prov = provenance("converge", cfg, Some(&full));
    prov.extra = json!({
        "n_list": cfg.n_list,
        "crossover": { "L": l_cross, "L_over_R": l_cross / scale, "near_over_far": ratio },
    });
    write_table(cfg, &table, &prov)?;

    let missed = rows.iter().filter(|r| r.iter().any(|(_, ok)| !ok)).count();
    if missed > 0 {
        return Err(unconverged(missed, rows.len()));
    }
    Ok(())
}

/// The Matsubara set the calibration samples: one transverse mode
/// `lambda = 1` at `Lambda = 1`, `|m| <= 4`.
fn calibration_set() -> Result<Vec<casimir_core::sampler::ModeChannel>, CliError> {
    let th = ThermalState::natural(2.0 * std::f64::consts::PI);
    Ok(matsubara_channels(1.0, &th, 4)?)
}

pub fn sample(cfg: &RunConfig) -> Result<(), CliError> {
    let sc: SamplerConfig = cfg.sampler;
    let report = run_calibration(&sc)?;

    if let Some(path) = &cfg.trace {
        let mut buf = Vec::new();
        write_trace(&mut buf, &calibration_set()?, &sc, 0)?;
        emit(Some(path), &buf)?;
    }

    let mut table = Table::new(["check", "estimate", "stderr", "expected", "z", "passed", "samples"]);
    for c in &report.checks {
        eprintln!(
            "{} {} (z = {:.2})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.z
        );
        table.push(vec![
            c.name.as_str().into(),
            c.estimate.into(),
            c.stderr.into(),
            c.expected.into(),
            c.z.into(),
            c.passed.into(),
            c.samples.into(),
        ]);
    }
    let prov = json!({
        "program": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": "sample",
        "sampler": report.config,
        "z_limit": casimir_core::sampler::Z_LIMIT,
        "matsubara_closed_form": report.matsubara_closed_form,
    });
    write_table(cfg, &table, &prov)?;

    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if !failed.is_empty() {
        return Err(CliError::Statistical(failed.join(", ")));
    }
    Ok(())
}
