use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Result};
use log::info;
use ptthermo::{self as core, tol, ScanPoint, Scenario, ThermoRecord};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::manifest::{Check, RunManifest};
use crate::output::{fmt_num, numeric_rows, write_csv};

pub const CLOSED_HEADER: [&str; 4] = ["t", "w_closed", "lambda_plus", "lambda_minus"];
pub const OPEN_HEADER: [&str; 5] = [
    "t",
    "ergotropy",
    "lambda_plus",
    "lambda_minus",
    "trace_rho_g",
];
pub const LAWS_HEADER: [&str; 7] = ["t", "dU", "dW", "dQ_B", "residual", "sigma", "s_vn"];
pub const THIRD_LAW_HEADER: [&str; 2] = ["temperature", "max_entropy"];
pub const SWEEP_HEADER: [&str; 5] = [
    "r",
    "initial_ergotropy",
    "min_sigma",
    "max_residual",
    "status",
];

/// Default temperatures of a third-law scan.
pub const DEFAULT_TEMPERATURES: [f64; 4] = [10.0, 1.0, 0.1, 1e-3];

fn manifest(
    command: &str,
    config: &RunConfig,
    started: Instant,
    checks: Vec<Check>,
) -> Result<RunManifest> {
    let scenario = config.scenario();
    let regime = serde_json::to_value(scenario.regime()?)?
        .as_str()
        .unwrap_or_default()
        .to_string();
    let bath = scenario.bath()?;
    let mut notes = Vec::new();
    if bath.truncation_significant() {
        notes.push(format!(
            "bath truncated at d_B = {}: thermal weight {:.4} above the cutoff dropped and the state renormalized",
            bath.dim, bath.tail_mass
        ));
    }
    Ok(RunManifest {
        command: command.into(),
        config: config.clone(),
        version: env!("CARGO_PKG_VERSION").into(),
        regime,
        bath_tail_mass: bath.tail_mass,
        duration_seconds: started.elapsed().as_secs_f64(),
        notes,
        checks,
        third_law: None,
    })
}

fn prepare(config: &RunConfig) -> Result<Scenario> {
    config.validate()?;
    Ok(config.scenario())
}

/// Writes a manifest recording a run that aborted with `err`.
pub fn failure_manifest(
    command: &str,
    config: &RunConfig,
    err: &anyhow::Error,
) -> Result<RunManifest> {
    let check = Check::flag("run", false, format!("{err:#}"));
    let m = match manifest(command, config, Instant::now(), vec![check.clone()]) {
        Ok(m) => m,
        Err(_) => RunManifest {
            command: command.into(),
            config: config.clone(),
            version: env!("CARGO_PKG_VERSION").into(),
            regime: "invalid".into(),
            bath_tail_mass: f64::NAN,
            duration_seconds: 0.0,
            notes: Vec::new(),
            checks: vec![check],
            third_law: None,
        },
    };
    m.write(&config.output_dir)?;
    Ok(m)
}

fn finish(m: RunManifest, dir: &Path) -> Result<RunManifest> {
    m.write(dir)?;
    for c in &m.checks {
        info!(
            "{}: {} ({})",
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.detail
        );
    }
    Ok(m)
}

fn min_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::INFINITY, f64::min)
}

fn max_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::NEG_INFINITY, f64::max)
}

/// Ergotropy of the chosen state under the closed evolution generated by `H`.
pub fn cmd_closed_ergotropy(config: &RunConfig) -> Result<RunManifest> {
    let started = Instant::now();
    let scenario = prepare(config)?;
    let closed = scenario.closed()?;
    let series = closed.ergotropy_series(scenario.initial_state, &scenario.times()?)?;
    let rows = numeric_rows(
        series
            .iter()
            .map(|p| [p.t, p.ergotropy, p.lambda_plus, p.lambda_minus]),
    );
    write_csv(&config.output_dir.join("run.csv"), &CLOSED_HEADER, &rows)?;
    let w0 = series[0].ergotropy;
    let checks = vec![
        Check::at_least(
            "ergotropy_nonnegative",
            min_of(series.iter().map(|p| p.ergotropy)),
            -tol::ERGOTROPY_FLOOR,
        ),
        Check::at_most(
            "ergotropy_constant_under_closed_motion",
            max_of(series.iter().map(|p| (p.ergotropy - w0).abs())),
            tol::ERGOTROPY_AGREEMENT,
        ),
    ];
    finish(
        manifest("closed-ergotropy", config, started, checks)?,
        &config.output_dir,
    )
}

fn open_rows(records: &[ThermoRecord]) -> Vec<Vec<String>> {
    numeric_rows(records.iter().map(|r| {
        [
            r.t,
            r.ergotropy,
            r.lambda_plus,
            r.lambda_minus,
            r.trace_rho_g,
        ]
    }))
}

fn laws_rows(records: &[ThermoRecord]) -> Vec<Vec<String>> {
    numeric_rows(records.iter().map(|r| {
        [
            r.t,
            r.du,
            r.dw,
            r.dq_b,
            r.first_law_residual,
            r.sigma,
            r.s_vn,
        ]
    }))
}

fn open_checks(records: &[ThermoRecord]) -> Vec<Check> {
    vec![
        Check::at_most(
            "trace_preserved",
            max_of(records.iter().map(|r| (r.trace_rho_g - 1.0).abs())),
            tol::TRAJECTORY_TRACE,
        ),
        Check::at_least(
            "ergotropy_nonnegative",
            min_of(records.iter().map(|r| r.ergotropy)),
            -tol::ERGOTROPY_FLOOR,
        ),
    ]
}

fn laws_checks(records: &[ThermoRecord]) -> Vec<Check> {
    let entropy_excess = max_of(
        records
            .iter()
            .map(|r| (-r.s_vn).max(r.s_vn - std::f64::consts::LN_2)),
    );
    vec![
        Check::at_most(
            "first_law",
            max_of(records.iter().map(|r| r.first_law_residual.abs())),
            tol::FIRST_LAW,
        ),
        Check::at_least(
            "second_law",
            min_of(records.iter().map(|r| r.sigma)),
            -tol::SECOND_LAW,
        ),
        Check::at_most("entropy_bounds", entropy_excess, tol::ENTROPY_BOUNDS),
    ]
}

pub fn cmd_open_ergotropy(config: &RunConfig) -> Result<RunManifest> {
    let started = Instant::now();
    let scenario = prepare(config)?;
    let system = scenario.build()?;
    let records = system.run()?;
    write_csv(
        &config.output_dir.join("run.csv"),
        &OPEN_HEADER,
        &open_rows(&records),
    )?;
    let mut checks = open_checks(&records);
    checks.push(Check::at_most(
        "eta_unitarity",
        core::check_eta_unitarity(&system.composite, scenario.t_max)?,
        tol::ETA_UNITARITY,
    ));
    finish(
        manifest("open-ergotropy", config, started, checks)?,
        &config.output_dir,
    )
}

fn third_law_check(scan: &[ScanPoint]) -> Check {
    let last = scan.last().map_or(f64::NAN, |p| p.max_entropy);
    Check {
        name: "third_law".into(),
        passed: core::third_law_holds(scan, tol::THIRD_LAW_BOUND),
        value: last,
        tolerance: tol::THIRD_LAW_BOUND,
        detail: format!(
            "max entropy {} (must decrease, last < {})",
            scan.iter()
                .map(|p| format!("T={}: {:.6}", p.temperature, p.max_entropy))
                .collect::<Vec<_>>()
                .join(", "),
            tol::THIRD_LAW_BOUND
        ),
    }
}

/// First and second law time series; with `temperatures`, also a third-law sub-run.
pub fn cmd_laws(config: &RunConfig, temperatures: Option<&[f64]>) -> Result<RunManifest> {
    let started = Instant::now();
    let scenario = prepare(config)?;
    let records = scenario.build()?.run()?;
    write_csv(
        &config.output_dir.join("run.csv"),
        &LAWS_HEADER,
        &laws_rows(&records),
    )?;
    let mut checks = laws_checks(&records);
    let scan = match temperatures {
        Some(ts) => {
            let scan = core::third_law_scan(&scenario, ts)?;
            checks.push(third_law_check(&scan));
            Some(scan)
        }
        None => None,
    };
    let mut m = manifest("laws", config, started, checks)?;
    m.third_law = scan;
    finish(m, &config.output_dir)
}

pub fn cmd_third_law(config: &RunConfig, temperatures: &[f64]) -> Result<RunManifest> {
    let started = Instant::now();
    let scenario = prepare(config)?;
    let scan = core::third_law_scan(&scenario, temperatures)?;
    let rows = numeric_rows(scan.iter().map(|p| [p.temperature, p.max_entropy]));
    write_csv(&config.output_dir.join("run.csv"), &THIRD_LAW_HEADER, &rows)?;
    let mut m = manifest("third-law", config, started, vec![third_law_check(&scan)])?;
    m.third_law = Some(scan);
    finish(m, &config.output_dir)
}

/// Summary line of one sweep point.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub r: f64,
    pub initial_ergotropy: Option<f64>,
    pub min_sigma: Option<f64>,
    pub max_residual: Option<f64>,
    pub status: String,
}

pub fn sweep_dir(root: &Path, r: f64) -> PathBuf {
    root.join(format!("r_{r}"))
}

fn sweep_point(base: &RunConfig, r: f64) -> SweepRow {
    let config = RunConfig {
        r,
        output_dir: sweep_dir(&base.output_dir, r),
        ..base.clone()
    };
    let run = || -> Result<(Vec<ThermoRecord>, RunManifest)> {
        let started = Instant::now();
        let scenario = prepare(&config)?;
        let records = scenario.build()?.run()?;
        write_csv(
            &config.output_dir.join("run.csv"),
            &LAWS_HEADER,
            &laws_rows(&records),
        )?;
        write_csv(
            &config.output_dir.join("ergotropy.csv"),
            &OPEN_HEADER,
            &open_rows(&records),
        )?;
        let mut checks = laws_checks(&records);
        checks.extend(open_checks(&records));
        let m = finish(
            manifest("sweep", &config, started, checks)?,
            &config.output_dir,
        )?;
        Ok((records, m))
    };
    match run() {
        Ok((records, m)) => SweepRow {
            r,
            initial_ergotropy: Some(records[0].ergotropy),
            min_sigma: Some(min_of(records.iter().map(|x| x.sigma))),
            max_residual: Some(max_of(records.iter().map(|x| x.first_law_residual.abs()))),
            status: if m.passed() {
                "pass".into()
            } else {
                "fail: physics check".into()
            },
        },
        Err(e) => {
            log::error!("sweep point r = {r} failed: {e:#}");
            if let Err(io) = failure_manifest("sweep", &config, &e) {
                log::error!("could not write manifest for r = {r}: {io:#}");
            }
            SweepRow {
                r,
                initial_ergotropy: None,
                min_sigma: None,
                max_residual: None,
                status: format!("error: {e:#}"),
            }
        }
    }
}

/// One laws run per `r`, concurrently on up to `workers` threads, then `sweep.csv`.
pub fn cmd_sweep(
    base: &RunConfig,
    r_values: &[f64],
    workers: Option<usize>,
) -> Result<(Vec<SweepRow>, RunManifest)> {
    let started = Instant::now();
    if r_values.is_empty() {
        bail!("empty sweep");
    }
    base.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build()?;
    let rows: Vec<SweepRow> =
        pool.install(|| r_values.par_iter().map(|&r| sweep_point(base, r)).collect());

    let opt = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            vec![
                fmt_num(row.r),
                opt(row.initial_ergotropy),
                opt(row.min_sigma),
                opt(row.max_residual),
                row.status.clone(),
            ]
        })
        .collect();
    write_csv(&base.output_dir.join("sweep.csv"), &SWEEP_HEADER, &table)?;

    let checks = rows
        .iter()
        .map(|row| {
            Check::flag(
                &format!("r={}", row.r),
                row.status == "pass",
                row.status.clone(),
            )
        })
        .collect();
    let mut m = manifest("sweep", base, started, checks)?;
    m.regime = "sweep".into();
    m.write(&base.output_dir)?;
    Ok((rows, m))
}

/// Comma-separated list of reals.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| anyhow::anyhow!("bad number `{}`: {e}", s.trim()))
        })
        .collect()
}
