//! `simulate`, `crosscheck` and `reproduce-fig3`.

use std::path::PathBuf;

use qgt::graph::GtParams;
use qgt::sim::{de_crosscheck, sweep, RunOptions, SimConfig, SimTable, Verdict};

use super::{emit, with_jobs};
use crate::config::{merge, percent, require, require_seed, snapshot};
use crate::error::{CliError, CliResult};
use crate::manifest::Recorder;
use crate::{CrosscheckArgs, Fig3Args, SimulateArgs};

const DEFAULT_TRIALS: usize = 100;
const DEFAULT_CROSSCHECK_TRIALS: usize = 20;
const FIG3_N: usize = 210_000;

fn gamma_grid(values: &[f64]) -> CliResult<Vec<f64>> {
    if values.is_empty() {
        return Err(CliError::Usage("missing required parameter --gamma".into()));
    }
    values.iter().map(|&g| percent(g, "gamma")).collect()
}

fn run_options(trials: Option<usize>, seed: u64, max_iters: Option<usize>) -> RunOptions {
    let mut run = RunOptions::new(trials.unwrap_or(DEFAULT_TRIALS), seed);
    if let Some(m) = max_iters {
        run.max_iters = m;
    }
    run
}

fn warn_if_not_monotone(table: &SimTable, label: &str) {
    if !table.monotone {
        eprintln!("warning: {label}misdetection is not monotone in gamma beyond noise");
    }
}

pub fn simulate(flags: SimulateArgs) -> CliResult<()> {
    let args: SimulateArgs = merge(&flags, flags.config.as_deref())?;
    let seed = require_seed(args.seed)?;
    let mut rec = Recorder::new("simulate", snapshot(&args)?, Some(seed));
    let params = args.ensemble.params()?;
    let mut run = run_options(args.trials, seed, args.max_iters);
    run.fresh_graph_per_trial = !args.fixed_graph;
    let config = SimConfig {
        params,
        gamma_grid: gamma_grid(&args.gamma)?,
        run,
    };
    let table = with_jobs(args.jobs, || sweep(&config))??;
    warn_if_not_monotone(&table, "");
    emit(&mut rec, args.csv.as_deref(), &table.to_csv())?;
    if let Some(json) = &args.json {
        rec.write(json, &format!("{}\n", serde_json::to_string_pretty(&table)?))?;
    }
    rec.finish()
}

pub fn crosscheck(flags: CrosscheckArgs) -> CliResult<()> {
    let args: CrosscheckArgs = merge(&flags, flags.config.as_deref())?;
    let seed = require_seed(args.seed)?;
    let mut rec = Recorder::new("crosscheck", snapshot(&args)?, Some(seed));
    let params = args.ensemble.params()?;
    let gamma = percent(require(args.gamma, "gamma")?, "gamma")?;
    let ells = if args.ell.is_empty() { vec![1, 2, 3] } else { args.ell.clone() };
    let trials = args.trials.unwrap_or(DEFAULT_CROSSCHECK_TRIALS);
    if trials < 2 {
        return Err(CliError::Usage("--trials must be at least 2".into()));
    }
    let mut reports = Vec::new();
    let mut worst = Verdict::Pass;
    for &ell in &ells {
        let r = de_crosscheck(&params, gamma, ell, trials, seed)?;
        let verdict = r.verdict();
        println!(
            "ell={ell} cells={} tested={} max|z|={:.2} {}",
            r.cells.len(),
            r.tested_cells(),
            r.max_abs_z,
            serde_json::to_value(verdict)?.as_str().unwrap_or_default()
        );
        worst = match (worst, verdict) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Warn, _) | (_, Verdict::Warn) => Verdict::Warn,
            _ => Verdict::Pass,
        };
        reports.push(r);
    }
    if let Some(json) = &args.json {
        rec.write(json, &format!("{}\n", serde_json::to_string_pretty(&reports)?))?;
    }
    rec.finish()?;
    if worst == Verdict::Fail {
        return Err(CliError::Runtime("decoder statistics deviate from DE beyond 5 sigma".into()));
    }
    Ok(())
}

/// `(d_v, d_vx, d_c)` and default grid in percent.
type Curve = ((usize, usize, usize), &'static [f64]);

/// Ensemble and default grid of each finite-length curve.
fn fig3_curve(q: usize) -> CliResult<Curve> {
    match q {
        1 => Ok((
            (6, 6, 120),
            &[0.59, 0.605, 0.61, 0.62, 0.63, 0.64, 0.647, 0.65, 0.66, 0.67, 0.68],
        )),
        5 => Ok(((7, 2, 140), &[0.70, 0.71, 0.715, 0.73, 0.745, 0.77, 0.80, 0.85])),
        10 => Ok((
            (7, 3, 140),
            &[0.735, 0.745, 0.75, 0.755, 0.76, 0.765, 0.775, 0.80, 0.85, 0.90],
        )),
        _ => Err(CliError::Usage(format!("no finite-length curve defined for q = {q} (use 1, 5 or 10)"))),
    }
}

pub fn reproduce_fig3(flags: Fig3Args) -> CliResult<()> {
    let args: Fig3Args = merge(&flags, flags.config.as_deref())?;
    let seed = require_seed(args.seed)?;
    let mut rec = Recorder::new("reproduce-fig3", snapshot(&args)?, Some(seed));
    let qs = if args.q.is_empty() { vec![1, 5, 10] } else { args.q.clone() };
    let n = args.n.unwrap_or(FIG3_N);
    let out_dir = args.out_dir.clone().unwrap_or_else(|| PathBuf::from("fig3"));
    let mut configs = Vec::new();
    for &q in &qs {
        let ((d_v, d_vx, d_c), grid) = fig3_curve(q)?;
        let grid = if args.gamma.is_empty() { grid } else { &args.gamma[..] };
        configs.push(SimConfig {
            params: GtParams::derive(n, q, d_v, d_vx, d_c)?,
            gamma_grid: gamma_grid(grid)?,
            run: run_options(args.trials, seed, args.max_iters),
        });
    }
    for config in &configs {
        let q = config.params.q;
        let table = with_jobs(args.jobs, || sweep(config))??;
        warn_if_not_monotone(&table, &format!("q = {q}: "));
        for r in &table.rows {
            eprintln!("q={q} gamma={}% misdetection={:.4e}", 100.0 * r.gamma, r.misdetection_rate);
        }
        rec.write(&out_dir.join(format!("fig3_q{q}.csv")), &table.to_csv())?;
        rec.write(
            &out_dir.join(format!("fig3_q{q}.json")),
            &format!("{}\n", serde_json::to_string_pretty(&table)?),
        )?;
    }
    rec.finish()
}
