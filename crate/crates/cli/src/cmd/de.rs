//! `de-threshold`, `de-rate` and `reproduce-table1`.

use rayon::prelude::*;

use qgt::de::{gamma_threshold, min_rate, Averaging, DeConfig, ThresholdResult};

use super::{tee, with_jobs};
use crate::config::{merge, percent, require, snapshot};
use crate::error::{CliError, CliResult};
use crate::manifest::Recorder;
use crate::{AveragingArg, DeNumerics, DeRateArgs, DeThresholdArgs, Table1Args};

const DEFAULT_UPPER_PERCENT: f64 = 5.0;
const DEFAULT_MAX_DC: usize = 4000;
/// Threshold table rate 5%, as `d_c = 20 d_v`.
const TABLE1_DC_PER_DV: usize = 20;

impl DeNumerics {
    /// A DE configuration with these numerics applied.
    fn config(&self, q: usize, d_v: usize, d_vx: usize, d_c: usize, gamma: f64) -> CliResult<DeConfig> {
        let mut cfg = DeConfig::new(q, d_v, d_vx, d_c, gamma)?;
        if let Some(e) = self.eps_tail {
            cfg.eps_tail = e;
        }
        if let Some(d) = self.delta {
            cfg.delta_success = d;
        }
        if let Some(m) = self.max_de_iters {
            cfg.max_de_iters = m;
        }
        if let Some(t) = self.tol {
            cfg.bisection_tol = percent(t, "tol")?;
        }
        if let Some(a) = self.averaging {
            cfg.averaging = match a {
                AveragingArg::DistinctValue => Averaging::DistinctValue,
                AveragingArg::Conditional => Averaging::Conditional,
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn resolve_dvx(q: usize, d_v: usize, d_vx: Option<usize>) -> CliResult<usize> {
    match (d_vx, q) {
        (Some(x), _) => Ok(x),
        (None, 1) => Ok(d_v),
        (None, _) => Err(CliError::Usage("missing required parameter --dvx".into())),
    }
}

/// `d_c` from `--dc`, or from `--omega` when it gives an integer.
fn resolve_dc(d_v: usize, dc: Option<usize>, omega: Option<f64>) -> CliResult<usize> {
    match (dc, omega) {
        (Some(dc), _) => Ok(dc),
        (None, Some(w)) => {
            let exact = d_v as f64 / percent(w, "omega")?;
            let dc = exact.round();
            if dc < 1.0 || (exact - dc).abs() > 1e-6 {
                return Err(CliError::Usage(format!(
                    "--omega {w} gives d_c = {exact}, which is not an integer"
                )));
            }
            Ok(dc as usize)
        }
        (None, None) => Err(CliError::Usage("missing --dc or --omega".into())),
    }
}

const THRESHOLD_HEADER: &str = "q,d_v,d_vx,d_c,omega,gamma_th,bracket_lo,bracket_hi,iters";

fn threshold_row(r: &ThresholdResult) -> String {
    let c = &r.config;
    format!(
        "{},{},{},{},{},{:.6},{:.6},{:.6},{}\n",
        c.q,
        c.d_v,
        c.d_vx,
        c.d_c,
        100.0 * c.omega(),
        100.0 * r.value,
        100.0 * r.bracket.0,
        100.0 * r.bracket.1,
        r.iters_at_threshold
    )
}

pub fn de_threshold(flags: DeThresholdArgs) -> CliResult<()> {
    let args: DeThresholdArgs = merge(&flags, flags.config.as_deref())?;
    let mut rec = Recorder::new("de-threshold", snapshot(&args)?, None);
    let q = require(args.q, "q")?;
    let d_v = require(args.dv, "dv")?;
    let d_vx = resolve_dvx(q, d_v, args.dvx)?;
    let d_c = resolve_dc(d_v, args.dc, args.omega)?;
    let upper = percent(args.upper.unwrap_or(DEFAULT_UPPER_PERCENT), "upper")?;
    let cfg = args.numerics.config(q, d_v, d_vx, d_c, 0.0)?;
    let result = gamma_threshold(&cfg, upper)?;
    let csv = format!("{THRESHOLD_HEADER}\n{}", threshold_row(&result));
    tee(&mut rec, args.csv.as_deref(), &csv)?;
    rec.finish()
}

pub fn de_rate(flags: DeRateArgs) -> CliResult<()> {
    let args: DeRateArgs = merge(&flags, flags.config.as_deref())?;
    let mut rec = Recorder::new("de-rate", snapshot(&args)?, None);
    let q = require(args.q, "q")?;
    let d_v = require(args.dv, "dv")?;
    let d_vx = resolve_dvx(q, d_v, args.dvx)?;
    if args.gamma.is_empty() {
        return Err(CliError::Usage("missing required parameter --gamma".into()));
    }
    let max_dc = args.max_dc.unwrap_or(DEFAULT_MAX_DC);
    let configs = args
        .gamma
        .iter()
        .map(|&g| args.numerics.config(q, d_v, d_vx, q, percent(g, "gamma")?))
        .collect::<CliResult<Vec<_>>>()?;
    let results = with_jobs(args.jobs, || {
        configs
            .par_iter()
            .map(|cfg| min_rate(cfg, max_dc))
            .collect::<qgt::Result<Vec<_>>>()
    })??;
    let mut csv = String::from("q,d_v,d_vx,gamma,d_c,omega_th,iters\n");
    for r in &results {
        let c = &r.config;
        csv.push_str(&format!(
            "{},{},{},{},{},{:.6},{}\n",
            c.q,
            c.d_v,
            c.d_vx,
            100.0 * c.gamma,
            c.d_c,
            100.0 * r.value,
            r.iters_at_threshold
        ));
    }
    tee(&mut rec, args.csv.as_deref(), &csv)?;
    rec.finish()
}

/// Item-level degree used for each bundle size in the threshold table.
fn table1_dvx(q: usize, d_v: usize) -> usize {
    match q {
        1 => d_v,
        10 => 3,
        _ => 2,
    }
}

pub fn reproduce_table1(flags: Table1Args) -> CliResult<()> {
    let args: Table1Args = merge(&flags, flags.config.as_deref())?;
    let mut rec = Recorder::new("reproduce-table1", snapshot(&args)?, None);
    let qs = if args.q.is_empty() { vec![1, 4, 5, 10] } else { args.q.clone() };
    let dvs = if args.dv.is_empty() { vec![4, 5, 6, 7, 8] } else { args.dv.clone() };
    let mut configs = Vec::new();
    for &q in &qs {
        for &d_v in &dvs {
            let d_c = TABLE1_DC_PER_DV * d_v;
            configs.push(args.numerics.config(q, d_v, table1_dvx(q, d_v), d_c, 0.0)?);
        }
    }
    let upper = DEFAULT_UPPER_PERCENT / 100.0;
    let results = with_jobs(args.jobs, || {
        configs
            .par_iter()
            .map(|cfg| gamma_threshold(cfg, upper))
            .collect::<qgt::Result<Vec<_>>>()
    })??;
    let mut csv = String::from("q,d_vx");
    for d_v in &dvs {
        csv.push_str(&format!(",d_v{d_v}"));
    }
    csv.push('\n');
    for (row, &q) in results.chunks(dvs.len()).zip(&qs) {
        // Without bundles every test is item-level, so d_vx = d_v varies by column.
        let d_vx = if q == 1 { "-".to_string() } else { row[0].config.d_vx.to_string() };
        csv.push_str(&format!("{q},{d_vx}"));
        for r in row {
            csv.push_str(&format!(",{:.3}", 100.0 * r.value));
        }
        csv.push('\n');
    }
    tee(&mut rec, args.csv.as_deref(), &csv)?;
    rec.finish()
}
