//! Seeded Monte Carlo estimation of decoder error rates.
//!
//! Every trial draws its graph and population from seeds derived from the
//! master seed and the trial index, so results do not depend on thread
//! count or scheduling. All points of a sweep share the master seed, which
//! couples the populations across the defect-probability grid.

mod crosscheck;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::{classify, Decoder};
use crate::error::{Error, Result};
use crate::graph::{build_graph, AugmentedGraph, GtParams};
use crate::model::{compute_syndrome, sample_population};
use crate::rng::{trial_seed, Stream};

pub use crosscheck::{de_crosscheck, CrosscheckCell, CrosscheckReport, Verdict};

/// Settings shared by all points of a sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    pub trials: usize,
    pub master_seed: u64,
    pub max_iters: usize,
    /// Draw a new graph for every trial (ensemble average). Otherwise the
    /// graph of trial 0 is reused.
    pub fresh_graph_per_trial: bool,
}

impl RunOptions {
    pub fn new(trials: usize, master_seed: u64) -> Self {
        Self {
            trials,
            master_seed,
            max_iters: crate::decoder::DEFAULT_MAX_ITERS,
            fresh_graph_per_trial: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: GtParams,
    /// Defect probabilities (not percent).
    pub gamma_grid: Vec<f64>,
    #[serde(flatten)]
    pub run: RunOptions,
}

/// Aggregated statistics at one defect probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    /// Defect probability (not percent).
    pub gamma: f64,
    pub trials: usize,
    pub defectives: u64,
    pub misdetected: u64,
    /// Total misdetected over total defectives; 0 without defectives.
    pub misdetection_rate: f64,
    /// Standard error of the ratio estimate from per-trial counts. `None`
    /// with fewer than two trials containing defectives.
    pub se: Option<f64>,
    pub false_alarms: u64,
    pub false_alarm_rate: f64,
    /// Items left unresolved, summed over trials.
    pub unresolved: u64,
    pub unresolved_fraction: f64,
    pub mean_iters: f64,
    /// Trials without defectives; excluded from misdetection statistics.
    pub zero_defective_trials: usize,
    /// Trials that hit the iteration budget.
    pub non_converged: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct TrialStats {
    defectives: u64,
    misdetected: u64,
    false_alarms: u64,
    unresolved: u64,
    iterations: u64,
    converged: bool,
}

fn run_trial(
    params: &GtParams,
    gamma: f64,
    opts: &RunOptions,
    trial: u64,
    fixed: Option<&(AugmentedGraph, Decoder)>,
) -> Result<TrialStats> {
    let pop = sample_population(params.n, gamma, trial_seed(opts.master_seed, trial, Stream::Population));
    let fresh;
    let (graph, decoder) = match fixed {
        Some((g, d)) => (g, d),
        None => {
            let g = build_graph(params, trial_seed(opts.master_seed, trial, Stream::Graph))?;
            let d = Decoder::new(&g)?;
            fresh = (g, d);
            (&fresh.0, &fresh.1)
        }
    };
    let outcome = decoder.decode(&compute_syndrome(graph, &pop)?, opts.max_iters)?;
    let metrics = classify(&outcome, Some(&pop));
    Ok(TrialStats {
        defectives: metrics.defectives as u64,
        misdetected: metrics.misdetected as u64,
        false_alarms: metrics.false_alarms as u64,
        unresolved: metrics.unresolved as u64,
        iterations: outcome.iterations as u64,
        converged: outcome.converged,
    })
}

fn check_inputs(params: &GtParams, gamma: f64, opts: &RunOptions) -> Result<()> {
    params.check()?;
    if opts.trials == 0 {
        return Err(Error::InvalidParam("trials must be at least 1".into()));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParam(format!("gamma = {gamma} outside (0, 1)")));
    }
    Ok(())
}

/// Runs `opts.trials` independent trials at defect probability `gamma`.
pub fn run_point(params: &GtParams, gamma: f64, opts: &RunOptions) -> Result<SimRow> {
    check_inputs(params, gamma, opts)?;
    let fixed = if opts.fresh_graph_per_trial {
        None
    } else {
        let graph = build_graph(params, trial_seed(opts.master_seed, 0, Stream::Graph))?;
        let decoder = Decoder::new(&graph)?;
        Some((graph, decoder))
    };
    let stats: Vec<TrialStats> = (0..opts.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(params, gamma, opts, t, fixed.as_ref()))
        .collect::<Result<_>>()?;
    Ok(aggregate(params, gamma, &stats))
}

fn aggregate(params: &GtParams, gamma: f64, stats: &[TrialStats]) -> SimRow {
    let trials = stats.len();
    let sum = |f: fn(&TrialStats) -> u64| stats.iter().map(f).sum::<u64>();
    let defectives = sum(|s| s.defectives);
    let misdetected = sum(|s| s.misdetected);
    let false_alarms = sum(|s| s.false_alarms);
    let unresolved = sum(|s| s.unresolved);
    let iterations = sum(|s| s.iterations);
    let n = params.n as u64;
    let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let rate = ratio(misdetected, defectives);

    let with_defects: Vec<&TrialStats> = stats.iter().filter(|s| s.defectives > 0).collect();
    let k = with_defects.len();
    let se = (k >= 2).then(|| {
        let mean_d = defectives as f64 / k as f64;
        let ss: f64 = with_defects
            .iter()
            .map(|s| (s.misdetected as f64 - rate * s.defectives as f64).powi(2))
            .sum();
        (ss / (k * (k - 1)) as f64).sqrt() / mean_d
    });

    SimRow {
        gamma,
        trials,
        defectives,
        misdetected,
        misdetection_rate: rate,
        se,
        false_alarms,
        false_alarm_rate: ratio(false_alarms, n * trials as u64 - defectives),
        unresolved,
        unresolved_fraction: ratio(unresolved, n * trials as u64),
        mean_iters: ratio(iterations, trials as u64),
        zero_defective_trials: trials - k,
        non_converged: stats.iter().filter(|s| !s.converged).count(),
    }
}

/// Result of [`sweep`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTable {
    pub config: SimConfig,
    pub rows: Vec<SimRow>,
    /// Misdetection is non-decreasing in gamma up to twice the combined
    /// standard error.
    pub monotone: bool,
}

/// Runs every grid point with the same master seed.
pub fn sweep(config: &SimConfig) -> Result<SimTable> {
    let rows = config
        .gamma_grid
        .iter()
        .map(|&g| run_point(&config.params, g, &config.run))
        .collect::<Result<Vec<_>>>()?;
    let monotone = is_monotone(&rows);
    Ok(SimTable {
        config: config.clone(),
        rows,
        monotone,
    })
}

pub(crate) fn is_monotone(rows: &[SimRow]) -> bool {
    let mut sorted: Vec<&SimRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
    sorted.windows(2).all(|w| {
        let noise = 2.0 * (w[0].se.unwrap_or(0.0).powi(2) + w[1].se.unwrap_or(0.0).powi(2)).sqrt();
        w[1].misdetection_rate >= w[0].misdetection_rate - noise
    })
}

pub const CSV_HEADER: &str =
    "gamma,trials,defectives,misdetected,misdetection_rate,se,false_alarms,unresolved,mean_iters";

impl SimTable {
    /// CSV with `gamma` in percent; an undefined standard error is empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.gamma * 100.0,
                r.trials,
                r.defectives,
                r.misdetected,
                r.misdetection_rate,
                r.se.map(|s| s.to_string()).unwrap_or_default(),
                r.false_alarms,
                r.unresolved,
                r.mean_iters
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> GtParams {
        GtParams::derive(600, 2, 4, 2, 20).unwrap()
    }

    #[test]
    fn deterministic_and_order_insensitive() {
        let opts = RunOptions::new(6, 11);
        let a = run_point(&toy(), 0.03, &opts).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap()
            .install(|| run_point(&toy(), 0.03, &opts).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.false_alarms, 0);
    }

    #[test]
    fn zero_defect_trials_are_flagged() {
        let row = run_point(&GtParams::derive(40, 2, 3, 1, 4).unwrap(), 1e-9, &RunOptions::new(3, 5)).unwrap();
        assert_eq!(row.defectives, 0);
        assert_eq!(row.misdetection_rate, 0.0);
        assert_eq!(row.zero_defective_trials, 3);
        assert_eq!(row.se, None);
    }

    #[test]
    fn sweep_handles_empty_and_duplicate_grids() {
        let mut cfg = SimConfig {
            params: toy(),
            gamma_grid: vec![],
            run: RunOptions::new(3, 2),
        };
        assert!(sweep(&cfg).unwrap().rows.is_empty());
        cfg.gamma_grid = vec![0.05, 0.05];
        let t = sweep(&cfg).unwrap();
        assert_eq!(t.rows[0], t.rows[1]);
        let csv = t.to_csv();
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn fixed_graph_mode_runs() {
        let mut opts = RunOptions::new(4, 3);
        opts.fresh_graph_per_trial = false;
        let row = run_point(&toy(), 0.03, &opts).unwrap();
        assert_eq!(row.trials, 4);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(run_point(&toy(), 0.0, &RunOptions::new(1, 0)).is_err());
        assert!(run_point(&toy(), 0.1, &RunOptions::new(0, 0)).is_err());
    }

    #[test]
    fn monotonicity_flag() {
        let row = |gamma: f64, rate: f64| SimRow {
            gamma,
            trials: 1,
            defectives: 1,
            misdetected: 0,
            misdetection_rate: rate,
            se: Some(0.01),
            false_alarms: 0,
            false_alarm_rate: 0.0,
            unresolved: 0,
            unresolved_fraction: 0.0,
            mean_iters: 0.0,
            zero_defective_trials: 0,
            non_converged: 0,
        };
        assert!(is_monotone(&[row(0.01, 0.1), row(0.02, 0.09), row(0.03, 0.5)]));
        assert!(!is_monotone(&[row(0.01, 0.5), row(0.02, 0.1)]));
    }
}
