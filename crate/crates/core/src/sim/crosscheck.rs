//! Empirical message statistics of the decoder against DE predictions.

use serde::{Deserialize, Serialize};

use crate::de::{Averaging, CondPmf, DeConfig, DeState, ItemProb, TestBundleTable};
use crate::decoder::{BoundPair, Decoder, DecoderState};
use crate::error::Result;
use crate::graph::{build_graph, GtParams};
use crate::model::{bundle_values, compute_syndrome, sample_population};
use crate::rng::{trial_seed, Stream};

/// One compared probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckCell {
    /// Message family and bound, e.g. `c2z.lo`.
    pub family: String,
    /// Conditioning value: bundle value or item state.
    pub given: usize,
    /// Message value whose frequency is compared.
    pub value: usize,
    pub observed: u64,
    pub total: u64,
    pub predicted: f64,
    /// Standard error of `observed / total`.
    pub se: f64,
    /// `(observed / total - predicted) / se`.
    pub z: f64,
    /// Whether the normal approximation holds well enough for `z` to be
    /// compared; untested cells are reported but excluded from `max_abs_z`.
    pub tested: bool,
}

/// Smallest expected count, on both sides, for a z-test on one cell.
const MIN_EXPECTED: f64 = 5.0;
/// Smallest number of contributing instances for the between-instance error.
const MIN_INSTANCES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Warn,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub params: GtParams,
    pub gamma: f64,
    pub iteration: usize,
    pub trials: usize,
    pub cells: Vec<CrosscheckCell>,
    /// Largest `|z|` over tested cells.
    pub max_abs_z: f64,
}

impl CrosscheckReport {
    /// Number of cells entering `max_abs_z`.
    pub fn tested_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.tested).count()
    }

    /// All cells within `limit` standard deviations.
    pub fn within(&self, limit: f64) -> bool {
        self.max_abs_z < limit
    }

    /// `Pass` below 3 standard deviations, `Fail` beyond 5.
    pub fn verdict(&self) -> Verdict {
        if self.within(3.0) {
            Verdict::Pass
        } else if self.within(5.0) {
            Verdict::Warn
        } else {
            Verdict::Fail
        }
    }
}

/// Counts per (conditioning value, message value) for every trial.
struct Counts {
    per_trial: Vec<Vec<Vec<u64>>>,
    rows: usize,
    cols: usize,
}

impl Counts {
    fn new(rows: usize, cols: usize) -> Self {
        Self {
            per_trial: Vec::new(),
            rows,
            cols,
        }
    }

    fn start_trial(&mut self) {
        self.per_trial.push(vec![vec![0; self.cols]; self.rows]);
    }

    fn add(&mut self, given: usize, value: usize) {
        self.per_trial.last_mut().expect("trial started")[given][value] += 1;
    }

    /// Builds the cell for `(given, value)`, or `None` when never observed.
    ///
    /// Messages of one instance share the population and the test
    /// outcomes, so the standard error is taken from the spread between
    /// instances (ratio estimator). It is floored at the binomial error of
    /// a single count, which keeps near-deterministic cells finite.
    fn cell(&self, family: &str, given: usize, value: usize, predicted: f64) -> Option<CrosscheckCell> {
        let pairs: Vec<(f64, f64)> = self
            .per_trial
            .iter()
            .map(|t| (t[given][value] as f64, t[given].iter().sum::<u64>() as f64))
            .filter(|&(_, n)| n > 0.0)
            .collect();
        let observed: f64 = pairs.iter().map(|p| p.0).sum();
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        if total == 0.0 {
            return None;
        }
        let freq = observed / total;
        let k = pairs.len() as f64;
        let between = if pairs.len() >= 2 {
            let ss: f64 = pairs.iter().map(|(o, n)| (o - freq * n).powi(2)).sum();
            (ss / (k * (k - 1.0))).sqrt() / (total / k)
        } else {
            0.0
        };
        let floor = (total * predicted * (1.0 - predicted)).max(1.0).sqrt() / total;
        let se = between.max(floor);
        // Deterministic predictions are checked whatever the sample size.
        let deterministic = predicted == 0.0 || predicted == 1.0;
        let tested = deterministic
            || (pairs.len() >= MIN_INSTANCES
                && total * predicted >= MIN_EXPECTED
                && total * (1.0 - predicted) >= MIN_EXPECTED);
        Some(CrosscheckCell {
            family: family.to_string(),
            given,
            value,
            observed: observed as u64,
            total: total as u64,
            predicted,
            se,
            z: (freq - predicted) / se,
            tested,
        })
    }
}

fn compare_cond(family: &str, counts: &Counts, pmf: &CondPmf, cells: &mut Vec<CrosscheckCell>) {
    for z in 0..counts.rows {
        for v in 0..counts.cols {
            cells.extend(counts.cell(family, z, v, pmf.row(z)[v]));
        }
    }
}

/// Item families are compared on their resolution events only: `L = 1`
/// for defectives and `U = 0` for non-defectives.
fn compare_item(family: &str, counts: &Counts, p: ItemProb, cells: &mut Vec<CrosscheckCell>) {
    cells.extend(counts.cell(family, 1, 1, p.pl));
    cells.extend(counts.cell(family, 0, 1, 1.0 - p.pu0));
}

/// Item-side counts: row = true item state, column 1 when the message
/// resolves a defective or leaves a non-defective unresolved.
fn count_item(counts: &mut Counts, bound: BoundPair, defective: bool) {
    if defective {
        counts.add(1, usize::from(bound.lo == 1));
    } else {
        counts.add(0, usize::from(bound.hi != 0));
    }
}

/// Runs `trials` random instances for `ell` decoder iterations and compares
/// per-edge message frequencies with DE after `ell` iterations. DE uses the
/// exact conditional averaging, which is the law decoder messages follow.
/// Several trials are needed for meaningful standard errors.
pub fn de_crosscheck(
    params: &GtParams,
    gamma: f64,
    ell: usize,
    trials: usize,
    seed: u64,
) -> Result<CrosscheckReport> {
    params.check()?;
    let q = params.q;
    let mut cfg = DeConfig::new(q, params.d_v, params.d_vx, params.d_c, gamma)?;
    cfg.averaging = Averaging::Conditional;
    cfg.eps_tail = 1e-14;
    let s_max = crate::de::syndrome_cutoff(cfg.d_c, gamma, cfg.eps_tail);
    let table = TestBundleTable::new(q, cfg.d_cz(), gamma, s_max, cfg.averaging);
    let mut de = DeState::init(q);
    for _ in 0..ell {
        de.step(&cfg, &table);
    }

    let bundle_counts = || Counts::new(q + 1, q + 1);
    let (mut c2z_lo, mut c2z_hi) = (bundle_counts(), bundle_counts());
    let (mut z2c_lo, mut z2c_hi) = (bundle_counts(), bundle_counts());
    let (mut z2f_lo, mut z2f_hi) = (bundle_counts(), bundle_counts());
    let mut items: Vec<Counts> = (0..4).map(|_| Counts::new(2, 2)).collect();

    for t in 0..trials as u64 {
        for c in [&mut c2z_lo, &mut c2z_hi, &mut z2c_lo, &mut z2c_hi, &mut z2f_lo, &mut z2f_hi] {
            c.start_trial();
        }
        items.iter_mut().for_each(Counts::start_trial);
        let graph = build_graph(params, trial_seed(seed, t, Stream::Graph))?;
        let pop = sample_population(params.n, gamma, trial_seed(seed, t, Stream::Population));
        let syndrome = compute_syndrome(&graph, &pop)?;
        let z = bundle_values(&graph, &pop)?;
        let decoder = Decoder::new(&graph)?;
        let st: DecoderState = decoder.run_iterations(&syndrome, ell)?;
        let g = decoder.layout();
        for e in 0..g.z_edges() {
            let zb = z[g.z_edge_bundle(e)] as usize;
            c2z_lo.add(zb, st.c2z[e].lo as usize);
            c2z_hi.add(zb, st.c2z[e].hi as usize);
            z2c_lo.add(zb, st.z2c[e].lo as usize);
            z2c_hi.add(zb, st.z2c[e].hi as usize);
        }
        if g.d_vz > 0 {
            for (b, &zb) in z.iter().enumerate() {
                z2f_lo.add(zb as usize, st.z2f[b].lo as usize);
                z2f_hi.add(zb as usize, st.z2f[b].hi as usize);
            }
        }
        for e in 0..g.x_edges() {
            let d = pop.is_defective(g.x_edge_item(e));
            count_item(&mut items[0], st.c2x[e], d);
            count_item(&mut items[1], st.x2c[e], d);
        }
        for i in 0..g.n {
            let d = pop.is_defective(i);
            count_item(&mut items[2], st.f2x[i], d);
            count_item(&mut items[3], st.x2f[i], d);
        }
    }

    let mut cells = Vec::new();
    compare_cond("c2z.lo", &c2z_lo, &de.c2z_lo, &mut cells);
    compare_cond("c2z.hi", &c2z_hi, &de.c2z_hi, &mut cells);
    compare_cond("z2c.lo", &z2c_lo, &de.z2c_lo, &mut cells);
    compare_cond("z2c.hi", &z2c_hi, &de.z2c_hi, &mut cells);
    compare_cond("z2f.lo", &z2f_lo, &de.z2f_lo, &mut cells);
    compare_cond("z2f.hi", &z2f_hi, &de.z2f_hi, &mut cells);
    let p = de.items;
    for (name, counts, prob) in [
        ("c2x", &items[0], p.c2x),
        ("x2c", &items[1], p.x2c),
        ("f2x", &items[2], p.f2x),
        ("x2f", &items[3], p.x2f),
    ] {
        compare_item(name, counts, prob, &mut cells);
    }
    let max_abs_z = cells.iter().filter(|c| c.tested).map(|c| c.z.abs()).fold(0.0, f64::max);
    Ok(CrosscheckReport {
        params: *params,
        gamma,
        iteration: ell,
        trials,
        cells,
        max_abs_z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_state_matches_exactly() {
        let p = GtParams::derive(2000, 2, 4, 2, 20).unwrap();
        let r = de_crosscheck(&p, 0.02, 0, 1, 9).unwrap();
        assert_eq!(r.max_abs_z, 0.0);
        assert_eq!(r.verdict(), Verdict::Pass);
    }

    #[test]
    fn verdict_thresholds() {
        let mut r = de_crosscheck(&GtParams::derive(200, 2, 4, 2, 20).unwrap(), 0.02, 0, 1, 1).unwrap();
        r.max_abs_z = 4.0;
        assert_eq!(r.verdict(), Verdict::Warn);
        r.max_abs_z = 6.0;
        assert_eq!(r.verdict(), Verdict::Fail);
    }

    fn counts(trials: usize, per_trial: u64, hits: u64) -> Counts {
        let mut c = Counts::new(1, 2);
        for _ in 0..trials {
            c.start_trial();
            (0..per_trial).for_each(|k| c.add(0, usize::from(k < hits)));
        }
        c
    }

    #[test]
    fn sparse_cells_are_not_tested() {
        // Too few instances for a between-instance error.
        assert!(!counts(2, 5, 4).cell("f", 0, 1, 0.3).unwrap().tested);
        // Too few expected events.
        assert!(!counts(20, 10, 0).cell("f", 0, 1, 0.01).unwrap().tested);
        assert!(counts(20, 10, 3).cell("f", 0, 1, 0.3).unwrap().tested);
        // A deterministic prediction is checked at any size.
        let c = counts(1, 3, 1).cell("f", 0, 1, 0.0).unwrap();
        assert!(c.tested && c.z > 0.0);
    }
}
