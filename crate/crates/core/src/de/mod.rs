//! Density evolution for the bundle-augmented ensemble.
//!
//! Bundle-side messages are tracked as pmfs conditioned on the true bundle
//! value ([`CondPmf`]). Item-side messages are binary, so only the
//! probability of full resolution is tracked ([`ItemProb`]). One DE
//! iteration follows the decoder schedule exactly, so the state after `l`
//! iterations predicts decoder messages after `l` iterations.

mod binom;
mod engine;
mod pmf;
mod test_bundle;
mod threshold;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use binom::{binomial_pmf, syndrome_cutoff};
pub use engine::{de_iterate, DeRun, DeState, ItemProb, ItemProbs};
pub use pmf::{order_stat_max, order_stat_min, pmf_convolve, pmf_max2, pmf_min2};
pub use test_bundle::TestBundleTable;
pub use threshold::{gamma_threshold, min_rate, ThresholdKind, ThresholdResult};

/// Tolerance on row sums of a [`CondPmf`].
pub const ROW_SUM_TOL: f64 = 1e-12;

/// How realizations of a test's bundle values are averaged when computing
/// test-to-bundle messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Averaging {
    /// Enumerate value multisets of all bundles of a test and, for every
    /// distinct value in a multiset, score the message towards one bundle
    /// carrying that value. Averages are taken per target value over the
    /// enumerated multisets.
    #[default]
    DistinctValue,
    /// Exact tree conditional: the target value is fixed and the other
    /// bundles are averaged under their own multinomial law. This is the
    /// law followed by decoder messages on a random graph.
    Conditional,
}

/// Ensemble, operating point and numerical settings of a DE run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeConfig {
    pub q: usize,
    pub d_v: usize,
    pub d_vx: usize,
    pub d_c: usize,
    /// Defect probability (not percent).
    pub gamma: f64,
    /// Syndrome tail mass that may be dropped from the test-bundle average.
    pub eps_tail: f64,
    /// Both residual error probabilities must drop below this value.
    pub delta_success: f64,
    pub max_de_iters: usize,
    /// Final bracket width of threshold searches, in probability units.
    pub bisection_tol: f64,
    pub averaging: Averaging,
}

impl DeConfig {
    pub const DEFAULT_EPS_TAIL: f64 = 1e-7;
    pub const DEFAULT_DELTA_SUCCESS: f64 = 1e-8;
    pub const DEFAULT_MAX_ITERS: usize = 2000;
    pub const DEFAULT_BISECTION_TOL: f64 = 1e-5;

    pub fn new(q: usize, d_v: usize, d_vx: usize, d_c: usize, gamma: f64) -> Result<Self> {
        let cfg = Self {
            q,
            d_v,
            d_vx,
            d_c,
            gamma,
            eps_tail: Self::DEFAULT_EPS_TAIL,
            delta_success: Self::DEFAULT_DELTA_SUCCESS,
            max_de_iters: Self::DEFAULT_MAX_ITERS,
            bisection_tol: Self::DEFAULT_BISECTION_TOL,
            averaging: Averaging::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn d_vz(&self) -> usize {
        self.d_v - self.d_vx
    }

    pub fn d_cz(&self) -> usize {
        self.d_c / self.q
    }

    pub fn omega(&self) -> f64 {
        self.d_v as f64 / self.d_c as f64
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        Self {
            gamma,
            ..self.clone()
        }
    }

    pub fn with_d_c(&self, d_c: usize) -> Self {
        Self { d_c, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParam(m));
        if self.q == 0 || self.d_vx == 0 || self.d_c == 0 {
            return bad("q, d_vx and d_c must be positive".into());
        }
        if self.d_vx > self.d_v {
            return bad(format!("d_vx = {} exceeds d_v = {}", self.d_vx, self.d_v));
        }
        if !self.d_c.is_multiple_of(self.q) {
            return Err(Error::Divisibility(format!(
                "q = {} must divide d_c = {}",
                self.q, self.d_c
            )));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return bad(format!("gamma = {} outside [0, 1)", self.gamma));
        }
        for (name, v) in [
            ("eps_tail", self.eps_tail),
            ("delta_success", self.delta_success),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("{name} = {v} outside (0, 1)"));
            }
        }
        if self.max_de_iters == 0 {
            return bad("max_de_iters must be positive".into());
        }
        if self.bisection_tol.is_nan() || self.bisection_tol <= 0.0 {
            return bad("bisection_tol must be positive".into());
        }
        Ok(())
    }
}

/// Which side of the interval a [`CondPmf`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Lower,
    Upper,
}

/// `table[z][v]`: probability that a bound equals `v` given bundle value `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondPmf {
    table: Vec<Vec<f64>>,
}

impl CondPmf {
    /// Deterministic message `v = f(z)`.
    pub fn point(q: usize, f: impl Fn(usize) -> usize) -> Self {
        Self {
            table: (0..=q).map(|z| pmf::delta(q + 1, f(z))).collect(),
        }
    }

    /// The uninformative message of the given kind (`0` or `q`).
    pub fn uninformative(q: usize, kind: BoundKind) -> Self {
        match kind {
            BoundKind::Lower => Self::point(q, |_| 0),
            BoundKind::Upper => Self::point(q, |_| q),
        }
    }

    pub fn from_rows(table: Vec<Vec<f64>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n) {
            return Err(Error::Malformed("conditional pmf must be square and non-empty".into()));
        }
        Ok(Self { table })
    }

    pub fn q(&self) -> usize {
        self.table.len() - 1
    }

    pub fn row(&self, z: usize) -> &[f64] {
        &self.table[z]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.table
    }

    pub(crate) fn normalize(&mut self) {
        self.table.iter_mut().for_each(|r| pmf::normalize(r));
    }

    /// Checks unit row sums and the support implied by validity.
    pub fn check(&self, kind: BoundKind) -> Result<()> {
        let q = self.q();
        for (z, row) in self.table.iter().enumerate() {
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::Malformed(format!("row {z} sums to {total}")));
            }
            let allowed = match kind {
                BoundKind::Lower => 0..=z,
                BoundKind::Upper => z..=q,
            };
            if let Some(v) = (0..=q).find(|v| !allowed.contains(v) && row[*v] != 0.0) {
                return Err(Error::Malformed(format!(
                    "row {z} puts mass {} on {v} outside {allowed:?}",
                    row[v]
                )));
            }
        }
        Ok(())
    }
}
