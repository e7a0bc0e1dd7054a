//! Integer lower/upper-bound message passing over the augmented graph.
//!
//! Three interactions are run in a fixed schedule: bundle-level tests with
//! bundle values, bundle checks with their items, and item-level tests with
//! items. Messages are integer intervals that only ever shrink, so decoding
//! stops at the first iteration that changes nothing.

mod bound;
mod layout;
mod state;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::AugmentedGraph;
use crate::model::{Population, Syndrome};

pub use bound::BoundPair;
pub use layout::DecoderGraph;
pub use state::DecoderState;

pub const DEFAULT_MAX_ITERS: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeOutcome {
    pub item_bounds: Vec<BoundPair>,
    pub bundle_bounds: Vec<BoundPair>,
    /// Iterations that changed at least one message.
    pub iterations: usize,
    /// A fixed point was reached within the iteration budget.
    pub converged: bool,
    /// Items whose final lower bound is 1, ascending.
    pub declared: Vec<usize>,
}

impl DecodeOutcome {
    pub fn unresolved(&self) -> usize {
        self.item_bounds.iter().filter(|b| !b.is_resolved()).count()
    }
}

/// Reusable decoder bound to one graph.
#[derive(Debug, Clone)]
pub struct Decoder {
    graph: DecoderGraph,
}

impl Decoder {
    pub fn new(graph: &AugmentedGraph) -> Result<Self> {
        Ok(Self {
            graph: DecoderGraph::new(graph)?,
        })
    }

    pub fn layout(&self) -> &DecoderGraph {
        &self.graph
    }

    pub fn decode(&self, syndrome: &Syndrome, max_iters: usize) -> Result<DecodeOutcome> {
        self.decode_observed(syndrome, max_iters, |_| {})
    }

    /// Like [`Decoder::decode`], calling `observe` after every iteration.
    pub fn decode_observed(
        &self,
        syndrome: &Syndrome,
        max_iters: usize,
        mut observe: impl FnMut(&DecoderState),
    ) -> Result<DecodeOutcome> {
        let g = &self.graph;
        if syndrome.len() != g.m_z + g.m_x || syndrome.m_z != g.m_z {
            return Err(Error::Dimension {
                what: "syndrome",
                got: syndrome.len(),
                expected: g.m_z + g.m_x,
            });
        }
        let (s_z, s_x) = (syndrome.s_z(), syndrome.s_x());
        let mut state = DecoderState::init(g);
        let mut converged = false;
        let mut iterations = max_iters;
        for ell in 1..=max_iters {
            let changed = state.iterate(g, s_z, s_x)?;
            observe(&state);
            if !changed {
                converged = true;
                iterations = ell - 1;
                break;
            }
        }
        self.finish(&state, iterations, converged)
    }

    /// Runs exactly `iterations` sweeps and returns the raw message state.
    pub fn run_iterations(&self, syndrome: &Syndrome, iterations: usize) -> Result<DecoderState> {
        let g = &self.graph;
        let mut state = DecoderState::init(g);
        for _ in 0..iterations {
            state.iterate(g, syndrome.s_z(), syndrome.s_x())?;
        }
        Ok(state)
    }

    fn finish(
        &self,
        state: &DecoderState,
        iterations: usize,
        converged: bool,
    ) -> Result<DecodeOutcome> {
        let g = &self.graph;
        let item_bounds = state.item_bounds(g);
        let bundle_bounds = state.bundle_bounds(g);
        let crossed = |what: &str, k: usize, b: &BoundPair| Error::InconsistentSyndrome {
            location: format!("final {what} {k}"),
            lo: b.lo as i64,
            hi: b.hi as i64,
        };
        if let Some((i, b)) = item_bounds.iter().enumerate().find(|(_, b)| b.lo > b.hi) {
            return Err(crossed("item", i, b));
        }
        if let Some((k, b)) = bundle_bounds.iter().enumerate().find(|(_, b)| b.lo > b.hi) {
            return Err(crossed("bundle", k, b));
        }
        let declared = item_bounds
            .iter()
            .enumerate()
            .filter(|(_, b)| b.lo == 1)
            .map(|(i, _)| i)
            .collect();
        Ok(DecodeOutcome {
            item_bounds,
            bundle_bounds,
            iterations,
            converged,
            declared,
        })
    }
}

pub fn decode(
    graph: &AugmentedGraph,
    syndrome: &Syndrome,
    max_iters: usize,
) -> Result<DecodeOutcome> {
    Decoder::new(graph)?.decode(syndrome, max_iters)
}

/// Per-run error statistics. Rates are `None` when they are undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub misdetection_rate: Option<f64>,
    pub false_alarm_rate: Option<f64>,
    pub unresolved_fraction: f64,
    pub defectives: usize,
    pub misdetected: usize,
    pub false_alarms: usize,
    pub unresolved: usize,
}

/// Misdetection is the fraction of true defectives not declared; false
/// alarms the fraction of non-defectives declared. With zero defectives the
/// misdetection rate is reported as 0.
pub fn classify(outcome: &DecodeOutcome, truth: Option<&Population>) -> Metrics {
    let n = outcome.item_bounds.len();
    let unresolved = outcome.unresolved();
    let unresolved_fraction = if n == 0 {
        0.0
    } else {
        unresolved as f64 / n as f64
    };
    let Some(truth) = truth else {
        return Metrics {
            misdetection_rate: None,
            false_alarm_rate: None,
            unresolved_fraction,
            defectives: 0,
            misdetected: 0,
            false_alarms: 0,
            unresolved,
        };
    };
    let mut declared = vec![false; n];
    for &i in &outcome.declared {
        declared[i] = true;
    }
    let (mut defectives, mut misdetected, mut false_alarms) = (0, 0, 0);
    for (i, &d) in declared.iter().enumerate() {
        if truth.is_defective(i) {
            defectives += 1;
            misdetected += usize::from(!d);
        } else {
            false_alarms += usize::from(d);
        }
    }
    let rate = |k: usize, total: usize| if total == 0 { 0.0 } else { k as f64 / total as f64 };
    Metrics {
        misdetection_rate: Some(rate(misdetected, defectives)),
        false_alarm_rate: Some(rate(false_alarms, n - defectives)),
        unresolved_fraction,
        defectives,
        misdetected,
        false_alarms,
        unresolved,
    }
}

#[cfg(test)]
mod tests;
