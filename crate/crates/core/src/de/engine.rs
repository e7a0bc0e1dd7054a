//! DE state and the schedule-matched recursion.

use serde::{Deserialize, Serialize};

use super::binom::binomial_pmf;
use super::pmf::{order_stat_max, order_stat_min, pmf_max2, pmf_min2};
use super::test_bundle::TestBundleTable;
use super::{syndrome_cutoff, BoundKind, CondPmf, DeConfig};
use crate::error::Result;

/// Resolution probabilities of a binary item-side message family.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ItemProb {
    /// `P(L = 1 | X = 1)`.
    pub pl: f64,
    /// `P(U = 0 | X = 0)`.
    pub pu0: f64,
}

/// Item-side message families, named by direction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ItemProbs {
    pub c2x: ItemProb,
    pub x2c: ItemProb,
    pub f2x: ItemProb,
    pub x2f: ItemProb,
}

/// Message laws after a number of DE iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct DeState {
    pub c2z_lo: CondPmf,
    pub c2z_hi: CondPmf,
    pub z2c_lo: CondPmf,
    pub z2c_hi: CondPmf,
    pub z2f_lo: CondPmf,
    pub z2f_hi: CondPmf,
    pub items: ItemProbs,
    pub iteration: usize,
}

/// Outcome of [`de_iterate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeRun {
    pub success: bool,
    pub iterations: usize,
    /// `(pL, pU0)` of the final item estimate after every iteration.
    pub trajectory: Vec<(f64, f64)>,
}

impl DeState {
    /// All messages uninformative, as at decoder initialization.
    pub fn init(q: usize) -> Self {
        let lo = CondPmf::uninformative(q, BoundKind::Lower);
        let hi = CondPmf::uninformative(q, BoundKind::Upper);
        Self {
            c2z_lo: lo.clone(),
            c2z_hi: hi.clone(),
            z2c_lo: lo.clone(),
            z2c_hi: hi.clone(),
            z2f_lo: lo,
            z2f_hi: hi,
            items: ItemProbs::default(),
            iteration: 0,
        }
    }

    /// Test-to-bundle update from the current bundle-to-test laws.
    pub fn update_c2z(&mut self, table: &TestBundleTable) {
        let (lo, hi) = table.apply(&self.z2c_lo, &self.z2c_hi);
        self.c2z_lo = lo;
        self.c2z_hi = hi;
    }

    /// Bundle-to-item-side update over all `d_vz` test messages.
    pub fn update_z2f(&mut self, d_vz: usize) {
        self.z2f_lo = map_rows(&self.c2z_lo, |_, r| order_stat_max(r, d_vz));
        self.z2f_hi = map_rows(&self.c2z_hi, |_, r| order_stat_min(r, d_vz));
    }

    pub fn update_f2x(&mut self, q: usize, gamma: f64) {
        self.items.f2x = item_bundle_f2x(q, gamma, &self.z2f_lo, &self.z2f_hi, self.items.x2f);
    }

    pub fn update_x2c(&mut self, d_vx: usize) {
        let (c, f) = (self.items.c2x, self.items.f2x);
        self.items.x2c = ItemProb {
            pl: combine_any(c.pl, d_vx - 1, f.pl),
            pu0: combine_any(c.pu0, d_vx - 1, f.pu0),
        };
    }

    pub fn update_c2x(&mut self, d_c: usize, gamma: f64) {
        self.items.c2x = test_item_c2x(d_c, gamma, self.items.x2c);
    }

    pub fn update_x2f(&mut self, d_vx: usize) {
        let c = self.items.c2x;
        self.items.x2f = ItemProb {
            pl: combine_any(c.pl, d_vx, 0.0),
            pu0: combine_any(c.pu0, d_vx, 0.0),
        };
    }

    /// Bundle-to-test update from the other `d_vz - 1` tests and the item sums.
    pub fn update_z2c(&mut self, d_vz: usize) {
        if d_vz == 0 {
            return;
        }
        let q = self.c2z_lo.q();
        let x2f = self.items.x2f;
        self.z2c_lo = map_rows(&self.c2z_lo, |z, r| {
            pmf_max2(&order_stat_max(r, d_vz - 1), &item_sum_lower(q, z, x2f.pl))
        });
        self.z2c_hi = map_rows(&self.c2z_hi, |z, r| {
            pmf_min2(&order_stat_min(r, d_vz - 1), &item_sum_upper(q, z, x2f.pu0))
        });
    }

    /// Runs one full iteration in decoder order.
    pub fn step(&mut self, cfg: &DeConfig, table: &TestBundleTable) {
        let d_vz = cfg.d_vz();
        if d_vz > 0 {
            self.update_c2z(table);
        }
        self.update_z2f(d_vz);
        self.update_f2x(cfg.q, cfg.gamma);
        self.update_x2c(cfg.d_vx);
        self.update_c2x(cfg.d_c, cfg.gamma);
        self.update_x2f(cfg.d_vx);
        self.update_z2c(d_vz);
        self.iteration += 1;
    }

    /// `(pL, pU0)` of the final item estimate, which combines every test
    /// and the bundle.
    pub fn final_item(&self, d_vx: usize) -> (f64, f64) {
        let (c, f) = (self.items.c2x, self.items.f2x);
        (combine_any(c.pl, d_vx, f.pl), combine_any(c.pu0, d_vx, f.pu0))
    }

    /// Residual error probabilities `(1 - pL, 1 - pU0)` of the final item
    /// estimate, computed without cancellation.
    pub fn final_errors(&self, d_vx: usize) -> (f64, f64) {
        let (c, f) = (self.items.c2x, self.items.f2x);
        (
            (1.0 - c.pl).powi(d_vx as i32) * (1.0 - f.pl),
            (1.0 - c.pu0).powi(d_vx as i32) * (1.0 - f.pu0),
        )
    }
}

fn map_rows(p: &CondPmf, f: impl Fn(usize, &[f64]) -> Vec<f64>) -> CondPmf {
    let rows = p.rows().iter().enumerate().map(|(z, r)| f(z, r)).collect();
    let mut out = CondPmf::from_rows(rows).expect("square table");
    out.normalize();
    out
}

/// Probability that at least one of `k` messages resolving with
/// probability `p`, or one extra message with probability `extra`, resolves.
fn combine_any(p: f64, k: usize, extra: f64) -> f64 {
    1.0 - (1.0 - p).powi(k as i32) * (1.0 - extra)
}

/// Law of the summed item lower bounds in a bundle of value `z`: each
/// defective contributes 1 when resolved.
pub(crate) fn item_sum_lower(q: usize, z: usize, pl: f64) -> Vec<f64> {
    let mut v = binomial_pmf(z, pl);
    v.resize(q + 1, 0.0);
    v
}

/// Law of the summed item upper bounds in a bundle of value `z`: `z` plus
/// each unresolved non-defective.
pub(crate) fn item_sum_upper(q: usize, z: usize, pu0: f64) -> Vec<f64> {
    let mut v = vec![0.0; z];
    v.extend(binomial_pmf(q - z, 1.0 - pu0));
    v
}

/// Bundle-to-item message: the bundle resolves an item once the bundle
/// lower (upper) bound is tight and all other items are already resolved.
pub(crate) fn item_bundle_f2x(q: usize, gamma: f64, z2f_lo: &CondPmf, z2f_hi: &CondPmf, x2f: ItemProb) -> ItemProb {
    // Bundle value given the item: the item itself plus Bino(q - 1, gamma).
    let others = binomial_pmf(q - 1, gamma);
    let pl = (1..=q)
        .map(|z| others[z - 1] * z2f_lo.row(z)[z] * x2f.pu0.powi((q - z) as i32))
        .sum::<f64>();
    let pu0 = (0..q)
        .map(|z| others[z] * z2f_hi.row(z)[z] * x2f.pl.powi(z as i32))
        .sum::<f64>();
    ItemProb {
        pl: pl.clamp(0.0, 1.0),
        pu0: pu0.clamp(0.0, 1.0),
    }
}

/// Test-to-item message: the test pins an item once every other item's
/// opposite bound is tight.
pub(crate) fn test_item_c2x(d_c: usize, gamma: f64, x2c: ItemProb) -> ItemProb {
    let k = (d_c - 1) as i32;
    ItemProb {
        pl: (gamma + (1.0 - gamma) * x2c.pu0).powi(k),
        pu0: (1.0 - gamma + gamma * x2c.pl).powi(k),
    }
}

/// Iterates the DE recursion until both residual errors are below
/// `delta_success`, a fixed point is reached, or the budget runs out.
pub fn de_iterate(cfg: &DeConfig) -> Result<DeRun> {
    cfg.validate()?;
    let s_max = syndrome_cutoff(cfg.d_c, cfg.gamma, cfg.eps_tail);
    let table = TestBundleTable::new(cfg.q, cfg.d_cz(), cfg.gamma, s_max, cfg.averaging);
    let mut state = DeState::init(cfg.q);
    let mut trajectory = Vec::new();
    let mut prev = (f64::NAN, f64::NAN);
    for _ in 0..cfg.max_de_iters {
        state.step(cfg, &table);
        let (pl, pu0) = state.final_item(cfg.d_vx);
        trajectory.push((pl, pu0));
        let (el, eu) = state.final_errors(cfg.d_vx);
        // With no defectives the lower bounds are never needed.
        if eu < cfg.delta_success && (cfg.gamma == 0.0 || el < cfg.delta_success) {
            return Ok(DeRun {
                success: true,
                iterations: state.iteration,
                trajectory,
            });
        }
        if (pl - prev.0).abs() < STALL_TOL && (pu0 - prev.1).abs() < STALL_TOL {
            break;
        }
        prev = (pl, pu0);
    }
    Ok(DeRun {
        success: false,
        iterations: state.iteration,
        trajectory,
    })
}

/// Change below which the recursion is considered stuck at a fixed point.
const STALL_TOL: f64 = 1e-14;
