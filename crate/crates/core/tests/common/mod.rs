//! Oracles shared by the integration and acceptance tests.

#![allow(dead_code)]

use qgt::decoder::{BoundPair, Decoder, DecoderState, DEFAULT_MAX_ITERS};
use qgt::graph::{build_graph, AugmentedGraph, GtParams, TestMatrix};
use qgt::model::{bundle_values, compute_syndrome, sample_population, Population};
use qgt::rng::derive_seed;

/// Small ensembles for the validity suite: `(n, q, d_v, d_vx, d_c, gamma)`.
pub const VALIDITY_SETS: [(usize, usize, usize, usize, usize, f64); 6] = [
    (120, 1, 3, 3, 6, 0.08),
    (120, 2, 3, 1, 4, 0.10),
    (200, 2, 4, 2, 10, 0.05),
    (300, 5, 4, 2, 10, 0.06),
    (240, 4, 5, 2, 16, 0.04),
    (180, 3, 4, 1, 9, 0.07),
];

/// Outcome of one checked decoding run.
#[derive(Debug, Default, Clone, Copy)]
pub struct ValidityStats {
    pub violations: usize,
    pub false_alarms: usize,
    pub non_monotone: usize,
    pub non_converged: usize,
}

impl ValidityStats {
    pub fn add(&mut self, o: ValidityStats) {
        self.violations += o.violations;
        self.false_alarms += o.false_alarms;
        self.non_monotone += o.non_monotone;
        self.non_converged += o.non_converged;
    }

    pub fn clean(&self) -> bool {
        self.violations == 0 && self.false_alarms == 0 && self.non_monotone == 0 && self.non_converged == 0
    }
}

fn count_outside(bounds: &[BoundPair], truth: impl Fn(usize) -> u16) -> usize {
    bounds.iter().enumerate().filter(|(k, b)| !b.contains(truth(*k))).count()
}

fn count_widened(now: &[BoundPair], before: &[BoundPair]) -> usize {
    now.iter().zip(before).filter(|(a, b)| !a.within(b)).count()
}

/// Decodes one instance and checks, after every iteration, that every
/// message contains the true value and no message widened.
pub fn check_instance(graph: &AugmentedGraph, pop: &Population) -> ValidityStats {
    let syndrome = compute_syndrome(graph, pop).unwrap();
    let z = bundle_values(graph, pop).unwrap();
    let decoder = Decoder::new(graph).unwrap();
    let g = decoder.layout();
    let x = |i: usize| u16::from(pop.x[i]);
    let zb = |b: usize| z[b];
    let mut stats = ValidityStats::default();
    let mut prev: Option<DecoderState> = None;
    let outcome = decoder
        .decode_observed(&syndrome, DEFAULT_MAX_ITERS, |st| {
            stats.violations += count_outside(&st.c2z, |e| zb(g.z_edge_bundle(e)))
                + count_outside(&st.z2c, |e| zb(g.z_edge_bundle(e)))
                + count_outside(&st.z2f, zb)
                + count_outside(&st.f2z, zb)
                + count_outside(&st.f2x, x)
                + count_outside(&st.x2f, x)
                + count_outside(&st.x2c, |e| x(g.x_edge_item(e)))
                + count_outside(&st.c2x, |e| x(g.x_edge_item(e)))
                + count_outside(&st.item_bounds(g), x)
                + count_outside(&st.bundle_bounds(g), zb);
            if let Some(p) = &prev {
                stats.non_monotone += count_widened(&st.c2z, &p.c2z)
                    + count_widened(&st.z2c, &p.z2c)
                    + count_widened(&st.z2f, &p.z2f)
                    + count_widened(&st.f2x, &p.f2x)
                    + count_widened(&st.x2c, &p.x2c)
                    + count_widened(&st.c2x, &p.c2x)
                    + count_widened(&st.item_bounds(g), &p.item_bounds(g))
                    + count_widened(&st.bundle_bounds(g), &p.bundle_bounds(g));
            }
            prev = Some(st.clone());
        })
        .unwrap();
    stats.false_alarms = outcome.declared.iter().filter(|&&i| !pop.is_defective(i)).count();
    stats.non_converged = usize::from(!outcome.converged);
    stats
}

/// Runs `instances` random instances of one ensemble.
pub fn validity_run(set: (usize, usize, usize, usize, usize, f64), instances: u64, seed: u64) -> ValidityStats {
    let (n, q, d_v, d_vx, d_c, gamma) = set;
    let params = GtParams::derive(n, q, d_v, d_vx, d_c).unwrap();
    let mut total = ValidityStats::default();
    for t in 0..instances {
        let graph = build_graph(&params, derive_seed(seed, 2 * t)).unwrap();
        // Vary the defect level so both easy and hard instances occur.
        let g = gamma * (0.25 + 1.5 * (t % 8) as f64 / 7.0);
        let pop = sample_population(n, g, derive_seed(seed, 2 * t + 1));
        total.add(check_instance(&graph, &pop));
    }
    total
}

/// Per-coordinate `[min, max]` over every 0/1 vector consistent with the
/// syndrome, for items and bundles. `None` when nothing is consistent.
pub fn consistent_intervals(graph: &AugmentedGraph, s: &[u32]) -> Option<(Vec<BoundPair>, Vec<BoundPair>)> {
    let n = graph.params.n;
    assert!(n <= 24, "exhaustive enumeration needs n <= 24");
    let rows = graph.flatten().rows;
    let masks: Vec<u32> = rows.iter().map(|r| r.iter().fold(0u32, |m, &i| m | (1 << i))).collect();
    let n_h = graph.params.n_h;
    let members: Vec<u32> = graph
        .bundle_members()
        .iter()
        .map(|m| m.iter().fold(0u32, |a, &i| a | (1 << i)))
        .collect();
    let mut items: Option<Vec<BoundPair>> = None;
    let mut bundles = vec![BoundPair::new(u16::MAX, 0); n_h];
    for x in 0u32..(1 << n) {
        if masks.iter().zip(s).any(|(m, &v)| (m & x).count_ones() != v) {
            continue;
        }
        let it = items.get_or_insert_with(|| vec![BoundPair::new(1, 0); n]);
        for (i, b) in it.iter_mut().enumerate() {
            let v = ((x >> i) & 1) as u16;
            b.lo = b.lo.min(v);
            b.hi = b.hi.max(v);
        }
        for (b, m) in bundles.iter_mut().zip(&members) {
            let v = (x & m).count_ones() as u16;
            b.lo = b.lo.min(v);
            b.hi = b.hi.max(v);
        }
    }
    items.map(|it| (it, bundles))
}

/// Interval decoder on a flat test matrix, independent of the bundle
/// decoder: extrinsic item-to-test and test-to-item interval messages.
/// Returns final item bounds and whether a fixed point was reached.
pub fn flat_decode(matrix: &TestMatrix, s: &[u32], max_iters: usize) -> (Vec<BoundPair>, bool) {
    let n = matrix.n_cols;
    let full = BoundPair::full(1);
    let mut c2x: Vec<Vec<BoundPair>> = matrix.rows.iter().map(|r| vec![full; r.len()]).collect();
    let mut x2c = c2x.clone();
    // Edges of each item as (row, slot).
    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (r, row) in matrix.rows.iter().enumerate() {
        for (k, &i) in row.iter().enumerate() {
            edges[i].push((r, k));
        }
    }
    let mut converged = false;
    for _ in 0..max_iters {
        let mut changed = false;
        for e in &edges {
            for (a, &(r, k)) in e.iter().enumerate() {
                let mut b = full;
                for (c, &(r2, k2)) in e.iter().enumerate() {
                    if c != a {
                        b.lo = b.lo.max(c2x[r2][k2].lo);
                        b.hi = b.hi.min(c2x[r2][k2].hi);
                    }
                }
                changed |= x2c[r][k] != b;
                x2c[r][k] = b;
            }
        }
        for (r, row) in x2c.iter().enumerate() {
            let sum_lo: i64 = row.iter().map(|b| b.lo as i64).sum();
            let sum_hi: i64 = row.iter().map(|b| b.hi as i64).sum();
            for (k, b) in row.iter().enumerate() {
                let lo = (s[r] as i64 - (sum_hi - b.hi as i64)).max(0);
                let hi = (s[r] as i64 - (sum_lo - b.lo as i64)).min(1);
                let m = BoundPair::new(lo as u16, hi as u16);
                changed |= c2x[r][k] != m;
                c2x[r][k] = m;
            }
        }
        if !changed {
            converged = true;
            break;
        }
    }
    let bounds = edges
        .iter()
        .map(|e| {
            e.iter().fold(full, |acc, &(r, k)| {
                BoundPair::new(acc.lo.max(c2x[r][k].lo), acc.hi.min(c2x[r][k].hi))
            })
        })
        .collect();
    (bounds, converged)
}

/// The 8-item, 6-test design with `q = 2`, `d_v = 3`, `d_vx = 1`, `d_c = 4`.
pub fn example_graph() -> AugmentedGraph {
    AugmentedGraph {
        params: GtParams::derive(8, 2, 3, 1, 4).unwrap(),
        bundle_of: vec![0, 0, 1, 1, 2, 2, 3, 3],
        cn_x: vec![vec![0, 2, 4, 6], vec![1, 3, 5, 7]],
        cn_z: vec![vec![0, 3], vec![1, 2], vec![0, 2], vec![1, 3]],
        seed: 0,
    }
}
