//! Bundle-augmented regular bipartite test designs.
//!
//! Items `b*q..(b+1)*q` form bundle `b`. Item-level tests (CN_x) list item
//! indices; bundle-level tests (CN_z) list bundle indices and implicitly cover
//! all `q` items of each listed bundle. The physical tests only ever see the
//! flattened item incidence ([`TestMatrix`]).

mod build;
mod params;
mod validate;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded;

pub use params::GtParams;
pub use validate::{validate_graph, Finding, GraphReport, NodeRef};

/// Knobs for [`build_graph_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    /// Forbid two items of the same bundle in one item-level test.
    pub distinct_bundles_per_test: bool,
    /// Swap-attempt budget per edge class, as a multiple of its edge count.
    pub swap_factor: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            distinct_bundles_per_test: false,
            swap_factor: 10,
        }
    }
}

/// An instance of the augmented ensemble.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentedGraph {
    pub params: GtParams,
    /// Bundle index of each item.
    pub bundle_of: Vec<usize>,
    /// Item-level tests: sorted item indices of each CN_x.
    pub cn_x: Vec<Vec<usize>>,
    /// Bundle-level tests: sorted bundle indices of each CN_z.
    pub cn_z: Vec<Vec<usize>>,
    pub seed: u64,
}

/// Builds a random graph with default options.
pub fn build_graph(params: &GtParams, seed: u64) -> Result<AugmentedGraph> {
    build_graph_with(params, seed, &BuildOptions::default())
}

pub fn build_graph_with(
    params: &GtParams,
    seed: u64,
    opts: &BuildOptions,
) -> Result<AugmentedGraph> {
    params.check()?;
    let p = *params;
    let mut rng = seeded(seed);

    let q = p.q;
    let cn_z = build::configuration_model(
        p.n_h,
        p.d_vz,
        p.m_z,
        p.d_cz,
        &|b| b,
        opts.swap_factor * p.z_edges(),
        &mut rng,
    )
    .map_err(|e| Error::Construction(format!("bundle-level tests: {e}")))?;

    let class: &dyn Fn(usize) -> usize = if opts.distinct_bundles_per_test {
        &|i| i / q
    } else {
        &|i| i
    };
    let cn_x = build::configuration_model(
        p.n,
        p.d_vx,
        p.m_x,
        p.d_c,
        class,
        opts.swap_factor * p.x_edges(),
        &mut rng,
    )
    .map_err(|e| Error::Construction(format!("item-level tests: {e}")))?;

    Ok(AugmentedGraph {
        params: p,
        bundle_of: (0..p.n).map(|i| i / q).collect(),
        cn_x,
        cn_z,
        seed,
    })
}

impl AugmentedGraph {
    /// Items of every bundle, in increasing order.
    pub fn bundle_members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::with_capacity(self.params.q); self.params.n_h];
        for (i, &b) in self.bundle_of.iter().enumerate() {
            if let Some(m) = members.get_mut(b) {
                m.push(i);
            }
        }
        members
    }

    /// Flattens the design into the item incidence seen by the tests.
    /// Bundle-level tests come first, then item-level tests.
    pub fn flatten(&self) -> TestMatrix {
        flatten_to_test_matrix(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialization cannot fail")
    }

    /// Parses and validates a graph exported by [`AugmentedGraph::to_json`].
    pub fn from_json(s: &str) -> Result<Self> {
        let g: AugmentedGraph =
            serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        g.params.check()?;
        let report = validate_graph(&g);
        if !report.is_empty() {
            return Err(Error::Malformed(format!("graph fails validation: {report}")));
        }
        Ok(g)
    }
}

/// Sparse 0/1 test matrix stored as one sorted item list per row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestMatrix {
    pub n_cols: usize,
    pub rows: Vec<Vec<usize>>,
}

pub fn flatten_to_test_matrix(graph: &AugmentedGraph) -> TestMatrix {
    let members = graph.bundle_members();
    let mut rows = Vec::with_capacity(graph.cn_z.len() + graph.cn_x.len());
    for bundles in &graph.cn_z {
        let mut row: Vec<usize> = bundles
            .iter()
            .flat_map(|&b| members[b].iter().copied())
            .collect();
        row.sort_unstable();
        rows.push(row);
    }
    rows.extend(graph.cn_x.iter().cloned());
    TestMatrix {
        n_cols: graph.params.n,
        rows,
    }
}

impl TestMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn column_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.n_cols];
        for row in &self.rows {
            for &j in row {
                w[j] += 1;
            }
        }
        w
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|row| {
                let mut d = vec![0u8; self.n_cols];
                for &j in row {
                    d[j] = 1;
                }
                d
            })
            .collect()
    }

    /// Matrix Market coordinate/pattern text with 1-based indices.
    pub fn to_matrix_market(&self) -> String {
        let mut out = String::with_capacity(16 * self.nnz() + 64);
        out.push_str("%%MatrixMarket matrix coordinate pattern general\n");
        let _ = writeln!(out, "{} {} {}", self.n_rows(), self.n_cols, self.nnz());
        for (i, row) in self.rows.iter().enumerate() {
            for &j in row {
                let _ = writeln!(out, "{} {}", i + 1, j + 1);
            }
        }
        out
    }

    pub fn from_matrix_market(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('%'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Malformed("missing size line".into()))?;
        let dims: Vec<usize> = parse_fields(header)?;
        let [m, n, nnz] = dims[..] else {
            return Err(Error::Malformed(format!("bad size line: {header}")));
        };
        let mut rows = vec![Vec::new(); m];
        let mut count = 0;
        for line in lines {
            let ij: Vec<usize> = parse_fields(line)?;
            let [i, j] = ij[..] else {
                return Err(Error::Malformed(format!("bad entry: {line}")));
            };
            if i == 0 || j == 0 || i > m || j > n {
                return Err(Error::Malformed(format!("entry out of range: {line}")));
            }
            rows[i - 1].push(j - 1);
            count += 1;
        }
        if count != nnz {
            return Err(Error::Malformed(format!(
                "expected {nnz} entries, found {count}"
            )));
        }
        for row in &mut rows {
            row.sort_unstable();
        }
        Ok(TestMatrix { n_cols: n, rows })
    }
}

fn parse_fields(line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Malformed(format!("not an integer: {t}")))
        })
        .collect()
}
