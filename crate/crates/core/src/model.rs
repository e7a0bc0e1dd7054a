//! Defective populations and noiseless quantitative test outcomes.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::AugmentedGraph;
use crate::rng::seeded;

/// Defect indicator per item (1 = defective).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Population {
    pub x: Vec<u8>,
}

impl Population {
    pub fn zeros(n: usize) -> Self {
        Self { x: vec![0; n] }
    }

    pub fn from_defectives(n: usize, defectives: &[usize]) -> Self {
        let mut x = vec![0; n];
        for &i in defectives {
            x[i] = 1;
        }
        Self { x }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn defective_count(&self) -> usize {
        self.x.iter().filter(|&&v| v == 1).count()
    }

    pub fn is_defective(&self, i: usize) -> bool {
        self.x[i] == 1
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("population serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: Population = serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        if let Some(v) = p.x.iter().find(|&&v| v > 1) {
            return Err(Error::Malformed(format!("population entry {v} is not 0/1")));
        }
        Ok(p)
    }
}

/// I.i.d. Bernoulli(`gamma`) defects; `gamma` is a probability, not a percent.
pub fn sample_population(n: usize, gamma: f64, seed: u64) -> Population {
    assert!((0.0..=1.0).contains(&gamma), "gamma = {gamma} outside [0, 1]");
    let mut rng = seeded(seed);
    Population {
        x: (0..n).map(|_| u8::from(rng.gen_bool(gamma))).collect(),
    }
}

/// Test outcomes, bundle-level tests first (`s_z`) then item-level (`s_x`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Syndrome {
    pub values: Vec<u32>,
    pub m_z: usize,
}

impl Syndrome {
    pub fn s_z(&self) -> &[u32] {
        &self.values[..self.m_z]
    }

    pub fn s_x(&self) -> &[u32] {
        &self.values[self.m_z..]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// JSON array of test outcomes.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.values).expect("syndrome serialization cannot fail")
    }

    /// Reads a JSON array of outcomes for `graph`'s test layout.
    pub fn from_json(s: &str, graph: &AugmentedGraph) -> Result<Self> {
        let values: Vec<u32> =
            serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        let expected = graph.params.m();
        if values.len() != expected {
            return Err(Error::Dimension {
                what: "syndrome",
                got: values.len(),
                expected,
            });
        }
        Ok(Self {
            values,
            m_z: graph.params.m_z,
        })
    }
}

/// `s = x A^T` over the flattened test matrix.
pub fn compute_syndrome(graph: &AugmentedGraph, pop: &Population) -> Result<Syndrome> {
    let p = &graph.params;
    if pop.len() != p.n {
        return Err(Error::Dimension {
            what: "population",
            got: pop.len(),
            expected: p.n,
        });
    }
    let z = bundle_values(graph, pop)?;
    let mut values = Vec::with_capacity(p.m());
    values.extend(
        graph
            .cn_z
            .iter()
            .map(|bundles| bundles.iter().map(|&b| z[b] as u32).sum::<u32>()),
    );
    values.extend(
        graph
            .cn_x
            .iter()
            .map(|items| items.iter().map(|&i| pop.x[i] as u32).sum::<u32>()),
    );
    Ok(Syndrome {
        values,
        m_z: p.m_z,
    })
}

/// Number of defectives in each bundle.
pub fn bundle_values(graph: &AugmentedGraph, pop: &Population) -> Result<Vec<u16>> {
    let p = &graph.params;
    if pop.len() != p.n {
        return Err(Error::Dimension {
            what: "population",
            got: pop.len(),
            expected: p.n,
        });
    }
    let mut z = vec![0u16; p.n_h];
    for (i, &b) in graph.bundle_of.iter().enumerate() {
        z[b] += pop.x[i] as u16;
    }
    Ok(z)
}
