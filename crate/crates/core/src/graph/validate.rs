use std::fmt;

use super::AugmentedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRef {
    Item(usize),
    Bundle(usize),
    ItemTest(usize),
    BundleTest(usize),
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeRef::Item(i) => write!(f, "item {i}"),
            NodeRef::Bundle(b) => write!(f, "bundle {b}"),
            NodeRef::ItemTest(t) => write!(f, "item-level test {t}"),
            NodeRef::BundleTest(t) => write!(f, "bundle-level test {t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Finding {
    Degree {
        node: NodeRef,
        expected: usize,
        actual: usize,
    },
    ParallelEdge {
        test: NodeRef,
        endpoint: NodeRef,
    },
    BundleSize {
        bundle: usize,
        expected: usize,
        actual: usize,
    },
    TestCount {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    OutOfRange {
        node: NodeRef,
        index: usize,
    },
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::Degree {
                node,
                expected,
                actual,
            } => write!(f, "{node} has degree {actual}, expected {expected}"),
            Finding::ParallelEdge { test, endpoint } => {
                write!(f, "{test} lists {endpoint} more than once")
            }
            Finding::BundleSize {
                bundle,
                expected,
                actual,
            } => write!(f, "bundle {bundle} has {actual} items, expected {expected}"),
            Finding::TestCount {
                what,
                expected,
                actual,
            } => write!(f, "{actual} {what}, expected {expected}"),
            Finding::OutOfRange { node, index } => {
                write!(f, "{node} references out-of-range index {index}")
            }
        }
    }
}

/// Result of [`validate_graph`]; empty iff every structural invariant holds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphReport {
    pub findings: Vec<Finding>,
}

impl GraphReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }
}

impl fmt::Display for GraphReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.findings.is_empty() {
            return write!(f, "ok");
        }
        for (k, finding) in self.findings.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{finding}")?;
        }
        Ok(())
    }
}

pub fn validate_graph(g: &AugmentedGraph) -> GraphReport {
    let p = &g.params;
    let mut findings = Vec::new();

    if g.bundle_of.len() != p.n {
        findings.push(Finding::TestCount {
            what: "bundle assignments",
            expected: p.n,
            actual: g.bundle_of.len(),
        });
    }
    let mut bundle_size = vec![0usize; p.n_h];
    for (i, &b) in g.bundle_of.iter().enumerate() {
        match bundle_size.get_mut(b) {
            Some(s) => *s += 1,
            None => findings.push(Finding::OutOfRange {
                node: NodeRef::Item(i),
                index: b,
            }),
        }
    }
    for (b, &s) in bundle_size.iter().enumerate() {
        if s != p.q {
            findings.push(Finding::BundleSize {
                bundle: b,
                expected: p.q,
                actual: s,
            });
        }
    }

    check_class(
        &g.cn_x,
        p.m_x,
        p.d_c,
        p.n,
        p.d_vx,
        "item-level tests",
        NodeRef::ItemTest,
        NodeRef::Item,
        &mut findings,
    );
    check_class(
        &g.cn_z,
        p.m_z,
        p.d_cz,
        p.n_h,
        p.d_vz,
        "bundle-level tests",
        NodeRef::BundleTest,
        NodeRef::Bundle,
        &mut findings,
    );

    GraphReport { findings }
}

#[allow(clippy::too_many_arguments)]
fn check_class(
    tests: &[Vec<usize>],
    m: usize,
    test_degree: usize,
    nodes: usize,
    node_degree: usize,
    what: &'static str,
    test_ref: fn(usize) -> NodeRef,
    node_ref: fn(usize) -> NodeRef,
    findings: &mut Vec<Finding>,
) {
    if tests.len() != m {
        findings.push(Finding::TestCount {
            what,
            expected: m,
            actual: tests.len(),
        });
    }
    let mut degree = vec![0usize; nodes];
    for (t, row) in tests.iter().enumerate() {
        if row.len() != test_degree {
            findings.push(Finding::Degree {
                node: test_ref(t),
                expected: test_degree,
                actual: row.len(),
            });
        }
        let mut sorted = row.clone();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                findings.push(Finding::ParallelEdge {
                    test: test_ref(t),
                    endpoint: node_ref(w[0]),
                });
            }
        }
        for &v in row {
            match degree.get_mut(v) {
                Some(d) => *d += 1,
                None => findings.push(Finding::OutOfRange {
                    node: test_ref(t),
                    index: v,
                }),
            }
        }
    }
    for (v, &d) in degree.iter().enumerate() {
        if d != node_degree {
            findings.push(Finding::Degree {
                node: node_ref(v),
                expected: node_degree,
                actual: d,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::small_example;

    #[test]
    fn small_example_is_clean() {
        assert!(validate_graph(&small_example()).is_empty());
    }

    #[test]
    fn deleted_edge_names_both_endpoints() {
        let mut g = small_example();
        g.cn_x[1].retain(|&i| i != 5);
        let report = validate_graph(&g);
        assert!(report.findings.contains(&Finding::Degree {
            node: NodeRef::Item(5),
            expected: 1,
            actual: 0
        }));
        assert!(report.findings.contains(&Finding::Degree {
            node: NodeRef::ItemTest(1),
            expected: 4,
            actual: 3
        }));
        assert!(report.to_string().contains("item 5"));
    }

    #[test]
    fn duplicated_edge_is_a_parallel_edge() {
        let mut g = small_example();
        g.cn_z[0] = vec![0, 0];
        let report = validate_graph(&g);
        assert!(report.findings.contains(&Finding::ParallelEdge {
            test: NodeRef::BundleTest(0),
            endpoint: NodeRef::Bundle(0)
        }));
    }

    #[test]
    fn bad_bundle_assignment() {
        let mut g = small_example();
        g.bundle_of[1] = 1;
        let report = validate_graph(&g);
        assert!(report.findings.iter().any(|f| matches!(
            f,
            Finding::BundleSize { bundle: 0, actual: 1, .. }
        )));
    }
}
