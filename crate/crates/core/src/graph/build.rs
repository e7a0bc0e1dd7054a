use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Random regular bipartite multigraph repaired into a constrained one.
///
/// Left node `l` owns sockets `l*left_degree..(l+1)*left_degree`. Right
/// sockets are shuffled onto them. Afterwards every right node may hold at
/// most one edge per conflict class (`class_of(l)`); violating edges are
/// fixed by random endpoint swaps, at most `max_swaps` attempts in total.
///
/// Returns, for each right node, the sorted list of its left neighbors.
pub(crate) fn configuration_model(
    left_count: usize,
    left_degree: usize,
    right_count: usize,
    right_degree: usize,
    class_of: &dyn Fn(usize) -> usize,
    max_swaps: usize,
    rng: &mut Rng,
) -> Result<Vec<Vec<usize>>> {
    let edges = left_count * left_degree;
    debug_assert_eq!(edges, right_count * right_degree);
    if edges == 0 {
        return Ok(vec![Vec::new(); right_count]);
    }

    let mut right_of: Vec<usize> = (0..right_count)
        .flat_map(|r| std::iter::repeat_n(r, right_degree))
        .collect();
    right_of.shuffle(rng);

    let left_of = |e: usize| e / left_degree;
    let class = |e: usize| class_of(left_of(e));

    let mut members: Vec<Vec<usize>> = vec![Vec::with_capacity(right_degree); right_count];
    for (e, &r) in right_of.iter().enumerate() {
        members[r].push(e);
    }

    let mut attempts = 0usize;
    loop {
        let bad = conflicting_edges(&members, &class);
        if bad.is_empty() {
            break;
        }
        for e in bad {
            // an earlier swap in this round may already have fixed it
            let r = right_of[e];
            if !holds_class(&members[r], class(e), Some(e), &class) {
                continue;
            }
            loop {
                if attempts >= max_swaps {
                    return Err(Error::Construction(format!(
                        "conflicting edges remain after {max_swaps} swap attempts"
                    )));
                }
                attempts += 1;
                let f = rng.gen_range(0..edges);
                let s = right_of[f];
                if s == r {
                    continue;
                }
                if holds_class(&members[s], class(e), Some(f), &class)
                    || holds_class(&members[r], class(f), Some(e), &class)
                {
                    continue;
                }
                let pe = members[r].iter().position(|&x| x == e).unwrap();
                let pf = members[s].iter().position(|&x| x == f).unwrap();
                members[r][pe] = f;
                members[s][pf] = e;
                right_of[e] = s;
                right_of[f] = r;
                break;
            }
        }
    }

    Ok(members
        .into_iter()
        .map(|es| {
            let mut ls: Vec<usize> = es.into_iter().map(left_of).collect();
            ls.sort_unstable();
            ls
        })
        .collect())
}

/// Does `edges` (ignoring `skip`) contain an edge of class `c`?
fn holds_class(
    edges: &[usize],
    c: usize,
    skip: Option<usize>,
    class: &dyn Fn(usize) -> usize,
) -> bool {
    edges
        .iter()
        .any(|&x| Some(x) != skip && class(x) == c)
}

/// Every edge except the first of each class, per right node.
fn conflicting_edges(members: &[Vec<usize>], class: &dyn Fn(usize) -> usize) -> Vec<usize> {
    let mut bad = Vec::new();
    let mut seen: Vec<(usize, usize)> = Vec::new();
    for es in members {
        seen.clear();
        seen.extend(es.iter().map(|&e| (class(e), e)));
        seen.sort_unstable();
        for w in seen.windows(2) {
            if w[0].0 == w[1].0 {
                bad.push(w[1].1);
            }
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn regular_and_simple() {
        let mut rng = seeded(3);
        let adj = configuration_model(60, 3, 45, 4, &|l| l, 10 * 180, &mut rng).unwrap();
        let mut deg = vec![0; 60];
        for row in &adj {
            assert_eq!(row.len(), 4);
            for w in row.windows(2) {
                assert!(w[0] < w[1], "parallel edge in {row:?}");
            }
            for &l in row {
                deg[l] += 1;
            }
        }
        assert!(deg.iter().all(|&d| d == 3));
    }

    #[test]
    fn class_constraint_is_enforced() {
        // 40 left nodes in 10 classes of 4
        let mut rng = seeded(9);
        let adj = configuration_model(40, 2, 10, 8, &|l| l / 4, 10 * 80, &mut rng).unwrap();
        for row in &adj {
            let mut classes: Vec<usize> = row.iter().map(|l| l / 4).collect();
            classes.sort_unstable();
            classes.dedup();
            assert_eq!(classes.len(), row.len());
        }
    }

    #[test]
    fn impossible_constraint_reports_failure() {
        // every right node needs 3 distinct classes but only 2 exist
        let mut rng = seeded(1);
        let err = configuration_model(4, 3, 4, 3, &|l| l / 2, 1000, &mut rng).unwrap_err();
        assert!(matches!(err, Error::Construction(_)));
    }
}
