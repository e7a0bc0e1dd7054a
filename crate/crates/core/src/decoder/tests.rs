use super::*;
use crate::graph::fixtures::small_example;
use crate::graph::{build_graph, GtParams};
use crate::model::{compute_syndrome, Population};

fn bp(lo: u16, hi: u16) -> BoundPair {
    BoundPair::new(lo, hi)
}

fn syndrome(values: &[u32], m_z: usize) -> Syndrome {
    Syndrome {
        values: values.to_vec(),
        m_z,
    }
}

/// q = 3, two bundles per bundle-level test, one of each test class per item.
fn q3_graph() -> AugmentedGraph {
    let params = GtParams::derive(12, 3, 2, 1, 6).unwrap();
    AugmentedGraph {
        params,
        bundle_of: (0..12).map(|i| i / 3).collect(),
        cn_x: vec![(0..6).collect(), (6..12).collect()],
        cn_z: vec![vec![0, 1], vec![2, 3]],
        seed: 0,
    }
}

#[test]
fn initial_messages_are_uninformative() {
    let g = DecoderGraph::new(&small_example()).unwrap();
    let st = DecoderState::init(&g);
    assert_eq!(st.z2c.len(), 8);
    assert!(st.z2c.iter().all(|m| *m == bp(0, 2)));
    assert!(st.c2x.iter().all(|m| *m == bp(0, 1)));
    assert!(st.x2f.iter().all(|m| *m == bp(0, 1)));
    assert_eq!(st.iteration, 0);

    let p = GtParams::derive(24, 1, 3, 1, 6).unwrap();
    let g1 = DecoderGraph::new(&build_graph(&p, 1).unwrap()).unwrap();
    let st1 = DecoderState::init(&g1);
    assert!(st1.c2z.iter().chain(&st1.z2f).all(|m| *m == bp(0, 1)));
}

#[test]
fn test_to_bundle_subtracts_other_bounds() {
    let g = DecoderGraph::new(&q3_graph()).unwrap();
    let mut st = DecoderState::init(&g);
    // test 0 holds edges 0 (bundle 0) and 1 (bundle 1)
    st.z2c[1] = bp(0, 1);
    st.update_cz_to_z(&g, &[2, 0]).unwrap();
    assert_eq!(st.c2z[0], bp(1, 2));
    // a zero outcome pins every neighbor to zero
    assert_eq!(st.c2z[2], bp(0, 0));
    assert_eq!(st.c2z[3], bp(0, 0));
}

#[test]
fn saturated_test_pins_both_bundles() {
    // s = d_c = 4 with q = 2: the only consistent assignment is (2, 2)
    let consistent: Vec<(u16, u16)> = (0..=2)
        .flat_map(|a| (0..=2).map(move |b| (a, b)))
        .filter(|(a, b)| a + b == 4)
        .collect();
    assert_eq!(consistent, vec![(2, 2)]);

    let g = DecoderGraph::new(&small_example()).unwrap();
    let mut st = DecoderState::init(&g);
    st.update_cz_to_z(&g, &[4, 0, 0, 0]).unwrap();
    assert_eq!(st.c2z[0], bp(2, 2));
    assert_eq!(st.c2z[1], bp(2, 2));
}

#[test]
fn bundle_messages_combine_tests_and_items() {
    let g = DecoderGraph::new(&small_example()).unwrap();
    // bundle 0 sits in tests 0 and 2: edges 0 and 4
    assert_eq!(g.bundle_edges(0), &[0, 4]);

    let mut st = DecoderState::init(&g);
    st.c2z[0] = bp(0, 2);
    st.c2z[4] = bp(1, 2);
    st.f2z[0] = bp(2, 2);
    st.update_z_to_cz(&g).unwrap();
    assert_eq!(st.z2c[0].lo, 2);

    let mut st = DecoderState::init(&g);
    st.c2z[4] = bp(1, 2);
    st.update_z_to_cz(&g).unwrap();
    assert_eq!(st.z2c[0], bp(1, 2));

    let mut st = DecoderState::init(&g);
    st.c2z[0] = bp(0, 1);
    st.c2z[4] = bp(1, 2);
    st.update_z_to_f(&g).unwrap();
    assert_eq!(st.z2f[0], bp(1, 1));
}

#[test]
fn bundle_to_item() {
    let g = DecoderGraph::new(&small_example()).unwrap();

    let mut st = DecoderState::init(&g);
    st.z2f[0] = bp(2, 2);
    st.update_f_to_x(&g).unwrap();
    assert_eq!(st.f2x[0], bp(1, 1));
    assert_eq!(st.f2x[1], bp(1, 1));

    let mut st = DecoderState::init(&g);
    st.z2f[1] = bp(0, 0);
    st.update_f_to_x(&g).unwrap();
    assert_eq!(st.f2x[2], bp(0, 0));
    assert_eq!(st.f2x[3], bp(0, 0));

    let mut st = DecoderState::init(&g);
    st.z2f[0] = bp(1, 1);
    st.x2f[1] = bp(1, 1);
    st.update_f_to_x(&g).unwrap();
    assert_eq!(st.f2x[0], bp(0, 0));
}

#[test]
fn item_to_bundle_check() {
    let p = GtParams::derive(8, 2, 3, 2, 4).unwrap();
    let g = DecoderGraph::new(&build_graph(&p, 4).unwrap()).unwrap();
    let [e0, e1] = [g.item_edges(0)[0] as usize, g.item_edges(0)[1] as usize];

    let mut st = DecoderState::init(&g);
    st.update_x_to_f(&g).unwrap();
    assert_eq!(st.x2f[0], bp(0, 1));

    st.c2x[e0] = bp(0, 1);
    st.c2x[e1] = bp(0, 0);
    st.update_x_to_f(&g).unwrap();
    assert_eq!(st.x2f[0], bp(0, 0));

    st.c2x[e0] = bp(1, 1);
    st.c2x[e1] = bp(0, 1);
    st.update_x_to_f(&g).unwrap();
    assert_eq!(st.x2f[0], bp(1, 1));
}

#[test]
fn item_level_tests() {
    let g = DecoderGraph::new(&small_example()).unwrap();
    let mut st = DecoderState::init(&g);
    // item test 1 (items 1,3,5,7) is negative
    st.update_cx_to_x(&g, &[0, 0]).unwrap();
    assert!(st.c2x[4..8].iter().all(|m| m.hi == 0));

    // item test 0 (items 0,2,4,6) positive with 2,4,6 known clean
    let mut st = DecoderState::init(&g);
    for e in 1..4 {
        st.x2c[e] = bp(0, 0);
    }
    st.update_cx_to_x(&g, &[1, 0]).unwrap();
    assert_eq!(st.c2x[0], bp(1, 1));
}

#[test]
fn single_item_test_degree_forwards_bundle_message() {
    let g = DecoderGraph::new(&small_example()).unwrap();
    let mut st = DecoderState::init(&g);
    st.f2x[3] = bp(1, 1);
    st.f2x[4] = bp(0, 0);
    st.update_x_to_cx(&g).unwrap();
    let e3 = g.item_edges(3)[0] as usize;
    let e4 = g.item_edges(4)[0] as usize;
    assert_eq!(st.x2c[e3], bp(1, 1));
    assert_eq!(st.x2c[e4], bp(0, 0));
}

#[test]
fn single_defective_small_example() {
    let graph = small_example();
    let truth = Population::from_defectives(8, &[0]);
    let s = compute_syndrome(&graph, &truth).unwrap();
    assert_eq!(s.values, vec![1, 0, 1, 0, 1, 0]);
    let out = decode(&graph, &s, DEFAULT_MAX_ITERS).unwrap();
    assert!(out.converged);
    assert_eq!(out.declared, vec![0]);
    assert_eq!(out.unresolved(), 0);
    for (i, b) in out.item_bounds.iter().enumerate() {
        let v = truth.x[i] as u16;
        assert_eq!(*b, bp(v, v), "item {i}");
    }
    assert_eq!(out.bundle_bounds, vec![bp(1, 1), bp(0, 0), bp(0, 0), bp(0, 0)]);

    // brute force: this is the only consistent population
    let consistent: Vec<u32> = (0u32..256)
        .filter(|&bits| {
            let x = Population {
                x: (0..8).map(|i| ((bits >> i) & 1) as u8).collect(),
            };
            compute_syndrome(&graph, &x).unwrap() == s
        })
        .collect();
    assert_eq!(consistent, vec![1]);
}

#[test]
fn zero_syndrome_converges_after_one_iteration() {
    let p = GtParams::derive(600, 5, 7, 2, 60).unwrap();
    let graph = build_graph(&p, 3).unwrap();
    let s = compute_syndrome(&graph, &Population::zeros(600)).unwrap();
    let out = decode(&graph, &s, DEFAULT_MAX_ITERS).unwrap();
    assert!(out.converged);
    assert_eq!(out.iterations, 1);
    assert!(out.declared.is_empty());
    assert_eq!(out.unresolved(), 0);
}

#[test]
fn contradictory_syndrome_is_rejected() {
    // bundle 0 + bundle 3 = 1, but other tests force both to zero
    let graph = small_example();
    let err = decode(&graph, &syndrome(&[1, 0, 0, 0, 0, 0], 4), 50).unwrap_err();
    assert!(matches!(err, Error::InconsistentSyndrome { .. }), "{err}");

    let err = decode(&graph, &syndrome(&[1, 0, 0], 4), 50).unwrap_err();
    assert!(matches!(err, Error::Dimension { .. }));
}

#[test]
fn iteration_budget_is_respected() {
    let p = GtParams::derive(2100, 5, 7, 2, 140).unwrap();
    let graph = build_graph(&p, 8).unwrap();
    let x = crate::model::sample_population(2100, 0.02, 8);
    let s = compute_syndrome(&graph, &x).unwrap();
    let full = decode(&graph, &s, DEFAULT_MAX_ITERS).unwrap();
    assert!(full.converged);
    if full.iterations > 1 {
        let cut = decode(&graph, &s, 1).unwrap();
        assert!(!cut.converged);
        assert_eq!(cut.iterations, 1);
    }
}

#[test]
fn classify_counts() {
    let graph = small_example();
    let truth = Population::from_defectives(8, &[0]);
    let s = compute_syndrome(&graph, &truth).unwrap();
    let out = decode(&graph, &s, DEFAULT_MAX_ITERS).unwrap();
    let m = classify(&out, Some(&truth));
    assert_eq!(m.misdetection_rate, Some(0.0));
    assert_eq!(m.false_alarm_rate, Some(0.0));
    assert_eq!(m.unresolved_fraction, 0.0);

    let blind = DecodeOutcome {
        item_bounds: vec![bp(0, 1); 8],
        bundle_bounds: vec![bp(0, 2); 4],
        iterations: 0,
        converged: true,
        declared: vec![],
    };
    let m = classify(&blind, Some(&truth));
    assert_eq!(m.misdetection_rate, Some(1.0));
    assert_eq!(m.false_alarm_rate, Some(0.0));
    assert_eq!(m.unresolved_fraction, 1.0);

    let m = classify(&blind, None);
    assert_eq!(m.misdetection_rate, None);
    assert_eq!(m.unresolved_fraction, 1.0);
}
