use proptest::prelude::*;

use qgt::graph::{build_graph, build_graph_with, validate_graph, AugmentedGraph, BuildOptions, GtParams, TestMatrix};
use qgt::model::{bundle_values, compute_syndrome, sample_population};

/// Divisibility-respecting ensembles: `n_h` is a multiple of `d_c`.
fn ensembles() -> impl Strategy<Value = GtParams> {
    (1usize..=5, 1usize..=4, 1usize..=3, 0usize..=3, 2usize..=5).prop_map(|(q, d_cz, d_vx, d_vz, k)| {
        let d_vz = if q == 1 { 0 } else { d_vz };
        let d_c = q * d_cz;
        let n = q * k * d_c.max(2);
        GtParams::derive(n, q, d_vx + d_vz, d_vx, d_c).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn built_graphs_are_regular(p in ensembles(), seed in any::<u64>()) {
        let g = build_graph(&p, seed).unwrap();
        prop_assert!(validate_graph(&g).is_empty());
        prop_assert_eq!(g.cn_x.len(), p.m_x);
        prop_assert_eq!(g.cn_z.len(), p.m_z);
        let mut item_deg = vec![0; p.n];
        for t in &g.cn_x {
            prop_assert_eq!(t.len(), p.d_c);
            prop_assert!(t.windows(2).all(|w| w[0] < w[1]));
            t.iter().for_each(|&i| item_deg[i] += 1);
        }
        prop_assert!(item_deg.iter().all(|&d| d == p.d_vx));
        let mut bundle_deg = vec![0; p.n_h];
        for t in &g.cn_z {
            prop_assert_eq!(t.len(), p.d_cz);
            prop_assert!(t.windows(2).all(|w| w[0] < w[1]));
            t.iter().for_each(|&b| bundle_deg[b] += 1);
        }
        prop_assert!(bundle_deg.iter().all(|&d| d == p.d_vz));
        prop_assert!(g.bundle_members().iter().all(|m| m.len() == p.q));
    }

    #[test]
    fn flattened_matrix_is_biregular(p in ensembles(), seed in any::<u64>()) {
        let m = build_graph(&p, seed).unwrap().flatten();
        prop_assert_eq!(m.n_rows(), p.m_x + p.m_z);
        prop_assert!(m.rows.iter().all(|r| r.len() == p.d_c));
        prop_assert!(m.column_weights().iter().all(|&w| w == p.d_v));
        prop_assert_eq!(m.nnz(), p.n * p.d_v);
        let back = TestMatrix::from_matrix_market(&m.to_matrix_market()).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn bundle_values_sum_to_defective_count(p in ensembles(), seed in any::<u64>(), gamma in 0.0f64..0.5) {
        let g = build_graph(&p, seed).unwrap();
        let pop = sample_population(p.n, gamma, seed ^ 0x5eed);
        let z = bundle_values(&g, &pop).unwrap();
        let sum_z: usize = z.iter().map(|&v| v as usize).sum();
        prop_assert_eq!(sum_z, pop.defective_count());
        prop_assert!(z.iter().all(|&v| v as usize <= p.q));
        let s = compute_syndrome(&g, &pop).unwrap();
        let total_z: usize = s.s_z().iter().map(|&v| v as usize).sum();
        let total_x: usize = s.s_x().iter().map(|&v| v as usize).sum();
        prop_assert_eq!(total_z, p.d_vz * sum_z);
        prop_assert_eq!(total_x, p.d_vx * pop.defective_count());
        // The flat matrix gives the same outcomes.
        let flat: Vec<u32> = g.flatten().rows.iter()
            .map(|r| r.iter().map(|&i| pop.x[i] as u32).sum())
            .collect();
        prop_assert_eq!(flat, s.values);
    }

    #[test]
    fn json_round_trip_and_determinism(p in ensembles(), seed in any::<u64>()) {
        let g = build_graph(&p, seed).unwrap();
        prop_assert_eq!(AugmentedGraph::from_json(&g.to_json()).unwrap(), g.clone());
        prop_assert_eq!(build_graph(&p, seed).unwrap(), g);
    }
}

#[test]
fn distinct_bundle_option_keeps_bundles_apart() {
    let p = GtParams::derive(600, 3, 4, 2, 12).unwrap();
    let opts = BuildOptions {
        distinct_bundles_per_test: true,
        ..BuildOptions::default()
    };
    for seed in 0..10 {
        let g = build_graph_with(&p, seed, &opts).unwrap();
        assert!(validate_graph(&g).is_empty());
        for t in &g.cn_x {
            let mut b: Vec<usize> = t.iter().map(|&i| g.bundle_of[i]).collect();
            b.dedup();
            assert_eq!(b.len(), t.len(), "test mixes two items of one bundle");
        }
    }
}

#[test]
fn indivisible_parameters_are_rejected() {
    assert!(GtParams::derive(12, 5, 3, 1, 4).is_err());
    assert!(GtParams::derive(12, 2, 3, 1, 5).is_err());
    assert!(GtParams::derive(12, 2, 3, 4, 4).is_err());
    assert!(GtParams::derive(0, 1, 3, 3, 4).is_err());
}
