mod common;

use capsndp_core::cutenum::{self, EnumOptions};
use capsndp_core::graph::Demand;
use capsndp_core::kc::{self, check_kc, residual_requirement, ConstraintPool, CutShape, KcConstraint, Variant};
use capsndp_core::partition::{canonical_labels, for_each_partition, stirling2};
use capsndp_core::rational::{int, ratio};
use capsndp_core::{check_feasible, flow, parse_instance, rounding, serialize_instance};
use capsndp_core::{Edge, EdgeWeighting, Instance, Requirements, VertexSet};
use proptest::prelude::*;

type RawEdge = (usize, usize, u64, u64);

fn raw_graph(max_n: usize, max_m: usize) -> impl Strategy<Value = (usize, Vec<RawEdge>)> {
    (2..=max_n).prop_flat_map(move |n| {
        let edge = (0..n, 0..n - 1, 1u64..=4, 0u64..=6).prop_map(|(a, b, c, k)| (a, if b >= a { b + 1 } else { b }, c, k));
        (Just(n), prop::collection::vec(edge, 1..=max_m))
    })
}

fn build(n: usize, raw: &[RawEdge], directed: bool, requirements: Requirements) -> Instance {
    let edges = raw.iter().map(|&(a, b, c, k)| Edge::new(a, b, c, int(k as i64))).collect();
    Instance::new(n, directed, edges, requirements).unwrap()
}

fn mask_of(subset: &[usize]) -> u64 {
    subset.iter().fold(0, |acc, &e| acc | 1 << e)
}

fn subset_of(mask: u64, m: usize) -> Vec<usize> {
    (0..m).filter(|e| mask >> e & 1 == 1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn max_flow_equals_min_st_cut((n, raw) in raw_graph(7, 12), directed in any::<bool>(), s_t in (0usize..7, 0usize..7)) {
        let (s, t) = (s_t.0 % n, s_t.1 % n);
        prop_assume!(s != t);
        let inst = build(n, &raw, directed, Requirements::Pairs(vec![]));
        let w = common::capacities(&inst);
        let best = (0u64..(1 << n))
            .filter(|m| m >> s & 1 == 1 && m >> t & 1 == 0)
            .map(|m| common::cut_value(&inst, m, &w))
            .min()
            .unwrap();
        let f = flow::max_flow(&inst, &EdgeWeighting::capacities(&inst), s, t).unwrap();
        prop_assert_eq!(&f.value, &best);
        let carried = f.paths.iter().fold(int(0), |acc, p| acc + &p.amount);
        prop_assert_eq!(carried, best);
    }

    #[test]
    fn global_min_cut_is_minimum((n, raw) in raw_graph(8, 14)) {
        let inst = build(n, &raw, false, Requirements::Pairs(vec![]));
        let w = common::capacities(&inst);
        let cut = flow::global_min_cut(&inst, &EdgeWeighting::capacities(&inst)).unwrap();
        prop_assert_eq!(&cut.capacity, &common::min_cut(&inst, &w));
        prop_assert!(!cut.side.contains(0));
    }

    #[test]
    fn feasibility_is_monotone((n, raw) in raw_graph(6, 10), r in 1u64..4, mask in any::<u64>(), extra in any::<u64>()) {
        let inst = build(n, &raw, false, Requirements::Uniform(r));
        let full = (1u64 << inst.m()) - 1;
        let (small, large) = (mask & full, (mask | extra) & full);
        let a = check_feasible(&inst, &subset_of(small, inst.m())).unwrap().feasible;
        let b = check_feasible(&inst, &subset_of(large, inst.m())).unwrap().feasible;
        prop_assert_eq!(a, common::feasible(&inst, small));
        prop_assert!(!a || b);
    }

    #[test]
    fn serialization_roundtrips((n, raw) in raw_graph(8, 12), directed in any::<bool>(), r in 1u64..5, den in 1i64..7) {
        let edges = raw.iter().map(|&(a, b, c, k)| Edge::new(a, b, c, ratio(k as i64, den))).collect();
        let reqs = Requirements::Pairs(vec![Demand { s: 0, t: n - 1, r }]);
        let inst = Instance::new(n, directed, edges, reqs).unwrap();
        let bytes = serialize_instance(&inst).unwrap();
        let back = parse_instance(&bytes).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(serialize_instance(&back).unwrap(), bytes);
    }

    #[test]
    fn residual_shrinks_as_a_grows((n, raw) in raw_graph(6, 10), r in 1u64..10, a in any::<u64>(), b in any::<u64>()) {
        let inst = build(n, &raw, false, Requirements::Uniform(r));
        let side = VertexSet::from_mask(n, 2);
        let crossing = inst.crossing(&side);
        let small: Vec<usize> = crossing.iter().copied().filter(|e| a >> e & 1 == 1).collect();
        let large: Vec<usize> = crossing.iter().copied().filter(|e| (a | b) >> e & 1 == 1).collect();
        let rs = residual_requirement(&inst, &crossing, &small, r);
        let rl = residual_requirement(&inst, &crossing, &large, r);
        prop_assert!(rl <= rs);
        prop_assert!(rs <= r);
    }

    #[test]
    fn kc_rows_hold_for_feasible_sets((n, raw) in raw_graph(5, 8), r in 1u64..5, a_bits in any::<u64>()) {
        let inst = build(n, &raw, false, Requirements::Uniform(r));
        let all: Vec<usize> = (0..inst.m()).collect();
        prop_assume!(check_feasible(&inst, &all).unwrap().feasible);
        let x: Vec<_> = (0..inst.m()).map(|_| int(1)).collect();
        for mask in common::canonical_masks(n) {
            let crossing = common::crossing(&inst, mask);
            let a: Vec<usize> = crossing.iter().copied().filter(|e| a_bits >> e & 1 == 1).collect();
            prop_assert!(check_kc(&inst, &x, &crossing, &a, r).satisfied);
        }
    }

    #[test]
    fn pool_ignores_duplicates((n, raw) in raw_graph(5, 8), r in 1u64..5, a_bits in any::<u64>()) {
        let inst = build(n, &raw, false, Requirements::Uniform(r));
        let side = VertexSet::from_mask(n, 2);
        let crossing = inst.crossing(&side);
        let a: Vec<usize> = crossing.iter().copied().filter(|e| a_bits >> e & 1 == 1).collect();
        let mut pool = ConstraintPool::new();
        let shape = CutShape::Bipartition { side };
        prop_assert!(pool.insert(KcConstraint::new(&inst, shape.clone(), crossing.clone(), r, &a)));
        prop_assert!(!pool.insert(KcConstraint::new(&inst, shape.clone(), crossing, r, &a)));
        prop_assert_eq!(pool.len(), 1);
        prop_assert!(pool.contains(&shape, &a));
    }

    #[test]
    fn partitions_are_canonical_and_counted(n in 1usize..8, k in 1usize..8) {
        prop_assume!(k <= n);
        let mut count = 0u128;
        for_each_partition(n, k, |labels| {
            count += 1;
            assert_eq!(canonical_labels(labels), labels.to_vec());
        });
        prop_assert_eq!(count, stirling2(n, k));
        prop_assert_eq!(count as usize, common::partitions(n, k).len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn contraction_pool_is_seed_independent((n, raw) in raw_graph(6, 10)) {
        let inst = build(n, &raw, false, Requirements::Uniform(1));
        let w = EdgeWeighting::capacities(&inst);
        prop_assume!(flow::global_min_cut(&inst, &w).unwrap().capacity > int(0));
        let exact = cutenum::enumerate_near_min_cuts(&inst, &w, &int(1), 0).unwrap();
        let opts = EnumOptions { force_randomized: true, ..EnumOptions::default() };
        for seed in 0..20 {
            let pool = cutenum::enumerate_near_min_cuts_with(&inst, &w, &int(1), seed, &opts).unwrap();
            prop_assert_eq!(&pool.cuts, &exact.cuts);
        }
    }

    #[test]
    fn solve_and_round_are_deterministic((n, raw) in raw_graph(6, 10), seed in any::<u64>()) {
        let inst = build(n, &raw, false, Requirements::Uniform(1));
        let all: Vec<usize> = (0..inst.m()).collect();
        prop_assume!(check_feasible(&inst, &all).unwrap().feasible);
        let a = kc::solve_good(&inst, &Variant::Uniform, seed).unwrap();
        let b = kc::solve_good(&inst, &Variant::Uniform, seed).unwrap();
        prop_assert_eq!(&a.certificate, &b.certificate);
        let ra = rounding::round(&inst, &a.solution, &Variant::Uniform, seed).unwrap();
        let rb = rounding::round(&inst, &b.solution, &Variant::Uniform, seed).unwrap();
        prop_assert_eq!(&ra, &rb);
        prop_assert!(common::feasible(&inst, mask_of(&ra.selected)));
    }
}
