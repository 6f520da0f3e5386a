//! Solvers and oracles against brute-force enumeration on seeded random
//! instances.

mod common;

use std::collections::BTreeSet;

use capsndp_core::cutenum::{self, EnumOptions};
use capsndp_core::generators::{gen_random, RandomSpec, RequirementSpec};
use capsndp_core::graph::Demand;
use capsndp_core::kc::{self, Variant};
use capsndp_core::rational::{int, ratio, Rational};
use capsndp_core::{check_feasible, flow, multicopy, oracle, rounding, seeding};
use capsndp_core::{Edge, EdgeWeighting, Instance, Requirements};
use rand::Rng;

fn spec(n: usize, m: usize, requirements: RequirementSpec) -> RandomSpec {
    RandomSpec {
        n,
        m,
        cap: (1, 4),
        cost: (0, 9),
        requirements,
    }
}

fn mask_of(subset: &[usize]) -> u64 {
    subset.iter().fold(0, |acc, &e| acc | 1 << e)
}

fn subset_of(mask: u64, m: usize) -> Vec<usize> {
    (0..m).filter(|e| mask >> e & 1 == 1).collect()
}

/// Random directed instance with a single pair that all edges can serve.
fn random_directed(seed: u64) -> Instance {
    let mut rng = seeding::rng(seed);
    let n = rng.gen_range(3..=5);
    let m = rng.gen_range(n..=9);
    let edges: Vec<Edge> = (0..m)
        .map(|_| {
            let a = rng.gen_range(0..n);
            let b = (a + rng.gen_range(1..n)) % n;
            Edge::new(a, b, rng.gen_range(1..=3), int(rng.gen_range(0..=5)))
        })
        .collect();
    let probe = Instance::new(n, true, edges, Requirements::Pairs(vec![])).unwrap();
    let caps = EdgeWeighting::capacities(&probe);
    let flow = flow::max_flow(&probe, &caps, 0, n - 1).unwrap().value;
    let r = capsndp_core::rational::to_f64(&flow) as u64;
    let pairs = if r == 0 { vec![] } else { vec![Demand { s: 0, t: n - 1, r: rng.gen_range(1..=r) }] };
    probe.with_requirements(Requirements::Pairs(pairs)).unwrap()
}

#[test]
fn global_min_cut_matches_enumeration() {
    for seed in 0..40 {
        let inst = gen_random(&spec(2 + (seed as usize % 9), 14, RequirementSpec::Uniform), seed).unwrap();
        let w = common::capacities(&inst);
        let cut = flow::global_min_cut(&inst, &EdgeWeighting::capacities(&inst)).unwrap();
        assert_eq!(cut.capacity, common::min_cut(&inst, &w), "seed {seed}");
        assert_eq!(common::cut_value(&inst, mask_of(&cut.side.to_vec()), &w), cut.capacity);
    }
}

#[test]
fn near_min_cuts_match_enumeration() {
    for seed in 0..30 {
        let inst = gen_random(&spec(3 + (seed as usize % 8), 16, RequirementSpec::Uniform), seed).unwrap();
        let w = common::capacities(&inst);
        let min = common::min_cut(&inst, &w);
        for alpha in [int(1), ratio(3, 2), int(2)] {
            let expected: BTreeSet<u64> = common::all_cuts(&inst, &w)
                .into_iter()
                .filter(|(_, v)| *v <= &alpha * &min)
                .map(|(m, _)| m)
                .collect();
            let pool = cutenum::enumerate_near_min_cuts(&inst, &EdgeWeighting::capacities(&inst), &alpha, seed).unwrap();
            let got: BTreeSet<u64> = pool.cuts.iter().map(|c| mask_of(&c.side.to_vec())).collect();
            assert_eq!(got, expected, "seed {seed} alpha {alpha}");
            assert!(pool.complete);
        }
    }
}

#[test]
fn contraction_finds_every_near_min_cut() {
    let opts = EnumOptions {
        force_randomized: true,
        ..EnumOptions::default()
    };
    for seed in 0..20 {
        let inst = gen_random(&spec(3 + (seed as usize % 5), 10, RequirementSpec::Uniform), seed).unwrap();
        let w = common::capacities(&inst);
        let min = common::min_cut(&inst, &w);
        let alpha = ratio(3, 2);
        let expected: BTreeSet<u64> = common::all_cuts(&inst, &w)
            .into_iter()
            .filter(|(_, v)| *v <= &alpha * &min)
            .map(|(m, _)| m)
            .collect();
        let pool =
            cutenum::enumerate_near_min_cuts_with(&inst, &EdgeWeighting::capacities(&inst), &alpha, seed, &opts).unwrap();
        let got: BTreeSet<u64> = pool.cuts.iter().map(|c| mask_of(&c.side.to_vec())).collect();
        assert_eq!(got, expected, "seed {seed}");
    }
}

#[test]
fn kway_cuts_match_enumeration() {
    for seed in 0..20 {
        let n = 3 + (seed as usize % 4);
        let inst = gen_random(&spec(n, 12, RequirementSpec::Uniform), seed).unwrap();
        let w = common::capacities(&inst);
        for parts in 2..=3.min(n) {
            let values: Vec<(Vec<usize>, Rational)> = common::partitions(n, parts)
                .into_iter()
                .map(|l| {
                    let v = common::partition_crossing(&inst, &l).iter().map(|&e| w[e].clone()).sum();
                    (l, v)
                })
                .collect();
            let min = values.iter().map(|(_, v)| v.clone()).min().unwrap();
            let alpha = ratio(3, 2);
            let expected: BTreeSet<Vec<usize>> =
                values.into_iter().filter(|(_, v)| *v <= &alpha * &min).map(|(l, _)| l).collect();
            let pool = cutenum::enumerate_near_min_kway_cuts(
                &inst,
                &EdgeWeighting::capacities(&inst),
                parts,
                &alpha,
                seed,
                &EnumOptions::default(),
            )
            .unwrap();
            let got: BTreeSet<Vec<usize>> = pool.cuts.into_iter().map(|c| c.labels).collect();
            assert_eq!(got, expected, "seed {seed} parts {parts}");
        }
    }
}

#[test]
fn feasibility_matches_enumeration() {
    let kinds = [
        RequirementSpec::Uniform,
        RequirementSpec::Kway { levels: 2 },
        RequirementSpec::Pairs { pairs: 3 },
    ];
    for (k, requirements) in kinds.into_iter().enumerate() {
        for seed in 0..12 {
            let inst = gen_random(&spec(3 + (seed as usize % 5), 9, requirements.clone()), seed).unwrap();
            let mut rng = seeding::rng(seed + 100 * k as u64);
            for _ in 0..20 {
                let mask: u64 = rng.gen_range(0..(1u64 << inst.m()));
                let report = check_feasible(&inst, &subset_of(mask, inst.m())).unwrap();
                assert_eq!(report.feasible, common::feasible(&inst, mask), "seed {seed} mask {mask:b}");
            }
        }
    }
    for seed in 0..20 {
        let inst = random_directed(seed);
        for mask in 0..(1u64 << inst.m()) {
            let report = check_feasible(&inst, &subset_of(mask, inst.m())).unwrap();
            assert_eq!(report.feasible, common::feasible(&inst, mask), "directed seed {seed}");
        }
    }
}

#[test]
fn exact_optimum_matches_enumeration() {
    let kinds = [
        RequirementSpec::Uniform,
        RequirementSpec::Kway { levels: 2 },
        RequirementSpec::Pairs { pairs: 2 },
    ];
    for requirements in kinds {
        for seed in 0..8 {
            let inst = gen_random(&spec(3 + (seed as usize % 4), 10, requirements.clone()), seed).unwrap();
            let exact = oracle::exact_optimum(&inst, false).unwrap();
            assert_eq!(Some(exact.cost.clone()), common::optimum(&inst), "{requirements:?} seed {seed}");
            assert!(common::feasible(&inst, mask_of(&exact.subset)));
        }
    }
    for seed in 0..10 {
        let inst = random_directed(seed);
        assert_eq!(Some(oracle::exact_optimum(&inst, false).unwrap().cost), common::optimum(&inst));
    }
}

#[test]
fn multicopy_oracle_matches_enumeration() {
    for seed in 0..40 {
        let inst = gen_random(
            &RandomSpec {
                n: 3 + (seed as usize % 2),
                m: 4,
                cap: (1, 3),
                cost: (1, 5),
                requirements: RequirementSpec::Pairs { pairs: 2 },
            },
            seed,
        )
        .unwrap();
        let exact = oracle::exact_optimum_multicopy(&inst, false).unwrap();
        assert_eq!(exact.cost, common::multicopy_optimum(&inst), "seed {seed}");
        assert!(common::multicopy_feasible(&inst, &exact.copies));
        let run = multicopy::run(&inst).unwrap();
        assert!(common::multicopy_feasible(&inst, &run.copies));
        assert!(run.cost >= exact.cost);
    }
}

#[test]
fn lp_values_sandwich_the_optimum() {
    for seed in 0..15 {
        let inst = gen_random(&spec(4 + (seed as usize % 4), 9, RequirementSpec::Uniform), seed).unwrap();
        let std = kc::std_lp_optimum(&inst, &Variant::Uniform).unwrap().certificate.cost;
        let good = kc::solve_good(&inst, &Variant::Uniform, seed).unwrap();
        let opt = common::optimum(&inst).unwrap();
        assert!(std <= good.certificate.cost, "seed {seed}");
        assert!(good.certificate.cost <= opt, "seed {seed}");
    }
}

#[test]
fn rounded_sets_are_feasible() {
    for seed in 0..15 {
        let inst = gen_random(&spec(4 + (seed as usize % 5), 11, RequirementSpec::Uniform), seed).unwrap();
        let good = kc::solve_good(&inst, &Variant::Uniform, seed).unwrap();
        let report = rounding::round(&inst, &good.solution, &Variant::Uniform, seed).unwrap();
        assert!(common::feasible(&inst, mask_of(&report.selected)), "seed {seed}");
        assert_eq!(report.cost, common::subset_cost(&inst, mask_of(&report.selected)));
    }
}
