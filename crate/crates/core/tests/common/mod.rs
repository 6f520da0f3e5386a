//! Brute-force reference implementations built from cut and partition
//! enumeration only. They share no code with the solvers under test beyond
//! the instance types.
#![allow(dead_code)]

use capsndp_core::rational::{self, Rational};
use capsndp_core::{Instance, Requirements};
use num_traits::Zero;

/// Nonempty sides that exclude vertex 0, as bitmasks.
pub fn canonical_masks(n: usize) -> impl Iterator<Item = u64> {
    (1u64..(1u64 << n)).filter(|m| m & 1 == 0)
}

pub fn crosses(inst: &Instance, e: usize, mask: u64) -> bool {
    let edge = &inst.edges[e];
    let (a, b) = (mask >> edge.tail & 1 == 1, mask >> edge.head & 1 == 1);
    if inst.directed {
        a && !b
    } else {
        a != b
    }
}

pub fn crossing(inst: &Instance, mask: u64) -> Vec<usize> {
    (0..inst.m()).filter(|&e| crosses(inst, e, mask)).collect()
}

pub fn cut_value(inst: &Instance, mask: u64, w: &[Rational]) -> Rational {
    crossing(inst, mask).iter().fold(Rational::zero(), |acc, &e| acc + &w[e])
}

pub fn capacities(inst: &Instance) -> Vec<Rational> {
    inst.edges.iter().map(|e| rational::uint(e.capacity)).collect()
}

/// Every canonical cut with its value.
pub fn all_cuts(inst: &Instance, w: &[Rational]) -> Vec<(u64, Rational)> {
    canonical_masks(inst.n).map(|m| (m, cut_value(inst, m, w))).collect()
}

pub fn min_cut(inst: &Instance, w: &[Rational]) -> Rational {
    all_cuts(inst, w).into_iter().map(|(_, v)| v).min().expect("n >= 2")
}

/// Restricted growth strings of length `n` with exactly `k` blocks.
pub fn partitions(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(labels: &mut Vec<usize>, n: usize, k: usize, used: usize, out: &mut Vec<Vec<usize>>) {
        if labels.len() == n {
            if used == k {
                out.push(labels.clone());
            }
            return;
        }
        if used + (n - labels.len()) < k {
            return;
        }
        for l in 0..=used.min(k - 1) {
            labels.push(l);
            go(labels, n, k, used.max(l + 1), out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, k, 0, &mut out);
    out
}

pub fn partition_crossing(inst: &Instance, labels: &[usize]) -> Vec<usize> {
    (0..inst.m())
        .filter(|&e| labels[inst.edges[e].tail] != labels[inst.edges[e].head])
        .collect()
}

/// Capacity of `subset` across the cut `mask`.
fn subset_cut(inst: &Instance, subset: u64, mask: u64) -> u64 {
    (0..inst.m())
        .filter(|&e| subset >> e & 1 == 1 && crosses(inst, e, mask))
        .map(|e| inst.edges[e].capacity)
        .sum()
}

/// Requirement of the cut `mask` under pair requirements.
pub fn pair_requirement(inst: &Instance, mask: u64) -> u64 {
    match &inst.requirements {
        Requirements::Pairs(pairs) => pairs
            .iter()
            .filter(|d| {
                let (a, b) = (mask >> d.s & 1 == 1, mask >> d.t & 1 == 1);
                if inst.directed {
                    a && !b
                } else {
                    a != b
                }
            })
            .map(|d| d.r)
            .max()
            .unwrap_or(0),
        _ => unreachable!("pair requirements only"),
    }
}

/// Feasibility of the edge set `subset` by enumerating every cut (and
/// every partition for k-way requirements).
pub fn feasible(inst: &Instance, subset: u64) -> bool {
    match &inst.requirements {
        Requirements::Uniform(r) => canonical_masks(inst.n).all(|m| subset_cut(inst, subset, m) >= *r),
        Requirements::KWay(rs) => rs.iter().enumerate().all(|(i, &r)| {
            partitions(inst.n, i + 2).iter().all(|labels| {
                partition_crossing(inst, labels)
                    .iter()
                    .filter(|&&e| subset >> e & 1 == 1)
                    .map(|&e| inst.edges[e].capacity)
                    .sum::<u64>()
                    >= r
            })
        }),
        Requirements::Pairs(_) => {
            let masks: Box<dyn Iterator<Item = u64>> = if inst.directed {
                Box::new(0..(1u64 << inst.n))
            } else {
                Box::new(canonical_masks(inst.n))
            };
            masks
                .into_iter()
                .all(|m| subset_cut(inst, subset, m) >= pair_requirement(inst, m))
        }
    }
}

pub fn subset_cost(inst: &Instance, subset: u64) -> Rational {
    (0..inst.m())
        .filter(|e| subset >> e & 1 == 1)
        .fold(Rational::zero(), |acc, e| acc + &inst.edges[e].cost)
}

/// Cheapest feasible edge set over all `2^m` subsets.
pub fn optimum(inst: &Instance) -> Option<Rational> {
    assert!(inst.m() <= 16, "brute force is limited to 16 edges");
    (0..(1u64 << inst.m()))
        .filter(|&s| feasible(inst, s))
        .map(|s| subset_cost(inst, s))
        .min()
}

/// Feasibility of a copy vector under pair requirements.
pub fn multicopy_feasible(inst: &Instance, copies: &[u64]) -> bool {
    canonical_masks(inst.n).all(|m| {
        let cap: u64 = crossing(inst, m)
            .iter()
            .map(|&e| copies[e] * inst.edges[e].capacity)
            .sum();
        cap >= pair_requirement(inst, m)
    })
}

/// Cheapest copy vector with at most `ceil(max R / u)` copies per edge.
pub fn multicopy_optimum(inst: &Instance) -> Rational {
    let top = inst.max_requirement();
    let limits: Vec<u64> = inst.edges.iter().map(|e| top.div_ceil(e.capacity)).collect();
    let mut copies = vec![0u64; inst.m()];
    let mut best: Option<Rational> = None;
    loop {
        if multicopy_feasible(inst, &copies) {
            let cost = copies
                .iter()
                .zip(&inst.edges)
                .fold(Rational::zero(), |acc, (&c, e)| acc + rational::uint(c) * &e.cost);
            if best.as_ref().is_none_or(|b| cost < *b) {
                best = Some(cost);
            }
        }
        let mut i = 0;
        loop {
            if i == copies.len() {
                return best.expect("the all-max vector is feasible");
            }
            if copies[i] < limits[i] {
                copies[i] += 1;
                break;
            }
            copies[i] = 0;
            i += 1;
        }
    }
}
