//! Feasibility of an edge subset against an instance's requirements.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{subset_flow_value, FlowGraph};
use crate::graph::{Cut, Edge, EdgeWeighting, Instance, Requirements, VertexSet};
use crate::partition::{for_each_partition, KWayCut, EXACT_PARTITION_LIMIT};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A bipartition whose capacity in the subset is below `requirement`.
    Cut { cut: Cut, requirement: u64 },
    /// A multiway cut whose capacity is below `requirement`.
    Partition { cut: KWayCut, requirement: u64 },
    /// A terminal pair whose max flow falls short; `sink_side` is the sink
    /// side of a minimum cut.
    Pair {
        demand: usize,
        flow: i64,
        requirement: u64,
        sink_side: VertexSet,
    },
}

impl Witness {
    pub fn describe(&self) -> String {
        match self {
            Witness::Cut { cut, requirement } => format!(
                "cut {:?} has capacity {} < {}",
                cut.side,
                rational::format(&cut.capacity),
                requirement
            ),
            Witness::Partition { cut, requirement } => format!(
                "{}-way cut {:?} has capacity {} < {}",
                cut.parts,
                cut.blocks(),
                rational::format(&cut.capacity),
                requirement
            ),
            Witness::Pair {
                demand,
                flow,
                requirement,
                ..
            } => format!("pair #{demand} carries flow {flow} < {requirement}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub witness: Option<Witness>,
    /// False when a k-way check had to fall back on a heuristic cut family;
    /// a `feasible` verdict is then not a proof.
    pub exact: bool,
}

impl FeasibilityReport {
    fn pass(exact: bool) -> Self {
        FeasibilityReport {
            feasible: true,
            witness: None,
            exact,
        }
    }

    fn fail(witness: Witness) -> Self {
        FeasibilityReport {
            feasible: false,
            witness: Some(witness),
            exact: true,
        }
    }
}

pub fn subset_mask(inst: &Instance, subset: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; inst.m()];
    for &e in subset {
        if e >= inst.m() {
            return Err(Error::invalid("edge_subset", format!("edge {e} out of range")));
        }
        mask[e] = true;
    }
    Ok(mask)
}

/// Checks `subset` against the instance requirements. k-way instances with
/// more than ten vertices are checked heuristically and flagged `exact: false`.
pub fn check_feasible(inst: &Instance, subset: &[usize]) -> Result<FeasibilityReport> {
    check_feasible_with_pool(inst, subset, None)
}

/// As [`check_feasible`]; for large k-way instances the supplied pool of
/// near-minimum multiway cuts is checked in addition to the heuristic.
pub fn check_feasible_with_pool(
    inst: &Instance,
    subset: &[usize],
    kway_pool: Option<&[KWayCut]>,
) -> Result<FeasibilityReport> {
    let mask = subset_mask(inst, subset)?;
    let weights = EdgeWeighting::subset_capacities(inst, subset);
    match &inst.requirements {
        Requirements::Uniform(r) => Ok(check_uniform(inst, &mask, &weights, *r)),
        Requirements::Pairs(pairs) => {
            for (i, d) in pairs.iter().enumerate() {
                let mut g = FlowGraph::new(inst, int_caps(inst, &mask));
                let flow = g.max_flow(d.s, d.t);
                if flow < d.r as i64 {
                    return Ok(FeasibilityReport::fail(Witness::Pair {
                        demand: i,
                        flow,
                        requirement: d.r,
                        sink_side: g.source_side(d.s).complement(inst.n),
                    }));
                }
            }
            Ok(FeasibilityReport::pass(true))
        }
        Requirements::KWay(rs) => check_kway(inst, &mask, &weights, rs, kway_pool),
    }
}

fn int_caps(inst: &Instance, mask: &[bool]) -> Vec<i64> {
    inst.edges
        .iter()
        .zip(mask)
        .map(|(e, &on)| if on { e.capacity as i64 } else { 0 })
        .collect()
}

/// Minimum cut over `n-1` integral flows from vertex 0: (value, sink side).
pub(crate) fn min_cut_i64(inst: &Instance, caps: Vec<i64>) -> (i64, VertexSet) {
    let mut g = FlowGraph::with_orientation(inst, caps, false);
    let mut best: Option<(i64, VertexSet)> = None;
    for v in 1..inst.n {
        let f = g.max_flow(0, v);
        if best.as_ref().is_none_or(|(b, _)| f < *b) {
            best = Some((f, g.source_side(0).complement(inst.n)));
        }
    }
    best.unwrap_or((0, VertexSet::empty(inst.n)))
}

fn check_uniform(inst: &Instance, mask: &[bool], w: &EdgeWeighting, r: u64) -> FeasibilityReport {
    if inst.n < 2 {
        return FeasibilityReport::pass(true);
    }
    let (value, side) = min_cut_i64(inst, int_caps(inst, mask));
    if value >= r as i64 {
        return FeasibilityReport::pass(true);
    }
    let cut = Cut::new(inst, side, w).expect("min cut side is proper");
    FeasibilityReport::fail(Witness::Cut { cut, requirement: r })
}

/// Minimum `parts`-way cut by exhaustive partition enumeration.
pub(crate) fn min_kway_exact(inst: &Instance, w: &EdgeWeighting, parts: usize) -> Option<KWayCut> {
    let scaled = crate::scaled::Scaled::new(w);
    let mut best: Option<(crate::scaled::Value, Vec<usize>)> = None;
    for_each_partition(inst.n, parts, |labels| {
        let v = scaled.sum(
            inst.edges
                .iter()
                .enumerate()
                .filter(|(_, e)| labels[e.tail] != labels[e.head])
                .map(|(i, _)| i),
        );
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, labels.to_vec()));
        }
    });
    best.map(|(_, labels)| KWayCut::new(inst, &labels, w).expect("valid partition"))
}

fn check_kway(
    inst: &Instance,
    mask: &[bool],
    w: &EdgeWeighting,
    rs: &[u64],
    pool: Option<&[KWayCut]>,
) -> Result<FeasibilityReport> {
    let exact = inst.n <= EXACT_PARTITION_LIMIT;
    if let Some(pool) = pool {
        for c in pool {
            let Some(&req) = rs.get(c.parts.wrapping_sub(2)) else {
                continue;
            };
            let capacity = w.sum_over(&c.crossing);
            if capacity < rational::uint(req) {
                let cut = KWayCut::new(inst, &c.labels, w)?;
                return Ok(FeasibilityReport::fail(Witness::Partition { cut, requirement: req }));
            }
        }
    }
    for (i, &req) in rs.iter().enumerate() {
        let parts = i + 2;
        let best = if exact {
            min_kway_exact(inst, w, parts)
        } else if parts == 2 {
            let (_, side) = min_cut_i64(inst, int_caps(inst, mask));
            let labels: Vec<usize> = (0..inst.n).map(|v| side.contains(v) as usize).collect();
            Some(KWayCut::new(inst, &labels, w)?)
        } else {
            greedy_split(inst, w, parts)
        };
        if let Some(cut) = best {
            if cut.capacity < rational::uint(req) {
                return Ok(FeasibilityReport::fail(Witness::Partition { cut, requirement: req }));
            }
        }
    }
    Ok(FeasibilityReport::pass(exact))
}

/// Greedy splitting: repeatedly cut the block whose induced minimum cut is
/// cheapest. Upper bound on the minimum `parts`-way cut.
pub(crate) fn greedy_split(inst: &Instance, w: &EdgeWeighting, parts: usize) -> Option<KWayCut> {
    let mut labels = vec![0usize; inst.n];
    let mut blocks = 1;
    while blocks < parts {
        let mut best: Option<(Rational, usize, VertexSet, Vec<usize>)> = None;
        for b in 0..blocks {
            let verts: Vec<usize> = (0..inst.n).filter(|&v| labels[v] == b).collect();
            if verts.len() < 2 {
                continue;
            }
            let (value, side_local) = induced_min_cut(inst, w, &verts);
            if best.as_ref().is_none_or(|(v, ..)| value < *v) {
                best = Some((value, b, side_local, verts));
            }
        }
        let (_, _, side, verts) = best?;
        for (local, &v) in verts.iter().enumerate() {
            if side.contains(local) {
                labels[v] = blocks;
            }
        }
        blocks += 1;
    }
    KWayCut::new(inst, &labels, w).ok()
}

fn induced_min_cut(inst: &Instance, w: &EdgeWeighting, verts: &[usize]) -> (Rational, VertexSet) {
    let mut local = vec![usize::MAX; inst.n];
    for (i, &v) in verts.iter().enumerate() {
        local[v] = i;
    }
    let mut edges = Vec::new();
    let mut caps = Vec::new();
    for (i, e) in inst.edges.iter().enumerate() {
        if local[e.tail] != usize::MAX && local[e.head] != usize::MAX {
            edges.push(Edge::new(local[e.tail], local[e.head], 1, Rational::zero()));
            caps.push(w.values[i].clone());
        }
    }
    let sub = Instance {
        n: verts.len(),
        directed: false,
        edges,
        requirements: Requirements::Pairs(Vec::new()),
    };
    let mut g = FlowGraph::new(&sub, caps);
    let mut best: Option<(Rational, VertexSet)> = None;
    for v in 1..sub.n {
        let f = g.max_flow(0, v);
        if best.as_ref().is_none_or(|(b, _)| f < *b) {
            best = Some((f, g.source_side(0).complement(sub.n)));
        }
    }
    best.expect("block has two vertices")
}

/// Max-flow value of each demand on `subset` (helper for reports).
pub fn pair_flows(inst: &Instance, subset: &[usize]) -> Result<Vec<i64>> {
    let mask = subset_mask(inst, subset)?;
    Ok(match &inst.requirements {
        Requirements::Pairs(pairs) => pairs
            .iter()
            .map(|d| subset_flow_value(inst, &mask, d.s, d.t))
            .collect(),
        _ => Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Demand;
    use crate::rational::int;

    fn example1(r: u64, c: i64) -> Instance {
        Instance::new(
            3,
            false,
            vec![
                Edge::new(0, 1, r, int(0)),
                Edge::new(1, 2, r - 1, int(0)),
                Edge::new(0, 2, r, int(c)),
            ],
            Requirements::Uniform(r),
        )
        .unwrap()
    }

    #[test]
    fn example1_needs_pr() {
        let inst = example1(10, 100);
        let rep = check_feasible(&inst, &[0, 1]).unwrap();
        assert!(!rep.feasible);
        match rep.witness {
            Some(Witness::Cut { cut, requirement }) => {
                assert_eq!(cut.side.to_vec(), vec![2]);
                assert_eq!(cut.capacity, int(9));
                assert_eq!(requirement, 10);
            }
            other => panic!("unexpected witness {other:?}"),
        }
        assert!(check_feasible(&inst, &[0, 1, 2]).unwrap().feasible);
    }

    #[test]
    fn directed_pairs() {
        let inst = Instance::new(
            3,
            true,
            vec![Edge::new(0, 1, 2, int(0)), Edge::new(1, 2, 2, int(0))],
            Requirements::Pairs(vec![Demand { s: 2, t: 0, r: 1 }]),
        )
        .unwrap();
        let rep = check_feasible(&inst, &[0, 1]).unwrap();
        assert!(!rep.feasible);
    }

    #[test]
    fn kway_triangle_levels() {
        let inst = Instance::new(
            3,
            false,
            vec![
                Edge::new(0, 1, 1, int(1)),
                Edge::new(1, 2, 1, int(1)),
                Edge::new(0, 2, 1, int(1)),
            ],
            Requirements::KWay(vec![2, 3]),
        )
        .unwrap();
        let rep = check_feasible(&inst, &[0, 1, 2]).unwrap();
        assert!(rep.feasible && rep.exact);
        let rep = check_feasible(&inst, &[0, 1]).unwrap();
        assert!(!rep.feasible);
    }

    #[test]
    fn large_kway_is_flagged_heuristic() {
        let n = 12;
        let mut edges = Vec::new();
        for v in 0..n {
            edges.push(Edge::new(v, (v + 1) % n, 2, int(1)));
        }
        let inst = Instance::new(n, false, edges, Requirements::KWay(vec![2, 5])).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let rep = check_feasible(&inst, &all).unwrap();
        assert!(rep.feasible);
        assert!(!rep.exact);
        // Dropping an edge turns the cycle into a path: 3-way cut of capacity 4 < 5.
        let rep = check_feasible(&inst, &all[1..]).unwrap();
        assert!(!rep.feasible);
    }
}
