//! Max-flow / min-cut on capacitated multigraphs.
//!
//! The engine is generic over the capacity type so that integral feasibility
//! checks run on `i64` while fractional capacities `u(e)·x_e` use exact
//! rationals. Augmentation is shortest-path (Edmonds–Karp), which terminates
//! on rational capacities.

use std::collections::VecDeque;
use std::ops::{Add, Sub};

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Cut, EdgeWeighting, Instance, VertexSet};
use crate::rational::{self, Rational};

pub trait FlowNum: Clone + Ord + Zero + Add<Output = Self> + Sub<Output = Self> {}
impl<T: Clone + Ord + Zero + Add<Output = T> + Sub<Output = T>> FlowNum for T {}

struct Arc<T> {
    to: usize,
    residual: T,
}

/// Residual network built from an instance. Each instance edge owns arcs
/// `2e` (tail→head) and `2e+1` (head→tail).
pub struct FlowGraph<T: FlowNum> {
    n: usize,
    arcs: Vec<Arc<T>>,
    adj: Vec<Vec<usize>>,
    caps: Vec<T>,
    directed: bool,
}

impl<T: FlowNum> FlowGraph<T> {
    pub fn new(inst: &Instance, caps: Vec<T>) -> Self {
        Self::with_orientation(inst, caps, inst.directed)
    }

    pub fn with_orientation(inst: &Instance, caps: Vec<T>, directed: bool) -> Self {
        assert_eq!(caps.len(), inst.m());
        let mut adj = vec![Vec::new(); inst.n];
        let mut arcs = Vec::with_capacity(2 * inst.m());
        for (i, e) in inst.edges.iter().enumerate() {
            let back = if directed { T::zero() } else { caps[i].clone() };
            arcs.push(Arc {
                to: e.head,
                residual: caps[i].clone(),
            });
            arcs.push(Arc {
                to: e.tail,
                residual: back,
            });
            adj[e.tail].push(2 * i);
            adj[e.head].push(2 * i + 1);
        }
        FlowGraph {
            n: inst.n,
            arcs,
            adj,
            caps,
            directed,
        }
    }

    fn reset(&mut self) {
        for (i, c) in self.caps.iter().enumerate() {
            self.arcs[2 * i].residual = c.clone();
            self.arcs[2 * i + 1].residual = if self.directed {
                T::zero()
            } else {
                c.clone()
            };
        }
    }

    /// Maximum `s`→`t` flow value; the residual state is kept for
    /// [`FlowGraph::source_side`] and [`FlowGraph::edge_flows`].
    pub fn max_flow(&mut self, s: usize, t: usize) -> T {
        self.reset();
        let mut total = T::zero();
        if s == t {
            return total;
        }
        let mut pred = vec![usize::MAX; self.n];
        loop {
            pred.iter_mut().for_each(|p| *p = usize::MAX);
            let mut queue = VecDeque::from([s]);
            let mut seen = vec![false; self.n];
            seen[s] = true;
            while let Some(v) = queue.pop_front() {
                if v == t {
                    break;
                }
                for &a in &self.adj[v] {
                    let arc = &self.arcs[a];
                    if !seen[arc.to] && arc.residual > T::zero() {
                        seen[arc.to] = true;
                        pred[arc.to] = a;
                        queue.push_back(arc.to);
                    }
                }
            }
            if !seen[t] {
                break;
            }
            let mut bottleneck: Option<T> = None;
            let mut v = t;
            while v != s {
                let a = pred[v];
                let r = self.arcs[a].residual.clone();
                bottleneck = Some(match bottleneck {
                    Some(b) if b <= r => b,
                    _ => r,
                });
                v = self.arcs[a ^ 1].to;
            }
            let b = bottleneck.expect("augmenting path has at least one arc");
            let mut v = t;
            while v != s {
                let a = pred[v];
                self.arcs[a].residual = self.arcs[a].residual.clone() - b.clone();
                self.arcs[a ^ 1].residual = self.arcs[a ^ 1].residual.clone() + b.clone();
                v = self.arcs[a ^ 1].to;
            }
            total = total + b;
        }
        total
    }

    /// Vertices reachable from `s` in the residual network of the last flow.
    pub fn source_side(&self, s: usize) -> VertexSet {
        let mut seen = VertexSet::empty(self.n);
        seen.insert(s);
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &a in &self.adj[v] {
                let arc = &self.arcs[a];
                if !seen.contains(arc.to) && arc.residual > T::zero() {
                    seen.insert(arc.to);
                    stack.push(arc.to);
                }
            }
        }
        seen
    }

    /// Net flow of the last computation on each edge, as (amount, forward?)
    /// where forward means tail→head.
    pub fn edge_flows(&self) -> Vec<(T, bool)> {
        (0..self.caps.len())
            .map(|i| {
                let fwd = &self.arcs[2 * i].residual;
                let cap = &self.caps[i];
                if fwd <= cap {
                    (cap.clone() - fwd.clone(), true)
                } else {
                    (fwd.clone() - cap.clone(), false)
                }
            })
            .collect()
    }
}

/// One path of a flow decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlowPath {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    #[serde(with = "rational::serde_str")]
    pub amount: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxFlow {
    pub value: Rational,
    pub paths: Vec<FlowPath>,
    /// Sink side of a minimum cut (vertices not reachable from the source).
    pub sink_side: VertexSet,
}

/// Maximum flow from `source` to `sink` under weighting `w` with a path
/// decomposition. An unreachable sink yields value 0 and no paths.
pub fn max_flow(inst: &Instance, w: &EdgeWeighting, source: usize, sink: usize) -> Result<MaxFlow> {
    w.check_len(inst)?;
    if source >= inst.n || sink >= inst.n {
        return Err(Error::invalid("max_flow", "terminal out of range"));
    }
    if source == sink {
        return Err(Error::invalid("max_flow", "source equals sink"));
    }
    let mut g = FlowGraph::new(inst, w.values.clone());
    let value = g.max_flow(source, sink);
    let sink_side = g.source_side(source).complement(inst.n);
    let paths = decompose(inst, &g.edge_flows(), source, sink);
    Ok(MaxFlow {
        value,
        paths,
        sink_side,
    })
}

fn decompose(
    inst: &Instance,
    flows: &[(Rational, bool)],
    source: usize,
    sink: usize,
) -> Vec<FlowPath> {
    // Remaining flow per edge in its direction of travel.
    let mut remaining: Vec<Rational> = flows.iter().map(|(f, _)| f.clone()).collect();
    let mut out_arcs: Vec<Vec<(usize, usize)>> = vec![Vec::new(); inst.n];
    for (i, (f, fwd)) in flows.iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        let e = &inst.edges[i];
        let (a, b) = if *fwd { (e.tail, e.head) } else { (e.head, e.tail) };
        out_arcs[a].push((i, b));
    }
    let mut paths = Vec::new();
    loop {
        // Depth-first search over arcs with flow left.
        let mut via: Vec<Option<(usize, usize)>> = vec![None; inst.n];
        let mut seen = vec![false; inst.n];
        seen[source] = true;
        let mut stack = vec![source];
        while let Some(v) = stack.pop() {
            if v == sink {
                break;
            }
            for &(e, to) in &out_arcs[v] {
                if !seen[to] && !remaining[e].is_zero() {
                    seen[to] = true;
                    via[to] = Some((e, v));
                    stack.push(to);
                }
            }
        }
        if !seen[sink] {
            break;
        }
        let mut edges = Vec::new();
        let mut vertices = vec![sink];
        let mut v = sink;
        while let Some((e, from)) = via[v] {
            edges.push(e);
            vertices.push(from);
            v = from;
        }
        edges.reverse();
        vertices.reverse();
        let amount = edges
            .iter()
            .map(|&e| remaining[e].clone())
            .min()
            .expect("nonempty path");
        for &e in &edges {
            remaining[e] = remaining[e].clone() - amount.clone();
        }
        paths.push(FlowPath {
            vertices,
            edges,
            amount,
        });
    }
    paths
}

/// Minimum-capacity cut of an undirected instance under `w`, computed with
/// `n-1` flows from vertex 0. Ties resolve to the lowest sink index.
pub fn global_min_cut(inst: &Instance, w: &EdgeWeighting) -> Result<Cut> {
    w.check_len(inst)?;
    if inst.n < 2 {
        return Err(Error::invalid("n", "global min cut needs at least two vertices"));
    }
    if inst.directed {
        return Err(Error::Unsupported("global min cut of a directed instance".into()));
    }
    let mut g = FlowGraph::new(inst, w.values.clone());
    let mut best: Option<(Rational, VertexSet)> = None;
    for v in 1..inst.n {
        let value = g.max_flow(0, v);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            let side = g.source_side(0).complement(inst.n);
            best = Some((value, side));
        }
    }
    let (_, side) = best.expect("n >= 2");
    Cut::new(inst, side, w)
}

/// Integral max-flow value on the capacities of `subset` only.
pub fn subset_flow_value(inst: &Instance, subset_mask: &[bool], s: usize, t: usize) -> i64 {
    let caps = inst
        .edges
        .iter()
        .zip(subset_mask)
        .map(|(e, &on)| if on { e.capacity as i64 } else { 0 })
        .collect();
    FlowGraph::new(inst, caps).max_flow(s, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Requirements};
    use crate::rational::{int, ratio};

    fn inst(n: usize, edges: &[(usize, usize, u64)]) -> Instance {
        Instance::new(
            n,
            false,
            edges
                .iter()
                .map(|&(a, b, c)| Edge::new(a, b, c, int(1)))
                .collect(),
            Requirements::Uniform(1),
        )
        .unwrap()
    }

    #[test]
    fn parallel_edges_add_up() {
        let g = inst(2, &[(0, 1, 2), (0, 1, 3)]);
        let f = max_flow(&g, &EdgeWeighting::capacities(&g), 0, 1).unwrap();
        assert_eq!(f.value, int(5));
        let total = f.paths.iter().fold(Rational::zero(), |a, p| a + &p.amount);
        assert_eq!(total, int(5));
    }

    #[test]
    fn unreachable_sink_is_zero() {
        let g = inst(3, &[(0, 1, 4)]);
        let f = max_flow(&g, &EdgeWeighting::capacities(&g), 0, 2).unwrap();
        assert!(f.value.is_zero());
        assert!(f.paths.is_empty());
    }

    #[test]
    fn triangle_min_cut_is_two() {
        let g = inst(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]);
        let cut = global_min_cut(&g, &EdgeWeighting::unit(&g)).unwrap();
        assert_eq!(cut.capacity, int(2));
    }

    #[test]
    fn single_edge_min_cut() {
        let g = inst(2, &[(0, 1, 7)]);
        let cut = global_min_cut(&g, &EdgeWeighting::capacities(&g)).unwrap();
        assert_eq!(cut.capacity, int(7));
        assert_eq!(cut.side.to_vec(), vec![1]);
    }

    #[test]
    fn disconnected_min_cut_is_zero() {
        let g = inst(4, &[(0, 1, 3), (2, 3, 3)]);
        let cut = global_min_cut(&g, &EdgeWeighting::capacities(&g)).unwrap();
        assert!(cut.capacity.is_zero());
    }

    #[test]
    fn fractional_weights_and_direction() {
        let g = Instance::new(
            3,
            true,
            vec![Edge::new(0, 1, 1, int(0)), Edge::new(1, 2, 1, int(0)), Edge::new(2, 0, 5, int(0))],
            Requirements::Pairs(vec![]),
        )
        .unwrap();
        let w = EdgeWeighting::new("w", vec![ratio(1, 3), ratio(1, 2), int(5)]).unwrap();
        let f = max_flow(&g, &w, 0, 2).unwrap();
        assert_eq!(f.value, ratio(1, 3));
        assert_eq!(f.paths.len(), 1);
        assert_eq!(f.paths[0].edges, vec![0, 1]);
        // The 2→0 arc is useless in the other direction.
        let back = max_flow(&g, &w, 2, 1).unwrap();
        assert_eq!(back.value, ratio(1, 3));
    }
}
