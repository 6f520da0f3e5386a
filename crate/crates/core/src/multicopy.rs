//! Forest algorithm for network design with multiple edge copies.
//!
//! Pairs are processed by nonincreasing requirement. Iteration `i` prices
//! edges outside the forest at `c_i(e) = c(e) (1 + R_i / u(e))` (enough to
//! buy `R_i` capacity) and edges inside at zero, joins `s_i` to `t_i` along
//! a shortest path, then also joins `s_i` and `t_i` to every component `X`
//! within distance `2^{min(class(i), class(X))}`. Each edge added in the
//! iteration gets `ceil(R_i / u(e))` copies.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::flow::FlowGraph;
use crate::graph::{Demand, EdgeWeighting, Instance, Requirements};
use crate::rational::{self, Rational};

/// `c_i(e)`: zero on `forest`, `c(e) + (R_i / u(e)) c(e)` elsewhere.
pub fn iteration_costs(inst: &Instance, forest: &[usize], r: u64) -> EdgeWeighting {
    let mut in_forest = vec![false; inst.m()];
    for &e in forest {
        in_forest[e] = true;
    }
    let values = inst
        .edges
        .iter()
        .zip(&in_forest)
        .map(|(e, &f)| {
            if f {
                Rational::zero()
            } else {
                &e.cost + rational::ratio(r as i64, e.capacity as i64) * &e.cost
            }
        })
        .collect();
    EdgeWeighting {
        label: format!("c_{r}"),
        values,
    }
}

struct ShortestPaths {
    dist: Vec<Option<Rational>>,
    /// `(edge, previous vertex)` on a shortest path from the source.
    pred: Vec<Option<(usize, usize)>>,
}

impl ShortestPaths {
    /// Dijkstra; ties go to the smallest `(previous vertex, edge)` among
    /// vertices not yet settled, so paths are reproducible.
    fn new(inst: &Instance, w: &[Rational], source: usize) -> Self {
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); inst.n];
        for (i, e) in inst.edges.iter().enumerate() {
            adj[e.tail].push((e.head, i));
            adj[e.head].push((e.tail, i));
        }
        let mut dist: Vec<Option<Rational>> = vec![None; inst.n];
        let mut pred = vec![None; inst.n];
        let mut done = vec![false; inst.n];
        let mut heap = BinaryHeap::new();
        dist[source] = Some(Rational::zero());
        heap.push(Reverse((Rational::zero(), source)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            for &(u, e) in &adj[v] {
                if done[u] {
                    continue;
                }
                let nd = &d + &w[e];
                let better = match &dist[u] {
                    None => true,
                    Some(old) => nd < *old || (nd == *old && pred[u].is_none_or(|(pe, pv)| (v, e) < (pv, pe))),
                };
                if better {
                    dist[u] = Some(nd.clone());
                    pred[u] = Some((e, v));
                    heap.push(Reverse((nd, u)));
                }
            }
        }
        ShortestPaths { dist, pred }
    }

    /// Edges from the source to `target`, in path order.
    fn path(&self, target: usize) -> Vec<usize> {
        let mut edges = Vec::new();
        let mut v = target;
        while let Some((e, p)) = self.pred[v] {
            edges.push(e);
            v = p;
        }
        edges.reverse();
        edges
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Connection {
    /// `s_i` or `t_i`.
    pub from: usize,
    /// Id (smallest vertex) of the component joined.
    pub component: usize,
    #[serde(with = "rational::serde_str")]
    pub distance: Rational,
    /// `floor(log2 distance)`; absent for a free connection.
    pub h: Option<i64>,
    /// Pair charged for the connection, if any.
    pub charged_to: Option<usize>,
    pub as_h_leader: bool,
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IterationTrace {
    /// Index of the pair in the instance's pair list.
    pub pair: usize,
    pub s: usize,
    pub t: usize,
    pub r: u64,
    #[serde(with = "rational::serde_str")]
    pub ell: Rational,
    pub class: Option<i64>,
    pub path: Vec<usize>,
    pub connections: Vec<Connection>,
    /// `(edge, copies)` bought this iteration.
    pub bought: Vec<(usize, u64)>,
    /// Edges skipped because they would have closed a cycle in the forest.
    pub dropped: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiCopySolution {
    pub copies: Vec<u64>,
    #[serde(with = "rational::serde_str")]
    pub cost: Rational,
    pub forest: Vec<usize>,
    #[serde(with = "rational::serde_str")]
    pub sum_ell: Rational,
    pub trace: Vec<IterationTrace>,
}

/// Copy counts and their cost, without a forest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Purchase {
    pub copies: Vec<u64>,
    #[serde(with = "rational::serde_str")]
    pub cost: Rational,
}

pub fn purchase_cost(inst: &Instance, copies: &[u64]) -> Rational {
    inst.edges
        .iter()
        .zip(copies)
        .fold(Rational::zero(), |acc, (e, &k)| acc + &e.cost * rational::uint(k))
}

fn pairs_of(inst: &Instance) -> Result<&[Demand]> {
    if inst.directed {
        return Err(Error::Unsupported("multiple-copies design on a directed instance".into()));
    }
    match &inst.requirements {
        Requirements::Pairs(p) => Ok(p),
        other => Err(Error::invalid(
            "requirements",
            format!("expected pair requirements, got {}", other.kind()),
        )),
    }
}

/// True when every pair's max flow under capacities `copies(e) · u(e)`
/// reaches its requirement.
pub fn check_multicopy_feasible(inst: &Instance, copies: &[u64]) -> Result<bool> {
    let pairs = pairs_of(inst)?;
    if copies.len() != inst.m() {
        return Err(Error::invalid("copies", "length differs from the edge count"));
    }
    let caps: Vec<i64> = inst
        .edges
        .iter()
        .zip(copies)
        .map(|(e, &k)| (e.capacity * k) as i64)
        .collect();
    for d in pairs {
        let mut g = FlowGraph::new(inst, caps.clone());
        if g.max_flow(d.s, d.t) < d.r as i64 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Default)]
struct Component {
    /// Pairs whose iteration has finished.
    pairs: Vec<usize>,
    /// Max class of its pairs; `None` when no pair has a class.
    class: Option<i64>,
    leader: Option<usize>,
    h_leaders: BTreeMap<i64, usize>,
}

struct Forest {
    dsu: DisjointSets,
    data: Vec<Component>,
    min_vertex: Vec<usize>,
    edges: Vec<usize>,
    in_forest: Vec<bool>,
}

impl Forest {
    fn new(n: usize, m: usize) -> Self {
        Forest {
            dsu: DisjointSets::new(n),
            data: vec![Component::default(); n],
            min_vertex: (0..n).collect(),
            edges: Vec::new(),
            in_forest: vec![false; m],
        }
    }

    fn root(&mut self, v: usize) -> usize {
        self.dsu.find(v)
    }

    fn id(&mut self, v: usize) -> usize {
        let r = self.root(v);
        self.min_vertex[r]
    }

    /// Adds `e` unless it is already present or would close a cycle;
    /// returns whether the edge was added and whether it was dropped.
    fn add(&mut self, inst: &Instance, e: usize, classes: &[Option<i64>]) -> (bool, bool) {
        if self.in_forest[e] {
            return (false, false);
        }
        let (a, b) = (inst.edges[e].tail, inst.edges[e].head);
        let (ra, rb) = (self.root(a), self.root(b));
        if ra == rb {
            log::debug!("dropping edge {e}: it would close a cycle");
            return (false, true);
        }
        let left = std::mem::take(&mut self.data[ra]);
        let right = std::mem::take(&mut self.data[rb]);
        self.dsu.union(ra, rb);
        let root = self.root(a);
        self.min_vertex[root] = self.min_vertex[ra].min(self.min_vertex[rb]);
        self.data[root] = merge(left, right, classes);
        self.in_forest[e] = true;
        self.edges.push(e);
        (true, false)
    }
}

fn merge(mut a: Component, b: Component, classes: &[Option<i64>]) -> Component {
    a.pairs.extend(b.pairs);
    a.pairs.sort_unstable();
    for (h, p) in b.h_leaders {
        a.h_leaders.entry(h).or_insert(p);
    }
    refresh_leader(&mut a, classes);
    a
}

/// Leader: the smallest-index pair attaining the component's class.
fn refresh_leader(c: &mut Component, classes: &[Option<i64>]) {
    c.class = c.pairs.iter().filter_map(|&p| classes[p]).max();
    c.leader = c.class.and_then(|k| c.pairs.iter().copied().find(|&p| classes[p] == Some(k)));
}

pub fn run(inst: &Instance) -> Result<MultiCopySolution> {
    let pairs = pairs_of(inst)?;
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by_key(|&i| Reverse(pairs[i].r));
    let mut forest = Forest::new(inst.n, inst.m());
    let mut classes: Vec<Option<i64>> = vec![None; pairs.len()];
    let mut copies = vec![0u64; inst.m()];
    let mut sum_ell = Rational::zero();
    let mut trace = Vec::new();
    for &i in &order {
        let Demand { s, t, r } = pairs[i];
        let weights = iteration_costs(inst, &forest.edges, r).values;
        let from_s = ShortestPaths::new(inst, &weights, s);
        let Some(ell) = from_s.dist[t].clone() else {
            return Err(Error::Infeasible {
                detail: format!("pair #{i} ({s}, {t}) is disconnected"),
                witness: None,
            });
        };
        sum_ell += &ell;
        let mut it = IterationTrace {
            pair: i,
            s,
            t,
            r,
            ell: ell.clone(),
            class: None,
            path: Vec::new(),
            connections: Vec::new(),
            bought: Vec::new(),
            dropped: Vec::new(),
        };
        let mut added = Vec::new();
        if forest.root(s) != forest.root(t) {
            for e in from_s.path(t) {
                let (new, dropped) = forest.add(inst, e, &classes);
                if new {
                    it.path.push(e);
                    added.push(e);
                }
                if dropped {
                    it.dropped.push(e);
                }
            }
        }
        if ell.is_positive() {
            let class = rational::floor_log2(&ell);
            it.class = Some(class);
            let from_t = ShortestPaths::new(inst, &weights, t);
            for (endpoint, sp) in [(s, &from_s), (t, &from_t)] {
                connect_nearby(inst, &mut forest, &classes, i, class, endpoint, sp, &mut it, &mut added);
            }
            classes[i] = Some(class);
        }
        let root = forest.root(s);
        forest.data[root].pairs.push(i);
        forest.data[root].pairs.sort_unstable();
        refresh_leader(&mut forest.data[root], &classes);
        for &e in &added {
            let k = rational::ceil_div(r, inst.edges[e].capacity);
            copies[e] = k;
            it.bought.push((e, k));
        }
        trace.push(it);
    }
    let cost = purchase_cost(inst, &copies);
    let bound = rational::int(9) * &sum_ell;
    if cost > bound {
        return Err(Error::BoundViolated(format!(
            "cost {} exceeds 9 · Σℓ = {}",
            rational::format(&cost),
            rational::format(&bound)
        )));
    }
    let mut forest_edges = forest.edges.clone();
    forest_edges.sort_unstable();
    Ok(MultiCopySolution {
        copies,
        cost,
        forest: forest_edges,
        sum_ell,
        trace,
    })
}

/// One connection loop: joins `endpoint` to each component (existing at
/// loop entry, in id order) that is close relative to the classes.
#[allow(clippy::too_many_arguments)]
fn connect_nearby(
    inst: &Instance,
    forest: &mut Forest,
    classes: &[Option<i64>],
    pair: usize,
    class: i64,
    endpoint: usize,
    sp: &ShortestPaths,
    it: &mut IterationTrace,
    added: &mut Vec<usize>,
) {
    let mut components: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 0..inst.n {
        let id = forest.id(v);
        components.entry(id).or_insert(v);
    }
    for (id, rep) in components {
        if forest.root(rep) == forest.root(endpoint) {
            continue;
        }
        let root = forest.root(rep);
        let Some(class_x) = forest.data[root].class else {
            continue;
        };
        let nearest = (0..inst.n)
            .filter(|&v| forest.root(v) == root)
            .filter_map(|v| sp.dist[v].clone().map(|d| (d, v)))
            .min();
        let Some((d, target)) = nearest else {
            continue;
        };
        if d > rational::pow2(class.min(class_x)) {
            continue;
        }
        let h = d.is_positive().then(|| rational::floor_log2(&d));
        let (charged_to, as_h_leader) = match h {
            None => (None, false),
            Some(h) => match forest.data[root].h_leaders.get(&h) {
                Some(&p) => (Some(p), true),
                None => (forest.data[root].leader, false),
            },
        };
        let mut edges = Vec::new();
        for e in sp.path(target) {
            let (new, dropped) = forest.add(inst, e, classes);
            if new {
                edges.push(e);
                added.push(e);
            }
            if dropped {
                it.dropped.push(e);
            }
        }
        if let Some(h) = h {
            let merged = forest.root(endpoint);
            forest.data[merged].h_leaders.insert(h, pair);
        }
        it.connections.push(Connection {
            from: endpoint,
            component: id,
            distance: d,
            h,
            charged_to,
            as_h_leader,
            edges,
        });
    }
}

/// Buys each pair its own cheapest single path, priced at
/// `ceil(R_i / u(e)) c(e)` per edge; copies add up across pairs.
pub fn baseline_independent_pairs(inst: &Instance) -> Result<Purchase> {
    let pairs = pairs_of(inst)?;
    let mut copies = vec![0u64; inst.m()];
    for (i, d) in pairs.iter().enumerate() {
        let w: Vec<Rational> = inst
            .edges
            .iter()
            .map(|e| rational::uint(rational::ceil_div(d.r, e.capacity)) * &e.cost)
            .collect();
        let sp = ShortestPaths::new(inst, &w, d.s);
        if sp.dist[d.t].is_none() {
            return Err(Error::Infeasible {
                detail: format!("pair #{i} ({}, {}) is disconnected", d.s, d.t),
                witness: None,
            });
        }
        for e in sp.path(d.t) {
            copies[e] += rational::ceil_div(d.r, inst.edges[e].capacity);
        }
    }
    let cost = purchase_cost(inst, &copies);
    Ok(Purchase { copies, cost })
}

/// `64 (ceil(log2 k) + 1)`.
pub fn sum_ell_factor(k: usize) -> u64 {
    let ceil_log = if k <= 1 { 0 } else { (usize::BITS - (k - 1).leading_zeros()) as u64 };
    64 * (ceil_log + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::rational::int;

    fn inst(n: usize, edges: Vec<Edge>, pairs: Vec<(usize, usize, u64)>) -> Instance {
        Instance::new(
            n,
            false,
            edges,
            Requirements::Pairs(pairs.into_iter().map(|(s, t, r)| Demand { s, t, r }).collect()),
        )
        .unwrap()
    }

    #[test]
    fn iteration_cost_values() {
        let g = inst(2, vec![Edge::new(0, 1, 2, int(3))], vec![(0, 1, 4)]);
        assert_eq!(iteration_costs(&g, &[], 4).values, vec![int(9)]);
        assert_eq!(iteration_costs(&g, &[0], 4).values, vec![int(0)]);
        let purchase = rational::uint(rational::ceil_div(4, 2)) * int(3);
        assert_eq!(purchase, int(6));
        assert!(purchase < int(9));
    }

    #[test]
    fn single_edge_copies() {
        let g = inst(2, vec![Edge::new(0, 1, 1, int(1))], vec![(0, 1, 5)]);
        let sol = run(&g).unwrap();
        assert_eq!(sol.copies, vec![5]);
        assert_eq!(sol.cost, int(5));
        assert_eq!(sol.trace[0].ell, int(6));
        assert_eq!(sol.trace[0].class, Some(2));
        assert!(check_multicopy_feasible(&g, &sol.copies).unwrap());
    }

    #[test]
    fn repeated_pair_is_free() {
        let g = inst(
            3,
            vec![Edge::new(0, 1, 2, int(1)), Edge::new(1, 2, 2, int(1))],
            vec![(0, 2, 3), (0, 2, 3)],
        );
        let sol = run(&g).unwrap();
        assert_eq!(sol.trace[1].ell, int(0));
        assert!(sol.trace[1].bought.is_empty());
        assert_eq!(sol.trace[1].class, None);
    }

    #[test]
    fn larger_requirements_go_first() {
        let g = inst(
            3,
            vec![Edge::new(0, 1, 1, int(1)), Edge::new(1, 2, 1, int(1))],
            vec![(0, 1, 1), (1, 2, 4)],
        );
        let sol = run(&g).unwrap();
        assert_eq!(sol.trace[0].pair, 1);
        assert!(check_multicopy_feasible(&g, &sol.copies).unwrap());
    }

    #[test]
    fn nearby_component_gets_connected() {
        // Pair (0,1) is expensive; pair (2,3) is cheap and sits next to 0.
        let g = inst(
            4,
            vec![
                Edge::new(0, 1, 1, int(8)),
                Edge::new(2, 3, 1, int(8)),
                Edge::new(0, 2, 1, int(1)),
            ],
            vec![(0, 1, 1), (2, 3, 1)],
        );
        let sol = run(&g).unwrap();
        // ℓ = 16 for both; the 0–2 link costs 2 ≤ 2^4.
        assert_eq!(sol.trace[1].connections.len(), 1);
        let c = &sol.trace[1].connections[0];
        assert_eq!(c.charged_to, Some(0));
        assert_eq!(c.h, Some(1));
        assert!(sol.cost <= int(9) * &sol.sum_ell);
    }

    #[test]
    fn disconnected_pair_named() {
        let g = inst(3, vec![Edge::new(0, 1, 1, int(1))], vec![(0, 2, 1)]);
        let err = run(&g).unwrap_err();
        assert!(err.to_string().contains("pair #0"));
    }

    #[test]
    fn baseline_sums_independent_paths() {
        let g = inst(2, vec![Edge::new(0, 1, 2, int(3))], vec![(0, 1, 5), (0, 1, 5)]);
        let b = baseline_independent_pairs(&g).unwrap();
        assert_eq!(b.cost, int(18));
    }

    #[test]
    fn factor_values() {
        assert_eq!(sum_ell_factor(1), 64);
        assert_eq!(sum_ell_factor(2), 128);
        assert_eq!(sum_ell_factor(3), 192);
        assert_eq!(sum_ell_factor(4), 192);
    }
}
