//! Exact branch-and-bound optima for small instances.
//!
//! Both oracles keep, for every cut with positive requirement, the capacity
//! already chosen and the capacity still reachable. Edges are decided in
//! order of decreasing cost; a node is pruned when some cut can no longer
//! be covered or when its cost plus a fractional-knapsack cover of a
//! deficient cut reaches the incumbent. Instances whose requirements are
//! not captured by bipartitions (multiway levels, more than 16 vertices)
//! fall back on [`check_feasible`] at candidate leaves.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::cutenum::EXHAUSTIVE_LIMIT;
use crate::error::{Error, Result};
use crate::feasibility::check_feasible;
use crate::graph::{Instance, Requirements};
use crate::kc::infeasible_error;
use crate::multicopy::{baseline_independent_pairs, purchase_cost};
use crate::rational::{self, Rational};

/// Default edge limit of [`exact_optimum`].
pub const EXACT_EDGE_LIMIT: usize = 24;
/// Default edge limit of [`exact_optimum_multicopy`].
pub const MULTICOPY_EDGE_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactSolution {
    #[serde(with = "rational::serde_str")]
    pub cost: Rational,
    pub subset: Vec<usize>,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactMultiCopy {
    #[serde(with = "rational::serde_str")]
    pub cost: Rational,
    pub copies: Vec<u64>,
    pub nodes: u64,
}

#[derive(Clone, Debug)]
struct Row {
    edges: Vec<usize>,
    req: u64,
}

/// Cut rows with positive requirement, and whether they capture the whole
/// requirement specification.
fn cut_rows(inst: &Instance) -> (Vec<Row>, bool) {
    if inst.n > EXHAUSTIVE_LIMIT || inst.n < 2 {
        return (Vec::new(), inst.n < 2);
    }
    let ends: Vec<(u64, u64)> = inst
        .edges
        .iter()
        .map(|e| (1u64 << e.tail, 1u64 << e.head))
        .collect();
    let mut rows = Vec::new();
    let mut push = |mask: u64, req: u64, directed: bool| {
        if req == 0 {
            return;
        }
        let edges = ends
            .iter()
            .enumerate()
            .filter(|(_, (a, b))| {
                let (ta, hb) = (mask & a != 0, mask & b != 0);
                if directed {
                    ta && !hb
                } else {
                    ta != hb
                }
            })
            .map(|(i, _)| i)
            .collect();
        rows.push(Row { edges, req });
    };
    let canonical = (1u64..(1 << (inst.n - 1))).map(|m| m << 1);
    match &inst.requirements {
        Requirements::Uniform(r) => {
            canonical.for_each(|m| push(m, *r, false));
            (rows, true)
        }
        Requirements::KWay(rs) => {
            canonical.for_each(|m| push(m, rs[0], false));
            (rows, rs.len() == 1)
        }
        Requirements::Pairs(pairs) if inst.directed => {
            for m in 1u64..(1 << inst.n) - 1 {
                let req = pairs
                    .iter()
                    .filter(|d| m >> d.s & 1 == 1 && m >> d.t & 1 == 0)
                    .map(|d| d.r)
                    .max()
                    .unwrap_or(0);
                push(m, req, true);
            }
            (rows, true)
        }
        Requirements::Pairs(pairs) => {
            for m in canonical {
                let req = pairs
                    .iter()
                    .filter(|d| (m >> d.s & 1) != (m >> d.t & 1))
                    .map(|d| d.r)
                    .max()
                    .unwrap_or(0);
                push(m, req, false);
            }
            (rows, true)
        }
    }
}

/// Costs as integers over a common denominator.
fn integer_costs(inst: &Instance) -> Result<(Vec<i128>, BigInt)> {
    let denom = inst.edges.iter().fold(BigInt::one(), |acc, e| acc.lcm(e.cost.denom()));
    let mut out = Vec::with_capacity(inst.m());
    for e in &inst.edges {
        let v = (e.cost.numer() * (&denom / e.cost.denom()))
            .to_i128()
            .filter(|v| *v < i128::MAX / 1024)
            .ok_or_else(|| Error::Capability("edge costs too large for the exact oracle".into()))?;
        out.push(v);
    }
    Ok((out, denom))
}

fn has_requirement(inst: &Instance) -> bool {
    !matches!(&inst.requirements, Requirements::Pairs(p) if p.is_empty())
}

struct SubsetSearch<'a> {
    inst: &'a Instance,
    order: Vec<usize>,
    by_ratio: Vec<usize>,
    cost: Vec<i128>,
    rows: Vec<Row>,
    rows_of: Vec<Vec<usize>>,
    complete: bool,
    have: Vec<u64>,
    avail: Vec<u64>,
    unmet: usize,
    /// 0 undecided, 1 in, 2 out.
    state: Vec<u8>,
    best_cost: i128,
    best: Vec<usize>,
    nodes: u64,
}

impl SubsetSearch<'_> {
    fn included(&self) -> Vec<usize> {
        (0..self.state.len()).filter(|&e| self.state[e] == 1).collect()
    }

    fn reachable(&self) -> Vec<usize> {
        (0..self.state.len()).filter(|&e| self.state[e] != 2).collect()
    }

    fn knapsack(&self, r: usize) -> i128 {
        let row = &self.rows[r];
        let mut deficit = row.req.saturating_sub(self.have[r]);
        let mut lb = 0i128;
        for &e in &self.by_ratio {
            if deficit == 0 {
                break;
            }
            if self.state[e] != 0 || row.edges.binary_search(&e).is_err() {
                continue;
            }
            let u = self.inst.edges[e].capacity;
            if u >= deficit {
                lb += self.cost[e] * deficit as i128 / u as i128;
                deficit = 0;
            } else {
                lb += self.cost[e];
                deficit -= u;
            }
        }
        lb
    }

    fn dfs(&mut self, depth: usize, cost: i128) -> Result<()> {
        self.nodes += 1;
        if cost >= self.best_cost {
            return Ok(());
        }
        if self.unmet == 0 {
            let chosen = self.included();
            if self.complete || check_feasible(self.inst, &chosen)?.feasible {
                self.best_cost = cost;
                self.best = chosen;
                return Ok(());
            }
        }
        if depth == self.order.len() {
            return Ok(());
        }
        let lb = (0..self.rows.len())
            .filter(|&r| self.have[r] < self.rows[r].req)
            .map(|r| self.knapsack(r))
            .max()
            .unwrap_or(0);
        if cost + lb >= self.best_cost {
            return Ok(());
        }
        let e = self.order[depth];
        let u = self.inst.edges[e].capacity;
        if self.cost[e] > 0 {
            self.state[e] = 2;
            let mut ok = true;
            for &r in &self.rows_of[e] {
                self.avail[r] -= u;
                ok &= self.avail[r] >= self.rows[r].req;
            }
            if ok && !self.complete {
                ok = check_feasible(self.inst, &self.reachable())?.feasible;
            }
            if ok {
                self.dfs(depth + 1, cost)?;
            }
            for &r in &self.rows_of[e] {
                self.avail[r] += u;
            }
        }
        self.state[e] = 1;
        for &r in &self.rows_of[e] {
            let before = self.have[r] >= self.rows[r].req;
            self.have[r] += u;
            if !before && self.have[r] >= self.rows[r].req {
                self.unmet -= 1;
            }
        }
        self.dfs(depth + 1, cost + self.cost[e])?;
        for &r in &self.rows_of[e] {
            let after = self.have[r] >= self.rows[r].req;
            self.have[r] -= u;
            if after && self.have[r] < self.rows[r].req {
                self.unmet += 1;
            }
        }
        self.state[e] = 0;
        Ok(())
    }
}

/// Minimum-cost feasible edge subset. Limited to [`EXACT_EDGE_LIMIT`] edges
/// unless `force` is set.
pub fn exact_optimum(inst: &Instance, force: bool) -> Result<ExactSolution> {
    if inst.m() > EXACT_EDGE_LIMIT && !force {
        return Err(Error::Capability(format!(
            "exact optimum is limited to {EXACT_EDGE_LIMIT} edges (m = {}); use force to override",
            inst.m()
        )));
    }
    if !has_requirement(inst) {
        return Ok(ExactSolution {
            cost: Rational::zero(),
            subset: Vec::new(),
            nodes: 0,
        });
    }
    let full: Vec<usize> = (0..inst.m()).collect();
    let report = check_feasible(inst, &full)?;
    if !report.feasible {
        return Err(infeasible_error(inst, &report));
    }
    let (cost, denom) = integer_costs(inst)?;
    let (rows, complete) = cut_rows(inst);
    let mut rows_of = vec![Vec::new(); inst.m()];
    for (r, row) in rows.iter().enumerate() {
        for &e in &row.edges {
            rows_of[e].push(r);
        }
    }
    let avail: Vec<u64> = rows
        .iter()
        .map(|row| row.edges.iter().map(|&e| inst.edges[e].capacity).sum())
        .collect();
    let mut order = full.clone();
    order.sort_by(|&a, &b| cost[b].cmp(&cost[a]).then(a.cmp(&b)));
    let mut by_ratio = full.clone();
    by_ratio.sort_by(|&a, &b| {
        let (ua, ub) = (inst.edges[a].capacity as i128, inst.edges[b].capacity as i128);
        (cost[a] * ub).cmp(&(cost[b] * ua)).then(a.cmp(&b))
    });
    let mut search = SubsetSearch {
        inst,
        order,
        by_ratio,
        rows_of,
        complete,
        have: vec![0; rows.len()],
        avail,
        unmet: rows.len(),
        rows,
        state: vec![0; inst.m()],
        best_cost: cost.iter().sum::<i128>() + 1,
        best: full,
        cost,
        nodes: 0,
    };
    search.dfs(0, 0)?;
    let mut subset = search.best;
    subset.sort_unstable();
    Ok(ExactSolution {
        cost: Rational::new(BigInt::from(search.best_cost), denom),
        subset,
        nodes: search.nodes,
    })
}

struct CopySearch<'a> {
    inst: &'a Instance,
    order: Vec<usize>,
    by_ratio: Vec<usize>,
    cost: Vec<i128>,
    bound: Vec<u64>,
    rows: Vec<Row>,
    rows_of: Vec<Vec<usize>>,
    have: Vec<u64>,
    avail: Vec<u64>,
    unmet: usize,
    decided: Vec<bool>,
    copies: Vec<u64>,
    best_cost: i128,
    best: Vec<u64>,
    nodes: u64,
}

impl CopySearch<'_> {
    fn knapsack(&self, r: usize) -> i128 {
        let row = &self.rows[r];
        let mut deficit = row.req.saturating_sub(self.have[r]);
        let mut lb = 0i128;
        for &e in &self.by_ratio {
            if deficit == 0 {
                break;
            }
            if self.decided[e] || row.edges.binary_search(&e).is_err() {
                continue;
            }
            let u = self.inst.edges[e].capacity;
            let size = u * self.bound[e];
            let take = size.min(deficit);
            lb += self.cost[e] * take as i128 / u as i128;
            deficit -= take;
        }
        lb
    }

    fn set(&mut self, e: usize, k: u64, sign: bool) {
        let cap = self.inst.edges[e].capacity * k;
        for &r in &self.rows_of[e] {
            let req = self.rows[r].req;
            if sign {
                let before = self.have[r] >= req;
                self.have[r] += cap;
                if !before && self.have[r] >= req {
                    self.unmet -= 1;
                }
            } else {
                let after = self.have[r] >= req;
                self.have[r] -= cap;
                if after && self.have[r] < req {
                    self.unmet += 1;
                }
            }
        }
    }

    fn dfs(&mut self, depth: usize, cost: i128) {
        self.nodes += 1;
        if cost >= self.best_cost {
            return;
        }
        if self.unmet == 0 {
            self.best_cost = cost;
            self.best = self.copies.clone();
            return;
        }
        if depth == self.order.len() {
            return;
        }
        let lb = (0..self.rows.len())
            .filter(|&r| self.have[r] < self.rows[r].req)
            .map(|r| self.knapsack(r))
            .max()
            .unwrap_or(0);
        if cost + lb >= self.best_cost {
            return;
        }
        let e = self.order[depth];
        let u = self.inst.edges[e].capacity;
        let full = u * self.bound[e];
        self.decided[e] = true;
        for &r in &self.rows_of[e] {
            self.avail[r] -= full;
        }
        let lo = if self.cost[e] == 0 { self.bound[e] } else { 0 };
        for k in lo..=self.bound[e] {
            let cap = u * k;
            if self.rows_of[e]
                .iter()
                .any(|&r| self.have[r] + self.avail[r] + cap < self.rows[r].req)
            {
                continue;
            }
            self.copies[e] = k;
            self.set(e, k, true);
            self.dfs(depth + 1, cost + self.cost[e] * k as i128);
            self.set(e, k, false);
        }
        self.copies[e] = 0;
        for &r in &self.rows_of[e] {
            self.avail[r] += full;
        }
        self.decided[e] = false;
    }
}

/// Minimum-cost copy vector meeting every pair requirement. Copies per edge
/// are bounded by `ceil(max R / u(e))`, beyond which no cut gains anything.
pub fn exact_optimum_multicopy(inst: &Instance, force: bool) -> Result<ExactMultiCopy> {
    if inst.m() > MULTICOPY_EDGE_LIMIT && !force {
        return Err(Error::Capability(format!(
            "exact multicopy optimum is limited to {MULTICOPY_EDGE_LIMIT} edges (m = {}); use force to override",
            inst.m()
        )));
    }
    let baseline = baseline_independent_pairs(inst)?;
    if inst.n > EXHAUSTIVE_LIMIT {
        return Err(Error::Capability(format!(
            "exact multicopy optimum enumerates cuts and is limited to {EXHAUSTIVE_LIMIT} vertices"
        )));
    }
    let max_r = inst.max_requirement();
    let (cost, denom) = integer_costs(inst)?;
    let (rows, _) = cut_rows(inst);
    let mut rows_of = vec![Vec::new(); inst.m()];
    for (r, row) in rows.iter().enumerate() {
        for &e in &row.edges {
            rows_of[e].push(r);
        }
    }
    let bound: Vec<u64> = inst
        .edges
        .iter()
        .map(|e| rational::ceil_div(max_r, e.capacity))
        .collect();
    let avail = rows
        .iter()
        .map(|row| row.edges.iter().map(|&e| inst.edges[e].capacity * bound[e]).sum())
        .collect();
    let mut order: Vec<usize> = (0..inst.m()).collect();
    order.sort_by(|&a, &b| cost[b].cmp(&cost[a]).then(a.cmp(&b)));
    let mut by_ratio: Vec<usize> = (0..inst.m()).collect();
    by_ratio.sort_by(|&a, &b| {
        let (ua, ub) = (inst.edges[a].capacity as i128, inst.edges[b].capacity as i128);
        (cost[a] * ub).cmp(&(cost[b] * ua)).then(a.cmp(&b))
    });
    let baseline_cost: i128 = baseline
        .copies
        .iter()
        .zip(&cost)
        .map(|(&k, &c)| k as i128 * c)
        .sum();
    let mut search = CopySearch {
        inst,
        order,
        by_ratio,
        bound,
        have: vec![0; rows.len()],
        avail,
        unmet: rows.len(),
        rows,
        rows_of,
        decided: vec![false; inst.m()],
        copies: vec![0; inst.m()],
        best_cost: baseline_cost,
        best: baseline.copies.clone(),
        cost,
        nodes: 0,
    };
    search.dfs(0, 0);
    let result = Rational::new(BigInt::from(search.best_cost), denom);
    debug_assert_eq!(result, purchase_cost(inst, &search.best));
    Ok(ExactMultiCopy {
        cost: result,
        copies: search.best,
        nodes: search.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Demand, Edge};
    use crate::rational::int;

    fn pairs(n: usize, edges: Vec<Edge>, ps: Vec<(usize, usize, u64)>) -> Instance {
        Instance::new(
            n,
            false,
            edges,
            Requirements::Pairs(ps.into_iter().map(|(s, t, r)| Demand { s, t, r }).collect()),
        )
        .unwrap()
    }

    #[test]
    fn example1_needs_the_expensive_edge() {
        let inst = Instance::new(
            3,
            false,
            vec![
                Edge::new(0, 1, 10, int(0)),
                Edge::new(1, 2, 9, int(0)),
                Edge::new(0, 2, 10, int(100)),
            ],
            Requirements::Uniform(10),
        )
        .unwrap();
        let opt = exact_optimum(&inst, false).unwrap();
        assert_eq!(opt.cost, int(100));
        assert!(opt.subset.contains(&2));
    }

    #[test]
    fn empty_requirements_cost_nothing() {
        let inst = pairs(2, vec![Edge::new(0, 1, 1, int(4))], vec![]);
        assert_eq!(exact_optimum(&inst, false).unwrap().cost, int(0));
        assert_eq!(exact_optimum_multicopy(&inst, false).unwrap().cost, int(0));
    }

    #[test]
    fn multicopy_single_edge() {
        let inst = pairs(2, vec![Edge::new(0, 1, 2, int(3))], vec![(0, 1, 5)]);
        let opt = exact_optimum_multicopy(&inst, false).unwrap();
        assert_eq!(opt.copies, vec![3]);
        assert_eq!(opt.cost, int(9));
    }

    #[test]
    fn multicopy_mixes_copies_across_parallel_edges() {
        // One copy each of the 3- and 1-capacity edges beats two 3-capacity copies.
        let inst = pairs(
            3,
            vec![
                Edge::new(2, 1, 1, int(5)),
                Edge::new(1, 0, 3, int(3)),
                Edge::new(1, 2, 1, int(3)),
                Edge::new(2, 1, 3, int(5)),
            ],
            vec![(1, 2, 4), (0, 1, 1)],
        );
        let opt = exact_optimum_multicopy(&inst, false).unwrap();
        assert_eq!(opt.cost, int(11));
        assert_eq!(opt.copies, vec![0, 1, 1, 1]);
    }

    #[test]
    fn multicopy_parallel_edges() {
        let inst = pairs(
            2,
            vec![Edge::new(0, 1, 3, int(4)), Edge::new(0, 1, 1, int(1))],
            vec![(0, 1, 5)],
        );
        // (1, 2) costs 6, but five copies of the cheap edge cost 5.
        let opt = exact_optimum_multicopy(&inst, false).unwrap();
        assert_eq!(opt.cost, int(5));
        assert_eq!(opt.copies, vec![0, 5]);
    }

    #[test]
    fn directed_pairs() {
        let inst = Instance::new(
            3,
            true,
            vec![
                Edge::new(0, 1, 1, int(1)),
                Edge::new(1, 2, 1, int(1)),
                Edge::new(0, 2, 1, int(5)),
                Edge::new(2, 0, 1, int(0)),
            ],
            Requirements::Pairs(vec![Demand { s: 0, t: 2, r: 2 }]),
        )
        .unwrap();
        let opt = exact_optimum(&inst, false).unwrap();
        assert_eq!(opt.cost, int(7));
    }

    #[test]
    fn kway_levels_checked() {
        let inst = Instance::new(
            4,
            false,
            vec![
                Edge::new(0, 1, 1, int(1)),
                Edge::new(1, 2, 1, int(1)),
                Edge::new(2, 3, 1, int(1)),
                Edge::new(3, 0, 1, int(1)),
                Edge::new(0, 2, 1, int(1)),
            ],
            Requirements::KWay(vec![2, 4]),
        )
        .unwrap();
        // The 4-cycle alone meets the 2-cut level but its 3-way cuts are 3.
        let opt = exact_optimum(&inst, false).unwrap();
        assert_eq!(opt.cost, int(5));
    }

    #[test]
    fn size_cap_enforced() {
        let edges: Vec<Edge> = (0..25).map(|_| Edge::new(0, 1, 1, int(1))).collect();
        let inst = pairs(2, edges, vec![(0, 1, 1)]);
        assert!(matches!(exact_optimum(&inst, false), Err(Error::Capability(_))));
        assert_eq!(exact_optimum(&inst, true).unwrap().cost, int(1));
    }
}
