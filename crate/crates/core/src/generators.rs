//! Named and random instance generators.

use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::min_kway_exact;
use crate::flow::{global_min_cut, FlowGraph};
use crate::graph::{Demand, Edge, EdgeWeighting, Instance, Requirements};
use crate::kc::{FractionalSolution, Variant};
use crate::partition::EXACT_PARTITION_LIMIT;
use crate::rational::{self, Rational};
use crate::seeding;

/// Triangle `p, q, r` (vertices 0, 1, 2): `pq` free with capacity `R`, `qr`
/// free with capacity `R - 1`, `pr` costing `C` with capacity `R`; every cut
/// must carry `R`, so `pr` is unavoidable.
pub fn gen_example1(r: u64, c: Rational) -> Result<Instance> {
    if r < 2 {
        return Err(Error::invalid("R", "must be at least 2"));
    }
    if !c.is_positive() {
        return Err(Error::invalid("C", "must be positive"));
    }
    Instance::new(
        3,
        false,
        vec![
            Edge::new(0, 1, r, rational::int(0)),
            Edge::new(1, 2, r - 1, rational::int(0)),
            Edge::new(0, 2, r, c),
        ],
        Requirements::Uniform(r),
    )
}

/// `s = 0`, `t = 1`, `v_i = 2 + i`. Edges `0..R` are the small edges `s–v_i`
/// (capacity 2, cost 1); edges `R..2R` are the large edges `v_i–t`
/// (capacity `R`, cost `R`). One pair `(s, t)` with requirement `R`.
/// The reference solution puts 1 on small edges and `2/R` on large ones.
pub fn gen_single_pair_gap(r: u64) -> Result<(Instance, FractionalSolution)> {
    if r < 4 || r % 2 == 1 {
        return Err(Error::invalid("R", "must be even and at least 4"));
    }
    let k = r as usize;
    let mut edges = Vec::with_capacity(2 * k);
    for i in 0..k {
        edges.push(Edge::new(0, 2 + i, 2, rational::int(1)));
    }
    for i in 0..k {
        edges.push(Edge::new(2 + i, 1, r, rational::uint(r)));
    }
    let inst = Instance::new(
        k + 2,
        false,
        edges,
        Requirements::Pairs(vec![Demand { s: 0, t: 1, r }]),
    )?;
    let mut x = vec![rational::int(1); k];
    x.extend(std::iter::repeat_n(rational::ratio(2, r as i64), k));
    let sol = FractionalSolution::new(&inst, &Variant::Pairs, x)?;
    Ok((inst, sol))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RequirementSpec {
    Uniform,
    /// `levels` entries `R_1 <= ... <= R_levels`.
    Kway { levels: usize },
    Pairs { pairs: usize },
    /// Pairs with requirements in `[base, gamma · base]`.
    NearUniform {
        pairs: usize,
        #[serde(with = "rational::serde_str")]
        gamma: Rational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub n: usize,
    pub m: usize,
    /// Inclusive capacity range.
    pub cap: (u64, u64),
    /// Inclusive integral cost range.
    pub cost: (u64, u64),
    pub requirements: RequirementSpec,
}

/// Tries before [`gen_random`] gives up on drawing a connected multigraph.
pub const REJECTION_LIMIT: usize = 1000;

/// Random connected multigraph with requirements no larger than the full
/// graph supports, so the result is always feasible.
pub fn gen_random(spec: &RandomSpec, seed: u64) -> Result<Instance> {
    if spec.n < 2 {
        return Err(Error::invalid("n", "need at least two vertices"));
    }
    if spec.m + 1 < spec.n {
        return Err(Error::invalid("m", "too few edges to connect the graph"));
    }
    if spec.cap.0 == 0 || spec.cap.0 > spec.cap.1 || spec.cost.0 > spec.cost.1 {
        return Err(Error::invalid("cap", "ranges must be nonempty with positive capacities"));
    }
    let mut rng = seeding::rng(seed);
    for _ in 0..REJECTION_LIMIT {
        let edges: Vec<Edge> = (0..spec.m)
            .map(|_| {
                let a = rng.gen_range(0..spec.n);
                let mut b = rng.gen_range(0..spec.n - 1);
                if b >= a {
                    b += 1;
                }
                Edge::new(
                    a,
                    b,
                    rng.gen_range(spec.cap.0..=spec.cap.1),
                    rational::uint(rng.gen_range(spec.cost.0..=spec.cost.1)),
                )
            })
            .collect();
        let probe = Instance::new(spec.n, false, edges, Requirements::Uniform(1))?;
        let caps = EdgeWeighting::capacities(&probe);
        let min_cut = global_min_cut(&probe, &caps)?.capacity;
        if min_cut.is_zero() {
            continue;
        }
        let min_cut = rational::to_f64(&min_cut) as u64;
        let requirements = draw_requirements(&probe, &spec.requirements, min_cut, &mut rng)?;
        return probe.with_requirements(requirements);
    }
    Err(Error::RejectionLimit(REJECTION_LIMIT))
}

fn draw_requirements(
    inst: &Instance,
    spec: &RequirementSpec,
    min_cut: u64,
    rng: &mut impl Rng,
) -> Result<Requirements> {
    Ok(match spec {
        RequirementSpec::Uniform => Requirements::Uniform(rng.gen_range(1..=min_cut)),
        RequirementSpec::Kway { levels } => {
            if *levels == 0 || levels + 1 > inst.n {
                return Err(Error::invalid("levels", "need 1 <= levels <= n - 1"));
            }
            let caps = EdgeWeighting::capacities(inst);
            let mut rs = Vec::with_capacity(*levels);
            let mut prev = 1;
            for i in 0..*levels {
                // (i+2)-way minima never decrease; beyond the exact range the
                // 2-way minimum is a safe cap.
                let cap = if i == 0 || inst.n > EXACT_PARTITION_LIMIT {
                    min_cut
                } else {
                    let best = min_kway_exact(inst, &caps, i + 2).expect("parts <= n");
                    rational::to_f64(&best.capacity) as u64
                };
                let r = rng.gen_range(prev..=cap.max(prev));
                rs.push(r);
                prev = r;
            }
            Requirements::KWay(rs)
        }
        RequirementSpec::Pairs { pairs } => Requirements::Pairs(draw_pairs(inst, *pairs, rng, |_, flow, rng| {
            rng.gen_range(1..=flow)
        })?),
        RequirementSpec::NearUniform { pairs, gamma } => {
            if *gamma < rational::int(1) {
                return Err(Error::invalid("gamma", "must be at least 1"));
            }
            let base = rng.gen_range(1..=min_cut);
            let top = rational::to_f64(&(gamma * rational::uint(base))).floor() as u64;
            let mut drawn = draw_pairs(inst, *pairs, rng, |_, flow, rng| rng.gen_range(base..=top.min(flow)))?;
            // The smallest listed requirement is the base.
            if let Some(first) = drawn.first_mut() {
                first.r = base;
            }
            Requirements::Pairs(drawn)
        }
    })
}

fn draw_pairs<R: Rng>(
    inst: &Instance,
    count: usize,
    rng: &mut R,
    mut requirement: impl FnMut(usize, u64, &mut R) -> u64,
) -> Result<Vec<Demand>> {
    let max_pairs = inst.n * (inst.n - 1) / 2;
    if count > max_pairs {
        return Err(Error::invalid("pairs", format!("at most {max_pairs} distinct pairs")));
    }
    let caps: Vec<i64> = inst.edges.iter().map(|e| e.capacity as i64).collect();
    let mut out: Vec<Demand> = Vec::with_capacity(count);
    while out.len() < count {
        let s = rng.gen_range(0..inst.n);
        let mut t = rng.gen_range(0..inst.n - 1);
        if t >= s {
            t += 1;
        }
        let (s, t) = (s.min(t), s.max(t));
        if out.iter().any(|d| d.s == s && d.t == t) {
            continue;
        }
        let flow = FlowGraph::new(inst, caps.clone()).max_flow(s, t) as u64;
        let r = requirement(out.len(), flow, rng);
        out.push(Demand { s, t, r });
    }
    Ok(out)
}
