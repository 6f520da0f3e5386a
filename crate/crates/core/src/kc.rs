//! Cut LP strengthened with knapsack-cover (KC) inequalities.
//!
//! For a cut `C` with requirement `R` and an edge set `A`, the residual
//! requirement is `R(C, A) = max(0, R - u(A ∩ δ(C)))` and the KC inequality
//! reads `Σ_{e ∈ δ(C) \ A} min(u(e), R(C, A)) x_e >= R(C, A)`. Every integral
//! feasible solution satisfies all of them. [`solve_good`] minimizes cost
//! over a growing pool of such rows until `x` is a good solution: all
//! original cut constraints hold, and the KC inequality for the
//! nearly-integral set `A_x` holds on every small cut.

use std::collections::HashSet;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cutenum::{self, crossing_iter, EnumOptions, EXHAUSTIVE_LIMIT};
use crate::error::{Error, Result};
use crate::feasibility::{check_feasible, FeasibilityReport, Witness};
use crate::flow::global_min_cut;
use crate::graph::{Cut, Demand, EdgeWeighting, Instance, Requirements, VertexSet};
use crate::lp::{DualSimplex, LpStatus};
use crate::partition::{for_each_partition, EXACT_PARTITION_LIMIT};
use crate::rational::{self, Rational};
use crate::scaled::Scaled;

/// Which problem the LP models; requirement values come from the instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Variant {
    /// Global min cut at least `R` (uniform requirements).
    Uniform,
    /// Every `(i+1)`-way cut at least `R_i` (k-way requirements).
    KWay,
    /// Pair requirements within a factor `gamma` of the smallest listed one;
    /// unlisted pairs need the smallest listed requirement.
    NearUniform {
        #[serde(with = "rational::serde_str")]
        gamma: Rational,
    },
    /// General pair requirements. LP only, at most 16 vertices.
    Pairs,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Uniform => "uniform",
            Variant::KWay => "kway",
            Variant::NearUniform { .. } => "near-uniform",
            Variant::Pairs => "pairs",
        }
    }

    /// The variant multiplier `c` in `scale = 40 · c · log2 n`.
    pub fn factor(&self, inst: &Instance) -> Rational {
        match (self, &inst.requirements) {
            (Variant::KWay, Requirements::KWay(rs)) => rational::uint(rs.len() as u64 + 1),
            (Variant::NearUniform { gamma }, _) => gamma.clone(),
            _ => Rational::one(),
        }
    }

    pub fn scale(&self, inst: &Instance) -> Rational {
        rational::int(40) * self.factor(inst) * rational::log2_rational(inst.n.max(2))
    }

    /// Edges with `x_e` at least this value are nearly integral.
    pub fn threshold(&self, inst: &Instance) -> Rational {
        self.scale(inst).recip()
    }
}

#[derive(Clone, Debug)]
enum LevelReq {
    Fixed(u64),
    /// `max(base, max R_pq over separated listed pairs)`.
    Pairs { base: u64, pairs: Vec<Demand> },
}

impl LevelReq {
    fn of_side(&self, side: &VertexSet) -> u64 {
        match self {
            LevelReq::Fixed(r) => *r,
            LevelReq::Pairs { base, pairs } => pairs
                .iter()
                .filter(|d| side.contains(d.s) != side.contains(d.t))
                .map(|d| d.r)
                .fold(*base, u64::max),
        }
    }

    fn of_mask(&self, mask: u64) -> u64 {
        match self {
            LevelReq::Fixed(r) => *r,
            LevelReq::Pairs { base, pairs } => pairs
                .iter()
                .filter(|d| (mask >> d.s & 1) != (mask >> d.t & 1))
                .map(|d| d.r)
                .fold(*base, u64::max),
        }
    }

    fn min(&self) -> u64 {
        match self {
            LevelReq::Fixed(r) => *r,
            LevelReq::Pairs { base, .. } => *base,
        }
    }
}

/// One family of cut constraints: all `parts`-way cuts.
#[derive(Clone, Debug)]
struct Level {
    parts: usize,
    /// Capacities are clamped to this value in `û`.
    clamp: u64,
    /// Cuts with `û(δ(C)) <= pool_bound` form the small-cut pool.
    pool_bound: Rational,
    req: LevelReq,
}

fn levels(inst: &Instance, variant: &Variant) -> Result<Vec<Level>> {
    if inst.directed {
        return Err(Error::Unsupported(format!(
            "the {} LP needs an undirected instance",
            variant.name()
        )));
    }
    let mismatch = || {
        Error::invalid(
            "requirements",
            format!(
                "{} requirements do not match the {} variant",
                inst.requirements.kind(),
                variant.name()
            ),
        )
    };
    let two = |r: u64| rational::uint(2 * r);
    Ok(match (variant, &inst.requirements) {
        (Variant::Uniform, Requirements::Uniform(r)) => vec![Level {
            parts: 2,
            clamp: *r,
            pool_bound: two(*r),
            req: LevelReq::Fixed(*r),
        }],
        (Variant::KWay, Requirements::KWay(rs)) => rs
            .iter()
            .enumerate()
            .map(|(i, &r)| Level {
                parts: i + 2,
                clamp: r,
                pool_bound: two(r),
                req: LevelReq::Fixed(r),
            })
            .collect(),
        (Variant::NearUniform { gamma }, reqs) => {
            if *gamma < Rational::one() {
                return Err(Error::invalid("gamma", "must be at least 1"));
            }
            let pairs = match reqs {
                Requirements::Uniform(r) => vec![Demand { s: 0, t: 0, r: *r }],
                Requirements::Pairs(p) if !p.is_empty() => p.clone(),
                Requirements::Pairs(_) => return Ok(Vec::new()),
                Requirements::KWay(_) => return Err(mismatch()),
            };
            let base = pairs.iter().map(|d| d.r).min().expect("nonempty");
            let top = pairs.iter().map(|d| d.r).max().expect("nonempty");
            if rational::uint(top) > gamma * rational::uint(base) {
                return Err(Error::invalid(
                    "requirements.pairs",
                    format!("requirement {top} exceeds gamma times the base requirement {base}"),
                ));
            }
            vec![Level {
                parts: 2,
                clamp: top,
                pool_bound: rational::int(2) * gamma * rational::uint(base),
                req: LevelReq::Pairs {
                    base,
                    pairs: pairs.into_iter().filter(|d| d.s != d.t).collect(),
                },
            }]
        }
        (Variant::Pairs, Requirements::Pairs(pairs)) => {
            if inst.n > EXHAUSTIVE_LIMIT {
                return Err(Error::Capability(format!(
                    "the pairs LP enumerates all cuts and is limited to {EXHAUSTIVE_LIMIT} vertices"
                )));
            }
            if pairs.is_empty() {
                return Ok(Vec::new());
            }
            let top = pairs.iter().map(|d| d.r).max().expect("nonempty");
            vec![Level {
                parts: 2,
                clamp: top,
                pool_bound: two(top),
                req: LevelReq::Pairs {
                    base: 0,
                    pairs: pairs.clone(),
                },
            }]
        }
        _ => return Err(mismatch()),
    })
}

/// Feasibility of `subset` for the variant. Near-uniform also needs global
/// connectivity at the base requirement, which plain pair checks miss.
pub fn variant_feasible(
    inst: &Instance,
    variant: &Variant,
    subset: &[usize],
) -> Result<FeasibilityReport> {
    if let (Variant::NearUniform { .. }, Requirements::Pairs(pairs)) = (variant, &inst.requirements) {
        if let Some(base) = pairs.iter().map(|d| d.r).min() {
            let global = check_feasible(&inst.with_requirements(Requirements::Uniform(base))?, subset)?;
            if !global.feasible {
                return Ok(global);
            }
        }
    }
    check_feasible(inst, subset)
}

/// Converts a failed feasibility report into an infeasibility error.
pub fn infeasible_error(inst: &Instance, report: &FeasibilityReport) -> Error {
    let witness = report.witness.as_ref();
    let cut = witness.and_then(|w| match w {
        Witness::Cut { cut, .. } => Some(cut.clone()),
        Witness::Pair { sink_side, .. } if !sink_side.is_empty() && sink_side.len() < inst.n => {
            Cut::new(inst, sink_side.clone(), &EdgeWeighting::capacities(inst)).ok()
        }
        _ => None,
    });
    Error::Infeasible {
        detail: witness.map_or_else(|| "no witness".to_string(), Witness::describe),
        witness: cut.map(Box::new),
    }
}

/// `max(0, requirement - u(A ∩ δ))`.
pub fn residual_requirement(inst: &Instance, crossing: &[usize], a: &[usize], requirement: u64) -> u64 {
    let a: HashSet<usize> = a.iter().copied().collect();
    let credit: u64 = crossing
        .iter()
        .filter(|e| a.contains(e))
        .map(|&e| inst.edges[e].capacity)
        .sum();
    requirement.saturating_sub(credit)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CutShape {
    Bipartition { side: VertexSet },
    Partition { labels: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KcConstraint {
    pub shape: CutShape,
    pub crossing: Vec<usize>,
    pub requirement: u64,
    /// Sorted subset of `crossing` credited at full capacity.
    pub a: Vec<usize>,
    pub rhs: u64,
    /// `(edge, min(u(e), rhs))` for every edge of `crossing` outside `a`.
    pub coefficients: Vec<(usize, u64)>,
}

impl KcConstraint {
    pub fn new(inst: &Instance, shape: CutShape, crossing: Vec<usize>, requirement: u64, a: &[usize]) -> Self {
        let mut a: Vec<usize> = a.iter().copied().filter(|e| crossing.contains(e)).collect();
        a.sort_unstable();
        a.dedup();
        let rhs = residual_requirement(inst, &crossing, &a, requirement);
        let coefficients = crossing
            .iter()
            .filter(|e| a.binary_search(e).is_err())
            .map(|&e| (e, inst.edges[e].capacity.min(rhs)))
            .filter(|(_, c)| *c > 0)
            .collect();
        KcConstraint {
            shape,
            crossing,
            requirement,
            a,
            rhs,
            coefficients,
        }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.coefficients
            .iter()
            .fold(Rational::zero(), |acc, (e, c)| acc + &x[*e] * rational::uint(*c))
    }

    /// `lhs - rhs`; negative when violated.
    pub fn slack(&self, x: &[Rational]) -> Rational {
        self.lhs(x) - rational::uint(self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KcCheck {
    pub satisfied: bool,
    #[serde(with = "rational::serde_str")]
    pub slack: Rational,
}

/// Evaluates the KC inequality of `(δ, A)` at `x` exactly.
pub fn check_kc(inst: &Instance, x: &[Rational], crossing: &[usize], a: &[usize], requirement: u64) -> KcCheck {
    let c = KcConstraint::new(
        inst,
        CutShape::Partition { labels: Vec::new() },
        crossing.to_vec(),
        requirement,
        a,
    );
    let slack = c.slack(x);
    KcCheck {
        satisfied: !slack.is_negative(),
        slack,
    }
}

/// The cutting-plane working set; never holds the same `(cut, A)` twice.
#[derive(Clone, Debug, Default)]
pub struct ConstraintPool {
    constraints: Vec<KcConstraint>,
    keys: HashSet<(CutShape, Vec<usize>)>,
}

impl ConstraintPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// False if an identical `(cut, A)` pair was already present.
    pub fn insert(&mut self, c: KcConstraint) -> bool {
        if !self.keys.insert((c.shape.clone(), c.a.clone())) {
            return false;
        }
        self.constraints.push(c);
        true
    }

    pub fn contains(&self, shape: &CutShape, a: &[usize]) -> bool {
        self.keys.contains(&(shape.clone(), a.to_vec()))
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &KcConstraint> {
        self.constraints.iter()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FractionalSolution {
    #[serde(with = "rational::serde_vec")]
    pub x: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    pub threshold: Rational,
    #[serde(with = "rational::serde_str")]
    pub scale: Rational,
}

impl FractionalSolution {
    pub fn new(inst: &Instance, variant: &Variant, x: Vec<Rational>) -> Result<Self> {
        if x.len() != inst.m() {
            return Err(Error::invalid("x", format!("expected {} values, got {}", inst.m(), x.len())));
        }
        if let Some(e) = x.iter().position(|v| v.is_negative() || *v > Rational::one()) {
            return Err(Error::invalid(format!("x[{e}]"), "must lie in [0, 1]"));
        }
        Ok(FractionalSolution {
            x,
            threshold: variant.threshold(inst),
            scale: variant.scale(inst),
        })
    }

    /// `A_x`: edges with `x_e >= threshold`.
    pub fn nearly_integral(&self) -> Vec<usize> {
        (0..self.x.len()).filter(|&e| self.x[e] >= self.threshold).collect()
    }

    pub fn cost(&self, inst: &Instance) -> Rational {
        inst.edges
            .iter()
            .zip(&self.x)
            .fold(Rational::zero(), |acc, (e, x)| acc + &e.cost * x)
    }

    pub fn is_integral(&self) -> bool {
        self.x.iter().all(|v| v.is_integer())
    }

    /// `û(e) = u(e) · x_e`.
    pub fn hat(&self, inst: &Instance) -> EdgeWeighting {
        hat_weights(inst, &self.x, u64::MAX)
    }
}

fn hat_weights(inst: &Instance, x: &[Rational], clamp: u64) -> EdgeWeighting {
    EdgeWeighting {
        label: "û".into(),
        values: inst
            .edges
            .iter()
            .zip(x)
            .map(|(e, v)| rational::uint(e.capacity.min(clamp)) * v)
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertifiedConstraint {
    #[serde(flatten)]
    pub constraint: KcConstraint,
    #[serde(with = "rational::serde_str")]
    pub slack: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub version: u32,
    pub variant: Variant,
    pub knapsack_cover: bool,
    pub rounds: u64,
    pub lp_pivots: u64,
    /// False when some cut family was sampled rather than enumerated.
    pub exact_separation: bool,
    #[serde(with = "rational::serde_str")]
    pub cost: Rational,
    #[serde(with = "rational::serde_vec")]
    pub x: Vec<Rational>,
    pub constraints: Vec<CertifiedConstraint>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct GoodSolution {
    pub solution: FractionalSolution,
    pub certificate: Certificate,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Separate knapsack-cover rows; when false only original cut rows
    /// (capacities clamped to the requirement) are added.
    pub knapsack_cover: bool,
    pub seed: u64,
    /// Rows added per separation round, most violated first.
    pub rows_per_round: usize,
    /// Defaults to `50 · m · n`.
    pub max_rounds: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            knapsack_cover: true,
            seed: 0,
            rows_per_round: 8,
            max_rounds: None,
        }
    }
}

pub fn solve_good(inst: &Instance, variant: &Variant, seed: u64) -> Result<GoodSolution> {
    solve_good_with(
        inst,
        variant,
        &SolveOptions {
            seed,
            ..SolveOptions::default()
        },
    )
}

/// Optimum of the plain cut LP (no knapsack-cover rows).
pub fn std_lp_optimum(inst: &Instance, variant: &Variant) -> Result<GoodSolution> {
    solve_good_with(
        inst,
        variant,
        &SolveOptions {
            knapsack_cover: false,
            ..SolveOptions::default()
        },
    )
}

struct CutRecord {
    shape: CutShape,
    crossing: Vec<usize>,
    requirement: u64,
    /// Clamped `û(δ(C))`.
    value: Rational,
}

/// Cuts of `level` with positive requirement and clamped `û` at most the
/// pool bound. Every cut violating an original constraint is among them.
fn level_cuts(
    inst: &Instance,
    level: &Level,
    x: &[Rational],
    seed: u64,
    exact: &mut bool,
) -> Result<Vec<CutRecord>> {
    let hat = hat_weights(inst, x, level.clamp);
    let scaled = Scaled::new(&hat);
    let bound = scaled.bound(&level.pool_bound);
    let mut out = Vec::new();
    if level.parts == 2 && inst.n <= EXHAUSTIVE_LIMIT {
        for (mask, v) in cutenum::exhaustive_values(inst, &scaled) {
            if v > bound {
                continue;
            }
            let requirement = level.req.of_mask(mask);
            if requirement == 0 {
                continue;
            }
            let side = VertexSet::from_mask(inst.n, mask);
            out.push(CutRecord {
                crossing: inst.crossing(&side),
                shape: CutShape::Bipartition { side },
                requirement,
                value: scaled.to_rational(&v),
            });
        }
    } else if level.parts == 2 {
        let min = global_min_cut(inst, &hat)?;
        let cuts = if min.capacity < rational::uint(level.req.min()) {
            vec![min]
        } else {
            let pool = cutenum::cuts_within(inst, &hat, &level.pool_bound, seed)?;
            *exact &= pool.complete;
            pool.cuts
        };
        for cut in cuts {
            let requirement = level.req.of_side(&cut.side);
            out.push(CutRecord {
                shape: CutShape::Bipartition {
                    side: cut.side.clone(),
                },
                crossing: cut.crossing,
                requirement,
                value: cut.capacity,
            });
        }
    } else if inst.n <= EXACT_PARTITION_LIMIT {
        let requirement = level.req.min();
        for_each_partition(inst.n, level.parts, |labels| {
            let v = scaled.sum(crossing_iter(inst, labels));
            if v <= bound {
                out.push(CutRecord {
                    shape: CutShape::Partition {
                        labels: labels.to_vec(),
                    },
                    crossing: crossing_iter(inst, labels).collect(),
                    requirement,
                    value: scaled.to_rational(&v),
                });
            }
        });
    } else {
        *exact = false;
        let opts = EnumOptions {
            allow_randomized_kway: true,
            max_runs: Some(500),
            ..EnumOptions::default()
        };
        let probe = cutenum::enumerate_near_min_kway_cuts(inst, &hat, level.parts, &Rational::one(), seed, &opts)?;
        let alpha = (&level.pool_bound / &probe.min_cut_value).max(Rational::one());
        let pool = cutenum::enumerate_near_min_kway_cuts(inst, &hat, level.parts, &alpha, seed, &opts)?;
        for cut in pool.cuts {
            out.push(CutRecord {
                shape: CutShape::Partition { labels: cut.labels },
                crossing: cut.crossing,
                requirement: level.req.min(),
                value: cut.capacity,
            });
        }
    }
    Ok(out)
}

/// Candidate `A` sets for one cut: the empty set, `A_x ∩ δ`, and every
/// threshold prefix `{e ∈ δ : x_e >= θ}` over the distinct positive values
/// of `x` on `δ`.
fn candidate_sets(crossing: &[usize], x: &[Rational], threshold: &Rational, kc: bool) -> Vec<Vec<usize>> {
    let mut sets = vec![Vec::new()];
    if !kc {
        return sets;
    }
    sets.push(crossing.iter().copied().filter(|&e| x[e] >= *threshold).collect());
    let mut values: Vec<&Rational> = crossing.iter().map(|&e| &x[e]).filter(|v| v.is_positive()).collect();
    values.sort();
    values.dedup();
    for theta in values.into_iter().rev() {
        sets.push(crossing.iter().copied().filter(|&e| x[e] >= *theta).collect());
    }
    for s in &mut sets {
        s.sort_unstable();
    }
    sets.sort();
    sets.dedup();
    sets
}

/// The most violated KC row for one cut, by relative violation.
fn most_violated(
    inst: &Instance,
    cut: &CutRecord,
    x: &[Rational],
    threshold: &Rational,
    kc: bool,
) -> Option<(Rational, KcConstraint)> {
    let mut best: Option<(Rational, KcConstraint)> = None;
    for a in candidate_sets(&cut.crossing, x, threshold, kc) {
        let c = KcConstraint::new(inst, cut.shape.clone(), cut.crossing.clone(), cut.requirement, &a);
        let slack = c.slack(x);
        if !slack.is_negative() {
            continue;
        }
        let rel = slack / rational::uint(c.rhs);
        if best.as_ref().is_none_or(|(b, _)| rel < *b) {
            best = Some((rel, c));
        }
    }
    best
}

struct Lp {
    simplex: DualSimplex,
    column: Vec<Option<usize>>,
    columns: Vec<usize>,
}

impl Lp {
    fn new(inst: &Instance) -> Result<Self> {
        let mut column = vec![None; inst.m()];
        let mut columns = Vec::new();
        let mut costs = Vec::new();
        for (e, edge) in inst.edges.iter().enumerate() {
            if edge.cost.is_positive() {
                column[e] = Some(columns.len());
                columns.push(e);
                costs.push(edge.cost.clone());
            }
        }
        let mut simplex = DualSimplex::new(costs)?;
        for j in 0..columns.len() {
            simplex.add_row(&[(j, -Rational::one())], -Rational::one());
        }
        Ok(Lp {
            simplex,
            column,
            columns,
        })
    }

    fn add(&mut self, c: &KcConstraint) {
        let mut rhs = rational::uint(c.rhs);
        let mut coeffs = Vec::new();
        for &(e, a) in &c.coefficients {
            match self.column[e] {
                Some(j) => coeffs.push((j, rational::uint(a))),
                None => rhs -= rational::uint(a),
            }
        }
        self.simplex.add_row(&coeffs, rhs);
    }

    /// Zero-cost edges sit at 1: raising them never costs anything.
    fn x(&self, m: usize) -> Vec<Rational> {
        let mut x: Vec<Rational> = (0..m)
            .map(|e| if self.column[e].is_none() { Rational::one() } else { Rational::zero() })
            .collect();
        for (j, v) in self.simplex.solution().into_iter().enumerate() {
            x[self.columns[j]] = v;
        }
        x
    }
}

pub fn solve_good_with(inst: &Instance, variant: &Variant, opts: &SolveOptions) -> Result<GoodSolution> {
    let levels = levels(inst, variant)?;
    let threshold = variant.threshold(inst);
    let mut notes = vec![
        "minimized over a growing constraint pool with an exact dual simplex".to_string(),
        "capacities are clamped to the cut requirement in every row".to_string(),
    ];
    if levels.is_empty() {
        notes.push("no positive requirement; x is zero".into());
        let x = vec![Rational::zero(); inst.m()];
        return Ok(finish(inst, variant, opts, x, &ConstraintPool::new(), 0, 0, true, notes));
    }
    let full: Vec<usize> = (0..inst.m()).collect();
    let report = variant_feasible(inst, variant, &full)?;
    if !report.feasible {
        return Err(infeasible_error(inst, &report));
    }
    notes.push("zero-cost edges are fixed at 1".into());
    let cap = opts
        .max_rounds
        .unwrap_or(50 * inst.m().max(1) as u64 * inst.n as u64);
    let mut lp = Lp::new(inst)?;
    let mut pool = ConstraintPool::new();
    let mut rounds = 0u64;
    let mut exact = true;
    let mut x = lp.x(inst.m());
    loop {
        let mut violated: Vec<(Rational, usize, KcConstraint)> = Vec::new();
        for level in &levels {
            if level.parts > 2 && inst.n > EXACT_PARTITION_LIMIT && !violated.is_empty() {
                break;
            }
            for cut in level_cuts(inst, level, &x, opts.seed, &mut exact)? {
                if let Some((rel, c)) = most_violated(inst, &cut, &x, &threshold, opts.knapsack_cover) {
                    let order = violated.len();
                    violated.push((rel, order, c));
                }
            }
        }
        if violated.is_empty() {
            break;
        }
        if rounds == cap {
            return Err(Error::IterationCap {
                cap: cap as usize,
                pool_size: pool.len(),
            });
        }
        rounds += 1;
        violated.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        for (_, _, c) in violated.into_iter().take(opts.rows_per_round.max(1)) {
            lp.add(&c);
            let fresh = pool.insert(c);
            debug_assert!(fresh, "a pooled row cannot be violated");
        }
        match lp.simplex.solve(u64::MAX) {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Err(Error::LpInfeasible),
            LpStatus::PivotLimit => unreachable!("unbounded pivot budget"),
        }
        x = lp.x(inst.m());
        log::debug!("round {rounds}: {} rows, cost {}", pool.len(), lp.simplex.objective());
    }
    if !exact {
        notes.push("some multiway or large-graph cut families were sampled".into());
    }
    let pivots = lp.simplex.pivots();
    Ok(finish(inst, variant, opts, x, &pool, rounds, pivots, exact, notes))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    inst: &Instance,
    variant: &Variant,
    opts: &SolveOptions,
    x: Vec<Rational>,
    pool: &ConstraintPool,
    rounds: u64,
    lp_pivots: u64,
    exact_separation: bool,
    notes: Vec<String>,
) -> GoodSolution {
    let solution = FractionalSolution {
        threshold: variant.threshold(inst),
        scale: variant.scale(inst),
        x,
    };
    let constraints = pool
        .iter()
        .map(|c| CertifiedConstraint {
            slack: c.slack(&solution.x),
            constraint: c.clone(),
        })
        .collect();
    let certificate = Certificate {
        version: 1,
        variant: variant.clone(),
        knapsack_cover: opts.knapsack_cover,
        rounds,
        lp_pivots,
        exact_separation,
        cost: solution.cost(inst),
        x: solution.x.clone(),
        constraints,
        notes,
    };
    GoodSolution { solution, certificate }
}

/// A KC inequality violated by `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KcViolation {
    pub constraint: KcConstraint,
    #[serde(with = "rational::serde_str")]
    pub slack: Rational,
}

/// Largest crossing set whose subsets [`find_kc_violation`] enumerates.
pub const KC_SUBSET_LIMIT: usize = 24;

/// Checks the KC inequality for every cut of every level and every
/// `A ⊆ δ(C)`; returns the first violation in enumeration order.
pub fn find_kc_violation(inst: &Instance, variant: &Variant, x: &[Rational]) -> Result<Option<KcViolation>> {
    if x.len() != inst.m() {
        return Err(Error::invalid("x", "length differs from the edge count"));
    }
    let mut levels = levels(inst, variant)?;
    let total = inst.edges.iter().fold(Rational::zero(), |acc, e| acc + rational::uint(e.capacity));
    for level in &mut levels {
        if (level.parts == 2 && inst.n > EXHAUSTIVE_LIMIT) || (level.parts > 2 && inst.n > EXACT_PARTITION_LIMIT) {
            return Err(Error::Capability(format!(
                "exhaustive KC check of {}-way cuts on {} vertices",
                level.parts, inst.n
            )));
        }
        level.pool_bound = total.clone() + Rational::one();
    }
    let mut exact = true;
    for level in &levels {
        let ones = vec![Rational::one(); inst.m()];
        for cut in level_cuts(inst, level, &ones, 0, &mut exact)? {
            let k = cut.crossing.len();
            if k > KC_SUBSET_LIMIT {
                return Err(Error::Capability(format!("cut with {k} crossing edges")));
            }
            for bits in 0u64..(1u64 << k) {
                let a: Vec<usize> = (0..k).filter(|i| bits >> i & 1 == 1).map(|i| cut.crossing[i]).collect();
                let c = KcConstraint::new(inst, cut.shape.clone(), cut.crossing.clone(), cut.requirement, &a);
                let slack = c.slack(x);
                if slack.is_negative() {
                    return Ok(Some(KcViolation { constraint: c, slack }));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoodCheck {
    /// Every original cut constraint holds under clamped `û`.
    pub condition_a: bool,
    /// The KC inequality for `A_x` holds on every small cut.
    pub condition_b: bool,
    pub exact: bool,
    pub violations: Vec<String>,
}

/// Re-enumerates the cut families at `x` and checks the good-solution
/// conditions from scratch.
pub fn verify_good(inst: &Instance, variant: &Variant, sol: &FractionalSolution, seed: u64) -> Result<GoodCheck> {
    let levels = levels(inst, variant)?;
    let a_x = sol.nearly_integral();
    let mut check = GoodCheck {
        condition_a: true,
        condition_b: true,
        exact: true,
        violations: Vec::new(),
    };
    for level in &levels {
        for cut in level_cuts(inst, level, &sol.x, seed, &mut check.exact)? {
            if cut.value < rational::uint(cut.requirement) {
                check.condition_a = false;
                check.violations.push(format!(
                    "{:?}: û = {} < {}",
                    cut.shape,
                    rational::format(&cut.value),
                    cut.requirement
                ));
            }
            let kc = check_kc(inst, &sol.x, &cut.crossing, &a_x, cut.requirement);
            if !kc.satisfied {
                check.condition_b = false;
                check.violations.push(format!(
                    "{:?}: KC slack {} with A = A_x",
                    cut.shape,
                    rational::format(&kc.slack)
                ));
            }
        }
    }
    Ok(check)
}
