//! Multigraph instances, vertex subsets, edge weightings and cuts.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// A set of vertices stored as a packed bit vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet {
            words: vec![0; n.div_ceil(64).max(1)],
        }
    }

    pub fn from_vertices(n: usize, vertices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = VertexSet::empty(n);
        for v in vertices {
            s.insert(v);
        }
        s
    }

    /// Set whose members are the set bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let mut s = VertexSet::empty(n);
        s.words[0] = mask;
        s
    }

    pub fn insert(&mut self, v: usize) {
        self.words[v / 64] |= 1 << (v % 64);
    }

    pub fn remove(&mut self, v: usize) {
        self.words[v / 64] &= !(1 << (v % 64));
    }

    pub fn contains(&self, v: usize) -> bool {
        self.words
            .get(v / 64)
            .is_some_and(|w| w & (1 << (v % 64)) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64).filter(move |b| w & (1 << b) != 0).map(move |b| i * 64 + b)
        })
    }

    pub fn complement(&self, n: usize) -> Self {
        let mut s = VertexSet::empty(n);
        for v in 0..n {
            if !self.contains(v) {
                s.insert(v);
            }
        }
        s
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub capacity: u64,
    pub cost: Rational,
}

impl Edge {
    pub fn new(tail: usize, head: usize, capacity: u64, cost: Rational) -> Self {
        Edge {
            tail,
            head,
            capacity,
            cost,
        }
    }

    /// True when exactly one endpoint lies in `side`.
    pub fn crosses(&self, side: &VertexSet) -> bool {
        side.contains(self.tail) != side.contains(self.head)
    }

    /// Endpoint opposite to `v`.
    pub fn other(&self, v: usize) -> usize {
        if v == self.tail {
            self.head
        } else {
            self.tail
        }
    }
}

/// A terminal pair `(s, t)` with connectivity requirement `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demand {
    pub s: usize,
    pub t: usize,
    pub r: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Requirements {
    /// Every cut must carry capacity at least `R`.
    Uniform(u64),
    /// `Rs[i-1]` bounds every `(i+1)`-way cut; nondecreasing.
    KWay(Vec<u64>),
    Pairs(Vec<Demand>),
}

impl Requirements {
    pub fn kind(&self) -> &'static str {
        match self {
            Requirements::Uniform(_) => "uniform",
            Requirements::KWay(_) => "kway",
            Requirements::Pairs(_) => "pairs",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub n: usize,
    pub directed: bool,
    pub edges: Vec<Edge>,
    pub requirements: Requirements,
}

impl Instance {
    /// Builds and validates an instance. Costs are stored in lowest terms.
    pub fn new(
        n: usize,
        directed: bool,
        edges: Vec<Edge>,
        requirements: Requirements,
    ) -> Result<Self> {
        let inst = Instance {
            n,
            directed,
            edges,
            requirements,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("n", "instance needs at least one vertex"));
        }
        for (i, e) in self.edges.iter().enumerate() {
            let field = format!("edges[{i}]");
            if e.tail >= self.n || e.head >= self.n {
                return Err(Error::invalid(field, "endpoint out of range"));
            }
            if e.tail == e.head {
                return Err(Error::invalid(field, "self-loops are not allowed"));
            }
            if e.capacity == 0 {
                return Err(Error::invalid(field, "capacity must be positive"));
            }
            if e.cost.is_negative() {
                return Err(Error::invalid(field, "cost must be nonnegative"));
            }
        }
        match &self.requirements {
            Requirements::Uniform(r) => {
                if *r == 0 {
                    return Err(Error::invalid("requirements.R", "must be positive"));
                }
                if self.directed {
                    return Err(Error::invalid(
                        "directed",
                        "uniform requirements need an undirected instance",
                    ));
                }
            }
            Requirements::KWay(rs) => {
                if rs.is_empty() {
                    return Err(Error::invalid("requirements.Rs", "must be nonempty"));
                }
                if rs.contains(&0) {
                    return Err(Error::invalid("requirements.Rs", "entries must be positive"));
                }
                if rs.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::invalid("requirements.Rs", "must be nondecreasing"));
                }
                if rs.len() + 1 > self.n {
                    return Err(Error::invalid(
                        "requirements.Rs",
                        "more cut levels than vertices allow",
                    ));
                }
                if self.directed {
                    return Err(Error::invalid(
                        "directed",
                        "k-way requirements need an undirected instance",
                    ));
                }
            }
            Requirements::Pairs(pairs) => {
                for (i, d) in pairs.iter().enumerate() {
                    let field = format!("requirements.pairs[{i}]");
                    if d.s >= self.n || d.t >= self.n {
                        return Err(Error::invalid(field, "terminal out of range"));
                    }
                    if d.s == d.t {
                        return Err(Error::invalid(field, "terminals must differ"));
                    }
                    if d.r == 0 {
                        return Err(Error::invalid(field, "requirement must be positive"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn total_cost(&self, subset: &[usize]) -> Rational {
        subset
            .iter()
            .fold(Rational::zero(), |acc, &e| acc + &self.edges[e].cost)
    }

    /// Sorted indices of edges crossing `side`.
    pub fn crossing(&self, side: &VertexSet) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.crosses(side))
            .map(|(i, _)| i)
            .collect()
    }

    /// Largest requirement of any listed pair separated by `side`.
    pub fn pair_requirement(&self, side: &VertexSet) -> u64 {
        match &self.requirements {
            Requirements::Uniform(r) => *r,
            Requirements::KWay(rs) => rs[0],
            Requirements::Pairs(pairs) => pairs
                .iter()
                .filter(|d| side.contains(d.s) != side.contains(d.t))
                .map(|d| d.r)
                .max()
                .unwrap_or(0),
        }
    }

    pub fn max_requirement(&self) -> u64 {
        match &self.requirements {
            Requirements::Uniform(r) => *r,
            Requirements::KWay(rs) => rs.iter().copied().max().unwrap_or(0),
            Requirements::Pairs(pairs) => pairs.iter().map(|d| d.r).max().unwrap_or(0),
        }
    }

    /// Same graph, different requirements.
    pub fn with_requirements(&self, requirements: Requirements) -> Result<Instance> {
        Instance::new(self.n, self.directed, self.edges.clone(), requirements)
    }
}

/// Nonnegative rational weight on every edge of an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeWeighting {
    pub label: String,
    pub values: Vec<Rational>,
}

impl EdgeWeighting {
    pub fn new(label: impl Into<String>, values: Vec<Rational>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| v.is_negative()) {
            return Err(Error::invalid(format!("weighting[{i}]"), "negative weight"));
        }
        Ok(EdgeWeighting {
            label: label.into(),
            values,
        })
    }

    /// The capacity weighting `u`.
    pub fn capacities(inst: &Instance) -> Self {
        EdgeWeighting {
            label: "u".into(),
            values: inst.edges.iter().map(|e| rational::uint(e.capacity)).collect(),
        }
    }

    /// Capacities restricted to `subset` (zero elsewhere).
    pub fn subset_capacities(inst: &Instance, subset: &[usize]) -> Self {
        let mut values = vec![Rational::zero(); inst.m()];
        for &e in subset {
            values[e] = rational::uint(inst.edges[e].capacity);
        }
        EdgeWeighting {
            label: "u|H".into(),
            values,
        }
    }

    pub fn unit(inst: &Instance) -> Self {
        EdgeWeighting {
            label: "1".into(),
            values: vec![rational::int(1); inst.m()],
        }
    }

    pub fn check_len(&self, inst: &Instance) -> Result<()> {
        if self.values.len() != inst.m() {
            return Err(Error::invalid(
                format!("weighting `{}`", self.label),
                format!("has {} values for {} edges", self.values.len(), inst.m()),
            ));
        }
        Ok(())
    }

    pub fn sum_over(&self, edges: &[usize]) -> Rational {
        edges
            .iter()
            .fold(Rational::zero(), |acc, &e| acc + &self.values[e])
    }
}

/// A vertex bipartition with its crossing edges. The side never contains
/// vertex 0, so equal cuts have equal sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cut {
    pub side: VertexSet,
    pub crossing: Vec<usize>,
    #[serde(with = "rational::serde_str")]
    pub capacity: Rational,
}

impl Cut {
    /// Canonicalizes `side` (complementing it when it holds vertex 0) and
    /// evaluates the crossing set under `w`.
    pub fn new(inst: &Instance, side: VertexSet, w: &EdgeWeighting) -> Result<Cut> {
        let side = canonical_side(inst.n, side);
        if side.is_empty() {
            return Err(Error::invalid("cut", "side must be nonempty and proper"));
        }
        let crossing = inst.crossing(&side);
        let capacity = w.sum_over(&crossing);
        Ok(Cut {
            side,
            crossing,
            capacity,
        })
    }

    /// Recomputes the crossing set from the instance and compares.
    pub fn is_consistent(&self, inst: &Instance, w: &EdgeWeighting) -> bool {
        !self.side.is_empty()
            && !self.side.contains(0)
            && self.side.len() < inst.n
            && inst.crossing(&self.side) == self.crossing
            && w.sum_over(&self.crossing) == self.capacity
    }
}

pub fn canonical_side(n: usize, side: VertexSet) -> VertexSet {
    if side.contains(0) {
        side.complement(n)
    } else {
        side
    }
}
