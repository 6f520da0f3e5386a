//! Label-cover instances and their reduction to single-pair directed design.
//!
//! JSON schema:
//! `{"A": 2, "B": 2, "dA": 1, "dB": 1, "LA": 2, "LB": 2,
//!   "pi": [[0, 0, [[0, 1]]], [1, 1, [[1, 0]]]], "phi": {"A": [0, 1], "B": [1, 0]}}`
//! where each `pi` entry is `[a, b, relation]` and `phi` is optional.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::max_flow;
use crate::graph::{Demand, Edge, EdgeWeighting, Instance, Requirements};
use crate::rational::{self, Rational};
use crate::seeding;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labeling {
    #[serde(rename = "A")]
    pub a: Vec<usize>,
    #[serde(rename = "B")]
    pub b: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcEdge(pub usize, pub usize, pub Vec<(usize, usize)>);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelCoverInstance {
    #[serde(rename = "A")]
    pub num_a: usize,
    #[serde(rename = "B")]
    pub num_b: usize,
    #[serde(rename = "dA")]
    pub d_a: usize,
    #[serde(rename = "dB")]
    pub d_b: usize,
    #[serde(rename = "LA")]
    pub labels_a: usize,
    #[serde(rename = "LB")]
    pub labels_b: usize,
    pub pi: Vec<LcEdge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Labeling>,
}

impl LabelCoverInstance {
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let lc: LabelCoverInstance = serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
        lc.validate()?;
        Ok(lc)
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut out = serde_json::to_vec(self).map_err(|e| Error::Parse(e.to_string()))?;
        out.push(b'\n');
        Ok(out)
    }

    /// Number of edges `m`.
    pub fn m(&self) -> usize {
        self.pi.len()
    }

    /// Vertices, edges, relation pairs and labels counted once each.
    pub fn size(&self) -> usize {
        self.num_a
            + self.num_b
            + self.pi.len()
            + self.pi.iter().map(|e| e.2.len()).sum::<usize>()
            + self.labels_a
            + self.labels_b
    }

    pub fn validate(&self) -> Result<()> {
        let mut deg_a = vec![0usize; self.num_a];
        let mut deg_b = vec![0usize; self.num_b];
        for (i, LcEdge(a, b, rel)) in self.pi.iter().enumerate() {
            if *a >= self.num_a || *b >= self.num_b {
                return Err(Error::invalid(format!("pi[{i}]"), "endpoint out of range"));
            }
            deg_a[*a] += 1;
            deg_b[*b] += 1;
            if rel.iter().any(|&(la, lb)| la >= self.labels_a || lb >= self.labels_b) {
                return Err(Error::invalid(format!("pi[{i}]"), "label out of range"));
            }
        }
        if let Some(a) = deg_a.iter().position(|&d| d != self.d_a) {
            return Err(Error::invalid("dA", format!("A-vertex {a} has degree {}", deg_a[a])));
        }
        if let Some(b) = deg_b.iter().position(|&d| d != self.d_b) {
            return Err(Error::invalid("dB", format!("B-vertex {b} has degree {}", deg_b[b])));
        }
        if let Some(phi) = &self.phi {
            if phi.a.len() != self.num_a
                || phi.b.len() != self.num_b
                || phi.a.iter().any(|&l| l >= self.labels_a)
                || phi.b.iter().any(|&l| l >= self.labels_b)
            {
                return Err(Error::invalid("phi", "labeling does not fit the instance"));
            }
        }
        Ok(())
    }

    /// Indices of edges that `phi` leaves inconsistent.
    pub fn inconsistent_edges(&self, phi: &Labeling) -> Vec<usize> {
        self.pi
            .iter()
            .enumerate()
            .filter(|(_, LcEdge(a, b, rel))| !rel.contains(&(phi.a[*a], phi.b[*b])))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Vertex layout of the reduced instance.
struct Layout<'a>(&'a LabelCoverInstance);

impl Layout<'_> {
    const S: usize = 0;
    const T: usize = 1;

    fn a(&self, a: usize) -> usize {
        2 + a
    }

    fn b(&self, b: usize) -> usize {
        2 + self.0.num_a + b
    }

    fn a_label(&self, a: usize, l: usize) -> usize {
        2 + self.0.num_a + self.0.num_b + a * self.0.labels_a + l
    }

    fn b_label(&self, b: usize, l: usize) -> usize {
        2 + self.0.num_a + self.0.num_b + self.0.num_a * self.0.labels_a + b * self.0.labels_b + l
    }

    fn n(&self) -> usize {
        self.b_label(self.0.num_b, 0)
    }

    /// Edge index of `a -> a(l)`.
    fn a_label_edge(&self, a: usize, l: usize) -> usize {
        self.0.num_a + self.0.num_b + a * self.0.labels_a + l
    }

    /// Edge index of `b(l) -> b`.
    fn b_label_edge(&self, b: usize, l: usize) -> usize {
        self.0.num_a + self.0.num_b + self.0.num_a * self.0.labels_a + b * self.0.labels_b + l
    }
}

/// Directed single-pair instance from a label cover: `s -> a` and `b -> t`
/// free with capacities `d_A` and `d_B`; `a -> a(l)` and `b(l) -> b` cost and
/// carry `d_A` (resp. `d_B`); each relation pair gives a free unit edge
/// `a(l_a) -> b(l_b)`. The requirement from `s` to `t` is `m`.
pub fn gen_label_cover_reduction(lc: &LabelCoverInstance) -> Result<Instance> {
    lc.validate()?;
    let at = Layout(lc);
    let (d_a, d_b) = (lc.d_a as u64, lc.d_b as u64);
    let mut edges = Vec::new();
    for a in 0..lc.num_a {
        edges.push(Edge::new(Layout::S, at.a(a), d_a, rational::int(0)));
    }
    for b in 0..lc.num_b {
        edges.push(Edge::new(at.b(b), Layout::T, d_b, rational::int(0)));
    }
    for a in 0..lc.num_a {
        for l in 0..lc.labels_a {
            edges.push(Edge::new(at.a(a), at.a_label(a, l), d_a, rational::uint(d_a)));
        }
    }
    for b in 0..lc.num_b {
        for l in 0..lc.labels_b {
            edges.push(Edge::new(at.b_label(b, l), at.b(b), d_b, rational::uint(d_b)));
        }
    }
    for LcEdge(a, b, rel) in &lc.pi {
        for &(la, lb) in rel {
            edges.push(Edge::new(at.a_label(*a, la), at.b_label(*b, lb), 1, rational::int(0)));
        }
    }
    let size = lc.size();
    if at.n() > size * size || edges.len() > size * size {
        return Err(Error::BoundViolated(format!(
            "reduction has {} vertices and {} edges for a label cover of size {size}",
            at.n(),
            edges.len()
        )));
    }
    Instance::new(
        at.n(),
        true,
        edges,
        Requirements::Pairs(vec![Demand {
            s: Layout::S,
            t: Layout::T,
            r: lc.m() as u64,
        }]),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct YesCertificate {
    pub edges: Vec<usize>,
    #[serde(with = "rational::serde_str")]
    pub cost: Rational,
    #[serde(with = "rational::serde_str")]
    pub flow: Rational,
}

/// Materializes all free edges plus `a -> a(phi(a))` and `phi(b)(b) -> b`,
/// and reports their cost and `s -> t` max flow.
pub fn verify_yes_certificate(inst: &Instance, lc: &LabelCoverInstance, phi: &Labeling) -> Result<YesCertificate> {
    lc.validate()?;
    let check = LabelCoverInstance {
        phi: Some(phi.clone()),
        ..lc.clone()
    };
    check.validate()?;
    let bad = lc.inconsistent_edges(phi);
    if !bad.is_empty() {
        return Err(Error::InconsistentLabeling(bad));
    }
    let expected = gen_label_cover_reduction(lc)?;
    if expected != *inst {
        return Err(Error::invalid("instance", "not the reduction of this label cover"));
    }
    let at = Layout(lc);
    let mut edges: Vec<usize> = (0..inst.m())
        .filter(|&e| inst.edges[e].cost == rational::int(0))
        .collect();
    edges.extend((0..lc.num_a).map(|a| at.a_label_edge(a, phi.a[a])));
    edges.extend((0..lc.num_b).map(|b| at.b_label_edge(b, phi.b[b])));
    edges.sort_unstable();
    let flow = max_flow(inst, &EdgeWeighting::subset_capacities(inst, &edges), Layout::S, Layout::T)?;
    Ok(YesCertificate {
        cost: inst.total_cost(&edges),
        flow: flow.value,
        edges,
    })
}

/// Random Yes-instance: a `(d_A, d_B)`-regular bipartite multigraph with a
/// hidden labeling that satisfies every edge; each relation also gets up to
/// `extra` random pairs.
#[allow(clippy::too_many_arguments)]
pub fn gen_yes_label_cover(
    num_a: usize,
    d_a: usize,
    num_b: usize,
    d_b: usize,
    labels_a: usize,
    labels_b: usize,
    extra: usize,
    seed: u64,
) -> Result<LabelCoverInstance> {
    if num_a * d_a != num_b * d_b {
        return Err(Error::invalid("dA", "|A| dA must equal |B| dB"));
    }
    if labels_a == 0 || labels_b == 0 {
        return Err(Error::invalid("LA", "label sets must be nonempty"));
    }
    let mut rng = seeding::rng(seed);
    let mut stubs: Vec<usize> = (0..num_b).flat_map(|b| std::iter::repeat_n(b, d_b)).collect();
    stubs.shuffle(&mut rng);
    let phi = Labeling {
        a: (0..num_a).map(|_| rng.gen_range(0..labels_a)).collect(),
        b: (0..num_b).map(|_| rng.gen_range(0..labels_b)).collect(),
    };
    let mut pi = Vec::new();
    for (i, &b) in stubs.iter().enumerate() {
        let a = i / d_a.max(1);
        let mut rel = vec![(phi.a[a], phi.b[b])];
        for _ in 0..extra {
            rel.push((rng.gen_range(0..labels_a), rng.gen_range(0..labels_b)));
        }
        rel.sort_unstable();
        rel.dedup();
        pi.push(LcEdge(a, b, rel));
    }
    let lc = LabelCoverInstance {
        num_a,
        num_b,
        d_a,
        d_b,
        labels_a,
        labels_b,
        pi,
        phi: Some(phi),
    };
    lc.validate()?;
    Ok(lc)
}
