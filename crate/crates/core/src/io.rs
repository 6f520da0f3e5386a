//! JSON instance format.
//!
//! ```json
//! {"n": 3, "directed": false,
//!  "edges": [[0, 1, 10, 0, 1], [1, 2, 9, 0, 1], [0, 2, 10, 100, 1]],
//!  "requirements": {"kind": "uniform", "R": 10}}
//! ```
//!
//! Edges are `[tail, head, capacity, cost_num, cost_den]`; their order in
//! the file fixes the edge indices used everywhere else.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Demand, Edge, Instance, Requirements};
use crate::rational::Rational;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    n: usize,
    directed: bool,
    edges: Vec<(usize, usize, u64, i64, i64)>,
    requirements: RawRequirements,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawRequirements {
    Uniform {
        #[serde(rename = "R")]
        r: u64,
    },
    Kway {
        #[serde(rename = "Rs")]
        rs: Vec<u64>,
    },
    Pairs {
        pairs: Vec<(usize, usize, u64)>,
    },
}

pub fn parse_instance(bytes: &[u8]) -> Result<Instance> {
    let raw: RawInstance = serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
    let mut edges = Vec::with_capacity(raw.edges.len());
    for (i, (tail, head, cap, num, den)) in raw.edges.into_iter().enumerate() {
        if den <= 0 {
            return Err(Error::invalid(
                format!("edges[{i}].cost_den"),
                "denominator must be positive",
            ));
        }
        edges.push(Edge::new(
            tail,
            head,
            cap,
            Rational::new(BigInt::from(num), BigInt::from(den)),
        ));
    }
    let requirements = match raw.requirements {
        RawRequirements::Uniform { r } => Requirements::Uniform(r),
        RawRequirements::Kway { rs } => Requirements::KWay(rs),
        RawRequirements::Pairs { pairs } => Requirements::Pairs(
            pairs
                .into_iter()
                .map(|(s, t, r)| Demand { s, t, r })
                .collect(),
        ),
    };
    Instance::new(raw.n, raw.directed, edges, requirements)
}

pub fn serialize_instance(inst: &Instance) -> Result<Vec<u8>> {
    let mut edges = Vec::with_capacity(inst.m());
    for (i, e) in inst.edges.iter().enumerate() {
        let num = e.cost.numer().to_i64();
        let den = e.cost.denom().to_i64();
        match (num, den) {
            (Some(num), Some(den)) => edges.push((e.tail, e.head, e.capacity, num, den)),
            _ => {
                return Err(Error::invalid(
                    format!("edges[{i}].cost"),
                    "cost does not fit the 64-bit JSON encoding",
                ))
            }
        }
    }
    let requirements = match &inst.requirements {
        Requirements::Uniform(r) => RawRequirements::Uniform { r: *r },
        Requirements::KWay(rs) => RawRequirements::Kway { rs: rs.clone() },
        Requirements::Pairs(pairs) => RawRequirements::Pairs {
            pairs: pairs.iter().map(|d| (d.s, d.t, d.r)).collect(),
        },
    };
    let raw = RawInstance {
        n: inst.n,
        directed: inst.directed,
        edges,
        requirements,
    };
    let mut out = serde_json::to_vec(&raw).map_err(|e| Error::Parse(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}
