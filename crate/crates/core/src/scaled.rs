//! Integer images of rational weightings for the exhaustive enumerators.
//!
//! Multiplying every weight by the lcm of the denominators gives integers;
//! when those fit in `i128` (with headroom for the full sum) the inner loops
//! run on machine integers, otherwise they fall back to exact rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::graph::EdgeWeighting;
use crate::rational::Rational;

pub(crate) enum Scaled {
    Int { values: Vec<i128>, denom: BigInt },
    Exact(Vec<Rational>),
}

impl Scaled {
    pub fn new(w: &EdgeWeighting) -> Self {
        let denom = w
            .values
            .iter()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let mut values = Vec::with_capacity(w.values.len());
        let mut total: i128 = 0;
        for q in &w.values {
            let v = (q.numer() * (&denom / q.denom())).to_i128();
            match v.and_then(|v| total.checked_add(v).map(|t| (v, t))) {
                Some((v, t)) if t < i128::MAX / 4 => {
                    total = t;
                    values.push(v);
                }
                _ => return Scaled::Exact(w.values.clone()),
            }
        }
        Scaled::Int { values, denom }
    }

    /// Sum of the weights of `edges` as a comparable scaled value.
    pub fn sum(&self, edges: impl Iterator<Item = usize>) -> Value {
        match self {
            Scaled::Int { values, .. } => Value::Int(edges.map(|e| values[e]).sum()),
            Scaled::Exact(values) => Value::Exact(
                edges.fold(Rational::zero(), |acc, e| acc + &values[e]),
            ),
        }
    }

    pub fn to_rational(&self, v: &Value) -> Rational {
        match (self, v) {
            (Scaled::Int { denom, .. }, Value::Int(x)) => {
                Rational::new(BigInt::from(*x), denom.clone())
            }
            (_, Value::Exact(q)) => q.clone(),
            _ => unreachable!("value from a different scaling"),
        }
    }

    /// Scaled image of a rational bound, rounded down (exact for the
    /// comparisons `value <= bound` since values are integers).
    pub fn bound(&self, q: &Rational) -> Value {
        match self {
            Scaled::Int { denom, .. } => {
                let scaled = (q * Rational::from_integer(denom.clone())).floor().to_integer();
                Value::Int(scaled.to_i128().unwrap_or(if scaled > BigInt::zero() {
                    i128::MAX
                } else {
                    i128::MIN
                }))
            }
            Scaled::Exact(_) => Value::Exact(q.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Value {
    Int(i128),
    Exact(Rational),
}
