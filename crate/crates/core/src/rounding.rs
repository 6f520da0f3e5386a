//! Randomized rounding of a good fractional solution.
//!
//! Nearly-integral edges are always kept; every other edge is sampled
//! independently with probability `min(1, scale · x_e)`. A failed feasibility
//! check triggers a retry on a derived seed, up to [`MAX_ATTEMPTS`] times.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::RngCore;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Instance;
use crate::kc::{variant_feasible, FractionalSolution, Variant};
use crate::rational::{self, Rational};
use crate::seeding;

pub const MAX_ATTEMPTS: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Attempt {
    pub seed: u64,
    pub selected: usize,
    #[serde(with = "rational::serde_str")]
    pub cost: Rational,
    pub feasible: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundingReport {
    pub variant: String,
    pub seed: u64,
    #[serde(with = "rational::serde_str")]
    pub scale: Rational,
    /// `E_A = A_x ∪ F*`, sorted.
    pub selected: Vec<usize>,
    pub nearly_integral: Vec<usize>,
    #[serde(with = "rational::serde_str")]
    pub cost: Rational,
    pub attempts: usize,
    pub trace: Vec<Attempt>,
    /// False when feasibility was checked against a heuristic cut family.
    pub exact_check: bool,
}

/// `Σ_e min(1, scale · x_e) · c(e)`, the exact expected sampled cost.
pub fn expected_cost_bound(inst: &Instance, sol: &FractionalSolution) -> Rational {
    inst.edges
        .iter()
        .zip(&sol.x)
        .fold(Rational::zero(), |acc, (e, x)| {
            acc + rational::min_rat(&Rational::one(), &(&sol.scale * x)) * &e.cost
        })
}

/// True with probability exactly `p` (clamped to `[0, 1]`), using one
/// 64-bit draw: `u < p · 2^64`.
fn bernoulli(rng: &mut impl RngCore, p: &Rational) -> bool {
    let u = rng.next_u64();
    if *p >= Rational::one() {
        return true;
    }
    BigInt::from(u) * p.denom() < (p.numer() << 64)
}

/// One sampling pass; the edge set is sorted.
pub fn sample(sol: &FractionalSolution, seed: u64) -> Vec<usize> {
    let mut rng = seeding::rng(seed);
    let mut out = Vec::new();
    for (e, x) in sol.x.iter().enumerate() {
        if *x >= sol.threshold {
            out.push(e);
            continue;
        }
        if bernoulli(&mut rng, &(&sol.scale * x)) {
            out.push(e);
        }
    }
    out
}

/// Seed of attempt `t` under master seed `seed`.
pub fn attempt_seed(seed: u64, t: usize) -> u64 {
    seeding::derive_seed(seed, t as u64)
}

pub fn round(inst: &Instance, sol: &FractionalSolution, variant: &Variant, seed: u64) -> Result<RoundingReport> {
    if matches!(variant, Variant::Pairs) {
        return Err(Error::Unsupported("rounding for general pair requirements".into()));
    }
    if sol.x.len() != inst.m() {
        return Err(Error::invalid("x", format!("expected {} values, got {}", inst.m(), sol.x.len())));
    }
    if sol.threshold != variant.threshold(inst) || sol.scale != variant.scale(inst) {
        return Err(Error::invalid(
            "x.threshold",
            format!("solution thresholds do not match the {} variant", variant.name()),
        ));
    }
    let mut trace = Vec::new();
    let mut exact_check = true;
    for t in 0..MAX_ATTEMPTS {
        let s = attempt_seed(seed, t);
        let selected = sample(sol, s);
        let report = variant_feasible(inst, variant, &selected)?;
        exact_check &= report.exact;
        let cost = inst.total_cost(&selected);
        trace.push(Attempt {
            seed: s,
            selected: selected.len(),
            cost: cost.clone(),
            feasible: report.feasible,
            witness: report.witness.as_ref().map(|w| w.describe()),
        });
        if report.feasible {
            return Ok(RoundingReport {
                variant: variant.name().into(),
                seed,
                scale: sol.scale.clone(),
                selected,
                nearly_integral: sol.nearly_integral(),
                cost,
                attempts: t + 1,
                trace,
                exact_check,
            });
        }
        log::debug!("rounding attempt {t} infeasible");
    }
    Err(Error::RoundingFailed {
        attempts: MAX_ATTEMPTS,
        witnesses: trace.into_iter().filter_map(|a| a.witness).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Requirements};
    use crate::kc::solve_good;
    use crate::rational::{int, ratio};

    fn example1() -> Instance {
        Instance::new(
            3,
            false,
            vec![
                Edge::new(0, 1, 10, int(0)),
                Edge::new(1, 2, 9, int(0)),
                Edge::new(0, 2, 10, int(100)),
            ],
            Requirements::Uniform(10),
        )
        .unwrap()
    }

    #[test]
    fn example1_rounds_to_all_edges() {
        let inst = example1();
        let good = solve_good(&inst, &Variant::Uniform, 0).unwrap();
        let report = round(&inst, &good.solution, &Variant::Uniform, 9).unwrap();
        assert_eq!(report.selected, vec![0, 1, 2]);
        assert_eq!(report.cost, int(100));
        assert_eq!(report.attempts, 1);
    }

    #[test]
    fn integral_x_gives_its_support() {
        let inst = example1();
        let sol = FractionalSolution::new(&inst, &Variant::Uniform, vec![int(1), int(0), int(1)]).unwrap();
        let report = round(&inst, &sol, &Variant::Uniform, 1).unwrap();
        assert_eq!(report.selected, vec![0, 2]);
        assert_eq!(report.attempts, 1);
        assert_eq!(expected_cost_bound(&inst, &sol), int(100));
    }

    #[test]
    fn half_probability_edge_expectation() {
        let inst = Instance::new(
            4,
            false,
            vec![Edge::new(0, 1, 1, int(1)), Edge::new(1, 2, 1, int(0)), Edge::new(2, 3, 1, int(0))],
            Requirements::Uniform(1),
        )
        .unwrap();
        // n = 4: scale = 80, so x = 1/160 samples with probability 1/2.
        let sol = FractionalSolution::new(&inst, &Variant::Uniform, vec![ratio(1, 160), int(1), int(1)]).unwrap();
        assert_eq!(expected_cost_bound(&inst, &sol), ratio(1, 2));
        let hits = (0..2000).filter(|&s| sample(&sol, s).contains(&0)).count();
        assert!((900..1100).contains(&hits), "{hits}");
    }

    #[test]
    fn mismatched_threshold_rejected() {
        let inst = example1();
        let sol = FractionalSolution::new(&inst, &Variant::NearUniform { gamma: int(2) }, vec![int(1); 3]).unwrap();
        assert!(round(&inst, &sol, &Variant::Uniform, 0).is_err());
    }

    #[test]
    fn rounding_is_deterministic() {
        let inst = example1();
        let sol = FractionalSolution::new(&inst, &Variant::Uniform, vec![int(1), int(1), ratio(1, 1000)]).unwrap();
        let a = round(&inst, &sol, &Variant::Uniform, 5);
        let b = round(&inst, &sol, &Variant::Uniform, 5);
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}
