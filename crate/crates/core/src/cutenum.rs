//! Enumeration of near-minimum cuts and near-minimum multiway cuts.
//!
//! Small graphs (at most [`EXHAUSTIVE_LIMIT`] vertices) are enumerated
//! exhaustively. Larger graphs, or callers that force it, use repeated
//! seeded random contraction: each run contracts the graph down to
//! `ceil(2α)` super-vertices and records every bipartition of what is left.
//! A fixed α-mincut survives one run with probability at least `n^{-2α}`, so
//! `ceil(n^{2α} ln(n^4 · n^{2α}))` runs miss any given α-mincut with
//! probability at most `n^{-4}` after a union bound over the pool.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::flow::global_min_cut;
use crate::graph::{Cut, EdgeWeighting, Instance, VertexSet};
use crate::partition::{for_each_partition, KWayCut, EXACT_PARTITION_LIMIT};
use crate::rational::{self, Rational};
use crate::scaled::Scaled;
use crate::seeding;

/// Largest vertex count enumerated exhaustively (`2^15` canonical cuts).
pub const EXHAUSTIVE_LIMIT: usize = 16;

#[derive(Clone, Debug, Default)]
pub struct EnumOptions {
    /// Use contraction even when exhaustive enumeration is possible.
    pub force_randomized: bool,
    /// Permit contraction for multiway cuts on more than ten vertices.
    pub allow_randomized_kway: bool,
    /// Upper limit on contraction runs; hitting it clears `complete`.
    pub max_runs: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnumMethod {
    Exhaustive,
    Contraction { runs: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct CutPool {
    pub cuts: Vec<Cut>,
    #[serde(with = "rational::serde_str")]
    pub alpha: Rational,
    #[serde(with = "rational::serde_str")]
    pub min_cut_value: Rational,
    pub complete: bool,
    pub method: EnumMethod,
}

impl CutPool {
    /// Vertex subsets of the pool, for debugging dumps.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.cuts
                .iter()
                .map(|c| serde_json::json!(c.side.to_vec()))
                .collect(),
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KWayCutPool {
    pub cuts: Vec<KWayCut>,
    pub parts: usize,
    #[serde(with = "rational::serde_str")]
    pub alpha: Rational,
    #[serde(with = "rational::serde_str")]
    pub min_cut_value: Rational,
    pub complete: bool,
    pub method: EnumMethod,
}

/// `n^{2α}`, the α-mincut count bound.
pub fn cut_count_bound(n: usize, alpha: &Rational) -> f64 {
    (n as f64).powf(2.0 * rational::to_f64(alpha))
}

/// `n^{2α(parts-1)}`, the multiway analog.
pub fn kway_count_bound(n: usize, alpha: &Rational, parts: usize) -> f64 {
    (n as f64).powf(2.0 * rational::to_f64(alpha) * (parts as f64 - 1.0))
}

fn within_bound(count: usize, bound: f64) -> bool {
    (count as f64) <= bound.ceil() * (1.0 + 1e-12)
}

fn check_undirected(inst: &Instance, w: &EdgeWeighting, alpha: &Rational) -> Result<()> {
    w.check_len(inst)?;
    if inst.directed {
        return Err(Error::Unsupported("cut enumeration on a directed instance".into()));
    }
    if inst.n < 2 {
        return Err(Error::invalid("n", "cut enumeration needs two vertices"));
    }
    if *alpha < Rational::one() {
        return Err(Error::invalid("alpha", "must be at least 1"));
    }
    Ok(())
}

/// All cuts with capacity at most `alpha` times the minimum cut.
pub fn enumerate_near_min_cuts(
    inst: &Instance,
    w: &EdgeWeighting,
    alpha: &Rational,
    seed: u64,
) -> Result<CutPool> {
    enumerate_near_min_cuts_with(inst, w, alpha, seed, &EnumOptions::default())
}

pub fn enumerate_near_min_cuts_with(
    inst: &Instance,
    w: &EdgeWeighting,
    alpha: &Rational,
    seed: u64,
    opts: &EnumOptions,
) -> Result<CutPool> {
    check_undirected(inst, w, alpha)?;
    let scaled = Scaled::new(w);
    let (sides, min_value, complete, method) =
        if inst.n <= EXHAUSTIVE_LIMIT && !opts.force_randomized {
            let all = exhaustive_values(inst, &scaled);
            let min = all.iter().map(|(_, v)| v).min().cloned().expect("n >= 2");
            let min_q = scaled.to_rational(&min);
            if min_q.is_zero() {
                return Err(Error::Disconnected {
                    label: w.label.clone(),
                });
            }
            let bound = scaled.bound(&(alpha * &min_q));
            let sides: Vec<VertexSet> = all
                .into_iter()
                .filter(|(_, v)| *v <= bound)
                .map(|(mask, _)| VertexSet::from_mask(inst.n, mask))
                .collect();
            (sides, min_q, true, EnumMethod::Exhaustive)
        } else {
            let min_q = global_min_cut(inst, w)?.capacity;
            if min_q.is_zero() {
                return Err(Error::Disconnected {
                    label: w.label.clone(),
                });
            }
            let (sides, runs, complete) = contraction_cuts(inst, w, &scaled, alpha, &min_q, seed, opts);
            (sides, min_q, complete, EnumMethod::Contraction { runs })
        };
    let mut cuts: Vec<Cut> = sides
        .into_iter()
        .map(|s| Cut::new(inst, s, w))
        .collect::<Result<_>>()?;
    cuts.sort_by(|a, b| a.side.cmp(&b.side));
    let bound = cut_count_bound(inst.n, alpha);
    if !within_bound(cuts.len(), bound) {
        return Err(Error::BoundViolated(format!(
            "{} α-mincuts exceed n^(2α) = {bound:.1}",
            cuts.len()
        )));
    }
    Ok(CutPool {
        cuts,
        alpha: alpha.clone(),
        min_cut_value: min_value,
        complete,
        method,
    })
}

/// Every cut with capacity at most `bound`. Empty when `bound` is below the
/// minimum cut; otherwise delegates with `alpha = bound / mincut`.
pub fn cuts_within(
    inst: &Instance,
    w: &EdgeWeighting,
    bound: &Rational,
    seed: u64,
) -> Result<CutPool> {
    let min = if inst.n <= EXHAUSTIVE_LIMIT {
        let scaled = Scaled::new(w);
        let min = exhaustive_values(inst, &scaled)
            .into_iter()
            .map(|(_, v)| v)
            .min()
            .expect("n >= 2");
        scaled.to_rational(&min)
    } else {
        global_min_cut(inst, w)?.capacity
    };
    if min.is_zero() {
        return Err(Error::Disconnected {
            label: w.label.clone(),
        });
    }
    if *bound < min {
        return Ok(CutPool {
            cuts: Vec::new(),
            alpha: Rational::one(),
            min_cut_value: min,
            complete: true,
            method: EnumMethod::Exhaustive,
        });
    }
    enumerate_near_min_cuts(inst, w, &(bound / &min), seed)
}

/// (mask, capacity) of every canonical cut; vertex 0 is never in the mask.
pub(crate) fn exhaustive_values(inst: &Instance, scaled: &Scaled) -> Vec<(u64, crate::scaled::Value)> {
    assert!(inst.n <= 63);
    let ends: Vec<(u64, u64)> = inst
        .edges
        .iter()
        .map(|e| (1u64 << e.tail, 1u64 << e.head))
        .collect();
    let count = 1u64 << (inst.n - 1);
    (1..count)
        .map(|m| {
            let mask = m << 1;
            let v = scaled.sum(
                ends.iter()
                    .enumerate()
                    .filter(|(_, (a, b))| (mask & a == 0) != (mask & b == 0))
                    .map(|(i, _)| i),
            );
            (mask, v)
        })
        .collect()
}

fn contraction_runs(n: usize, exponent: f64) -> u64 {
    let n = n as f64;
    let base = n.powf(exponent);
    (base * (n.powi(4) * base).ln()).ceil().max(1.0) as u64
}

/// Contracts along exponential-clock keys until `target` super-vertices
/// remain; equivalent to repeatedly contracting a weight-proportional edge.
/// Zero-weight edges never contract. Returns the super-vertex label of every
/// vertex.
fn contract(inst: &Instance, weights: &[f64], target: usize, seed: u64) -> Vec<usize> {
    let mut rng = seeding::rng(seed);
    let mut keyed: Vec<(f64, usize)> = weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(i, &w)| {
            let u: f64 = 1.0 - rng.gen::<f64>();
            (-u.ln() / w, i)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut dsu = DisjointSets::new(inst.n);
    for (_, i) in keyed {
        if dsu.count() <= target {
            break;
        }
        let e = &inst.edges[i];
        dsu.union(e.tail, e.head);
    }
    let mut label = vec![usize::MAX; inst.n];
    let mut next = 0;
    let roots: Vec<usize> = (0..inst.n).map(|v| dsu.find(v)).collect();
    let mut root_label = vec![usize::MAX; inst.n];
    for v in 0..inst.n {
        let r = roots[v];
        if root_label[r] == usize::MAX {
            root_label[r] = next;
            next += 1;
        }
        label[v] = root_label[r];
    }
    label
}

fn contraction_cuts(
    inst: &Instance,
    w: &EdgeWeighting,
    scaled: &Scaled,
    alpha: &Rational,
    min: &Rational,
    seed: u64,
    opts: &EnumOptions,
) -> (Vec<VertexSet>, u64, bool) {
    let target = ((2.0 * rational::to_f64(alpha)).ceil() as usize).clamp(2, inst.n);
    let wanted = contraction_runs(inst.n, 2.0 * rational::to_f64(alpha));
    let runs = opts.max_runs.map_or(wanted, |cap| wanted.min(cap));
    let weights: Vec<f64> = w.values.iter().map(rational::to_f64).collect();
    let bound = scaled.bound(&(alpha * min));
    let found: BTreeSet<VertexSet> = (0..runs)
        .into_par_iter()
        .map(|run| {
            let label = contract(inst, &weights, target, seeding::derive_seed(seed, run));
            let supers = label.iter().max().map_or(0, |m| m + 1);
            let mut local = Vec::new();
            // Bipartitions of the super-vertices with super-vertex 0 fixed.
            for bits in 1u64..(1u64 << (supers - 1)) {
                let side_bits = bits << 1;
                let side = VertexSet::from_vertices(
                    inst.n,
                    (0..inst.n).filter(|&v| side_bits & (1 << label[v]) != 0),
                );
                let crossing = inst.crossing(&side);
                if scaled.sum(crossing.into_iter()) <= bound {
                    local.push(side);
                }
            }
            local
        })
        .flatten()
        .collect();
    (found.into_iter().collect(), runs, runs == wanted)
}

/// All `parts`-way cuts with capacity at most `alpha` times the minimum
/// `parts`-way cut. Exhaustive up to ten vertices; beyond that only with
/// [`EnumOptions::allow_randomized_kway`], in which case the minimum is the
/// best cut seen and the pool is marked incomplete.
pub fn enumerate_near_min_kway_cuts(
    inst: &Instance,
    w: &EdgeWeighting,
    parts: usize,
    alpha: &Rational,
    seed: u64,
    opts: &EnumOptions,
) -> Result<KWayCutPool> {
    check_undirected(inst, w, alpha)?;
    if parts < 2 || parts > inst.n {
        return Err(Error::invalid("parts", format!("need 2 <= parts <= n, got {parts}")));
    }
    let scaled = Scaled::new(w);
    let (labelings, min_q, complete, method) = if inst.n <= EXACT_PARTITION_LIMIT {
        let mut all = Vec::new();
        for_each_partition(inst.n, parts, |labels| {
            let v = scaled.sum(crossing_iter(inst, labels));
            all.push((labels.to_vec(), v));
        });
        let min = all.iter().map(|(_, v)| v).min().cloned().expect("parts <= n");
        let min_q = scaled.to_rational(&min);
        let bound = scaled.bound(&(alpha * &min_q));
        let picked: Vec<Vec<usize>> = all
            .into_iter()
            .filter(|(_, v)| *v <= bound)
            .map(|(l, _)| l)
            .collect();
        (picked, min_q, true, EnumMethod::Exhaustive)
    } else if opts.allow_randomized_kway {
        let (picked, min_q, runs) = contraction_kway(inst, w, &scaled, parts, alpha, seed, opts);
        (picked, min_q, false, EnumMethod::Contraction { runs })
    } else {
        return Err(Error::Capability(format!(
            "exact {parts}-way cut enumeration is limited to {EXACT_PARTITION_LIMIT} vertices (n = {})",
            inst.n
        )));
    };
    if global_min_cut(inst, w)?.capacity.is_zero() {
        return Err(Error::Disconnected {
            label: w.label.clone(),
        });
    }
    let mut cuts: Vec<KWayCut> = labelings
        .iter()
        .map(|l| KWayCut::new(inst, l, w))
        .collect::<Result<_>>()?;
    cuts.sort_by(|a, b| a.labels.cmp(&b.labels));
    cuts.dedup_by(|a, b| a.labels == b.labels);
    let bound = kway_count_bound(inst.n, alpha, parts);
    if !within_bound(cuts.len(), bound) {
        return Err(Error::BoundViolated(format!(
            "{} near-minimum {parts}-way cuts exceed n^(2α(k-1)) = {bound:.1}",
            cuts.len()
        )));
    }
    Ok(KWayCutPool {
        cuts,
        parts,
        alpha: alpha.clone(),
        min_cut_value: min_q,
        complete,
        method,
    })
}

pub(crate) fn crossing_iter<'a>(inst: &'a Instance, labels: &'a [usize]) -> impl Iterator<Item = usize> + 'a {
    inst.edges
        .iter()
        .enumerate()
        .filter(move |(_, e)| labels[e.tail] != labels[e.head])
        .map(|(i, _)| i)
}

fn contraction_kway(
    inst: &Instance,
    w: &EdgeWeighting,
    scaled: &Scaled,
    parts: usize,
    alpha: &Rational,
    seed: u64,
    opts: &EnumOptions,
) -> (Vec<Vec<usize>>, Rational, u64) {
    let exponent = 2.0 * rational::to_f64(alpha) * (parts as f64 - 1.0);
    let target = (exponent.ceil() as usize).clamp(parts, EXACT_PARTITION_LIMIT.min(inst.n));
    let wanted = contraction_runs(inst.n, exponent);
    let runs = wanted.min(opts.max_runs.unwrap_or(20_000));
    let weights: Vec<f64> = w.values.iter().map(rational::to_f64).collect();
    let candidates: BTreeSet<(crate::scaled::Value, Vec<usize>)> = (0..runs)
        .into_par_iter()
        .map(|run| {
            let label = contract(inst, &weights, target, seeding::derive_seed(seed, run));
            let supers = label.iter().max().map_or(0, |m| m + 1);
            let mut local = Vec::new();
            for_each_partition(supers, parts, |sup| {
                let labels: Vec<usize> =
                    crate::partition::canonical_labels(&label.iter().map(|&s| sup[s]).collect::<Vec<_>>());
                let v = scaled.sum(crossing_iter(inst, &labels));
                local.push((v, labels));
            });
            local
        })
        .flatten()
        .collect();
    let min = candidates.iter().next().map(|(v, _)| v.clone());
    let Some(min) = min else {
        return (Vec::new(), Rational::zero(), runs);
    };
    let min_q = scaled.to_rational(&min);
    let bound = scaled.bound(&(alpha * &min_q));
    let picked = candidates
        .into_iter()
        .filter(|(v, _)| *v <= bound)
        .map(|(_, l)| l)
        .collect();
    (picked, min_q, runs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Requirements};
    use crate::rational::int;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Instance {
        Instance::new(
            n,
            false,
            edges.iter().map(|&(a, b)| Edge::new(a, b, 1, int(0))).collect(),
            Requirements::Uniform(1),
        )
        .unwrap()
    }

    #[test]
    fn four_cycle_has_six_min_cuts() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let pool = enumerate_near_min_cuts(&g, &EdgeWeighting::unit(&g), &int(1), 0).unwrap();
        assert_eq!(pool.cuts.len(), 6);
        assert_eq!(pool.min_cut_value, int(2));
        assert!(pool.complete);
    }

    #[test]
    fn single_edge_single_cut() {
        let g = graph(2, &[(0, 1)]);
        for a in [1, 3] {
            let pool = enumerate_near_min_cuts(&g, &EdgeWeighting::unit(&g), &int(a), 0).unwrap();
            assert_eq!(pool.cuts.len(), 1);
        }
    }

    #[test]
    fn disconnected_is_an_error() {
        let g = graph(4, &[(0, 1), (2, 3)]);
        let err = enumerate_near_min_cuts(&g, &EdgeWeighting::unit(&g), &int(1), 0).unwrap_err();
        assert!(matches!(err, Error::Disconnected { .. }));
    }

    #[test]
    fn randomized_four_cycle() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let opts = EnumOptions {
            force_randomized: true,
            ..Default::default()
        };
        let pool = enumerate_near_min_cuts_with(&g, &EdgeWeighting::unit(&g), &int(1), 3, &opts).unwrap();
        assert_eq!(pool.cuts.len(), 6);
        assert!(matches!(pool.method, EnumMethod::Contraction { .. }));
    }

    #[test]
    fn triangle_three_way() {
        let g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let pool =
            enumerate_near_min_kway_cuts(&g, &EdgeWeighting::unit(&g), 3, &int(1), 0, &EnumOptions::default())
                .unwrap();
        assert_eq!(pool.cuts.len(), 1);
        assert_eq!(pool.cuts[0].capacity, int(3));
    }

    #[test]
    fn path_three_way() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let pool =
            enumerate_near_min_kway_cuts(&g, &EdgeWeighting::unit(&g), 3, &int(1), 0, &EnumOptions::default())
                .unwrap();
        assert_eq!(pool.cuts.len(), 1);
        assert_eq!(pool.cuts[0].capacity, int(2));
    }

    #[test]
    fn large_kway_needs_randomized_mode() {
        let n = 11;
        let edges: Vec<(usize, usize)> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        let g = graph(n, &edges);
        let err =
            enumerate_near_min_kway_cuts(&g, &EdgeWeighting::unit(&g), 3, &int(1), 0, &EnumOptions::default())
                .unwrap_err();
        assert!(matches!(err, Error::Capability(_)));
        let opts = EnumOptions {
            allow_randomized_kway: true,
            max_runs: Some(3000),
            ..Default::default()
        };
        let pool = enumerate_near_min_kway_cuts(&g, &EdgeWeighting::unit(&g), 3, &int(1), 5, &opts).unwrap();
        // Minimum 3-way cuts of an 11-cycle: choose 3 of 11 edges.
        assert_eq!(pool.min_cut_value, int(3));
        assert!(!pool.complete);
        assert!(pool.cuts.len() <= 165);
    }
}
