//! Selecting a disjoint set of hyperedges that covers every request.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;
use thiserror::Error;

use crate::model::{Instance, RequestId};
use crate::pooling::hyperedge::Hyperedge;

#[derive(Debug, Error)]
pub enum MatchingError {
    #[error("linear program failed: {0}")]
    Lp(String),
}

/// Indices into the edge list; every request is in exactly one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub edges: Vec<usize>,
}

impl Matching {
    pub fn weight(&self, weights: &[f64]) -> f64 {
        self.edges.iter().map(|&e| weights[e]).sum()
    }

    /// Whether the selected edges partition `0..n`.
    pub fn is_partition(&self, edges: &[Hyperedge], n: usize) -> bool {
        let mut seen = vec![false; n];
        for &e in &self.edges {
            for &r in &edges[e].requests {
                if r >= n || std::mem::replace(&mut seen[r], true) {
                    return false;
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// One line per edge: request ids then weight.
    pub fn dump(&self, edges: &[Hyperedge], weights: &[f64]) -> String {
        let mut s = String::new();
        for &e in &self.edges {
            let ids: Vec<String> = edges[e].requests.iter().map(|r| r.to_string()).collect();
            let _ = writeln!(s, "{} {}", ids.join(" "), weights[e]);
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MatchingMethod {
    /// Set-covering relaxation rounded greedily.
    #[default]
    CoverGreedy,
    /// Greedy by weight.
    Greedy,
    /// Set-partitioning relaxation rounded greedily.
    PartitionGreedy,
    /// Set-covering relaxation with randomized rounding and repair.
    CoverRandomized,
}

impl MatchingMethod {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "wsc" | "cover" => Some(MatchingMethod::CoverGreedy),
            "greedy" => Some(MatchingMethod::Greedy),
            "wsp" | "partition" => Some(MatchingMethod::PartitionGreedy),
            "randomized" | "random" => Some(MatchingMethod::CoverRandomized),
            _ => None,
        }
    }
}

/// Fractional solution of the weighted set-covering (`partition = false`)
/// or set-partitioning relaxation, maximizing total weight.
#[derive(Clone, Debug)]
pub struct Relaxation {
    pub x: Vec<f64>,
    pub objective: f64,
}

pub fn solve_relaxation(
    edges: &[Hyperedge],
    weights: &[f64],
    n: usize,
    partition: bool,
) -> Result<Relaxation, MatchingError> {
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = weights.iter().map(|&w| lp.add_var(w, (0.0, 1.0))).collect();
    let mut rows: Vec<Vec<(minilp::Variable, f64)>> = vec![Vec::new(); n];
    for (e, edge) in edges.iter().enumerate() {
        for &r in &edge.requests {
            rows[r].push((vars[e], 1.0));
        }
    }
    let op = if partition { ComparisonOp::Eq } else { ComparisonOp::Ge };
    for row in rows {
        lp.add_constraint(row.as_slice(), op, 1.0);
    }
    let sol = lp.solve().map_err(|e| MatchingError::Lp(e.to_string()))?;
    let x = vars.iter().map(|&v| sol[v].clamp(0.0, 1.0)).collect();
    Ok(Relaxation { x, objective: sol.objective() })
}

fn cmp_ids(a: &Hyperedge, b: &Hyperedge) -> Ordering {
    a.requests.cmp(&b.requests)
}

fn greedy_in_order(order: impl IntoIterator<Item = usize>, edges: &[Hyperedge], n: usize) -> Matching {
    let mut covered = vec![false; n];
    let mut left = n;
    let mut chosen = Vec::new();
    for e in order {
        if left == 0 {
            break;
        }
        if edges[e].requests.iter().any(|&r| covered[r]) {
            continue;
        }
        for &r in &edges[e].requests {
            covered[r] = true;
        }
        left -= edges[e].len();
        chosen.push(e);
    }
    complete_with_singletons(chosen, &covered, edges)
}

fn complete_with_singletons(mut chosen: Vec<usize>, covered: &[bool], edges: &[Hyperedge]) -> Matching {
    if covered.iter().any(|c| !c) {
        let single = singleton_lookup(edges);
        for (r, _) in covered.iter().enumerate().filter(|(_, &c)| !c) {
            chosen.push(single[&r]);
        }
    }
    Matching { edges: chosen }
}

fn singleton_lookup(edges: &[Hyperedge]) -> HashMap<RequestId, usize> {
    edges.iter().enumerate().filter(|(_, e)| e.len() == 1).map(|(i, e)| (e.requests[0], i)).collect()
}

/// Edges by descending x, then descending weight, then ascending ids; an
/// edge is taken when disjoint from those already taken.
pub fn greedy_round(x: &[f64], weights: &[f64], edges: &[Hyperedge], n: usize) -> Matching {
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|&a, &b| {
        x[b].total_cmp(&x[a]).then(weights[b].total_cmp(&weights[a])).then_with(|| cmp_ids(&edges[a], &edges[b]))
    });
    greedy_in_order(order, edges, n)
}

/// Edges by descending weight, ties by ids.
pub fn greedy_match(weights: &[f64], edges: &[Hyperedge], n: usize) -> Matching {
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then_with(|| cmp_ids(&edges[a], &edges[b])));
    greedy_in_order(order, edges, n)
}

/// Picks each edge with probability `x`; a request covered several times
/// stays only in the chosen edge of highest weight (random among ties). An
/// edge that loses requests is replaced by the edge of its remaining
/// requests when one exists, and dissolved into singletons otherwise.
pub fn randomized_round<R: Rng>(x: &[f64], weights: &[f64], edges: &[Hyperedge], n: usize, rng: &mut R) -> Matching {
    let picked: Vec<usize> = (0..edges.len()).filter(|&e| rng.gen::<f64>() < x[e]).collect();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut ties: Vec<u32> = vec![0; n];
    for &e in &picked {
        for &r in &edges[e].requests {
            match owner[r] {
                None => {
                    owner[r] = Some(e);
                    ties[r] = 1;
                }
                Some(o) => match weights[e].total_cmp(&weights[o]) {
                    Ordering::Greater => {
                        owner[r] = Some(e);
                        ties[r] = 1;
                    }
                    Ordering::Equal => {
                        ties[r] += 1;
                        if rng.gen_range(0..ties[r]) == 0 {
                            owner[r] = Some(e);
                        }
                    }
                    Ordering::Less => {}
                },
            }
        }
    }
    let by_key: HashMap<&[RequestId], usize> =
        edges.iter().enumerate().map(|(i, e)| (e.requests.as_slice(), i)).collect();
    let mut covered = vec![false; n];
    let mut chosen = Vec::new();
    for &e in &picked {
        let kept: Vec<RequestId> = edges[e].requests.iter().copied().filter(|&r| owner[r] == Some(e)).collect();
        if kept.is_empty() {
            continue;
        }
        if let Some(&f) = by_key.get(kept.as_slice()) {
            chosen.push(f);
            for r in kept {
                covered[r] = true;
            }
        }
    }
    complete_with_singletons(chosen, &covered, edges)
}

/// Runs a matching method over edges that include every singleton.
pub fn run_matching<R: Rng>(
    method: MatchingMethod,
    edges: &[Hyperedge],
    weights: &[f64],
    inst: &Instance,
    rng: &mut R,
) -> Result<Matching, MatchingError> {
    let n = inst.num_requests();
    Ok(match method {
        MatchingMethod::Greedy => greedy_match(weights, edges, n),
        MatchingMethod::CoverGreedy => {
            let lp = solve_relaxation(edges, weights, n, false)?;
            greedy_round(&lp.x, weights, edges, n)
        }
        MatchingMethod::PartitionGreedy => {
            let lp = solve_relaxation(edges, weights, n, true)?;
            greedy_round(&lp.x, weights, edges, n)
        }
        MatchingMethod::CoverRandomized => {
            let lp = solve_relaxation(edges, weights, n, false)?;
            randomized_round(&lp.x, weights, edges, n, rng)
        }
    })
}
