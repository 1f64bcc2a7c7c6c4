//! k vertex-disjoint shortest source-sink paths.
//!
//! Every vehicle and block vertex is split into an in and an out half joined
//! by a unit-capacity arc, which turns vertex-disjointness into
//! arc-disjointness. Paths are then added one at a time along shortest
//! augmenting paths in the residual graph: Bellman-Ford supplies the initial
//! potentials (weights may be negative), and each later search is a Dijkstra
//! run on potential-reduced, non-negative weights.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::dispatch::graph::{DispatchGraph, SINK, SOURCE};

#[derive(Debug, Error)]
pub enum KdspError {
    #[error("only {found} disjoint paths exist, {wanted} requested")]
    TooFewPaths { found: usize, wanted: usize },
    #[error("negative cycle in dispatching graph")]
    NegativeCycle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSet {
    /// Graph vertices of each path between source and sink, first vertex a
    /// vehicle. Ordered by vehicle vertex.
    pub paths: Vec<Vec<usize>>,
    pub total_weight: i64,
}

#[derive(Clone, Copy, Debug)]
struct Edge {
    to: usize,
    cap: i32,
    cost: i64,
    rev: usize,
    forward: bool,
}

struct Network {
    adj: Vec<Vec<Edge>>,
}

impl Network {
    fn add(&mut self, from: usize, to: usize, cap: i32, cost: i64) {
        let rf = self.adj[to].len();
        let rb = self.adj[from].len();
        self.adj[from].push(Edge { to, cap, cost, rev: rf, forward: true });
        self.adj[to].push(Edge { to: from, cap: 0, cost: -cost, rev: rb, forward: false });
    }
}

const INF: i64 = i64::MAX / 4;

fn node_in(u: usize) -> usize {
    if u < 2 {
        u
    } else {
        2 + 2 * (u - 2)
    }
}

fn node_out(u: usize) -> usize {
    if u < 2 {
        u
    } else {
        3 + 2 * (u - 2)
    }
}

/// Minimum total weight set of `k` paths from source to sink that share no
/// vehicle or block vertex.
pub fn kdspp(g: &DispatchGraph, k: usize) -> Result<PathSet, KdspError> {
    let nv = g.num_vertices();
    let nn = 2 + 2 * (nv - 2);
    let mut net = Network { adj: vec![Vec::new(); nn] };
    for u in 2..nv {
        net.add(node_in(u), node_out(u), 1, 0);
    }
    for a in &g.arcs {
        let cap = if a.from == SOURCE && a.to == SINK { k as i32 } else { 1 };
        net.add(node_out(a.from), node_in(a.to), cap, a.weight);
    }

    // Relaxation order following the graph's topological order makes the
    // first pass exact; later passes only confirm.
    let mut order = Vec::with_capacity(nn);
    for u in g.topological_order() {
        order.push(node_in(u));
        if u >= 2 {
            order.push(node_out(u));
        }
    }
    let mut pot = bellman_ford(&net, &order)?;

    let mut total = 0i64;
    let mut found = 0;
    let mut dist = vec![INF; nn];
    let mut prev: Vec<(usize, usize)> = vec![(usize::MAX, 0); nn];
    while found < k {
        dist.iter_mut().for_each(|d| *d = INF);
        dijkstra(&net, &pot, &mut dist, &mut prev);
        if dist[SINK] >= INF {
            return Err(KdspError::TooFewPaths { found, wanted: k });
        }
        let path_cost = dist[SINK] + pot[SINK] - pot[SOURCE];
        for (p, &d) in pot.iter_mut().zip(&dist) {
            if d < INF {
                *p += d;
            }
        }
        if path_cost >= 0 && unused_vehicles(&net, g) >= k - found {
            // Every remaining augmentation costs exactly zero: an unused
            // vehicle can always go straight to the sink.
            break;
        }
        let mut v = SINK;
        while v != SOURCE {
            let (u, ei) = prev[v];
            net.adj[u][ei].cap -= 1;
            let rev = net.adj[u][ei].rev;
            net.adj[v][rev].cap += 1;
            v = u;
        }
        total += path_cost;
        found += 1;
    }

    let mut paths = Vec::with_capacity(g.vehicles.len());
    for i in 0..g.vehicles.len() {
        let vu = g.vehicle_vertex(i);
        let used = net.adj[SOURCE].iter().any(|e| e.forward && e.to == node_in(vu) && e.cap == 0);
        let mut path = vec![vu];
        if used {
            let mut cur = node_out(vu);
            loop {
                let next = net.adj[cur]
                    .iter()
                    .find(|e| e.forward && e.cap == 0 && (e.to == SINK || e.to % 2 == 0))
                    .map(|e| e.to)
                    .expect("flow is conserved");
                if next == SINK {
                    break;
                }
                let u = 2 + (next - 2) / 2;
                path.push(u);
                cur = node_out(u);
            }
        }
        paths.push(path);
    }
    Ok(PathSet { paths, total_weight: total })
}

fn unused_vehicles(net: &Network, g: &DispatchGraph) -> usize {
    (0..g.vehicles.len())
        .filter(|&i| {
            let vin = node_in(g.vehicle_vertex(i));
            net.adj[SOURCE].iter().any(|e| e.forward && e.to == vin && e.cap > 0)
        })
        .count()
}

fn bellman_ford(net: &Network, order: &[usize]) -> Result<Vec<i64>, KdspError> {
    let nn = net.adj.len();
    let mut dist = vec![INF; nn];
    dist[SOURCE] = 0;
    for _ in 0..nn {
        let mut changed = false;
        for &u in order {
            if dist[u] >= INF {
                continue;
            }
            for e in &net.adj[u] {
                if e.cap > 0 && dist[u] + e.cost < dist[e.to] {
                    dist[e.to] = dist[u] + e.cost;
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(dist);
        }
    }
    Err(KdspError::NegativeCycle)
}

fn dijkstra(net: &Network, pot: &[i64], dist: &mut [i64], prev: &mut [(usize, usize)]) {
    let mut heap = BinaryHeap::new();
    dist[SOURCE] = 0;
    heap.push(Reverse((0i64, SOURCE)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for (ei, e) in net.adj[u].iter().enumerate() {
            if e.cap <= 0 || pot[e.to] >= INF {
                continue;
            }
            let reduced = e.cost + pot[u] - pot[e.to];
            debug_assert!(reduced >= 0, "negative reduced cost {reduced}");
            let nd = d + reduced;
            if nd < dist[e.to] {
                dist[e.to] = nd;
                prev[e.to] = (u, ei);
                heap.push(Reverse((nd, e.to)));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispatch::graph::Arc;

    fn arc(from: usize, to: usize, weight: i64) -> Arc {
        Arc { from, to, cost: weight, weight }
    }

    fn base(k: usize, nb: usize, extra: Vec<Arc>) -> DispatchGraph {
        let mut arcs = Vec::new();
        for i in 0..k {
            arcs.push(arc(SOURCE, 2 + i, 0));
            arcs.push(arc(2 + i, SINK, 0));
        }
        for b in 0..nb {
            arcs.push(arc(2 + k + b, SINK, 0));
        }
        arcs.extend(extra);
        DispatchGraph::from_arcs(k, nb, arcs, 100)
    }

    #[test]
    fn no_blocks_gives_trivial_paths() {
        let g = base(2, 0, vec![]);
        let p = kdspp(&g, 2).unwrap();
        assert_eq!(p.paths, vec![vec![2], vec![3]]);
        assert_eq!(p.total_weight, 0);
    }

    #[test]
    fn single_vehicle_collects_chain() {
        // vehicle 2, blocks 3 and 4
        let g = base(1, 2, vec![arc(2, 3, 5 - 100), arc(3, 4, 7 - 100), arc(2, 4, 1 - 100)]);
        let p = kdspp(&g, 1).unwrap();
        assert_eq!(p.paths, vec![vec![2, 3, 4]]);
        assert_eq!(p.total_weight, 12 - 200);
    }

    #[test]
    fn interlacing_reroutes_first_path() {
        // Two vehicles, two blocks. Greedy first path 2-4-5 blocks vehicle 3.
        let g = base(2, 2, vec![arc(2, 4, -10), arc(4, 5, -10), arc(3, 5, -15), arc(2, 5, -1)]);
        let p = kdspp(&g, 2).unwrap();
        assert_eq!(p.total_weight, -25);
        assert_eq!(p.paths, vec![vec![2, 4], vec![3, 5]]);
    }
}
