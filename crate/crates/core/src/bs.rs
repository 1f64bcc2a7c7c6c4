//! Intra-route improvement over the BS(k) neighbourhood: every reordering in
//! which a visit is never moved behind a visit that originally came `k` or
//! more positions later.
//!
//! After `i` visits of a permutation are placed, the placed set is fully
//! described by `m`, the first original position not yet placed, and a
//! bitmask `T` over positions `m+1..m+k-1`; `m` itself follows from `i` and
//! `|T|`. Together with the last placed position this gives a layered graph
//! whose states depend only on `k`, so it is built once and reused. Time
//! windows and capacity are handled by labels carrying sequence summaries.

use crate::eval::{SeqEval, State};
use crate::model::{Instance, NodeId, VehicleId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct AbstractState {
    /// Placed positions among `m+1..m+k-1`, bit `b` for `m+1+b`.
    t: u32,
    /// Last placed position minus `m`.
    last_rel: i32,
}

#[derive(Clone, Copy, Debug)]
struct Transition {
    /// Offset of the placed position from `m`.
    y_rel: usize,
    next: usize,
}

/// State space and transitions of BS(k), independent of any route.
#[derive(Clone, Debug)]
pub struct BsGraph {
    k: usize,
    states: Vec<AbstractState>,
    transitions: Vec<Vec<Transition>>,
}

impl BsGraph {
    pub fn new(k: usize) -> Self {
        assert!((1..=16).contains(&k), "k must be in 1..=16");
        let width = k as i32;
        let index = |t: u32, last_rel: i32| -> usize { (t as usize) * (2 * k) + (last_rel + width) as usize };
        let mut states = Vec::with_capacity((1 << (k - 1)) * 2 * k);
        for t in 0..(1u32 << (k - 1)) {
            for last_rel in -width..width {
                states.push(AbstractState { t, last_rel });
            }
        }
        let transitions = states
            .iter()
            .map(|s| {
                let mut out = Vec::new();
                for y_rel in 0..k {
                    let next = if y_rel == 0 {
                        let shift = 1 + s.t.trailing_ones();
                        index(s.t >> shift, -(shift as i32))
                    } else {
                        let bit = 1u32 << (y_rel - 1);
                        if s.t & bit != 0 {
                            continue;
                        }
                        index(s.t | bit, y_rel as i32)
                    };
                    out.push(Transition { y_rel, next });
                }
                out
            })
            .collect();
        BsGraph { k, states, transitions }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Layers needed for a route with `visits` stops: the start, one per
    /// stop and the end.
    pub fn layers(visits: usize) -> usize {
        visits + 2
    }

    fn start_index(&self) -> usize {
        // T = 0, last placed is the start at position 0 while m = 1.
        self.k - 1
    }
}

#[derive(Clone, Copy, Debug)]
struct Label {
    eval: SeqEval,
    parent: usize,
    node: NodeId,
}

/// Inserts a label into a vertex's label set under cost/completion
/// dominance, keeping at most `thickness` labels by cost then completion.
fn offer(arena: &mut Vec<Label>, set: &mut Vec<usize>, label: Label, thickness: Option<usize>) {
    let (c, ec) = (label.eval.cost.c, label.eval.time.ec);
    if set.iter().any(|&i| arena[i].eval.cost.c <= c && arena[i].eval.time.ec <= ec) {
        return;
    }
    set.retain(|&i| !(c <= arena[i].eval.cost.c && ec <= arena[i].eval.time.ec));
    arena.push(label);
    set.push(arena.len() - 1);
    if let Some(t) = thickness {
        if set.len() > t {
            set.sort_by_key(|&i| (arena[i].eval.cost.c, arena[i].eval.time.ec, i));
            set.truncate(t);
        }
    }
}

/// Cheapest feasible reordering of `visits[1..]` in the BS(k) neighbourhood
/// (the start `visits[0]` stays first; `end` is appended when the route is
/// closed). Returns it only when strictly cheaper than the input order.
/// `thickness = None` keeps every non-dominated label.
pub fn search(
    inst: &Instance,
    visits: &[NodeId],
    end: Option<NodeId>,
    graph: &BsGraph,
    thickness: Option<usize>,
) -> Option<(Vec<NodeId>, SeqEval)> {
    let n = visits.len() - 1;
    let k = graph.k;
    let q = inst.capacity();
    let current = {
        let mut seq = visits.to_vec();
        seq.extend(end);
        SeqEval::of_sequence(inst, &seq).expect("non-empty")
    };
    if n < 2 || k < 2 {
        return None;
    }
    // Original position of each request's pickup, for deliveries.
    let mut pickup_pos = vec![usize::MAX; n + 1];
    for y in 1..=n {
        let node = visits[y];
        if !inst.is_pickup(node) {
            let r = inst.request_of(node).expect("request node");
            pickup_pos[y] = (1..=n).find(|&p| visits[p] == inst.request(r).pickup).unwrap_or(usize::MAX);
        }
    }
    let ns = graph.states.len();
    let mut arena: Vec<Label> = vec![Label { eval: SeqEval::node(inst, visits[0]), parent: usize::MAX, node: visits[0] }];
    let mut layer: Vec<Vec<usize>> = vec![Vec::new(); ns];
    layer[graph.start_index()].push(0);
    for i in 0..n {
        let mut next_layer: Vec<Vec<usize>> = vec![Vec::new(); ns];
        for (si, labels) in layer.iter().enumerate() {
            if labels.is_empty() {
                continue;
            }
            let st = graph.states[si];
            let m = i + 1 - st.t.count_ones() as usize;
            for tr in &graph.transitions[si] {
                let y = m + tr.y_rel;
                if y > n {
                    continue;
                }
                let pp = pickup_pos[y];
                if pp != usize::MAX {
                    let placed = pp < m || (pp > m && pp - m - 1 < k - 1 && st.t & (1 << (pp - m - 1)) != 0);
                    if !placed {
                        continue;
                    }
                }
                let node = visits[y];
                let single = SeqEval::node(inst, node);
                for &li in labels {
                    let ext = SeqEval::concat(inst, &arena[li].eval, &single);
                    if !ext.is_feasible(q) {
                        continue;
                    }
                    let label = Label { eval: ext, parent: li, node };
                    offer(&mut arena, &mut next_layer[tr.next], label, thickness);
                }
            }
        }
        layer = next_layer;
    }
    // All placed: m = n + 1 and T = 0.
    let mut best: Option<(usize, SeqEval)> = None;
    for labels in &layer {
        for &li in labels {
            let full = match end {
                Some(e) => arena[li].eval.push(inst, e),
                None => arena[li].eval,
            };
            if !full.is_feasible(q) {
                continue;
            }
            if best.as_ref().is_none_or(|(_, b)| full.cost.c < b.cost.c) {
                best = Some((li, full));
            }
        }
    }
    let (mut li, eval) = best?;
    if eval.cost.c >= current.cost.c {
        return None;
    }
    let mut seq = Vec::with_capacity(n + 1);
    while li != usize::MAX {
        seq.push(arena[li].node);
        li = arena[li].parent;
    }
    seq.reverse();
    Some((seq, eval))
}

/// Applies the best strictly improving BS(k) reordering to a route.
pub fn improve_route(st: &mut State<'_>, v: VehicleId, graph: &BsGraph, thickness: Option<usize>) -> bool {
    let inst = st.inst();
    let end = inst.vehicle(v).end;
    match search(inst, st.route(v), end, graph, thickness) {
        Some((seq, _)) => {
            st.set_route(v, seq);
            true
        }
        None => false,
    }
}
