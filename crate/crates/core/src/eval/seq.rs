//! Concatenation algebra over visit sequences.

use crate::model::{Instance, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CapEval {
    /// Net load change over the sequence.
    pub q_sum: i32,
    /// Peak prefix load, never below zero.
    pub q_max: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TimeEval {
    /// Accumulated travel time without waiting.
    pub tt: i64,
    /// Earliest completion time.
    pub ec: i64,
    /// Latest start time.
    pub ls: i64,
    pub feasible: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CostEval {
    pub c: i64,
}

/// Summary of a visit sequence; `first` and `last` identify the linking arcs
/// when two summaries are concatenated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SeqEval {
    pub first: NodeId,
    pub last: NodeId,
    pub cap: CapEval,
    pub time: TimeEval,
    pub cost: CostEval,
}

impl SeqEval {
    pub fn node(inst: &Instance, i: NodeId) -> Self {
        let n = inst.node(i);
        SeqEval {
            first: i,
            last: i,
            cap: CapEval { q_sum: n.demand, q_max: n.demand.max(0) },
            time: TimeEval { tt: 0, ec: n.ready, ls: n.due, feasible: true },
            cost: CostEval { c: 0 },
        }
    }

    /// `a ⊕ b` with an explicit linking arc.
    #[inline]
    pub fn concat_link(a: &SeqEval, b: &SeqEval, t_link: i64, c_link: i64) -> Self {
        SeqEval {
            first: a.first,
            last: b.last,
            cap: CapEval {
                q_sum: a.cap.q_sum + b.cap.q_sum,
                q_max: a.cap.q_max.max(a.cap.q_sum + b.cap.q_max),
            },
            time: TimeEval {
                tt: a.time.tt + t_link + b.time.tt,
                ec: (a.time.ec + t_link + b.time.tt).max(b.time.ec),
                ls: a.time.ls.min(b.time.ls - t_link - a.time.tt),
                feasible: a.time.feasible && b.time.feasible && a.time.ec + t_link <= b.time.ls,
            },
            cost: CostEval { c: a.cost.c + c_link + b.cost.c },
        }
    }

    /// `a ⊕ b` linked by the instance arc from `a.last` to `b.first`.
    #[inline]
    pub fn concat(inst: &Instance, a: &SeqEval, b: &SeqEval) -> Self {
        Self::concat_link(a, b, inst.travel(a.last, b.first), inst.cost(a.last, b.first))
    }

    /// `self ⊕ node`.
    #[inline]
    pub fn push(&self, inst: &Instance, i: NodeId) -> Self {
        Self::concat(inst, self, &SeqEval::node(inst, i))
    }

    /// Left fold of a non-empty node sequence.
    pub fn of_sequence(inst: &Instance, seq: &[NodeId]) -> Option<Self> {
        let (&first, rest) = seq.split_first()?;
        Some(rest.iter().fold(SeqEval::node(inst, first), |acc, &i| acc.push(inst, i)))
    }

    /// Time-window and capacity feasibility.
    #[inline]
    pub fn is_feasible(&self, capacity: i32) -> bool {
        self.time.feasible && self.cap.q_max <= capacity
    }
}
