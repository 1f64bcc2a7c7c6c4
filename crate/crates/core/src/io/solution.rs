//! Plain-text solution files: one line per vehicle holding the vehicle id
//! followed by the visited node ids (the start node is implicit), then an
//! `unassigned` line with request ids.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::io::{content_lines, parse_err, parse_num, IoError};
use crate::model::{Instance, Route, Solution};

pub fn write_solution(sol: &Solution) -> String {
    let mut s = String::new();
    for r in &sol.routes {
        let _ = write!(s, "{}", r.vehicle);
        for i in r.stops() {
            let _ = write!(s, " {i}");
        }
        s.push('\n');
    }
    s.push_str("unassigned");
    for r in &sol.unassigned {
        let _ = write!(s, " {r}");
    }
    s.push('\n');
    s
}

pub fn parse_solution(text: &str, inst: &Instance) -> Result<Solution, IoError> {
    let k = inst.num_vehicles();
    let mut routes: Vec<Option<Route>> = vec![None; k];
    let mut unassigned = None;
    let mut seen = vec![false; inst.num_nodes()];
    for (ln, line) in content_lines(text) {
        let mut toks = line.split_whitespace();
        let head = toks.next().unwrap_or_default();
        if head == "unassigned" {
            if unassigned.is_some() {
                return parse_err(ln, "second unassigned line");
            }
            let mut set = BTreeSet::new();
            for t in toks {
                let r: usize = parse_num(ln, t, "request id")?;
                if r >= inst.num_requests() {
                    return parse_err(ln, format!("unknown request {r}"));
                }
                if !set.insert(r) {
                    return parse_err(ln, format!("request {r} listed twice"));
                }
            }
            unassigned = Some(set);
            continue;
        }
        let v: usize = parse_num(ln, head, "vehicle id")?;
        if v >= k {
            return parse_err(ln, format!("unknown vehicle {v}"));
        }
        if routes[v].is_some() {
            return parse_err(ln, format!("vehicle {v} listed twice"));
        }
        let mut visits = vec![inst.vehicle(v).start];
        for t in toks {
            let i: usize = parse_num(ln, t, "node id")?;
            if i >= inst.num_nodes() || !inst.is_request_node(i) {
                return parse_err(ln, format!("node {i} is not a request node of the instance"));
            }
            if std::mem::replace(&mut seen[i], true) {
                return parse_err(ln, format!("node {i} visited twice"));
            }
            visits.push(i);
        }
        routes[v] = Some(Route { vehicle: v, visits });
    }
    let Some(unassigned) = unassigned else { return parse_err(0, "missing unassigned line") };
    let routes = routes
        .into_iter()
        .enumerate()
        .map(|(v, r)| r.unwrap_or_else(|| Route::empty(inst, v)))
        .collect();
    Ok(Solution { routes, unassigned })
}
