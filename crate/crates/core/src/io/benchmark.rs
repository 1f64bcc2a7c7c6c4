//! Parser for the public large-scale PDPTW benchmark layout: `KEY: value`
//! header lines, a `NODES` section (`id lat lon demand etw ltw duration p d`)
//! and an `EDGES` section with the integer travel time matrix. Node 0 is the
//! depot; every vehicle starts and ends there.

use std::collections::HashMap;

use crate::io::{content_lines, parse_err, parse_num, IoError};
use crate::model::{
    Instance, InstanceSpec, Location, Matrix, Metric, RequestSpec, Route, Solution, VehicleSpec,
};

struct FileNode {
    line: usize,
    lat: f64,
    lon: f64,
    demand: i32,
    etw: i64,
    ltw: i64,
    duration: i64,
    p: usize,
    d: usize,
}

/// Parses a benchmark instance. The fleet defaults to one vehicle per
/// request, which never binds.
pub fn parse_benchmark(text: &str, fleet: Option<usize>) -> Result<Instance, IoError> {
    let mut lines = content_lines(text);
    let mut header: HashMap<String, (usize, String)> = HashMap::new();
    let mut found_nodes = false;
    for (ln, l) in lines.by_ref() {
        if l == "NODES" {
            found_nodes = true;
            break;
        }
        match l.split_once(':') {
            Some((k, v)) => {
                header.insert(k.trim().to_uppercase(), (ln, v.trim().to_string()));
            }
            None => return parse_err(ln, format!("expected 'KEY: value' header, got '{l}'")),
        }
    }
    if !found_nodes {
        return parse_err(0, "missing NODES section");
    }
    let get = |key: &str| header.get(key).ok_or(IoError::Parse { line: 0, msg: format!("missing header {key}") });
    let (ln, size) = get("SIZE")?;
    let size: usize = parse_num(*ln, size, "SIZE")?;
    let (ln, cap) = get("CAPACITY")?;
    let capacity: i32 = parse_num(*ln, cap, "CAPACITY")?;
    let name = header.get("NAME").map_or_else(|| "benchmark".to_string(), |(_, v)| v.clone());

    let mut nodes: Vec<FileNode> = Vec::with_capacity(size);
    let mut found_edges = false;
    for (ln, l) in lines.by_ref() {
        if l == "EDGES" {
            found_edges = true;
            break;
        }
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 9 {
            return parse_err(ln, format!("node line needs 9 fields, found {}", t.len()));
        }
        let id: usize = parse_num(ln, t[0], "node id")?;
        if id != nodes.len() {
            return parse_err(ln, format!("expected node id {}, found {id}", nodes.len()));
        }
        nodes.push(FileNode {
            line: ln,
            lat: parse_num(ln, t[1], "latitude")?,
            lon: parse_num(ln, t[2], "longitude")?,
            demand: parse_num(ln, t[3], "demand")?,
            etw: parse_num(ln, t[4], "window open")?,
            ltw: parse_num(ln, t[5], "window close")?,
            duration: parse_num(ln, t[6], "service duration")?,
            p: parse_num(ln, t[7], "pickup pair")?,
            d: parse_num(ln, t[8], "delivery pair")?,
        });
    }
    if !found_edges {
        return parse_err(0, "missing EDGES section");
    }
    if nodes.len() != size {
        return parse_err(0, format!("SIZE is {size} but {} nodes were listed", nodes.len()));
    }
    if size == 0 || size % 2 == 0 {
        return parse_err(0, "SIZE must be one depot plus pickup and delivery pairs");
    }
    let mut data = Vec::with_capacity(size * size);
    for _ in 0..size {
        let Some((ln, l)) = lines.next() else { return parse_err(0, "EDGES matrix is truncated") };
        let row: Vec<i64> = l.split_whitespace().map(|t| parse_num(ln, t, "edge weight")).collect::<Result<_, _>>()?;
        if row.len() != size {
            return parse_err(ln, format!("EDGES row has {} entries, expected {size}", row.len()));
        }
        data.extend(row);
    }
    match lines.next() {
        None | Some((_, "EOF")) => {}
        Some((ln, _)) => return parse_err(ln, "unexpected content after EDGES"),
    }
    let matrix = Matrix::new(size, data)?;

    let mut requests = Vec::new();
    for (id, nd) in nodes.iter().enumerate().skip(1) {
        if nd.p == id || nd.d == id {
            return parse_err(nd.line, format!("node {id} is paired with itself"));
        }
        match (nd.p, nd.d) {
            (0, d) if d != 0 => {
                let Some(del) = nodes.get(d) else {
                    return parse_err(nd.line, format!("node {id} points to missing delivery {d}"));
                };
                if del.p != id || del.d != 0 {
                    return parse_err(nd.line, format!("delivery {d} does not point back to pickup {id}"));
                }
                if nd.demand <= 0 || del.demand != -nd.demand {
                    return parse_err(nd.line, format!("pair {id}/{d} has inconsistent demand"));
                }
                requests.push(RequestSpec {
                    pickup_loc: id,
                    delivery_loc: d,
                    pickup_window: (nd.etw, nd.ltw),
                    delivery_window: (del.etw, del.ltw),
                    pickup_service: nd.duration,
                    delivery_service: del.duration,
                    demand: nd.demand,
                    labels: (id, d),
                });
            }
            (p, 0) if p != 0 => {
                let pickup = nodes.get(p);
                if pickup.is_none_or(|pk| pk.d != id) {
                    return parse_err(nd.line, format!("node {id} points to pickup {p} which is not paired with it"));
                }
            }
            _ => return parse_err(nd.line, format!("node {id} needs exactly one of its pair columns set")),
        }
    }
    let depot = &nodes[0];
    let k = fleet.unwrap_or(requests.len()).max(1);
    let vehicles = (0..k)
        .map(|_| VehicleSpec { start_loc: 0, window: (depot.etw, depot.ltw), end: Some((0, (depot.etw, depot.ltw))) })
        .collect();
    let inst = Instance::new(InstanceSpec {
        name,
        locations: nodes.iter().map(|n| Location { x: n.lat, y: n.lon }).collect(),
        cost: matrix.clone(),
        time: matrix,
        requests,
        vehicles,
        capacity,
        buffer: 0,
        window_mode: None,
        metric: Metric::Explicit,
        seed: None,
    })?;
    Ok(inst)
}

/// Route list of a published benchmark solution, in file node ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchmarkSolution {
    pub routes: Vec<Vec<usize>>,
    /// Cost stated in the file header, if any.
    pub cost: Option<i64>,
}

/// Parses `Route <n> : <ids>` lines; other lines are ignored except an
/// optional `Cost : <value>` header.
pub fn parse_benchmark_solution(text: &str) -> Result<BenchmarkSolution, IoError> {
    let mut routes = Vec::new();
    let mut cost = None;
    for (ln, l) in content_lines(text) {
        let Some((key, rest)) = l.split_once(':') else { continue };
        let key = key.trim();
        if key.starts_with("Route") {
            let ids: Vec<usize> = rest.split_whitespace().map(|t| parse_num(ln, t, "node id")).collect::<Result<_, _>>()?;
            routes.push(ids);
        } else if key.eq_ignore_ascii_case("cost") {
            cost = Some(parse_num(ln, rest.trim(), "cost")?);
        }
    }
    Ok(BenchmarkSolution { routes, cost })
}

impl BenchmarkSolution {
    /// Maps file node ids onto the instance, one vehicle per route.
    pub fn to_solution(&self, inst: &Instance) -> Result<Solution, IoError> {
        if self.routes.len() > inst.num_vehicles() {
            return parse_err(0, format!("{} routes but only {} vehicles", self.routes.len(), inst.num_vehicles()));
        }
        let by_label: HashMap<usize, usize> =
            (0..2 * inst.num_requests()).map(|i| (inst.label(i), i)).collect();
        let mut sol = Solution::empty(inst);
        for (v, ids) in self.routes.iter().enumerate() {
            let mut visits = vec![inst.vehicle(v).start];
            for id in ids {
                match by_label.get(id) {
                    Some(&i) => visits.push(i),
                    None => return parse_err(0, format!("route {} visits unknown node {id}", v + 1)),
                }
            }
            sol.routes[v] = Route { vehicle: v, visits };
        }
        let served = sol.served(inst);
        sol.unassigned.retain(|r| !served.contains(r));
        Ok(sol)
    }
}
