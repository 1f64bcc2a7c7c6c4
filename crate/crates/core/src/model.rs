//! Problem data model: instances, routes, solutions, schedule propagation,
//! feasibility validation and the hierarchical objective.
//!
//! Nodes follow a fixed layout: for `n` requests and `k` vehicles the pickups
//! occupy ids `0..n`, the deliveries `n..2n`, the vehicle start nodes
//! `2n..2n+k` and, for instances with closed routes, the vehicle end nodes
//! `2n+k..2n+2k`. Matrices are indexed by *location*, so several nodes may
//! share one physical place (a benchmark depot, a co-located pickup).

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub type NodeId = usize;
pub type RequestId = usize;
pub type VehicleId = usize;

/// Stand-in for an open time window bound. Small enough that sums of a few
/// of them cannot overflow.
pub const TIME_INF: i64 = i64::MAX / 8;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("solution is infeasible ({} violation(s), first: {})", .0.len(), .0[0])]
    Infeasible(Vec<Violation>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Pickup(RequestId),
    Delivery(RequestId),
    Start(VehicleId),
    End(VehicleId),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    pub loc: usize,
    pub ready: i64,
    pub due: i64,
    pub service: i64,
    /// Load change when serving the node: positive at pickups, negative at
    /// deliveries, zero at vehicle nodes.
    pub demand: i32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Request {
    pub id: RequestId,
    pub pickup: NodeId,
    pub delivery: NodeId,
    /// Earliest pickup time `e_r`.
    pub earliest: i64,
    /// Latest dropoff time `l_r`.
    pub latest: i64,
    pub demand: i32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vehicle {
    pub id: VehicleId,
    pub start: NodeId,
    pub end: Option<NodeId>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Location {
    pub x: f64,
    pub y: f64,
}

/// How the request time windows derive from the earliest pickup time and the
/// buffer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WindowMode {
    /// Fixed pickup and dropoff: the buffer has no effect.
    FixedBoth,
    /// Fixed pickup, dropoff may slip by the buffer.
    FixedPickup,
    /// Pickup and dropoff may both slip by the buffer.
    Flexible,
}

impl WindowMode {
    pub fn letter(self) -> char {
        match self {
            WindowMode::FixedBoth => 'A',
            WindowMode::FixedPickup => 'B',
            WindowMode::Flexible => 'C',
        }
    }

    pub fn from_letter(c: &str) -> Option<Self> {
        match c {
            "A" | "a" => Some(WindowMode::FixedBoth),
            "B" | "b" => Some(WindowMode::FixedPickup),
            "C" | "c" => Some(WindowMode::Flexible),
            _ => None,
        }
    }

    /// Pickup and delivery windows for a request with earliest pickup
    /// `earliest`, direct travel time `direct` and buffer `buffer`.
    pub fn windows(self, earliest: i64, direct: i64, buffer: i64) -> ((i64, i64), (i64, i64)) {
        let (pickup_slack, dropoff_slack) = match self {
            WindowMode::FixedBoth => (0, 0),
            WindowMode::FixedPickup => (0, buffer),
            WindowMode::Flexible => (buffer, buffer),
        };
        (
            (earliest, earliest + pickup_slack),
            (earliest + direct, earliest + direct + dropoff_slack),
        )
    }
}

/// Rounding rule used when converting Euclidean distances and travel times to
/// integer base units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Rounding {
    #[default]
    HalfUp,
    Floor,
    Ceil,
}

impl Rounding {
    pub fn apply(self, v: f64) -> i64 {
        match self {
            Rounding::HalfUp => (v + 0.5).floor() as i64,
            Rounding::Floor => v.floor() as i64,
            Rounding::Ceil => v.ceil() as i64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Rounding::HalfUp => "half-up",
            Rounding::Floor => "floor",
            Rounding::Ceil => "ceil",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "half-up" => Some(Rounding::HalfUp),
            "floor" => Some(Rounding::Floor),
            "ceil" => Some(Rounding::Ceil),
            _ => None,
        }
    }
}

/// Where the travel matrices come from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Metric {
    /// Matrices given explicitly.
    Explicit,
    /// Cost is the rounded Euclidean distance, time the rounded distance over
    /// `speed`.
    Euclidean { speed: f64, rounding: Rounding },
}

/// Dense square matrix of non-negative integers over locations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    n: usize,
    data: Vec<i64>,
}

impl Matrix {
    pub fn new(n: usize, data: Vec<i64>) -> Result<Self, ModelError> {
        if data.len() != n * n {
            return Err(ModelError::InvalidInstance(format!(
                "matrix has {} entries, expected {}x{}",
                data.len(),
                n,
                n
            )));
        }
        Ok(Matrix { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

/// Per-request input used to assemble an [`Instance`].
#[derive(Clone, Debug, PartialEq)]
pub struct RequestSpec {
    pub pickup_loc: usize,
    pub delivery_loc: usize,
    pub pickup_window: (i64, i64),
    pub delivery_window: (i64, i64),
    pub pickup_service: i64,
    pub delivery_service: i64,
    pub demand: i32,
    /// External identifiers (file node ids) of the pickup and delivery.
    pub labels: (usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct VehicleSpec {
    pub start_loc: usize,
    pub window: (i64, i64),
    /// End location and window for closed routes.
    pub end: Option<(usize, (i64, i64))>,
}

/// Everything needed to build an [`Instance`]; validated by [`Instance::new`].
#[derive(Clone, Debug)]
pub struct InstanceSpec {
    pub name: String,
    pub locations: Vec<Location>,
    pub cost: Matrix,
    pub time: Matrix,
    pub requests: Vec<RequestSpec>,
    pub vehicles: Vec<VehicleSpec>,
    pub capacity: i32,
    pub buffer: i64,
    pub window_mode: Option<WindowMode>,
    pub metric: Metric,
    pub seed: Option<u64>,
}

/// Immutable problem instance; shareable across worker threads.
#[derive(Clone, Debug)]
pub struct Instance {
    spec: InstanceSpec,
    nodes: Vec<Node>,
    requests: Vec<Request>,
    vehicles: Vec<Vehicle>,
    labels: Vec<usize>,
}

impl Instance {
    pub fn new(spec: InstanceSpec) -> Result<Self, ModelError> {
        let invalid = |m: String| Err(ModelError::InvalidInstance(m));
        let nloc = spec.locations.len();
        if spec.cost.size() != nloc || spec.time.size() != nloc {
            return invalid(format!(
                "matrices must be {nloc}x{nloc} (cost {}, time {})",
                spec.cost.size(),
                spec.time.size()
            ));
        }
        for i in 0..nloc {
            if spec.cost.get(i, i) != 0 || spec.time.get(i, i) != 0 {
                return invalid(format!("diagonal entry of location {i} is not zero"));
            }
            if spec.cost.row(i).iter().chain(spec.time.row(i)).any(|&v| v < 0) {
                return invalid(format!("negative matrix entry in row {i}"));
            }
        }
        if spec.capacity < 1 {
            return invalid(format!("capacity must be at least 1, got {}", spec.capacity));
        }
        if spec.buffer < 0 {
            return invalid(format!("buffer must be non-negative, got {}", spec.buffer));
        }
        let n = spec.requests.len();
        let k = spec.vehicles.len();
        let closed = spec.vehicles.iter().filter(|v| v.end.is_some()).count();
        if closed != 0 && closed != k {
            return invalid("either all or no vehicles must have an end location".into());
        }
        let mut nodes = Vec::with_capacity(2 * n + k + closed);
        let mut labels = Vec::with_capacity(nodes.capacity());
        let mut requests = Vec::with_capacity(n);
        for (r, rs) in spec.requests.iter().enumerate() {
            if rs.pickup_loc >= nloc || rs.delivery_loc >= nloc {
                return invalid(format!("request {r} references an unknown location"));
            }
            if rs.demand < 1 {
                return invalid(format!("request {r} has non-positive demand"));
            }
            if rs.pickup_window.0 > rs.pickup_window.1 || rs.delivery_window.0 > rs.delivery_window.1 {
                return invalid(format!("request {r} has an empty time window"));
            }
            nodes.push(Node {
                kind: NodeKind::Pickup(r),
                loc: rs.pickup_loc,
                ready: rs.pickup_window.0,
                due: rs.pickup_window.1,
                service: rs.pickup_service,
                demand: rs.demand,
            });
            labels.push(rs.labels.0);
            requests.push(Request {
                id: r,
                pickup: r,
                delivery: n + r,
                earliest: rs.pickup_window.0,
                latest: rs.delivery_window.1,
                demand: rs.demand,
            });
        }
        for (r, rs) in spec.requests.iter().enumerate() {
            nodes.push(Node {
                kind: NodeKind::Delivery(r),
                loc: rs.delivery_loc,
                ready: rs.delivery_window.0,
                due: rs.delivery_window.1,
                service: rs.delivery_service,
                demand: -rs.demand,
            });
            labels.push(rs.labels.1);
        }
        let mut vehicles = Vec::with_capacity(k);
        for (v, vs) in spec.vehicles.iter().enumerate() {
            if vs.start_loc >= nloc {
                return invalid(format!("vehicle {v} starts at an unknown location"));
            }
            nodes.push(Node {
                kind: NodeKind::Start(v),
                loc: vs.start_loc,
                ready: vs.window.0,
                due: vs.window.1,
                service: 0,
                demand: 0,
            });
            labels.push(vs.start_loc);
            vehicles.push(Vehicle { id: v, start: 2 * n + v, end: None });
        }
        for (v, vs) in spec.vehicles.iter().enumerate() {
            if let Some((loc, window)) = vs.end {
                if loc >= nloc {
                    return invalid(format!("vehicle {v} ends at an unknown location"));
                }
                vehicles[v].end = Some(nodes.len());
                nodes.push(Node {
                    kind: NodeKind::End(v),
                    loc,
                    ready: window.0,
                    due: window.1,
                    service: 0,
                    demand: 0,
                });
                labels.push(loc);
            }
        }
        Ok(Instance { spec, nodes, requests, vehicles, labels })
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn spec(&self) -> &InstanceSpec {
        &self.spec
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    #[inline]
    pub fn node(&self, i: NodeId) -> &Node {
        &self.nodes[i]
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    #[inline]
    pub fn request(&self, r: RequestId) -> &Request {
        &self.requests[r]
    }

    pub fn vehicles(&self) -> &[Vehicle] {
        &self.vehicles
    }

    #[inline]
    pub fn vehicle(&self, v: VehicleId) -> &Vehicle {
        &self.vehicles[v]
    }

    pub fn num_requests(&self) -> usize {
        self.requests.len()
    }

    pub fn num_vehicles(&self) -> usize {
        self.vehicles.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn capacity(&self) -> i32 {
        self.spec.capacity
    }

    pub fn buffer(&self) -> i64 {
        self.spec.buffer
    }

    pub fn window_mode(&self) -> Option<WindowMode> {
        self.spec.window_mode
    }

    pub fn has_closed_routes(&self) -> bool {
        self.vehicles.first().is_some_and(|v| v.end.is_some())
    }

    /// External identifier of a node (file node id for parsed benchmarks).
    pub fn label(&self, i: NodeId) -> usize {
        self.labels[i]
    }

    /// Request owning a pickup or delivery node.
    #[inline]
    pub fn request_of(&self, i: NodeId) -> Option<RequestId> {
        match self.nodes[i].kind {
            NodeKind::Pickup(r) | NodeKind::Delivery(r) => Some(r),
            _ => None,
        }
    }

    #[inline]
    pub fn is_pickup(&self, i: NodeId) -> bool {
        matches!(self.nodes[i].kind, NodeKind::Pickup(_))
    }

    #[inline]
    pub fn is_request_node(&self, i: NodeId) -> bool {
        i < 2 * self.requests.len()
    }

    /// Travel cost between two nodes.
    #[inline]
    pub fn cost(&self, i: NodeId, j: NodeId) -> i64 {
        self.spec.cost.get(self.nodes[i].loc, self.nodes[j].loc)
    }

    /// Raw travel time between two nodes, without service.
    #[inline]
    pub fn time(&self, i: NodeId, j: NodeId) -> i64 {
        self.spec.time.get(self.nodes[i].loc, self.nodes[j].loc)
    }

    /// Time from beginning service at `i` to arriving at `j`: the service
    /// duration of `i` is folded into the arc.
    #[inline]
    pub fn travel(&self, i: NodeId, j: NodeId) -> i64 {
        self.spec.time.get(self.nodes[i].loc, self.nodes[j].loc) + self.nodes[i].service
    }

    /// Direct pickup-to-delivery travel time of a request.
    pub fn direct_time(&self, r: RequestId) -> i64 {
        let req = &self.requests[r];
        self.time(req.pickup, req.delivery)
    }

    /// Same instance with the time windows re-derived for another buffer.
    /// Only available for instances that record their window mode.
    pub fn with_buffer(&self, buffer: i64) -> Result<Instance, ModelError> {
        let mode = self.spec.window_mode.ok_or_else(|| {
            ModelError::InvalidInstance("instance has no window mode to re-derive from".into())
        })?;
        let mut spec = self.spec.clone();
        spec.buffer = buffer;
        for (r, rs) in spec.requests.iter_mut().enumerate() {
            let earliest = self.requests[r].earliest;
            let direct = self.spec.time.get(rs.pickup_loc, rs.delivery_loc);
            let (pw, dw) = mode.windows(earliest, direct, buffer);
            rs.pickup_window = pw;
            rs.delivery_window = dw;
        }
        Instance::new(spec)
    }
}

/// Visit sequence of one vehicle; `visits[0]` is the vehicle's start node.
/// The end node of closed routes is implicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Route {
    pub vehicle: VehicleId,
    pub visits: Vec<NodeId>,
}

impl Route {
    pub fn empty(inst: &Instance, vehicle: VehicleId) -> Self {
        Route { vehicle, visits: vec![inst.vehicle(vehicle).start] }
    }

    pub fn is_empty(&self) -> bool {
        self.visits.len() <= 1
    }

    /// Request nodes of the route, without the start node.
    pub fn stops(&self) -> &[NodeId] {
        self.visits.get(1..).unwrap_or(&[])
    }

    /// Visits including the implicit end node.
    pub fn full_sequence(&self, inst: &Instance) -> Vec<NodeId> {
        let mut seq = self.visits.clone();
        if let Some(end) = inst.vehicle(self.vehicle).end {
            seq.push(end);
        }
        seq
    }

    pub fn cost(&self, inst: &Instance) -> i64 {
        let seq = self.full_sequence(inst);
        seq.windows(2).map(|w| inst.cost(w[0], w[1])).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Solution {
    pub routes: Vec<Route>,
    pub unassigned: BTreeSet<RequestId>,
}

impl Solution {
    /// One empty route per vehicle; every request unassigned.
    pub fn empty(inst: &Instance) -> Self {
        Solution {
            routes: (0..inst.num_vehicles()).map(|v| Route::empty(inst, v)).collect(),
            unassigned: (0..inst.num_requests()).collect(),
        }
    }

    pub fn routes_used(&self) -> usize {
        self.routes.iter().filter(|r| !r.is_empty()).count()
    }

    pub fn served(&self, inst: &Instance) -> BTreeSet<RequestId> {
        self.routes
            .iter()
            .flat_map(|r| r.stops().iter())
            .filter(|&&i| inst.is_pickup(i))
            .filter_map(|&i| inst.request_of(i))
            .collect()
    }

    /// Objective without feasibility checks.
    pub fn objective(&self, inst: &Instance) -> ObjectiveValue {
        ObjectiveValue {
            unassigned: self.unassigned.len(),
            cost: self.routes.iter().map(|r| r.cost(inst)).sum(),
        }
    }
}

/// Hierarchical objective: fewer unassigned requests first, then lower cost.
/// The derived ordering is lexicographic in field order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectiveValue {
    pub unassigned: usize,
    pub cost: i64,
}

impl fmt::Display for ObjectiveValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} unassigned, cost {})", self.unassigned, self.cost)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScheduledVisit {
    pub node: NodeId,
    pub arrival: i64,
    /// Begin of service; the vehicle leaves `service` seconds later.
    pub start: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub visits: Vec<ScheduledVisit>,
    /// Position of the first visit arriving after its window closes.
    pub violation: Option<usize>,
}

impl Schedule {
    pub fn is_feasible(&self) -> bool {
        self.violation.is_none()
    }
}

/// Earliest-departure schedule of a node sequence, started at the window
/// opening of its first node.
pub fn propagate_sequence(seq: &[NodeId], inst: &Instance) -> Schedule {
    let mut visits = Vec::with_capacity(seq.len());
    let mut violation = None;
    let mut prev: Option<(NodeId, i64)> = None;
    for (pos, &node) in seq.iter().enumerate() {
        let n = inst.node(node);
        let arrival = match prev {
            None => n.ready,
            Some((p, start)) => start + inst.node(p).service + inst.time(p, node),
        };
        if arrival > n.due && violation.is_none() {
            violation = Some(pos);
        }
        let start = arrival.max(n.ready);
        visits.push(ScheduledVisit { node, arrival, start });
        prev = Some((node, start));
    }
    Schedule { visits, violation }
}

/// Arrival and begin-of-service times along a route, including its end node.
pub fn propagate_schedule(route: &Route, inst: &Instance) -> Schedule {
    propagate_sequence(&route.full_sequence(inst), inst)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnknownVehicle { vehicle: VehicleId },
    DuplicateRoute { vehicle: VehicleId },
    MissingRoute { vehicle: VehicleId },
    UnknownNode { vehicle: VehicleId, node: NodeId },
    BadStart { vehicle: VehicleId, found: Option<NodeId> },
    MisplacedVehicleNode { vehicle: VehicleId, node: NodeId },
    DuplicateVisit { node: NodeId },
    SplitRequest { request: RequestId },
    Precedence { request: RequestId, vehicle: VehicleId },
    TimeWindow { vehicle: VehicleId, node: NodeId, arrival: i64, due: i64 },
    Capacity { vehicle: VehicleId, node: NodeId, load: i32, capacity: i32 },
    ServedAndUnassigned { request: RequestId },
    Missing { request: RequestId },
    UnknownRequest { request: RequestId },
}

impl Violation {
    /// Structural problems (ids outside the instance) as opposed to
    /// constraint violations.
    pub fn is_malformed(&self) -> bool {
        matches!(
            self,
            Violation::UnknownVehicle { .. }
                | Violation::UnknownNode { .. }
                | Violation::UnknownRequest { .. }
        )
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownVehicle { vehicle } => write!(f, "unknown vehicle {vehicle}"),
            Violation::DuplicateRoute { vehicle } => write!(f, "vehicle {vehicle} has several routes"),
            Violation::MissingRoute { vehicle } => write!(f, "vehicle {vehicle} has no route"),
            Violation::UnknownNode { vehicle, node } => {
                write!(f, "route of vehicle {vehicle} visits unknown node {node}")
            }
            Violation::BadStart { vehicle, found } => match found {
                Some(n) => write!(f, "route of vehicle {vehicle} starts at node {n}"),
                None => write!(f, "route of vehicle {vehicle} is empty"),
            },
            Violation::MisplacedVehicleNode { vehicle, node } => {
                write!(f, "route of vehicle {vehicle} visits vehicle node {node}")
            }
            Violation::DuplicateVisit { node } => write!(f, "node {node} is visited more than once"),
            Violation::SplitRequest { request } => {
                write!(f, "request {request} is not served completely by one vehicle")
            }
            Violation::Precedence { request, vehicle } => {
                write!(f, "vehicle {vehicle} delivers request {request} before picking it up")
            }
            Violation::TimeWindow { vehicle, node, arrival, due } => write!(
                f,
                "vehicle {vehicle} arrives at node {node} at {arrival}, after its window closes at {due}"
            ),
            Violation::Capacity { vehicle, node, load, capacity } => write!(
                f,
                "vehicle {vehicle} carries {load} > {capacity} after node {node}"
            ),
            Violation::ServedAndUnassigned { request } => {
                write!(f, "request {request} is served and listed as unassigned")
            }
            Violation::Missing { request } => {
                write!(f, "request {request} is neither served nor unassigned")
            }
            Violation::UnknownRequest { request } => write!(f, "unknown request {request} in unassigned set"),
        }
    }
}

/// All constraint violations of a solution; empty means feasible.
pub fn validate(sol: &Solution, inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = inst.num_requests();
    let mut seen_vehicle = vec![false; inst.num_vehicles()];
    let mut seen_node = vec![false; inst.num_nodes()];
    let mut served_by: Vec<Option<VehicleId>> = vec![None; n];
    let mut split = vec![false; n];

    for route in &sol.routes {
        let v = route.vehicle;
        if v >= inst.num_vehicles() {
            out.push(Violation::UnknownVehicle { vehicle: v });
            continue;
        }
        if std::mem::replace(&mut seen_vehicle[v], true) {
            out.push(Violation::DuplicateRoute { vehicle: v });
        }
        let start = inst.vehicle(v).start;
        match route.visits.first() {
            Some(&s) if s == start => {}
            other => out.push(Violation::BadStart { vehicle: v, found: other.copied() }),
        }
        let mut structurally_ok = route.visits.first() == Some(&start);
        for &node in route.stops() {
            if node >= inst.num_nodes() {
                out.push(Violation::UnknownNode { vehicle: v, node });
                structurally_ok = false;
                continue;
            }
            let Some(r) = inst.request_of(node) else {
                out.push(Violation::MisplacedVehicleNode { vehicle: v, node });
                structurally_ok = false;
                continue;
            };
            if std::mem::replace(&mut seen_node[node], true) {
                out.push(Violation::DuplicateVisit { node });
                structurally_ok = false;
                continue;
            }
            match served_by[r] {
                None => served_by[r] = Some(v),
                Some(w) if w != v => split[r] = true,
                Some(_) => {}
            }
        }
        // Deliveries whose pickup appears later in the same route.
        for (pos, &node) in route.stops().iter().enumerate() {
            if node >= inst.num_nodes() || inst.is_pickup(node) {
                continue;
            }
            if let Some(r) = inst.request_of(node) {
                let p = inst.request(r).pickup;
                if route.stops()[pos + 1..].contains(&p) {
                    out.push(Violation::Precedence { request: r, vehicle: v });
                    structurally_ok = false;
                }
            }
        }
        if !structurally_ok {
            continue;
        }
        let seq = route.full_sequence(inst);
        let schedule = propagate_sequence(&seq, inst);
        for sv in &schedule.visits {
            let due = inst.node(sv.node).due;
            if sv.arrival > due {
                out.push(Violation::TimeWindow { vehicle: v, node: sv.node, arrival: sv.arrival, due });
            }
        }
        let mut load = 0;
        for &node in &seq {
            load += inst.node(node).demand;
            if load > inst.capacity() {
                out.push(Violation::Capacity { vehicle: v, node, load, capacity: inst.capacity() });
            }
        }
    }
    for (v, seen) in seen_vehicle.iter().enumerate() {
        if !seen {
            out.push(Violation::MissingRoute { vehicle: v });
        }
    }
    for r in 0..n {
        let req = inst.request(r);
        let has_p = seen_node[req.pickup];
        let has_d = seen_node[req.delivery];
        if split[r] || has_p != has_d {
            out.push(Violation::SplitRequest { request: r });
        }
        let served = has_p || has_d;
        let listed = sol.unassigned.contains(&r);
        if served && listed {
            out.push(Violation::ServedAndUnassigned { request: r });
        } else if !served && !listed {
            out.push(Violation::Missing { request: r });
        }
    }
    for &r in &sol.unassigned {
        if r >= n {
            out.push(Violation::UnknownRequest { request: r });
        }
    }
    out
}

/// Objective of a feasible solution.
pub fn evaluate(sol: &Solution, inst: &Instance) -> Result<ObjectiveValue, ModelError> {
    let violations = validate(sol, inst);
    if !violations.is_empty() {
        return Err(ModelError::Infeasible(violations));
    }
    Ok(sol.objective(inst))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Line instance: every location sits on the x axis, cost and time equal
    /// the absolute distance.
    pub(crate) fn line_instance(
        positions: &[i64],
        requests: &[(usize, usize, (i64, i64), (i64, i64))],
        vehicles: &[usize],
        capacity: i32,
    ) -> Instance {
        let n = positions.len();
        let m = Matrix::from_fn(n, |i, j| (positions[i] - positions[j]).abs());
        Instance::new(InstanceSpec {
            name: "line".into(),
            locations: positions.iter().map(|&x| Location { x: x as f64, y: 0.0 }).collect(),
            cost: m.clone(),
            time: m,
            requests: requests
                .iter()
                .enumerate()
                .map(|(r, &(p, d, pw, dw))| RequestSpec {
                    pickup_loc: p,
                    delivery_loc: d,
                    pickup_window: pw,
                    delivery_window: dw,
                    pickup_service: 0,
                    delivery_service: 0,
                    demand: 1,
                    labels: (r + 1, requests.len() + r + 1),
                })
                .collect(),
            vehicles: vehicles
                .iter()
                .map(|&l| VehicleSpec { start_loc: l, window: (0, TIME_INF), end: None })
                .collect(),
            capacity,
            buffer: 0,
            window_mode: None,
            metric: Metric::Explicit,
            seed: None,
        })
        .unwrap()
    }

    #[test]
    fn empty_route_schedule_is_feasible() {
        let inst = line_instance(&[0, 5, 12], &[(1, 2, (10, 20), (0, 30))], &[0], 1);
        let s = propagate_schedule(&Route::empty(&inst, 0), &inst);
        assert_eq!(s.visits.len(), 1);
        assert!(s.is_feasible());
    }

    #[test]
    fn schedule_waits_for_pickup_window() {
        let inst = line_instance(&[0, 5, 12], &[(1, 2, (10, 20), (0, 30))], &[0], 1);
        let route = Route { vehicle: 0, visits: vec![inst.vehicle(0).start, 0, 1] };
        let s = propagate_schedule(&route, &inst);
        assert_eq!((s.visits[1].arrival, s.visits[1].start), (5, 10));
        assert_eq!(s.visits[2].arrival, 17);
        assert!(s.is_feasible());
    }

    #[test]
    fn late_arrival_is_infeasible() {
        let inst = line_instance(&[0, 5, 12], &[(1, 2, (0, 3), (0, 30))], &[0], 1);
        let route = Route { vehicle: 0, visits: vec![inst.vehicle(0).start, 0, 1] };
        let s = propagate_schedule(&route, &inst);
        assert_eq!(s.violation, Some(1));
    }

    #[test]
    fn all_unassigned_is_feasible() {
        let inst = line_instance(&[0, 5, 12], &[(1, 2, (0, 100), (0, 100))], &[0], 1);
        let sol = Solution::empty(&inst);
        assert!(validate(&sol, &inst).is_empty());
        assert_eq!(evaluate(&sol, &inst).unwrap(), ObjectiveValue { unassigned: 1, cost: 0 });
    }

    #[test]
    fn capacity_violation_at_overflowing_pickup() {
        let reqs = [(1, 2, (0, 100), (0, 100)); 3];
        let inst = line_instance(&[0, 1, 2], &reqs, &[0], 2);
        let s = inst.vehicle(0).start;
        let sol = Solution {
            routes: vec![Route { vehicle: 0, visits: vec![s, 0, 1, 2, 3, 4, 5] }],
            unassigned: BTreeSet::new(),
        };
        let v = validate(&sol, &inst);
        assert_eq!(v, vec![Violation::Capacity { vehicle: 0, node: 2, load: 3, capacity: 2 }]);
    }

    #[test]
    fn delivery_before_pickup_is_precedence_violation() {
        let inst = line_instance(&[0, 1, 2], &[(1, 2, (0, 100), (0, 100))], &[0], 1);
        let s = inst.vehicle(0).start;
        let sol = Solution {
            routes: vec![Route { vehicle: 0, visits: vec![s, 1, 0] }],
            unassigned: BTreeSet::new(),
        };
        let v = validate(&sol, &inst);
        assert!(v.contains(&Violation::Precedence { request: 0, vehicle: 0 }), "{v:?}");
    }

    #[test]
    fn unknown_node_is_malformed() {
        let inst = line_instance(&[0, 1, 2], &[(1, 2, (0, 100), (0, 100))], &[0], 1);
        let s = inst.vehicle(0).start;
        let sol = Solution {
            routes: vec![Route { vehicle: 0, visits: vec![s, 42] }],
            unassigned: [0].into(),
        };
        let v = validate(&sol, &inst);
        assert!(v.iter().any(|x| x.is_malformed()));
    }

    #[test]
    fn split_and_duplicate_requests_are_reported() {
        let reqs = [(1, 2, (0, 100), (0, 100)); 2];
        let inst = line_instance(&[0, 1, 2], &reqs, &[0, 0], 2);
        let (s0, s1) = (inst.vehicle(0).start, inst.vehicle(1).start);
        let sol = Solution {
            routes: vec![
                Route { vehicle: 0, visits: vec![s0, 0] },
                Route { vehicle: 1, visits: vec![s1, 2, 1, 3, 3] },
            ],
            unassigned: BTreeSet::new(),
        };
        let v = validate(&sol, &inst);
        assert!(v.contains(&Violation::SplitRequest { request: 0 }));
        assert!(v.contains(&Violation::DuplicateVisit { node: 3 }));
    }

    #[test]
    fn evaluate_counts_route_cost() {
        let inst = line_instance(&[0, 3, 7], &[(1, 2, (0, 100), (0, 100)), (1, 2, (0, 100), (0, 100))], &[0], 1);
        let s = inst.vehicle(0).start;
        let sol = Solution {
            routes: vec![Route { vehicle: 0, visits: vec![s, 0, 2] }],
            unassigned: [1].into(),
        };
        assert_eq!(evaluate(&sol, &inst).unwrap(), ObjectiveValue { unassigned: 1, cost: 7 });
    }

    #[test]
    fn objective_is_lexicographic() {
        let a = ObjectiveValue { unassigned: 4, cost: 200 };
        let b = ObjectiveValue { unassigned: 5, cost: 90 };
        assert!(a < b);
    }

    #[test]
    fn evaluate_rejects_infeasible() {
        let inst = line_instance(&[0, 1, 2], &[(1, 2, (0, 100), (0, 100))], &[0], 1);
        let s = inst.vehicle(0).start;
        let sol = Solution { routes: vec![Route { vehicle: 0, visits: vec![s, 1, 0] }], unassigned: BTreeSet::new() };
        assert!(matches!(evaluate(&sol, &inst), Err(ModelError::Infeasible(_))));
    }

    #[test]
    fn rejects_bad_matrices_and_capacity() {
        let inst = line_instance(&[0, 1], &[], &[0], 1);
        let mut spec = inst.spec().clone();
        spec.capacity = 0;
        assert!(Instance::new(spec).is_err());
        let mut spec = inst.spec().clone();
        spec.cost = Matrix::new(2, vec![0, 1, 1, 1]).unwrap();
        assert!(Instance::new(spec).is_err());
    }
}
