//! Acceptance suite. Each criterion prints one `PASS`/`FAIL` line; the
//! process exits non-zero when any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ridepool::bs::{search, BsGraph};
use ridepool::dispatch::{
    assemble, blocks_from_matching, build_graph, kdspp, Arc, ArcRule, DispatchGraph, GraphParams, StartPolicy, SINK,
    SOURCE,
};
use ridepool::eval::{SeqEval, State};
use ridepool::fleetmin::{hierarchical_run, AgesParams};
use ridepool::ils::{construct, perturb, IlsParams};
use ridepool::io::{generate, parse_benchmark, parse_benchmark_solution, write_solution, GeneratorConfig};
use ridepool::model::{
    validate, Instance, InstanceSpec, Location, Matrix, Metric, NodeId, RequestSpec, Solution, VehicleSpec,
    WindowMode,
};
use ridepool::pooling::{
    enumerate_hyperedges, run_matching, solve_relaxation, weight, Hyperedge, MatchingMethod, WeightFn,
};
use ridepool::rnr::{recreate, ruin, RecreateContext, RnrParams};
use ridepool::solver::{self, MatheuristicParams, Mode, SolverConfig};

type Outcome = Result<String, String>;

// ---------------------------------------------------------------------------
// Independent oracles

/// Travel from `i` to `j` including the service at `i`, read from the raw
/// matrices.
fn raw_travel(inst: &Instance, i: NodeId, j: NodeId) -> i64 {
    let (a, b) = (inst.node(i), inst.node(j));
    inst.spec().time.get(a.loc, b.loc) + a.service
}

fn raw_cost(inst: &Instance, i: NodeId, j: NodeId) -> i64 {
    inst.spec().cost.get(inst.node(i).loc, inst.node(j).loc)
}

#[derive(Debug, PartialEq, Eq)]
struct SeqFacts {
    feasible: bool,
    cost: i64,
    ec: i64,
    ls: i64,
    q_sum: i32,
    q_max: i32,
}

/// From-scratch propagation: earliest begin of service forward, latest
/// begin backward, loads by prefix sums.
fn propagate(inst: &Instance, seq: &[NodeId]) -> SeqFacts {
    let mut t = inst.node(seq[0]).ready;
    let mut feasible = t <= inst.node(seq[0]).due;
    let mut cost = 0;
    for w in seq.windows(2) {
        t = (t + raw_travel(inst, w[0], w[1])).max(inst.node(w[1]).ready);
        feasible &= t <= inst.node(w[1]).due;
        cost += raw_cost(inst, w[0], w[1]);
    }
    let mut ls = inst.node(*seq.last().unwrap()).due;
    for w in seq.windows(2).rev() {
        ls = inst.node(w[0]).due.min(ls - raw_travel(inst, w[0], w[1]));
    }
    let (mut load, mut q_max) = (0i32, 0i32);
    for &i in seq {
        load += inst.node(i).demand;
        q_max = q_max.max(load);
    }
    SeqFacts { feasible, cost, ec: t, ls, q_sum: load, q_max }
}

fn facts_of(e: &SeqEval) -> SeqFacts {
    SeqFacts { feasible: e.time.feasible, cost: e.cost.c, ec: e.time.ec, ls: e.time.ls, q_sum: e.cap.q_sum, q_max: e.cap.q_max }
}

/// Cost of a full route (start, stops, end) if it is feasible.
fn route_cost(inst: &Instance, full: &[NodeId]) -> Option<i64> {
    let f = propagate(inst, full);
    (f.feasible && f.q_max <= inst.capacity()).then_some(f.cost)
}

fn full_route(inst: &Instance, v: usize, stops: &[NodeId]) -> Vec<NodeId> {
    let veh = inst.vehicle(v);
    let mut seq = vec![veh.start];
    seq.extend_from_slice(stops);
    seq.extend(veh.end);
    seq
}

/// Every order of the requests' nodes with each pickup before its delivery.
fn interleavings(inst: &Instance, reqs: &[usize], mut visit: impl FnMut(&[NodeId])) {
    fn go(inst: &Instance, reqs: &[usize], picked: u32, dropped: u32, seq: &mut Vec<NodeId>, visit: &mut dyn FnMut(&[NodeId])) {
        let full = (1u32 << reqs.len()) - 1;
        if dropped == full {
            visit(seq);
            return;
        }
        for (i, &r) in reqs.iter().enumerate() {
            let bit = 1 << i;
            if picked & bit == 0 {
                seq.push(inst.request(r).pickup);
                go(inst, reqs, picked | bit, dropped, seq, visit);
                seq.pop();
            } else if dropped & bit == 0 {
                seq.push(inst.request(r).delivery);
                go(inst, reqs, picked, dropped | bit, seq, visit);
                seq.pop();
            }
        }
    }
    go(inst, reqs, 0, 0, &mut Vec::new(), &mut visit);
}

/// Cheapest feasible route of vehicle `v` serving exactly `reqs`.
fn best_route(inst: &Instance, v: usize, reqs: &[usize]) -> Option<i64> {
    let mut best: Option<i64> = None;
    interleavings(inst, reqs, |stops| {
        if let Some(c) = route_cost(inst, &full_route(inst, v, stops)) {
            best = Some(best.map_or(c, |b: i64| b.min(c)));
        }
    });
    best
}

/// Lexicographic optimum (unassigned, cost) over all assignments of
/// requests to vehicles or to nobody.
fn brute_force_optimum(inst: &Instance) -> (usize, i64) {
    let n = inst.num_requests();
    let k = inst.num_vehicles();
    let mut memo: BTreeMap<(usize, u32), Option<i64>> = BTreeMap::new();
    let mut best = (usize::MAX, i64::MAX);
    let total = (k + 1).pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let mut sets = vec![0u32; k];
        let mut unassigned = 0;
        for r in 0..n {
            let v = c % (k + 1);
            c /= k + 1;
            if v == k {
                unassigned += 1;
            } else {
                sets[v] |= 1 << r;
            }
        }
        let mut cost = 0;
        let mut ok = true;
        for (v, &set) in sets.iter().enumerate() {
            if set == 0 {
                continue;
            }
            let r = *memo.entry((v, set)).or_insert_with(|| {
                let reqs: Vec<usize> = (0..n).filter(|r| set & (1 << r) != 0).collect();
                best_route(inst, v, &reqs)
            });
            match r {
                Some(x) => cost += x,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            best = best.min((unassigned, cost));
        }
    }
    best
}

fn gen(requests: usize, vehicles: usize, seed: u64, f: impl FnOnce(&mut GeneratorConfig)) -> Instance {
    let mut cfg = GeneratorConfig { requests, vehicles, seed, ..GeneratorConfig::default() };
    f(&mut cfg);
    generate(&cfg).expect("generator output is valid")
}

// ---------------------------------------------------------------------------
// Criteria

fn c1_concatenation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let instances: Vec<Instance> = (0..20)
        .map(|s| {
            gen(30, 4, 100 + s, |c| {
                c.buffer = [0, 60, 300, 900][s as usize % 4];
                c.window_mode = [WindowMode::FixedBoth, WindowMode::FixedPickup, WindowMode::Flexible][s as usize % 3];
                c.horizon = 1800;
                c.side = 3000.0;
            })
        })
        .collect();
    let mut feasible = 0;
    for trial in 0..10_000 {
        let inst = &instances[trial % instances.len()];
        let len = rng.gen_range(1..=40);
        let seq: Vec<NodeId> = (0..len).map(|_| rng.gen_range(0..inst.num_nodes())).collect();
        let expect = propagate(inst, &seq);
        feasible += expect.feasible as usize;
        let folded = SeqEval::of_sequence(inst, &seq).unwrap();
        if facts_of(&folded) != expect {
            return Err(format!("left fold differs on {seq:?}: {:?} vs {expect:?}", facts_of(&folded)));
        }
        // Random bracketing of the same sequence.
        fn tree(inst: &Instance, seq: &[NodeId], rng: &mut ChaCha8Rng) -> SeqEval {
            if seq.len() == 1 {
                return SeqEval::node(inst, seq[0]);
            }
            let cut = rng.gen_range(1..seq.len());
            let (a, b) = (tree(inst, &seq[..cut], rng), tree(inst, &seq[cut..], rng));
            SeqEval::concat(inst, &a, &b)
        }
        let bracketed = tree(inst, &seq, &mut rng);
        if facts_of(&bracketed) != expect {
            return Err(format!("bracketed concat differs on {seq:?}"));
        }
    }
    Ok(format!("10000 sequences agree ({feasible} time-feasible)"))
}

fn random_graph(rng: &mut ChaCha8Rng) -> DispatchGraph {
    let k = rng.gen_range(1..=3);
    let nb = rng.gen_range(0..=8);
    let bv = |b: usize| 2 + k + b;
    let mut arcs = Vec::new();
    let arc = |from, to, weight| Arc { from, to, cost: weight, weight };
    for i in 0..k {
        arcs.push(arc(SOURCE, 2 + i, 0));
        arcs.push(arc(2 + i, SINK, 0));
        for b in 0..nb {
            if rng.gen_bool(0.5) {
                arcs.push(arc(2 + i, bv(b), rng.gen_range(-60..40)));
            }
        }
    }
    for a in 0..nb {
        for b in a + 1..nb {
            if rng.gen_bool(0.4) {
                arcs.push(arc(bv(a), bv(b), rng.gen_range(-60..40)));
            }
        }
        if rng.gen_bool(0.7) {
            arcs.push(arc(bv(a), SINK, rng.gen_range(-10..10)));
        }
    }
    DispatchGraph::from_arcs(k, nb, arcs, 0)
}

/// Minimum total weight over all ways to give every vehicle one path to the
/// sink through distinct blocks.
fn exhaustive_paths(g: &DispatchGraph) -> i64 {
    let mut out: BTreeMap<usize, Vec<(usize, i64)>> = BTreeMap::new();
    for a in &g.arcs {
        out.entry(a.from).or_default().push((a.to, a.weight));
    }
    fn walk(
        g: &DispatchGraph,
        out: &BTreeMap<usize, Vec<(usize, i64)>>,
        u: usize,
        used: &mut Vec<bool>,
        vehicle: usize,
        acc: i64,
        best: &mut i64,
    ) {
        for &(to, w) in out.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
            if to == SINK {
                assign(g, out, vehicle + 1, used, acc + w, best);
            } else if let Some(b) = g.block_of(to) {
                if !used[b] {
                    used[b] = true;
                    walk(g, out, to, used, vehicle, acc + w, best);
                    used[b] = false;
                }
            }
        }
    }
    fn assign(g: &DispatchGraph, out: &BTreeMap<usize, Vec<(usize, i64)>>, vehicle: usize, used: &mut Vec<bool>, acc: i64, best: &mut i64) {
        if vehicle == g.vehicles.len() {
            *best = (*best).min(acc);
            return;
        }
        walk(g, out, g.vehicle_vertex(vehicle), used, vehicle, acc, best);
    }
    let mut best = i64::MAX;
    assign(g, &out, 0, &mut vec![false; g.num_blocks], 0, &mut best);
    best
}

fn c2_kdspp() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for t in 0..200 {
        let g = random_graph(&mut rng);
        let expect = exhaustive_paths(&g);
        let got = kdspp(&g, g.vehicles.len()).map_err(|e| format!("graph {t}: {e}"))?;
        if got.total_weight != expect {
            return Err(format!("graph {t}: weight {} vs exhaustive {expect}\n{}", got.total_weight, g.dump()));
        }
        let mut seen = BTreeSet::new();
        let mut sum = 0;
        for p in &got.paths {
            let mut walk = p.clone();
            walk.push(SINK);
            for w in walk.windows(2) {
                let a = g.arcs.iter().find(|a| a.from == w[0] && a.to == w[1]).ok_or("path uses a missing arc")?;
                sum += a.weight;
            }
            for &u in &p[..] {
                if u >= 2 && !seen.insert(u) {
                    return Err(format!("graph {t}: vertex {u} shared"));
                }
            }
        }
        if sum != expect {
            return Err(format!("graph {t}: paths sum to {sum}, reported {}", got.total_weight));
        }
    }
    Ok("200 graphs match exhaustive enumeration".into())
}

fn micro_params() -> IlsParams {
    IlsParams {
        time_limit: Duration::from_secs(600),
        max_iterations: Some(10),
        rnr: RnrParams { iterations: 2000, ..RnrParams::default() },
        workers: 1,
        ..IlsParams::default()
    }
}

fn c3_micro() -> Outcome {
    let (mut unassigned_ok, mut cost_ok, mut hybrid_ok) = (0, 0, 0);
    let mut misses = Vec::new();
    let total = 100;
    for s in 0..total as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let n = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=2);
        let inst = gen(n, k, 3000 + s, |c| {
            c.capacity = rng.gen_range(1..=3);
            c.buffer = rng.gen_range(0..=600);
            c.horizon = 1800;
            c.side = 3000.0;
        });
        let opt = brute_force_optimum(&inst);
        let cfg = SolverConfig { mode: Mode::Integrated, seed: s, ils: micro_params(), ..SolverConfig::default() };
        let int = solver::solve(&inst, &cfg, None, &mut |_| {}).map_err(|e| e.to_string())?;
        let hyb = solver::solve(&inst, &SolverConfig { mode: Mode::Hybrid, ..cfg }, None, &mut |_| {})
            .map_err(|e| e.to_string())?;
        for sol in [&int.solution, &hyb.solution] {
            if !validate(sol, &inst).is_empty() {
                return Err(format!("instance {s}: infeasible output"));
            }
        }
        let io = int.solution.objective(&inst);
        let ho = hyb.solution.objective(&inst);
        unassigned_ok += (io.unassigned == opt.0) as usize;
        cost_ok += ((io.unassigned, io.cost) == opt) as usize;
        hybrid_ok += ((ho.unassigned, ho.cost) == opt) as usize;
        if (io.unassigned, io.cost) != opt || (ho.unassigned, ho.cost) != opt {
            misses.push(format!("#{s}: opt {opt:?} integrated {:?} hybrid {:?}", (io.unassigned, io.cost), (ho.unassigned, ho.cost)));
        }
    }
    let line = format!(
        "unassigned {unassigned_ok}/{total}, integrated cost {cost_ok}/{total}, hybrid cost {hybrid_ok}/{total}"
    );
    if unassigned_ok == total && cost_ok * 100 >= 95 * total && hybrid_ok == total {
        Ok(line)
    } else {
        Err(format!("{line}; {}", misses.join("; ")))
    }
}

/// Permutations of `0..n` with `p[u] < p[v]` whenever `u + k <= v`.
fn bs_permutations(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    fn go(n: usize, k: usize, placed: &mut Vec<bool>, seq: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if seq.len() == n {
            visit(seq);
            return;
        }
        let lowest_free = placed.iter().position(|&p| !p).unwrap();
        for x in 0..n {
            if !placed[x] && x < lowest_free + k {
                placed[x] = true;
                seq.push(x);
                go(n, k, placed, seq, visit);
                seq.pop();
                placed[x] = false;
            }
        }
    }
    go(n, k, &mut vec![false; n], &mut Vec::new(), &mut visit);
}

fn precedence_ok(inst: &Instance, stops: &[NodeId]) -> bool {
    let mut seen = BTreeSet::new();
    for &i in stops {
        if !inst.is_pickup(i) {
            if let Some(r) = inst.request_of(i) {
                if !seen.contains(&inst.request(r).pickup) {
                    return false;
                }
            }
        }
        seen.insert(i);
    }
    true
}

fn c4_bs() -> Outcome {
    let graph = BsGraph::new(3);
    let mut routes: Vec<(Instance, usize, Vec<NodeId>)> = Vec::new();
    let mut seed = 0;
    while routes.len() < 300 {
        seed += 1;
        let inst = gen(24, 8, 4000 + seed, |c| {
            c.buffer = 600;
            c.capacity = 3;
            c.horizon = 1800;
            c.side = 3000.0;
        });
        let sol = construct(&inst, &mut ChaCha8Rng::seed_from_u64(seed));
        for r in &sol.routes {
            if (2..=10).contains(&r.stops().len()) && routes.len() < 300 {
                routes.push((inst.clone(), r.vehicle, r.visits.clone()));
            }
        }
    }
    let mut improved = 0;
    for (t, (inst, v, visits)) in routes.iter().enumerate() {
        let stops = &visits[1..];
        let input = route_cost(inst, &full_route(inst, *v, stops)).ok_or(format!("route {t} infeasible"))?;
        let mut exact = input;
        bs_permutations(stops.len(), 3, |p| {
            let cand: Vec<NodeId> = p.iter().map(|&x| stops[x]).collect();
            if precedence_ok(inst, &cand) {
                if let Some(c) = route_cost(inst, &full_route(inst, *v, &cand)) {
                    exact = exact.min(c);
                }
            }
        });
        let end = inst.vehicle(*v).end;
        let full = search(inst, visits, end, &graph, None).map_or(input, |(seq, e)| {
            assert_eq!(route_cost(inst, &full_route(inst, *v, &seq[1..])), Some(e.cost.c));
            e.cost.c
        });
        if full != exact {
            return Err(format!("route {t}: unlimited thickness {full} vs exact {exact}"));
        }
        let thin = search(inst, visits, end, &graph, Some(4)).map_or(input, |(_, e)| e.cost.c);
        if thin < exact || thin > input {
            return Err(format!("route {t}: thickness 4 gave {thin}, exact {exact}, input {input}"));
        }
        improved += (exact < input) as usize;
    }
    Ok(format!("300 routes exact ({improved} improvable)"))
}

fn c5_pooling() -> Outcome {
    let inst = gen(50, 10, 5, |c| {
        c.capacity = 4;
        c.buffer = 600;
        c.horizon = 1200;
        c.side = 3000.0;
    });
    let hg = enumerate_hyperedges(&inst, 4);
    let mut sizes = [0usize; 5];
    for e in &hg.edges {
        sizes[e.len()] += 1;
        let mut best: Option<i64> = None;
        interleavings(&inst, &e.requests, |seq| {
            // A pooled ride keeps someone on board until its final stop.
            let mut load = 0;
            for &i in &seq[..seq.len() - 1] {
                load += inst.node(i).demand;
                if load == 0 {
                    return;
                }
            }
            let f = propagate(&inst, seq);
            if f.feasible && f.q_max <= inst.capacity() {
                best = Some(best.map_or(f.cost, |b: i64| b.min(f.cost)));
            }
        });
        match best {
            Some(b) if b == e.seq_cost => {}
            other => return Err(format!("edge {:?}: stored {} vs brute force {other:?}", e.requests, e.seq_cost)),
        }
    }
    Ok(format!("{} edges optimal (sizes 2/3/4: {}/{}/{})", hg.edges.len(), sizes[2], sizes[3], sizes[4]))
}

/// Best total weight over exact covers of all requests by the edges.
fn best_integral(edges: &[Hyperedge], weights: &[f64], n: usize) -> f64 {
    fn go(edges: &[Hyperedge], weights: &[f64], covered: u32, n: usize, acc: f64, best: &mut f64) {
        let full = (1u32 << n) - 1;
        if covered == full {
            *best = best.max(acc);
            return;
        }
        let r = (!covered).trailing_zeros() as usize;
        for (i, e) in edges.iter().enumerate() {
            let mask: u32 = e.requests.iter().map(|&q| 1u32 << q).sum();
            if e.requests.contains(&r) && mask & covered == 0 {
                go(edges, weights, covered | mask, n, acc + weights[i], best);
            }
        }
    }
    let mut best = f64::NEG_INFINITY;
    go(edges, weights, 0, n, 0.0, &mut best);
    best
}

fn c6_matching() -> Outcome {
    let mut checked = 0;
    for s in 0..40u64 {
        let n = 3 + (s as usize % 4);
        let inst = gen(n, 2, 6000 + s, |c| {
            c.capacity = 3;
            c.buffer = 900;
            c.horizon = 600;
            c.side = 2000.0;
        });
        let edges = enumerate_hyperedges(&inst, 4).with_singletons(&inst);
        for f in [WeightFn::Cardinality, WeightFn::Cost, WeightFn::Overlap, WeightFn::default()] {
            let weights: Vec<f64> = edges.iter().map(|e| weight(e, f, 4, &inst)).collect();
            let lp = solve_relaxation(&edges, &weights, n, false).map_err(|e| e.to_string())?;
            let best = best_integral(&edges, &weights, n);
            if lp.objective + 1e-6 < best {
                return Err(format!("instance {s}: LP {} below integral {best}", lp.objective));
            }
            for m in [
                MatchingMethod::CoverGreedy,
                MatchingMethod::Greedy,
                MatchingMethod::PartitionGreedy,
                MatchingMethod::CoverRandomized,
            ] {
                let got = run_matching(m, &edges, &weights, &inst, &mut ChaCha8Rng::seed_from_u64(s))
                    .map_err(|e| e.to_string())?;
                if !got.is_partition(&edges, n) {
                    return Err(format!("instance {s}: {m:?} is not a partition"));
                }
                if got.weight(&weights) > lp.objective + 1e-6 {
                    return Err(format!("instance {s}: {m:?} beats the relaxation"));
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} instance/weight pairs, all variants partition, relaxation bounds every matching"))
}

fn taxi(seed: u64, requests: usize, vehicles: usize) -> Instance {
    gen(requests, vehicles, seed, |c| {
        c.capacity = 1;
        c.buffer = 0;
        c.window_mode = WindowMode::Flexible;
    })
}

/// Singleton blocks dispatched over all vehicles without connection limits.
fn taxi_dispatch(inst: &Instance) -> Result<Solution, String> {
    let edges: Vec<Hyperedge> = (0..inst.num_requests()).map(|r| Hyperedge::singleton(inst, r)).collect();
    let m = ridepool::pooling::Matching { edges: (0..edges.len()).collect() };
    let blocks = blocks_from_matching(&m, &edges, inst, StartPolicy::Earliest);
    let vehicles: Vec<usize> = (0..inst.num_vehicles()).collect();
    let g = build_graph(inst, &blocks, &vehicles, GraphParams { rule: ArcRule::FixedStart, limits: None, keep_origin_arcs: false });
    let paths = kdspp(&g, vehicles.len()).map_err(|e| e.to_string())?;
    assemble(inst, &g, &blocks, &paths).map_err(|e| e.to_string())
}

/// Exhaustive assignment of requests to vehicles or nobody; with zero
/// buffer and unit capacity each vehicle serves its requests one after
/// another in pickup time order. Cost counts only the legs between rides,
/// which is what the dispatch graph prices.
fn taxi_exhaustive(inst: &Instance) -> (usize, i64) {
    let n = inst.num_requests();
    let k = inst.num_vehicles();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&r| (inst.node(inst.request(r).pickup).ready, r));
    let mut best = (usize::MAX, i64::MAX);
    let mut assign = vec![k; n];
    fn go(inst: &Instance, order: &[usize], i: usize, assign: &mut Vec<usize>, k: usize, best: &mut (usize, i64)) {
        if i == order.len() {
            let mut cost = 0;
            for v in 0..k {
                let stops: Vec<NodeId> = order
                    .iter()
                    .filter(|&&r| assign[r] == v)
                    .flat_map(|&r| [inst.request(r).pickup, inst.request(r).delivery])
                    .collect();
                if stops.is_empty() {
                    continue;
                }
                match route_cost(inst, &full_route(inst, v, &stops)) {
                    Some(c) => cost += c - rides_cost(inst, &stops),
                    None => return,
                }
            }
            let un = assign.iter().filter(|&&v| v == k).count();
            *best = (*best).min((un, cost));
            return;
        }
        for v in 0..=k {
            assign[order[i]] = v;
            go(inst, order, i + 1, assign, k, best);
        }
        assign[order[i]] = k;
    }
    go(inst, &order, 0, &mut assign, k, &mut best);
    best
}

fn rides_cost(inst: &Instance, stops: &[NodeId]) -> i64 {
    stops.chunks(2).map(|p| raw_cost(inst, p[0], p[1])).sum()
}

fn dispatched_connection(inst: &Instance, v: usize, stops: &[NodeId]) -> i64 {
    let full = full_route(inst, v, stops);
    full.windows(2).map(|w| raw_cost(inst, w[0], w[1])).sum::<i64>() - rides_cost(inst, stops)
}

fn subsample(inst: &Instance, requests: &[usize], vehicles: &[usize]) -> Instance {
    let spec = inst.spec();
    let sub = InstanceSpec {
        name: format!("{}-sub", spec.name),
        requests: requests.iter().map(|&r| spec.requests[r].clone()).collect(),
        vehicles: vehicles.iter().map(|&v| spec.vehicles[v].clone()).collect(),
        ..spec.clone()
    };
    Instance::new(sub).expect("subsample is valid")
}

fn c7_taxi() -> Outcome {
    let params = MatheuristicParams { limits: None, ..MatheuristicParams::default() };
    let mut served = Vec::new();
    for s in 0..20u64 {
        let inst = taxi(7000 + s, 200, 20);
        let seq = solver::sequential(&inst, &params, &mut ChaCha8Rng::seed_from_u64(s)).map_err(|e| e.to_string())?;
        if !validate(&seq, &inst).is_empty() {
            return Err(format!("instance {s}: infeasible sequential output"));
        }
        let reference = taxi_dispatch(&inst)?;
        let (a, b) = (seq.unassigned.len(), reference.unassigned.len());
        if a != b {
            return Err(format!("instance {s}: sequential leaves {a} unassigned, optimum {b}"));
        }
        served.push(200 - a);

        // The reference dispatch itself against exhaustive enumeration.
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let mut reqs: Vec<usize> = (0..200).collect();
        reqs.shuffle(&mut rng);
        reqs.truncate(10);
        reqs.sort_unstable();
        let small = subsample(&inst, &reqs, &[0, 1, 2]);
        let dispatched = taxi_dispatch(&small)?;
        let exhaustive = taxi_exhaustive(&small);
        let connection: i64 = dispatched
            .routes
            .iter()
            .map(|r| dispatched_connection(&small, r.vehicle, &r.visits[1..]))
            .sum();
        let got = (dispatched.unassigned.len(), connection);
        if got != exhaustive {
            return Err(format!("instance {s}: subsample dispatch {got:?} vs exhaustive {exhaustive:?}"));
        }
    }
    Ok(format!("20 instances optimal, served min/max {}/{}", served.iter().min().unwrap(), served.iter().max().unwrap()))
}

fn c8_fuzz() -> Outcome {
    let inst = gen(500, 60, 8, |c| c.buffer = 300);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let sol = construct(&inst, &mut rng);
    let mut st = State::new(&inst, &sol);
    let params = RnrParams::default();
    let ctx = RecreateContext::new(&inst, st.vehicles());
    let graph = BsGraph::new(4);
    let mut counts = [0usize; 4];
    for step in 0..100_000 {
        let op = rng.gen_range(0..4);
        counts[op] += 1;
        match op {
            0 => {
                let before: BTreeSet<usize> = (0..inst.num_requests()).filter(|r| !st.unassigned().contains(r)).collect();
                if before.is_empty() {
                    continue;
                }
                let stats = ruin(&mut st, &params, &mut rng);
                if stats.k_s < 1 || stats.k_s as f64 > stats.k_s_bound.max(1.0) || stats.strings.len() > stats.k_s {
                    return Err(format!("step {step}: k_s {} outside [1, {}]", stats.k_s, stats.k_s_bound));
                }
                for s in &stats.strings {
                    let cap = (s.route_len as f64).min(stats.l_s_max).max(1.0);
                    if s.l_sigma < 1 || s.l_sigma as f64 > cap || s.l_sigma + s.kept > s.route_len {
                        return Err(format!("step {step}: string length {} outside [1, {cap}]", s.l_sigma));
                    }
                }
                let after: BTreeSet<usize> = (0..inst.num_requests()).filter(|r| !st.unassigned().contains(r)).collect();
                let gone: BTreeSet<usize> = before.difference(&after).copied().collect();
                if gone != stats.removed || gone.is_empty() {
                    return Err(format!("step {step}: removed set mismatch"));
                }
            }
            1 => {
                recreate(&mut st, &params, &ctx, &mut rng);
            }
            2 => {
                perturb(&mut st, 5, 0.5, true, &mut rng);
            }
            _ => {
                let used: Vec<usize> = st.used_vehicles().collect();
                if let Some(&v) = used.get(rng.gen_range(0..used.len().max(1))) {
                    ridepool::bs::improve_route(&mut st, v, &graph, Some(4));
                }
            }
        }
        if let Some(v) = validate(&st.to_solution(), &inst).first() {
            return Err(format!("step {step} (op {op}): {v}"));
        }
    }
    Ok(format!("100000 steps clean (ruin/recreate/perturb/bs = {counts:?})"))
}

fn c9_warm_start() -> Outcome {
    let ils = IlsParams {
        time_limit: Duration::from_secs(120),
        max_iterations: Some(2),
        rnr: RnrParams { iterations: 300, ..RnrParams::default() },
        workers: 1,
        ..IlsParams::default()
    };
    let cfg = SolverConfig { mode: Mode::Hybrid, ils, ..SolverConfig::default() };
    for s in 0..5u64 {
        let base = gen(300, 30, 9000 + s, |c| c.buffer = 0);
        let mut warm: Option<Solution> = None;
        for delta in [0, 60, 120] {
            let inst = base.with_buffer(delta).map_err(|e| e.to_string())?;
            if let Some(w) = &warm {
                if let Some(v) = validate(w, &inst).first() {
                    return Err(format!("seed {s}: warm start invalid under delta {delta}: {v}"));
                }
            }
            let start_obj = warm.as_ref().map(|w| w.objective(&inst));
            let out = solver::solve(&inst, &SolverConfig { seed: s, ..cfg.clone() }, warm.take(), &mut |_| {})
                .map_err(|e| e.to_string())?;
            let obj = out.solution.objective(&inst);
            if start_obj.is_some_and(|w| obj > w) {
                return Err(format!("seed {s} delta {delta}: {obj:?} worse than warm start {start_obj:?}"));
            }
            warm = Some(out.solution);
        }
    }
    Ok("5 instances x 3 buffers monotone".into())
}

/// Requests laid out so that one vehicle can serve them back to back.
fn chainable(seed: u64, n: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = 2000.0;
    let mut locations = vec![Location { x: side / 2.0, y: side / 2.0 }];
    for _ in 0..2 * n {
        locations.push(Location { x: rng.gen_range(0.0..side), y: rng.gen_range(0.0..side) });
    }
    let m = locations.len();
    let dist = |i: usize, j: usize| {
        let (a, b) = (locations[i], locations[j]);
        ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt().round() as i64
    };
    let matrix = Matrix::from_fn(m, dist);
    let leg = (side * 1.5) as i64;
    let mut t = leg;
    let requests = (0..n)
        .map(|r| {
            let (p, d) = (1 + 2 * r, 2 + 2 * r);
            let pw = (t, t + 200);
            let dw = (t, t + 200 + dist(p, d) + 400);
            t += 3 * leg;
            RequestSpec {
                pickup_loc: p,
                delivery_loc: d,
                pickup_window: pw,
                delivery_window: dw,
                pickup_service: 0,
                delivery_service: 0,
                demand: 1,
                labels: (p, d),
            }
        })
        .collect();
    let horizon = t + leg;
    let depot = VehicleSpec { start_loc: 0, window: (0, horizon), end: Some((0, (0, horizon))) };
    Instance::new(InstanceSpec {
        name: format!("chain-{seed}"),
        locations,
        cost: matrix.clone(),
        time: matrix,
        requests,
        vehicles: vec![depot; n],
        capacity: 1,
        buffer: 0,
        window_mode: None,
        metric: Metric::Explicit,
        seed: Some(seed),
    })
    .expect("chain instance is valid")
}

/// One vehicle per request.
fn spread(inst: &Instance) -> Solution {
    let mut sol = Solution::empty(inst);
    sol.unassigned.clear();
    for r in 0..inst.num_requests() {
        let req = inst.request(r);
        sol.routes[r].visits.extend([req.pickup, req.delivery]);
    }
    sol
}

fn c10_fleet() -> Outcome {
    let ils = IlsParams {
        time_limit: Duration::from_secs(60),
        max_iterations: Some(1),
        rnr: RnrParams { iterations: 200, ..RnrParams::default() },
        workers: 1,
        ..IlsParams::default()
    };
    let ages = AgesParams { max_perturbations: 10_000, ..AgesParams::default() };
    for s in 0..10u64 {
        let inst = chainable(10_000 + s, 6 + s as usize);
        let start = spread(&inst);
        if let Some(v) = validate(&start, &inst).first() {
            return Err(format!("instance {s}: start infeasible: {v}"));
        }
        let out = hierarchical_run(&inst, &ils, &ages, Some(start), &mut ChaCha8Rng::seed_from_u64(s), &mut |_| {});
        if !validate(&out.solution, &inst).is_empty() || !out.solution.unassigned.is_empty() {
            return Err(format!("instance {s}: invalid result"));
        }
        if out.solution.routes_used() != 1 {
            return Err(format!("instance {s}: {} routes", out.solution.routes_used()));
        }
    }
    Ok("10 chain instances reach one route".into())
}

/// Validates published benchmark solutions. Needs `RIDEPOOL_BENCHMARK_DIR`
/// holding `<name>.txt` and `<name>.sol`, with the published cost either in
/// a `Cost :` line of the solution or in `<name>.cost`.
fn benchmark_check() -> Outcome {
    let dir = std::env::var("RIDEPOOL_BENCHMARK_DIR")
        .map_err(|_| "benchmark data unavailable: set RIDEPOOL_BENCHMARK_DIR to a directory with <name>.txt and <name>.sol".to_string())?;
    let mut checked = Vec::new();
    for entry in std::fs::read_dir(&dir).map_err(|e| format!("{dir}: {e}"))? {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.extension().is_some_and(|e| e == "txt") {
            let sol_path = path.with_extension("sol");
            let Ok(sol_text) = std::fs::read_to_string(&sol_path) else { continue };
            let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
            let inst = parse_benchmark(&text, None).map_err(|e| format!("{}: {e}", path.display()))?;
            let published = parse_benchmark_solution(&sol_text).map_err(|e| e.to_string())?;
            let sol = published.to_solution(&inst).map_err(|e| e.to_string())?;
            if let Some(v) = validate(&sol, &inst).first() {
                return Err(format!("{}: published solution infeasible: {v}", path.display()));
            }
            let cost = sol.objective(&inst).cost;
            let listed = match published.cost {
                Some(c) => Some(c),
                None => std::fs::read_to_string(path.with_extension("cost")).ok().and_then(|t| t.trim().parse().ok()),
            };
            if Some(cost) != listed {
                return Err(format!("{}: recomputed cost {cost} vs published {listed:?}", path.display()));
            }
            checked.push(inst.name().to_string());
        }
    }
    if checked.is_empty() {
        return Err(format!("no instance/solution pair found in {dir}"));
    }
    Ok(format!("published solutions verified: {}", checked.join(", ")))
}

fn c11_determinism_throughput() -> Outcome {
    let inst = gen(200, 20, 11, |_| {});
    let ils = IlsParams {
        time_limit: Duration::from_secs(300),
        max_iterations: Some(3),
        rnr: RnrParams { iterations: 500, ..RnrParams::default() },
        chi: 150,
        workers: 1,
        ..IlsParams::default()
    };
    let cfg = SolverConfig { mode: Mode::Integrated, seed: 42, ils, ..SolverConfig::default() };
    let runs: Vec<String> = (0..3)
        .map(|_| solver::solve(&inst, &cfg, None, &mut |_| {}).map(|o| write_solution(&o.solution)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    if runs.iter().any(|r| r != &runs[0]) {
        return Err("solve output differs between identical runs".into());
    }

    let big = gen(1000, 100, 12, |_| {});
    let ils = IlsParams { time_limit: Duration::from_secs(60), rnr_budget: Some(5000), workers: 0, ..IlsParams::default() };
    let cfg = SolverConfig { mode: Mode::Integrated, seed: 1, ils, ..SolverConfig::default() };
    let started = Instant::now();
    let out = solver::solve(&big, &cfg, None, &mut |_| {}).map_err(|e| e.to_string())?;
    let wall = started.elapsed();
    if !validate(&out.solution, &big).is_empty() {
        return Err("throughput run produced an infeasible solution".into());
    }
    let line = format!("3 identical runs; {} RnR iterations on 1000 requests in {:.1} s", out.rnr_iterations, wall.as_secs_f64());
    if out.rnr_iterations >= 5000 && wall <= Duration::from_secs(60) {
        Ok(line)
    } else {
        Err(line)
    }
}

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [(&str, &str, fn() -> Outcome, Option<Duration>); 12] = [
        ("1", "concatenation oracle", c1_concatenation, Some(Duration::from_secs(10))),
        ("2", "k-disjoint shortest paths optimality", c2_kdspp, Some(Duration::from_secs(30))),
        ("3", "micro-instance optimality", c3_micro, Some(Duration::from_secs(120))),
        ("4", "BS(k) exactness", c4_bs, Some(Duration::from_secs(60))),
        ("5", "pooling sequence optimality", c5_pooling, Some(Duration::from_secs(60))),
        ("6", "matching validity and bound", c6_matching, None),
        ("7", "taxi-mode exactness", c7_taxi, None),
        ("8", "operator feasibility fuzzing", c8_fuzz, None),
        ("9", "warm-start monotonicity", c9_warm_start, None),
        ("10a", "fleet minimization", c10_fleet, None),
        ("10b", "published benchmark solution", benchmark_check, None),
        ("11", "determinism and throughput", c11_determinism_throughput, None),
    ];
    let mut failed = 0;
    for (id, name, run, limit) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        let started = Instant::now();
        let mut res = run();
        let took = started.elapsed();
        if let (Ok(msg), Some(l)) = (&res, limit) {
            if took > l {
                res = Err(format!("{msg}; took {:.1} s, limit {} s", took.as_secs_f64(), l.as_secs()));
            }
        }
        match res {
            Ok(msg) => println!("criterion {id:>3} PASS  {name}: {msg} [{:.1} s]", took.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("criterion {id:>3} FAIL  {name}: {msg} [{:.1} s]", took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
