//! Native plain-text instance format.
//!
//! ```text
//! NAME <name>
//! REQUESTS <n>
//! VEHICLES <k>
//! CAPACITY <Q>
//! BUFFER <seconds>
//! SEED <u64 or ->
//! WINDOW_MODE <A|B|C|->
//! METRIC euclidean <speed> <half-up|floor|ceil>   or   METRIC explicit
//! LOCATIONS <m>
//! <x> <y>                                     (m lines)
//! NODES
//! <id> <P|D|S|E> <pair> <loc> <ready> <due> <service> <demand> <label>
//! COST / TIME                                 (explicit metric only, m rows each)
//! EOF
//! ```
//!
//! Node ids follow the canonical layout; `pair` is the partner node of a
//! pickup or delivery and the vehicle id of start and end nodes. Open window
//! bounds are written as `inf`.

use std::fmt::Write;

use crate::io::generator::euclidean_matrices;
use crate::io::{content_lines, parse_err, parse_num, IoError};
use crate::model::{
    Instance, InstanceSpec, Location, Matrix, Metric, NodeKind, RequestSpec, Rounding, VehicleSpec,
    WindowMode, TIME_INF,
};

fn time_str(t: i64) -> String {
    if t >= TIME_INF {
        "inf".into()
    } else {
        t.to_string()
    }
}

fn parse_time(line: usize, tok: &str) -> Result<i64, IoError> {
    if tok == "inf" {
        Ok(TIME_INF)
    } else {
        parse_num(line, tok, "time")
    }
}

pub fn write_instance(inst: &Instance) -> String {
    let spec = inst.spec();
    let mut s = String::new();
    let _ = writeln!(s, "NAME {}", spec.name);
    let _ = writeln!(s, "REQUESTS {}", inst.num_requests());
    let _ = writeln!(s, "VEHICLES {}", inst.num_vehicles());
    let _ = writeln!(s, "CAPACITY {}", spec.capacity);
    let _ = writeln!(s, "BUFFER {}", spec.buffer);
    let _ = writeln!(s, "SEED {}", spec.seed.map_or("-".into(), |v| v.to_string()));
    let _ = writeln!(s, "WINDOW_MODE {}", spec.window_mode.map_or('-', |m| m.letter()));
    match spec.metric {
        Metric::Explicit => s.push_str("METRIC explicit\n"),
        Metric::Euclidean { speed, rounding } => {
            let _ = writeln!(s, "METRIC euclidean {speed} {}", rounding.name());
        }
    }
    let _ = writeln!(s, "LOCATIONS {}", spec.locations.len());
    for l in &spec.locations {
        let _ = writeln!(s, "{} {}", l.x, l.y);
    }
    s.push_str("NODES\n");
    let n = inst.num_requests();
    for (id, node) in inst.nodes().iter().enumerate() {
        let (role, pair) = match node.kind {
            NodeKind::Pickup(r) => ('P', n + r),
            NodeKind::Delivery(r) => ('D', r),
            NodeKind::Start(v) => ('S', v),
            NodeKind::End(v) => ('E', v),
        };
        let _ = writeln!(
            s,
            "{id} {role} {pair} {} {} {} {} {} {}",
            node.loc,
            time_str(node.ready),
            time_str(node.due),
            node.service,
            node.demand,
            inst.label(id)
        );
    }
    if spec.metric == Metric::Explicit {
        for (title, m) in [("COST", &spec.cost), ("TIME", &spec.time)] {
            let _ = writeln!(s, "{title}");
            for i in 0..m.size() {
                let row: Vec<String> = m.row(i).iter().map(|v| v.to_string()).collect();
                let _ = writeln!(s, "{}", row.join(" "));
            }
        }
    }
    s.push_str("EOF\n");
    s
}

struct RawNode {
    line: usize,
    role: char,
    pair: usize,
    loc: usize,
    ready: i64,
    due: i64,
    service: i64,
    demand: i32,
    label: usize,
}

pub fn parse_instance(text: &str) -> Result<Instance, IoError> {
    let mut lines = content_lines(text).peekable();
    let mut header = |key: &str| -> Result<(usize, String), IoError> {
        match lines.next() {
            Some((ln, l)) => match l.split_once(char::is_whitespace) {
                Some((k, v)) if k == key => Ok((ln, v.trim().to_string())),
                None if l == key => Ok((ln, String::new())),
                _ => parse_err(ln, format!("expected {key}")),
            },
            None => parse_err(0, format!("missing {key}")),
        }
    };
    let name = header("NAME")?.1;
    let (ln, v) = header("REQUESTS")?;
    let n: usize = parse_num(ln, &v, "request count")?;
    let (ln, v) = header("VEHICLES")?;
    let k: usize = parse_num(ln, &v, "vehicle count")?;
    let (ln, v) = header("CAPACITY")?;
    let capacity: i32 = parse_num(ln, &v, "capacity")?;
    let (ln, v) = header("BUFFER")?;
    let buffer: i64 = parse_num(ln, &v, "buffer")?;
    let (ln, v) = header("SEED")?;
    let seed = if v == "-" { None } else { Some(parse_num(ln, &v, "seed")?) };
    let (ln, v) = header("WINDOW_MODE")?;
    let window_mode = match v.as_str() {
        "-" => None,
        s => Some(WindowMode::from_letter(s).ok_or(IoError::Parse { line: ln, msg: format!("bad window mode '{s}'") })?),
    };
    let (ln, v) = header("METRIC")?;
    let toks: Vec<&str> = v.split_whitespace().collect();
    let metric = match toks.as_slice() {
        ["explicit"] => Metric::Explicit,
        ["euclidean", speed, rounding] => Metric::Euclidean {
            speed: parse_num(ln, speed, "speed")?,
            rounding: Rounding::from_name(rounding)
                .ok_or(IoError::Parse { line: ln, msg: format!("bad rounding '{rounding}'") })?,
        },
        _ => return parse_err(ln, "bad METRIC line"),
    };
    let (ln, v) = header("LOCATIONS")?;
    let m: usize = parse_num(ln, &v, "location count")?;
    drop(header);

    let mut locations = Vec::with_capacity(m);
    for _ in 0..m {
        let Some((ln, l)) = lines.next() else { return parse_err(0, "truncated LOCATIONS") };
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 2 {
            return parse_err(ln, "expected '<x> <y>'");
        }
        locations.push(Location { x: parse_num(ln, t[0], "x")?, y: parse_num(ln, t[1], "y")? });
    }
    match lines.next() {
        Some((_, "NODES")) => {}
        Some((ln, _)) => return parse_err(ln, "expected NODES"),
        None => return parse_err(0, "missing NODES"),
    }
    let mut raw = Vec::new();
    while let Some(&(ln, l)) = lines.peek() {
        if matches!(l, "COST" | "TIME" | "EOF") {
            break;
        }
        lines.next();
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 9 {
            return parse_err(ln, "node line needs 9 fields");
        }
        let id: usize = parse_num(ln, t[0], "node id")?;
        if id != raw.len() {
            return parse_err(ln, format!("node ids must be consecutive, expected {}", raw.len()));
        }
        let role = match t[1] {
            "P" | "D" | "S" | "E" => t[1].chars().next().unwrap(),
            other => return parse_err(ln, format!("unknown role '{other}'")),
        };
        raw.push(RawNode {
            line: ln,
            role,
            pair: parse_num(ln, t[2], "pair")?,
            loc: parse_num(ln, t[3], "location")?,
            ready: parse_time(ln, t[4])?,
            due: parse_time(ln, t[5])?,
            service: parse_num(ln, t[6], "service")?,
            demand: parse_num(ln, t[7], "demand")?,
            label: parse_num(ln, t[8], "label")?,
        });
    }
    let closed = raw.len() == 2 * n + 2 * k;
    if raw.len() != 2 * n + k && !closed {
        return parse_err(0, format!("expected {} or {} nodes, found {}", 2 * n + k, 2 * n + 2 * k, raw.len()));
    }
    let expect_role = |i: usize| match i {
        i if i < n => 'P',
        i if i < 2 * n => 'D',
        i if i < 2 * n + k => 'S',
        _ => 'E',
    };
    for (i, r) in raw.iter().enumerate() {
        if r.role != expect_role(i) {
            return parse_err(r.line, format!("node {i} should have role {}", expect_role(i)));
        }
        let pair_ok = match r.role {
            'P' => r.pair == n + i,
            'D' => r.pair + n == i,
            'S' => r.pair == i - 2 * n,
            _ => r.pair == i - 2 * n - k,
        };
        if !pair_ok {
            return parse_err(r.line, format!("node {i} has inconsistent pair {}", r.pair));
        }
        if r.loc >= m {
            return parse_err(r.line, format!("unknown location {}", r.loc));
        }
    }
    let requests = (0..n)
        .map(|r| {
            let (p, d) = (&raw[r], &raw[n + r]);
            RequestSpec {
                pickup_loc: p.loc,
                delivery_loc: d.loc,
                pickup_window: (p.ready, p.due),
                delivery_window: (d.ready, d.due),
                pickup_service: p.service,
                delivery_service: d.service,
                demand: p.demand,
                labels: (p.label, d.label),
            }
        })
        .collect();
    let vehicles = (0..k)
        .map(|v| {
            let s = &raw[2 * n + v];
            VehicleSpec {
                start_loc: s.loc,
                window: (s.ready, s.due),
                end: closed.then(|| {
                    let e = &raw[2 * n + k + v];
                    (e.loc, (e.ready, e.due))
                }),
            }
        })
        .collect();
    let (cost, time) = match metric {
        Metric::Euclidean { speed, rounding } => euclidean_matrices(&locations, speed, rounding),
        Metric::Explicit => {
            let mut read_matrix = |title: &str| -> Result<Matrix, IoError> {
                match lines.next() {
                    Some((_, l)) if l == title => {}
                    Some((ln, _)) => return parse_err(ln, format!("expected {title}")),
                    None => return parse_err(0, format!("missing {title}")),
                }
                let mut data = Vec::with_capacity(m * m);
                for _ in 0..m {
                    let Some((ln, l)) = lines.next() else { return parse_err(0, format!("truncated {title}")) };
                    let row: Vec<i64> =
                        l.split_whitespace().map(|t| parse_num(ln, t, "matrix entry")).collect::<Result<_, _>>()?;
                    if row.len() != m {
                        return parse_err(ln, format!("{title} row has {} entries, expected {m}", row.len()));
                    }
                    data.extend(row);
                }
                Ok(Matrix::new(m, data)?)
            };
            let cost = read_matrix("COST")?;
            let time = read_matrix("TIME")?;
            (cost, time)
        }
    };
    match lines.next() {
        Some((_, "EOF")) => {}
        Some((ln, _)) => return parse_err(ln, "expected EOF"),
        None => return parse_err(0, "missing EOF"),
    }
    if raw.iter().skip(2 * n).any(|r| r.demand != 0 || r.service != 0) {
        return parse_err(0, "vehicle nodes must have zero demand and service");
    }
    for r in 0..n {
        if raw[n + r].demand != -raw[r].demand {
            return parse_err(raw[n + r].line, "delivery demand must negate its pickup");
        }
    }
    let inst = Instance::new(InstanceSpec {
        name,
        locations,
        cost,
        time,
        requests,
        vehicles,
        capacity,
        buffer,
        window_mode,
        metric,
        seed,
    })?;
    for (i, r) in raw.iter().enumerate().skip(2 * n) {
        if inst.label(i) != r.label {
            return parse_err(r.line, "vehicle node label must equal its location");
        }
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generator::{generate, GeneratorConfig};

    #[test]
    fn generated_round_trip() {
        let inst = generate(&GeneratorConfig { requests: 25, vehicles: 4, ..Default::default() }).unwrap();
        let text = write_instance(&inst);
        let back = parse_instance(&text).unwrap();
        assert_eq!(back.nodes(), inst.nodes());
        assert_eq!(back.spec().cost, inst.spec().cost);
        assert_eq!(back.spec().time, inst.spec().time);
        assert_eq!(write_instance(&back), text);
    }

    #[test]
    fn explicit_round_trip() {
        let inst = crate::model::tests::line_instance(&[0, 3, 9], &[(1, 2, (0, 50), (3, TIME_INF))], &[0, 2], 2);
        let text = write_instance(&inst);
        assert!(text.contains("COST"));
        let back = parse_instance(&text).unwrap();
        assert_eq!(write_instance(&back), text);
    }

    #[test]
    fn rejects_wrong_pair() {
        let inst = crate::model::tests::line_instance(&[0, 3, 9], &[(1, 2, (0, 50), (3, 60))], &[0], 2);
        let text = write_instance(&inst).replace("0 P 1 ", "0 P 0 ");
        assert!(matches!(parse_instance(&text), Err(IoError::Parse { .. })));
    }
}
