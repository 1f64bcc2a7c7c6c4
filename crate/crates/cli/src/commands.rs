//! Subcommand implementations. Each returns `Ok(false)` for a clean run
//! with a negative verdict (e.g. violations found).

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::Args;
use ridepool::io::{
    generate as gen_instance, parse_benchmark, parse_instance, parse_solution, read_file, write_file, write_instance,
    write_solution, GeneratorConfig, ReportRow, REPORT_HEADER,
};
use ridepool::model::{validate as check, Instance, Rounding, Solution, WindowMode};
use ridepool::solver::{solve as run_solver, SolverConfig};
use ridepool::stats::{solution_stats, STATS_HEADER};

use crate::config::{apply_assignment, load_toml};
use crate::{Format, InstanceArgs, SolverArgs};

pub fn load_instance(args: &InstanceArgs) -> Result<Instance> {
    let text = read_file(&args.instance)?;
    let benchmark = match args.format {
        Format::Benchmark => true,
        Format::Native => false,
        Format::Auto => text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .is_some_and(|l| l.contains(':')),
    };
    let mut inst = if benchmark {
        parse_benchmark(&text, args.fleet)?
    } else {
        let inst = parse_instance(&text)?;
        match args.fleet {
            Some(k) if k < inst.num_vehicles() => {
                let mut spec = inst.spec().clone();
                spec.vehicles.truncate(k);
                Instance::new(spec)?
            }
            Some(k) if k > inst.num_vehicles() => bail!("instance has only {} vehicles", inst.num_vehicles()),
            _ => inst,
        }
    };
    if let Some(q) = args.capacity {
        let mut spec = inst.spec().clone();
        spec.capacity = q;
        inst = Instance::new(spec)?;
    }
    if let Some(d) = args.delta {
        inst = inst.with_buffer(d)?;
    }
    Ok(inst)
}

pub fn solver_config(args: &SolverArgs) -> Result<SolverConfig> {
    let mut cfg = SolverConfig::default();
    if let Some(p) = &args.config {
        load_toml(&mut cfg, p)?;
    }
    for a in &args.params {
        if !a.trim().is_empty() {
            apply_assignment(&mut cfg, a)?;
        }
    }
    if let Some(m) = &args.mode {
        apply_assignment(&mut cfg, &format!("mode={m}"))?;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.time_limit {
        cfg.ils.time_limit = Duration::from_secs_f64(t);
    }
    if let Some(w) = args.workers {
        cfg.ils.workers = w;
    }
    Ok(cfg)
}

fn append_rows(path: &Path, rows: &[String]) -> Result<()> {
    let fresh = !path.exists() || std::fs::metadata(path)?.len() == 0;
    let mut f = OpenOptions::new().create(true).append(true).open(path).with_context(|| format!("opening {}", path.display()))?;
    if fresh {
        writeln!(f, "{REPORT_HEADER}")?;
    }
    for r in rows {
        writeln!(f, "{r}")?;
    }
    Ok(())
}

fn report_row(inst: &Instance, cfg: &SolverConfig, sol: &Solution, wall: f64, ils: u64, rnr: u64) -> String {
    let obj = sol.objective(inst);
    ReportRow {
        instance: inst.name().to_string(),
        mode: cfg.mode.name().to_string(),
        seed: cfg.seed,
        unassigned: obj.unassigned,
        cost: obj.cost,
        vehicles_used: sol.routes_used(),
        wall_time_s: wall,
        ils_iterations: ils,
        rnr_iterations: rnr,
    }
    .to_csv()
}

/// Solves once; returns the solution and its report row.
fn solve_once(inst: &Instance, cfg: &SolverConfig, warm: Option<Solution>, progress: Option<&Path>) -> Result<(Solution, String)> {
    let mut lines = vec!["iteration,unassigned,cost,routes_used,elapsed_s,rnr_iterations".to_string()];
    let out = run_solver(inst, cfg, warm, &mut |p| {
        lines.push(format!(
            "{},{},{},{},{:.3},{}",
            p.iteration,
            p.best.unassigned,
            p.best.cost,
            p.routes_used,
            p.elapsed.as_secs_f64(),
            p.rnr_iterations
        ))
    })?;
    let violations = check(&out.solution, inst);
    if let Some(v) = violations.first() {
        bail!("solver produced an infeasible solution: {v}");
    }
    if let Some(p) = progress {
        write_file(p, &(lines.join("\n") + "\n"))?;
    }
    let row = report_row(inst, cfg, &out.solution, out.wall_time.as_secs_f64(), out.ils_iterations, out.rnr_iterations);
    Ok((out.solution, row))
}

pub fn solve(
    iargs: &InstanceArgs,
    sargs: &SolverArgs,
    out: Option<&Path>,
    warm: Option<&Path>,
    report: Option<&Path>,
    progress: Option<&Path>,
) -> Result<bool> {
    let inst = load_instance(iargs)?;
    let cfg = solver_config(sargs)?;
    let warm = match warm {
        Some(p) => Some(parse_solution(&read_file(p)?, &inst)?),
        None => None,
    };
    let (sol, row) = solve_once(&inst, &cfg, warm, progress)?;
    let text = write_solution(&sol);
    match out {
        Some(p) => write_file(p, &text)?,
        None => print!("{text}"),
    }
    if let Some(r) = report {
        append_rows(r, &[row.clone()])?;
    }
    eprintln!("{REPORT_HEADER}\n{row}");
    Ok(true)
}

pub fn validate(iargs: &InstanceArgs, solution: &Path) -> Result<bool> {
    let inst = load_instance(iargs)?;
    let sol = parse_solution(&read_file(solution)?, &inst)?;
    let violations = check(&sol, &inst);
    if violations.is_empty() {
        let obj = sol.objective(&inst);
        println!("feasible unassigned={} cost={} vehicles_used={}", obj.unassigned, obj.cost, sol.routes_used());
        Ok(true)
    } else {
        for v in &violations {
            println!("violation: {v}");
        }
        Ok(false)
    }
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 100)]
    requests: usize,
    #[arg(long, default_value_t = 10)]
    vehicles: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    capacity: Option<i32>,
    /// Buffer in seconds.
    #[arg(long)]
    buffer: Option<i64>,
    /// Horizon in seconds.
    #[arg(long)]
    horizon: Option<i64>,
    /// Side of the square service area in metres.
    #[arg(long)]
    side: Option<f64>,
    /// Speed in metres per second.
    #[arg(long)]
    speed: Option<f64>,
    /// Window mode letter: A (fixed both), B (fixed pickup), C (flexible).
    #[arg(long)]
    window_mode: Option<String>,
    /// half-up | floor | ceil
    #[arg(long)]
    rounding: Option<String>,
    #[arg(long, short)]
    out: Option<std::path::PathBuf>,
}

pub fn generate(args: &GenerateArgs) -> Result<bool> {
    let mut cfg = GeneratorConfig { requests: args.requests, vehicles: args.vehicles, seed: args.seed, ..GeneratorConfig::default() };
    if let Some(q) = args.capacity {
        cfg.capacity = q;
    }
    if let Some(b) = args.buffer {
        cfg.buffer = b;
    }
    if let Some(h) = args.horizon {
        cfg.horizon = h;
    }
    if let Some(s) = args.side {
        cfg.side = s;
    }
    if let Some(s) = args.speed {
        cfg.speed = s;
    }
    if let Some(m) = &args.window_mode {
        cfg.window_mode = WindowMode::from_letter(m).with_context(|| format!("unknown window mode '{m}'"))?;
    }
    if let Some(r) = &args.rounding {
        cfg.rounding = Rounding::from_name(r).with_context(|| format!("unknown rounding '{r}'"))?;
    }
    let inst = gen_instance(&cfg)?;
    let text = write_instance(&inst);
    match &args.out {
        Some(p) => write_file(p, &text)?,
        None => print!("{text}"),
    }
    Ok(true)
}

pub fn stats(iargs: &InstanceArgs, solution: &Path, per_route: bool) -> Result<bool> {
    let inst = load_instance(iargs)?;
    let sol = parse_solution(&read_file(solution)?, &inst)?;
    if let Some(v) = check(&sol, &inst).first() {
        bail!("solution is infeasible: {v}");
    }
    let s = solution_stats(&sol, &inst);
    println!("{STATS_HEADER}\n{}", s.to_csv());
    if per_route {
        println!("vehicle,requests,width,blocks");
        for (v, r) in s.routes.iter().enumerate().filter(|(_, r)| r.requests > 0) {
            println!("{v},{},{},{}", r.requests, r.width, r.blocks);
        }
    }
    Ok(true)
}

pub fn bench(
    iargs: &InstanceArgs,
    sargs: &SolverArgs,
    deltas: &[i64],
    out_dir: Option<&Path>,
    report: Option<&Path>,
) -> Result<bool> {
    let base = load_instance(&InstanceArgs { delta: None, ..iargs.clone() })?;
    let cfg = solver_config(sargs)?;
    if let Some(d) = out_dir {
        std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    let mut warm: Option<Solution> = None;
    let mut rows = Vec::new();
    println!("{REPORT_HEADER},delta,warm_started");
    for &delta in deltas {
        let inst = base.with_buffer(delta)?;
        let start = warm.take().filter(|w| check(w, &inst).is_empty());
        let warm_started = start.is_some();
        let (sol, row) = solve_once(&inst, &cfg, start, None)?;
        println!("{row},{delta},{warm_started}");
        if let Some(d) = out_dir {
            write_file(&d.join(format!("{}_delta{delta}.sol", inst.name())), &write_solution(&sol))?;
        }
        rows.push(row);
        warm = Some(sol);
    }
    if let Some(r) = report {
        append_rows(r, &rows)?;
    }
    Ok(true)
}
