//! Run configuration: tuned defaults, overridden by a TOML file and then by
//! `key=value` parameters.

use std::path::Path;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use ridepool::dispatch::{ConnectionLimits, StartPolicy};
use ridepool::pooling::{MatchingMethod, WeightFn};
use ridepool::solver::{Mode, SolverConfig};

/// Every key accepted by [`set_param`] with a short description.
pub const PARAM_KEYS: &[(&str, &str)] = &[
    ("mode", "sequential | integrated | hybrid | classic-fleetmin"),
    ("seed", "master random seed"),
    ("time_limit", "wall clock limit in seconds"),
    ("workers", "worker threads, 0 = available parallelism"),
    ("ils.max_iterations", "iteration cap, 0 = none"),
    ("ils.rnr_budget", "stop after this many ruin-recreate iterations, 0 = none"),
    ("ils.planned_iterations", "planned local search iterations (threshold schedule)"),
    ("ils.chi", "average route nodes per subproblem"),
    ("ils.perturb_moves", "perturbation moves, 0 = ceil(1.66 |R|)"),
    ("ils.relocate_share", "share of relocations among perturbation moves"),
    ("ils.t_init", "initial record-to-record threshold"),
    ("ils.bs_k", "BS(k) window, 0 disables"),
    ("ils.bs_thickness", "labels kept per BS vertex, 0 = unlimited"),
    ("ils.limits", "true | false: connection limits in recombination"),
    ("rnr.iterations", "ruin-recreate iterations per subproblem"),
    ("rnr.avg_removed", "average removed nodes"),
    ("rnr.max_string_len", "maximum string length"),
    ("rnr.split_prob", "probability of a plain split"),
    ("rnr.substring_prob", "preserved substring growth probability"),
    ("rnr.blink", "blink rate"),
    ("rnr.sort_weights", "six comma separated roulette weights"),
    ("rnr.insert_limit", "requests reinserted per call"),
    ("pool.rank", "maximum requests per pooled ride"),
    ("pool.weight", "cardinality | cost | overlap | combined"),
    ("pool.rho", "combined weight coefficient"),
    ("pool.matching", "wsc | greedy | wsp | randomized"),
    ("pool.start_policy", "earliest | average | latest"),
    ("pool.limits", "true | false: connection limits in dispatching"),
    ("limits.distance", "maximum connection cost between blocks"),
    ("limits.time", "maximum idle time between blocks"),
    ("ages.lambda", "penalty decay factor"),
    ("ages.max_perturbations", "perturbations per route elimination attempt"),
    ("ages.perturb_moves", "moves per perturbation"),
    ("ages.relocate_share", "share of relocations among perturbation moves"),
];

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| anyhow!("bad value '{v}' for {key}"))
}

fn flag(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "on" | "1" | "yes" => Ok(true),
        "false" | "off" | "0" | "no" => Ok(false),
        _ => bail!("bad value '{v}' for {key}, expected true or false"),
    }
}

fn limits_mut(cfg: &mut SolverConfig) -> (&mut Option<ConnectionLimits>, &mut Option<ConnectionLimits>) {
    (&mut cfg.ils.limits, &mut cfg.matheuristic.limits)
}

pub fn set_param(cfg: &mut SolverConfig, key: &str, v: &str) -> Result<()> {
    let rho = match cfg.matheuristic.weight {
        WeightFn::Combined { rho } => rho,
        _ => 0.7,
    };
    match key {
        "mode" => cfg.mode = Mode::parse(v.trim()).ok_or_else(|| anyhow!("unknown mode '{v}'"))?,
        "seed" => cfg.seed = num(key, v)?,
        "time_limit" => cfg.ils.time_limit = Duration::from_secs_f64(num(key, v)?),
        "workers" => cfg.ils.workers = num(key, v)?,
        "ils.max_iterations" => cfg.ils.max_iterations = Some(num::<u64>(key, v)?).filter(|&m| m > 0),
        "ils.rnr_budget" => cfg.ils.rnr_budget = Some(num::<u64>(key, v)?).filter(|&m| m > 0),
        "ils.planned_iterations" => cfg.ils.planned_iterations = num(key, v)?,
        "ils.chi" => cfg.ils.chi = num(key, v)?,
        "ils.perturb_moves" => cfg.ils.perturb_moves = Some(num::<usize>(key, v)?).filter(|&m| m > 0),
        "ils.relocate_share" => cfg.ils.relocate_share = num(key, v)?,
        "ils.t_init" => cfg.ils.t_init = num(key, v)?,
        "ils.bs_k" => cfg.ils.bs_k = Some(num::<usize>(key, v)?).filter(|&k| k > 0),
        "ils.bs_thickness" => cfg.ils.bs_thickness = Some(num::<usize>(key, v)?).filter(|&k| k > 0),
        "ils.limits" => cfg.ils.limits = flag(key, v)?.then(ConnectionLimits::default),
        "rnr.iterations" => cfg.ils.rnr.iterations = num(key, v)?,
        "rnr.avg_removed" => cfg.ils.rnr.avg_removed = num(key, v)?,
        "rnr.max_string_len" => cfg.ils.rnr.max_string_len = num(key, v)?,
        "rnr.split_prob" => cfg.ils.rnr.split_prob = num(key, v)?,
        "rnr.substring_prob" => cfg.ils.rnr.substring_prob = num(key, v)?,
        "rnr.blink" => cfg.ils.rnr.blink = num(key, v)?,
        "rnr.sort_weights" => {
            let w: Vec<f64> = v.split(',').map(|x| num(key, x)).collect::<Result<_>>()?;
            cfg.ils.rnr.sort_weights = w.try_into().map_err(|_| anyhow!("{key} needs exactly six weights"))?;
        }
        "rnr.insert_limit" => cfg.ils.rnr.insert_limit = num(key, v)?,
        "pool.rank" => cfg.matheuristic.rank = num(key, v)?,
        "pool.weight" => {
            cfg.matheuristic.weight = WeightFn::parse(v.trim(), rho).ok_or_else(|| anyhow!("unknown weight '{v}'"))?
        }
        "pool.rho" => {
            let rho: f64 = num(key, v)?;
            if let WeightFn::Combined { .. } = cfg.matheuristic.weight {
                cfg.matheuristic.weight = WeightFn::Combined { rho };
            }
        }
        "pool.matching" => {
            cfg.matheuristic.matching =
                MatchingMethod::parse(v.trim()).ok_or_else(|| anyhow!("unknown matching '{v}'"))?
        }
        "pool.start_policy" => {
            cfg.matheuristic.start_policy =
                StartPolicy::parse(v.trim()).ok_or_else(|| anyhow!("unknown start policy '{v}'"))?
        }
        "pool.limits" => cfg.matheuristic.limits = flag(key, v)?.then(ConnectionLimits::default),
        "limits.distance" | "limits.time" => {
            let x: i64 = num(key, v)?;
            let (a, b) = limits_mut(cfg);
            for l in [a, b].into_iter().flatten() {
                if key == "limits.distance" {
                    l.distance = x;
                } else {
                    l.time = x;
                }
            }
        }
        "ages.lambda" => cfg.ages.lambda = num(key, v)?,
        "ages.max_perturbations" => cfg.ages.max_perturbations = num(key, v)?,
        "ages.perturb_moves" => cfg.ages.perturb_moves = num(key, v)?,
        "ages.relocate_share" => cfg.ages.relocate_share = num(key, v)?,
        _ => bail!("unknown parameter '{key}' (see `ridepool params`)"),
    }
    Ok(())
}

/// Applies a `key=value` string.
pub fn apply_assignment(cfg: &mut SolverConfig, s: &str) -> Result<()> {
    let (k, v) = s.split_once('=').ok_or_else(|| anyhow!("expected key=value, got '{s}'"))?;
    set_param(cfg, k.trim(), v)
}

fn flatten(prefix: &str, value: &toml::Value, out: &mut Vec<(String, String)>) {
    match value {
        toml::Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        toml::Value::String(s) => out.push((prefix.to_string(), s.clone())),
        toml::Value::Array(a) => {
            let items: Vec<String> = a.iter().map(|x| x.to_string().trim_matches('"').to_string()).collect();
            out.push((prefix.to_string(), items.join(",")));
        }
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// Applies every key of a TOML document; nested tables map to dotted keys.
pub fn apply_toml(cfg: &mut SolverConfig, text: &str) -> Result<()> {
    let doc: toml::Value = toml::from_str(text).context("parsing config file")?;
    let mut pairs = Vec::new();
    flatten("", &doc, &mut pairs);
    for (k, v) in pairs {
        set_param(cfg, &k, &v).with_context(|| format!("config key {k}"))?;
    }
    Ok(())
}

pub fn load_toml(cfg: &mut SolverConfig, path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    apply_toml(cfg, &text)
}
