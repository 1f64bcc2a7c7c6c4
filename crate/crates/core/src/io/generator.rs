//! Synthetic ride-hailing instances on a Euclidean square.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    Instance, InstanceSpec, Location, Matrix, Metric, ModelError, RequestSpec, Rounding, VehicleSpec,
    WindowMode, TIME_INF,
};

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub requests: usize,
    pub vehicles: usize,
    pub capacity: i32,
    /// Buffer in seconds.
    pub buffer: i64,
    /// Length of the dropoff horizon in seconds.
    pub horizon: i64,
    /// Side of the square service area in metres.
    pub side: f64,
    /// Metres per second.
    pub speed: f64,
    pub window_mode: WindowMode,
    pub rounding: Rounding,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            requests: 100,
            vehicles: 20,
            capacity: 3,
            buffer: 120,
            horizon: 3600,
            side: 5000.0,
            speed: 20.0 / 3.6,
            window_mode: WindowMode::Flexible,
            rounding: Rounding::HalfUp,
            seed: 1,
        }
    }
}

/// Euclidean cost (metres) and time (seconds) matrices over locations.
pub fn euclidean_matrices(locations: &[Location], speed: f64, rounding: Rounding) -> (Matrix, Matrix) {
    let n = locations.len();
    let dist = |i: usize, j: usize| {
        let (a, b) = (locations[i], locations[j]);
        ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
    };
    let cost = Matrix::from_fn(n, |i, j| rounding.apply(dist(i, j)));
    let time = Matrix::from_fn(n, |i, j| rounding.apply(dist(i, j) / speed));
    (cost, time)
}

/// Draws an instance. Each request gets uniform origin and destination
/// points and a dropoff time uniform in `[t(p,d), horizon]`; its earliest
/// pickup is the dropoff minus the direct travel time. Vehicles start at the
/// destinations of randomly chosen requests.
pub fn generate(cfg: &GeneratorConfig) -> Result<Instance, ModelError> {
    if cfg.requests == 0 || cfg.vehicles == 0 {
        return Err(ModelError::InvalidInstance("generator needs at least one request and one vehicle".into()));
    }
    if !(cfg.speed > 0.0) || !(cfg.side > 0.0) || cfg.horizon < 0 {
        return Err(ModelError::InvalidInstance("speed, area side and horizon must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.requests;
    let mut locations = Vec::with_capacity(2 * n);
    for _ in 0..2 * n {
        locations.push(Location { x: rng.gen_range(0.0..=cfg.side), y: rng.gen_range(0.0..=cfg.side) });
    }
    let (cost, time) = euclidean_matrices(&locations, cfg.speed, cfg.rounding);
    let mut requests = Vec::with_capacity(n);
    for r in 0..n {
        let (p, d) = (2 * r, 2 * r + 1);
        let direct = time.get(p, d);
        let dropoff = if direct >= cfg.horizon { direct } else { rng.gen_range(direct..=cfg.horizon) };
        let (pw, dw) = cfg.window_mode.windows(dropoff - direct, direct, cfg.buffer);
        requests.push(RequestSpec {
            pickup_loc: p,
            delivery_loc: d,
            pickup_window: pw,
            delivery_window: dw,
            pickup_service: 0,
            delivery_service: 0,
            demand: 1,
            labels: (p, d),
        });
    }
    let vehicles = (0..cfg.vehicles)
        .map(|_| VehicleSpec { start_loc: 2 * rng.gen_range(0..n) + 1, window: (0, TIME_INF), end: None })
        .collect();
    Instance::new(InstanceSpec {
        name: format!("synthetic-n{}-k{}-s{}", cfg.requests, cfg.vehicles, cfg.seed),
        locations,
        cost,
        time,
        requests,
        vehicles,
        capacity: cfg.capacity,
        buffer: cfg.buffer,
        window_mode: Some(cfg.window_mode),
        metric: Metric::Euclidean { speed: cfg.speed, rounding: cfg.rounding },
        seed: Some(cfg.seed),
    })
}
