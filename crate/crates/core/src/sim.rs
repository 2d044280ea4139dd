//! Euler–Maruyama simulation of the controlled inventory under regime
//! switching.
//!
//! Per step, in this order: regime update from one uniform draw
//! (`P(1→2) = a₁ dt`, `P(2→1) = a₂ dt`), feedback rate lookup, then the
//! state update `y ← y + p* Δt + σ_ε √Δt ξ` with `ξ ~ N(0,1)`. The walk
//! stops at the first sample with `|y| ≥ R` or when the horizon runs out.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::model::{Regime, RegimeParameters};
use crate::policy::PolicyResult;

/// How the feedback rate is read off the policy grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    /// Value of the nearest node, ties to the lower index.
    #[default]
    Nearest,
    Linear,
}

/// Simulation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub t_max: f64,
    pub x0: f64,
    pub seed: u64,
    pub n_paths: usize,
    pub interpolation: Interpolation,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 0.01,
            t_max: 100.0,
            x0: 0.0,
            seed: 0,
            n_paths: 1,
            interpolation: Interpolation::Nearest,
        }
    }
}

impl SimConfig {
    /// Validates step, horizon, start point, and one-step probabilities.
    pub fn validate(&self, params: &RegimeParameters) -> Result<(), Error> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::invalid("dt must be > 0"));
        }
        if self.dt > self.t_max {
            return Err(Error::invalid("dt must not exceed t_max"));
        }
        if !(self.x0.abs() < params.radius) {
            return Err(Error::invalid("x0 must satisfy |x0| < R"));
        }
        if params.a1 * self.dt >= 1.0 {
            return Err(Error::invalid("a1 * dt must be < 1"));
        }
        if params.a2 * self.dt >= 1.0 {
            return Err(Error::invalid("a2 * dt must be < 1"));
        }
        if self.n_paths == 0 {
            return Err(Error::invalid("n_paths must be >= 1"));
        }
        Ok(())
    }
}

/// Why a path ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Boundary,
    Horizon,
}

/// One simulated path.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// `(t, y, regime)` samples, starting at `(0, x0, regime 1)`.
    pub samples: Vec<(f64, f64, Regime)>,
    /// True when the boundary was hit before the horizon.
    pub stopped: bool,
    pub stop_time: Option<f64>,
    pub stop_reason: StopReason,
}

/// One-step regime transition given a uniform draw in `[0, 1)`.
pub fn step_regime(current: Regime, dt: f64, a1: f64, a2: f64, uniform_draw: f64) -> Regime {
    match current {
        Regime::One if uniform_draw < a1 * dt => Regime::Two,
        Regime::Two if uniform_draw < a2 * dt => Regime::One,
        r => r,
    }
}

/// Feedback rate at inventory `y` in the given regime.
pub fn interpolate_rate(
    policy: &PolicyResult,
    y: f64,
    regime: Regime,
    interpolation: Interpolation,
) -> Result<f64, Error> {
    let grid = &policy.grid;
    if y.abs() > grid.radius {
        return Err(Error::invalid("inventory outside the policy grid"));
    }
    let p = match regime {
        Regime::One => &policy.p1,
        Regime::Two => &policy.p2,
    };
    let n = grid.n_points;
    let pos = (y - grid.nodes[0]) / grid.dx;
    let i0 = (pos.floor() as usize).min(n - 2);
    match interpolation {
        Interpolation::Nearest => {
            let d0 = (y - grid.nodes[i0]).abs();
            let d1 = (grid.nodes[i0 + 1] - y).abs();
            Ok(if d0 <= d1 { p[i0] } else { p[i0 + 1] })
        }
        Interpolation::Linear => {
            let w = ((y - grid.nodes[i0]) / grid.dx).clamp(0.0, 1.0);
            Ok(p[i0] * (1.0 - w) + p[i0 + 1] * w)
        }
    }
}

fn run_path(
    policy: &PolicyResult,
    params: &RegimeParameters,
    config: &SimConfig,
    seed: u64,
) -> Result<Trajectory, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = params.radius;
    let dt = config.dt;
    let sqrt_dt = dt.sqrt();
    let mut t = 0.0f64;
    let mut y = config.x0;
    let mut regime = Regime::One;
    let mut samples = vec![(t, y, regime)];
    while y.abs() < r && t < config.t_max {
        let draw: f64 = rng.gen();
        regime = step_regime(regime, dt, params.a1, params.a2, draw);
        let rate = interpolate_rate(policy, y.clamp(-r, r), regime, config.interpolation)?;
        let noise: f64 = rng.sample(StandardNormal);
        y += rate * dt + params.sigma(regime) * sqrt_dt * noise;
        t += dt;
        samples.push((t, y, regime));
    }
    let hit_boundary = y.abs() >= r;
    Ok(Trajectory {
        samples,
        stopped: hit_boundary,
        stop_time: hit_boundary.then_some(t),
        stop_reason: if hit_boundary {
            StopReason::Boundary
        } else {
            StopReason::Horizon
        },
    })
}

/// Simulates a single path from `config.seed`.
pub fn simulate_path(
    policy: &PolicyResult,
    params: &RegimeParameters,
    config: &SimConfig,
) -> Result<Trajectory, Error> {
    config.validate(params)?;
    run_path(policy, params, config, config.seed)
}

/// Histogram of final inventory levels.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
}

/// Aggregate statistics over `n_paths` independent paths (seeds
/// `seed + k`, aggregated in ascending path order).
#[derive(Debug, Clone)]
pub struct EnsembleSummary {
    pub n_paths: usize,
    pub stop_reasons: Vec<StopReason>,
    /// Boundary-exit times per path; `None` for horizon stops.
    pub stop_times: Vec<Option<f64>>,
    pub final_states: Vec<f64>,
    pub boundary_exits: usize,
    pub mean_boundary_stop_time: Option<f64>,
    pub var_boundary_stop_time: Option<f64>,
    /// Fraction of all samples spent in regime 1.
    pub occupation_regime1: f64,
    /// Time-and-path average of `|y|`.
    pub mean_abs_y: f64,
    pub final_histogram: Histogram,
}

/// Runs the ensemble and aggregates per-path outcomes.
pub fn ensemble_stats(
    policy: &PolicyResult,
    params: &RegimeParameters,
    config: &SimConfig,
) -> Result<EnsembleSummary, Error> {
    config.validate(params)?;
    let mut stop_reasons = Vec::with_capacity(config.n_paths);
    let mut stop_times = Vec::with_capacity(config.n_paths);
    let mut final_states = Vec::with_capacity(config.n_paths);
    let mut regime1_samples = 0usize;
    let mut total_samples = 0usize;
    let mut abs_sum = 0.0f64;
    for k in 0..config.n_paths {
        let path = run_path(policy, params, config, config.seed.wrapping_add(k as u64))?;
        for &(_, y, regime) in &path.samples {
            if regime == Regime::One {
                regime1_samples += 1;
            }
            abs_sum += y.abs();
        }
        total_samples += path.samples.len();
        stop_reasons.push(path.stop_reason);
        stop_times.push(path.stop_time);
        final_states.push(path.samples.last().expect("non-empty path").1);
    }
    let boundary: Vec<f64> = stop_times.iter().flatten().copied().collect();
    let boundary_exits = boundary.len();
    let (mean, var) = if boundary.is_empty() {
        (None, None)
    } else {
        let m = boundary.iter().sum::<f64>() / boundary_exits as f64;
        let v = boundary.iter().map(|t| (t - m) * (t - m)).sum::<f64>() / boundary_exits as f64;
        (Some(m), Some(v))
    };
    let lo = -1.05 * params.radius;
    let hi = 1.05 * params.radius;
    let bins = 21;
    let mut counts = vec![0usize; bins];
    for &y in &final_states {
        let idx = (((y - lo) / (hi - lo) * bins as f64) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(EnsembleSummary {
        n_paths: config.n_paths,
        stop_reasons,
        stop_times,
        final_states,
        boundary_exits,
        mean_boundary_stop_time: mean,
        var_boundary_stop_time: var,
        occupation_regime1: regime1_samples as f64 / total_samples as f64,
        mean_abs_y: abs_sum / total_samples as f64,
        final_histogram: Histogram { lo, hi, counts },
    })
}
