//! TOML run configuration.
//!
//! Sections: `[problem]` (required), `[grid]`, `[solver]`, `[scan]`,
//! `[sim]`, `[output]`. Absent optional keys take the documented
//! defaults; absent problem keys are reported by name.

use serde::{Deserialize, Serialize};

use prodplan::{
    validate_params, HoldingCostSpec, Interpolation, RegimeParameters, ScanResolution, SimConfig,
    SolveOptions, StartMode,
};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("missing required key: {0}")]
    MissingKey(&'static str),
    #[error("{0}")]
    Invalid(String),
}

impl From<prodplan::Error> for ConfigError {
    fn from(e: prodplan::Error) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: RegimeParameters,
    pub costs: HoldingCostSpec,
    pub n_points: usize,
    pub solve: SolveOptions,
    pub scan: ScanResolution,
    pub sim: SimConfig,
    pub output_dir: String,
    pub strict: bool,
    pub bound_tol: f64,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problem: Option<RawProblem>,
    grid: Option<RawGrid>,
    solver: Option<RawSolver>,
    scan: Option<RawScan>,
    sim: Option<RawSim>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    sigma1: Option<f64>,
    sigma2: Option<f64>,
    a1: Option<f64>,
    a2: Option<f64>,
    alpha1: Option<f64>,
    alpha2: Option<f64>,
    #[serde(rename = "M1")]
    m1: Option<f64>,
    #[serde(rename = "M2")]
    m2: Option<f64>,
    #[serde(rename = "R")]
    radius: Option<f64>,
    c1: Option<f64>,
    c2: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n_points: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    eps_conv: Option<f64>,
    max_iter: Option<usize>,
    mode: Option<String>,
    stall_guard: Option<bool>,
    guard_factor: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScan {
    n_x: Option<usize>,
    n_t: Option<usize>,
    n_s: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    dt: Option<f64>,
    t_max: Option<f64>,
    x0: Option<f64>,
    seed: Option<u64>,
    n_paths: Option<usize>,
    interpolation: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
    strict: Option<bool>,
    bound_tol: Option<f64>,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text)?;
    let p = raw.problem.unwrap_or_default();

    // required problem keys, reported in a fixed order
    let need = |v: Option<f64>, key: &'static str| v.ok_or(ConfigError::MissingKey(key));
    let sigma1 = need(p.sigma1, "sigma1")?;
    let sigma2 = need(p.sigma2, "sigma2")?;
    let a1 = need(p.a1, "a1")?;
    let a2 = need(p.a2, "a2")?;
    let alpha1 = need(p.alpha1, "alpha1")?;
    let alpha2 = need(p.alpha2, "alpha2")?;
    let m1 = need(p.m1, "M1")?;
    let m2 = need(p.m2, "M2")?;
    let radius = need(p.radius, "R")?;
    let c1 = need(p.c1, "c1")?;
    let c2 = need(p.c2, "c2")?;

    let params = RegimeParameters {
        a1,
        a2,
        alpha1,
        alpha2,
        sigma1,
        sigma2,
        m1,
        m2,
        radius,
    };
    let costs = HoldingCostSpec { c1, c2 };
    validate_params(&params, &costs)?;

    let grid = raw.grid.unwrap_or_default();
    let solver = raw.solver.unwrap_or_default();
    let scan = raw.scan.unwrap_or_default();
    let sim = raw.sim.unwrap_or_default();
    let output = raw.output.unwrap_or_default();

    let mode = match solver.mode.as_deref() {
        None | Some("sub") => StartMode::SubSolution,
        Some("super") => StartMode::SuperSolution,
        Some(other) => {
            return Err(ConfigError::Invalid(format!(
                "solver.mode must be \"sub\" or \"super\", got \"{other}\""
            )))
        }
    };
    let interpolation = match sim.interpolation.as_deref() {
        None | Some("nearest") => Interpolation::Nearest,
        Some("linear") => Interpolation::Linear,
        Some(other) => {
            return Err(ConfigError::Invalid(format!(
                "sim.interpolation must be \"nearest\" or \"linear\", got \"{other}\""
            )))
        }
    };

    let defaults = SolveOptions::default();
    let config = RunConfig {
        params,
        costs,
        n_points: grid.n_points.unwrap_or(100),
        solve: SolveOptions {
            eps_conv: solver.eps_conv.unwrap_or(defaults.eps_conv),
            max_iter: solver.max_iter.unwrap_or(defaults.max_iter),
            mode,
            stall_guard: solver.stall_guard.unwrap_or(defaults.stall_guard),
            guard_factor: solver.guard_factor.unwrap_or(defaults.guard_factor),
        },
        scan: ScanResolution {
            n_x: scan.n_x.unwrap_or(200),
            n_t: scan.n_t.unwrap_or(50),
            n_s: scan.n_s.unwrap_or(50),
        },
        sim: SimConfig {
            dt: sim.dt.unwrap_or(0.01),
            t_max: sim.t_max.unwrap_or(100.0),
            x0: sim.x0.unwrap_or(0.0),
            seed: sim.seed.unwrap_or(0),
            n_paths: sim.n_paths.unwrap_or(1),
            interpolation,
        },
        output_dir: output.dir.unwrap_or_else(|| "out".to_string()),
        strict: output.strict.unwrap_or(false),
        bound_tol: output.bound_tol.unwrap_or(1e-6),
    };
    if config.n_points < 3 {
        return Err(ConfigError::Invalid("n_points must be >= 3".into()));
    }
    config.sim.validate(&config.params)?;
    Ok(config)
}

/// Serializes a configuration back to TOML; `parse_config` on the result
/// reproduces the input exactly.
pub fn serialize_config(config: &RunConfig) -> String {
    let raw = RawConfig {
        problem: Some(RawProblem {
            sigma1: Some(config.params.sigma1),
            sigma2: Some(config.params.sigma2),
            a1: Some(config.params.a1),
            a2: Some(config.params.a2),
            alpha1: Some(config.params.alpha1),
            alpha2: Some(config.params.alpha2),
            m1: Some(config.params.m1),
            m2: Some(config.params.m2),
            radius: Some(config.params.radius),
            c1: Some(config.costs.c1),
            c2: Some(config.costs.c2),
        }),
        grid: Some(RawGrid {
            n_points: Some(config.n_points),
        }),
        solver: Some(RawSolver {
            eps_conv: Some(config.solve.eps_conv),
            max_iter: Some(config.solve.max_iter),
            mode: Some(
                match config.solve.mode {
                    StartMode::SubSolution => "sub",
                    StartMode::SuperSolution => "super",
                }
                .to_string(),
            ),
            stall_guard: Some(config.solve.stall_guard),
            guard_factor: Some(config.solve.guard_factor),
        }),
        scan: Some(RawScan {
            n_x: Some(config.scan.n_x),
            n_t: Some(config.scan.n_t),
            n_s: Some(config.scan.n_s),
        }),
        sim: Some(RawSim {
            dt: Some(config.sim.dt),
            t_max: Some(config.sim.t_max),
            x0: Some(config.sim.x0),
            seed: Some(config.sim.seed),
            n_paths: Some(config.sim.n_paths),
            interpolation: Some(
                match config.sim.interpolation {
                    Interpolation::Nearest => "nearest",
                    Interpolation::Linear => "linear",
                }
                .to_string(),
            ),
        }),
        output: Some(RawOutput {
            dir: Some(config.output_dir.clone()),
            strict: Some(config.strict),
            bound_tol: Some(config.bound_tol),
        }),
    };
    toml::to_string_pretty(&raw).expect("config serializes")
}
