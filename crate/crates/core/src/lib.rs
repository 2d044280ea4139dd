//! Optimal production planning under two-regime Markov-modulated demand.
//!
//! A firm controls the production rate `p(t)` of a good whose inventory
//! `y(t)` follows `dy = p dt + σ_ε dW` while an independent two-state
//! Markov chain `ε(t)` switches the economic regime. Production and
//! holding costs are quadratic and regime-dependent; production halts the
//! first time `|y|` reaches the threshold `R`.
//!
//! The value functions `z₁, z₂` of the discounted cost problem solve a
//! coupled semilinear elliptic system on `[-R, R]`. After the change of
//! variables `u_j = exp(-z_j / 2σ_j²)` the system loses its gradient
//! terms and is amenable to a monotone successive-approximation scheme
//! bracketed between an exponential lower profile and the constant 1.
//!
//! Pipeline, in solve order:
//!
//! 1. [`ksolve`] — negative exponents `K₁, K₂` of the lower profile from a
//!    2×2 nonlinear system (damped Newton, with a least-squares fallback
//!    for parameter sets where no all-negative root exists).
//! 2. [`coupling`] — the coupling terms `g₁, g₂` of the transformed
//!    system and the shift constants `Λ₁, Λ₂` from a domain scan of
//!    `∂g/∂t`, `∂g/∂s`.
//! 3. [`elliptic`] — Gauss–Seidel relaxation of the shifted system to its
//!    fixed point, with monotonicity and bracketing audits.
//! 4. [`policy`] — value functions `z_j = -2σ_j² ln u_j`, feedback rates
//!    `p* = -½ z'`, and the quadratic upper bounds `B_j`.
//! 5. [`sim`] — Euler–Maruyama simulation of the controlled inventory
//!    with regime switching and boundary stopping.
//! 6. [`analysis`] — parameter-sensitivity orderings and the comparison
//!    against the corresponding single-regime models.

// negated float comparisons are deliberate: `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod coupling;
pub mod elliptic;
mod error;
pub mod ksolve;
pub mod model;
pub mod policy;
pub mod sim;

pub use analysis::{
    pointwise_dominance, regime_comparison, run_sensitivity_scenario, single_regime_solve,
    ComparisonOutcome, DominanceReport, RegimeSlice, ScenarioId, ScenarioSpec, SensitivityOutcome,
};
pub use coupling::{compute_lambdas, eval_g, eval_g_partial, LambdaPair, ScanResolution};
pub use elliptic::{
    discrete_residual, initial_iterate, solve_coupled, sweep, FieldPair, SolveOptions, SolveReport,
    StartMode,
};
pub use error::Error;
pub use ksolve::{
    boundary_scales, k_jacobian, k_residuals, solve_k, solve_k_best_effort,
    verify_subsolution_inequalities, InequalityReport, KParameters,
};
pub use model::{
    build_grid, eval_holding_cost, validate_params, HoldingCostSpec, Regime, RegimeParameters,
    SolverGrid,
};
pub use policy::{
    assemble_policy, optimal_rate, recover_value, upper_bound, verify_bounds, BoundReport,
    PolicyResult,
};
pub use sim::{
    ensemble_stats, interpolate_rate, simulate_path, step_regime, EnsembleSummary, Interpolation,
    SimConfig, StopReason, Trajectory,
};

/// Full solve through value recovery: exponents, shift constants, elliptic
/// fixed point, and the assembled policy.
pub struct PipelineResult {
    pub k: KParameters,
    pub lambdas: LambdaPair,
    pub fields: FieldPair,
    pub report: SolveReport,
    pub policy: PolicyResult,
}

/// Runs the standard pipeline on validated inputs.
///
/// When the exponent system has no all-negative root (possible for strongly
/// asymmetric regimes), falls back to the best-effort least-squares point;
/// `result.k.exact` records which case occurred.
pub fn solve_pipeline(
    params: &RegimeParameters,
    costs: &HoldingCostSpec,
    n_points: usize,
    scan: ScanResolution,
    options: &SolveOptions,
) -> Result<PipelineResult, Error> {
    validate_params(params, costs)?;
    let k = match solve_k(params, None) {
        Ok(k) => k,
        Err(Error::NoNegativeRoot) => solve_k_best_effort(params, None)?,
        Err(e) => return Err(e),
    };
    let grid = build_grid(params.radius, n_points)?;
    let lambdas = compute_lambdas(params, costs, &k, scan)?;
    let (fields, report) = solve_coupled(params, costs, &grid, &k, &lambdas, options)?;
    let policy = assemble_policy(&fields, &k, params);
    Ok(PipelineResult {
        k,
        lambdas,
        fields,
        report,
        policy,
    })
}
