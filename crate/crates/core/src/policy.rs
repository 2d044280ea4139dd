//! Value functions, feedback production rates, and upper bounds.

use crate::elliptic::FieldPair;
use crate::error::Error;
use crate::ksolve::KParameters;
use crate::model::{RegimeParameters, SolverGrid};

/// Recovered policy: values `z_j`, rates `p_j*`, bounds `B_j`, per node.
#[derive(Debug, Clone)]
pub struct PolicyResult {
    pub z1: Vec<f64>,
    pub z2: Vec<f64>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub b1: Vec<f64>,
    pub b2: Vec<f64>,
    pub grid: SolverGrid,
}

/// Value function from a transformed field: `z = -2σ² ln u`.
pub fn recover_value(u: &[f64], sigma: f64) -> Result<Vec<f64>, Error> {
    if u.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::invalid("field values must be > 0"));
    }
    let scale = -2.0 * sigma * sigma;
    // `+ 0.0` turns the negative zero of `scale * ln(1)` into plain zero
    Ok(u.iter().map(|&v| scale * v.ln() + 0.0).collect())
}

/// Feedback rate `p* = -½ z'` with central differences in the interior
/// and first-order one-sided differences at the ends.
pub fn optimal_rate(z: &[f64], grid: &SolverGrid) -> Vec<f64> {
    let n = z.len();
    debug_assert_eq!(n, grid.n_points);
    let dx = grid.dx;
    let mut p = vec![0.0; n];
    p[0] = -0.5 * (z[1] - z[0]) / dx;
    for i in 1..n - 1 {
        p[i] = -0.5 * (z[i + 1] - z[i - 1]) / (2.0 * dx);
    }
    p[n - 1] = -0.5 * (z[n - 1] - z[n - 2]) / dx;
    p
}

/// Quadratic upper bound `B(x) = -2σ²K (R² - x²)`.
pub fn upper_bound(k: f64, sigma: f64, grid: &SolverGrid) -> Vec<f64> {
    let rsq = grid.radius * grid.radius;
    let scale = -2.0 * sigma * sigma * k;
    grid.nodes.iter().map(|&x| scale * (rsq - x * x)).collect()
}

/// Builds the full policy from converged fields and solved exponents.
pub fn assemble_policy(
    fields: &FieldPair,
    kp: &KParameters,
    params: &RegimeParameters,
) -> PolicyResult {
    let z1 = recover_value(&fields.u1, params.sigma1).expect("positive field");
    let z2 = recover_value(&fields.u2, params.sigma2).expect("positive field");
    let p1 = optimal_rate(&z1, &fields.grid);
    let p2 = optimal_rate(&z2, &fields.grid);
    let b1 = upper_bound(kp.k1, params.sigma1, &fields.grid);
    let b2 = upper_bound(kp.k2, params.sigma2, &fields.grid);
    PolicyResult {
        z1,
        z2,
        p1,
        p2,
        b1,
        b2,
        grid: fields.grid.clone(),
    }
}

/// Outcome of the per-node bound check `z_j ≤ B_j + tol`.
#[derive(Debug, Clone, Copy)]
pub struct BoundReport {
    /// `max_i (z1[i] - b1[i])`; non-positive means the bound holds strictly.
    pub max_violation1: f64,
    pub max_violation2: f64,
    pub pass: bool,
}

/// Checks the value functions against their quadratic bounds.
///
/// A violation is a reported outcome rather than an error; it signals the
/// input data should be adjusted.
pub fn verify_bounds(policy: &PolicyResult, bound_tol: f64) -> BoundReport {
    let worst = |z: &[f64], b: &[f64]| {
        z.iter()
            .zip(b)
            .map(|(zi, bi)| zi - bi)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let max_violation1 = worst(&policy.z1, &policy.b1);
    let max_violation2 = worst(&policy.z2, &policy.b2);
    BoundReport {
        max_violation1,
        max_violation2,
        pass: max_violation1 <= bound_tol && max_violation2 <= bound_tol,
    }
}
