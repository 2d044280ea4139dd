//! Coupling terms of the transformed system and the shift constants.
//!
//! With `t` standing for a value of `u₁` and `s` for a value of `u₂`:
//!
//! ```text
//! g₁(x,t,s) = f₁(x)/σ₁⁴ · t + 2(a₁+α₁)/σ₁² · t ln t - 2a₁σ₂²/σ₁⁴ · t ln s
//! g₂(x,t,s) = f₂(x)/σ₂⁴ · s + 2(a₂+α₂)/σ₂² · s ln s - 2a₂σ₁²/σ₂⁴ · s ln t
//! ```
//!
//! The relaxation shifts `Λ₁ = -max ∂g₁/∂t`, `Λ₂ = -max ∂g₂/∂s` are taken
//! over a product grid: `x` over `[-R, R]` and, per `x`, `t` and `s` over
//! the bracket `[exp(K_j(R²-x²)), 1]` of that node.

use crate::error::Error;
use crate::ksolve::KParameters;
use crate::model::{HoldingCostSpec, Regime, RegimeParameters};

/// Precomputed coefficients of `g₁, g₂` shared with the elliptic sweeps.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GCoeffs {
    pub c1: f64,
    pub c2: f64,
    pub inv_s14: f64,
    pub inv_s24: f64,
    pub own1: f64,
    pub own2: f64,
    pub cross1: f64,
    pub cross2: f64,
}

impl GCoeffs {
    pub fn new(params: &RegimeParameters, costs: &HoldingCostSpec) -> Self {
        let s1sq = params.sigma1 * params.sigma1;
        let s2sq = params.sigma2 * params.sigma2;
        GCoeffs {
            c1: costs.c1,
            c2: costs.c2,
            inv_s14: 1.0 / (s1sq * s1sq),
            inv_s24: 1.0 / (s2sq * s2sq),
            own1: 2.0 * (params.a1 + params.alpha1) / s1sq,
            own2: 2.0 * (params.a2 + params.alpha2) / s2sq,
            cross1: 2.0 * params.a1 * s2sq / (s1sq * s1sq),
            cross2: 2.0 * params.a2 * s1sq / (s2sq * s2sq),
        }
    }

    #[inline]
    pub fn g1(&self, x: f64, t: f64, s: f64) -> f64 {
        self.c1 * x * x * self.inv_s14 * t + self.own1 * t * t.ln() - self.cross1 * t * s.ln()
    }

    #[inline]
    pub fn g2(&self, x: f64, t: f64, s: f64) -> f64 {
        self.c2 * x * x * self.inv_s24 * s + self.own2 * s * s.ln() - self.cross2 * s * t.ln()
    }

    #[inline]
    pub fn g1_partial(&self, x: f64, t: f64, s: f64) -> f64 {
        self.c1 * x * x * self.inv_s14 + self.own1 * (1.0 + t.ln()) - self.cross1 * s.ln()
    }

    #[inline]
    pub fn g2_partial(&self, x: f64, t: f64, s: f64) -> f64 {
        self.c2 * x * x * self.inv_s24 + self.own2 * (1.0 + s.ln()) - self.cross2 * t.ln()
    }
}

fn check_ts(t: f64, s: f64) -> Result<(), Error> {
    if !(t > 0.0) {
        return Err(Error::invalid("t must be > 0"));
    }
    if !(s > 0.0) {
        return Err(Error::invalid("s must be > 0"));
    }
    Ok(())
}

/// Coupling function of the given regime at `(x, t, s)`.
pub fn eval_g(
    regime: Regime,
    x: f64,
    t: f64,
    s: f64,
    params: &RegimeParameters,
    costs: &HoldingCostSpec,
) -> Result<f64, Error> {
    check_ts(t, s)?;
    let c = GCoeffs::new(params, costs);
    Ok(match regime {
        Regime::One => c.g1(x, t, s),
        Regime::Two => c.g2(x, t, s),
    })
}

/// Partial derivative of `g` in its own field value: `∂g₁/∂t` or `∂g₂/∂s`.
pub fn eval_g_partial(
    regime: Regime,
    x: f64,
    t: f64,
    s: f64,
    params: &RegimeParameters,
    costs: &HoldingCostSpec,
) -> Result<f64, Error> {
    check_ts(t, s)?;
    let c = GCoeffs::new(params, costs);
    Ok(match regime {
        Regime::One => c.g1_partial(x, t, s),
        Regime::Two => c.g2_partial(x, t, s),
    })
}

/// Grid sizes of the `(x, t, s)` scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanResolution {
    pub n_x: usize,
    pub n_t: usize,
    pub n_s: usize,
}

impl Default for ScanResolution {
    fn default() -> Self {
        ScanResolution {
            n_x: 200,
            n_t: 50,
            n_s: 50,
        }
    }
}

/// Shift constants with the scanned maxima they were negated from.
#[derive(Debug, Clone, Copy)]
pub struct LambdaPair {
    pub lambda1: f64,
    pub lambda2: f64,
    pub max_partial1: f64,
    pub max_partial2: f64,
    pub scan_resolution: ScanResolution,
}

#[inline]
fn linspace_point(a: f64, b: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        b
    } else {
        a + (b - a) * i as f64 / (n - 1) as f64
    }
}

/// Scans `∂g₁/∂t` and `∂g₂/∂s` over the product grid and negates the maxima.
///
/// Should a maximum come out non-positive (not reachable for validated
/// parameters, where the value at `t = s = 1` is already positive), the
/// corresponding Λ is clamped to `-1e-8` to keep the relaxation shift
/// strictly negative.
pub fn compute_lambdas(
    params: &RegimeParameters,
    costs: &HoldingCostSpec,
    kp: &KParameters,
    resolution: ScanResolution,
) -> Result<LambdaPair, Error> {
    let ScanResolution { n_x, n_t, n_s } = resolution;
    if n_x < 2 || n_t < 2 || n_s < 2 {
        return Err(Error::invalid("scan resolution components must be >= 2"));
    }
    let c = GCoeffs::new(params, costs);
    let r = params.radius;
    let rsq = r * r;
    let mut max1 = f64::NEG_INFINITY;
    let mut max2 = f64::NEG_INFINITY;
    for ix in 0..n_x {
        let x = linspace_point(-r, r, n_x, ix);
        let gap = rsq - x * x;
        let t_lo = crate::elliptic::lower_profile(kp.k1, gap);
        let s_lo = crate::elliptic::lower_profile(kp.k2, gap);
        for it in 0..n_t {
            let t = linspace_point(t_lo, 1.0, n_t, it);
            for is in 0..n_s {
                let s = linspace_point(s_lo, 1.0, n_s, is);
                let v1 = c.g1_partial(x, t, s);
                if v1 > max1 {
                    max1 = v1;
                }
                let v2 = c.g2_partial(x, t, s);
                if v2 > max2 {
                    max2 = v2;
                }
            }
        }
    }
    let clamp = |m: f64| if m > 0.0 { -m } else { -1e-8 };
    Ok(LambdaPair {
        lambda1: clamp(max1),
        lambda2: clamp(max2),
        max_partial1: max1,
        max_partial2: max2,
        scan_resolution: resolution,
    })
}
