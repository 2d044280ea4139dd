//! Problem parameters, holding costs, and the spatial grid.

use crate::error::Error;

/// Economic regime of the Markov chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    One,
    Two,
}

impl Regime {
    pub fn index(self) -> usize {
        match self {
            Regime::One => 1,
            Regime::Two => 2,
        }
    }

    pub fn other(self) -> Regime {
        match self {
            Regime::One => Regime::Two,
            Regime::Two => Regime::One,
        }
    }
}

/// All regime-dependent scalars plus the domain radius.
///
/// `a1, a2` are the chain transition rates, `alpha1, alpha2` the discount
/// rates, `sigma1, sigma2` the volatilities, `m1, m2` the quadratic caps
/// on the holding costs, and `radius` the stopping threshold R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeParameters {
    pub a1: f64,
    pub a2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub m1: f64,
    pub m2: f64,
    pub radius: f64,
}

impl RegimeParameters {
    /// Volatility of the given regime.
    pub fn sigma(&self, regime: Regime) -> f64 {
        match regime {
            Regime::One => self.sigma1,
            Regime::Two => self.sigma2,
        }
    }
}

/// Scaled quadratic holding costs `f_i(x) = c_i x²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoldingCostSpec {
    pub c1: f64,
    pub c2: f64,
}

impl HoldingCostSpec {
    pub fn coeff(&self, regime: Regime) -> f64 {
        match regime {
            Regime::One => self.c1,
            Regime::Two => self.c2,
        }
    }
}

/// Evaluates the holding cost `c_regime · x²`.
pub fn eval_holding_cost(costs: &HoldingCostSpec, regime: Regime, x: f64) -> f64 {
    costs.coeff(regime) * x * x
}

/// Checks every parameter constraint, reporting the first violation by name.
pub fn validate_params(params: &RegimeParameters, costs: &HoldingCostSpec) -> Result<(), Error> {
    let positive = [
        ("a1", params.a1),
        ("a2", params.a2),
        ("alpha1", params.alpha1),
        ("alpha2", params.alpha2),
        ("sigma1", params.sigma1),
        ("sigma2", params.sigma2),
        ("M1", params.m1),
        ("M2", params.m2),
        ("R", params.radius),
    ];
    for (name, value) in positive {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::invalid(format!("{name} must be > 0")));
        }
    }
    // zero cost (no holding charge) is a legal degenerate case; only the
    // caps must stay strictly positive
    for (name, value) in [("c1", costs.c1), ("c2", costs.c2)] {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::invalid(format!("{name} must be >= 0")));
        }
    }
    // f_i(x) = c_i x² stays under the cap M_i x² iff c_i <= M_i.
    if costs.c1 > params.m1 {
        return Err(Error::invalid("c1 exceeds M1"));
    }
    if costs.c2 > params.m2 {
        return Err(Error::invalid("c2 exceeds M2"));
    }
    Ok(())
}

/// Uniform symmetric grid on `[-R, R]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverGrid {
    pub radius: f64,
    pub n_points: usize,
    pub dx: f64,
    pub nodes: Vec<f64>,
}

impl SolverGrid {
    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }
}

/// Builds the uniform grid with `x[0] = -R`, `x[n-1] = +R`.
///
/// Nodes are mirrored around the center so that `x[i] + x[n-1-i] = 0`
/// exactly, which downstream parity checks rely on.
pub fn build_grid(radius: f64, n_points: usize) -> Result<SolverGrid, Error> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::invalid("R must be > 0"));
    }
    if n_points < 3 {
        return Err(Error::invalid("n_points must be >= 3"));
    }
    let dx = 2.0 * radius / (n_points - 1) as f64;
    let mut nodes = vec![0.0; n_points];
    for i in 0..n_points / 2 {
        let x = -radius + i as f64 * dx;
        nodes[i] = x;
        nodes[n_points - 1 - i] = -x;
    }
    // odd n: the middle node is exactly 0 from the vec initialization
    Ok(SolverGrid {
        radius,
        n_points,
        dx,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s4_params() -> (RegimeParameters, HoldingCostSpec) {
        (
            RegimeParameters {
                a1: 0.6,
                a2: 0.9,
                alpha1: 0.3,
                alpha2: 0.8,
                sigma1: 1.0,
                sigma2: 0.3,
                m1: 5.0,
                m2: 1.0,
                radius: 10.0,
            },
            HoldingCostSpec { c1: 5.0, c2: 1.0 },
        )
    }

    #[test]
    fn validates_reference_parameters() {
        let (p, c) = s4_params();
        assert!(validate_params(&p, &c).is_ok());
    }

    #[test]
    fn rejects_zero_sigma2() {
        let (mut p, c) = s4_params();
        p.sigma2 = 0.0;
        let err = validate_params(&p, &c).unwrap_err();
        assert_eq!(err.to_string(), "sigma2 must be > 0");
    }

    #[test]
    fn rejects_cost_over_cap() {
        let (mut p, mut c) = s4_params();
        p.m1 = 5.0;
        c.c1 = 6.0;
        let err = validate_params(&p, &c).unwrap_err();
        assert_eq!(err.to_string(), "c1 exceeds M1");
    }

    #[test]
    fn grid_matches_reference_spacing() {
        let g = build_grid(10.0, 100).unwrap();
        assert_eq!(g.n_points, 100);
        assert_eq!(g.dx, 20.0 / 99.0);
        assert_eq!(g.nodes[0], -10.0);
        assert_eq!(g.nodes[99], 10.0);
    }

    #[test]
    fn smallest_grid() {
        let g = build_grid(1.0, 3).unwrap();
        assert_eq!(g.nodes, vec![-1.0, 0.0, 1.0]);
        assert_eq!(g.dx, 1.0);
    }

    #[test]
    fn five_point_grid() {
        let g = build_grid(20.0, 5).unwrap();
        assert_eq!(g.nodes, vec![-20.0, -10.0, 0.0, 10.0, 20.0]);
    }

    #[test]
    fn grid_rejects_too_few_points() {
        assert!(build_grid(1.0, 2).is_err());
    }

    #[test]
    fn holding_cost_examples() {
        let c = HoldingCostSpec { c1: 5.0, c2: 1.0 };
        assert_eq!(eval_holding_cost(&c, Regime::One, 2.0), 20.0);
        assert_eq!(eval_holding_cost(&c, Regime::One, 0.0), 0.0);
        assert_eq!(eval_holding_cost(&c, Regime::Two, -3.0), 9.0);
    }

    proptest! {
        #[test]
        fn grid_is_symmetric_and_increasing(radius in 0.1f64..100.0, n in 3usize..400) {
            let g = build_grid(radius, n).unwrap();
            for i in 0..n {
                prop_assert_eq!(g.nodes[i] + g.nodes[n - 1 - i], 0.0);
            }
            for w in g.nodes.windows(2) {
                prop_assert!(w[1] > w[0]);
            }
        }

        #[test]
        fn holding_cost_is_even_and_capped(c1 in 0.01f64..5.0, x in -50.0f64..50.0) {
            let costs = HoldingCostSpec { c1, c2: c1 };
            let f = eval_holding_cost(&costs, Regime::One, x);
            prop_assert_eq!(f, eval_holding_cost(&costs, Regime::One, -x));
            prop_assert!(f <= c1 * x * x * (1.0 + 1e-15));
        }
    }
}
