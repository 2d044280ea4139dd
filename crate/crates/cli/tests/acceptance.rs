//! Acceptance suite: one test per numbered criterion, each printing a
//! PASS/FAIL line with the measured quantities (visible with
//! `--nocapture`, and always on failure).
//!
//! Criteria 1, 2, and 9 fail on this code base for reasons intrinsic to
//! the problem data, not to the implementation; each failure message
//! states the measured obstruction. In short: the exponent system has no
//! all-negative root for the s3/s4 data (criterion 1); the first lower
//! profile inequality is violated at the exact s2 root (criterion 2); and
//! the s1 boundary layer is far from resolved at 100–400 nodes, so the
//! second-order shrink factor is not yet visible there (criterion 9).

use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;

use prodplan::{
    build_grid, compute_lambdas, discrete_residual, ensemble_stats, pointwise_dominance,
    regime_comparison, simulate_path, solve_coupled, solve_k, solve_k_best_effort, solve_pipeline,
    verify_bounds, verify_subsolution_inequalities, Error, HoldingCostSpec, PipelineResult,
    PolicyResult, Regime, RegimeParameters, ScanResolution, ScenarioId, ScenarioSpec, SimConfig,
    SolveOptions, StartMode,
};

const IDS: [ScenarioId; 4] = [
    ScenarioId::S1,
    ScenarioId::S2,
    ScenarioId::S3,
    ScenarioId::S4,
];

struct Bundle {
    spec: ScenarioSpec,
    pipe: PipelineResult,
}

fn solve_bundle(id: ScenarioId, mode: StartMode, eps: f64) -> Bundle {
    let mut spec = ScenarioSpec::standard(id);
    spec.solve.mode = mode;
    spec.solve.eps_conv = eps;
    spec.solve.max_iter = 3_000_000;
    spec.solve.stall_guard = true;
    let pipe = solve_pipeline(
        &spec.params,
        &spec.costs,
        spec.n_points,
        spec.scan,
        &spec.solve,
    )
    .expect("pipeline runs");
    assert!(
        pipe.report.converged,
        "{id:?} did not converge at eps={eps}: {:?}",
        pipe.report
    );
    Bundle { spec, pipe }
}

/// Converged solves (lower-profile start, stall guard) shared across
/// criteria.
fn converged(id: ScenarioId) -> &'static Bundle {
    static CACHE: [OnceLock<Bundle>; 4] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    let idx = IDS.iter().position(|&x| x == id).unwrap();
    CACHE[idx].get_or_init(|| solve_bundle(id, StartMode::SubSolution, 1e-12))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn verdict(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion}: {detail}");
}

#[test]
fn criterion_01_exponent_system_roots() {
    let mut detail = String::new();
    let mut pass = true;

    // symmetric-parameter closed form
    let sym = RegimeParameters {
        a1: 0.5,
        a2: 0.5,
        alpha1: 0.3,
        alpha2: 0.3,
        sigma1: 1.0,
        sigma2: 1.0,
        m1: 1.0,
        m2: 1.0,
        radius: 10.0,
    };
    let closed = (-0.6 - 16.36f64.sqrt()) / 8.0;
    match solve_k(&sym, None) {
        Ok(k) if (k.k1 - closed).abs() <= 1e-10 && (k.k2 - closed).abs() <= 1e-10 => {}
        other => {
            pass = false;
            detail.push_str(&format!("symmetric case mismatch: {other:?}; "));
        }
    }

    for id in IDS {
        let spec = ScenarioSpec::standard(id);
        match solve_k(&spec.params, None) {
            Ok(k) => {
                let ok = k.k1 < 0.0 && k.k2 < 0.0 && k.residual_norm <= 1e-10;
                if !ok {
                    pass = false;
                }
                // multi-start agreement from 10 negative seeds
                let mut worst = 0.0f64;
                for i in 0..10 {
                    let guess = (-(0.2 + 0.7 * i as f64), -(0.4 + 0.9 * i as f64));
                    match solve_k(&spec.params, Some(guess)) {
                        Ok(other) => {
                            worst = worst
                                .max((other.k1 - k.k1).abs())
                                .max((other.k2 - k.k2).abs());
                        }
                        Err(e) => {
                            pass = false;
                            detail.push_str(&format!(
                                "{}: restart {guess:?} failed: {e}; ",
                                id.as_str()
                            ));
                        }
                    }
                }
                if worst > 1e-8 {
                    pass = false;
                }
                detail.push_str(&format!(
                    "{}: K=({:.6}, {:.6}) residual={:.2e} multi-start spread={:.2e}; ",
                    id.as_str(),
                    k.k1,
                    k.k2,
                    k.residual_norm,
                    worst
                ));
            }
            Err(Error::NoNegativeRoot) => {
                pass = false;
                let best = solve_k_best_effort(&spec.params, None).unwrap();
                detail.push_str(&format!(
                    "{}: no all-negative root exists (least-squares floor at K=({:.6}, {:.6}) \
                     leaves residual {:.3}); ",
                    id.as_str(),
                    best.k1,
                    best.k2,
                    best.residual_norm
                ));
            }
            Err(e) => {
                pass = false;
                detail.push_str(&format!("{}: {e}; ", id.as_str()));
            }
        }
    }
    verdict("01 exponent-system roots", pass, detail.trim_end());
}

#[test]
fn criterion_02_lower_profile_inequalities() {
    let mut detail = String::new();
    let mut pass = true;
    for id in IDS {
        let spec = ScenarioSpec::standard(id);
        match solve_k(&spec.params, None) {
            Ok(k) => {
                let rep = verify_subsolution_inequalities(&k, &spec.params, 1);
                if !rep.pass {
                    pass = false;
                }
                detail.push_str(&format!(
                    "{}: values=({:.4}, {:.4}) pass={}; ",
                    id.as_str(),
                    rep.value1,
                    rep.value2,
                    rep.pass
                ));
            }
            Err(_) => {
                detail.push_str(&format!("{}: unsolved, skipped; ", id.as_str()));
            }
        }
    }
    verdict("02 lower-profile inequalities", pass, detail.trim_end());
}

#[test]
fn criterion_03_monotone_convergence_at_reference_settings() {
    let mut detail = String::new();
    let mut pass = true;
    for id in IDS {
        let spec = ScenarioSpec::standard(id);
        let k = solve_k_best_effort(&spec.params, None).unwrap();
        let grid = build_grid(spec.params.radius, 100).unwrap();
        let lambdas = compute_lambdas(&spec.params, &spec.costs, &k, spec.scan).unwrap();
        let (_, report) = solve_coupled(
            &spec.params,
            &spec.costs,
            &grid,
            &k,
            &lambdas,
            &SolveOptions::default(), // eps 1e-6, max_iter 1000, lower-profile start
        )
        .unwrap();
        let ok =
            report.converged && report.monotone_violations == 0 && report.bracket_violations == 0;
        if !ok {
            pass = false;
        }
        detail.push_str(&format!(
            "{}: converged={} iters={} monotone_violations={} bracket_violations={}; ",
            id.as_str(),
            report.converged,
            report.iterations,
            report.monotone_violations,
            report.bracket_violations
        ));
    }
    verdict("03 monotone convergence", pass, detail.trim_end());
}

#[test]
fn criterion_04_fixed_point_residual_bound() {
    let mut detail = String::new();
    let mut pass = true;
    for id in IDS {
        // reference-settings run
        let spec = ScenarioSpec::standard(id);
        let k = solve_k_best_effort(&spec.params, None).unwrap();
        let grid = build_grid(spec.params.radius, 100).unwrap();
        let lambdas = compute_lambdas(&spec.params, &spec.costs, &k, spec.scan).unwrap();
        let (fields, report) = solve_coupled(
            &spec.params,
            &spec.costs,
            &grid,
            &k,
            &lambdas,
            &SolveOptions::default(),
        )
        .unwrap();
        assert!(report.converged);
        let lam_max = lambdas.lambda1.abs().max(lambdas.lambda2.abs());
        let bound = 10.0 * 1e-6 * (2.0 / (grid.dx * grid.dx) + lam_max);
        let (r1, r2) = discrete_residual(&fields, &spec.params, &spec.costs);
        if r1 > bound || r2 > bound {
            pass = false;
        }
        // converged run at its own tolerance
        let b = converged(id);
        let bound_tight = 10.0 * b.spec.solve.eps_conv * (2.0 / (grid.dx * grid.dx) + lam_max);
        let (t1, t2) = discrete_residual(&b.pipe.fields, &spec.params, &spec.costs);
        if t1 > bound_tight || t2 > bound_tight {
            pass = false;
        }
        detail.push_str(&format!(
            "{}: residuals=({r1:.2e}, {r2:.2e}) vs {bound:.2e}; tight=({t1:.2e}, {t2:.2e}) vs {bound_tight:.2e}; ",
            id.as_str()
        ));
    }
    verdict("04 fixed-point residual", pass, detail.trim_end());
}

#[test]
fn criterion_05_uniqueness_via_mode_agreement() {
    // agreement tolerance: ten times the reference convergence threshold
    let tol = 10.0 * 1e-6;
    let mut detail = String::new();
    let mut pass = true;
    for id in IDS {
        let lower = converged(id);
        let upper = solve_bundle(id, StartMode::SuperSolution, 1e-12);
        let diff = max_abs_diff(&lower.pipe.fields.u1, &upper.pipe.fields.u1)
            .max(max_abs_diff(&lower.pipe.fields.u2, &upper.pipe.fields.u2));
        if diff > tol {
            pass = false;
        }
        detail.push_str(&format!("{}: |u_sub - u_super|={diff:.2e}; ", id.as_str()));
    }
    verdict(
        "05 mode agreement",
        pass,
        &format!("tolerance {tol:.1e}; {}", detail.trim_end()),
    );
}

#[test]
fn criterion_06_exact_trivial_solution() {
    let params = RegimeParameters {
        a1: 1.0,
        a2: 1.0,
        alpha1: 1.0,
        alpha2: 1.0,
        sigma1: 1.0,
        sigma2: 1.0,
        m1: 1.0,
        m2: 1.0,
        radius: 10.0,
    };
    let costs = HoldingCostSpec { c1: 0.0, c2: 0.0 };
    let k = solve_k(&params, None).unwrap();
    let grid = build_grid(params.radius, 100).unwrap();
    let lambdas = compute_lambdas(&params, &costs, &k, ScanResolution::default()).unwrap();
    let (fields, report) = solve_coupled(
        &params,
        &costs,
        &grid,
        &k,
        &lambdas,
        &SolveOptions {
            mode: StartMode::SuperSolution,
            ..SolveOptions::default()
        },
    )
    .unwrap();
    let ones = fields.u1.iter().chain(fields.u2.iter()).all(|&u| u == 1.0);
    let policy = prodplan::assemble_policy(&fields, &k, &params);
    let zeros = policy.z1.iter().chain(policy.z2.iter()).all(|&z| z == 0.0)
        && policy.p1.iter().chain(policy.p2.iter()).all(|&p| p == 0.0);
    let pass = report.converged && report.iterations == 1 && ones && zeros;
    verdict(
        "06 exact trivial solution",
        pass,
        &format!(
            "iterations={} fields_all_one={ones} values_and_rates_zero={zeros}",
            report.iterations
        ),
    );
}

#[test]
fn criterion_07_value_bound_theorem() {
    let mut detail = String::new();
    let mut pass = true;
    for id in IDS {
        let b = converged(id);
        let rep = verify_bounds(&b.pipe.policy, 1e-6);
        if !rep.pass {
            pass = false;
        }
        detail.push_str(&format!(
            "{}: max(z1-B1)={:.2e} max(z2-B2)={:.2e}; ",
            id.as_str(),
            rep.max_violation1,
            rep.max_violation2
        ));
    }
    verdict("07 value bounds", pass, detail.trim_end());
}

#[test]
fn criterion_08_sensitivity_orderings_and_chain() {
    let mut detail = String::new();
    let mut pass = true;
    for id in [ScenarioId::S1, ScenarioId::S2, ScenarioId::S3] {
        let b = converged(id);
        let dom = pointwise_dominance(&b.pipe.policy.z1, &b.pipe.policy.z2, 1e-7).unwrap();
        if !dom.pass {
            pass = false;
        }
        detail.push_str(&format!(
            "{}: max(z2-z1)={:.2e}; ",
            id.as_str(),
            dom.max_violation
        ));
    }
    let chain = regime_comparison(&ScenarioSpec::standard(ScenarioId::S4)).unwrap();
    if !chain.pass {
        pass = false;
    }
    detail.push_str(&format!(
        "s4 chain: zbar1>=z1 {:.2e}, z1>=z2 {:.2e}, z2>=zunder2 {:.2e}",
        chain.chain[0].max_violation, chain.chain[1].max_violation, chain.chain[2].max_violation
    ));
    verdict("08 orderings", pass, &detail);
}

#[test]
fn criterion_09_discretization_order() {
    // Nodes of linspace grids with 100/200/400 points share only the two
    // boundary nodes (where every field is pinned), so the comparison is
    // made on the interval-doubled grids 101/201/401, whose coarse nodes
    // all reappear in the finer grids.
    let spec = ScenarioSpec::standard(ScenarioId::S1);
    let solve_at = |n: usize| {
        let k = solve_k(&spec.params, None).unwrap();
        let grid = build_grid(spec.params.radius, n).unwrap();
        let lambdas = compute_lambdas(&spec.params, &spec.costs, &k, spec.scan).unwrap();
        let (fields, report) = solve_coupled(
            &spec.params,
            &spec.costs,
            &grid,
            &k,
            &lambdas,
            &SolveOptions {
                eps_conv: 1e-10,
                max_iter: 3_000_000,
                mode: StartMode::SubSolution,
                stall_guard: true,
                guard_factor: 1e7,
            },
        )
        .unwrap();
        assert!(report.converged, "n={n} unconverged");
        fields
    };
    let coarse = solve_at(101);
    let medium = solve_at(201);
    let fine = solve_at(401);
    let shared = |fine_u: &[f64]| -> Vec<f64> { fine_u.iter().step_by(2).copied().collect() };
    let d1 = max_abs_diff(&shared(&medium.u1), &coarse.u1)
        .max(max_abs_diff(&shared(&medium.u2), &coarse.u2));
    let d2 = max_abs_diff(&shared(&fine.u1), &medium.u1)
        .max(max_abs_diff(&shared(&fine.u2), &medium.u2));
    let factor = d1 / d2;
    verdict(
        "09 discretization order",
        factor >= 3.0,
        &format!(
            "|u(201)-u(101)|={d1:.3e}, |u(401)-u(201)|={d2:.3e}, shrink factor {factor:.2} \
             (boundary-layer width ~0.03 at R=20 needs thousands of nodes before the \
             second-order regime shows)"
        ),
    );
}

fn zero_policy(radius: f64, n: usize) -> PolicyResult {
    let grid = build_grid(radius, n).unwrap();
    PolicyResult {
        z1: vec![0.0; n],
        z2: vec![0.0; n],
        p1: vec![0.0; n],
        p2: vec![0.0; n],
        b1: vec![0.0; n],
        b2: vec![0.0; n],
        grid,
    }
}

#[test]
fn criterion_10_simulation_statistics() {
    use rand::{Rng, SeedableRng};
    let mut detail = String::new();
    let mut pass = true;

    // (a) stationary occupation of the two-state chain
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut regime = Regime::One;
    let mut ones = 0usize;
    let steps = 1_000_000;
    for _ in 0..steps {
        regime = prodplan::step_regime(regime, 0.01, 0.6, 0.5, rng.gen());
        if regime == Regime::One {
            ones += 1;
        }
    }
    let occupation = ones as f64 / steps as f64;
    if (occupation - 5.0 / 11.0).abs() > 0.02 {
        pass = false;
    }
    detail.push_str(&format!(
        "occupation={occupation:.4} (target {:.4} ± 0.02); ",
        5.0 / 11.0
    ));

    // (b) uncontrolled Brownian exit time from [-10, 10]
    let params = RegimeParameters {
        a1: 0.0, // absorbing regime 1: a pure sigma=1 Brownian motion
        a2: 0.5,
        alpha1: 0.3,
        alpha2: 0.3,
        sigma1: 1.0,
        sigma2: 1.0,
        m1: 1.0,
        m2: 1.0,
        radius: 10.0,
    };
    let policy = zero_policy(10.0, 11);
    let config = SimConfig {
        dt: 0.01,
        t_max: 2000.0,
        x0: 0.0,
        seed: 7,
        n_paths: 2000,
        interpolation: Default::default(),
    };
    let stats = ensemble_stats(&policy, &params, &config).unwrap();
    let mean = stats.mean_boundary_stop_time.unwrap_or(f64::NAN);
    if stats.boundary_exits < 1990 || (mean - 100.0).abs() > 10.0 {
        pass = false;
    }
    detail.push_str(&format!(
        "exit-time mean={mean:.2} over {} boundary exits (target 100 ± 10); ",
        stats.boundary_exits
    ));

    // (c) determinism
    let one = SimConfig {
        n_paths: 1,
        t_max: 50.0,
        ..config
    };
    let a = simulate_path(&policy, &params, &one).unwrap();
    let b = simulate_path(&policy, &params, &one).unwrap();
    let identical = a.samples.len() == b.samples.len()
        && a.samples.iter().zip(&b.samples).all(|(x, y)| {
            x.0.to_bits() == y.0.to_bits() && x.1.to_bits() == y.1.to_bits() && x.2 == y.2
        });
    if !identical {
        pass = false;
    }
    detail.push_str(&format!("seeded paths identical={identical}"));
    verdict("10 simulation statistics", pass, &detail);
}

#[test]
fn criterion_11_parity() {
    let mut detail = String::new();
    let mut pass = true;
    for id in IDS {
        let b = solve_bundle(id, StartMode::SubSolution, 5e-14);
        let n = b.pipe.policy.grid.n_points;
        let even = |z: &[f64]| -> f64 {
            (0..n)
                .map(|i| (z[i] - z[n - 1 - i]).abs())
                .fold(0.0f64, f64::max)
        };
        let odd = |p: &[f64]| -> f64 {
            (1..n - 1)
                .map(|i| (p[i] + p[n - 1 - i]).abs())
                .fold(0.0f64, f64::max)
        };
        let worst_even = even(&b.pipe.policy.z1).max(even(&b.pipe.policy.z2));
        let worst_odd = odd(&b.pipe.policy.p1).max(odd(&b.pipe.policy.p2));
        if worst_even > 1e-8 || worst_odd > 1e-8 {
            pass = false;
        }
        detail.push_str(&format!(
            "{}: z-evenness {worst_even:.2e}, p-oddness {worst_odd:.2e}; ",
            id.as_str()
        ));
    }
    verdict("11 parity", pass, detail.trim_end());
}

#[test]
fn criterion_12_deterministic_csv_output() {
    let config = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs/s4.toml")
        .canonicalize()
        .unwrap();
    let run_once = || {
        let dir = tempfile::tempdir().unwrap();
        let status = Command::new(env!("CARGO_BIN_EXE_prodplan"))
            .arg("solve")
            .arg(&config)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(
            status.status.success(),
            "solve failed: {}",
            String::from_utf8_lossy(&status.stderr)
        );
        std::fs::read(dir.path().join("out/s4/fields.csv")).unwrap()
    };
    let first = run_once();
    let second = run_once();
    let identical = first == second;
    verdict(
        "12 deterministic output",
        identical,
        &format!(
            "fields.csv bytes identical across runs ({} bytes)",
            first.len()
        ),
    );
}
