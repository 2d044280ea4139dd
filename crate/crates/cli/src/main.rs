//! Command-line driver: solve, simulate, sensitivity, compare.

mod config;
mod output;
mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;
use prodplan::{
    ensemble_stats, regime_comparison, run_sensitivity_scenario, simulate_path, solve_pipeline,
    verify_bounds, ScenarioId, ScenarioSpec, SensitivityOutcome, Trajectory,
};

#[derive(Parser)]
#[command(
    name = "prodplan",
    about = "Optimal production policies for a two-regime stochastic inventory model",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the coupled system and write fields, metadata, and plots
    Solve { config: PathBuf },
    /// Solve, then simulate controlled inventory paths
    Simulate { config: PathBuf },
    /// Run one sensitivity scenario (s1, s2, or s3) and check z1 >= z2
    Sensitivity {
        config: PathBuf,
        #[arg(long)]
        scenario: String,
    },
    /// Compare against the no-switching baselines (scenario s4 chain)
    Compare { config: PathBuf },
}

/// Numerical failure (exit 1) as opposed to usage/config failure (exit 2).
struct RunFailure(String);

fn load_config(path: &Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    config::parse_config(&text).map_err(|e| e.to_string())
}

fn warn_if_inexact(k: &prodplan::KParameters) {
    if !k.exact {
        eprintln!(
            "warning: exponent system has no all-negative root for these parameters; \
             using least-squares fallback K=({:.6}, {:.6}) with residual {:.3e}",
            k.k1, k.k2, k.residual_norm
        );
    }
}

fn warn_if_stalled(report: &prodplan::SolveReport) {
    let rel = report.relative_residual[0].max(report.relative_residual[1]);
    if report.converged && rel > 1e-2 {
        eprintln!(
            "warning: relative residual {rel:.3e} is large; the delta-based stopping rule \
             likely halted on a dormant correction front. Consider solver.stall_guard = true \
             with a larger max_iter."
        );
    }
}

fn run_solve(config: &RunConfig) -> Result<SensitivityPipeline, RunFailure> {
    let pipe = solve_pipeline(
        &config.params,
        &config.costs,
        config.n_points,
        config.scan,
        &config.solve,
    )
    .map_err(|e| RunFailure(e.to_string()))?;
    warn_if_inexact(&pipe.k);
    warn_if_stalled(&pipe.report);
    println!(
        "K1={:.9} K2={:.9} (exact={}) lambda1={:.4} lambda2={:.4}",
        pipe.k.k1, pipe.k.k2, pipe.k.exact, pipe.lambdas.lambda1, pipe.lambdas.lambda2
    );
    println!(
        "converged={} iterations={} final_delta=({:.3e}, {:.3e}) residual=({:.3e}, {:.3e})",
        pipe.report.converged,
        pipe.report.iterations,
        pipe.report.final_delta[0],
        pipe.report.final_delta[1],
        pipe.report.residual_norm[0],
        pipe.report.residual_norm[1]
    );
    if !pipe.report.converged {
        return Err(RunFailure(format!(
            "solver did not converge within {} iterations",
            config.solve.max_iter
        )));
    }
    Ok(SensitivityPipeline { pipe })
}

struct SensitivityPipeline {
    pipe: prodplan::PipelineResult,
}

fn emit_solution(
    config: &RunConfig,
    pipe: &prodplan::PipelineResult,
    trajectory: Option<&Trajectory>,
) -> Result<(), RunFailure> {
    let dir = Path::new(&config.output_dir);
    let csv = output::write_fields_csv(
        dir,
        &pipe.fields,
        &pipe.policy,
        &pipe.report,
        &pipe.k,
        &pipe.lambdas,
    )
    .map_err(|e| RunFailure(format!("write failed for {}: {e}", dir.display())))?;
    println!("wrote {}", csv.display());
    // resolved settings, for reproducing the run
    std::fs::write(
        dir.join("run_config.toml"),
        config::serialize_config(config),
    )
    .map_err(|e| RunFailure(format!("write failed: {e}")))?;
    let svg = plot::render_fields_svg(dir, &pipe.policy)
        .map_err(|e| RunFailure(format!("plot failed: {e}")))?;
    println!("wrote {}", svg.display());
    if let Some(t) = trajectory {
        let svg = plot::render_trajectory_svg(dir, t, config.params.radius)
            .map_err(|e| RunFailure(format!("plot failed: {e}")))?;
        println!("wrote {}", svg.display());
    }
    Ok(())
}

fn check_bounds(config: &RunConfig, pipe: &prodplan::PipelineResult) -> Result<(), RunFailure> {
    let report = verify_bounds(&pipe.policy, config.bound_tol);
    println!(
        "bound check: max(z1-B1)={:.3e} max(z2-B2)={:.3e} pass={}",
        report.max_violation1, report.max_violation2, report.pass
    );
    if !report.pass {
        eprintln!("warning: value functions exceed their quadratic bounds; adjust the input data");
        if config.strict {
            return Err(RunFailure("bound check failed in strict mode".into()));
        }
    }
    Ok(())
}

fn cmd_solve(config_path: &Path) -> Result<(), ExitCode> {
    let config = load_config(config_path).map_err(usage_error)?;
    let solved = run_solve(&config).map_err(run_error)?;
    emit_solution(&config, &solved.pipe, None).map_err(run_error)?;
    check_bounds(&config, &solved.pipe).map_err(run_error)?;
    Ok(())
}

fn cmd_simulate(config_path: &Path) -> Result<(), ExitCode> {
    let config = load_config(config_path).map_err(usage_error)?;
    let solved = run_solve(&config).map_err(run_error)?;
    let trajectory = simulate_path(&solved.pipe.policy, &config.params, &config.sim)
        .map_err(|e| run_error(RunFailure(e.to_string())))?;
    println!(
        "path 0: {} samples, stop={:?} at t={:?}",
        trajectory.samples.len(),
        trajectory.stop_reason,
        trajectory.stop_time
    );
    let dir = Path::new(&config.output_dir);
    std::fs::create_dir_all(dir).map_err(|e| run_error(RunFailure(e.to_string())))?;
    output::write_trajectory_csv(&dir.join("trajectory.csv"), &trajectory)
        .map_err(|e| run_error(RunFailure(e.to_string())))?;
    println!("wrote {}", dir.join("trajectory.csv").display());
    if config.sim.n_paths > 1 {
        let stats = ensemble_stats(&solved.pipe.policy, &config.params, &config.sim)
            .map_err(|e| run_error(RunFailure(e.to_string())))?;
        println!(
            "ensemble: {} paths, {} boundary exits, mean boundary stop time {:?}, regime-1 occupation {:.4}",
            stats.n_paths, stats.boundary_exits, stats.mean_boundary_stop_time, stats.occupation_regime1
        );
        output::write_ensemble_csv(&dir.join("ensemble.csv"), &stats)
            .map_err(|e| run_error(RunFailure(e.to_string())))?;
        println!("wrote {}", dir.join("ensemble.csv").display());
    }
    emit_solution(&config, &solved.pipe, Some(&trajectory)).map_err(run_error)?;
    check_bounds(&config, &solved.pipe).map_err(run_error)?;
    Ok(())
}

fn report_sensitivity(outcome: &SensitivityOutcome) {
    println!(
        "dominance z1 >= z2: max_violation={:.3e} violating_nodes={} pass={}",
        outcome.dominance.max_violation, outcome.dominance.violating_nodes, outcome.dominance.pass
    );
}

fn cmd_sensitivity(config_path: &Path, scenario: &str) -> Result<(), ExitCode> {
    let id: ScenarioId = scenario
        .parse()
        .map_err(|e: prodplan::Error| usage_error(e.to_string()))?;
    if id == ScenarioId::S4 {
        return Err(usage_error(
            "scenario s4 is the model comparison; use the compare subcommand".to_string(),
        ));
    }
    let config = load_config(config_path).map_err(usage_error)?;
    let spec = ScenarioSpec {
        id,
        params: config.params,
        costs: config.costs,
        n_points: config.n_points,
        scan: config.scan,
        solve: config.solve,
    };
    spec.validate_hypotheses()
        .map_err(|e| usage_error(e.to_string()))?;
    let outcome =
        run_sensitivity_scenario(&spec).map_err(|e| run_error(RunFailure(e.to_string())))?;
    warn_if_inexact(&outcome.k);
    warn_if_stalled(&outcome.report);
    if !outcome.report.converged {
        return Err(run_error(RunFailure("solver did not converge".into())));
    }
    report_sensitivity(&outcome);
    if config.strict && !outcome.dominance.pass {
        return Err(run_error(RunFailure(
            "dominance check failed in strict mode".into(),
        )));
    }
    Ok(())
}

fn cmd_compare(config_path: &Path) -> Result<(), ExitCode> {
    let config = load_config(config_path).map_err(usage_error)?;
    let spec = ScenarioSpec {
        id: ScenarioId::S4,
        params: config.params,
        costs: config.costs,
        n_points: config.n_points,
        scan: config.scan,
        solve: config.solve,
    };
    spec.validate_hypotheses()
        .map_err(|e| usage_error(e.to_string()))?;
    let outcome = regime_comparison(&spec).map_err(|e| run_error(RunFailure(e.to_string())))?;
    warn_if_inexact(&outcome.coupled.k);
    let labels = ["zbar1 >= z1", "z1 >= z2", "z2 >= zunder2"];
    for (label, link) in labels.iter().zip(&outcome.chain) {
        println!(
            "{label}: max_violation={:.3e} pass={}",
            link.max_violation, link.pass
        );
    }
    println!("chain pass={}", outcome.pass);
    if config.strict && !outcome.pass {
        return Err(run_error(RunFailure(
            "comparison chain failed in strict mode".into(),
        )));
    }
    Ok(())
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn run_error(failure: RunFailure) -> ExitCode {
    eprintln!("error: {}", failure.0);
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { config } => cmd_solve(config),
        Command::Simulate { config } => cmd_simulate(config),
        Command::Sensitivity { config, scenario } => cmd_sensitivity(config, scenario),
        Command::Compare { config } => cmd_compare(config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
