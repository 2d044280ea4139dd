//! CSV and metadata emission.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use prodplan::{FieldPair, KParameters, LambdaPair, PolicyResult, SolveReport, Trajectory};

/// 17 significant digits: round-trips binary64 exactly.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `fields.csv` (one row per node) and the `metadata.txt` sidecar;
/// returns the CSV path.
pub fn write_fields_csv(
    dir: &Path,
    fields: &FieldPair,
    policy: &PolicyResult,
    report: &SolveReport,
    k: &KParameters,
    lambdas: &LambdaPair,
) -> io::Result<std::path::PathBuf> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join("fields.csv");
    let mut out = String::new();
    out.push_str("x,u1,u2,z1,z2,B1,B2,p1,p2\n");
    for i in 0..policy.grid.n_points {
        let row = [
            policy.grid.nodes[i],
            fields.u1[i],
            fields.u2[i],
            policy.z1[i],
            policy.z2[i],
            policy.b1[i],
            policy.b2[i],
            policy.p1[i],
            policy.p2[i],
        ];
        let cells: Vec<String> = row.iter().map(|&v| fmt(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(&csv_path, out)?;

    let meta_path = dir.join("metadata.txt");
    let mut meta = fs::File::create(&meta_path)?;
    writeln!(meta, "K1={}", fmt(k.k1))?;
    writeln!(meta, "K2={}", fmt(k.k2))?;
    writeln!(meta, "S1={}", fmt(k.s1))?;
    writeln!(meta, "S2={}", fmt(k.s2))?;
    writeln!(meta, "k_exact={}", k.exact)?;
    writeln!(meta, "k_residual_norm={}", fmt(k.residual_norm))?;
    writeln!(meta, "lambda1={}", fmt(lambdas.lambda1))?;
    writeln!(meta, "lambda2={}", fmt(lambdas.lambda2))?;
    writeln!(meta, "iterations={}", report.iterations)?;
    writeln!(meta, "converged={}", report.converged)?;
    writeln!(meta, "final_delta_u1={}", fmt(report.final_delta[0]))?;
    writeln!(meta, "final_delta_u2={}", fmt(report.final_delta[1]))?;
    writeln!(meta, "residual_u1={}", fmt(report.residual_norm[0]))?;
    writeln!(meta, "residual_u2={}", fmt(report.residual_norm[1]))?;
    writeln!(
        meta,
        "relative_residual_u1={}",
        fmt(report.relative_residual[0])
    )?;
    writeln!(
        meta,
        "relative_residual_u2={}",
        fmt(report.relative_residual[1])
    )?;
    writeln!(meta, "monotone_violations={}", report.monotone_violations)?;
    Ok(csv_path)
}

/// Writes one trajectory as `t,y,regime` rows.
pub fn write_trajectory_csv(path: &Path, trajectory: &Trajectory) -> io::Result<()> {
    let mut out = String::new();
    out.push_str("t,y,regime\n");
    for &(t, y, regime) in &trajectory.samples {
        out.push_str(&format!("{},{},{}\n", fmt(t), fmt(y), regime.index()));
    }
    fs::write(path, out)
}

/// Per-path ensemble summary rows.
pub fn write_ensemble_csv(path: &Path, summary: &prodplan::EnsembleSummary) -> io::Result<()> {
    let mut out = String::new();
    out.push_str("path,stop_reason,stop_time,final_y\n");
    for i in 0..summary.n_paths {
        let reason = match summary.stop_reasons[i] {
            prodplan::StopReason::Boundary => "boundary",
            prodplan::StopReason::Horizon => "horizon",
        };
        let stop = summary.stop_times[i].map(fmt).unwrap_or_default();
        out.push_str(&format!(
            "{i},{reason},{stop},{}\n",
            fmt(summary.final_states[i])
        ));
    }
    fs::write(path, out)
}
