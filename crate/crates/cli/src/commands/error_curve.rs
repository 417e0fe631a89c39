use qpca_core::dmexp::measure_error_scaling;
use qpca_core::linalg::io::read_density;

use super::{require_file, Context, Outcome};
use crate::config::{ErrorCurveParams, ExperimentConfig};
use crate::error::{missing, CliError};
use crate::output::{num, Artifact};

pub fn run(p: ErrorCurveParams, _ctx: &Context, mut snapshot: ExperimentConfig) -> Result<Outcome, CliError> {
    let rho_path = require_file("rho", &p.rho)?;
    let sigma_path = require_file("sigma", &p.sigma)?;
    let time = p.time.ok_or_else(|| missing("time"))?;
    let steps = p.steps.clone().ok_or_else(|| missing("steps"))?;
    let record_timing = p.record_timing.unwrap_or(true);
    let rho = read_density(&rho_path)?;
    let sigma = read_density(&sigma_path)?;

    let curve = measure_error_scaling(&rho, &sigma, time, &steps)?;
    let rows = curve
        .rows
        .iter()
        .map(|r| {
            let wall = if record_timing { r.wall_time.as_secs_f64() } else { 0.0 };
            vec![r.steps.to_string(), num(r.trace_distance), num(wall)]
        })
        .collect();
    let artifact = Artifact::csv("error_curve.csv", &["n", "trace_distance", "wall_seconds"], rows)?;
    let last = curve.rows.last().expect("at least one row");
    snapshot.error_curve = ErrorCurveParams { record_timing: Some(record_timing), ..p };
    Ok(Outcome {
        artifacts: vec![artifact],
        snapshot,
        summary: format!(
            "{} rows, trace distance {:.3e} at n = {}",
            curve.rows.len(),
            last.trace_distance,
            last.steps
        ),
    })
}
