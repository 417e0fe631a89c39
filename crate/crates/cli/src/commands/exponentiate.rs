use serde::Serialize;

use qpca_core::dmexp::{evolve_swap_channel, exact_conjugation, SwapSchedule};
use qpca_core::linalg::io::{matrix_to_json, read_density, EntriesJson};
use qpca_core::linalg::trace_distance;

use super::{require_file, Context, Outcome};
use crate::config::{ExperimentConfig, ExponentiateParams};
use crate::error::{missing, CliError};
use crate::output::Artifact;

#[derive(Serialize)]
struct ExponentiateResult {
    total_time: f64,
    steps: usize,
    step_size: f64,
    copies_consumed: usize,
    trace_distance_to_exact: f64,
    state: EntriesJson,
}

pub fn run(p: ExponentiateParams, _ctx: &Context, mut snapshot: ExperimentConfig) -> Result<Outcome, CliError> {
    let rho_path = require_file("rho", &p.rho)?;
    let sigma_path = require_file("sigma", &p.sigma)?;
    let time = p.time.ok_or_else(|| missing("time"))?;
    let schedule = match (p.steps, p.epsilon) {
        (Some(n), None) => SwapSchedule::new(time, n)?,
        (None, Some(eps)) => SwapSchedule::for_accuracy(time, eps)?,
        _ => return Err(CliError::Usage("give exactly one of --steps and --epsilon".into())),
    };
    let rho = read_density(&rho_path)?;
    let sigma = read_density(&sigma_path)?;

    let state = evolve_swap_channel(&rho, &sigma, &schedule)?;
    let distance = trace_distance(&state, &exact_conjugation(&rho, &sigma, time)?)?;
    let result = ExponentiateResult {
        total_time: schedule.total_time(),
        steps: schedule.steps(),
        step_size: schedule.step_size(),
        copies_consumed: schedule.steps(),
        trace_distance_to_exact: distance,
        state: matrix_to_json(state.matrix())?,
    };
    snapshot.exponentiate = p;
    Ok(Outcome {
        artifacts: vec![Artifact::json("exponentiate.json", &result)?],
        snapshot,
        summary: format!("n = {} steps, trace distance to exact conjugation {distance:.3e}", schedule.steps()),
    })
}
