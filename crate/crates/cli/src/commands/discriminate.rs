use serde::Serialize;

use qpca_core::discrim::{
    coarse_grained_tv, exact_distribution, qpe_distribution, run_trials, Assignment, ClusterPair, Label, TrialSummary,
};
use qpca_core::gram::Dataset;
use qpca_core::linalg::io::read_state;
use qpca_core::random::trial_uniform;

use super::{positive, qpe_config, require_file, Context, Outcome};
use crate::config::{DiscriminateParams, ExperimentConfig, Mode, QpeParams};
use crate::error::CliError;
use crate::output::Artifact;

#[derive(Serialize)]
struct Frequencies {
    first: f64,
    second: f64,
    abstain: f64,
}

#[derive(Serialize)]
struct Report {
    labels: [String; 2],
    mode: Mode,
    assigned_set: Option<String>,
    assignment: Assignment,
    exact_distribution: Vec<(f64, f64)>,
    tv_to_exact: Option<f64>,
    copies_consumed: u64,
    trials: TrialSummary,
    frequencies: Frequencies,
    helstrom_error: f64,
    sign_rule_error: f64,
}

pub fn run(p: DiscriminateParams, ctx: &Context, mut snapshot: ExperimentConfig) -> Result<Outcome, CliError> {
    let data_path = require_file("dataset", &p.dataset)?;
    let chi_path = require_file("chi", &p.chi)?;
    let mode = p.mode.unwrap_or(Mode::Exact);
    let trials = positive("trials", p.trials.unwrap_or(10_000))?;
    let qpe = match mode {
        Mode::Exact => None,
        Mode::Qpe => Some(qpe_config(&p.qpe, 6)?),
    };
    let (clusters, labels) = ClusterPair::from_dataset(&Dataset::load(&data_path)?)?;
    let chi = read_state(&chi_path)?;

    let exact = exact_distribution(&chi, &clusters)?;
    let (dist, copies, tv, qpe_snapshot) = match qpe {
        None => (exact.clone(), 0, None, QpeParams::default()),
        Some((cfg, resolved)) => {
            let (dist, copies) = qpe_distribution(&chi, &clusters, &cfg)?;
            let tv = coarse_grained_tv(&dist, &exact);
            (dist, copies, Some(tv), resolved)
        }
    };
    let assignment = Assignment::from_draw(dist.clone(), trial_uniform(ctx.seed, 0));
    let summary = run_trials(&dist, trials, ctx.seed);
    let assigned_set = match assignment.label {
        Label::First => Some(labels[0].clone()),
        Label::Second => Some(labels[1].clone()),
        Label::Abstain => None,
    };
    let line = format!(
        "assigned {} (x = {:+.6}); frequencies {:.4}/{:.4}/{:.4}",
        assigned_set.as_deref().unwrap_or("neither"),
        assignment.eigenvalue,
        summary.frequency(Label::First),
        summary.frequency(Label::Second),
        summary.frequency(Label::Abstain),
    );
    let report = Report {
        mode,
        assigned_set,
        assignment,
        exact_distribution: exact,
        tv_to_exact: tv,
        copies_consumed: copies,
        frequencies: Frequencies {
            first: summary.frequency(Label::First),
            second: summary.frequency(Label::Second),
            abstain: summary.frequency(Label::Abstain),
        },
        trials: summary,
        helstrom_error: clusters.helstrom_error()?,
        sign_rule_error: clusters.sign_rule_error(),
        labels,
    };

    snapshot.discriminate = DiscriminateParams { mode: Some(mode), qpe: qpe_snapshot, trials: Some(trials), ..p };
    Ok(Outcome { artifacts: vec![Artifact::json("assignment.json", &report)?], snapshot, summary: line })
}
