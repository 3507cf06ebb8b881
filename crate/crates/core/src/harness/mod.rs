//! Experiment configuration, the outer run loop, and CSV/JSON output.

mod config;
mod output;

use std::time::Instant;

use serde::Serialize;

pub use config::{
    table_defaults, Algorithm, Experiment, ExperimentConfig, GmdSection, LambdaInitKind,
    MetaSection, MmdSection, DEFAULT_EVAL_EVERY, DEFAULT_ITERATIONS,
};
pub use output::{parse_csv, records_to_csv, write_outputs};

use crate::baselines::{cfr_iteration, mmd_update, MmdState, MmdVariant, RegretState};
use crate::error::Result;
use crate::game::JointPolicy;
use crate::gmd::GmdState;
use crate::meta::cmd_iteration;

/// One evaluation of the configured measure.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub measure: String,
    pub value: f64,
    pub wall_seconds: f64,
    /// Weights (magnet first) used at this iteration; empty for non-GMD algorithms.
    pub alpha: Vec<f64>,
}

/// Totals reported alongside the records.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub game: String,
    pub algorithm: String,
    pub measure: String,
    pub iterations: usize,
    pub final_value: Option<f64>,
    pub best_value: Option<f64>,
    pub meta_updates: usize,
    pub meta_evaluations: usize,
    pub wall_seconds: f64,
    pub config: ExperimentConfig,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub records: Vec<IterationRecord>,
    /// The evaluated policy after the last iteration (the average policy for CFR variants).
    pub policy: JointPolicy,
    pub summary: RunSummary,
}

enum Solver {
    Gmd(GmdState),
    Mmd(MmdState, MmdVariant),
    Cfr(RegretState),
}

/// Runs the experiment, evaluating every `eval_every` iterations and after the last one.
pub fn run(exp: &Experiment) -> Result<RunOutput> {
    run_with(exp, |_| {})
}

/// Like [`run`], calling `on_record` as each record is produced.
pub fn run_with(
    exp: &Experiment,
    mut on_record: impl FnMut(&IterationRecord),
) -> Result<RunOutput> {
    let tree = &exp.game.tree;
    let start = Instant::now();
    let mut rng = match &exp.control {
        crate::meta::AlphaControl::Meta(mc) => mc.rng(),
        _ => crate::meta::McConfig::default().rng(),
    };
    let mut gmd = exp.gmd.clone();
    let mut solver = match exp.algorithm {
        a if a.is_gmd() => Solver::Gmd(GmdState::uniform(tree)),
        Algorithm::MmdKl => Solver::Mmd(MmdState::new(JointPolicy::uniform(tree)), MmdVariant::Kl),
        Algorithm::MmdEu => Solver::Mmd(MmdState::new(JointPolicy::uniform(tree)), MmdVariant::Eu),
        Algorithm::Cfr => Solver::Cfr(RegretState::new(tree, false)),
        _ => Solver::Cfr(RegretState::new(tree, true)),
    };
    let name = exp.measure.kind.name().to_string();
    let mut records = Vec::new();
    let (mut updates, mut evaluations) = (0, 0);
    let mut policy = JointPolicy::uniform(tree);
    for k in 1..=exp.iterations {
        let mut alpha = Vec::new();
        policy = match &mut solver {
            Solver::Gmd(state) => {
                let step =
                    cmd_iteration(tree, state, &mut gmd, &exp.control, &exp.measure, &mut rng)?;
                if let Some(u) = &step.update {
                    updates += 1;
                    evaluations += u.evaluations;
                }
                alpha = step.alpha;
                step.joint
            }
            Solver::Mmd(state, variant) => {
                mmd_update(tree, state, *variant, &exp.mmd)?;
                state.joint.clone()
            }
            Solver::Cfr(state) => cfr_iteration(tree, state).1,
        };
        if k % exp.eval_every == 0 || k == exp.iterations {
            let record = IterationRecord {
                iteration: k,
                measure: name.clone(),
                value: exp.measure.evaluate(tree, &policy)?,
                wall_seconds: if exp.timing {
                    start.elapsed().as_secs_f64()
                } else {
                    0.0
                },
                alpha,
            };
            on_record(&record);
            records.push(record);
        }
    }
    let minimize = exp.measure.kind != crate::eval::MeasureKind::SocialWelfare;
    let best = records
        .iter()
        .map(|r| r.value)
        .reduce(|a, b| if (b < a) == minimize { b } else { a });
    let summary = RunSummary {
        game: tree.name().to_string(),
        algorithm: exp.algorithm.name().to_string(),
        measure: name,
        iterations: exp.iterations,
        final_value: records.last().map(|r| r.value),
        best_value: best,
        meta_updates: updates,
        meta_evaluations: evaluations,
        wall_seconds: if exp.timing {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        },
        config: exp.effective.clone(),
    };
    Ok(RunOutput {
        records,
        policy,
        summary,
    })
}
