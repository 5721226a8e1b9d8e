//! Paired-trial evaluation of resampling criteria against the disabled
//! baseline, plus the summary metric suite and table rendering.
//!
//! Every trial draws one `z_true` from its own derived stream and hands
//! every criterion an identical copy of the post-draw generator state, so
//! criteria start from the same `z⁽⁰⁾` and the same threshold draws; only
//! actual resamples make their streams diverge. Trial × criterion cells
//! are independent jobs: with the `parallel` feature they fan out over a
//! rayon pool, and results are identical byte-for-byte either way.

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::diffcore::Network;
use crate::error::{Error, Result};
use crate::recovery::{
    reconstruction_error, recover_with_rng, RecoveryConfig, ResampleCriterion,
};
use crate::rng::{trial_seed, Rng};
use crate::tensor::Tensor;

/// Error thresholds of the summary table, ascending.
pub const THRESHOLDS: [f64; 5] = [1e-4, 1e-3, 1e-2, 1e-1, 1e0];

/// Ratio needed for a win to count as significant.
const SIG_FACTOR: f64 = 2.0;

/// Worker count for trial × criterion cells. `Count(1)` runs on the
/// calling thread; without the `parallel` feature everything does.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Jobs {
    Auto,
    Count(usize),
}

impl Jobs {
    pub fn from_flag(n: Option<usize>) -> Self {
        match n {
            None | Some(0) => Jobs::Auto,
            Some(n) => Jobs::Count(n),
        }
    }
}

/// Outcome of one recovery cell.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub criterion: ResampleCriterion,
    /// Stream seed shared by every criterion of this trial.
    pub seed: u64,
    /// Reconstruction error against the trial's `z_true`.
    pub error: f64,
    pub final_loss: f64,
    pub resamples: u64,
    /// Informational only; excluded from determinism comparisons.
    pub wall_ms: f64,
}

/// Runs `n_trials` paired trials of every criterion.
///
/// Per trial `k`: seed `s_k = splitmix64(master_seed XOR k)` opens a
/// stream, `z_true` is drawn from it, `x = G(z_true)`, and each criterion
/// recovers `x` from a clone of the stream as it stands after the
/// `z_true` draw. Records come back ordered by (trial, criterion
/// position) regardless of scheduling.
pub fn run_paired_trials(
    generator: &Network,
    criteria: &[ResampleCriterion],
    n_trials: u64,
    master_seed: u64,
    cfg: &RecoveryConfig,
    jobs: Jobs,
    on_cell: Option<&(dyn Fn(&TrialRecord) + Sync)>,
) -> Result<Vec<TrialRecord>> {
    if n_trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    if !criteria.contains(&ResampleCriterion::Disabled) {
        return Err(Error::invalid(
            "criteria list must include the disabled baseline",
        ));
    }
    for c in criteria {
        c.validate()?;
    }
    cfg.validate()?;

    struct TrialSetup {
        trial: u64,
        seed: u64,
        z_true: Tensor,
        x: Tensor,
        rng: Rng,
    }

    let d = generator.input_dim();
    let setups = (0..n_trials)
        .map(|k| {
            let seed = trial_seed(master_seed, k);
            let mut rng = Rng::from_seed(seed);
            let z_true = Tensor::from_vec(rng.normal_vec(d));
            let x = generator.forward(&z_true)?;
            Ok(TrialSetup {
                trial: k,
                seed,
                z_true,
                x,
                rng,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let cells: Vec<(usize, usize)> = (0..setups.len())
        .flat_map(|t| (0..criteria.len()).map(move |c| (t, c)))
        .collect();

    let run_cell = |&(ti, ci): &(usize, usize)| -> Result<TrialRecord> {
        let setup = &setups[ti];
        let criterion = &criteria[ci];
        let start = Instant::now();
        let res = recover_with_rng(
            &setup.x,
            generator,
            criterion,
            cfg,
            setup.rng.clone(),
            setup.seed,
        )?;
        let record = TrialRecord {
            trial: setup.trial,
            criterion: *criterion,
            seed: setup.seed,
            error: reconstruction_error(&setup.z_true, &res.z)?,
            final_loss: res.final_loss,
            resamples: res.total_resamples(),
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        };
        if let Some(f) = on_cell {
            f(&record);
        }
        Ok(record)
    };

    run_jobs(&cells, run_cell, jobs)
}

#[cfg(feature = "parallel")]
fn run_jobs<I, T, F>(items: &[I], f: F, jobs: Jobs) -> Result<Vec<T>>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> Result<T> + Sync,
{
    use rayon::prelude::*;
    match jobs {
        Jobs::Count(1) => items.iter().map(&f).collect(),
        Jobs::Auto => items.par_iter().map(&f).collect(),
        Jobs::Count(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
            pool.install(|| items.par_iter().map(&f).collect())
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn run_jobs<I, T, F>(items: &[I], f: F, _jobs: Jobs) -> Result<Vec<T>>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> Result<T> + Sync,
{
    items.iter().map(|i| f(i)).collect()
}

// ---------------------------------------------------------------------------
// Summary metrics

/// One summary row. `wins` is 0 for the baseline by convention (a
/// criterion cannot beat itself); the rendered table prints `-` there,
/// matching the usual presentation.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub criterion: String,
    pub baseline: bool,
    /// Percentage of trials with error below each of [`THRESHOLDS`].
    pub thresholds: [f64; 5],
    /// Percentage of trials strictly beating the baseline (ties lose).
    pub wins: f64,
    /// Percentage of ≥2× wins among trials differing by ≥2× either way;
    /// `None` when no trial differed by that factor.
    pub sig_wins: Option<f64>,
    pub avg_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalTable {
    pub rows: Vec<EvalRow>,
}

/// Error ratio with ties fixed at 1 so exact ties (possible on a
/// deterministic CPU, unlike the original GPU runs) never count as
/// differing.
fn ratio(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        a / b
    }
}

/// Aggregates paired-trial records into the summary table. Criteria keep
/// their first-appearance order; every criterion must cover exactly the
/// baseline's trial set.
pub fn summarize(records: &[TrialRecord]) -> Result<EvalTable> {
    let mut order: Vec<String> = Vec::new();
    for r in records {
        let key = r.criterion.to_string();
        if !order.contains(&key) {
            order.push(key);
        }
    }
    let baseline_key = ResampleCriterion::Disabled.to_string();
    if !order.contains(&baseline_key) {
        return Err(Error::invalid("records lack the disabled baseline"));
    }

    let collect = |key: &str| -> Vec<(u64, f64)> {
        let mut pairs: Vec<(u64, f64)> = records
            .iter()
            .filter(|r| r.criterion.to_string() == key)
            .map(|r| (r.trial, r.error))
            .collect();
        pairs.sort_by_key(|(t, _)| *t);
        pairs
    };

    let baseline = collect(&baseline_key);
    let baseline_trials: Vec<u64> = baseline.iter().map(|(t, _)| *t).collect();

    let mut rows = Vec::with_capacity(order.len());
    for key in &order {
        let pairs = collect(key);
        let trials: Vec<u64> = pairs.iter().map(|(t, _)| *t).collect();
        if trials != baseline_trials {
            return Err(Error::invalid(format!(
                "criterion {key} covers a different trial set than the baseline"
            )));
        }
        let n = pairs.len() as f64;
        let mut thresholds = [0.0; 5];
        for (slot, eps) in thresholds.iter_mut().zip(THRESHOLDS) {
            let hits = pairs.iter().filter(|(_, e)| *e < eps).count();
            *slot = 100.0 * hits as f64 / n;
        }
        let avg_err = pairs.iter().map(|(_, e)| e).sum::<f64>() / n;

        let is_baseline = key == &baseline_key;
        let (wins, sig_wins) = if is_baseline {
            (0.0, None)
        } else {
            let mut won = 0usize;
            let mut sig_num = 0usize;
            let mut sig_den = 0usize;
            for ((_, e_crit), (_, e_dis)) in pairs.iter().zip(&baseline) {
                if e_crit < e_dis {
                    won += 1;
                }
                let improve = ratio(*e_dis, *e_crit);
                let worsen = ratio(*e_crit, *e_dis);
                if improve.max(worsen) >= SIG_FACTOR {
                    sig_den += 1;
                    if improve >= SIG_FACTOR {
                        sig_num += 1;
                    }
                }
            }
            let sig = (sig_den > 0).then(|| 100.0 * sig_num as f64 / sig_den as f64);
            (100.0 * won as f64 / n, sig)
        };

        rows.push(EvalRow {
            criterion: key.clone(),
            baseline: is_baseline,
            thresholds,
            wins,
            sig_wins,
            avg_err,
        });
    }
    Ok(EvalTable { rows })
}

// ---------------------------------------------------------------------------
// Rendering

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
}

/// Percentages print as integers when whole, otherwise with two decimals.
fn fmt_pct(x: f64) -> String {
    if (x - x.round()).abs() < 1e-9 {
        format!("{}", x.round() as i64)
    } else {
        format!("{x:.2}")
    }
}

fn row_cells(row: &EvalRow) -> Vec<String> {
    let mut cells = vec![row.criterion.clone()];
    cells.extend(row.thresholds.iter().map(|t| fmt_pct(*t)));
    if row.baseline {
        cells.push("-".into());
        cells.push("-".into());
    } else {
        cells.push(fmt_pct(row.wins));
        cells.push(row.sig_wins.map_or_else(|| "-".into(), fmt_pct));
    }
    cells.push(format!("{:.3}", row.avg_err));
    cells
}

const HEADER: [&str; 9] = [
    "criterion", "1e-4", "1e-3", "1e-2", "1e-1", "1e0", "wins", "sig wins", "avg err",
];

/// Renders the summary with columns criterion, the five thresholds, wins,
/// sig wins, avg err (three decimals).
pub fn render_table(table: &EvalTable, format: TableFormat) -> String {
    match format {
        TableFormat::Markdown => {
            let mut out = String::new();
            out.push_str(&format!("| {} |\n", HEADER.join(" | ")));
            out.push_str(&format!("|{}\n", " --- |".repeat(HEADER.len())));
            for row in &table.rows {
                out.push_str(&format!("| {} |\n", row_cells(row).join(" | ")));
            }
            out
        }
        TableFormat::Csv => {
            let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
            w.write_record(HEADER).expect("csv write");
            for row in &table.rows {
                w.write_record(row_cells(row)).expect("csv write");
            }
            String::from_utf8(w.into_inner().expect("csv flush")).expect("utf8")
        }
    }
}

/// Raw per-cell records as CSV:
/// `trial,criterion,params,seed,error,final_loss,resamples,wall_ms`.
pub fn records_csv(records: &[TrialRecord]) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record([
        "trial",
        "criterion",
        "params",
        "seed",
        "error",
        "final_loss",
        "resamples",
        "wall_ms",
    ])
    .expect("csv write");
    for r in records {
        w.write_record([
            r.trial.to_string(),
            r.criterion.name().to_string(),
            r.criterion.params_str(),
            r.seed.to_string(),
            r.error.to_string(),
            r.final_loss.to_string(),
            r.resamples.to_string(),
            r.wall_ms.to_string(),
        ])
        .expect("csv write");
    }
    String::from_utf8(w.into_inner().expect("csv flush")).expect("utf8")
}

// ---------------------------------------------------------------------------
// Experiment configuration

/// JSON experiment description consumed by `evaluate`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Path to the generator checkpoint.
    pub model: PathBuf,
    /// Criteria in CLI syntax; must include "disabled".
    pub criteria: Vec<String>,
    pub trials: u64,
    /// Master seed; flag and environment can override/supply it.
    pub master_seed: Option<u64>,
    #[serde(default)]
    pub recovery: RecoveryConfig,
    /// Worker count; 0 or absent means automatic.
    #[serde(default)]
    pub jobs: Option<usize>,
}

/// Parses CLI-syntax criterion strings, preserving order.
pub fn parse_criteria(specs: &[String]) -> Result<Vec<ResampleCriterion>> {
    specs.iter().map(|s| s.parse()).collect()
}
