//! Latent recovery: invert a target through a generator by Adam-driven
//! gradient descent on `||x - G(z)||²` with per-coordinate probabilistic
//! resampling.
//!
//! Each iteration applies one Adam step, then visits every coordinate in
//! order, draws a threshold `U(0,1)`, and redraws the coordinate from
//! N(0,1) when its per-step resample probability exceeds the threshold.
//! The draw order is fixed (init normals, then per iteration: thresh_1,
//! maybe redraw_1, thresh_2, ...) so runs are bit-reproducible and paired
//! comparisons across criteria share their initial state.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gantrain::{AdamParams, AdamVec};
use crate::diffcore::Network;
use crate::rng::Rng;
use crate::tensor::{l2_sq, Tensor};

/// Rule giving the total probability that a coordinate should be redrawn
/// from the prior, as a function of its current value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ResampleCriterion {
    /// Never resample (the baseline).
    Disabled,
    /// Resample exactly when `|z_i| > cutoff`.
    Hard { cutoff: f64 },
    /// `P = 1 / (1 + exp(-steepness·(|z_i| - midpoint)))`.
    Logistic { steepness: f64, midpoint: f64 },
    /// `P = N(cutoff)/N(z_i)` inside the cutoff, 1 outside, with `N` the
    /// standard normal pdf; continuous at `|z_i| = cutoff`.
    TruncNormal { cutoff: f64 },
}

impl ResampleCriterion {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            ResampleCriterion::Disabled => true,
            ResampleCriterion::Hard { cutoff } => cutoff.is_finite() && *cutoff > 0.0,
            ResampleCriterion::Logistic { steepness, midpoint } => {
                steepness.is_finite() && *steepness > 0.0 && midpoint.is_finite()
            }
            ResampleCriterion::TruncNormal { cutoff } => cutoff.is_finite() && *cutoff > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid criterion parameters: {self}")))
        }
    }

    /// Total resample probability for a coordinate at value `z`. Depends on
    /// `|z|` only, and is non-decreasing in `|z|`.
    pub fn resample_prob(&self, z: f64) -> f64 {
        let az = z.abs();
        match self {
            ResampleCriterion::Disabled => 0.0,
            ResampleCriterion::Hard { cutoff } => {
                if az > *cutoff {
                    1.0
                } else {
                    0.0
                }
            }
            ResampleCriterion::Logistic { steepness, midpoint } => {
                1.0 / (1.0 + (-steepness * (az - midpoint)).exp())
            }
            ResampleCriterion::TruncNormal { cutoff } => {
                if az <= *cutoff {
                    // N(a)/N(z) = exp((z² - a²)/2)
                    ((z * z - cutoff * cutoff) / 2.0).exp()
                } else {
                    1.0
                }
            }
        }
    }

    /// Criterion family name as used in the records CSV.
    pub fn name(&self) -> &'static str {
        match self {
            ResampleCriterion::Disabled => "disabled",
            ResampleCriterion::Hard { .. } => "hard",
            ResampleCriterion::Logistic { .. } => "logistic",
            ResampleCriterion::TruncNormal { .. } => "truncnorm",
        }
    }

    /// Parameter list without the family name ("2,2" for `logistic:2,2`).
    pub fn params_str(&self) -> String {
        match self {
            ResampleCriterion::Disabled => String::new(),
            ResampleCriterion::Hard { cutoff } => format!("{cutoff}"),
            ResampleCriterion::Logistic { steepness, midpoint } => {
                format!("{steepness},{midpoint}")
            }
            ResampleCriterion::TruncNormal { cutoff } => format!("{cutoff}"),
        }
    }
}

impl fmt::Display for ResampleCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResampleCriterion::Disabled => write!(f, "disabled"),
            _ => write!(f, "{}:{}", self.name(), self.params_str()),
        }
    }
}

impl FromStr for ResampleCriterion {
    type Err = Error;

    /// Parses the CLI syntax: `disabled`, `hard:C`, `logistic:A,B`,
    /// `truncnorm:A`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| {
            Error::invalid(format!(
                "bad criterion '{s}': {msg} \
                 (expected disabled | hard:C | logistic:A,B | truncnorm:A)"
            ))
        };
        let parse_num = |v: &str| -> Result<f64> {
            v.trim()
                .parse::<f64>()
                .map_err(|_| bad(&format!("'{v}' is not a number")))
        };
        let (head, args) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let criterion = match (head, args) {
            ("disabled", None) => ResampleCriterion::Disabled,
            ("disabled", Some(_)) => return Err(bad("disabled takes no parameters")),
            ("hard", Some(a)) => ResampleCriterion::Hard {
                cutoff: parse_num(a)?,
            },
            ("logistic", Some(a)) => {
                let (p1, p2) = a
                    .split_once(',')
                    .ok_or_else(|| bad("logistic needs two parameters"))?;
                ResampleCriterion::Logistic {
                    steepness: parse_num(p1)?,
                    midpoint: parse_num(p2)?,
                }
            }
            ("truncnorm", Some(a)) => ResampleCriterion::TruncNormal {
                cutoff: parse_num(a)?,
            },
            _ => return Err(bad("unknown criterion")),
        };
        criterion.validate()?;
        Ok(criterion)
    }
}

/// Converts a total resample probability into the per-iteration probability
/// `1 - (1 - p)^(1/E)` for an expected run of `E` iterations, computed via
/// `1 - exp(log1p(-p)/E)` so probabilities near 1 keep full accuracy.
pub fn per_step_prob(p: f64, expected_iters: u64) -> Result<f64> {
    if expected_iters == 0 {
        return Err(Error::invalid("expected iterations must be at least 1"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("probability {p} outside [0, 1]")));
    }
    if expected_iters == 1 || p == 0.0 || p == 1.0 {
        return Ok(p);
    }
    // expm1 keeps tiny per-step probabilities at full relative precision,
    // which a literal 1 - exp(...) would truncate to ~1e-16 absolute.
    Ok(-((-p).ln_1p() / expected_iters as f64).exp_m1())
}

fn default_iters() -> u64 {
    20_000
}
fn default_recovery_lr() -> f64 {
    0.01
}
fn default_beta1() -> f64 {
    0.9
}
fn default_beta2() -> f64 {
    0.999
}
fn default_eps() -> f64 {
    1e-8
}
fn default_true() -> bool {
    true
}

/// Recovery hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryConfig {
    /// Gradient-descent iterations to run.
    #[serde(default = "default_iters")]
    pub iters: u64,
    #[serde(default = "default_recovery_lr")]
    pub lr: f64,
    #[serde(default = "default_beta1")]
    pub beta1: f64,
    #[serde(default = "default_beta2")]
    pub beta2: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// The `E` used by `per_step_prob`; defaults to `iters`.
    #[serde(default)]
    pub expected_iters: Option<u64>,
    /// Clear a coordinate's Adam moments when it is resampled.
    #[serde(default = "default_true")]
    pub reset_moments: bool,
    #[serde(default)]
    pub record_trace: bool,
    #[serde(default)]
    pub seed: u64,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        RecoveryConfig {
            iters: default_iters(),
            lr: default_recovery_lr(),
            beta1: default_beta1(),
            beta2: default_beta2(),
            eps: default_eps(),
            expected_iters: None,
            reset_moments: true,
            record_trace: false,
            seed: 0,
        }
    }
}

impl RecoveryConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Error::invalid("recovery lr must be positive"));
        }
        if self.expected_iters == Some(0) {
            return Err(Error::invalid("expected_iters must be at least 1"));
        }
        Ok(())
    }

    fn effective_expected_iters(&self) -> u64 {
        self.expected_iters.unwrap_or(self.iters).max(1)
    }
}

/// One point of the optional per-iteration trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iter: u64,
    /// Loss at the start of the iteration (before its Adam step).
    pub loss: f64,
    pub resamples: u64,
}

#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub z: Tensor,
    pub final_loss: f64,
    pub trace: Option<Vec<TracePoint>>,
    /// How many times each coordinate was redrawn.
    pub resample_counts: Vec<u64>,
    pub seed: u64,
}

impl RecoveryResult {
    pub fn total_resamples(&self) -> u64 {
        self.resample_counts.iter().sum()
    }

    /// Trace as CSV text with header `iter,loss,resamples_this_iter`.
    pub fn trace_csv(&self) -> Option<String> {
        let trace = self.trace.as_ref()?;
        let mut out = String::from("iter,loss,resamples_this_iter\n");
        for p in trace {
            out.push_str(&format!("{},{},{}\n", p.iter, p.loss, p.resamples));
        }
        Some(out)
    }
}

/// Recovers a latent vector for `x` under `generator`, seeding the stream
/// from `cfg.seed`.
pub fn recover(
    x: &Tensor,
    generator: &Network,
    criterion: &ResampleCriterion,
    cfg: &RecoveryConfig,
) -> Result<RecoveryResult> {
    recover_with_rng(x, generator, criterion, cfg, Rng::from_seed(cfg.seed), cfg.seed)
}

/// Recovery over a caller-supplied stream. The paired-trial harness uses
/// this to hand every criterion an identical starting state; `seed_label`
/// is recorded in the result untouched.
pub fn recover_with_rng(
    x: &Tensor,
    generator: &Network,
    criterion: &ResampleCriterion,
    cfg: &RecoveryConfig,
    rng: Rng,
    seed_label: u64,
) -> Result<RecoveryResult> {
    recover_with_progress(x, generator, criterion, cfg, rng, seed_label, |_, _| {})
}

/// Like [`recover_with_rng`] with a per-iteration observer `(iter, loss)`,
/// for progress reporting.
pub fn recover_with_progress(
    x: &Tensor,
    generator: &Network,
    criterion: &ResampleCriterion,
    cfg: &RecoveryConfig,
    mut rng: Rng,
    seed_label: u64,
    mut on_iter: impl FnMut(u64, f64),
) -> Result<RecoveryResult> {
    criterion.validate()?;
    cfg.validate()?;
    let d = generator.input_dim();
    if x.len() != generator.output_dim() || x.rank() != 1 {
        return Err(Error::dim(
            "recover target",
            format!("[{}]", generator.output_dim()),
            format!("{:?}", x.shape()),
        ));
    }

    let mut z = rng.normal_vec(d);
    let mut adam = AdamVec::new(d);
    let hyper = AdamParams {
        lr: cfg.lr,
        beta1: cfg.beta1,
        beta2: cfg.beta2,
        eps: cfg.eps,
    };
    let expected = cfg.effective_expected_iters();
    let mut counts = vec![0u64; d];
    let mut trace = cfg.record_trace.then(|| Vec::with_capacity(cfg.iters as usize));

    for t in 1..=cfg.iters {
        let z_t = Tensor::from_vec(z.clone());
        let (out, fwd) = generator.forward_trace(&z_t)?;
        let loss = l2_sq(x, &out)?;
        if !loss.is_finite() {
            return Err(Error::NonFinite {
                what: "recovery loss".into(),
                step: Some(t),
            });
        }
        let upstream = Tensor::from_vec(
            out.data()
                .iter()
                .zip(x.data())
                .map(|(o, xi)| 2.0 * (o - xi))
                .collect(),
        );
        let grad = generator.backward_input(&fwd, &upstream)?;
        adam.update(&mut z, grad.data(), &hyper)?;
        on_iter(t, loss);

        let mut resampled_now = 0u64;
        for i in 0..d {
            let thresh = rng.next_f64();
            let q = per_step_prob(criterion.resample_prob(z[i]), expected)?;
            if q > thresh {
                z[i] = rng.normal();
                counts[i] += 1;
                resampled_now += 1;
                if cfg.reset_moments {
                    adam.reset_coord(i);
                }
            }
        }
        if let Some(points) = trace.as_mut() {
            points.push(TracePoint {
                iter: t,
                loss,
                resamples: resampled_now,
            });
        }
    }

    let z_final = Tensor::from_vec(z);
    let final_loss = l2_sq(x, &generator.forward(&z_final)?)?;
    Ok(RecoveryResult {
        z: z_final,
        final_loss,
        trace,
        resample_counts: counts,
        seed: seed_label,
    })
}

/// Mean squared coordinate error `||z_true - z_approx||² / d`.
pub fn reconstruction_error(z_true: &Tensor, z_approx: &Tensor) -> Result<f64> {
    if z_true.shape() != z_approx.shape() {
        return Err(Error::dim(
            "reconstruction_error",
            format!("{:?}", z_true.shape()),
            format!("{:?}", z_approx.shape()),
        ));
    }
    Ok(l2_sq(z_true, z_approx)? / z_true.len() as f64)
}
