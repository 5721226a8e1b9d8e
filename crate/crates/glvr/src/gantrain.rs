//! Desk-scale adversarial training: minibatch discriminator/generator
//! updates with optional soft labels, Adam, and synthetic datasets.
//!
//! The discriminator objective is the usual two-term cross-entropy; the
//! generator supports both the saturating loss `mean log(1 - D(G(z)))`
//! (the default) and the non-saturating `-mean log D(G(z))` variant.
//! Discriminator outputs are clamped to `[1e-7, 1 - 1e-7]` inside logs.

use serde::{Deserialize, Serialize};

use crate::diffcore::{LayerGrads, Network};
use crate::error::{Error, Result};
use crate::nets::{init_net, Checkpoint, NetKind, NetSpec};
use crate::rng::Rng;
use crate::tensor::Tensor;

/// Clamp applied to discriminator outputs before taking logarithms.
pub const LOG_CLAMP: f64 = 1e-7;

// ---------------------------------------------------------------------------
// Adam

/// Adam hyperparameters. Training defaults: lr 2e-4, β1 0.5, β2 0.999,
/// ε 1e-8.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamParams {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamParams {
    pub fn with_lr(lr: f64) -> Self {
        AdamParams {
            lr,
            beta1: 0.5,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl Default for AdamParams {
    fn default() -> Self {
        AdamParams::with_lr(2e-4)
    }
}

/// First/second moment state for one flat parameter block.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamVec {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamVec {
    pub fn new(len: usize) -> Self {
        AdamVec {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One bias-corrected Adam update:
    /// m ← β1·m + (1-β1)·g, v ← β2·v + (1-β2)·g²,
    /// θ ← θ - lr·m̂ / (√v̂ + ε).
    pub fn update(&mut self, params: &mut [f64], grads: &[f64], h: &AdamParams) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::dim(
                "adam_update",
                self.m.len(),
                format!("params {}, grads {}", params.len(), grads.len()),
            ));
        }
        self.t += 1;
        let bc1 = 1.0 - h.beta1.powi(self.t as i32);
        let bc2 = 1.0 - h.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = h.beta1 * self.m[i] + (1.0 - h.beta1) * g;
            self.v[i] = h.beta2 * self.v[i] + (1.0 - h.beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= h.lr * m_hat / (v_hat.sqrt() + h.eps);
        }
        Ok(())
    }

    /// Clears the moments of one coordinate (used when that coordinate is
    /// resampled: stale momentum points at the abandoned basin).
    pub fn reset_coord(&mut self, i: usize) {
        self.m[i] = 0.0;
        self.v[i] = 0.0;
    }
}

/// Adam state covering every weight and bias of a network.
#[derive(Debug, Clone)]
pub struct NetAdam {
    layers: Vec<(AdamVec, AdamVec)>,
}

impl NetAdam {
    pub fn new(net: &Network) -> Self {
        let layers = net
            .layers()
            .iter()
            .map(|l| (AdamVec::new(l.weight().len()), AdamVec::new(l.bias().len())))
            .collect();
        NetAdam { layers }
    }

    pub fn update(&mut self, net: &mut Network, grads: &[LayerGrads], h: &AdamParams) -> Result<()> {
        if grads.len() != self.layers.len() {
            return Err(Error::dim("net adam", self.layers.len(), grads.len()));
        }
        for ((layer, g), (mw, mb)) in net.layers_mut().iter_mut().zip(grads).zip(&mut self.layers) {
            mw.update(layer.weight_mut(), &g.weight, h)?;
            mb.update(layer.bias_mut(), &g.bias, h)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Labels and datasets

/// Real/fake target scheme. Soft labels draw per-sample targets uniformly
/// from the configured ranges; the canonical ranges are real ∈ [0.7, 1.2]
/// and fake ∈ [0, 0.3].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LabelScheme {
    Hard,
    Soft {
        real: (f64, f64),
        fake: (f64, f64),
    },
}

impl LabelScheme {
    pub fn soft_default() -> Self {
        LabelScheme::Soft {
            real: (0.7, 1.2),
            fake: (0.0, 0.3),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let LabelScheme::Soft { real, fake } = self {
            if !(real.0 <= real.1 && fake.0 <= fake.1) {
                return Err(Error::invalid("label ranges must be ordered"));
            }
            if real.0 <= fake.1 {
                return Err(Error::invalid(
                    "real label lower bound must exceed fake upper bound",
                ));
            }
        }
        Ok(())
    }

    pub fn draw_real(&self, rng: &mut Rng) -> f64 {
        match self {
            LabelScheme::Hard => 1.0,
            LabelScheme::Soft { real, .. } => rng.uniform(real.0, real.1),
        }
    }

    pub fn draw_fake(&self, rng: &mut Rng) -> f64 {
        match self {
            LabelScheme::Hard => 0.0,
            LabelScheme::Soft { fake, .. } => rng.uniform(fake.0, fake.1),
        }
    }
}

/// Seeded synthetic data sources standing in for a real image corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SyntheticDataset {
    /// `modes` Gaussians of width `sigma` spaced evenly on a circle.
    RingOfGaussians { modes: usize, radius: f64, sigma: f64 },
    /// Alternating unit cells on [-2, 2]².
    Checkerboard,
    /// `side × side` two-level tile patterns with values in [-1, 1].
    ProceduralTiles { side: usize },
}

impl SyntheticDataset {
    /// Ring of 8 Gaussians, radius 2, σ = 0.05: the standard mode-coverage
    /// smoke configuration.
    pub fn default_ring() -> Self {
        SyntheticDataset::RingOfGaussians {
            modes: 8,
            radius: 2.0,
            sigma: 0.05,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SyntheticDataset::RingOfGaussians { modes, radius, sigma } => {
                if *modes == 0 {
                    return Err(Error::invalid("ring needs at least one mode"));
                }
                if !(radius.is_finite() && sigma.is_finite() && *sigma >= 0.0) {
                    return Err(Error::invalid("ring radius/sigma invalid"));
                }
            }
            SyntheticDataset::Checkerboard => {}
            SyntheticDataset::ProceduralTiles { side } => {
                if *side == 0 {
                    return Err(Error::invalid("tile side must be nonzero"));
                }
            }
        }
        Ok(())
    }

    /// Dimensionality of one sample.
    pub fn dim(&self) -> usize {
        match self {
            SyntheticDataset::RingOfGaussians { .. } | SyntheticDataset::Checkerboard => 2,
            SyntheticDataset::ProceduralTiles { side } => side * side,
        }
    }

    /// Mode centers for the ring variant (angle 2πk/modes on the circle).
    pub fn mode_centers(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            SyntheticDataset::RingOfGaussians { modes, radius, .. } => Some(
                (0..*modes)
                    .map(|k| {
                        let angle = std::f64::consts::TAU * k as f64 / *modes as f64;
                        (radius * angle.cos(), radius * angle.sin())
                    })
                    .collect(),
            ),
            _ => None,
        }
    }

    fn sample_into(&self, rng: &mut Rng, out: &mut Vec<f64>) {
        match self {
            SyntheticDataset::RingOfGaussians { modes, radius, sigma } => {
                let k = rng.index(*modes);
                let angle = std::f64::consts::TAU * k as f64 / *modes as f64;
                out.push(radius * angle.cos() + sigma * rng.normal());
                out.push(radius * angle.sin() + sigma * rng.normal());
            }
            SyntheticDataset::Checkerboard => {
                let ix = rng.index(4);
                let iy = rng.index(2);
                let x = -2.0 + ix as f64 + rng.next_f64();
                let y = -2.0 + (2 * iy + (ix & 1)) as f64 + rng.next_f64();
                out.push(x);
                out.push(y);
            }
            SyntheticDataset::ProceduralTiles { side } => {
                let tile = 1 + rng.index(4.min(*side));
                let a = rng.uniform(-1.0, 1.0);
                let b = rng.uniform(-1.0, 1.0);
                let px = rng.index(tile);
                let py = rng.index(tile);
                for r in 0..*side {
                    for c in 0..*side {
                        let parity = ((r + py) / tile + (c + px) / tile) & 1;
                        out.push(if parity == 0 { a } else { b });
                    }
                }
            }
        }
    }

    /// Draws a `[count, dim]` batch.
    pub fn sample_batch(&self, rng: &mut Rng, count: usize) -> Result<Tensor> {
        if count == 0 {
            return Err(Error::invalid("empty batch"));
        }
        let mut data = Vec::with_capacity(count * self.dim());
        for _ in 0..count {
            self.sample_into(rng, &mut data);
        }
        Tensor::new(vec![count, self.dim()], data)
    }
}

// ---------------------------------------------------------------------------
// Priors and losses

/// `d` i.i.d. standard normal draws: the latent prior N(0, I).
pub fn sample_prior(rng: &mut Rng, d: usize) -> Result<Tensor> {
    if d == 0 {
        return Err(Error::invalid("latent dimension must be at least 1"));
    }
    Ok(Tensor::from_vec(rng.normal_vec(d)))
}

#[inline]
fn clamp_prob(p: f64) -> f64 {
    p.clamp(LOG_CLAMP, 1.0 - LOG_CLAMP)
}

/// Cross-entropy against a scalar target: `-(t·ln p + (1-t)·ln(1-p))`.
/// Targets above 1 (soft real labels) are tolerated.
#[inline]
fn bce(p: f64, target: f64) -> f64 {
    let p = clamp_prob(p);
    -(target * p.ln() + (1.0 - target) * (1.0 - p).ln())
}

#[inline]
fn bce_grad(p: f64, target: f64) -> f64 {
    let p = clamp_prob(p);
    -target / p + (1.0 - target) / (1.0 - p)
}

/// `D*(x) = p_data(x) / (p_data(x) + p_g(x))`, the pointwise optimum of the
/// discriminator objective for a fixed generator. Used as a test oracle.
pub fn optimal_discriminator(p_data: f64, p_g: f64) -> Result<f64> {
    if !(p_data.is_finite() && p_g.is_finite()) || p_data < 0.0 || p_g < 0.0 {
        return Err(Error::invalid("densities must be finite and nonnegative"));
    }
    if p_data == 0.0 && p_g == 0.0 {
        return Err(Error::invalid("densities cannot both be zero"));
    }
    // halve first when the sum would overflow; halving is exact
    if p_data + p_g == f64::INFINITY {
        return Ok((p_data / 2.0) / (p_data / 2.0 + p_g / 2.0));
    }
    Ok(p_data / (p_data + p_g))
}

/// Generator loss flavor: `Saturating` descends `mean log(1 - D(G(z)))`,
/// `NonSaturating` descends `-mean log D(G(z))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenLossMode {
    Saturating,
    NonSaturating,
}

// ---------------------------------------------------------------------------
// Training steps

/// One discriminator update on `real` plus an equal-sized generated batch.
///
/// Draw order from `rng`: the latent batch, then per-sample real targets,
/// then per-sample fake targets. Returns the pre-update loss
/// `mean[bce(D(x), ℓ_r) + bce(D(G(z)), ℓ_f)]`; with hard labels this is the
/// negated two-term discriminator objective.
pub fn discriminator_step(
    d_net: &mut Network,
    g_net: &Network,
    real: &Tensor,
    rng: &mut Rng,
    labels: &LabelScheme,
    adam: &mut NetAdam,
    hyper: &AdamParams,
) -> Result<f64> {
    labels.validate()?;
    let (m, dim) = real.batch_rows()?;
    if real.is_empty() {
        return Err(Error::invalid("empty batch"));
    }
    if dim != d_net.input_dim() {
        return Err(Error::dim("discriminator input", d_net.input_dim(), dim));
    }
    let latent = g_net.input_dim();
    let z = Tensor::new(vec![m, latent], rng.normal_vec(m * latent))?;
    let real_targets: Vec<f64> = (0..m).map(|_| labels.draw_real(rng)).collect();
    let fake_targets: Vec<f64> = (0..m).map(|_| labels.draw_fake(rng)).collect();

    let fake = g_net.forward(&z)?;
    let (p_real, trace_real) = d_net.forward_trace(real)?;
    let (p_fake, trace_fake) = d_net.forward_trace(&fake)?;

    let inv_m = 1.0 / m as f64;
    let mut loss = 0.0;
    for i in 0..m {
        loss += bce(p_real.data()[i], real_targets[i]);
        loss += bce(p_fake.data()[i], fake_targets[i]);
    }
    loss *= inv_m;
    if !loss.is_finite() {
        return Err(Error::NonFinite {
            what: "discriminator loss".into(),
            step: None,
        });
    }

    let up_real = Tensor::new(
        vec![m, 1],
        (0..m)
            .map(|i| inv_m * bce_grad(p_real.data()[i], real_targets[i]))
            .collect(),
    )?;
    let up_fake = Tensor::new(
        vec![m, 1],
        (0..m)
            .map(|i| inv_m * bce_grad(p_fake.data()[i], fake_targets[i]))
            .collect(),
    )?;
    let (_, grads_real) = d_net.backward_full(&trace_real, &up_real)?;
    let (_, mut grads) = d_net.backward_full(&trace_fake, &up_fake)?;
    for (g, gr) in grads.iter_mut().zip(&grads_real) {
        for (a, b) in g.weight.iter_mut().zip(&gr.weight) {
            *a += b;
        }
        for (a, b) in g.bias.iter_mut().zip(&gr.bias) {
            *a += b;
        }
    }
    adam.update(d_net, &grads, hyper)?;
    Ok(loss)
}

/// One generator update against a frozen discriminator. Draws `batch_size`
/// latents; the discriminator's parameters are read but never written.
/// Returns the pre-update generator loss.
pub fn generator_step(
    g_net: &mut Network,
    d_net: &Network,
    batch_size: usize,
    rng: &mut Rng,
    mode: GenLossMode,
    adam: &mut NetAdam,
    hyper: &AdamParams,
) -> Result<f64> {
    if batch_size == 0 {
        return Err(Error::invalid("empty batch"));
    }
    let m = batch_size;
    let latent = g_net.input_dim();
    let z = Tensor::new(vec![m, latent], rng.normal_vec(m * latent))?;
    let (fake, g_trace) = g_net.forward_trace(&z)?;
    let (p, d_trace) = d_net.forward_trace(&fake)?;

    let inv_m = 1.0 / m as f64;
    let mut loss = 0.0;
    let mut upstream = vec![0.0; m];
    for (up, &raw) in upstream.iter_mut().zip(p.data()) {
        let pi = clamp_prob(raw);
        match mode {
            GenLossMode::Saturating => {
                loss += (1.0 - pi).ln();
                *up = inv_m * (-1.0 / (1.0 - pi));
            }
            GenLossMode::NonSaturating => {
                loss += -pi.ln();
                *up = inv_m * (-1.0 / pi);
            }
        }
    }
    loss *= inv_m;
    if !loss.is_finite() {
        return Err(Error::NonFinite {
            what: "generator loss".into(),
            step: None,
        });
    }

    let up = Tensor::new(vec![m, 1], upstream)?;
    let d_fake_grad = d_net.backward_input(&d_trace, &up)?;
    let (_, g_grads) = g_net.backward_full(&g_trace, &d_fake_grad)?;
    adam.update(g_net, &g_grads, hyper)?;
    Ok(loss)
}

// ---------------------------------------------------------------------------
// Full training loop

fn default_lr() -> f64 {
    2e-4
}
fn default_batch() -> usize {
    64
}
fn default_d_steps() -> u64 {
    1
}
fn default_gen_loss() -> GenLossMode {
    GenLossMode::Saturating
}
fn default_labels() -> LabelScheme {
    LabelScheme::Hard
}
fn default_dataset() -> SyntheticDataset {
    SyntheticDataset::default_ring()
}

/// Everything needed to reproduce a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub seed: u64,
    pub latent_dim: usize,
    /// Full width chain including the latent input and data output.
    pub generator_dims: Vec<usize>,
    /// Full width chain from data dim down to the scalar head.
    pub discriminator_dims: Vec<usize>,
    #[serde(default = "default_lr")]
    pub lr: f64,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    pub steps: u64,
    /// Discriminator updates per generator update.
    #[serde(default = "default_d_steps")]
    pub d_steps_per_g: u64,
    #[serde(default = "default_labels")]
    pub label_scheme: LabelScheme,
    #[serde(default = "default_gen_loss")]
    pub generator_loss: GenLossMode,
    #[serde(default = "default_dataset")]
    pub dataset: SyntheticDataset,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.latent_dim == 0 {
            return Err(Error::invalid("latent_dim must be at least 1"));
        }
        if self.generator_dims.first() != Some(&self.latent_dim) {
            return Err(Error::invalid(
                "generator_dims must start at latent_dim",
            ));
        }
        let data_dim = self.dataset.dim();
        if self.generator_dims.last() != Some(&data_dim) {
            return Err(Error::invalid(format!(
                "generator output dim must match dataset dim {data_dim}"
            )));
        }
        if self.discriminator_dims.first() != Some(&data_dim) {
            return Err(Error::invalid(format!(
                "discriminator input dim must match dataset dim {data_dim}"
            )));
        }
        NetSpec::generator(self.generator_dims.clone()).validate()?;
        NetSpec::discriminator(self.discriminator_dims.clone()).validate()?;
        if !(self.lr.is_finite() && self.lr >= 0.0) {
            return Err(Error::invalid("lr must be nonnegative"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size must be at least 1"));
        }
        if self.d_steps_per_g == 0 {
            return Err(Error::invalid("d_steps_per_g must be at least 1"));
        }
        self.label_scheme.validate()?;
        self.dataset.validate()?;
        Ok(())
    }
}

/// Per-step losses: (step index, discriminator loss, generator loss).
pub type LossHistory = Vec<(u64, f64, f64)>;

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub generator: Checkpoint,
    pub discriminator: Checkpoint,
    pub history: LossHistory,
}

/// Runs the alternating training loop: `d_steps_per_g` discriminator
/// updates then one generator update per step, all drawing from a single
/// stream seeded by `config.seed`. Bit-reproducible for a fixed seed.
pub fn train(config: &TrainConfig) -> Result<TrainOutput> {
    train_with_progress(config, |_, _, _| {})
}

pub fn train_with_progress(
    config: &TrainConfig,
    mut on_step: impl FnMut(u64, f64, f64),
) -> Result<TrainOutput> {
    config.validate()?;
    let mut rng = Rng::from_seed(config.seed);
    let mut g_net = init_net(&NetSpec::generator(config.generator_dims.clone()), &mut rng)?;
    let mut d_net = init_net(
        &NetSpec::discriminator(config.discriminator_dims.clone()),
        &mut rng,
    )?;
    let mut g_adam = NetAdam::new(&g_net);
    let mut d_adam = NetAdam::new(&d_net);
    let hyper = AdamParams::with_lr(config.lr);

    let attach_step = |e: Error, step: u64| match e {
        Error::NonFinite { what, .. } => Error::NonFinite {
            what,
            step: Some(step),
        },
        other => other,
    };

    let mut history = Vec::with_capacity(config.steps as usize);
    for step in 1..=config.steps {
        let mut d_loss = 0.0;
        for _ in 0..config.d_steps_per_g {
            let real = config.dataset.sample_batch(&mut rng, config.batch_size)?;
            d_loss = discriminator_step(
                &mut d_net,
                &g_net,
                &real,
                &mut rng,
                &config.label_scheme,
                &mut d_adam,
                &hyper,
            )
            .map_err(|e| attach_step(e, step))?;
        }
        let g_loss = generator_step(
            &mut g_net,
            &d_net,
            config.batch_size,
            &mut rng,
            config.generator_loss,
            &mut g_adam,
            &hyper,
        )
        .map_err(|e| attach_step(e, step))?;
        history.push((step, d_loss, g_loss));
        on_step(step, d_loss, g_loss);
    }

    Ok(TrainOutput {
        generator: Checkpoint {
            kind: NetKind::Generator,
            net: g_net,
            seed: config.seed,
            step: config.steps,
        },
        discriminator: Checkpoint {
            kind: NetKind::Discriminator,
            net: d_net,
            seed: config.seed,
            step: config.steps,
        },
        history,
    })
}

/// Loss history as CSV text with header `step,d_loss,g_loss`.
pub fn history_csv(history: &[(u64, f64, f64)]) -> String {
    let mut out = String::from("step,d_loss,g_loss\n");
    for (step, d, g) in history {
        out.push_str(&format!("{step},{d},{g}\n"));
    }
    out
}
