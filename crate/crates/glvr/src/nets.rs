//! Construction, initialization, and persistence of generator and
//! discriminator networks.
//!
//! Activation conventions follow the usual GAN recipe: generators use ReLU
//! hidden layers with a tanh output, discriminators use LeakyReLU(0.2)
//! hidden layers with a sigmoid output. Weights initialize to N(0, 0.02²),
//! biases to zero.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diffcore::{Activation, DenseLayer, Network};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::storage::{
    atomic_write, push_f64_slice, push_u32, push_u64, Cursor, CHECKPOINT_MAGIC,
};

pub const WEIGHT_INIT_STD: f64 = 0.02;

/// Conventional latent dimension for full-scale configs; tests and the
/// desk-scale benchmarks use 16.
pub const DEFAULT_LATENT_DIM: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetKind {
    Generator,
    Discriminator,
}

/// Architecture description: consecutive layer widths, first entry the
/// input dimension, last the output dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetSpec {
    pub kind: NetKind,
    pub layer_dims: Vec<usize>,
}

impl NetSpec {
    pub fn generator(layer_dims: Vec<usize>) -> Self {
        NetSpec {
            kind: NetKind::Generator,
            layer_dims,
        }
    }

    pub fn discriminator(layer_dims: Vec<usize>) -> Self {
        NetSpec {
            kind: NetKind::Discriminator,
            layer_dims,
        }
    }

    /// Default desk-scale generator: latent -> 64 -> 128 -> 64 with tanh out.
    pub fn default_generator(latent_dim: usize) -> Self {
        NetSpec::generator(vec![latent_dim, 64, 128, 64])
    }

    pub fn validate(&self) -> Result<()> {
        if self.layer_dims.len() < 2 {
            return Err(Error::invalid(
                "net spec needs at least two dims (one layer)",
            ));
        }
        if self.layer_dims.contains(&0) {
            return Err(Error::invalid("net spec dims must be nonzero"));
        }
        if self.kind == NetKind::Discriminator && *self.layer_dims.last().unwrap() != 1 {
            return Err(Error::invalid("discriminator output dim must be 1"));
        }
        Ok(())
    }

    fn hidden_activation(&self) -> Activation {
        match self.kind {
            NetKind::Generator => Activation::Relu,
            NetKind::Discriminator => Activation::LeakyRelu(0.2),
        }
    }

    fn output_activation(&self) -> Activation {
        match self.kind {
            NetKind::Generator => Activation::Tanh,
            NetKind::Discriminator => Activation::Sigmoid,
        }
    }
}

/// A network plus the metadata needed to reproduce and resume it.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub kind: NetKind,
    pub net: Network,
    /// Seed the parameters were initialized from.
    pub seed: u64,
    /// Training steps applied since initialization.
    pub step: u64,
}

/// Builds a network from a spec, drawing weights i.i.d. N(0, 0.02²) from
/// `rng` layer by layer in row-major order. Biases are zero.
pub fn init_net(spec: &NetSpec, rng: &mut Rng) -> Result<Network> {
    spec.validate()?;
    let last = spec.layer_dims.len() - 2;
    let layers = spec
        .layer_dims
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let (in_dim, out_dim) = (w[0], w[1]);
            let weight = (0..in_dim * out_dim)
                .map(|_| rng.normal() * WEIGHT_INIT_STD)
                .collect();
            let activation = if i == last {
                spec.output_activation()
            } else {
                spec.hidden_activation()
            };
            DenseLayer::new(in_dim, out_dim, weight, vec![0.0; out_dim], activation)
        })
        .collect::<Result<Vec<_>>>()?;
    Network::new(layers)
}

fn activation_code(a: Activation) -> Result<u8> {
    match a {
        Activation::Identity => Ok(0),
        Activation::Relu => Ok(1),
        Activation::LeakyRelu(slope) => {
            if (slope - 0.2).abs() < 1e-12 {
                Ok(2)
            } else {
                Err(Error::invalid(format!(
                    "checkpoint format only encodes leaky_relu slope 0.2, got {slope}"
                )))
            }
        }
        Activation::Tanh => Ok(3),
        Activation::Sigmoid => Ok(4),
    }
}

fn activation_from_code(code: u8) -> Result<Activation> {
    match code {
        0 => Ok(Activation::Identity),
        1 => Ok(Activation::Relu),
        2 => Ok(Activation::LeakyRelu(0.2)),
        3 => Ok(Activation::Tanh),
        4 => Ok(Activation::Sigmoid),
        other => Err(Error::invalid(format!("unknown activation code {other}"))),
    }
}

/// Serializes a checkpoint: magic "GLVR", version, kind, layer table,
/// all weights, all biases, then seed and step.
pub fn checkpoint_to_bytes(cp: &Checkpoint) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    buf.extend_from_slice(&CHECKPOINT_MAGIC);
    push_u32(&mut buf, crate::storage::FORMAT_VERSION);
    buf.push(match cp.kind {
        NetKind::Generator => 0,
        NetKind::Discriminator => 1,
    });
    let layers = cp.net.layers();
    push_u32(&mut buf, layers.len() as u32);
    for layer in layers {
        push_u32(&mut buf, layer.in_dim() as u32);
        push_u32(&mut buf, layer.out_dim() as u32);
        buf.push(activation_code(layer.activation())?);
    }
    for layer in layers {
        push_f64_slice(&mut buf, layer.weight());
    }
    for layer in layers {
        push_f64_slice(&mut buf, layer.bias());
    }
    push_u64(&mut buf, cp.seed);
    push_u64(&mut buf, cp.step);
    Ok(buf)
}

pub fn checkpoint_from_bytes(bytes: &[u8]) -> Result<Checkpoint> {
    let mut cur = Cursor::new(bytes);
    cur.read_magic(CHECKPOINT_MAGIC)?;
    cur.read_version()?;
    let kind = match cur.read_u8()? {
        0 => NetKind::Generator,
        1 => NetKind::Discriminator,
        other => return Err(Error::invalid(format!("unknown net kind {other}"))),
    };
    let layer_count = cur.read_u32()? as usize;
    if layer_count == 0 {
        return Err(Error::invalid("checkpoint has zero layers"));
    }
    let mut dims = Vec::with_capacity(layer_count);
    let mut acts = Vec::with_capacity(layer_count);
    for _ in 0..layer_count {
        let in_dim = cur.read_u32()? as usize;
        let out_dim = cur.read_u32()? as usize;
        acts.push(activation_from_code(cur.read_u8()?)?);
        dims.push((in_dim, out_dim));
    }
    let mut weights = Vec::with_capacity(layer_count);
    for &(in_dim, out_dim) in &dims {
        let count = in_dim
            .checked_mul(out_dim)
            .ok_or_else(|| Error::invalid("layer size overflows usize"))?;
        weights.push(cur.read_f64_vec(count)?);
    }
    let mut biases = Vec::with_capacity(layer_count);
    for &(_, out_dim) in &dims {
        biases.push(cur.read_f64_vec(out_dim)?);
    }
    let seed = cur.read_u64()?;
    let step = cur.read_u64()?;
    cur.finish()?;

    let layers = dims
        .iter()
        .zip(weights)
        .zip(biases)
        .zip(acts)
        .map(|(((&(i, o), w), b), a)| DenseLayer::new(i, o, w, b, a))
        .collect::<Result<Vec<_>>>()?;
    let net = Network::new(layers)?;
    for layer in net.layers() {
        if layer.weight().iter().chain(layer.bias()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("checkpoint contains non-finite parameters"));
        }
    }
    Ok(Checkpoint {
        kind,
        net,
        seed,
        step,
    })
}

pub fn save_checkpoint(cp: &Checkpoint, path: impl AsRef<Path>) -> Result<()> {
    atomic_write(path.as_ref(), &checkpoint_to_bytes(cp)?)
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    checkpoint_from_bytes(&fs::read(path)?)
}
