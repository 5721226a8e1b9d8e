//! Dense-network GAN training, gradient-based latent recovery with
//! probabilistic resampling, and a paired-trial evaluation harness.
//!
//! The crate is organized around the experiment workflow:
//!
//! - [`diffcore`]: forward/backward passes for small dense networks.
//! - [`nets`]: generator/discriminator construction and checkpoints.
//! - [`gantrain`]: adversarial training with Adam and synthetic datasets.
//! - [`recovery`]: latent inversion with pluggable resampling criteria.
//! - [`latentops`]: unit-vector probes, SLERP, and great circles.
//! - [`harness`]: paired trials across criteria and summary metrics.
//! - [`storage`]: tensor/image file formats and atomic writes.
//!
//! Everything is 64-bit CPU arithmetic and bit-reproducible from seeds;
//! the `parallel` feature (on by default) lets the harness fan paired
//! trials out over a thread pool without changing any output byte.

pub mod diffcore;
pub mod error;
pub mod gantrain;
pub mod harness;
pub mod latentops;
pub mod nets;
pub mod recovery;
pub mod rng;
pub mod storage;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::Tensor;
