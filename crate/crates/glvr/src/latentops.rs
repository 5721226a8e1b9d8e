//! Latent-space utilities: coordinate unit-vector probes, spherical linear
//! interpolation, and great-circle traversals.

use serde::Serialize;

use crate::diffcore::Network;
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::tensor::Tensor;

/// The basis vector `e_i` (1-based index) in dimension `d`.
pub fn unit_vector(i: usize, d: usize) -> Result<Tensor> {
    if i == 0 || i > d {
        return Err(Error::invalid(format!(
            "unit vector index {i} out of range 1..={d}"
        )));
    }
    let mut data = vec![0.0; d];
    data[i - 1] = 1.0;
    Ok(Tensor::from_vec(data))
}

/// Generator probes at a pair of basis vectors and at their sum.
#[derive(Debug, Clone)]
pub struct EmbedImages {
    /// `G(e_i)`
    pub first: Tensor,
    /// `G(e_j)`
    pub second: Tensor,
    /// `G(e_i + e_j)`
    pub combined: Tensor,
}

/// Evaluates `G(e_i)`, `G(e_j)`, and `G(e_i + e_j)` for side-by-side
/// inspection of how basis directions compose.
pub fn embed_compose(generator: &Network, i: usize, j: usize) -> Result<EmbedImages> {
    let d = generator.input_dim();
    let ei = unit_vector(i, d)?;
    let ej = unit_vector(j, d)?;
    let sum = Tensor::from_vec(
        ei.data()
            .iter()
            .zip(ej.data())
            .map(|(a, b)| a + b)
            .collect(),
    );
    Ok(EmbedImages {
        first: generator.forward(&ei)?,
        second: generator.forward(&ej)?,
        combined: generator.forward(&sum)?,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Spherical linear interpolation between `z1` and `z2` at fraction `mu`:
/// `sin((1-μ)θ)/sin(θ) · z1 + sin(μθ)/sin(θ) · z2` with `θ` the angle
/// between the vectors. Falls back to linear interpolation when the
/// vectors are (numerically) parallel; antipodal pairs are an error since
/// the path is undefined.
pub fn slerp(z1: &Tensor, z2: &Tensor, mu: f64) -> Result<Tensor> {
    if z1.shape() != z2.shape() {
        return Err(Error::dim(
            "slerp",
            format!("{:?}", z1.shape()),
            format!("{:?}", z2.shape()),
        ));
    }
    let (a, b) = (z1.data(), z2.data());
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::invalid("slerp endpoints must be nonzero"));
    }
    let cos_theta = (dot(a, b) / (na * nb)).clamp(-1.0, 1.0);
    let theta = cos_theta.acos();
    let sin_theta = theta.sin();
    if sin_theta < 1e-9 {
        if cos_theta < 0.0 {
            return Err(Error::invalid(
                "slerp endpoints are antipodal; the path is undefined",
            ));
        }
        // collinear: plain linear interpolation
        let data = a.iter().zip(b).map(|(x, y)| (1.0 - mu) * x + mu * y).collect();
        return Ok(Tensor::from_vec(data));
    }
    let w1 = ((1.0 - mu) * theta).sin() / sin_theta;
    let w2 = (mu * theta).sin() / sin_theta;
    let data = a.iter().zip(b).map(|(x, y)| w1 * x + w2 * y).collect();
    Ok(Tensor::from_vec(data))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMode {
    Slerp,
    GreatCircle,
}

/// An ordered list of latent points to feed through a generator.
#[derive(Debug, Clone)]
pub struct InterpolationPath {
    pub mode: PathMode,
    pub steps: usize,
    /// Seed used to draw the orthogonal direction, when one was drawn.
    pub seed: Option<u64>,
    pub points: Vec<Tensor>,
}

impl InterpolationPath {
    pub fn norms(&self) -> Vec<f64> {
        self.points.iter().map(|p| norm(p.data())).collect()
    }
}

/// SLERP path from `z1` to `z2` over `steps` points, endpoints included.
pub fn slerp_path(z1: &Tensor, z2: &Tensor, steps: usize) -> Result<InterpolationPath> {
    if steps < 2 {
        return Err(Error::invalid("interpolation needs at least 2 steps"));
    }
    let points = (0..steps)
        .map(|k| slerp(z1, z2, k as f64 / (steps - 1) as f64))
        .collect::<Result<Vec<_>>>()?;
    Ok(InterpolationPath {
        mode: PathMode::Slerp,
        steps,
        seed: None,
        points,
    })
}

/// Closed great circle through `z`: `steps` points
/// `p_k = cos(2πk/steps)·z + sin(2πk/steps)·‖z‖·w` for an orthonormal
/// direction `w`, so `p_0 = z` and the path wraps back to it.
pub fn great_circle_with_dir(z: &Tensor, w: &Tensor, steps: usize) -> Result<InterpolationPath> {
    if steps < 2 {
        return Err(Error::invalid("great circle needs at least 2 steps"));
    }
    if z.shape() != w.shape() {
        return Err(Error::dim(
            "great_circle direction",
            format!("{:?}", z.shape()),
            format!("{:?}", w.shape()),
        ));
    }
    let nz = norm(z.data());
    if nz == 0.0 {
        return Err(Error::invalid("great circle center must be nonzero"));
    }
    let points = (0..steps)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / steps as f64;
            let (c, s) = (angle.cos(), angle.sin());
            Tensor::from_vec(
                z.data()
                    .iter()
                    .zip(w.data())
                    .map(|(zi, wi)| c * zi + s * nz * wi)
                    .collect(),
            )
        })
        .collect();
    Ok(InterpolationPath {
        mode: PathMode::GreatCircle,
        steps,
        seed: None,
        points,
    })
}

/// Great circle with the orthogonal direction drawn from `seed`: a random
/// vector is Gram-Schmidt-orthogonalized against `z` and normalized. The
/// seed is recorded in the path so figures can be regenerated.
pub fn great_circle(z: &Tensor, steps: usize, seed: u64) -> Result<InterpolationPath> {
    let nz = norm(z.data());
    if nz == 0.0 {
        return Err(Error::invalid("great circle center must be nonzero"));
    }
    let mut rng = Rng::from_seed(seed);
    // Redraw in the (measure-zero) event the draw is parallel to z.
    let w = loop {
        let raw = rng.normal_vec(z.len());
        let proj = dot(&raw, z.data()) / (nz * nz);
        let ortho: Vec<f64> = raw
            .iter()
            .zip(z.data())
            .map(|(r, zi)| r - proj * zi)
            .collect();
        let n = norm(&ortho);
        if n > 1e-12 {
            break Tensor::from_vec(ortho.iter().map(|v| v / n).collect());
        }
    };
    let mut path = great_circle_with_dir(z, &w, steps)?;
    path.seed = Some(seed);
    Ok(path)
}
