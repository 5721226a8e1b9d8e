//! Rank/shape tensors over `f64`, the universal value carrier.

use crate::error::{Error, Result};

/// Row-major tensor of 64-bit floats.
///
/// Invariant: `shape.iter().product() == data.len()`. Public operations
/// that succeed never leave NaN or infinity in `data`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let expected = shape
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::invalid("tensor shape overflows usize"))?;
        if expected != data.len() {
            return Err(Error::dim(
                "tensor construction",
                format!("{expected} elements for shape {shape:?}"),
                data.len(),
            ));
        }
        Ok(Tensor { shape, data })
    }

    /// Rank-1 tensor from a flat vector.
    pub fn from_vec(data: Vec<f64>) -> Self {
        Tensor {
            shape: vec![data.len()],
            data,
        }
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        Tensor {
            shape,
            data: vec![0.0; len],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Reinterprets the tensor with a new shape of equal element count.
    pub fn reshape(&self, shape: Vec<usize>) -> Result<Self> {
        Tensor::new(shape, self.data.clone())
    }

    /// Number of rows when viewed as a batch: rank-1 tensors are a batch of
    /// one, rank-2 tensors are `[batch, dim]`.
    pub fn batch_rows(&self) -> Result<(usize, usize)> {
        match self.shape.as_slice() {
            [d] => Ok((1, *d)),
            [b, d] => Ok((*b, *d)),
            other => Err(Error::dim(
                "batch view",
                "rank 1 or 2",
                format!("rank {} (shape {other:?})", other.len()),
            )),
        }
    }
}

/// Sum of squared differences, `Σ_j (x_j - y_j)²`.
///
/// This is the squared L2 norm of the difference, not a mean.
pub fn l2_sq(x: &Tensor, y: &Tensor) -> Result<f64> {
    if x.shape() != y.shape() {
        return Err(Error::dim(
            "l2_sq",
            format!("{:?}", x.shape()),
            format!("{:?}", y.shape()),
        ));
    }
    Ok(x.data()
        .iter()
        .zip(y.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum())
}
