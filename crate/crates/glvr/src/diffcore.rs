//! Forward and backward passes for small dense feedforward networks.
//!
//! Gradients are computed by explicit per-layer backward passes rather than
//! a taped graph; the networks here are small and fixed-topology. Everything
//! is 64-bit and CPU-deterministic: identical inputs give bit-identical
//! outputs.
//!
//! Batches are row-major `[batch, dim]` matrices; a rank-1 tensor is the
//! batch-1 case.

use crate::error::{Error, Result};
use crate::tensor::{l2_sq, Tensor};

/// Element-wise activation applied after the affine transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    Identity,
    Relu,
    /// Leaky ReLU with the given negative-side slope, `slope` in `(0, 1)`.
    LeakyRelu(f64),
    Tanh,
    Sigmoid,
}

impl Activation {
    pub fn validate(&self) -> Result<()> {
        if let Activation::LeakyRelu(slope) = self {
            if !(slope.is_finite() && *slope > 0.0 && *slope < 1.0) {
                return Err(Error::invalid(format!(
                    "leaky_relu slope must be in (0,1), got {slope}"
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu(slope) => {
                if x > 0.0 {
                    x
                } else {
                    slope * x
                }
            }
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        }
    }

    /// Derivative given the pre-activation and the activation output.
    #[inline]
    fn derivative(&self, pre: f64, out: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if pre > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu(slope) => {
                if pre > 0.0 {
                    1.0
                } else {
                    *slope
                }
            }
            Activation::Tanh => 1.0 - out * out,
            Activation::Sigmoid => out * (1.0 - out),
        }
    }
}

/// Dense layer: `y = activation(W·x + b)` with `W` row-major `[out × in]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    in_dim: usize,
    out_dim: usize,
    weight: Vec<f64>,
    bias: Vec<f64>,
    activation: Activation,
}

impl DenseLayer {
    pub fn new(
        in_dim: usize,
        out_dim: usize,
        weight: Vec<f64>,
        bias: Vec<f64>,
        activation: Activation,
    ) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::invalid("layer dims must be nonzero"));
        }
        if weight.len() != in_dim * out_dim {
            return Err(Error::dim(
                "layer weight",
                in_dim * out_dim,
                weight.len(),
            ));
        }
        if bias.len() != out_dim {
            return Err(Error::dim("layer bias", out_dim, bias.len()));
        }
        activation.validate()?;
        Ok(DenseLayer {
            in_dim,
            out_dim,
            weight,
            bias,
            activation,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    /// Mutable view of the weights, for parameter updates. Callers own the
    /// network exclusively while writing (see the crate's threading notes).
    pub fn weight_mut(&mut self) -> &mut [f64] {
        &mut self.weight
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    /// Applies the layer to a rank-1 input or a `[batch, in_dim]` matrix.
    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        let (rows, dim) = x.batch_rows()?;
        if dim != self.in_dim {
            return Err(Error::dim("dense_forward input", self.in_dim, dim));
        }
        let (_, out) = self.affine_rows(x.data(), rows);
        let shape = if x.rank() == 1 {
            vec![self.out_dim]
        } else {
            vec![rows, self.out_dim]
        };
        let result = Tensor::new(shape, out)?;
        if !result.is_finite() {
            return Err(Error::NonFinite {
                what: "dense_forward output".into(),
                step: None,
            });
        }
        Ok(result)
    }

    /// Affine transform + activation over `rows` row-major input rows.
    /// Returns (pre-activations, outputs), both `rows × out_dim`.
    fn affine_rows(&self, input: &[f64], rows: usize) -> (Vec<f64>, Vec<f64>) {
        let mut pre = vec![0.0; rows * self.out_dim];
        for r in 0..rows {
            let x = &input[r * self.in_dim..(r + 1) * self.in_dim];
            let dst = &mut pre[r * self.out_dim..(r + 1) * self.out_dim];
            for (o, slot) in dst.iter_mut().enumerate() {
                let w = &self.weight[o * self.in_dim..(o + 1) * self.in_dim];
                let mut acc = self.bias[o];
                for (wi, xi) in w.iter().zip(x) {
                    acc = wi.mul_add(*xi, acc);
                }
                *slot = acc;
            }
        }
        let out = pre.iter().map(|&p| self.activation.apply(p)).collect();
        (pre, out)
    }
}

/// Per-layer parameter gradients, laid out like the layer itself.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrads {
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

/// Cached intermediate values from a forward pass, consumed by backward.
#[derive(Debug)]
pub struct Trace {
    rows: usize,
    input_rank: usize,
    /// Input to each layer, `rows × in_dim` flat.
    layer_inputs: Vec<Vec<f64>>,
    /// Pre-activation of each layer, `rows × out_dim` flat.
    pre_acts: Vec<Vec<f64>>,
    /// Final activated output, `rows × out_dim` flat.
    output: Vec<f64>,
}

/// A stack of dense layers with chained dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<DenseLayer>,
}

impl Network {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("network needs at least one layer"));
        }
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(Error::ChainBreak {
                    layer: i + 1,
                    expected: pair[0].out_dim,
                    actual: pair[1].in_dim,
                });
            }
        }
        Ok(Network { layers })
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().out_dim
    }

    /// Deterministic composition of all layers.
    pub fn forward(&self, z: &Tensor) -> Result<Tensor> {
        let (_, out) = self.run_forward(z, false)?;
        Ok(out)
    }

    /// Forward pass that keeps per-layer intermediates for backprop.
    pub fn forward_trace(&self, z: &Tensor) -> Result<(Tensor, Trace)> {
        let (trace, out) = self.run_forward(z, true)?;
        Ok((out, trace.expect("trace requested")))
    }

    fn run_forward(&self, z: &Tensor, keep: bool) -> Result<(Option<Trace>, Tensor)> {
        let (rows, dim) = z.batch_rows()?;
        if dim != self.input_dim() {
            return Err(Error::ChainBreak {
                layer: 0,
                expected: self.input_dim(),
                actual: dim,
            });
        }
        let mut layer_inputs = Vec::new();
        let mut pre_acts = Vec::new();
        let mut current = z.data().to_vec();
        for layer in &self.layers {
            let (pre, out) = layer.affine_rows(&current, rows);
            if keep {
                layer_inputs.push(std::mem::take(&mut current));
                pre_acts.push(pre);
            }
            current = out;
        }
        let shape = if z.rank() == 1 {
            vec![self.output_dim()]
        } else {
            vec![rows, self.output_dim()]
        };
        let out = Tensor::new(shape, current.clone())?;
        if !out.is_finite() {
            return Err(Error::NonFinite {
                what: "net_forward output".into(),
                step: None,
            });
        }
        let trace = keep.then(|| Trace {
            rows,
            input_rank: z.rank(),
            layer_inputs,
            pre_acts,
            output: current,
        });
        Ok((trace, out))
    }

    /// Reverse pass returning the gradient with respect to the network
    /// input. `upstream` is dL/d(output), shaped like the forward output.
    pub fn backward_input(&self, trace: &Trace, upstream: &Tensor) -> Result<Tensor> {
        let (grad, _) = self.backward(trace, upstream, false)?;
        Ok(grad)
    }

    /// Reverse pass returning both the input gradient and per-layer
    /// parameter gradients (summed over the batch).
    pub fn backward_full(&self, trace: &Trace, upstream: &Tensor) -> Result<(Tensor, Vec<LayerGrads>)> {
        let (grad, params) = self.backward(trace, upstream, true)?;
        Ok((grad, params.expect("param grads requested")))
    }

    fn backward(
        &self,
        trace: &Trace,
        upstream: &Tensor,
        want_params: bool,
    ) -> Result<(Tensor, Option<Vec<LayerGrads>>)> {
        let rows = trace.rows;
        let (urows, udim) = upstream.batch_rows()?;
        if urows != rows || udim != self.output_dim() {
            return Err(Error::dim(
                "backward upstream",
                format!("[{rows}, {}]", self.output_dim()),
                format!("[{urows}, {udim}]"),
            ));
        }
        let mut param_grads = want_params.then(|| {
            self.layers
                .iter()
                .map(|l| LayerGrads {
                    weight: vec![0.0; l.weight.len()],
                    bias: vec![0.0; l.bias.len()],
                })
                .collect::<Vec<_>>()
        });

        let mut delta = upstream.data().to_vec();
        for (idx, layer) in self.layers.iter().enumerate().rev() {
            let pre = &trace.pre_acts[idx];
            let out: &[f64] = if idx + 1 == self.layers.len() {
                &trace.output
            } else {
                &trace.layer_inputs[idx + 1]
            };
            // delta <- dL/d(pre) = dL/d(out) ⊙ act'(pre)
            for ((d, &p), &o) in delta.iter_mut().zip(pre).zip(out) {
                *d *= layer.activation.derivative(p, o);
            }
            if let Some(grads) = param_grads.as_mut() {
                let g = &mut grads[idx];
                let input = &trace.layer_inputs[idx];
                for r in 0..rows {
                    let drow = &delta[r * layer.out_dim..(r + 1) * layer.out_dim];
                    let xrow = &input[r * layer.in_dim..(r + 1) * layer.in_dim];
                    for (o, &d) in drow.iter().enumerate() {
                        g.bias[o] += d;
                        let wrow = &mut g.weight[o * layer.in_dim..(o + 1) * layer.in_dim];
                        for (w, &x) in wrow.iter_mut().zip(xrow) {
                            *w += d * x;
                        }
                    }
                }
            }
            // propagate: dL/d(input) = Wᵀ · delta, per row
            let mut prev = vec![0.0; rows * layer.in_dim];
            for r in 0..rows {
                let drow = &delta[r * layer.out_dim..(r + 1) * layer.out_dim];
                let dst = &mut prev[r * layer.in_dim..(r + 1) * layer.in_dim];
                for (o, &d) in drow.iter().enumerate() {
                    let wrow = &layer.weight[o * layer.in_dim..(o + 1) * layer.in_dim];
                    for (slot, &w) in dst.iter_mut().zip(wrow) {
                        *slot = w.mul_add(d, *slot);
                    }
                }
            }
            delta = prev;
        }
        let shape = if trace.input_rank == 1 {
            vec![self.input_dim()]
        } else {
            vec![rows, self.input_dim()]
        };
        Ok((Tensor::new(shape, delta)?, param_grads))
    }
}

/// Gradient of `||target - G(z)||²` with respect to `z`.
pub fn grad_z_loss(net: &Network, z: &Tensor, target: &Tensor) -> Result<Tensor> {
    let (out, trace) = net.forward_trace(z)?;
    if out.shape() != target.shape() {
        return Err(Error::dim(
            "grad_z_loss target",
            format!("{:?}", out.shape()),
            format!("{:?}", target.shape()),
        ));
    }
    let upstream = l2_upstream(&out, target)?;
    net.backward_input(&trace, &upstream)
}

/// Parameter gradients of `||target - G(z)||²` for every weight and bias.
/// Also returns the loss value from the same forward pass.
pub fn grad_params_l2(net: &Network, z: &Tensor, target: &Tensor) -> Result<(f64, Vec<LayerGrads>)> {
    let (out, trace) = net.forward_trace(z)?;
    if out.shape() != target.shape() {
        return Err(Error::dim(
            "grad_params target",
            format!("{:?}", out.shape()),
            format!("{:?}", target.shape()),
        ));
    }
    let loss = l2_sq(target, &out)?;
    let upstream = l2_upstream(&out, target)?;
    let (_, grads) = net.backward_full(&trace, &upstream)?;
    Ok((loss, grads))
}

/// dL/d(out) for L = ||target - out||²: elementwise `2(out - target)`.
fn l2_upstream(out: &Tensor, target: &Tensor) -> Result<Tensor> {
    let data = out
        .data()
        .iter()
        .zip(target.data())
        .map(|(o, t)| 2.0 * (o - t))
        .collect();
    Tensor::new(out.shape().to_vec(), data)
}
