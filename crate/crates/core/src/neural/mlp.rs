use nalgebra::{DMatrix, DMatrixView, DMatrixViewMut};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Fully connected network: affine + tanh on every hidden layer, affine
/// output. Parameters live in one flat vector, layer by layer, each as the
/// column-major weight matrix followed by the bias.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp<T: Real> {
    widths: Vec<usize>,
    params: Vec<T>,
    seed: u64,
}

/// Activations kept by a forward pass for the backward pass.
pub struct Tape<T: Real> {
    /// `activations[0]` is the input, the last entry the output.
    activations: Vec<DMatrix<T>>,
}

impl<T: Real> Tape<T> {
    pub fn output(&self) -> &DMatrix<T> {
        self.activations.last().expect("at least the input")
    }
}

fn offsets(widths: &[usize]) -> Vec<usize> {
    let mut off = vec![0];
    for w in widths.windows(2) {
        let last = *off.last().expect("nonempty");
        off.push(last + w[0] * w[1] + w[1]);
    }
    off
}

impl<T: Real> Mlp<T> {
    /// Glorot-uniform weights, zero biases.
    pub fn new(widths: &[usize], seed: u64) -> Result<Self> {
        if widths.len() < 2 || widths.contains(&0) {
            return Err(Error::InvalidParameter(format!("bad layer widths {widths:?}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let off = offsets(widths);
        let mut params = vec![T::zero(); *off.last().expect("nonempty")];
        for (l, w) in widths.windows(2).enumerate() {
            let limit = (6.0 / (w[0] + w[1]) as f64).sqrt();
            for p in &mut params[off[l]..off[l] + w[0] * w[1]] {
                *p = T::lit(rng.random_range(-limit..limit));
            }
        }
        Ok(Self {
            widths: widths.to_vec(),
            params,
            seed,
        })
    }

    /// Rebuilds a network from stored parameters.
    pub fn from_parameters(widths: &[usize], params: Vec<T>, seed: u64) -> Result<Self> {
        let mut net = Self::new(widths, seed)?;
        if params.len() != net.params.len() {
            return Err(Error::Dimension(format!(
                "{} parameters for widths {widths:?}, expected {}",
                params.len(),
                net.params.len()
            )));
        }
        net.params = params;
        Ok(net)
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.widths.last().expect("at least two layers")
    }

    pub fn parameters(&self) -> &[T] {
        &self.params
    }

    pub fn parameters_mut(&mut self) -> &mut [T] {
        &mut self.params
    }

    pub fn parameter_count(&self) -> usize {
        self.params.len()
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }

    fn layer(&self, l: usize) -> (DMatrixView<'_, T>, DMatrixView<'_, T>) {
        let (i, o) = (self.widths[l], self.widths[l + 1]);
        let start = offsets(&self.widths)[l];
        let w = DMatrixView::from_slice(&self.params[start..start + i * o], o, i);
        let b = DMatrixView::from_slice(&self.params[start + i * o..start + i * o + o], o, 1);
        (w, b)
    }

    /// Forward pass on a batch stored column-wise.
    pub fn forward(&self, input: &DMatrix<T>) -> Result<DMatrix<T>> {
        Ok(self.forward_tape(input)?.activations.pop().expect("output"))
    }

    pub fn forward_tape(&self, input: &DMatrix<T>) -> Result<Tape<T>> {
        if input.nrows() != self.input_dim() {
            return Err(Error::Dimension(format!(
                "network expects {} inputs, got {}",
                self.input_dim(),
                input.nrows()
            )));
        }
        let layers = self.widths.len() - 1;
        let mut activations = Vec::with_capacity(layers + 1);
        activations.push(input.clone());
        for l in 0..layers {
            let (w, b) = self.layer(l);
            let mut z = w * activations.last().expect("input pushed");
            for mut col in z.column_iter_mut() {
                col += b.column(0);
            }
            if l + 1 < layers {
                z.apply(|v| *v = v.tanh());
            }
            activations.push(z);
        }
        Ok(Tape { activations })
    }

    /// Backpropagates `d_output` (the loss gradient at the output of the
    /// taped pass). Returns the parameter gradient, laid out like the
    /// parameters, and the gradient with respect to the input.
    pub fn backward(&self, tape: &Tape<T>, d_output: &DMatrix<T>) -> (Vec<T>, DMatrix<T>) {
        let layers = self.widths.len() - 1;
        let off = offsets(&self.widths);
        let mut grad = vec![T::zero(); self.params.len()];
        let mut delta = d_output.clone();
        for l in (0..layers).rev() {
            let (i, o) = (self.widths[l], self.widths[l + 1]);
            if l + 1 < layers {
                let a = &tape.activations[l + 1];
                delta.zip_apply(a, |d, a| *d *= T::one() - a * a);
            }
            let prev = &tape.activations[l];
            let (dw_slice, rest) = grad[off[l]..off[l + 1]].split_at_mut(i * o);
            let mut dw = DMatrixViewMut::from_slice(dw_slice, o, i);
            dw.gemm(T::one(), &delta, &prev.transpose(), T::zero());
            for (r, db) in rest.iter_mut().enumerate() {
                *db = delta.row(r).sum();
            }
            let (w, _) = self.layer(l);
            delta = w.transpose() * &delta;
        }
        (grad, delta)
    }
}
