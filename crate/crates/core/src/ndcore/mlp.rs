use rand::Rng;
use rand_distr::{Distribution, Uniform};

use super::{Activation, AdamState, Matrix};
use crate::error::{check_len, Error, Result};
use crate::scalar::all_finite;
use crate::Scalar;

/// Dense layer `y = act(W x + b)` with `W` stored as `out × in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer<T> {
    pub weights: Matrix<T>,
    pub bias: Vec<T>,
    pub activation: Activation,
}

impl<T: Scalar> Layer<T> {
    pub fn new(weights: Matrix<T>, bias: Vec<T>, activation: Activation) -> Result<Self> {
        check_len("layer bias", weights.rows(), bias.len())?;
        if !all_finite(&bias) {
            return Err(Error::non_finite("layer bias"));
        }
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    pub fn zeros(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        Self {
            weights: Matrix::zeros(out_dim, in_dim),
            bias: vec![T::zero(); out_dim],
            activation,
        }
    }

    /// Glorot-uniform weights on `±√(6/(fan_in+fan_out))`, zero bias.
    pub fn glorot<R: Rng + ?Sized>(
        in_dim: usize,
        out_dim: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Self {
        let limit = (6.0 / (in_dim + out_dim) as f64).sqrt();
        let dist = Uniform::new_inclusive(-limit, limit).expect("finite positive limit");
        let mut layer = Self::zeros(in_dim, out_dim, activation);
        for w in layer.weights.as_mut_slice() {
            *w = T::of(dist.sample(rng));
        }
        layer
    }

    #[inline]
    pub fn in_dim(&self) -> usize {
        self.weights.cols()
    }

    #[inline]
    pub fn out_dim(&self) -> usize {
        self.weights.rows()
    }
}

/// Feed-forward network: an ordered chain of dense layers whose last layer is
/// linear.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp<T> {
    layers: Vec<Layer<T>>,
}

/// Per-layer inputs and pre-activations recorded by [`Mlp::forward`].
#[derive(Debug, Clone)]
pub struct Tape<T> {
    dims: Vec<(usize, usize)>,
    /// `inputs[k]` is the input to layer `k`.
    inputs: Vec<Vec<T>>,
    pre: Vec<Vec<T>>,
}

impl<T> Tape<T> {
    pub fn input(&self) -> &[T] {
        &self.inputs[0]
    }
}

/// Gradients shaped like an [`Mlp`]'s parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGrads<T> {
    pub weights: Vec<Matrix<T>>,
    pub bias: Vec<Vec<T>>,
}

impl<T: Scalar> Mlp<T> {
    pub fn new(layers: Vec<Layer<T>>) -> Result<Self> {
        let Some(last) = layers.last() else {
            return Err(Error::InvalidConfig("an MLP needs at least one layer".into()));
        };
        if last.activation != Activation::Identity {
            return Err(Error::InvalidConfig(
                "the final MLP layer must be linear".into(),
            ));
        }
        for pair in layers.windows(2) {
            check_len("MLP layer chaining", pair[0].out_dim(), pair[1].in_dim())?;
        }
        for l in &layers {
            if l.in_dim() == 0 || l.out_dim() == 0 {
                return Err(Error::InvalidConfig("zero-width layer".into()));
            }
            if !l.weights.all_finite() {
                return Err(Error::non_finite("layer weights"));
            }
        }
        Ok(Self { layers })
    }

    /// `widths = [in, h1, ..., out]`; hidden layers use `hidden`, the last is linear.
    pub fn glorot<R: Rng + ?Sized>(
        widths: &[usize],
        hidden: Activation,
        rng: &mut R,
    ) -> Result<Self> {
        Self::build(widths, hidden, |i, o, a| Layer::glorot(i, o, a, rng))
    }

    pub fn zeros(widths: &[usize], hidden: Activation) -> Result<Self> {
        Self::build(widths, hidden, Layer::zeros)
    }

    fn build(
        widths: &[usize],
        hidden: Activation,
        mut make: impl FnMut(usize, usize, Activation) -> Layer<T>,
    ) -> Result<Self> {
        if widths.len() < 2 {
            return Err(Error::InvalidConfig(
                "an MLP needs at least input and output widths".into(),
            ));
        }
        let n = widths.len() - 1;
        let layers = widths
            .windows(2)
            .enumerate()
            .map(|(k, w)| {
                let act = if k + 1 == n { Activation::Identity } else { hidden };
                make(w[0], w[1], act)
            })
            .collect();
        Self::new(layers)
    }

    pub fn layers(&self) -> &[Layer<T>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer<T>] {
        &mut self.layers
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim()
    }

    /// `[in, h1, ..., out]`.
    pub fn widths(&self) -> Vec<usize> {
        std::iter::once(self.in_dim())
            .chain(self.layers.iter().map(Layer::out_dim))
            .collect()
    }

    pub fn num_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.as_slice().len() + l.bias.len())
            .sum()
    }

    /// Output without recording a tape.
    pub fn predict(&self, input: &[T]) -> Result<Vec<T>> {
        check_len("MLP input", self.in_dim(), input.len())?;
        let mut x = input.to_vec();
        for layer in &self.layers {
            let mut z = layer.weights.matvec(&x)?;
            for (zi, &bi) in z.iter_mut().zip(&layer.bias) {
                *zi = layer.activation.apply(*zi + bi);
            }
            x = z;
        }
        if !all_finite(&x) {
            return Err(Error::non_finite("MLP output"));
        }
        Ok(x)
    }

    pub fn forward(&self, input: &[T]) -> Result<(Vec<T>, Tape<T>)> {
        check_len("MLP input", self.in_dim(), input.len())?;
        let n = self.layers.len();
        let mut inputs = Vec::with_capacity(n);
        let mut pre = Vec::with_capacity(n);
        let mut x = input.to_vec();
        for layer in &self.layers {
            let mut z = layer.weights.matvec(&x)?;
            for (zi, &bi) in z.iter_mut().zip(&layer.bias) {
                *zi = *zi + bi;
            }
            let y = z.iter().map(|&v| layer.activation.apply(v)).collect();
            inputs.push(x);
            pre.push(z);
            x = y;
        }
        if !all_finite(&x) {
            return Err(Error::non_finite("MLP output"));
        }
        let tape = Tape {
            dims: self.layers.iter().map(|l| (l.in_dim(), l.out_dim())).collect(),
            inputs,
            pre,
        };
        Ok((x, tape))
    }

    /// Gradients of `output · output_grad` with respect to every parameter and
    /// the input.
    pub fn backward(&self, tape: &Tape<T>, output_grad: &[T]) -> Result<(MlpGrads<T>, Vec<T>)> {
        let mut grads = MlpGrads::zeros_like(self);
        let gin = self.backward_acc(tape, output_grad, &mut grads, 0)?;
        Ok((grads, gin))
    }

    /// Adds parameter gradients into `grads` for layers `first_param_layer..`
    /// and returns the input gradient. Layers below `first_param_layer` still
    /// propagate the signal but their parameter gradients are left untouched.
    pub fn backward_acc(
        &self,
        tape: &Tape<T>,
        output_grad: &[T],
        grads: &mut MlpGrads<T>,
        first_param_layer: usize,
    ) -> Result<Vec<T>> {
        if tape.dims.len() != self.layers.len()
            || tape
                .dims
                .iter()
                .zip(&self.layers)
                .any(|(&(i, o), l)| i != l.in_dim() || o != l.out_dim())
        {
            return Err(Error::StaleTape("layer dimensions differ"));
        }
        check_len("MLP output gradient", self.out_dim(), output_grad.len())?;
        check_len("gradient buffer layers", self.layers.len(), grads.bias.len())?;
        let mut g = output_grad.to_vec();
        for (k, layer) in self.layers.iter().enumerate().rev() {
            let act = layer.activation;
            for (gi, &zi) in g.iter_mut().zip(&tape.pre[k]) {
                *gi = *gi * act.eval(zi).1;
            }
            if k >= first_param_layer {
                grads.weights[k].add_outer(T::one(), &g, &tape.inputs[k])?;
                for (b, &gi) in grads.bias[k].iter_mut().zip(&g) {
                    *b = *b + gi;
                }
            }
            let mut gin = vec![T::zero(); layer.in_dim()];
            layer.weights.tr_matvec_acc(&g, &mut gin)?;
            g = gin;
        }
        Ok(g)
    }

    /// Parameter views in a fixed order: `W0, b0, W1, b1, ...`.
    pub fn param_slices(&self) -> Vec<&[T]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.as_slice(), l.bias.as_slice()])
            .collect()
    }

    pub fn param_slices_mut(&mut self) -> Vec<&mut [T]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weights.as_mut_slice(), l.bias.as_mut_slice()])
            .collect()
    }

    pub fn all_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.all_finite() && all_finite(&l.bias))
    }

    pub fn cast<U: Scalar>(&self) -> Mlp<U> {
        Mlp {
            layers: self
                .layers
                .iter()
                .map(|l| Layer {
                    weights: l.weights.map(|x| U::of(x.to_f64_lossless())),
                    bias: l.bias.iter().map(|&x| U::of(x.to_f64_lossless())).collect(),
                    activation: l.activation,
                })
                .collect(),
        }
    }
}

impl<T: Scalar> MlpGrads<T> {
    pub fn zeros_like(mlp: &Mlp<T>) -> Self {
        Self {
            weights: mlp
                .layers
                .iter()
                .map(|l| Matrix::zeros(l.out_dim(), l.in_dim()))
                .collect(),
            bias: mlp.layers.iter().map(|l| vec![T::zero(); l.out_dim()]).collect(),
        }
    }

    pub fn fill_zero(&mut self) {
        for w in &mut self.weights {
            w.as_mut_slice().fill(T::zero());
        }
        for b in &mut self.bias {
            b.fill(T::zero());
        }
    }

    pub fn scale(&mut self, s: T) {
        for v in self.slices_mut() {
            for x in v {
                *x = *x * s;
            }
        }
    }

    /// Same order as [`Mlp::param_slices`].
    pub fn slices(&self) -> Vec<&[T]> {
        self.weights
            .iter()
            .zip(&self.bias)
            .flat_map(|(w, b)| [w.as_slice(), b.as_slice()])
            .collect()
    }

    pub fn slices_mut(&mut self) -> Vec<&mut [T]> {
        self.weights
            .iter_mut()
            .zip(self.bias.iter_mut())
            .flat_map(|(w, b)| [w.as_mut_slice(), b.as_mut_slice()])
            .collect()
    }
}

/// One Adam update of every parameter of `mlp`.
pub fn adam_step<T: Scalar>(
    state: &mut AdamState<T>,
    mlp: &mut Mlp<T>,
    grads: &MlpGrads<T>,
) -> Result<()> {
    let g = grads.slices();
    let mut p = mlp.param_slices_mut();
    state.step(&mut p, &g)
}
