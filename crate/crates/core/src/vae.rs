//! Gaussian-encoder VAE with a deterministic-mean decoder.
//!
//! The encoder's final layer emits `2d` values read as `(μ, log σ²)`. Training
//! minimizes, per sample, `β·KL(q(z|x) ‖ N(0, I)) + ‖D(z) − x‖²` with
//! `z = μ + σ ⊗ ε`, averaged over the mini-batch.
//!
//! Networks operate on standardized coordinates. [`Standardizer`] is fitted on
//! the training rows and stored in the model; [`sample_vae`] maps generated
//! rows back to the data's physical units. The loss functions in this module
//! take rows that are already standardized.

use crate::error::{check_len, Error, Result};
use crate::ndcore::{Activation, AdamConfig, AdamState, Matrix, Mlp, MlpGrads};
use crate::rng::{self, Stream};
use crate::Scalar;

/// Per-feature affine map `x ↦ (x − mean) / scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer<T> {
    pub mean: Vec<T>,
    pub scale: Vec<T>,
}

impl<T: Scalar> Standardizer<T> {
    pub fn identity(dim: usize) -> Self {
        Self {
            mean: vec![T::zero(); dim],
            scale: vec![T::one(); dim],
        }
    }

    /// Column means and population standard deviations. Constant columns get
    /// scale 1.
    pub fn fit(data: &Matrix<T>) -> Result<Self> {
        let n = data.rows();
        if n == 0 {
            return Err(Error::Empty("standardizer fit"));
        }
        let dim = data.cols();
        let nf = T::of(n as f64);
        let mut mean = vec![T::zero(); dim];
        for row in data.iter_rows() {
            for (m, &x) in mean.iter_mut().zip(row) {
                *m = *m + x;
            }
        }
        for m in &mut mean {
            *m = *m / nf;
        }
        let mut var = vec![T::zero(); dim];
        for row in data.iter_rows() {
            for ((v, &x), &m) in var.iter_mut().zip(row).zip(&mean) {
                *v = *v + (x - m) * (x - m);
            }
        }
        let scale = var
            .iter()
            .zip(&mean)
            .map(|(&v, &m)| {
                let s = (v / nf).sqrt();
                if s > T::of(1e-12) * (T::one() + m.abs()) {
                    s
                } else {
                    T::one()
                }
            })
            .collect();
        Ok(Self { mean, scale })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn forward(&self, x: &[T]) -> Result<Vec<T>> {
        check_len("standardizer input", self.dim(), x.len())?;
        Ok(x.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(&v, (&m, &s))| (v - m) / s)
            .collect())
    }

    pub fn inverse(&self, y: &[T]) -> Result<Vec<T>> {
        check_len("standardizer output", self.dim(), y.len())?;
        Ok(y.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(&v, (&m, &s))| v * s + m)
            .collect())
    }

    pub fn forward_rows(&self, data: &Matrix<T>) -> Result<Matrix<T>> {
        check_len("standardizer input", self.dim(), data.cols())?;
        let mut out = Vec::with_capacity(data.rows() * data.cols());
        for row in data.iter_rows() {
            out.extend(self.forward(row)?);
        }
        Matrix::from_vec(data.rows(), data.cols(), out)
    }
}

/// Layer widths and activation shared by the encoder and the mirrored decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct VaeArch {
    /// Encoder hidden widths, input side first; the decoder uses them reversed.
    pub hidden: Vec<usize>,
    pub latent_dim: usize,
    pub activation: Activation,
}

impl VaeArch {
    pub fn encoder_widths(&self, ambient: usize) -> Vec<usize> {
        let mut w = vec![ambient];
        w.extend(&self.hidden);
        w.push(2 * self.latent_dim);
        w
    }

    pub fn decoder_widths(&self, ambient: usize) -> Vec<usize> {
        let mut w = vec![self.latent_dim];
        w.extend(self.hidden.iter().rev());
        w.push(ambient);
        w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub adam: AdamConfig,
    pub beta: f64,
}

impl TrainConfig {
    pub(crate) fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::InvalidConfig(
                "epochs and batch size must be positive".into(),
            ));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        Ok(())
    }
}

/// Epoch-averaged training losses.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainLog {
    pub epoch_loss: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderOutput<T> {
    pub mu: Vec<T>,
    pub log_var: Vec<T>,
}

impl<T: Scalar> EncoderOutput<T> {
    pub fn sigma(&self) -> Vec<T> {
        self.log_var
            .iter()
            .map(|&lv| (lv * T::of(0.5)).exp())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VaeModel<T> {
    pub(crate) encoder: Mlp<T>,
    pub(crate) decoder: Mlp<T>,
    latent_dim: usize,
    ambient_dim: usize,
    pub(crate) beta: T,
    pub(crate) standardizer: Standardizer<T>,
}

impl<T: Scalar> VaeModel<T> {
    pub fn new(
        encoder: Mlp<T>,
        decoder: Mlp<T>,
        beta: T,
        standardizer: Standardizer<T>,
    ) -> Result<Self> {
        let ambient_dim = encoder.in_dim();
        let latent_dim = decoder.in_dim();
        check_len("encoder output (2 × latent)", 2 * latent_dim, encoder.out_dim())?;
        check_len("decoder output", ambient_dim, decoder.out_dim())?;
        check_len("standardizer", ambient_dim, standardizer.dim())?;
        if !(beta > T::zero() && beta.is_finite()) {
            return Err(Error::InvalidConfig("beta must be positive".into()));
        }
        Ok(Self {
            encoder,
            decoder,
            latent_dim,
            ambient_dim,
            beta,
            standardizer,
        })
    }

    /// Glorot-initialized model with an identity standardizer.
    pub fn init(ambient: usize, arch: &VaeArch, beta: f64, seed: u64) -> Result<Self> {
        if arch.latent_dim == 0 || ambient == 0 {
            return Err(Error::InvalidConfig("dimensions must be positive".into()));
        }
        let mut rng = rng::stream(seed, Stream::Init, 0);
        let encoder = Mlp::glorot(&arch.encoder_widths(ambient), arch.activation, &mut rng)?;
        let decoder = Mlp::glorot(&arch.decoder_widths(ambient), arch.activation, &mut rng)?;
        Self::new(encoder, decoder, T::of(beta), Standardizer::identity(ambient))
    }

    pub fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn encoder(&self) -> &Mlp<T> {
        &self.encoder
    }

    pub fn decoder(&self) -> &Mlp<T> {
        &self.decoder
    }

    pub fn standardizer(&self) -> &Standardizer<T> {
        &self.standardizer
    }

    pub fn set_standardizer(&mut self, s: Standardizer<T>) -> Result<()> {
        check_len("standardizer", self.ambient_dim, s.dim())?;
        self.standardizer = s;
        Ok(())
    }

    /// `(μ, log σ²)` for a standardized row.
    pub fn encode(&self, x: &[T]) -> Result<EncoderOutput<T>> {
        let h = self.encoder.predict(x)?;
        Ok(split_encoder_output(h, self.latent_dim))
    }

    /// Decoder mean for a latent vector, in standardized coordinates.
    pub fn decode(&self, z: &[T]) -> Result<Vec<T>> {
        self.decoder.predict(z)
    }

    /// Decoder mean mapped back to physical units.
    pub fn decode_raw(&self, z: &[T]) -> Result<Vec<T>> {
        self.standardizer.inverse(&self.decode(z)?)
    }

    /// Deterministic reconstruction `D(μ(x))` of a raw row, in raw units.
    pub fn reconstruct_raw(&self, x: &[T]) -> Result<Vec<T>> {
        let xs = self.standardizer.forward(x)?;
        let enc = self.encode(&xs)?;
        self.decode_raw(&enc.mu)
    }

    pub fn cast<U: Scalar>(&self) -> VaeModel<U> {
        let c = |v: &[T]| v.iter().map(|&x| U::of(x.to_f64_lossless())).collect();
        VaeModel {
            encoder: self.encoder.cast(),
            decoder: self.decoder.cast(),
            latent_dim: self.latent_dim,
            ambient_dim: self.ambient_dim,
            beta: U::of(self.beta.to_f64_lossless()),
            standardizer: Standardizer {
                mean: c(&self.standardizer.mean),
                scale: c(&self.standardizer.scale),
            },
        }
    }
}

pub(crate) fn split_encoder_output<T: Scalar>(mut h: Vec<T>, d: usize) -> EncoderOutput<T> {
    let log_var = h.split_off(d);
    EncoderOutput { mu: h, log_var }
}

/// `z = exp(log_var / 2) ⊗ eps + mu`.
pub fn reparameterize<T: Scalar>(enc: &EncoderOutput<T>, eps: &[T]) -> Result<Vec<T>> {
    check_len("reparameterize noise", enc.mu.len(), eps.len())?;
    Ok(enc
        .mu
        .iter()
        .zip(&enc.log_var)
        .zip(eps)
        .map(|((&m, &lv), &e)| (lv * T::of(0.5)).exp() * e + m)
        .collect())
}

/// `½ Σ (μ² + σ² − 1 − log σ²)`, the KL divergence from `N(μ, σ²)` to `N(0, I)`.
pub fn kl_std_normal<T: Scalar>(enc: &EncoderOutput<T>) -> T {
    let half = T::of(0.5);
    enc.mu
        .iter()
        .zip(&enc.log_var)
        .map(|(&m, &lv)| half * (m * m + (lv.exp() - T::one() - lv)))
        .sum()
}

fn check_batch<T: Scalar>(xs: &Matrix<T>, noise: &Matrix<T>, d: usize, dim: usize) -> Result<()> {
    if xs.rows() == 0 {
        return Err(Error::Empty("loss batch"));
    }
    check_len("batch width", dim, xs.cols())?;
    check_len("noise rows", xs.rows(), noise.rows())?;
    check_len("noise width", d, noise.cols())
}

/// Mean over the batch of `β·KL + ‖D(z) − x‖²`, `z` reparameterized with the
/// matching row of `eps`. Rows are in standardized coordinates.
pub fn lf_loss<T: Scalar>(model: &VaeModel<T>, xs: &Matrix<T>, eps: &Matrix<T>) -> Result<T> {
    check_batch(xs, eps, model.latent_dim, model.ambient_dim)?;
    let mut total = T::zero();
    for (x, e) in xs.iter_rows().zip(eps.iter_rows()) {
        let enc = model.encode(x)?;
        let z = reparameterize(&enc, e)?;
        let xhat = model.decode(&z)?;
        total = total + model.beta * kl_std_normal(&enc) + sq_dist(&xhat, x);
    }
    Ok(total / T::of(xs.rows() as f64))
}

/// Gradients of [`lf_loss`] with respect to encoder and decoder parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct VaeGrads<T> {
    pub encoder: MlpGrads<T>,
    pub decoder: MlpGrads<T>,
}

impl<T: Scalar> VaeGrads<T> {
    pub fn zeros_like(model: &VaeModel<T>) -> Self {
        Self {
            encoder: MlpGrads::zeros_like(&model.encoder),
            decoder: MlpGrads::zeros_like(&model.decoder),
        }
    }

    fn fill_zero(&mut self) {
        self.encoder.fill_zero();
        self.decoder.fill_zero();
    }

    fn slices(&self) -> Vec<&[T]> {
        let mut v = self.encoder.slices();
        v.extend(self.decoder.slices());
        v
    }
}

/// [`lf_loss`] and its exact gradient, accumulated into `grads` (which is
/// reset first).
pub fn lf_loss_grad<T: Scalar>(
    model: &VaeModel<T>,
    xs: &Matrix<T>,
    eps: &Matrix<T>,
    grads: &mut VaeGrads<T>,
) -> Result<T> {
    check_batch(xs, eps, model.latent_dim, model.ambient_dim)?;
    grads.fill_zero();
    let d = model.latent_dim;
    let inv_b = T::one() / T::of(xs.rows() as f64);
    let (half, two, beta) = (T::of(0.5), T::of(2.0), model.beta);
    let mut total = T::zero();
    let mut enc_grad = vec![T::zero(); 2 * d];
    for (x, e) in xs.iter_rows().zip(eps.iter_rows()) {
        let (h, enc_tape) = model.encoder.forward(x)?;
        let (mu, lv) = h.split_at(d);
        let sigma: Vec<T> = lv.iter().map(|&v| (v * half).exp()).collect();
        let z: Vec<T> = (0..d).map(|j| sigma[j] * e[j] + mu[j]).collect();
        let (xhat, dec_tape) = model.decoder.forward(&z)?;
        let mut kl = T::zero();
        for j in 0..d {
            kl = kl + half * (mu[j] * mu[j] + (sigma[j] * sigma[j] - T::one() - lv[j]));
        }
        total = total + beta * kl + sq_dist(&xhat, x);

        let out_grad: Vec<T> = xhat
            .iter()
            .zip(x)
            .map(|(&p, &t)| two * (p - t) * inv_b)
            .collect();
        let dz = model
            .decoder
            .backward_acc(&dec_tape, &out_grad, &mut grads.decoder, 0)?;
        for j in 0..d {
            enc_grad[j] = dz[j] + beta * mu[j] * inv_b;
            enc_grad[d + j] = dz[j] * e[j] * half * sigma[j]
                + beta * half * (sigma[j] * sigma[j] - T::one()) * inv_b;
        }
        model
            .encoder
            .backward_acc(&enc_tape, &enc_grad, &mut grads.encoder, 0)?;
    }
    Ok(total * inv_b)
}

pub(crate) fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&p, &q)| (p - q) * (p - q)).sum()
}

/// Mini-batch index ranges of a shuffled epoch.
pub(crate) fn batches(perm: &[usize], batch: usize) -> impl Iterator<Item = &[usize]> {
    perm.chunks(batch)
}

/// Fits the standardizer on `data` (raw rows) and trains a fresh model with
/// Adam. Deterministic in `(data, arch, config, seed)`.
pub fn train_vae<T: Scalar>(
    data: &Matrix<T>,
    arch: &VaeArch,
    config: &TrainConfig,
    seed: u64,
) -> Result<(VaeModel<T>, TrainLog)> {
    train_vae_with(data, arch, config, seed, |_, _| {})
}

/// [`train_vae`] with a callback receiving `(epoch, mean loss)` after each epoch.
pub fn train_vae_with<T: Scalar>(
    data: &Matrix<T>,
    arch: &VaeArch,
    config: &TrainConfig,
    seed: u64,
    mut on_epoch: impl FnMut(usize, f64),
) -> Result<(VaeModel<T>, TrainLog)> {
    if data.rows() == 0 {
        return Err(Error::Empty("training data"));
    }
    config.validate()?;
    let mut model = VaeModel::init(data.cols(), arch, config.beta, seed)?;
    model.standardizer = Standardizer::fit(data)?;
    let xs = model.standardizer.forward_rows(data)?;

    let mut shuffle_rng = rng::stream(seed, Stream::Shuffle, 0);
    let mut noise_rng = rng::stream(seed, Stream::Noise, 0);
    let mut adam = {
        let mut p = model.encoder.param_slices();
        p.extend(model.decoder.param_slices());
        AdamState::for_slices(config.adam, &p)
    };
    let mut grads = VaeGrads::zeros_like(&model);
    let d = model.latent_dim;
    let mut log = TrainLog::default();

    for epoch in 0..config.epochs {
        let perm = rng::permutation(&mut shuffle_rng, xs.rows());
        let mut epoch_sum = 0.0;
        for (bi, idx) in batches(&perm, config.batch_size).enumerate() {
            let batch = xs.select_rows(idx);
            let mut eps = Matrix::zeros(idx.len(), d);
            rng::fill_normal(&mut noise_rng, eps.as_mut_slice());
            let loss = lf_loss_grad(&model, &batch, &eps, &mut grads).map_err(|e| {
                Error::non_finite(format!("LF training at epoch {epoch}, batch {bi}: {e}"))
            })?;
            if !loss.is_finite() {
                return Err(Error::non_finite(format!(
                    "LF loss at epoch {epoch}, batch {bi}"
                )));
            }
            epoch_sum += loss.to_f64_lossless() * idx.len() as f64;
            let g = grads.slices();
            let mut p = model.encoder.param_slices_mut();
            p.extend(model.decoder.param_slices_mut());
            adam.step(&mut p, &g).map_err(|e| {
                Error::non_finite(format!("LF training at epoch {epoch}, batch {bi}: {e}"))
            })?;
        }
        let mean = epoch_sum / xs.rows() as f64;
        on_epoch(epoch, mean);
        log.epoch_loss.push(mean);
    }
    Ok((model, log))
}

/// `count` rows `D(z)`, `z ~ N(0, I)`, in raw units.
pub fn sample_vae<T: Scalar>(model: &VaeModel<T>, count: usize, seed: u64) -> Result<Matrix<T>> {
    let mut rng = rng::stream(seed, Stream::Sample, 0);
    let mut out = Vec::with_capacity(count * model.ambient_dim);
    let mut z = vec![T::zero(); model.latent_dim];
    for _ in 0..count {
        rng::fill_normal(&mut rng, &mut z);
        out.extend(model.decode_raw(&z)?);
    }
    Matrix::from_vec(count, model.ambient_dim, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_model(ambient: usize, d: usize) -> VaeModel<f64> {
        let enc = Mlp::zeros(&[ambient, 3, 2 * d], Activation::Gelu).unwrap();
        let dec = Mlp::zeros(&[d, 3, ambient], Activation::Gelu).unwrap();
        VaeModel::new(enc, dec, 1.0, Standardizer::identity(ambient)).unwrap()
    }

    #[test]
    fn zero_encoder_gives_standard_normal() {
        let m = zero_model(5, 2);
        let enc = m.encode(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(enc.mu, vec![0.0; 2]);
        assert_eq!(enc.log_var, vec![0.0; 2]);
        assert_eq!(enc.sigma(), vec![1.0; 2]);
        assert_eq!(m.decode(&[0.3, -0.4]).unwrap(), vec![0.0; 5]);
        assert!(m.encode(&[1.0]).is_err());
        assert!(m.decode(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn reparameterize_cases() {
        let enc = EncoderOutput {
            mu: vec![1.0, 2.0],
            log_var: vec![0.0, 2.0 * 2f64.ln()],
        };
        assert_eq!(reparameterize(&enc, &[0.0, 0.0]).unwrap(), enc.mu);
        let z = reparameterize(&enc, &[1.0, -1.0]).unwrap();
        assert!((z[0] - 2.0).abs() < 1e-15 && z[1].abs() < 1e-15);
        let std = EncoderOutput {
            mu: vec![0.0; 2],
            log_var: vec![0.0; 2],
        };
        assert_eq!(reparameterize(&std, &[0.7, -1.3]).unwrap(), vec![0.7, -1.3]);
        assert!(reparameterize(&std, &[0.0]).is_err());
    }

    #[test]
    fn kl_cases() {
        let e = |mu: Vec<f64>, log_var: Vec<f64>| EncoderOutput { mu, log_var };
        assert_eq!(kl_std_normal(&e(vec![0.0], vec![0.0])), 0.0);
        assert_eq!(kl_std_normal(&e(vec![1.0], vec![0.0])), 0.5);
        let v = kl_std_normal(&e(vec![0.3, -0.2], vec![0.1, -0.4]));
        // 0.5*(0.09 + e^0.1 - 1 - 0.1) + 0.5*(0.04 + e^-0.4 - 1 + 0.4), hand evaluated
        assert!((v - 0.102_745_482_055_643_59).abs() < 1e-15, "{v}");
    }

    #[test]
    fn lf_loss_perfect_autoencoder_is_zero() {
        let m = zero_model(3, 1);
        let xs = Matrix::zeros(4, 3);
        let eps = Matrix::zeros(4, 1);
        assert_eq!(lf_loss(&m, &xs, &eps).unwrap(), 0.0);
        assert!(matches!(
            lf_loss(&m, &Matrix::zeros(0, 3), &Matrix::zeros(0, 1)),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn lf_loss_hand_evaluated() {
        use crate::ndcore::Layer;
        // encoder: 1 -> 2 linear, mu = 0.5 x + 0.1, log_var = -x + 0.2
        let enc = Mlp::new(vec![Layer::new(
            Matrix::from_vec(2, 1, vec![0.5, -1.0]).unwrap(),
            vec![0.1, 0.2],
            Activation::Identity,
        )
        .unwrap()])
        .unwrap();
        // decoder: xhat = 2 z - 0.3
        let dec = Mlp::new(vec![Layer::new(
            Matrix::from_vec(1, 1, vec![2.0]).unwrap(),
            vec![-0.3],
            Activation::Identity,
        )
        .unwrap()])
        .unwrap();
        let m = VaeModel::new(enc, dec, 0.25, Standardizer::identity(1)).unwrap();
        let xs = Matrix::from_vec(1, 1, vec![0.8]).unwrap();
        let eps = Matrix::from_vec(1, 1, vec![-0.6]).unwrap();
        let mu = 0.5_f64;
        let lv = -0.6_f64;
        let z = (lv / 2.0).exp() * -0.6 + mu;
        let xhat = 2.0 * z - 0.3;
        let kl = 0.5 * (mu * mu + lv.exp() - 1.0 - lv);
        let want = 0.25 * kl + (xhat - 0.8) * (xhat - 0.8);
        assert!((lf_loss(&m, &xs, &eps).unwrap() - want).abs() < 1e-15);

        let mut m2 = m.clone();
        m2.beta = 0.5;
        let rec = (xhat - 0.8) * (xhat - 0.8);
        let l1 = lf_loss(&m, &xs, &eps).unwrap() - rec;
        let l2 = lf_loss(&m2, &xs, &eps).unwrap() - rec;
        assert!((l2 - 2.0 * l1).abs() < 1e-15);
    }

    #[test]
    fn standardizer_handles_constant_columns() {
        let data = Matrix::from_rows(&[[1.0, 5.0], [3.0, 5.0]]).unwrap();
        let s = Standardizer::fit(&data).unwrap();
        assert_eq!(s.mean, vec![2.0, 5.0]);
        assert_eq!(s.scale, vec![1.0, 1.0]);
        let y = s.forward(&[3.0, 5.0]).unwrap();
        assert_eq!(y, vec![1.0, 0.0]);
        assert_eq!(s.inverse(&y).unwrap(), vec![3.0, 5.0]);
    }

    #[test]
    fn sample_of_zero_decoder_is_zero() {
        let m = zero_model(4, 2);
        let s = sample_vae(&m, 10, 3).unwrap();
        assert_eq!(s.shape(), (10, 4));
        assert!(s.as_slice().iter().all(|&v| v == 0.0));
    }
}
