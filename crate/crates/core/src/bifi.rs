//! Bi-fidelity adaptation of a trained LF VAE.
//!
//! The LF latent `z_L` is linked to the HF latent by the elementwise affine
//! map `z_H = a ⊗ z_L + b + γ η`. Stage 2 starts from the LF model with the
//! map at identity and optimizes only `(a, b)` and the decoder's final layer
//! on aligned `(x_L, x_H)` pairs, minimizing `‖D(z_H) − x_H‖²`. The encoder and
//! every other decoder layer stay bit-for-bit at their LF values.
//!
//! HF rows are standardized with the LF model's statistics, because the
//! decoder being fine-tuned emits LF-standardized coordinates.

use crate::error::{check_len, Error, Result};
use crate::ndcore::{AdamConfig, AdamState, Matrix, MlpGrads};
use crate::rng::{self, Stream};
use crate::vae::{self, sq_dist, TrainConfig, TrainLog, VaeArch, VaeModel};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LatentAutoRegressor<T> {
    pub a: Vec<T>,
    pub b: Vec<T>,
    pub gamma: T,
}

impl<T: Scalar> LatentAutoRegressor<T> {
    pub fn identity(d: usize, gamma: T) -> Self {
        Self {
            a: vec![T::one(); d],
            b: vec![T::zero(); d],
            gamma,
        }
    }

    pub fn new(a: Vec<T>, b: Vec<T>, gamma: T) -> Result<Self> {
        check_len("regressor bias", a.len(), b.len())?;
        if !(gamma >= T::zero() && gamma.is_finite()) {
            return Err(Error::InvalidConfig("gamma must be non-negative".into()));
        }
        Ok(Self { a, b, gamma })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// `a ⊗ z_L + b`.
    pub fn regress(&self, z_lf: &[T]) -> Result<Vec<T>> {
        check_len("latent regressor input", self.dim(), z_lf.len())?;
        Ok(z_lf
            .iter()
            .zip(self.a.iter().zip(&self.b))
            .map(|(&z, (&a, &b))| a * z + b)
            .collect())
    }

    /// `γ η + a ⊗ z_L + b`.
    pub fn sample_hf_latent(&self, z_lf: &[T], eta: &[T]) -> Result<Vec<T>> {
        check_len("latent noise", self.dim(), eta.len())?;
        let mut z = self.regress(z_lf)?;
        for (zi, &e) in z.iter_mut().zip(eta) {
            *zi = *zi + self.gamma * e;
        }
        Ok(z)
    }

    /// `‖a − 1‖∞ + ‖b‖∞`.
    pub fn distance_from_identity(&self) -> T {
        let da = self
            .a
            .iter()
            .fold(T::zero(), |m, &a| m.max((a - T::one()).abs()));
        let db = self.b.iter().fold(T::zero(), |m, &b| m.max(b.abs()));
        da + db
    }
}

/// Free-function form of [`LatentAutoRegressor::regress`].
pub fn latent_regress<T: Scalar>(reg: &LatentAutoRegressor<T>, z_lf: &[T]) -> Result<Vec<T>> {
    reg.regress(z_lf)
}

pub fn sample_hf_latent<T: Scalar>(
    reg: &LatentAutoRegressor<T>,
    z_lf: &[T],
    eta: &[T],
) -> Result<Vec<T>> {
    reg.sample_hf_latent(z_lf, eta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BfVaeModel<T> {
    pub(crate) base: VaeModel<T>,
    pub(crate) reg: LatentAutoRegressor<T>,
    trainable: Vec<bool>,
}

impl<T: Scalar> BfVaeModel<T> {
    /// Wraps a trained LF model with the regressor at identity.
    pub fn from_lf(lf: &VaeModel<T>, gamma: T) -> Result<Self> {
        let reg = LatentAutoRegressor::new(
            vec![T::one(); lf.latent_dim()],
            vec![T::zero(); lf.latent_dim()],
            gamma,
        )?;
        Self::new(lf.clone(), reg)
    }

    pub fn new(base: VaeModel<T>, reg: LatentAutoRegressor<T>) -> Result<Self> {
        check_len("regressor dimension", base.latent_dim(), reg.dim())?;
        let n = base.decoder().num_layers();
        let trainable = (0..n).map(|k| k + 1 == n).collect();
        Ok(Self {
            base,
            reg,
            trainable,
        })
    }

    pub fn base(&self) -> &VaeModel<T> {
        &self.base
    }

    pub fn regressor(&self) -> &LatentAutoRegressor<T> {
        &self.reg
    }

    /// Which decoder layers stage 2 may update (only the last).
    pub fn trainable_mask(&self) -> &[bool] {
        &self.trainable
    }

    pub fn latent_dim(&self) -> usize {
        self.base.latent_dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.ambient_dim()
    }

    fn last_layer(&self) -> usize {
        self.trainable.len() - 1
    }

    pub fn cast<U: Scalar>(&self) -> BfVaeModel<U> {
        let c = |v: &[T]| v.iter().map(|&x| U::of(x.to_f64_lossless())).collect();
        BfVaeModel {
            base: self.base.cast(),
            reg: LatentAutoRegressor {
                a: c(&self.reg.a),
                b: c(&self.reg.b),
                gamma: U::of(self.reg.gamma.to_f64_lossless()),
            },
            trainable: self.trainable.clone(),
        }
    }
}

/// Row-aligned LF/HF samples: row `i` of `lf` and `hf` come from the same input.
#[derive(Debug, Clone, PartialEq)]
pub struct BiFiDataset<T> {
    lf: Matrix<T>,
    hf: Matrix<T>,
    pub lf_only: Option<Matrix<T>>,
    pub meta: DatasetMeta,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetMeta {
    pub problem: String,
    pub seed: Option<u64>,
    /// Per-row input vectors that produced the samples, when known.
    pub inputs: Vec<Vec<f64>>,
}

impl<T: Scalar> BiFiDataset<T> {
    pub fn new(lf: Matrix<T>, hf: Matrix<T>) -> Result<Self> {
        check_len("paired rows", lf.rows(), hf.rows())?;
        check_len("paired dimension", lf.cols(), hf.cols())?;
        Ok(Self {
            lf,
            hf,
            lf_only: None,
            meta: DatasetMeta::default(),
        })
    }

    pub fn with_meta(mut self, meta: DatasetMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn lf(&self) -> &Matrix<T> {
        &self.lf
    }

    pub fn hf(&self) -> &Matrix<T> {
        &self.hf
    }

    pub fn len(&self) -> usize {
        self.lf.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.lf.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.lf.cols()
    }

    /// Pairs at the given row indices.
    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            lf: self.lf.select_rows(idx),
            hf: self.hf.select_rows(idx),
            lf_only: None,
            meta: DatasetMeta {
                problem: self.meta.problem.clone(),
                seed: self.meta.seed,
                inputs: idx
                    .iter()
                    .filter_map(|&i| self.meta.inputs.get(i).cloned())
                    .collect(),
            },
        }
    }
}

fn check_pairs<T: Scalar>(
    model: &BfVaeModel<T>,
    xl: &Matrix<T>,
    xh: &Matrix<T>,
    eps: &Matrix<T>,
    eta: &Matrix<T>,
) -> Result<()> {
    if xl.rows() == 0 {
        return Err(Error::Empty("HF loss batch"));
    }
    let (d, dim) = (model.latent_dim(), model.ambient_dim());
    check_len("LF batch width", dim, xl.cols())?;
    check_len("HF batch width", dim, xh.cols())?;
    check_len("LF/HF row alignment", xl.rows(), xh.rows())?;
    check_len("eps rows", xl.rows(), eps.rows())?;
    check_len("eta rows", xl.rows(), eta.rows())?;
    check_len("eps width", d, eps.cols())?;
    check_len("eta width", d, eta.cols())
}

/// Mean over pairs of `‖D(z_H) − x_H‖²` with
/// `z_L = μ(x_L) + σ(x_L) ⊗ ε` and `z_H = a ⊗ z_L + b + γ η`.
/// Rows are in the model's standardized coordinates.
pub fn hf_loss<T: Scalar>(
    model: &BfVaeModel<T>,
    xl: &Matrix<T>,
    xh: &Matrix<T>,
    eps: &Matrix<T>,
    eta: &Matrix<T>,
) -> Result<T> {
    check_pairs(model, xl, xh, eps, eta)?;
    let mut total = T::zero();
    for i in 0..xl.rows() {
        let enc = model.base.encode(xl.row(i))?;
        let zl = vae::reparameterize(&enc, eps.row(i))?;
        let zh = model.reg.sample_hf_latent(&zl, eta.row(i))?;
        total = total + sq_dist(&model.base.decode(&zh)?, xh.row(i));
    }
    Ok(total / T::of(xl.rows() as f64))
}

/// Gradients of [`hf_loss`] with respect to the stage-2 trainable parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct BfGrads<T> {
    pub a: Vec<T>,
    pub b: Vec<T>,
    /// Decoder gradients; only the final layer is populated.
    pub decoder: MlpGrads<T>,
}

impl<T: Scalar> BfGrads<T> {
    pub fn zeros_like(model: &BfVaeModel<T>) -> Self {
        let d = model.latent_dim();
        Self {
            a: vec![T::zero(); d],
            b: vec![T::zero(); d],
            decoder: MlpGrads::zeros_like(model.base.decoder()),
        }
    }

    fn fill_zero(&mut self) {
        self.a.fill(T::zero());
        self.b.fill(T::zero());
        self.decoder.fill_zero();
    }

    pub fn last_weights(&self) -> &Matrix<T> {
        self.decoder.weights.last().expect("non-empty decoder")
    }

    pub fn last_bias(&self) -> &[T] {
        self.decoder.bias.last().expect("non-empty decoder")
    }
}

/// [`hf_loss`] and its gradient (reset then accumulated into `grads`).
pub fn hf_loss_grad<T: Scalar>(
    model: &BfVaeModel<T>,
    xl: &Matrix<T>,
    xh: &Matrix<T>,
    eps: &Matrix<T>,
    eta: &Matrix<T>,
    grads: &mut BfGrads<T>,
) -> Result<T> {
    check_pairs(model, xl, xh, eps, eta)?;
    grads.fill_zero();
    let inv_b = T::one() / T::of(xl.rows() as f64);
    let two = T::of(2.0);
    let last = model.last_layer();
    let mut total = T::zero();
    for i in 0..xl.rows() {
        let enc = model.base.encode(xl.row(i))?;
        let zl = vae::reparameterize(&enc, eps.row(i))?;
        let zh = model.reg.sample_hf_latent(&zl, eta.row(i))?;
        let (xhat, tape) = model.base.decoder.forward(&zh)?;
        let x = xh.row(i);
        total = total + sq_dist(&xhat, x);
        let out_grad: Vec<T> = xhat
            .iter()
            .zip(x)
            .map(|(&p, &t)| two * (p - t) * inv_b)
            .collect();
        let dz = model
            .base
            .decoder
            .backward_acc(&tape, &out_grad, &mut grads.decoder, last)?;
        for j in 0..dz.len() {
            grads.a[j] = grads.a[j] + dz[j] * zl[j];
            grads.b[j] = grads.b[j] + dz[j];
        }
    }
    Ok(total * inv_b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BfTrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub adam: AdamConfig,
    pub gamma: f64,
}

/// Stage 2: adapts `lf_model` to the HF side of `pairs`, updating only the
/// regressor `(a, b)` and the decoder's last layer.
pub fn train_bf<T: Scalar>(
    lf_model: &VaeModel<T>,
    pairs: &BiFiDataset<T>,
    config: &BfTrainConfig,
    seed: u64,
) -> Result<(BfVaeModel<T>, TrainLog)> {
    train_bf_with(lf_model, pairs, config, seed, |_, _| {})
}

pub fn train_bf_with<T: Scalar>(
    lf_model: &VaeModel<T>,
    pairs: &BiFiDataset<T>,
    config: &BfTrainConfig,
    seed: u64,
    mut on_epoch: impl FnMut(usize, f64),
) -> Result<(BfVaeModel<T>, TrainLog)> {
    if pairs.is_empty() {
        return Err(Error::Empty("bi-fidelity pairs"));
    }
    check_len("pair dimension vs LF model", lf_model.ambient_dim(), pairs.dim())?;
    if config.epochs == 0 || config.batch_size == 0 {
        return Err(Error::InvalidConfig(
            "epochs and batch size must be positive".into(),
        ));
    }
    let mut model = BfVaeModel::from_lf(lf_model, T::of(config.gamma))?;
    let std = &model.base.standardizer;
    let xl = std.forward_rows(pairs.lf())?;
    let xh = std.forward_rows(pairs.hf())?;

    let mut shuffle_rng = rng::stream(seed, Stream::Shuffle, 1);
    let mut noise_rng = rng::stream(seed, Stream::Noise, 1);
    let d = model.latent_dim();
    let last = model.last_layer();
    let mut adam = {
        let l = &model.base.decoder.layers()[last];
        AdamState::<T>::new(
            config.adam,
            &[d, d, l.weights.as_slice().len(), l.bias.len()],
        )
    };
    let mut grads = BfGrads::zeros_like(&model);
    let mut log = TrainLog::default();

    for epoch in 0..config.epochs {
        let perm = rng::permutation(&mut shuffle_rng, xl.rows());
        let mut epoch_sum = 0.0;
        for (bi, idx) in vae::batches(&perm, config.batch_size).enumerate() {
            let bl = xl.select_rows(idx);
            let bh = xh.select_rows(idx);
            let mut eps = Matrix::zeros(idx.len(), d);
            let mut eta = Matrix::zeros(idx.len(), d);
            for k in 0..idx.len() {
                rng::fill_normal(&mut noise_rng, eps.row_mut(k));
                rng::fill_normal(&mut noise_rng, eta.row_mut(k));
            }
            let loss = hf_loss_grad(&model, &bl, &bh, &eps, &eta, &mut grads).map_err(|e| {
                Error::non_finite(format!("BF training at epoch {epoch}, batch {bi}: {e}"))
            })?;
            if !loss.is_finite() {
                return Err(Error::non_finite(format!(
                    "HF loss at epoch {epoch}, batch {bi}"
                )));
            }
            epoch_sum += loss.to_f64_lossless() * idx.len() as f64;

            let g: [&[T]; 4] = [
                &grads.a,
                &grads.b,
                grads.decoder.weights[last].as_slice(),
                &grads.decoder.bias[last],
            ];
            let layer = &mut model.base.decoder.layers_mut()[last];
            let mut p: [&mut [T]; 4] = [
                &mut model.reg.a,
                &mut model.reg.b,
                layer.weights.as_mut_slice(),
                &mut layer.bias,
            ];
            adam.step(&mut p, &g).map_err(|e| {
                Error::non_finite(format!("BF training at epoch {epoch}, batch {bi}: {e}"))
            })?;
        }
        let mean = epoch_sum / xl.rows() as f64;
        on_epoch(epoch, mean);
        log.epoch_loss.push(mean);
    }
    Ok((model, log))
}

/// `count` HF rows in raw units: `z_L ~ N(0, I)`, `η ~ N(0, I)`, decoded from
/// `a ⊗ z_L + b + γ η`.
///
/// `z_L` comes from the same stream [`vae::sample_vae`] uses, so an identity
/// regressor with `γ = 0` reproduces the base model's samples exactly.
pub fn generate_hf<T: Scalar>(model: &BfVaeModel<T>, count: usize, seed: u64) -> Result<Matrix<T>> {
    let mut z_rng = rng::stream(seed, Stream::Sample, 0);
    let mut eta_rng = rng::stream(seed, Stream::Sample, 1);
    let d = model.latent_dim();
    let mut out = Vec::with_capacity(count * model.ambient_dim());
    let mut zl = vec![T::zero(); d];
    let mut eta = vec![T::zero(); d];
    for _ in 0..count {
        rng::fill_normal(&mut z_rng, &mut zl);
        rng::fill_normal(&mut eta_rng, &mut eta);
        let zh = model.reg.sample_hf_latent(&zl, &eta)?;
        out.extend(model.base.decode_raw(&zh)?);
    }
    Matrix::from_vec(count, model.ambient_dim(), out)
}

/// HF-only baseline: a standard VAE trained on the HF rows alone.
pub fn train_hf_baseline<T: Scalar>(
    hf: &Matrix<T>,
    arch: &VaeArch,
    config: &TrainConfig,
    seed: u64,
) -> Result<(VaeModel<T>, TrainLog)> {
    vae::train_vae(hf, arch, config, seed)
}

/// Outcome of the bitwise comparison between an LF model and a stage-2 model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreezeReport {
    pub encoder_identical: bool,
    /// Per decoder layer, whether its parameters are bitwise unchanged.
    pub decoder_layers_identical: Vec<bool>,
    pub standardizer_identical: bool,
}

impl FreezeReport {
    /// Everything except the decoder's final layer is unchanged.
    pub fn holds(&self) -> bool {
        let n = self.decoder_layers_identical.len();
        self.encoder_identical
            && self.standardizer_identical
            && self.decoder_layers_identical[..n.saturating_sub(1)]
                .iter()
                .all(|&b| b)
    }
}

fn bits_equal<T: Scalar>(a: &[T], b: &[T]) -> bool {
    a.len() == b.len()
        && a
            .iter()
            .zip(b)
            .all(|(x, y)| x.to_f64_lossless().to_bits() == y.to_f64_lossless().to_bits())
}

pub fn freeze_report<T: Scalar>(lf: &VaeModel<T>, bf: &BfVaeModel<T>) -> FreezeReport {
    let enc_a = lf.encoder().param_slices();
    let enc_b = bf.base.encoder().param_slices();
    let encoder_identical = lf.encoder().widths() == bf.base.encoder().widths()
        && enc_a.iter().zip(&enc_b).all(|(x, y)| bits_equal(x, y));
    let decoder_layers_identical = if lf.decoder().widths() == bf.base.decoder().widths() {
        lf.decoder()
            .layers()
            .iter()
            .zip(bf.base.decoder().layers())
            .map(|(p, q)| {
                p.activation == q.activation
                    && bits_equal(p.weights.as_slice(), q.weights.as_slice())
                    && bits_equal(&p.bias, &q.bias)
            })
            .collect()
    } else {
        vec![false; bf.base.decoder().num_layers()]
    };
    let (s, t) = (lf.standardizer(), bf.base.standardizer());
    FreezeReport {
        encoder_identical,
        decoder_layers_identical,
        standardizer_identical: bits_equal(&s.mean, &t.mean) && bits_equal(&s.scale, &t.scale),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ndcore::{Activation, Layer, Mlp};
    use crate::vae::Standardizer;

    #[test]
    fn regressor_cases() {
        let id = LatentAutoRegressor::identity(2, 0.0);
        assert_eq!(id.regress(&[0.3, -2.0]).unwrap(), vec![0.3, -2.0]);
        let c = LatentAutoRegressor::new(vec![0.0, 0.0], vec![1.5, -0.5], 0.0).unwrap();
        assert_eq!(c.regress(&[9.0, 7.0]).unwrap(), vec![1.5, -0.5]);
        let r = LatentAutoRegressor::new(vec![2.0, -1.0], vec![0.5, 0.5], 0.0).unwrap();
        assert_eq!(r.regress(&[1.0, 1.0]).unwrap(), vec![2.5, -0.5]);
        assert!(r.regress(&[1.0]).is_err());
        assert!(LatentAutoRegressor::new(vec![1.0], vec![0.0], -1.0).is_err());
    }

    #[test]
    fn hf_latent_cases() {
        let r = LatentAutoRegressor::new(vec![2.0, -1.0], vec![0.5, 0.5], 0.0).unwrap();
        let eta = [3.0, -4.0];
        assert_eq!(
            r.sample_hf_latent(&[1.0, 1.0], &eta).unwrap(),
            r.regress(&[1.0, 1.0]).unwrap()
        );
        assert_eq!(
            r.sample_hf_latent(&[1.0, 1.0], &[0.0, 0.0]).unwrap(),
            vec![2.5, -0.5]
        );
        let g = LatentAutoRegressor::identity(2, 1.0);
        assert_eq!(g.sample_hf_latent(&[0.0, 0.0], &eta).unwrap(), eta.to_vec());
    }

    fn one_layer(w: f64, b: f64) -> Mlp<f64> {
        Mlp::new(vec![Layer::new(
            Matrix::from_vec(1, 1, vec![w]).unwrap(),
            vec![b],
            Activation::Identity,
        )
        .unwrap()])
        .unwrap()
    }

    #[test]
    fn hf_loss_hand_evaluated() {
        // encoder: mu = 0.4 x, log_var = 0.2 x - 0.1 ; decoder: 1.5 z + 0.2
        let enc = Mlp::new(vec![Layer::new(
            Matrix::from_vec(2, 1, vec![0.4, 0.2]).unwrap(),
            vec![0.0, -0.1],
            Activation::Identity,
        )
        .unwrap()])
        .unwrap();
        let base = VaeModel::new(enc, one_layer(1.5, 0.2), 1.0, Standardizer::identity(1)).unwrap();
        let reg = LatentAutoRegressor::new(vec![0.7], vec![-0.3], 0.5).unwrap();
        let m = BfVaeModel::new(base, reg).unwrap();
        let (xl, xh) = (1.2, 0.9);
        let (e, n) = (0.35, -1.1);
        let mu = 0.4 * xl;
        let lv = 0.2 * xl - 0.1;
        let zl = (lv / 2.0f64).exp() * e + mu;
        let zh = 0.5 * n + 0.7 * zl - 0.3;
        let want = (1.5 * zh + 0.2 - xh) * (1.5 * zh + 0.2 - xh);
        let one = |v| Matrix::from_vec(1, 1, vec![v]).unwrap();
        let got = hf_loss(&m, &one(xl), &one(xh), &one(e), &one(n)).unwrap();
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn hf_loss_of_zero_decoder_is_quadratic_in_targets() {
        let enc = Mlp::zeros(&[3, 4, 2], Activation::Gelu).unwrap();
        let dec = Mlp::zeros(&[1, 4, 3], Activation::Gelu).unwrap();
        let base = VaeModel::new(enc, dec, 1.0, Standardizer::identity(3)).unwrap();
        let m = BfVaeModel::from_lf(&base, 0.0).unwrap();
        let xl = Matrix::from_rows(&[[0.1, 0.2, 0.3], [1.0, -1.0, 0.5]]).unwrap();
        let xh = Matrix::from_rows(&[[0.4, -0.2, 1.0], [2.0, 0.1, -0.7]]).unwrap();
        let noise = Matrix::from_rows(&[[0.3], [-0.8]]).unwrap();
        let l1: f64 = hf_loss(&m, &xl, &xh, &noise, &noise).unwrap();
        let l3: f64 = hf_loss(&m, &xl, &xh.map(|v| 3.0 * v), &noise, &noise).unwrap();
        assert!((l3 - 9.0 * l1).abs() < 1e-12);
        assert!(matches!(
            hf_loss(&m, &xl, &xh.head(1), &noise, &noise),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn only_last_decoder_layer_is_trainable() {
        let base = VaeModel::<f64>::init(
            5,
            &VaeArch {
                hidden: vec![4, 3],
                latent_dim: 2,
                activation: Activation::Gelu,
            },
            1.0,
            0,
        )
        .unwrap();
        let m = BfVaeModel::from_lf(&base, 0.0).unwrap();
        assert_eq!(m.trainable_mask(), &[false, false, true]);
        assert!(freeze_report(&base, &m).holds());
    }

    #[test]
    fn pair_alignment_is_enforced() {
        let lf = Matrix::<f64>::zeros(3, 2);
        assert!(BiFiDataset::new(lf.clone(), Matrix::zeros(2, 2)).is_err());
        assert!(BiFiDataset::new(lf.clone(), Matrix::zeros(3, 3)).is_err());
        let ds = BiFiDataset::new(lf, Matrix::zeros(3, 2)).unwrap();
        assert_eq!(ds.subset(&[0, 2]).len(), 2);
    }
}
