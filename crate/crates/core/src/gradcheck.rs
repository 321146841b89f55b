//! Central finite-difference checks of the analytic gradients.
//!
//! Each check builds a small random problem from a seed, perturbs every
//! trainable parameter by `±h` and compares `(f(θ+h) − f(θ−h)) / 2h` with the
//! backpropagated value. Errors are measured as
//! `|analytic − numeric| / max(|analytic|, |numeric|, REL_FLOOR)`.

use rand::Rng;

use crate::bifi::{hf_loss, hf_loss_grad, BfGrads, BfVaeModel, LatentAutoRegressor};
use crate::error::Result;
use crate::ndcore::{dot, Activation, Matrix, Mlp};
use crate::rng::{self, Stream};
use crate::vae::{lf_loss, lf_loss_grad, Standardizer, VaeGrads, VaeModel};

/// Finite-difference step.
pub const STEP: f64 = 1e-5;
/// Magnitude below which gradients are compared absolutely.
pub const REL_FLOOR: f64 = 1e-4;

pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(REL_FLOOR)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GradCheck {
    pub max_rel_err: f64,
    pub checked: usize,
}

impl GradCheck {
    fn record(&mut self, analytic: f64, numeric: f64) {
        self.max_rel_err = self.max_rel_err.max(rel_err(analytic, numeric));
        self.checked += 1;
    }
}

/// Random dimensions of one small check problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallConfig {
    pub ambient: usize,
    pub hidden: Vec<usize>,
    pub latent: usize,
    pub batch: usize,
    pub activation: Activation,
}

impl SmallConfig {
    /// Widths in `1..=8`, latent dimension in `1..=3`, batch in `1..=4`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let depth = rng.random_range(0..=2);
        Self {
            ambient: rng.random_range(1..=8),
            hidden: (0..depth).map(|_| rng.random_range(1..=8)).collect(),
            latent: rng.random_range(1..=3),
            batch: rng.random_range(1..=4),
            activation: [Activation::Gelu, Activation::Relu, Activation::Identity]
                [rng.random_range(0..3)],
        }
    }

    pub fn from_seed(seed: u64) -> Self {
        Self::random(&mut rng::stream(seed, Stream::Init, 1))
    }
}

fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix<f64> {
    Matrix::from_vec(rows, cols, rng::normal_vec(rng, rows * cols)).expect("finite")
}

fn random_mlp<R: Rng + ?Sized>(rng: &mut R, widths: &[usize], act: Activation) -> Mlp<f64> {
    let mut mlp = Mlp::glorot(widths, act, rng).expect("valid widths");
    // non-zero biases so every parameter gets exercised
    for l in mlp.layers_mut() {
        for b in &mut l.bias {
            *b = 0.3 * rng::normal::<f64, _>(rng);
        }
    }
    mlp
}

/// Checks [`Mlp::backward`] on `L(θ, x) = ⟨g, f_θ(x)⟩` for random `x`, `g`,
/// covering every weight, bias and input component.
pub fn check_mlp(seed: u64) -> Result<GradCheck> {
    let cfg = SmallConfig::from_seed(seed);
    let mut rng = rng::stream(seed, Stream::Noise, 7);
    let mut widths = vec![cfg.ambient];
    widths.extend(&cfg.hidden);
    widths.push(rng.random_range(1..=8));
    let mlp = random_mlp(&mut rng, &widths, cfg.activation);
    let x = rng::normal_vec(&mut rng, cfg.ambient);
    let g = rng::normal_vec(&mut rng, mlp.out_dim());

    let (_, tape) = mlp.forward(&x)?;
    let (grads, dx) = mlp.backward(&tape, &g)?;
    let objective = |m: &Mlp<f64>, x: &[f64]| -> Result<f64> { Ok(dot(&m.predict(x)?, &g)) };

    let mut out = GradCheck::default();
    let analytic: Vec<f64> = grads.slices().concat();
    let n = analytic.len();
    for k in 0..n {
        let eval = |delta: f64| -> Result<f64> {
            let mut m = mlp.clone();
            *flat_param(&mut m.param_slices_mut(), k) += delta;
            objective(&m, &x)
        };
        out.record(analytic[k], (eval(STEP)? - eval(-STEP)?) / (2.0 * STEP));
    }
    for (j, &a) in dx.iter().enumerate() {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += STEP;
        xm[j] -= STEP;
        out.record(a, (objective(&mlp, &xp)? - objective(&mlp, &xm)?) / (2.0 * STEP));
    }
    Ok(out)
}

fn flat_param<'a>(slices: &'a mut [&mut [f64]], mut k: usize) -> &'a mut f64 {
    for s in slices.iter_mut() {
        if k < s.len() {
            return &mut s[k];
        }
        k -= s.len();
    }
    panic!("parameter index out of range")
}

fn random_vae<R: Rng + ?Sized>(rng: &mut R, cfg: &SmallConfig) -> Result<VaeModel<f64>> {
    let mut enc = vec![cfg.ambient];
    enc.extend(&cfg.hidden);
    enc.push(2 * cfg.latent);
    let mut dec = vec![cfg.latent];
    dec.extend(cfg.hidden.iter().rev());
    dec.push(cfg.ambient);
    let beta = 0.1 + rng.random::<f64>();
    VaeModel::new(
        random_mlp(rng, &enc, cfg.activation),
        random_mlp(rng, &dec, cfg.activation),
        beta,
        Standardizer::identity(cfg.ambient),
    )
}

/// Checks [`lf_loss_grad`] against [`lf_loss`] with fixed noise draws.
pub fn check_lf_loss(seed: u64) -> Result<GradCheck> {
    let cfg = SmallConfig::from_seed(seed);
    let mut rng = rng::stream(seed, Stream::Noise, 8);
    let model = random_vae(&mut rng, &cfg)?;
    let xs = random_matrix(&mut rng, cfg.batch, cfg.ambient);
    let eps = random_matrix(&mut rng, cfg.batch, cfg.latent);

    let mut grads = VaeGrads::zeros_like(&model);
    lf_loss_grad(&model, &xs, &eps, &mut grads)?;
    let mut out = GradCheck::default();
    for (which, analytic) in [(0, grads.encoder.slices().concat()), (1, grads.decoder.slices().concat())] {
        for (k, &a) in analytic.iter().enumerate() {
            let eval = |delta: f64| -> Result<f64> {
                let mut enc = model.encoder().clone();
                let mut dec = model.decoder().clone();
                let net = if which == 0 { &mut enc } else { &mut dec };
                *flat_param(&mut net.param_slices_mut(), k) += delta;
                let m = VaeModel::new(enc, dec, model.beta(), model.standardizer().clone())?;
                lf_loss(&m, &xs, &eps)
            };
            out.record(a, (eval(STEP)? - eval(-STEP)?) / (2.0 * STEP));
        }
    }
    Ok(out)
}

/// Checks [`hf_loss_grad`] for `a`, `b` and the decoder's last layer, and that
/// no gradient reaches the frozen decoder layers.
pub fn check_hf_loss(seed: u64) -> Result<GradCheck> {
    let cfg = SmallConfig::from_seed(seed);
    let mut rng = rng::stream(seed, Stream::Noise, 9);
    let base = random_vae(&mut rng, &cfg)?;
    let d = cfg.latent;
    let a: Vec<f64> = (0..d).map(|_| 1.0 + 0.3 * rng::normal::<f64, _>(&mut rng)).collect();
    let b = rng::normal_vec(&mut rng, d);
    let gamma = 0.5 * rng.random::<f64>();
    let model = BfVaeModel::new(base.clone(), LatentAutoRegressor::new(a, b, gamma)?)?;
    let xl = random_matrix(&mut rng, cfg.batch, cfg.ambient);
    let xh = random_matrix(&mut rng, cfg.batch, cfg.ambient);
    let eps = random_matrix(&mut rng, cfg.batch, d);
    let eta = random_matrix(&mut rng, cfg.batch, d);

    let mut grads = BfGrads::zeros_like(&model);
    hf_loss_grad(&model, &xl, &xh, &eps, &eta, &mut grads)?;
    let last = base.decoder().num_layers() - 1;
    let frozen_clean = grads.decoder.weights[..last]
        .iter()
        .all(|w| w.as_slice().iter().all(|&v| v == 0.0))
        && grads.decoder.bias[..last].iter().all(|b| b.iter().all(|&v| v == 0.0));
    if !frozen_clean {
        return Ok(GradCheck {
            max_rel_err: f64::INFINITY,
            checked: 0,
        });
    }

    let analytic: Vec<f64> = [
        grads.a.as_slice(),
        grads.b.as_slice(),
        grads.last_weights().as_slice(),
        grads.last_bias(),
    ]
    .concat();
    let mut out = GradCheck::default();
    for (k, &g) in analytic.iter().enumerate() {
        let eval = |delta: f64| -> Result<f64> {
            let mut reg = model.regressor().clone();
            let mut dec = base.decoder().clone();
            {
                let layer = &mut dec.layers_mut()[last];
                let mut p: [&mut [f64]; 4] = [
                    &mut reg.a,
                    &mut reg.b,
                    layer.weights.as_mut_slice(),
                    &mut layer.bias,
                ];
                *flat_param(&mut p, k) += delta;
            }
            let m = VaeModel::new(
                base.encoder().clone(),
                dec,
                base.beta(),
                base.standardizer().clone(),
            )?;
            hf_loss(&BfVaeModel::new(m, reg)?, &xl, &xh, &eps, &eta)
        };
        out.record(g, (eval(STEP)? - eval(-STEP)?) / (2.0 * STEP));
    }
    Ok(out)
}
