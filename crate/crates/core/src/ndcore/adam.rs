use crate::error::{check_len, Error, Result};
use crate::scalar::all_finite;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.99,
            eps: 1e-8,
        }
    }
}

/// Adam moments for a fixed list of parameter tensors, with bias correction.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T> {
    pub config: AdamConfig,
    m: Vec<Vec<T>>,
    v: Vec<Vec<T>>,
    t: u64,
}

impl<T: Scalar> AdamState<T> {
    /// One accumulator per tensor, sized by `lens`.
    pub fn new(config: AdamConfig, lens: &[usize]) -> Self {
        Self {
            config,
            m: lens.iter().map(|&n| vec![T::zero(); n]).collect(),
            v: lens.iter().map(|&n| vec![T::zero(); n]).collect(),
            t: 0,
        }
    }

    pub fn for_slices(config: AdamConfig, params: &[&[T]]) -> Self {
        let lens: Vec<usize> = params.iter().map(|p| p.len()).collect();
        Self::new(config, &lens)
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// Applies one update. Nothing is modified if the shapes disagree or any
    /// gradient is non-finite.
    pub fn step(&mut self, params: &mut [&mut [T]], grads: &[&[T]]) -> Result<()> {
        check_len("Adam tensor count", self.m.len(), params.len())?;
        check_len("Adam gradient count", self.m.len(), grads.len())?;
        for ((m, p), g) in self.m.iter().zip(params.iter()).zip(grads) {
            check_len("Adam parameter tensor", m.len(), p.len())?;
            check_len("Adam gradient tensor", m.len(), g.len())?;
            if !all_finite(g) {
                return Err(Error::non_finite("Adam gradient"));
            }
        }
        self.t += 1;
        let AdamConfig {
            lr,
            beta1,
            beta2,
            eps,
        } = self.config;
        let t = self.t as f64;
        let c1 = T::of(1.0 - beta1.powf(t));
        let c2 = T::of(1.0 - beta2.powf(t));
        let (b1, b2) = (T::of(beta1), T::of(beta2));
        let (ob1, ob2) = (T::of(1.0 - beta1), T::of(1.0 - beta2));
        let (lr, eps) = (T::of(lr), T::of(eps));
        for (k, p) in params.iter_mut().enumerate() {
            let (m, v, g) = (&mut self.m[k], &mut self.v[k], grads[k]);
            for i in 0..p.len() {
                let gi = g[i];
                m[i] = b1 * m[i] + ob1 * gi;
                v[i] = b2 * v[i] + ob2 * gi * gi;
                let mh = m[i] / c1;
                let vh = v[i] / c2;
                p[i] = p[i] - lr * mh / (vh.sqrt() + eps);
            }
        }
        for p in params.iter() {
            if !all_finite(p) {
                return Err(Error::non_finite("parameters after Adam step"));
            }
        }
        Ok(())
    }
}
