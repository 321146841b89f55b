//! Kernel inception distance.
//!
//! KID is the unbiased estimator of the squared maximum mean discrepancy
//! between two sample sets,
//!
//! ```text
//! KID(X, Y) = 1/(m(m−1)) Σ_{i≠j} k(xᵢ, xⱼ) − 2/(mn) Σᵢ Σⱼ k(xᵢ, yⱼ) + 1/(n(n−1)) Σ_{i≠j} k(yᵢ, yⱼ)
//! ```
//!
//! under the rational quadratic kernel mixture
//! `k(x, y) = Σ_ℓ (1 + ‖x − y‖² / (2ℓ))^(−ℓ)`. Kernel sums are accumulated in
//! `f64` with pairwise summation, first within each row and then across rows.

use rayon::prelude::*;

use crate::error::{check_len, Error, Result};
use crate::ndcore::Matrix;
use crate::rng::{derive_seed, Stream};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    length_scales: Vec<f64>,
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self {
            length_scales: vec![0.2, 0.5, 1.0, 2.0, 5.0],
        }
    }
}

impl KernelSpec {
    pub fn new(length_scales: Vec<f64>) -> Result<Self> {
        if length_scales.is_empty() {
            return Err(Error::InvalidConfig("no kernel length scales".into()));
        }
        if length_scales.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidConfig(
                "kernel length scales must be positive".into(),
            ));
        }
        Ok(Self { length_scales })
    }

    pub fn length_scales(&self) -> &[f64] {
        &self.length_scales
    }

    /// Kernel value as a function of the squared distance.
    #[inline]
    pub fn eval_sq(&self, sq: f64) -> f64 {
        self.length_scales
            .iter()
            .map(|&l| (1.0 + sq / (2.0 * l)).powf(-l))
            .sum()
    }
}

#[inline]
fn sq_dist<T: Scalar>(x: &[T], y: &[T]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| {
            let d = a.to_f64_lossless() - b.to_f64_lossless();
            d * d
        })
        .sum()
}

pub fn rq_kernel<T: Scalar>(spec: &KernelSpec, x: &[T], y: &[T]) -> Result<f64> {
    check_len("kernel arguments", x.len(), y.len())?;
    Ok(spec.eval_sq(sq_dist(x, y)))
}

/// Recursive pairwise summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        xs.iter().sum()
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// Σ_{i≠j} k(xᵢ, xⱼ).
fn self_sum<T: Scalar>(spec: &KernelSpec, x: &Matrix<T>) -> f64 {
    let mut row = Vec::with_capacity(x.rows());
    let rows: Vec<f64> = x
        .iter_rows()
        .enumerate()
        .map(|(i, xi)| {
            row.clear();
            row.extend(
                x.iter_rows()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, xj)| spec.eval_sq(sq_dist(xi, xj))),
            );
            pairwise_sum(&row)
        })
        .collect();
    pairwise_sum(&rows)
}

/// Σᵢ Σⱼ k(xᵢ, yⱼ).
fn cross_sum<T: Scalar>(spec: &KernelSpec, x: &Matrix<T>, y: &Matrix<T>) -> f64 {
    let mut row = Vec::with_capacity(y.rows());
    let rows: Vec<f64> = x
        .iter_rows()
        .map(|xi| {
            row.clear();
            row.extend(y.iter_rows().map(|yj| spec.eval_sq(sq_dist(xi, yj))));
            pairwise_sum(&row)
        })
        .collect();
    pairwise_sum(&rows)
}

fn check_kid_inputs<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>) -> Result<()> {
    if x.rows() < 2 || y.rows() < 2 {
        return Err(Error::InvalidConfig(format!(
            "KID needs at least 2 rows per side, got {} and {}",
            x.rows(),
            y.rows()
        )));
    }
    check_len("KID sample dimension", x.cols(), y.cols())
}

/// Unbiased KID between the rows of `x` (m × D) and `y` (n × D); m and n may differ.
pub fn kid<T: Scalar>(spec: &KernelSpec, x: &Matrix<T>, y: &Matrix<T>) -> Result<f64> {
    check_kid_inputs(x, y)?;
    let (m, n) = (x.rows() as f64, y.rows() as f64);
    let xx = self_sum(spec, x) / (m * (m - 1.0));
    let yy = self_sum(spec, y) / (n * (n - 1.0));
    let xy = cross_sum(spec, x, y) / (m * n);
    Ok(xx - 2.0 * xy + yy)
}

/// KID against a fixed reference set whose self term is computed once.
pub struct KidReference<'a, T> {
    spec: &'a KernelSpec,
    reference: &'a Matrix<T>,
    self_term: f64,
}

impl<'a, T: Scalar> KidReference<'a, T> {
    pub fn new(spec: &'a KernelSpec, reference: &'a Matrix<T>) -> Result<Self> {
        if reference.rows() < 2 {
            return Err(Error::InvalidConfig(
                "KID reference needs at least 2 rows".into(),
            ));
        }
        let m = reference.rows() as f64;
        Ok(Self {
            spec,
            reference,
            self_term: self_sum(spec, reference) / (m * (m - 1.0)),
        })
    }

    pub fn kid(&self, y: &Matrix<T>) -> Result<f64> {
        check_kid_inputs(self.reference, y)?;
        let (m, n) = (self.reference.rows() as f64, y.rows() as f64);
        let yy = self_sum(self.spec, y) / (n * (n - 1.0));
        let xy = cross_sum(self.spec, self.reference, y) / (m * n);
        Ok(self.self_term - 2.0 * xy + yy)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KidReport {
    pub per_trial: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation across trials.
    pub std: f64,
    /// Rows per side per trial.
    pub samples: usize,
    pub trials: usize,
}

impl KidReport {
    pub fn from_trials(per_trial: Vec<f64>, samples: usize) -> Self {
        let k = per_trial.len() as f64;
        let mean = per_trial.iter().sum::<f64>() / k;
        let var = per_trial.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / k;
        Self {
            trials: per_trial.len(),
            per_trial,
            mean,
            std: var.sqrt(),
            samples,
        }
    }

    /// `trial,kid` rows followed by `mean` and `std` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("trial,kid\n");
        for (k, v) in self.per_trial.iter().enumerate() {
            s.push_str(&format!("{k},{v:e}\n"));
        }
        s.push_str(&format!("mean,{:e}\nstd,{:e}\n", self.mean, self.std));
        s
    }
}

/// Multi-trial KID evaluation: each trial draws `samples` fresh rows from a
/// generator seeded by the trial's derived seed and compares them with the
/// first `samples` rows of the test set.
#[derive(Debug, Clone)]
pub struct KidProtocol {
    pub kernel: KernelSpec,
    pub samples: usize,
    pub trials: usize,
    pub seed: u64,
    /// Run trials on the rayon pool. The report is identical either way.
    pub parallel: bool,
}

impl KidProtocol {
    pub fn trial_seed(&self, trial: usize) -> u64 {
        derive_seed(self.seed, Stream::KidTrial, trial as u64)
    }

    pub fn run<T, G>(&self, test: &Matrix<T>, generator: G) -> Result<KidReport>
    where
        T: Scalar,
        G: Fn(usize, u64) -> Result<Matrix<T>> + Sync,
    {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("at least one KID trial is required".into()));
        }
        if test.rows() < self.samples {
            return Err(Error::InvalidConfig(format!(
                "test set has {} rows, {} required",
                test.rows(),
                self.samples
            )));
        }
        let reference = test.head(self.samples);
        let kr = KidReference::new(&self.kernel, &reference)?;
        let one = |k: usize| -> Result<f64> {
            let gen = generator(k, self.trial_seed(k))?;
            check_len("generated sample dimension", test.cols(), gen.cols())?;
            check_len("generated sample count", self.samples, gen.rows())?;
            kr.kid(&gen)
        };
        let per_trial = if self.parallel {
            (0..self.trials)
                .into_par_iter()
                .map(one)
                .collect::<Result<Vec<_>>>()?
        } else {
            (0..self.trials).map(one).collect::<Result<Vec<_>>>()?
        };
        Ok(KidReport::from_trials(per_trial, self.samples))
    }
}
