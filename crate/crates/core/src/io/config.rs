//! Flat UTF-8 `key = value` run configuration, one pair per line, `#` starts
//! a comment. A `problem` line selects the preset every other key overrides,
//! regardless of where it appears in the file.
//!
//! ```text
//! problem = burgers
//! hidden = 256, 128, 64, 16
//! epochs_lf = 200
//! n_hf = 10, 50
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::bifi::BfTrainConfig;
use crate::datagen::Problem;
use crate::error::{Error, Result};
use crate::ndcore::{Activation, AdamConfig};
use crate::vae::{TrainConfig, VaeArch};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: Problem,
    pub hidden: Vec<usize>,
    pub latent_dim: usize,
    pub activation: Activation,
    pub beta: f64,
    pub gamma: f64,
    pub lr: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub batch_size: usize,
    pub epochs_lf: usize,
    pub epochs_bf: usize,
    /// Epochs of the HF-only baseline; defaults to `epochs_lf`.
    pub epochs_hf: usize,
    pub n_lf: usize,
    pub n_hf: Vec<usize>,
    /// Samples per side in each KID trial.
    pub test_size: usize,
    pub trials: usize,
    pub seed: u64,
    pub threads: usize,
    pub lf_data: Option<PathBuf>,
    pub pairs_data: Option<PathBuf>,
    pub test_data: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    /// 128-point beam: hidden widths 64, 16; β = 0.04; 4,000 LF samples.
    pub fn beam() -> Self {
        Self {
            problem: Problem::Beam,
            hidden: vec![64, 16],
            beta: 0.04,
            n_lf: 4000,
            ..Self::burgers()
        }
    }

    /// 254-point Burgers: hidden widths 256, 128, 64, 16; β = 5e-4; 400 LF samples.
    pub fn burgers() -> Self {
        Self {
            problem: Problem::Burgers,
            hidden: vec![256, 128, 64, 16],
            latent_dim: 4,
            activation: Activation::Gelu,
            beta: 5e-4,
            gamma: 0.0,
            lr: 1e-3,
            adam_beta1: 0.9,
            adam_beta2: 0.99,
            adam_eps: 1e-8,
            batch_size: 64,
            epochs_lf: 2000,
            epochs_bf: 1000,
            epochs_hf: 2000,
            n_lf: 400,
            n_hf: vec![10, 25, 50, 100, 200, 400, 600, 800],
            test_size: 1000,
            trials: 10,
            seed: 0,
            threads: 1,
            lf_data: None,
            pairs_data: None,
            test_data: None,
            out_dir: None,
        }
    }

    pub fn preset(problem: Problem) -> Self {
        match problem {
            Problem::Beam => Self::beam(),
            Problem::Burgers => Self::burgers(),
        }
    }

    pub fn arch(&self) -> VaeArch {
        VaeArch {
            hidden: self.hidden.clone(),
            latent_dim: self.latent_dim,
            activation: self.activation,
        }
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            lr: self.lr,
            beta1: self.adam_beta1,
            beta2: self.adam_beta2,
            eps: self.adam_eps,
        }
    }

    pub fn lf_train(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs_lf,
            batch_size: self.batch_size,
            adam: self.adam(),
            beta: self.beta,
        }
    }

    pub fn hf_train(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs_hf,
            ..self.lf_train()
        }
    }

    pub fn bf_train(&self) -> BfTrainConfig {
        BfTrainConfig {
            epochs: self.epochs_bf,
            batch_size: self.batch_size,
            adam: self.adam(),
            gamma: self.gamma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.latent_dim == 0 {
            return bad("latent_dim must be at least 1");
        }
        if self.hidden.contains(&0) {
            return bad("hidden widths must be positive");
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad("beta must be positive");
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad("gamma must be non-negative");
        }
        if !(self.lr > 0.0) || !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return bad("Adam settings out of range");
        }
        let counts = [
            ("batch_size", self.batch_size),
            ("epochs_lf", self.epochs_lf),
            ("epochs_bf", self.epochs_bf),
            ("epochs_hf", self.epochs_hf),
            ("n_lf", self.n_lf),
            ("test_size", self.test_size),
            ("trials", self.trials),
            ("threads", self.threads),
        ];
        if let Some((k, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidConfig(format!("{k} must be positive")));
        }
        if self.n_hf.is_empty() || self.n_hf.contains(&0) {
            return bad("n_hf must list positive sample counts");
        }
        if self.test_size < 2 {
            return bad("test_size must be at least 2");
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with(text, &[])
    }

    /// Parses `text`, then applies `key=value` overrides, which replace any
    /// value the text sets for the same key.
    pub fn parse_with(text: &str, overrides: &[String]) -> Result<Self> {
        let mut pairs = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected `key = value`", ln + 1))
            })?;
            let key = k.trim().to_ascii_lowercase();
            if pairs.insert(key.clone(), (ln + 1, v.trim().to_string())).is_some() {
                return Err(Error::InvalidConfig(format!(
                    "line {}: duplicate key `{key}`",
                    ln + 1
                )));
            }
        }
        for o in overrides {
            let (k, v) = o.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("override `{o}`: expected `key=value`"))
            })?;
            pairs.insert(k.trim().to_ascii_lowercase(), (0, v.trim().to_string()));
        }
        let mut cfg = match pairs.remove("problem") {
            Some((ln, v)) => Self::preset(v.parse().map_err(|e| at(ln, e))?),
            None => Self::burgers(),
        };
        let epochs_hf_set = pairs.contains_key("epochs_hf");
        for (key, (ln, v)) in pairs {
            cfg.set(&key, &v).map_err(|e| at(ln, e))?;
        }
        if !epochs_hf_set {
            cfg.epochs_hf = cfg.epochs_lf;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn set(&mut self, key: &str, v: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String>
        where
            T::Err: std::fmt::Display,
        {
            v.parse().map_err(|e| format!("`{v}`: {e}"))
        }
        fn list(v: &str) -> std::result::Result<Vec<usize>, String> {
            v.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(num)
                .collect()
        }
        let path = |v: &str| Some(PathBuf::from(v));
        match key {
            "hidden" => self.hidden = list(v)?,
            "latent_dim" => self.latent_dim = num(v)?,
            "activation" => self.activation = v.parse()?,
            "beta" => self.beta = num(v)?,
            "gamma" => self.gamma = num(v)?,
            "lr" => self.lr = num(v)?,
            "adam_beta1" => self.adam_beta1 = num(v)?,
            "adam_beta2" => self.adam_beta2 = num(v)?,
            "adam_eps" => self.adam_eps = num(v)?,
            "batch_size" => self.batch_size = num(v)?,
            "epochs_lf" => self.epochs_lf = num(v)?,
            "epochs_bf" => self.epochs_bf = num(v)?,
            "epochs_hf" => self.epochs_hf = num(v)?,
            "n_lf" => self.n_lf = num(v)?,
            "n_hf" => self.n_hf = list(v)?,
            "test_size" | "t" => self.test_size = num(v)?,
            "trials" => self.trials = num(v)?,
            "seed" => self.seed = num(v)?,
            "threads" => self.threads = num(v)?,
            "lf_data" => self.lf_data = path(v),
            "pairs_data" => self.pairs_data = path(v),
            "test_data" => self.test_data = path(v),
            "out_dir" => self.out_dir = path(v),
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Serializes every key; `parse(to_text())` reproduces the config.
    pub fn to_text(&self) -> String {
        let join = |v: &[usize]| {
            v.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut s = format!(
            "problem = {}\nhidden = {}\nlatent_dim = {}\nactivation = {}\nbeta = {:e}\ngamma = {:e}\n\
             lr = {:e}\nadam_beta1 = {}\nadam_beta2 = {}\nadam_eps = {:e}\nbatch_size = {}\n\
             epochs_lf = {}\nepochs_bf = {}\nepochs_hf = {}\nn_lf = {}\nn_hf = {}\ntest_size = {}\n\
             trials = {}\nseed = {}\nthreads = {}\n",
            self.problem.name(),
            join(&self.hidden),
            self.latent_dim,
            self.activation.name(),
            self.beta,
            self.gamma,
            self.lr,
            self.adam_beta1,
            self.adam_beta2,
            self.adam_eps,
            self.batch_size,
            self.epochs_lf,
            self.epochs_bf,
            self.epochs_hf,
            self.n_lf,
            join(&self.n_hf),
            self.test_size,
            self.trials,
            self.seed,
            self.threads,
        );
        for (k, p) in [
            ("lf_data", &self.lf_data),
            ("pairs_data", &self.pairs_data),
            ("test_data", &self.test_data),
            ("out_dir", &self.out_dir),
        ] {
            if let Some(p) = p {
                s.push_str(&format!("{k} = {}\n", p.display()));
            }
        }
        s
    }
}

fn at(line: usize, msg: String) -> Error {
    if line == 0 {
        return Error::InvalidConfig(format!("override: {msg}"));
    }
    Error::InvalidConfig(format!("line {line}: {msg}"))
}
