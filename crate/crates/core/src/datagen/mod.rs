//! Bundled bi-fidelity data generators.
//!
//! - Composite cantilever beam: closed-form Euler–Bernoulli LF model only (HF
//!   beam data has to be ingested from files).
//! - Viscous Burgers: the same semi-implicit solver on a coarse (LF) and a fine
//!   (HF) grid; LF fields are linearly resampled onto the HF interior nodes.
//!
//! Sample `i` of a dataset draws its inputs from a stream derived from
//! `(seed, i)`, so rows are independent of generation order and both
//! fidelities of a pair share the same input draw.

pub mod beam;
pub mod burgers;
pub mod resample;
pub mod tridiag;

use rayon::prelude::*;

pub use beam::{beam_lf_displacement, sample_beam_inputs, transformed_inertia, BeamConfig};
pub use burgers::{
    burgers_initial, burgers_solve, sample_burgers_inputs, BurgersConfig, BurgersInputs, Fidelity,
    Grid,
};
pub use resample::{resample_linear, uniform_nodes};
pub use tridiag::{solve_tridiagonal, Tridiagonal};

use crate::error::{Error, Result};
use crate::io::dataset::{DataKind, QoiDataset};
use crate::ndcore::Matrix;
use crate::rng::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Beam,
    Burgers,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Beam => "beam",
            Problem::Burgers => "burgers",
        }
    }
}

impl std::str::FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "beam" => Ok(Problem::Beam),
            "burgers" => Ok(Problem::Burgers),
            other => Err(format!("unknown problem `{other}` (expected beam or burgers)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemConfig {
    Beam(BeamConfig),
    Burgers(BurgersConfig),
}

impl ProblemConfig {
    pub fn default_for(problem: Problem) -> Self {
        match problem {
            Problem::Beam => ProblemConfig::Beam(BeamConfig::default()),
            Problem::Burgers => ProblemConfig::Burgers(BurgersConfig::default()),
        }
    }

    pub fn problem(&self) -> Problem {
        match self {
            ProblemConfig::Beam(_) => Problem::Beam,
            ProblemConfig::Burgers(_) => Problem::Burgers,
        }
    }

    pub fn qoi_dim(&self) -> usize {
        match self {
            ProblemConfig::Beam(c) => c.points,
            ProblemConfig::Burgers(c) => c.qoi_dim(),
        }
    }

    /// Input vector of sample `index`: `[ξ₁..ξ₄]` (beam) or `[ξ₁..ξ₅, ν]` (Burgers).
    pub fn sample_inputs(&self, seed: u64, index: u64) -> Vec<f64> {
        let mut rng = rng::stream(seed, Stream::DataGen, index);
        match self {
            ProblemConfig::Beam(c) => sample_beam_inputs(c, &mut rng).to_vec(),
            ProblemConfig::Burgers(c) => sample_burgers_inputs(c, &mut rng).to_vec(),
        }
    }

    /// Quantity of interest of the given fidelity for a logged input vector.
    /// Burgers LF fields are returned on the HF interior nodes.
    pub fn qoi(&self, fidelity: Fidelity, inputs: &[f64]) -> Result<Vec<f64>> {
        match (self, fidelity) {
            (ProblemConfig::Beam(c), Fidelity::Lf) => {
                let xi: [f64; 4] = inputs
                    .try_into()
                    .map_err(|_| Error::shape("beam input vector", 4, inputs.len()))?;
                beam_lf_displacement(c, &xi)
            }
            (ProblemConfig::Beam(_), Fidelity::Hf) => Err(Error::Unsupported(
                "no HF beam solver is bundled; ingest HF beam data from a file".into(),
            )),
            (ProblemConfig::Burgers(c), fid) => {
                let inp = BurgersInputs::from_slice(c, inputs)?;
                let u = burgers_solve::<f64>(c, fid, &inp)?;
                match fid {
                    Fidelity::Lf => burgers::lf_to_hf_nodes(c, &u),
                    Fidelity::Hf => Ok(u),
                }
            }
        }
    }
}

/// Generates `count` rows of the requested kind from `seed`.
pub fn gen_dataset(
    cfg: &ProblemConfig,
    kind: DataKind,
    count: usize,
    seed: u64,
    parallel: bool,
) -> Result<QoiDataset> {
    if cfg.problem() == Problem::Beam && kind != DataKind::LfOnly {
        return Err(Error::Unsupported(format!(
            "{} beam data cannot be generated (no HF beam solver)",
            kind.name()
        )));
    }
    let dim = cfg.qoi_dim();
    let one = |i: usize| -> Result<(Vec<f64>, Vec<f64>)> {
        let inputs = cfg.sample_inputs(seed, i as u64);
        let row = match kind {
            DataKind::LfOnly => cfg.qoi(Fidelity::Lf, &inputs)?,
            DataKind::HfOnly => cfg.qoi(Fidelity::Hf, &inputs)?,
            DataKind::Paired => {
                let mut r = cfg.qoi(Fidelity::Lf, &inputs)?;
                r.extend(cfg.qoi(Fidelity::Hf, &inputs)?);
                r
            }
        };
        Ok((inputs, row))
    };
    let rows: Vec<(Vec<f64>, Vec<f64>)> = if parallel {
        (0..count).into_par_iter().map(one).collect::<Result<_>>()?
    } else {
        (0..count).map(one).collect::<Result<_>>()?
    };
    let width = kind.row_width(dim);
    let mut data = Vec::with_capacity(count * width);
    let mut inputs = Vec::with_capacity(count);
    for (inp, row) in rows {
        data.extend(row);
        inputs.push(inp);
    }
    QoiDataset::new(kind, dim, Matrix::from_vec(count, width, data)?, inputs)
}
