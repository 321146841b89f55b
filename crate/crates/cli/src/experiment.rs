//! KID-versus-n sweep. For every HF sample count `n`, a BF-VAE (adapted from
//! one shared LF model) and an HF-only VAE are trained on the same first `n`
//! HF rows and scored against held-out HF test rows.

use std::io::Write;
use std::path::{Path, PathBuf};

use bfvae::bifi::{generate_hf, train_bf, train_hf_baseline, BiFiDataset};
use bfvae::datagen::{gen_dataset, ProblemConfig};
use bfvae::io::{Checkpoint, DataKind, QoiDataset, RunConfig};
use bfvae::metrics::KidReport;
use bfvae::ndcore::Matrix;
use bfvae::rng::{derive_seed, Stream};
use bfvae::vae::{sample_vae, train_vae};

use crate::commands::{fidelity_rows, kid_report, load_dataset, save_checkpoint, with_threads};
use crate::{CliError, CliResult, ExperimentArgs};

/// Result of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub bf: KidReport,
    pub hf: KidReport,
    /// Pair indices used to train the BF-VAE.
    pub bf_rows: Vec<usize>,
    /// HF row indices used to train the HF-only baseline.
    pub hf_rows: Vec<usize>,
}

/// Training and test data of a sweep.
#[derive(Debug, Clone)]
pub struct SweepData {
    pub lf: Matrix<f64>,
    pub pairs: BiFiDataset<f64>,
    pub test: Matrix<f64>,
}

/// Sub-seeds of a run, all derived from the configured seed.
pub mod seeds {
    use super::*;

    pub const LF_DATA: u64 = 0;
    pub const PAIR_DATA: u64 = 1;
    pub const TEST_DATA: u64 = 2;
    pub const LF_TRAIN: u64 = 3;

    pub fn data(seed: u64, which: u64) -> u64 {
        derive_seed(seed, Stream::DataGen, which)
    }

    pub fn lf_train(seed: u64) -> u64 {
        derive_seed(seed, Stream::Split, LF_TRAIN)
    }

    /// Per-`n` seeds for the BF arm, the HF arm and the KID trials.
    pub fn point(seed: u64, n: usize) -> (u64, u64, u64) {
        let base = derive_seed(seed, Stream::Split, 1 << 32 | n as u64);
        (
            derive_seed(base, Stream::Split, 0),
            derive_seed(base, Stream::Split, 1),
            derive_seed(base, Stream::KidTrial, 0),
        )
    }
}

fn dataset_or_generate(
    path: Option<&Path>,
    csv_kind: DataKind,
    pc: &ProblemConfig,
    count: usize,
    seed: u64,
    parallel: bool,
) -> CliResult<(QoiDataset, PathBuf)> {
    match path {
        Some(p) => Ok((load_dataset(p, csv_kind)?, p.to_path_buf())),
        None => Ok((
            gen_dataset(pc, csv_kind, count, seed, parallel)?,
            PathBuf::from("<generated>"),
        )),
    }
}

/// Loads the configured data files, generating whatever is not given.
pub fn prepare_data(cfg: &RunConfig) -> CliResult<SweepData> {
    let pc = ProblemConfig::default_for(cfg.problem);
    let n_max = *cfg.n_hf.iter().max().expect("validated non-empty");
    with_threads(cfg.threads, |par| -> CliResult<SweepData> {
        let (lf_ds, p) = dataset_or_generate(
            cfg.lf_data.as_deref(),
            DataKind::LfOnly,
            &pc,
            cfg.n_lf,
            seeds::data(cfg.seed, seeds::LF_DATA),
            par,
        )?;
        let lf = fidelity_rows(&lf_ds, DataKind::LfOnly, &p)?;
        let (pair_ds, p) = dataset_or_generate(
            cfg.pairs_data.as_deref(),
            DataKind::Paired,
            &pc,
            n_max,
            seeds::data(cfg.seed, seeds::PAIR_DATA),
            par,
        )?;
        if pair_ds.kind != DataKind::Paired {
            return Err(CliError::Usage(format!(
                "{}: expected paired rows",
                p.display()
            )));
        }
        let (test_ds, p) = dataset_or_generate(
            cfg.test_data.as_deref(),
            DataKind::HfOnly,
            &pc,
            cfg.test_size,
            seeds::data(cfg.seed, seeds::TEST_DATA),
            par,
        )?;
        let test = fidelity_rows(&test_ds, DataKind::HfOnly, &p)?;
        Ok(SweepData {
            lf,
            pairs: pair_ds.to_pairs()?,
            test,
        })
    })?
}

/// Runs the sweep; `progress` receives human-readable status lines.
pub fn sweep(
    cfg: &RunConfig,
    data: &SweepData,
    progress: &mut dyn Write,
) -> CliResult<Vec<SweepRow>> {
    cfg.validate()?;
    let dim = data.test.cols();
    if data.lf.cols() != dim || data.pairs.dim() != dim {
        return Err(CliError::Usage(format!(
            "dimension mismatch: LF {}, pairs {}, test {dim}",
            data.lf.cols(),
            data.pairs.dim()
        )));
    }
    let lf_rows = data.lf.head(cfg.n_lf);
    if lf_rows.rows() < cfg.n_lf {
        return Err(CliError::Usage(format!(
            "{} LF rows available, n_lf = {} requested",
            lf_rows.rows(),
            cfg.n_lf
        )));
    }
    if data.test.rows() < cfg.test_size {
        return Err(CliError::Usage(format!(
            "{} test rows available, T = {} requested",
            data.test.rows(),
            cfg.test_size
        )));
    }
    writeln!(progress, "training LF-VAE on {} rows", lf_rows.rows())?;
    let (lf, _) = train_vae(&lf_rows, &cfg.arch(), &cfg.lf_train(), seeds::lf_train(cfg.seed))?;
    if let Some(dir) = &cfg.out_dir {
        save_checkpoint(&Checkpoint::Vae(lf.clone()), &dir.join("lf.bfvc"))?;
    }

    let mut out = Vec::with_capacity(cfg.n_hf.len());
    for &n in &cfg.n_hf {
        if n > data.pairs.len() {
            return Err(CliError::Usage(format!(
                "n = {n} exceeds the {} available pairs",
                data.pairs.len()
            )));
        }
        let (bf_seed, hf_seed, kid_seed) = seeds::point(cfg.seed, n);
        let bf_rows: Vec<usize> = (0..n).collect();
        let hf_rows = bf_rows.clone();
        let pairs = data.pairs.subset(&bf_rows);
        let hf_train = data.pairs.hf().select_rows(&hf_rows);
        writeln!(progress, "n={n}: training BF-VAE and HF-VAE on HF rows 0..{n}")?;

        let (bf, _) = train_bf(&lf, &pairs, &cfg.bf_train(), bf_seed)?;
        let (hf, _) = train_hf_baseline(&hf_train, &cfg.arch(), &cfg.hf_train(), hf_seed)?;
        if let Some(dir) = &cfg.out_dir {
            save_checkpoint(&Checkpoint::BfVae(bf.clone()), &dir.join(format!("bf_n{n}.bfvc")))?;
            save_checkpoint(&Checkpoint::Vae(hf.clone()), &dir.join(format!("hf_n{n}.bfvc")))?;
        }

        let t = cfg.test_size;
        let kid_bf = kid_report(&data.test, t, cfg.trials, kid_seed, cfg.threads, |s| {
            generate_hf(&bf, t, s)
        })?;
        let kid_hf = kid_report(&data.test, t, cfg.trials, kid_seed, cfg.threads, |s| {
            sample_vae(&hf, t, s)
        })?;
        writeln!(
            progress,
            "n={n}: KID BF {:.4e} ± {:.2e}, HF {:.4e} ± {:.2e}",
            kid_bf.mean, kid_bf.std, kid_hf.mean, kid_hf.std
        )?;
        out.push(SweepRow {
            n,
            bf: kid_bf,
            hf: kid_hf,
            bf_rows,
            hf_rows,
        });
    }
    Ok(out)
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("n,kid_bf_mean,kid_bf_std,kid_hf_mean,kid_hf_std\n");
    for r in rows {
        s.push_str(&format!(
            "{},{:e},{:e},{:e},{:e}\n",
            r.n, r.bf.mean, r.bf.std, r.hf.mean, r.hf.std
        ));
    }
    s
}

/// `n,arm,row` lines recording the HF rows each arm trained on.
pub fn rows_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("n,arm,row\n");
    for r in rows {
        for (arm, idx) in [("bf", &r.bf_rows), ("hf", &r.hf_rows)] {
            for i in idx {
                s.push_str(&format!("{},{arm},{i}\n", r.n));
            }
        }
    }
    s
}

pub fn run(a: &ExperimentArgs, out: &mut dyn Write) -> CliResult<()> {
    let cfg = a.config.resolve()?;
    if let Some(dir) = &cfg.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    let mut progress: Box<dyn Write> = if a.quiet {
        Box::new(std::io::sink())
    } else {
        Box::new(std::io::stderr())
    };
    let data = prepare_data(&cfg)?;
    let rows = sweep(&cfg, &data, &mut progress)?;
    let table = to_csv(&rows);
    if let Some(dir) = &cfg.out_dir {
        let write = |name: &str, text: &str| {
            let p = dir.join(name);
            std::fs::write(&p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        };
        write("kid.csv", &table)?;
        write("hf_rows.csv", &rows_csv(&rows))?;
        write("config.txt", &cfg.to_text())?;
    }
    match &a.out {
        Some(p) => std::fs::write(p, &table).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        None => out.write_all(table.as_bytes())?,
    }
    Ok(())
}
