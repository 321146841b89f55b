use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use bfvae::bifi::{freeze_report, generate_hf, train_bf_with, FreezeReport};
use bfvae::datagen::{gen_dataset, ProblemConfig};
use bfvae::io::{Checkpoint, DataKind, QoiDataset, RunConfig};
use bfvae::metrics::{KernelSpec, KidProtocol, KidReport};
use bfvae::ndcore::Matrix;
use bfvae::vae::{sample_vae, train_vae_with};

use crate::{
    CliError, CliResult, ConfigArgs, EvalKidArgs, GenDataArgs, GenerateArgs, TrainArgs,
    TrainBfArgs,
};

impl ConfigArgs {
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let text = match &self.config {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
            None => format!("problem = {}\n", self.problem.name()),
        };
        Ok(RunConfig::parse_with(&text, &self.overrides)?)
    }
}

/// Runs `f` on a rayon pool of `threads` workers, or inline for one thread.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce(bool) -> R + Send) -> CliResult<R> {
    if threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    if threads == 1 {
        return Ok(f(false));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    Ok(pool.install(|| f(true)))
}

pub fn load_dataset(path: &Path, csv_kind: DataKind) -> CliResult<QoiDataset> {
    QoiDataset::load(path, csv_kind).map_err(|e| match e {
        bfvae::Error::Io(io) => CliError::Io(format!("{}: {io}", path.display())),
        other => CliError::from(other).with_context(path),
    })
}

pub fn load_checkpoint(path: &Path) -> CliResult<Checkpoint<f64>> {
    Checkpoint::load(path).map_err(|e| CliError::from(e).with_context(path))
}

pub fn save_checkpoint(ck: &Checkpoint<f64>, path: &Path) -> CliResult<()> {
    ck.save(path).map_err(|e| CliError::from(e).with_context(path))
}

impl CliError {
    pub(crate) fn with_context(self, path: &Path) -> Self {
        let p = path.display();
        match self {
            CliError::Usage(m) => CliError::Usage(format!("{p}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{p}: {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("{p}: {m}")),
        }
    }
}

/// Rows of the requested fidelity; paired files supply either side.
pub fn fidelity_rows(ds: &QoiDataset, want: DataKind, path: &Path) -> CliResult<Matrix<f64>> {
    let rows = match want {
        DataKind::LfOnly => ds.lf(),
        DataKind::HfOnly => ds.hf(),
        DataKind::Paired => Some(ds.rows().clone()),
    };
    rows.ok_or_else(|| {
        CliError::Usage(format!(
            "{}: expected {} rows, found {}",
            path.display(),
            want.name(),
            ds.kind.name()
        ))
    })
}

pub fn gen_data(a: &GenDataArgs, out: &mut dyn Write) -> CliResult<()> {
    if a.count == 0 {
        return Err(CliError::Usage("--count must be positive".into()));
    }
    let cfg = ProblemConfig::default_for(a.problem);
    let ds = with_threads(a.threads, |par| gen_dataset(&cfg, a.mode, a.count, a.seed, par))??;
    ds.save(&a.out).map_err(|e| CliError::from(e).with_context(&a.out))?;
    writeln!(
        out,
        "rows={} dim={} kind={} problem={}",
        ds.len(),
        ds.dim(),
        ds.kind.name(),
        a.problem.name()
    )?;
    Ok(())
}

/// Epoch-loss CSV sink: a file when a path is given, otherwise `out`.
struct LossLog<'a> {
    sink: Box<dyn Write + 'a>,
    error: Option<std::io::Error>,
}

impl<'a> LossLog<'a> {
    fn open(path: Option<&Path>, out: &'a mut dyn Write) -> CliResult<Self> {
        let mut sink: Box<dyn Write + 'a> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
            )),
            None => Box::new(out),
        };
        writeln!(sink, "epoch,loss")?;
        Ok(Self { sink, error: None })
    }

    fn record(&mut self, epoch: usize, loss: f64) {
        if self.error.is_none() {
            if let Err(e) = writeln!(self.sink, "{epoch},{loss:e}") {
                self.error = Some(e);
            }
        }
    }

    fn finish(mut self) -> CliResult<()> {
        if let Some(e) = self.error {
            return Err(e.into());
        }
        self.sink.flush()?;
        Ok(())
    }
}

pub fn train(a: &TrainArgs, fidelity: DataKind, out: &mut dyn Write) -> CliResult<()> {
    let cfg = a.config.resolve()?;
    let ds = load_dataset(&a.data, fidelity)?;
    let rows = fidelity_rows(&ds, fidelity, &a.data)?;
    let tc = match fidelity {
        DataKind::HfOnly => cfg.hf_train(),
        _ => cfg.lf_train(),
    };
    let mut log = LossLog::open(a.log.as_deref(), out)?;
    let (model, _) = train_vae_with(&rows, &cfg.arch(), &tc, a.seed, |e, l| log.record(e, l))?;
    log.finish()?;
    save_checkpoint(&Checkpoint::Vae(model), &a.out)
}

pub fn format_freeze_report(r: &FreezeReport) -> String {
    let word = |same: bool| if same { "identical" } else { "updated" };
    let mut s = format!(
        "freeze_check,{}\nencoder,{}\nstandardizer,{}\n",
        if r.holds() { "ok" } else { "violated" },
        word(r.encoder_identical),
        word(r.standardizer_identical)
    );
    for (k, &same) in r.decoder_layers_identical.iter().enumerate() {
        s.push_str(&format!("decoder_layer_{k},{}\n", word(same)));
    }
    s
}

pub fn train_bf(a: &TrainBfArgs, out: &mut dyn Write) -> CliResult<()> {
    let cfg = a.config.resolve()?;
    let lf = match load_checkpoint(&a.lf_checkpoint)? {
        Checkpoint::Vae(m) => m,
        Checkpoint::BfVae(_) => {
            return Err(CliError::Usage(format!(
                "{}: expected an LF VAE checkpoint, found a BF-VAE",
                a.lf_checkpoint.display()
            )))
        }
    };
    let ds = load_dataset(&a.pairs, DataKind::Paired)?;
    if ds.kind != DataKind::Paired {
        return Err(CliError::Usage(format!(
            "{}: expected paired rows, found {}",
            a.pairs.display(),
            ds.kind.name()
        )));
    }
    if ds.dim() != lf.ambient_dim() {
        return Err(CliError::Usage(format!(
            "pairs have dimension {}, the LF checkpoint expects {}",
            ds.dim(),
            lf.ambient_dim()
        )));
    }
    let pairs = ds.to_pairs()?;
    let (bf, _) = {
        let mut log = LossLog::open(a.log.as_deref(), out)?;
        let r = train_bf_with(&lf, &pairs, &cfg.bf_train(), a.seed, |e, l| log.record(e, l))?;
        log.finish()?;
        r
    };
    save_checkpoint(&Checkpoint::BfVae(bf), &a.out)?;

    // compare what is on disk, not the in-memory model
    let saved = match load_checkpoint(&a.out)? {
        Checkpoint::BfVae(m) => m,
        Checkpoint::Vae(_) => return Err(CliError::Numerical("BF checkpoint re-read as VAE".into())),
    };
    let report = freeze_report(&lf, &saved);
    out.write_all(format_freeze_report(&report).as_bytes())?;
    if !report.holds() {
        return Err(CliError::Numerical(
            "frozen parameters changed during stage 2".into(),
        ));
    }
    Ok(())
}

pub fn sample_checkpoint(
    ck: &Checkpoint<f64>,
    count: usize,
    seed: u64,
) -> bfvae::Result<Matrix<f64>> {
    match ck {
        Checkpoint::Vae(m) => sample_vae(m, count, seed),
        Checkpoint::BfVae(m) => generate_hf(m, count, seed),
    }
}

pub fn generate(a: &GenerateArgs, out: &mut dyn Write) -> CliResult<()> {
    if a.count == 0 {
        return Err(CliError::Usage("--count must be positive".into()));
    }
    let ck = load_checkpoint(&a.checkpoint)?;
    let rows = sample_checkpoint(&ck, a.count, a.seed)?;
    if !rows.all_finite() {
        return Err(CliError::Numerical("generated samples are not finite".into()));
    }
    let ds = QoiDataset::new(DataKind::HfOnly, ck.ambient_dim(), rows, Vec::new())?;
    let written = if a.csv {
        let f = File::create(&a.out).map_err(|e| CliError::Io(format!("{}: {e}", a.out.display())))?;
        ds.write_csv(BufWriter::new(f))
    } else {
        ds.save(&a.out)
    };
    written.map_err(|e| CliError::from(e).with_context(&a.out))?;
    writeln!(out, "rows={} dim={} model={}", ds.len(), ds.dim(), ck.kind_name())?;
    Ok(())
}

pub fn kid_report(
    test: &Matrix<f64>,
    samples: usize,
    trials: usize,
    seed: u64,
    threads: usize,
    generator: impl Fn(u64) -> bfvae::Result<Matrix<f64>> + Sync,
) -> CliResult<KidReport> {
    if samples < 2 || trials == 0 {
        return Err(CliError::Usage("KID needs T ≥ 2 and at least one trial".into()));
    }
    if test.rows() < samples {
        return Err(CliError::Usage(format!(
            "test set has {} rows, T = {samples} required",
            test.rows()
        )));
    }
    let report = with_threads(threads, |parallel| {
        KidProtocol {
            kernel: KernelSpec::default(),
            samples,
            trials,
            seed,
            parallel,
        }
        .run(test, |_, s| generator(s))
    })??;
    Ok(report)
}

pub fn eval_kid(a: &EvalKidArgs, out: &mut dyn Write) -> CliResult<()> {
    let ds = load_dataset(&a.test, DataKind::HfOnly)?;
    let test = fidelity_rows(&ds, DataKind::HfOnly, &a.test)?;
    let report = if a.self_check {
        let replay = test.head(a.samples);
        kid_report(&test, a.samples, a.trials, a.seed, a.threads, |_| Ok(replay.clone()))?
    } else {
        let path = a.checkpoint.as_ref().expect("clap requires --checkpoint");
        let ck = load_checkpoint(path)?;
        if ck.ambient_dim() != test.cols() {
            return Err(CliError::Usage(format!(
                "checkpoint dimension {} does not match test rows of dimension {}",
                ck.ambient_dim(),
                test.cols()
            )));
        }
        kid_report(&test, a.samples, a.trials, a.seed, a.threads, |s| {
            sample_checkpoint(&ck, a.samples, s)
        })?
    };
    out.write_all(report.to_csv().as_bytes())?;
    Ok(())
}
