use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bfvae::io::checkpoint::mlp_param_bytes;
use bfvae::io::{Checkpoint, DataKind, QoiDataset};
use tempfile::TempDir;

fn bfvae(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bfvae"))
        .args(args)
        .output()
        .expect("spawn bfvae")
}

fn ok(args: &[&str]) -> String {
    let o = bfvae(args);
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    bfvae(args).status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SMALL: [&str; 8] = [
    "--set", "hidden=16,8", "--set", "epochs_lf=15", "--set", "epochs_bf=10", "--set", "batch_size=16",
];

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        Self {
            dir: TempDir::new().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn gen(&self, name: &str, problem: &str, mode: &str, count: usize, seed: u64) -> PathBuf {
        let p = self.path(name);
        ok(&[
            "gen-data", "--problem", problem, "--mode", mode, "--count", &count.to_string(),
            "--seed", &seed.to_string(), "--out", s(&p),
        ]);
        p
    }

    fn train_lf(&self, data: &Path, out: &str, seed: &str, extra: &[&str]) -> (PathBuf, String) {
        let p = self.path(out);
        let mut args = vec!["train-lf", "--data", s(data), "--seed", seed, "--out", s(&p)];
        args.extend(SMALL);
        args.extend(extra);
        let log = ok(&args);
        (p, log)
    }
}

#[test]
fn gen_data_shapes_and_determinism() {
    let f = Fixture::new();
    let stdout = ok(&[
        "gen-data", "--problem", "burgers", "--mode", "paired", "--count", "10", "--seed", "7",
        "--out", s(&f.path("a.bfqd")),
    ]);
    assert!(stdout.contains("rows=10") && stdout.contains("dim=254"), "{stdout}");
    let ds = QoiDataset::load(&f.path("a.bfqd"), DataKind::Paired).unwrap();
    assert_eq!(ds.rows().shape(), (10, 508));
    assert_eq!(ds.inputs.len(), 10);
    ok(&[
        "gen-data", "--problem", "burgers", "--mode", "paired", "--count", "10", "--seed", "7",
        "--out", s(&f.path("b.bfqd")), "--threads", "2",
    ]);
    assert_eq!(std::fs::read(f.path("a.bfqd")).unwrap(), std::fs::read(f.path("b.bfqd")).unwrap());

    let csv = f.gen("beam.csv", "beam", "lf", 5, 1);
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().all(|l| l.split(',').count() == 128));
}

#[test]
fn gen_data_errors_map_to_exit_codes() {
    let f = Fixture::new();
    let out = f.path("x.bfqd");
    assert_eq!(code(&["gen-data", "--problem", "beam", "--mode", "paired", "--count", "3", "--seed", "1", "--out", s(&out)]), 2);
    assert_eq!(code(&["gen-data", "--problem", "wave", "--mode", "lf", "--count", "3", "--seed", "1", "--out", s(&out)]), 2);
    assert_eq!(code(&["gen-data", "--problem", "beam", "--mode", "lf", "--count", "3", "--seed", "1", "--out", "/nonexistent/dir/x.bfqd"]), 3);
    assert_eq!(code(&["gen-data", "--problem", "beam"]), 2);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn train_lf_logs_epochs_and_is_deterministic() {
    let f = Fixture::new();
    let data = f.gen("beam.bfqd", "beam", "lf", 200, 3);
    let (a, log) = f.train_lf(&data, "a.bfvc", "5", &["--problem", "beam"]);
    let rows: Vec<&str> = log.lines().collect();
    assert_eq!(rows[0], "epoch,loss");
    assert_eq!(rows.len(), 16);
    let loss = |l: &str| l.split(',').nth(1).unwrap().parse::<f64>().unwrap();
    assert!(loss(rows[15]) < loss(rows[1]));

    let log_path = f.path("b.csv");
    let (b, quiet) = f.train_lf(&data, "b.bfvc", "5", &["--problem", "beam", "--log", s(&log_path)]);
    assert!(quiet.is_empty());
    assert_eq!(std::fs::read_to_string(log_path).unwrap(), log);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let (c, _) = f.train_lf(&data, "c.bfvc", "6", &["--problem", "beam"]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn train_commands_check_data_kind() {
    let f = Fixture::new();
    let lf = f.gen("lf.bfqd", "beam", "lf", 20, 3);
    let ck = f.path("m.bfvc");
    assert_eq!(code(&["train-hf", "--data", s(&lf), "--seed", "1", "--out", s(&ck)]), 2);
    assert_eq!(code(&["train-lf", "--data", s(&f.path("missing.bfqd")), "--seed", "1", "--out", s(&ck)]), 3);
    let bad_cfg = f.path("bad.cfg");
    std::fs::write(&bad_cfg, "beta = -1\n").unwrap();
    assert_eq!(code(&["train-lf", "--data", s(&lf), "--config", s(&bad_cfg), "--seed", "1", "--out", s(&ck)]), 2);
    let garbage = f.path("garbage.bfqd");
    std::fs::write(&garbage, b"not a dataset").unwrap();
    assert_eq!(code(&["train-lf", "--data", s(&garbage), "--seed", "1", "--out", s(&ck)]), 3);
}

fn burgers_lf_checkpoint(f: &Fixture) -> (PathBuf, PathBuf) {
    let pairs = f.gen("pairs.bfqd", "burgers", "paired", 12, 4);
    let lf_csv = f.path("lf.csv");
    let ds = QoiDataset::load(&pairs, DataKind::Paired).unwrap();
    let lf_only = QoiDataset::new(DataKind::LfOnly, 254, ds.lf().unwrap(), Vec::new()).unwrap();
    lf_only.save(&lf_csv).unwrap();
    let (ck, _) = f.train_lf(&lf_csv, "lf.bfvc", "2", &[]);
    (ck, pairs)
}

#[test]
fn train_bf_freezes_all_but_last_layer() {
    let f = Fixture::new();
    let (lf, pairs) = burgers_lf_checkpoint(&f);
    let bf = f.path("bf.bfvc");
    let mut args = vec!["train-bf", "--lf-checkpoint", s(&lf), "--pairs", s(&pairs), "--seed", "9", "--out", s(&bf)];
    args.extend(SMALL);
    let stdout = ok(&args);
    assert!(stdout.contains("freeze_check,ok"), "{stdout}");
    assert!(stdout.contains("encoder,identical"));
    assert!(stdout.contains("decoder_layer_2,updated"));

    let (Checkpoint::Vae(a), Checkpoint::BfVae(b)) = (Checkpoint::<f64>::load(&lf).unwrap(), Checkpoint::<f64>::load(&bf).unwrap()) else {
        panic!("checkpoint kinds");
    };
    assert_eq!(mlp_param_bytes(a.encoder()), mlp_param_bytes(b.base().encoder()));

    let again = f.path("bf2.bfvc");
    let mut args2 = args.clone();
    args2[8] = s(&again);
    ok(&args2);
    assert_eq!(std::fs::read(&bf).unwrap(), std::fs::read(&again).unwrap());

    // a BF checkpoint is not a valid stage-1 model
    let mut nested = args.clone();
    nested[2] = s(&bf);
    let bf3 = f.path("bf3.bfvc");
    nested[8] = s(&bf3);
    assert_eq!(code(&nested), 2);

    // dimension mismatch
    let beam_pairs = f.path("beam_pairs.csv");
    std::fs::write(&beam_pairs, "1,2,3,4\n5,6,7,8\n").unwrap();
    let mut mismatch = args.clone();
    mismatch[4] = s(&beam_pairs);
    assert_eq!(code(&mismatch), 2);

    let mut missing = args.clone();
    missing[2] = "/nonexistent/lf.bfvc";
    assert_eq!(code(&missing), 3);
}

#[test]
fn generate_and_eval_kid() {
    let f = Fixture::new();
    let (lf, pairs) = burgers_lf_checkpoint(&f);
    let out = f.path("gen.bfqd");
    let stdout = ok(&["generate", "--checkpoint", s(&lf), "--count", "30", "--seed", "1", "--out", s(&out)]);
    assert!(stdout.contains("rows=30 dim=254"));
    let ds = QoiDataset::load(&out, DataKind::HfOnly).unwrap();
    assert_eq!((ds.kind, ds.rows().shape()), (DataKind::HfOnly, (30, 254)));
    let again = f.path("gen2.bfqd");
    ok(&["generate", "--checkpoint", s(&lf), "--count", "30", "--seed", "1", "--out", s(&again)]);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
    let csv = f.path("gen.txt");
    ok(&["generate", "--checkpoint", s(&lf), "--count", "4", "--seed", "1", "--out", s(&csv), "--csv"]);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 4);

    let kid = |extra: &[&str]| {
        let mut a = vec!["eval-kid", "--test", s(&pairs), "--checkpoint", s(&lf), "--T", "10", "--seed", "3"];
        a.extend(extra);
        ok(&a)
    };
    let one = kid(&["--trials", "1"]);
    let lines: Vec<&str> = one.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], "trial,kid");
    assert_eq!(lines[2].split(',').nth(1), lines[1].split(',').nth(1));
    assert_eq!(lines[3], "std,0e0");
    let three = kid(&["--trials", "3"]);
    assert_eq!(three, kid(&["--trials", "3", "--threads", "2"]));
    assert_eq!(three.lines().count(), 6);

    let selfc = ok(&["eval-kid", "--test", s(&pairs), "--self-check", "--T", "12", "--trials", "2", "--seed", "0"]);
    let vals: Vec<f64> = selfc.lines().skip(1).take(2).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(vals[0], vals[1]);
    assert!(vals[0] <= 0.0 && vals[0] >= -2.0 * 5.0 / 12.0);

    assert_eq!(code(&["eval-kid", "--test", s(&pairs), "--checkpoint", s(&lf), "--T", "13", "--trials", "1", "--seed", "0"]), 2);
    assert_eq!(code(&["eval-kid", "--test", s(&pairs), "--T", "5", "--seed", "0"]), 2);
}

#[test]
fn experiment_smoke_run() {
    let f = Fixture::new();
    let cfg = f.path("exp.cfg");
    let out_dir = f.path("run");
    std::fs::write(
        &cfg,
        format!(
            "# smoke configuration\nproblem = burgers\nhidden = 16, 8\nn_lf = 20\nn_hf = 10\n\
             epochs_lf = 5\nepochs_bf = 5\ntrials = 2\ntest_size = 100\nseed = 11\nout_dir = {}\n",
            out_dir.display()
        ),
    )
    .unwrap();
    let table = ok(&["experiment", "--config", s(&cfg), "--quiet"]);
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "n,kid_bf_mean,kid_bf_std,kid_hf_mean,kid_hf_std");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("10,"));
    assert_eq!(std::fs::read_to_string(out_dir.join("kid.csv")).unwrap(), table);

    let rows = std::fs::read_to_string(out_dir.join("hf_rows.csv")).unwrap();
    let arm = |name: &str| -> Vec<String> {
        rows.lines()
            .filter(|l| l.split(',').nth(1) == Some(name))
            .map(|l| l.split(',').nth(2).unwrap().to_string())
            .collect()
    };
    assert_eq!(arm("bf").len(), 10);
    assert_eq!(arm("bf"), arm("hf"));
    for ck in ["lf.bfvc", "bf_n10.bfvc", "hf_n10.bfvc"] {
        assert!(out_dir.join(ck).exists(), "{ck}");
    }

    // no HF beam solver is bundled, so a beam sweep needs HF files
    assert_eq!(code(&["experiment", "--problem", "beam", "--set", "n_lf=10", "--quiet"]), 2);
}
