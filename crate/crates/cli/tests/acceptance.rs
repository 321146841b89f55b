//! Acceptance suite. Prints one `criterion N: PASS|FAIL` line per criterion
//! and fails if any criterion fails.

use std::io::Write;
use std::path::Path;

use bfvae::datagen::burgers::{solve_on_grid, BurgersConfig, BurgersInputs};
use bfvae::datagen::{beam_lf_displacement, sample_beam_inputs, transformed_inertia, BeamConfig};
use bfvae::gradcheck::{check_hf_loss, check_lf_loss, check_mlp};
use bfvae::metrics::{kid, KernelSpec, KidProtocol};
use bfvae::ndcore::Matrix;
use bfvae::rng::{normal_vec, stream, Stream};
use bfvae::vae::{train_vae, TrainConfig};
use bfvae::io::RunConfig;
use rand::Rng;
use tempfile::TempDir;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn report(n: usize, title: &str, o: &Outcome) {
    let mut out = std::io::stdout().lock();
    let status = if o.pass { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "criterion {n}: {status} [{title}] {}", o.detail);
    let _ = out.flush();
}

fn cli(args: &[&str]) -> Result<String, String> {
    let mut buf = Vec::new();
    let mut full = vec!["bfvae"];
    full.extend(args);
    bfvae_cli::run(full, &mut buf).map_err(|e| format!("{args:?}: {e:?}"))?;
    Ok(String::from_utf8(buf).expect("utf-8 output"))
}

fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 path")
}

fn gaussian(seed: u64, rows: usize, dim: usize, shift: f64) -> Matrix<f64> {
    let mut rng = stream(seed, Stream::Sample, 0);
    let v: Vec<f64> = normal_vec::<f64, _>(&mut rng, rows * dim)
        .into_iter()
        .map(|x| x + shift)
        .collect();
    Matrix::from_vec(rows, dim, v).expect("finite")
}

// 1. Burgers end-to-end: BF-VAE beats the HF-only baseline at n = 10 and 50.
fn bifidelity_advantage() -> Result<Outcome, String> {
    let table = cli(&["experiment", "--problem", "burgers", "--set", "n_hf=10,50"])?;
    let mut pass = true;
    let mut detail = Vec::new();
    for line in table.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().expect("numeric")).collect();
        let (n, bf, hf) = (f[0], f[1], f[3]);
        pass &= bf < hf;
        detail.push(format!("n={n}: KID_BF={bf:.4e} KID_HF={hf:.4e}"));
    }
    pass &= detail.len() == 2;
    Ok(outcome(pass, detail.join("; ")))
}

// 2. Analytic gradients against central finite differences.
fn gradient_oracle() -> Result<Outcome, String> {
    let (mut mlp, mut lf, mut hf) = (0.0f64, 0.0f64, 0.0f64);
    let mut checked = 0;
    for seed in 0..25 {
        let e = |r: bfvae::Result<_>| r.map_err(|e: bfvae::Error| e.to_string());
        let a = e(check_mlp(seed))?;
        let b = e(check_lf_loss(seed))?;
        let c = e(check_hf_loss(seed))?;
        mlp = mlp.max(a.max_rel_err);
        lf = lf.max(b.max_rel_err);
        hf = hf.max(c.max_rel_err);
        checked += a.checked + b.checked + c.checked;
    }
    Ok(outcome(
        mlp < 1e-5 && lf < 1e-4 && hf < 1e-4,
        format!("25 configs, {checked} partials; max rel err MLP {mlp:.2e} (<1e-5), LF {lf:.2e}, HF {hf:.2e} (<1e-4)"),
    ))
}

// 3. KID concentrates at 0 for equal distributions and separates a shift.
fn kid_sanity() -> Result<Outcome, String> {
    let test = gaussian(1000, 1000, 4, 0.0);
    let protocol = KidProtocol {
        kernel: KernelSpec::default(),
        samples: 1000,
        trials: 10,
        seed: 3,
        parallel: false,
    };
    let same = protocol
        .run(&test, |_, s| Ok(gaussian(s, 1000, 4, 0.0)))
        .map_err(|e| e.to_string())?;
    let shifted = protocol
        .run(&test, |_, s| Ok(gaussian(s, 1000, 4, 2.0)))
        .map_err(|e| e.to_string())?;
    Ok(outcome(
        same.mean.abs() <= 0.01 && shifted.mean >= 10.0 * same.mean.abs(),
        format!("same {:.3e} (|.|<=0.01), shifted {:.3e} (>=10x)", same.mean, shifted.mean),
    ))
}

/// Nine-loop evaluation: three double sums, each over explicit index pairs.
fn kid_direct(x: &Matrix<f64>, y: &Matrix<f64>) -> f64 {
    let scales = [0.2, 0.5, 1.0, 2.0, 5.0];
    let k = |a: &[f64], b: &[f64]| -> f64 {
        let mut sq = 0.0;
        for d in 0..a.len() {
            sq += (a[d] - b[d]) * (a[d] - b[d]);
        }
        let mut v = 0.0;
        for &l in &scales {
            v += (1.0 + sq / (2.0 * l)).powf(-l);
        }
        v
    };
    let (m, n) = (x.rows(), y.rows());
    let mut xx = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                xx += k(x.row(i), x.row(j));
            }
        }
    }
    let mut xy = 0.0;
    for i in 0..m {
        for j in 0..n {
            xy += k(x.row(i), y.row(j));
        }
    }
    let mut yy = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                yy += k(y.row(i), y.row(j));
            }
        }
    }
    let (m, n) = (m as f64, n as f64);
    xx / (m * (m - 1.0)) - 2.0 * xy / (m * n) + yy / (n * (n - 1.0))
}

// 4. KID equals the direct definition on small random instances.
fn kid_brute_force() -> Result<Outcome, String> {
    let mut rng = stream(4, Stream::Sample, 1);
    let mut worst = 0.0f64;
    for t in 0..20 {
        let m = rng.random_range(2..=6);
        let n = rng.random_range(2..=6);
        let d = rng.random_range(1..=3);
        let x = gaussian(100 + t, m, d, 0.0);
        let y = gaussian(200 + t, n, d, 0.7);
        let got = kid(&KernelSpec::default(), &x, &y).map_err(|e| e.to_string())?;
        worst = worst.max((got - kid_direct(&x, &y)).abs());
    }
    Ok(outcome(worst <= 1e-12, format!("20 instances, max abs diff {worst:.2e} (<=1e-12)")))
}

// 5. Beam tip deflection and clamped end.
fn beam_closed_form() -> Result<Outcome, String> {
    let cfg = BeamConfig::default();
    let mut rng = stream(5, Stream::DataGen, 9);
    let mut worst = 0.0f64;
    let mut clamped = true;
    for _ in 0..100 {
        let xi = sample_beam_inputs(&cfg, &mut rng);
        let u: Vec<f64> = beam_lf_displacement(&cfg, &xi).map_err(|e| e.to_string())?;
        let i = transformed_inertia(&cfg, &xi).map_err(|e| e.to_string())?;
        let tip = -xi[3] * cfg.length.powi(4) / (8.0 * xi[2] * i);
        worst = worst.max(((u[u.len() - 1] - tip) / tip).abs());
        clamped &= u[0] == 0.0;
    }
    Ok(outcome(
        worst <= 1e-12 && clamped,
        format!("100 inputs, max rel err at tip {worst:.2e} (<=1e-12), u(0)=0: {clamped}"),
    ))
}

// 6. Second-order convergence of the Burgers solver under (dx/2, dt/4) refinement.
fn burgers_convergence() -> Result<Outcome, String> {
    let cfg = BurgersConfig::default();
    let inp = BurgersInputs::nominal(&cfg);
    let g0 = cfg.hf;
    let g1 = g0.refined();
    let g2 = g1.refined();
    let solve = |g| solve_on_grid::<f64>(&cfg, g, &inp, |_, _| {}).map_err(|e| e.to_string());
    let (u0, u1, u2) = (solve(g0)?, solve(g1)?, solve(g2)?);
    let err = |u: &[f64], stride: usize| {
        let s: f64 = (0..=g0.intervals)
            .map(|i| (u[i * stride] - u2[i * 4]).powi(2))
            .sum();
        (s * g0.dx()).sqrt()
    };
    let (e0, e1) = (err(&u0, 1), err(&u1, 2));
    let ratio = e0 / e1;
    Ok(outcome(
        ratio >= 3.5,
        format!("L2 errors {e0:.3e} -> {e1:.3e}, ratio {ratio:.3} (>=3.5)"),
    ))
}

const SMALL: [&str; 10] = [
    "--set", "hidden=32,16", "--set", "epochs_lf=20", "--set", "epochs_bf=20", "--set",
    "batch_size=16", "--set", "n_lf=40",
];

fn with_small<'a>(args: &[&'a str]) -> Vec<&'a str> {
    let mut v = args.to_vec();
    v.extend(SMALL);
    v
}

// 7. The CLI's post-hoc report confirms the stage-2 freeze.
fn freeze_invariant(dir: &Path) -> Result<Outcome, String> {
    let (lf_data, pairs) = (dir.join("lf7.bfqd"), dir.join("pairs7.bfqd"));
    let (lf_ck, bf_ck) = (dir.join("lf7.bfvc"), dir.join("bf7.bfvc"));
    cli(&["gen-data", "--problem", "burgers", "--mode", "lf", "--count", "40", "--seed", "70", "--out", p(&lf_data)])?;
    cli(&["gen-data", "--problem", "burgers", "--mode", "paired", "--count", "10", "--seed", "71", "--out", p(&pairs)])?;
    cli(&with_small(&["train-lf", "--data", p(&lf_data), "--seed", "1", "--out", p(&lf_ck), "--log", p(&dir.join("l7.csv"))]))?;
    let out = cli(&with_small(&["train-bf", "--lf-checkpoint", p(&lf_ck), "--pairs", p(&pairs), "--seed", "2", "--out", p(&bf_ck), "--log", p(&dir.join("b7.csv"))]))?;
    let layers: Vec<&str> = out.lines().filter(|l| l.starts_with("decoder_layer_")).collect();
    let frozen_ok = layers.len() == 3
        && layers[..2].iter().all(|l| l.ends_with(",identical"))
        && layers[2].ends_with(",updated");
    let pass = out.contains("freeze_check,ok")
        && out.contains("encoder,identical")
        && out.contains("standardizer,identical")
        && frozen_ok;
    Ok(outcome(pass, format!("report: {}", out.lines().collect::<Vec<_>>().join(" "))))
}

// 8. Every command is reproducible byte for byte.
fn determinism(dir: &Path) -> Result<Outcome, String> {
    let run = |tag: &str| -> Result<Vec<(String, Vec<u8>)>, String> {
        let f = |name: &str| dir.join(format!("{tag}_{name}"));
        let mut outs = Vec::new();
        let mut keep = |name: &str, stdout: String| -> Result<(), String> {
            outs.push((format!("{name}.stdout"), stdout.into_bytes()));
            let path = f(name);
            if path.exists() {
                outs.push((name.to_string(), std::fs::read(&path).map_err(|e| e.to_string())?));
            }
            Ok(())
        };
        keep("lf.bfqd", cli(&["gen-data", "--problem", "burgers", "--mode", "lf", "--count", "40", "--seed", "80", "--out", p(&f("lf.bfqd"))])?)?;
        keep("pairs.bfqd", cli(&["gen-data", "--problem", "burgers", "--mode", "paired", "--count", "12", "--seed", "81", "--out", p(&f("pairs.bfqd")), "--threads", "2"])?)?;
        keep("lf.bfvc", cli(&with_small(&["train-lf", "--data", p(&f("lf.bfqd")), "--seed", "3", "--out", p(&f("lf.bfvc"))]))?)?;
        keep("hf.bfvc", cli(&with_small(&["train-hf", "--data", p(&f("pairs.bfqd")), "--seed", "4", "--out", p(&f("hf.bfvc"))]))?)?;
        keep("bf.bfvc", cli(&with_small(&["train-bf", "--lf-checkpoint", p(&f("lf.bfvc")), "--pairs", p(&f("pairs.bfqd")), "--seed", "5", "--out", p(&f("bf.bfvc"))]))?)?;
        keep("gen.bfqd", cli(&["generate", "--checkpoint", p(&f("bf.bfvc")), "--count", "20", "--seed", "6", "--out", p(&f("gen.bfqd"))])?)?;
        keep("kid", cli(&["eval-kid", "--test", p(&f("pairs.bfqd")), "--checkpoint", p(&f("bf.bfvc")), "--T", "12", "--trials", "3", "--seed", "7"])?)?;
        keep("exp", cli(&with_small(&["experiment", "--problem", "burgers", "--quiet", "--set", "n_hf=5,10", "--set", "test_size=30", "--set", "trials=2", "--set", "seed=8"]))?)?;
        Ok(outs)
    };
    let a = run("a")?;
    let b = run("b")?;
    let differing: Vec<&str> = a
        .iter()
        .zip(&b)
        .filter(|(x, y)| x.0 != y.0 || x.1 != y.1)
        .map(|(x, _)| x.0.as_str())
        .collect();
    Ok(outcome(
        differing.is_empty() && a.len() == b.len(),
        format!("{} outputs compared across two runs, differing: {differing:?}", a.len()),
    ))
}

// 9. Identical training rows are reconstructed.
fn degenerate_data() -> Result<Outcome, String> {
    let cfg = BeamConfig::default();
    let xi = [1.03e6, 0.97e6, 1.01e4, 10.4];
    let v: Vec<f64> = beam_lf_displacement(&cfg, &xi).map_err(|e| e.to_string())?;
    let data = Matrix::from_rows(&vec![v.clone(); 64]).map_err(|e| e.to_string())?;
    let rc = RunConfig::beam();
    let tc = TrainConfig {
        epochs: 2000,
        ..rc.lf_train()
    };
    let (model, _) = train_vae(&data, &rc.arch(), &tc, 9).map_err(|e| e.to_string())?;
    let mut mse = 0.0;
    for row in data.iter_rows() {
        let r = model.reconstruct_raw(row).map_err(|e| e.to_string())?;
        mse += r.iter().zip(row).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    }
    mse /= data.rows() as f64;
    let norm: f64 = v.iter().map(|x| x * x).sum();
    Ok(outcome(
        mse < 1e-2 * norm,
        format!("mean ||x_hat - v||^2 = {mse:.3e}, bound 1e-2 ||v||^2 = {:.3e}", 1e-2 * norm),
    ))
}

#[test]
fn acceptance_criteria() {
    let dir = TempDir::new().expect("temp dir");
    let d = dir.path();
    let criteria: Vec<(&str, Box<dyn Fn() -> Result<Outcome, String>>)> = vec![
        ("bi-fidelity advantage on Burgers", Box::new(bifidelity_advantage)),
        ("gradient oracle", Box::new(gradient_oracle)),
        ("KID statistical sanity", Box::new(kid_sanity)),
        ("KID brute-force equivalence", Box::new(kid_brute_force)),
        ("beam closed form", Box::new(beam_closed_form)),
        ("Burgers self-convergence", Box::new(burgers_convergence)),
        ("freeze invariant", Box::new(move || freeze_invariant(d))),
        ("determinism", Box::new(move || determinism(d))),
        ("degenerate-data sanity", Box::new(degenerate_data)),
    ];
    let mut failed = Vec::new();
    for (i, (title, check)) in criteria.iter().enumerate() {
        let o = check().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        report(i + 1, title, &o);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
