//! Viscous Burgers' equation `u_t + u u_x = ν u_xx` on `[0, 1] × [0, T]` with
//! homogeneous Dirichlet ends and a randomized sine-series initial state.
//!
//! Time stepping is semi-implicit: the advection term `−u u_x` (central
//! differences) is advanced with two-step Adams–Bashforth, bootstrapped by one
//! forward-Euler step, and diffusion is treated with backward Euler, one
//! constant-coefficient tridiagonal solve per step.

use rand::Rng;

use super::resample::{resample_linear, uniform_nodes};
use super::tridiag::Tridiagonal;
use crate::error::{Error, Result};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fidelity {
    Lf,
    Hf,
}

/// Space/time resolution: `intervals` equal cells on `[0, 1]`, step `dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub intervals: usize,
    pub dt: f64,
}

impl Grid {
    pub fn dx(&self) -> f64 {
        1.0 / self.intervals as f64
    }

    pub fn interior(&self) -> usize {
        self.intervals - 1
    }

    /// Interior nodes `i / intervals`, `i = 1..intervals`.
    pub fn interior_nodes(&self) -> Vec<f64> {
        let n = self.intervals as f64;
        (1..self.intervals).map(|i| i as f64 / n).collect()
    }

    /// `dx / 2` in space and `dt / 4` in time.
    pub fn refined(&self) -> Self {
        Self {
            intervals: 2 * self.intervals,
            dt: self.dt / 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BurgersConfig {
    pub t_end: f64,
    pub sigma_g: f64,
    /// Number of sine modes in the initial state (perturbations use modes `2..=M`).
    pub modes: usize,
    pub lf: Grid,
    pub hf: Grid,
    /// Viscosity range `[lo, hi]` of the shifted Beta variable.
    pub nu_range: (f64, f64),
    /// Second Beta shape parameter; the first is fixed at 1/2.
    pub nu_beta_b: u32,
}

impl Default for BurgersConfig {
    fn default() -> Self {
        Self {
            t_end: 2.0,
            sigma_g: 1.2840e-1,
            modes: 6,
            lf: Grid {
                intervals: 85,
                dt: 2e-2,
            },
            hf: Grid {
                intervals: 255,
                dt: 2e-4,
            },
            nu_range: (0.01, 0.05),
            nu_beta_b: 5,
        }
    }
}

impl BurgersConfig {
    pub fn grid(&self, fidelity: Fidelity) -> Grid {
        match fidelity {
            Fidelity::Lf => self.lf,
            Fidelity::Hf => self.hf,
        }
    }

    /// Dimension of the HF quantity of interest.
    pub fn qoi_dim(&self) -> usize {
        self.hf.interior()
    }

    pub fn num_xi(&self) -> usize {
        self.modes - 1
    }

    pub fn steps(&self, grid: Grid) -> Result<usize> {
        let steps = (self.t_end / grid.dt).round();
        if steps < 1.0 || (steps * grid.dt - self.t_end).abs() > 1e-9 * self.t_end {
            return Err(Error::InvalidConfig(format!(
                "dt = {} does not divide the horizon {}",
                grid.dt, self.t_end
            )));
        }
        Ok(steps as usize)
    }
}

/// Random inputs of one Burgers sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BurgersInputs {
    pub xi: Vec<f64>,
    pub nu: f64,
}

impl BurgersInputs {
    pub fn nominal(cfg: &BurgersConfig) -> Self {
        let b = cfg.nu_beta_b as f64;
        let (lo, hi) = cfg.nu_range;
        Self {
            xi: vec![0.0; cfg.num_xi()],
            nu: lo + (hi - lo) * 0.5 / (0.5 + b),
        }
    }

    /// `[ξ₁, ..., ξ_{M−1}, ν]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.xi.clone();
        v.push(self.nu);
        v
    }

    pub fn from_slice(cfg: &BurgersConfig, v: &[f64]) -> Result<Self> {
        if v.len() != cfg.num_xi() + 1 {
            return Err(Error::shape("Burgers input vector", cfg.num_xi() + 1, v.len()));
        }
        Ok(Self {
            xi: v[..v.len() - 1].to_vec(),
            nu: v[v.len() - 1],
        })
    }
}

/// `ξ ~ U[−1, 1]^{M−1}`, `ν = lo + (hi − lo) B`, `B ~ Beta(1/2, b)`.
pub fn sample_burgers_inputs<R: Rng + ?Sized>(cfg: &BurgersConfig, rng: &mut R) -> BurgersInputs {
    let xi = (0..cfg.num_xi())
        .map(|_| {
            let u: f64 = rng.random();
            -1.0 + 2.0 * u
        })
        .collect();
    let b = crate::rng::beta_half_int(rng, cfg.nu_beta_b);
    let (lo, hi) = cfg.nu_range;
    BurgersInputs {
        xi,
        nu: lo + (hi - lo) * b,
    }
}

/// `g(x) = sin(πx) + σ_g Σ_{k=2}^{M} sin(πkx) ξ_{k−1} / k`.
pub fn burgers_initial(x: &[f64], xi: &[f64], cfg: &BurgersConfig) -> Vec<f64> {
    use std::f64::consts::PI;
    x.iter()
        .map(|&x| {
            let pert: f64 = (2..=cfg.modes)
                .zip(xi)
                .map(|(k, &xk)| (PI * k as f64 * x).sin() * xk / k as f64)
                .sum();
            (PI * x).sin() + cfg.sigma_g * pert
        })
        .collect()
}

#[inline]
fn advection<T: Scalar>(u: &[T], inv_2dx: T, out: &mut [T]) {
    // u[0] and u[n-1] are the Dirichlet boundary values
    let n = u.len();
    out[0] = T::zero();
    out[n - 1] = T::zero();
    for i in 1..n - 1 {
        out[i] = -u[i] * (u[i + 1] - u[i - 1]) * inv_2dx;
    }
}

/// Full nodal solution (boundaries included) at the final time on `grid`.
/// `observe` is called with `(step, state)` after the initial condition and
/// after every step.
pub fn solve_on_grid<T: Scalar>(
    cfg: &BurgersConfig,
    grid: Grid,
    inputs: &BurgersInputs,
    mut observe: impl FnMut(usize, &[T]),
) -> Result<Vec<T>> {
    if grid.intervals < 2 {
        return Err(Error::InvalidConfig("Burgers grid needs at least 2 cells".into()));
    }
    if !(inputs.nu > 0.0 && inputs.nu.is_finite()) {
        return Err(Error::InvalidConfig(format!("viscosity {} must be positive", inputs.nu)));
    }
    let steps = cfg.steps(grid)?;
    let dx = grid.dx();
    let nodes = uniform_nodes(0.0, 1.0, grid.intervals);
    let mut u: Vec<T> = burgers_initial(&nodes, &inputs.xi, cfg)
        .into_iter()
        .map(T::of)
        .collect();
    let last = u.len() - 1;
    u[0] = T::zero();
    u[last] = T::zero();
    observe(0, &u);

    let m = grid.interior();
    let r = T::of(inputs.nu * grid.dt / (dx * dx));
    let sys = Tridiagonal::factor(
        &vec![-r; m],
        &vec![T::one() + T::of(2.0) * r; m],
        &vec![-r; m],
    )?;
    let dt = T::of(grid.dt);
    let inv_2dx = T::of(0.5 / dx);
    let (c_now, c_prev) = (T::of(1.5), T::of(0.5));
    let mut n_prev = vec![T::zero(); u.len()];
    let mut n_now = vec![T::zero(); u.len()];
    let mut rhs = vec![T::zero(); m];

    for step in 1..=steps {
        advection(&u, inv_2dx, &mut n_now);
        for i in 0..m {
            let adv = if step == 1 {
                n_now[i + 1]
            } else {
                c_now * n_now[i + 1] - c_prev * n_prev[i + 1]
            };
            rhs[i] = u[i + 1] + dt * adv;
        }
        sys.solve_into(&rhs, &mut u[1..=m])?;
        if !u[1..=m].iter().all(|v| v.is_finite()) {
            return Err(Error::non_finite(format!(
                "Burgers state at step {step} (nu = {})",
                inputs.nu
            )));
        }
        std::mem::swap(&mut n_prev, &mut n_now);
        observe(step, &u);
    }
    Ok(u)
}

/// Interior solution at the final time on the fidelity's grid (84 values for
/// LF, 254 for HF with the default grids).
pub fn burgers_solve<T: Scalar>(
    cfg: &BurgersConfig,
    fidelity: Fidelity,
    inputs: &BurgersInputs,
) -> Result<Vec<T>> {
    let u = solve_on_grid::<T>(cfg, cfg.grid(fidelity), inputs, |_, _| {})?;
    Ok(u[1..u.len() - 1].to_vec())
}

/// Maps an LF interior field onto the HF interior nodes, padding the source
/// with its zero boundary values.
pub fn lf_to_hf_nodes<T: Scalar>(cfg: &BurgersConfig, lf_interior: &[T]) -> Result<Vec<T>> {
    if lf_interior.len() != cfg.lf.interior() {
        return Err(Error::shape("LF interior field", cfg.lf.interior(), lf_interior.len()));
    }
    let mut vals = Vec::with_capacity(lf_interior.len() + 2);
    vals.push(T::zero());
    vals.extend_from_slice(lf_interior);
    vals.push(T::zero());
    let src: Vec<T> = uniform_nodes(0.0, 1.0, cfg.lf.intervals)
        .into_iter()
        .map(T::of)
        .collect();
    let dst: Vec<T> = cfg.hf.interior_nodes().into_iter().map(T::of).collect();
    resample_linear(&vals, &src, &dst)
}

/// `Σ u² dx` over the interior nodes.
pub fn discrete_energy<T: Scalar>(u: &[T], dx: f64) -> f64 {
    u.iter().map(|v| v.to_f64_lossless().powi(2)).sum::<f64>() * dx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    #[test]
    fn default_grids() {
        let cfg = BurgersConfig::default();
        assert_eq!(cfg.lf.interior(), 84);
        assert_eq!(cfg.hf.interior(), 254);
        assert!((cfg.lf.dx() - 1.176e-2).abs() < 1e-5);
        assert!((cfg.hf.dx() - 3.922e-3).abs() < 1e-6);
        assert_eq!(cfg.steps(cfg.lf).unwrap(), 100);
        assert_eq!(cfg.steps(cfg.hf).unwrap(), 10_000);
        let bad = Grid { intervals: 10, dt: 0.3 };
        assert!(cfg.steps(bad).is_err());
    }

    #[test]
    fn initial_condition() {
        let cfg = BurgersConfig::default();
        let x = [0.0, 0.25, 0.5, 1.0];
        let g0 = burgers_initial(&x, &[0.0; 5], &cfg);
        for (g, &xv) in g0.iter().zip(&x) {
            assert_eq!(*g, (std::f64::consts::PI * xv).sin());
        }
        let g = burgers_initial(&x, &[1.0, 0.0, 0.0, 0.0, 0.0], &cfg);
        let want = (std::f64::consts::FRAC_PI_4).sin() + 1.2840e-1 * 0.5 * 1.0;
        assert!((g[1] - want).abs() < 1e-15);
        let gr = burgers_initial(&[0.0, 1.0], &[0.7, -0.2, 0.9, 1.0, -1.0], &cfg);
        assert!(gr[0].abs() < 1e-12 && gr[1].abs() < 1e-12);
    }

    #[test]
    fn viscous_decay_and_boundaries() {
        let cfg = BurgersConfig::default();
        let inputs = BurgersInputs {
            xi: vec![0.0; 5],
            nu: 0.05,
        };
        for fid in [Fidelity::Lf, Fidelity::Hf] {
            let mut max_boundary = 0.0f64;
            let u = solve_on_grid::<f64>(&cfg, cfg.grid(fid), &inputs, |_, s| {
                max_boundary = max_boundary.max(s[0].abs()).max(s[s.len() - 1].abs());
            })
            .unwrap();
            assert_eq!(max_boundary, 0.0);
            let peak = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(peak < 1.0, "{fid:?}: {peak}");
        }
    }

    #[test]
    fn sampled_viscosity_in_range() {
        let cfg = BurgersConfig::default();
        let mut rng = stream(4, Stream::DataGen, 0);
        for _ in 0..10_000 {
            let s = sample_burgers_inputs(&cfg, &mut rng);
            assert!(s.nu >= 0.01 && s.nu <= 0.05);
            assert!(s.xi.iter().all(|x| (-1.0..=1.0).contains(x)));
        }
    }

    #[test]
    fn input_vector_round_trip() {
        let cfg = BurgersConfig::default();
        let i = BurgersInputs::nominal(&cfg);
        assert_eq!(BurgersInputs::from_slice(&cfg, &i.to_vec()).unwrap(), i);
        assert!(BurgersInputs::from_slice(&cfg, &[0.0; 3]).is_err());
    }
}
