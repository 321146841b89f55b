//! Euler–Bernoulli model of a composite cantilever under a uniform load.
//!
//! The three-part section (top flange, web, bottom flange) is converted to an
//! equivalent single-material section of modulus `E = ξ₃` by scaling the flange
//! widths to `w₁ = (ξ₁/ξ₃) w` and `w₂ = (ξ₂/ξ₃) w`. The web holes are ignored.
//! The deflection under the distributed load is
//! `u(x) = −q L⁴ / (24 E Iₙ) · ((x/L)⁴ − 4 (x/L)³ + 6 (x/L)²)` with `q = ξ₄`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct BeamConfig {
    pub length: f64,
    /// Top flange thickness.
    pub h1: f64,
    /// Bottom flange thickness.
    pub h2: f64,
    /// Web height.
    pub h3: f64,
    /// Web width (and the reference flange width).
    pub w: f64,
    /// Hole radius; carried for completeness, unused by the LF model.
    pub r: f64,
    /// Ranges of (ξ₁, ξ₂, ξ₃, ξ₄): flange moduli, web modulus, load.
    pub ranges: [(f64, f64); 4],
    pub points: usize,
}

impl Default for BeamConfig {
    fn default() -> Self {
        Self {
            length: 50.0,
            h1: 0.1,
            h2: 0.1,
            h3: 5.0,
            w: 1.0,
            r: 1.5,
            ranges: [(0.9e6, 1.1e6), (0.9e6, 1.1e6), (0.9e4, 1.1e4), (9.0, 11.0)],
            points: 128,
        }
    }
}

impl BeamConfig {
    pub fn validate(&self) -> Result<()> {
        let geo = [self.length, self.h1, self.h2, self.h3, self.w];
        if geo.iter().any(|&g| !(g > 0.0 && g.is_finite())) {
            return Err(Error::InvalidConfig("beam geometry must be positive".into()));
        }
        if self.ranges.iter().any(|&(lo, hi)| !(lo <= hi) || lo <= 0.0) {
            return Err(Error::InvalidConfig("beam input ranges must be ordered and positive".into()));
        }
        if self.points < 2 {
            return Err(Error::InvalidConfig("beam needs at least two output points".into()));
        }
        Ok(())
    }

    /// Equispaced output nodes on `[0, L]`, both ends included.
    pub fn nodes(&self) -> Vec<f64> {
        super::resample::uniform_nodes(0.0, self.length, self.points - 1)
    }
}

pub fn sample_beam_inputs<R: Rng + ?Sized>(cfg: &BeamConfig, rng: &mut R) -> [f64; 4] {
    let mut xi = [0.0; 4];
    for (x, &(lo, hi)) in xi.iter_mut().zip(&cfg.ranges) {
        let u: f64 = rng.random();
        *x = lo + (hi - lo) * u;
    }
    xi
}

/// Second moment of area of the transformed section about its neutral axis.
pub fn transformed_inertia(cfg: &BeamConfig, xi: &[f64; 4]) -> Result<f64> {
    let e = xi[2];
    let w1 = xi[0] / e * cfg.w;
    let w2 = xi[1] / e * cfg.w;
    // (width, height, centroid height from the bottom fibre)
    let parts = [
        (w2, cfg.h2, cfg.h2 / 2.0),
        (cfg.w, cfg.h3, cfg.h2 + cfg.h3 / 2.0),
        (w1, cfg.h1, cfg.h2 + cfg.h3 + cfg.h1 / 2.0),
    ];
    let area: f64 = parts.iter().map(|&(b, h, _)| b * h).sum();
    let ybar = parts.iter().map(|&(b, h, y)| b * h * y).sum::<f64>() / area;
    let inertia: f64 = parts
        .iter()
        .map(|&(b, h, y)| b * h * h * h / 12.0 + b * h * (y - ybar) * (y - ybar))
        .sum();
    if !(inertia > 0.0 && inertia.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "non-positive transformed inertia {inertia}"
        )));
    }
    Ok(inertia)
}

/// Vertical displacement at the configured output nodes.
pub fn beam_lf_displacement<T: Scalar>(cfg: &BeamConfig, xi: &[f64; 4]) -> Result<Vec<T>> {
    let inertia = transformed_inertia(cfg, xi)?;
    let (e, q, l) = (xi[2], xi[3], cfg.length);
    let amp = q * l.powi(4) / (24.0 * e * inertia);
    Ok(cfg
        .nodes()
        .iter()
        .map(|&x| {
            let s = x / l;
            T::of(-amp * (s.powi(4) - 4.0 * s.powi(3) + 6.0 * s * s))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    const NOMINAL: [f64; 4] = [1e6, 1e6, 1e4, 10.0];

    #[test]
    fn endpoints() {
        let cfg = BeamConfig::default();
        let u: Vec<f64> = beam_lf_displacement(&cfg, &NOMINAL).unwrap();
        assert_eq!(u.len(), 128);
        assert_eq!(u[0], 0.0);
        let i = transformed_inertia(&cfg, &NOMINAL).unwrap();
        let tip = -10.0 * 50f64.powi(4) / (8.0 * 1e4 * i);
        assert!(((u[127] - tip) / tip).abs() < 1e-12);
    }

    #[test]
    fn nominal_inertia_hand_value() {
        // symmetric section: flanges 100 × 0.1 at ±2.55 from the centroid, web 1 × 5
        let want = 2.0 * (100.0 * 0.001 / 12.0 + 10.0 * 2.55 * 2.55) + 125.0 / 12.0;
        let got = transformed_inertia(&BeamConfig::default(), &NOMINAL).unwrap();
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn degenerate_range_returns_endpoint() {
        let mut cfg = BeamConfig::default();
        cfg.ranges[3] = (10.0, 10.0);
        let mut rng = stream(1, Stream::DataGen, 0);
        for _ in 0..10 {
            assert_eq!(sample_beam_inputs(&cfg, &mut rng)[3], 10.0);
        }
    }

    #[test]
    fn inputs_stay_in_range_and_centre() {
        let cfg = BeamConfig::default();
        let mut rng = stream(2, Stream::DataGen, 0);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let xi = sample_beam_inputs(&cfg, &mut rng);
            for (x, &(lo, hi)) in xi.iter().zip(&cfg.ranges) {
                assert!(*x >= lo && *x <= hi);
            }
            sum += xi[3];
        }
        let se = (4.0f64 / 12.0 / n as f64).sqrt();
        assert!((sum / n as f64 - 10.0).abs() < 3.0 * se);
    }
}
