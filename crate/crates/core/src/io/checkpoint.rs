//! `BFVC` model checkpoints.
//!
//! Layout, little-endian:
//!
//! ```text
//! "BFVC" | version u16 = 1 | kind u8 (0 = VAE, 1 = BF-VAE)
//! encoder: layers u32, per layer (in u32, out u32, activation u8)
//! decoder: same
//! standardization: D u32, mean D × f64, scale D × f64
//! encoder parameters, then decoder parameters: per layer W (row-major), b
//! BF-VAE only: a d × f64, b d × f64, gamma f64
//! beta f64
//! ```
//!
//! Values are stored as `f64`; `f32` models round-trip exactly through the
//! widening conversion.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::bytes::{Reader, Writer};
use crate::bifi::{BfVaeModel, LatentAutoRegressor};
use crate::error::{Error, Result};
use crate::ndcore::{Activation, Layer, Matrix, Mlp};
use crate::vae::{Standardizer, VaeModel};
use crate::Scalar;

const MAGIC: &[u8; 4] = b"BFVC";
const VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Checkpoint<T> {
    Vae(VaeModel<T>),
    BfVae(BfVaeModel<T>),
}

impl<T: Scalar> Checkpoint<T> {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Checkpoint::Vae(_) => "vae",
            Checkpoint::BfVae(_) => "bf-vae",
        }
    }

    /// The VAE (for a BF-VAE, the underlying encoder/decoder model).
    pub fn vae(&self) -> &VaeModel<T> {
        match self {
            Checkpoint::Vae(m) => m,
            Checkpoint::BfVae(m) => m.base(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.vae().ambient_dim()
    }

    pub fn write<W: Write>(&self, w: W) -> Result<()> {
        let mut w = Writer::new(w);
        w.bytes(MAGIC)?;
        w.u16(VERSION)?;
        let (vae, reg) = match self {
            Checkpoint::Vae(m) => (m, None),
            Checkpoint::BfVae(m) => (m.base(), Some(m.regressor())),
        };
        w.u8(if reg.is_some() { 1 } else { 0 })?;
        for net in [vae.encoder(), vae.decoder()] {
            w.u32(net.num_layers())?;
            for l in net.layers() {
                w.u32(l.in_dim())?;
                w.u32(l.out_dim())?;
                w.u8(l.activation.tag())?;
            }
        }
        let s = vae.standardizer();
        w.u32(s.dim())?;
        w.f64s(s.mean.iter().map(|v| v.to_f64_lossless()))?;
        w.f64s(s.scale.iter().map(|v| v.to_f64_lossless()))?;
        for net in [vae.encoder(), vae.decoder()] {
            write_mlp_params(&mut w, net)?;
        }
        if let Some(reg) = reg {
            w.f64s(reg.a.iter().map(|v| v.to_f64_lossless()))?;
            w.f64s(reg.b.iter().map(|v| v.to_f64_lossless()))?;
            w.f64(reg.gamma.to_f64_lossless())?;
        }
        w.f64(vae.beta().to_f64_lossless())?;
        w.finish()?;
        Ok(())
    }

    pub fn read<R: Read>(r: R) -> Result<Self> {
        let mut r = Reader::new(r);
        if &r.array::<4>("magic")? != MAGIC {
            return Err(Error::Format("not a BFVC checkpoint (bad magic)".into()));
        }
        let version = r.u16("version")?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported BFVC version {version}")));
        }
        let kind = r.u8("model kind")?;
        if kind > 1 {
            return Err(Error::Format(format!("unknown model kind {kind}")));
        }
        let enc_arch = read_arch(&mut r)?;
        let dec_arch = read_arch(&mut r)?;
        let dim = r.u32("standardization dimension")?;
        let mean = to_t(r.f64s(dim, "standardization mean")?);
        let scale = to_t(r.f64s(dim, "standardization scale")?);
        let encoder = read_mlp(&mut r, &enc_arch)?;
        let decoder = read_mlp(&mut r, &dec_arch)?;
        let d = decoder.in_dim();
        let reg = if kind == 1 {
            let a = to_t(r.f64s(d, "regressor scale")?);
            let b = to_t(r.f64s(d, "regressor shift")?);
            let gamma = T::of(r.f64("gamma")?);
            Some(LatentAutoRegressor::new(a, b, gamma)?)
        } else {
            None
        };
        let beta = T::of(r.f64("beta")?);
        r.expect_end()?;
        let vae = VaeModel::new(encoder, decoder, beta, Standardizer { mean, scale })
            .map_err(|e| Error::Format(format!("inconsistent checkpoint: {e}")))?;
        Ok(match reg {
            Some(reg) => Checkpoint::BfVae(BfVaeModel::new(vae, reg)?),
            None => Checkpoint::Vae(vae),
        })
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        Ok(buf)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read(BufReader::new(File::open(path)?))
    }
}

/// Little-endian `f64` serialization of an MLP's parameters in checkpoint order.
pub fn mlp_param_bytes<T: Scalar>(net: &Mlp<T>) -> Vec<u8> {
    net.param_slices()
        .iter()
        .flat_map(|s| s.iter())
        .flat_map(|v| v.to_f64_lossless().to_le_bytes())
        .collect()
}

fn write_mlp_params<W: Write, T: Scalar>(w: &mut Writer<W>, net: &Mlp<T>) -> Result<()> {
    w.bytes(&mlp_param_bytes(net))
}

fn to_t<T: Scalar>(v: Vec<f64>) -> Vec<T> {
    v.into_iter().map(T::of).collect()
}

fn read_arch<R: Read>(r: &mut Reader<R>) -> Result<Vec<(usize, usize, Activation)>> {
    let n = r.u32("layer count")?;
    if n == 0 || n > 1024 {
        return Err(Error::Format(format!("implausible layer count {n}")));
    }
    (0..n)
        .map(|_| {
            let i = r.u32("layer input width")?;
            let o = r.u32("layer output width")?;
            let tag = r.u8("activation")?;
            let act = Activation::from_tag(tag)
                .ok_or_else(|| Error::Format(format!("unknown activation tag {tag}")))?;
            Ok((i, o, act))
        })
        .collect()
}

fn read_mlp<R: Read, T: Scalar>(
    r: &mut Reader<R>,
    arch: &[(usize, usize, Activation)],
) -> Result<Mlp<T>> {
    let layers = arch
        .iter()
        .map(|&(i, o, act)| {
            let w = to_t(r.f64s(i * o, "weights")?);
            let b = to_t(r.f64s(o, "bias")?);
            Layer::new(Matrix::from_vec(o, i, w)?, b, act)
        })
        .collect::<Result<Vec<_>>>()?;
    Mlp::new(layers).map_err(|e| Error::Format(format!("inconsistent architecture: {e}")))
}
