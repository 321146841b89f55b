//! `BFQD` dataset files and headerless CSV ingestion.
//!
//! Binary layout, little-endian:
//!
//! ```text
//! "BFQD" | version u16 = 1 | kind u8 | D u32 | rows u64
//! rows × width f64            (width = D, or 2D for paired rows [x_L | x_H])
//! per row: len u32 | len × f64   (input log; len = 0 when unknown)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::bytes::{Reader, Writer};
use crate::bifi::{BiFiDataset, DatasetMeta};
use crate::error::{check_len, Error, Result};
use crate::ndcore::Matrix;

const MAGIC: &[u8; 4] = b"BFQD";
const VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataKind {
    LfOnly = 0,
    HfOnly = 1,
    Paired = 2,
}

impl DataKind {
    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(DataKind::LfOnly),
            1 => Some(DataKind::HfOnly),
            2 => Some(DataKind::Paired),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DataKind::LfOnly => "lf_only",
            DataKind::HfOnly => "hf_only",
            DataKind::Paired => "paired",
        }
    }

    pub fn row_width(self, dim: usize) -> usize {
        match self {
            DataKind::Paired => 2 * dim,
            _ => dim,
        }
    }
}

impl std::str::FromStr for DataKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "lf_only" | "lf" => Ok(DataKind::LfOnly),
            "hf_only" | "hf" => Ok(DataKind::HfOnly),
            "paired" => Ok(DataKind::Paired),
            other => Err(format!("unknown data kind `{other}`")),
        }
    }
}

/// Rows of one fidelity, or row-aligned LF/HF pairs, with their input log.
#[derive(Debug, Clone, PartialEq)]
pub struct QoiDataset {
    pub kind: DataKind,
    dim: usize,
    rows: Matrix<f64>,
    /// Per-row input vectors, empty when the data was ingested without them.
    pub inputs: Vec<Vec<f64>>,
}

impl QoiDataset {
    pub fn new(kind: DataKind, dim: usize, rows: Matrix<f64>, inputs: Vec<Vec<f64>>) -> Result<Self> {
        if rows.rows() > 0 || rows.cols() > 0 {
            check_len("dataset row width", kind.row_width(dim), rows.cols())?;
        }
        if !inputs.is_empty() {
            check_len("input log length", rows.rows(), inputs.len())?;
        }
        let rows = if rows.rows() == 0 {
            Matrix::zeros(0, kind.row_width(dim))
        } else {
            rows
        };
        Ok(Self {
            kind,
            dim,
            rows,
            inputs,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.rows() == 0
    }

    /// Raw rows as stored (paired rows are `[x_L | x_H]`).
    pub fn rows(&self) -> &Matrix<f64> {
        &self.rows
    }

    fn half(&self, right: bool) -> Matrix<f64> {
        let d = self.dim;
        let mut out = Vec::with_capacity(self.len() * d);
        for r in self.rows.iter_rows() {
            out.extend_from_slice(if right { &r[d..] } else { &r[..d] });
        }
        Matrix::from_vec(self.len(), d, out).expect("finite rows")
    }

    pub fn lf(&self) -> Option<Matrix<f64>> {
        match self.kind {
            DataKind::LfOnly => Some(self.rows.clone()),
            DataKind::Paired => Some(self.half(false)),
            DataKind::HfOnly => None,
        }
    }

    pub fn hf(&self) -> Option<Matrix<f64>> {
        match self.kind {
            DataKind::HfOnly => Some(self.rows.clone()),
            DataKind::Paired => Some(self.half(true)),
            DataKind::LfOnly => None,
        }
    }

    pub fn to_pairs(&self) -> Result<BiFiDataset<f64>> {
        if self.kind != DataKind::Paired {
            return Err(Error::InvalidConfig(format!(
                "expected paired data, found {}",
                self.kind.name()
            )));
        }
        Ok(BiFiDataset::new(self.half(false), self.half(true))?.with_meta(DatasetMeta {
            problem: String::new(),
            seed: None,
            inputs: self.inputs.clone(),
        }))
    }

    pub fn head(&self, n: usize) -> Self {
        let n = n.min(self.len());
        Self {
            kind: self.kind,
            dim: self.dim,
            rows: self.rows.head(n),
            inputs: self.inputs.iter().take(n).cloned().collect(),
        }
    }

    pub fn write_bfqd<W: Write>(&self, w: W) -> Result<()> {
        let mut w = Writer::new(w);
        w.bytes(MAGIC)?;
        w.u16(VERSION)?;
        w.u8(self.kind as u8)?;
        w.u32(self.dim)?;
        w.u64(self.len() as u64)?;
        w.f64s(self.rows.as_slice().iter().copied())?;
        for i in 0..self.len() {
            match self.inputs.get(i) {
                Some(inp) => {
                    w.u32(inp.len())?;
                    w.f64s(inp.iter().copied())?;
                }
                None => w.u32(0)?,
            }
        }
        w.finish()?;
        Ok(())
    }

    pub fn read_bfqd<R: Read>(r: R) -> Result<Self> {
        let mut r = Reader::new(r);
        if &r.array::<4>("magic")? != MAGIC {
            return Err(Error::Format("not a BFQD dataset (bad magic)".into()));
        }
        let version = r.u16("version")?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported BFQD version {version}")));
        }
        let tag = r.u8("kind")?;
        let kind = DataKind::from_tag(tag)
            .ok_or_else(|| Error::Format(format!("unknown dataset kind {tag}")))?;
        let dim = r.u32("dimension")?;
        let n = usize::try_from(r.u64("row count")?)
            .map_err(|_| Error::Format("row count overflows".into()))?;
        let width = kind.row_width(dim);
        let data = r.f64s(n * width, "rows")?;
        let rows = Matrix::from_vec(n, width, data)
            .map_err(|e| Error::Format(format!("dataset rows: {e}")))?;
        let mut inputs = Vec::with_capacity(n);
        for _ in 0..n {
            let len = r.u32("input log length")?;
            inputs.push(r.f64s(len, "input log")?);
        }
        r.expect_end()?;
        if inputs.iter().all(Vec::is_empty) {
            inputs.clear();
        }
        Self::new(kind, dim, rows, inputs)
    }

    /// Headerless CSV: one sample per line, `dim` columns (`2 dim` if paired).
    pub fn read_csv<R: Read>(r: R, kind: DataKind) -> Result<Self> {
        let mut text = String::new();
        BufReader::new(r).read_to_string(&mut text)?;
        let mut rows = Matrix::zeros(0, 0);
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|f| {
                    f.trim().parse::<f64>().map_err(|e| {
                        Error::Format(format!("line {}: `{}`: {e}", ln + 1, f.trim()))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push_row(&row)
                .map_err(|e| Error::Format(format!("line {}: {e}", ln + 1)))?;
        }
        if rows.rows() == 0 {
            return Err(Error::Empty("CSV dataset"));
        }
        let width = rows.cols();
        let dim = match kind {
            DataKind::Paired if width % 2 != 0 => {
                return Err(Error::Format(format!(
                    "paired CSV needs an even column count, got {width}"
                )))
            }
            DataKind::Paired => width / 2,
            _ => width,
        };
        Self::new(kind, dim, rows, Vec::new())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut w = BufWriter::new(w);
        for r in self.rows.iter_rows() {
            let line: Vec<String> = r.iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Loads a `.csv` (of the given kind) or a BFQD file.
    pub fn load(path: &Path, csv_kind: DataKind) -> Result<Self> {
        let f = File::open(path)?;
        if is_csv(path) {
            Self::read_csv(f, csv_kind)
        } else {
            Self::read_bfqd(BufReader::new(f))
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = BufWriter::new(File::create(path)?);
        if is_csv(path) {
            self.write_csv(f)
        } else {
            self.write_bfqd(f)
        }
    }
}

pub fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}
