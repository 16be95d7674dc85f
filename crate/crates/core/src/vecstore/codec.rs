//! NRCM: little-endian container for id-aligned `f32` matrices.
//!
//! ```text
//! magic    4 bytes  "NRCM"
//! version  u32      1
//! kind     u8       0 = embeddings, 1 = predictions
//! count    u64      number of rows
//! dim      u32      row width
//! ids      count × (u16 byte length, UTF-8 bytes)
//! labels   dim × (u16 byte length, UTF-8 bytes)    kind 1 only
//! values   count × dim f32, row-major
//! ```
//!
//! There is no padding and no trailing data.

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"NRCM";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 4 + 4 + 1 + 8 + 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Embeddings = 0,
    Predictions = 1,
}

impl MatrixKind {
    fn from_byte(b: u8) -> Result<Self> {
        match b {
            0 => Ok(MatrixKind::Embeddings),
            1 => Ok(MatrixKind::Predictions),
            other => Err(Error::Matrix(format!("unknown kind byte {other}"))),
        }
    }
}

/// Undecorated file contents. No semantic validation beyond the layout.
#[derive(Debug, Clone, PartialEq)]
pub struct RawMatrix {
    pub kind: MatrixKind,
    pub ids: Vec<String>,
    /// Column labels; empty for embeddings.
    pub labels: Vec<String>,
    pub dim: usize,
    pub values: Vec<f32>,
}

fn put_str(out: &mut Vec<u8>, s: &str, what: &str) -> Result<()> {
    let len = u16::try_from(s.len()).map_err(|_| {
        Error::Matrix(format!(
            "{what} `{}…` exceeds 65535 bytes",
            &s[..s.floor_char_boundary(32)]
        ))
    })?;
    out.extend_from_slice(&len.to_le_bytes());
    out.extend_from_slice(s.as_bytes());
    Ok(())
}

impl RawMatrix {
    pub fn count(&self) -> usize {
        self.ids.len()
    }

    pub fn encode(&self) -> Result<Vec<u8>> {
        let dim = u32::try_from(self.dim).map_err(|_| Error::Matrix("dim exceeds u32".into()))?;
        if self.dim == 0 {
            return Err(Error::Matrix("dim must be positive".into()));
        }
        if self.values.len() != self.ids.len() * self.dim {
            return Err(Error::LengthMismatch {
                expected: self.ids.len() * self.dim,
                found: self.values.len(),
            });
        }
        match self.kind {
            MatrixKind::Embeddings if !self.labels.is_empty() => {
                return Err(Error::Matrix("embedding matrices carry no labels".into()))
            }
            MatrixKind::Predictions if self.labels.len() != self.dim => {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: self.labels.len(),
                })
            }
            _ => {}
        }

        let mut out = Vec::with_capacity(HEADER_LEN + self.values.len() * 4 + self.ids.len() * 8);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(self.kind as u8);
        out.extend_from_slice(&(self.ids.len() as u64).to_le_bytes());
        out.extend_from_slice(&dim.to_le_bytes());
        for id in &self.ids {
            put_str(&mut out, id, "id")?;
        }
        for label in &self.labels {
            put_str(&mut out, label, "label")?;
        }
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        Ok(out)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4, "magic")? != MAGIC {
            return Err(Error::Matrix("bad magic, not an NRCM file".into()));
        }
        let version = r.u32("version")?;
        if version != VERSION {
            return Err(Error::Matrix(format!(
                "unsupported format version {version} (expected {VERSION})"
            )));
        }
        let kind = MatrixKind::from_byte(r.u8("kind")?)?;
        let count = r.u64("count")?;
        let dim = r.u32("dim")? as usize;
        if dim == 0 {
            return Err(Error::Matrix("dim must be positive".into()));
        }
        // every string entry takes at least its 2-byte length prefix
        let count = usize::try_from(count)
            .ok()
            .filter(|&c| c <= r.remaining() / 2)
            .ok_or_else(|| Error::Matrix(format!("truncated payload: {count} ids declared")))?;

        let mut ids = Vec::with_capacity(count);
        for i in 0..count {
            ids.push(r.string(&format!("id {i}"))?);
        }
        let mut labels = Vec::new();
        if kind == MatrixKind::Predictions {
            if dim > r.remaining() / 2 {
                return Err(Error::Matrix(format!("truncated payload: {dim} labels declared")));
            }
            labels.reserve(dim);
            for i in 0..dim {
                labels.push(r.string(&format!("label {i}"))?);
            }
        }

        let n_values = count
            .checked_mul(dim)
            .filter(|n| n.checked_mul(4).is_some())
            .ok_or_else(|| Error::Matrix("count × dim overflows".into()))?;
        let need = n_values * 4;
        if r.remaining() < need {
            return Err(Error::Matrix(format!(
                "truncated payload: {need} value bytes expected, {} present",
                r.remaining()
            )));
        }
        if r.remaining() > need {
            return Err(Error::Matrix(format!(
                "{} trailing bytes after values",
                r.remaining() - need
            )));
        }
        let values = r
            .take(need, "values")?
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Ok(RawMatrix {
            kind,
            ids,
            labels,
            dim,
            values,
        })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(Error::Matrix(format!("truncated payload while reading {what}")));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn string(&mut self, what: &str) -> Result<String> {
        let len = u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()) as usize;
        let raw = self.take(len, what)?;
        String::from_utf8(raw.to_vec()).map_err(|_| Error::Matrix(format!("{what} is not valid UTF-8")))
    }
}
