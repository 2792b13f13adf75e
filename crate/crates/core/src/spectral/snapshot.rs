//! `BQP1` binary snapshots.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4     | magic `b"BQP1"` |
//! | 4     | `u32` grid size `n` |
//! | 8     | `f64` box length `L` |
//! | 8     | `f64` time `t` |
//! | 8·n²  | samples of each stored field, row-major, in declared order |
//!
//! The file does not name its fields; the run manifest records the order.

use std::io::{Read, Write};

use super::field::ScalarField;
use super::grid::{Grid, GridRef};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"BQP1";
pub const HEADER_LEN: usize = 24;

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub n: u32,
    pub length: f64,
    pub t: f64,
    /// One `n·n` sample vector per stored field.
    pub fields: Vec<Vec<f64>>,
}

impl Snapshot {
    pub fn from_fields(t: f64, fields: &[&ScalarField]) -> Result<Self> {
        let first = fields
            .first()
            .ok_or_else(|| Error::Argument("snapshot needs at least one field".into()))?;
        let grid = first.grid();
        if fields.iter().any(|f| !f.same_grid(first)) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            n: grid.n() as u32,
            length: grid.length(),
            t,
            fields: fields.iter().map(|f| f.values().to_vec()).collect(),
        })
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let mut buf = Vec::with_capacity(HEADER_LEN + self.fields.len() * 8 * self.fields.first().map_or(0, Vec::len));
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&self.n.to_le_bytes());
        buf.extend_from_slice(&self.length.to_le_bytes());
        buf.extend_from_slice(&self.t.to_le_bytes());
        let nn = (self.n as usize) * (self.n as usize);
        for f in &self.fields {
            if f.len() != nn {
                return Err(Error::Format(format!("field has {} samples, expected {nn}", f.len())));
            }
            for v in f {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::decode(&bytes)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
            return Err(Error::Format("missing BQP1 header".into()));
        }
        let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        let length = f64::from_le_bytes(bytes[8..16].try_into().unwrap());
        let t = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
        let nn = (n as usize) * (n as usize);
        let body = &bytes[HEADER_LEN..];
        if nn == 0 || body.len() % (8 * nn) != 0 {
            return Err(Error::Format(format!(
                "payload of {} bytes is not a whole number of {n}x{n} fields",
                body.len()
            )));
        }
        let fields = body
            .chunks_exact(8 * nn)
            .map(|chunk| {
                chunk
                    .chunks_exact(8)
                    .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
                    .collect()
            })
            .collect();
        Ok(Self { n, length, t, fields })
    }

    /// Rebuilds field `i` on `grid`, which must match the stored header.
    pub fn field(&self, grid: &GridRef, i: usize) -> Result<ScalarField> {
        if grid.n() != self.n as usize || grid.length().to_bits() != self.length.to_bits() {
            return Err(Error::Format("snapshot grid differs from requested grid".into()));
        }
        let values = self
            .fields
            .get(i)
            .ok_or_else(|| Error::Format(format!("snapshot has no field {i}")))?
            .clone();
        ScalarField::from_values(grid, values)
    }

    pub fn grid(&self, dealias_fraction: f64) -> Result<GridRef> {
        Grid::with_dealias(self.n as usize, self.length, dealias_fraction)
    }
}
