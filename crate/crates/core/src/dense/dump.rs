//! Binary operator dump.
//!
//! A 16-byte header (`QCPD`, `d` as u32 LE, `N` as u32 LE, the leg tag)
//! followed by `(re, im)` pairs of little-endian f64 in row-major order.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DUMP_MAGIC: [u8; 4] = *b"QCPD";

/// Leg ordering `[System 1 | System 0 | System 2]`, padded to four bytes.
pub const LEG_TAG: [u8; 4] = [1, 0, 2, 0];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DumpHeader {
    pub d: u32,
    pub n: u32,
}

impl DumpHeader {
    pub fn dim(&self) -> Option<usize> {
        (self.d as usize).checked_pow(self.n)
    }
}

pub fn write_operator<W: Write>(mut w: W, header: DumpHeader, matrix: &DMatrix<Complex64>) -> Result<()> {
    let dim = header.dim().ok_or_else(|| Error::Dump("dimension overflows".into()))?;
    if matrix.nrows() != dim || matrix.ncols() != dim {
        return Err(Error::Shape(format!("{}x{} matrix for d^N = {dim}", matrix.nrows(), matrix.ncols())));
    }
    let mut buf = Vec::with_capacity(16 + dim * dim * 16);
    buf.extend_from_slice(&DUMP_MAGIC);
    buf.extend_from_slice(&header.d.to_le_bytes());
    buf.extend_from_slice(&header.n.to_le_bytes());
    buf.extend_from_slice(&LEG_TAG);
    for i in 0..dim {
        for j in 0..dim {
            let z = matrix[(i, j)];
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_operator<R: Read>(mut r: R) -> Result<(DumpHeader, DMatrix<Complex64>)> {
    let mut head = [0u8; 16];
    r.read_exact(&mut head).map_err(|_| Error::Dump("truncated header".into()))?;
    if head[0..4] != DUMP_MAGIC {
        return Err(Error::Dump("bad magic".into()));
    }
    if head[12..16] != LEG_TAG {
        return Err(Error::Dump(format!("unknown leg tag {:?}", &head[12..16])));
    }
    let header = DumpHeader {
        d: u32::from_le_bytes(head[4..8].try_into().expect("4 bytes")),
        n: u32::from_le_bytes(head[8..12].try_into().expect("4 bytes")),
    };
    let dim = header.dim().ok_or_else(|| Error::Dump("dimension overflows".into()))?;
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() != dim * dim * 16 {
        return Err(Error::Dump(format!("expected {} payload bytes, found {}", dim * dim * 16, body.len())));
    }
    let f = |o: usize| f64::from_le_bytes(body[o..o + 8].try_into().expect("8 bytes"));
    let matrix = DMatrix::from_fn(dim, dim, |i, j| {
        let o = (i * dim + j) * 16;
        Complex64::new(f(o), f(o + 8))
    });
    Ok((header, matrix))
}
