//! Channel-matrix export.
//!
//! Binary layout, all integers and floats little-endian:
//!
//! | offset | size | field                                   |
//! |--------|------|-----------------------------------------|
//! | 0      | 4    | magic `b"CMAT"`                         |
//! | 4      | 4    | format version, `u32` = 1               |
//! | 8      | 8    | rows, `u64`                             |
//! | 16     | 8    | cols, `u64`                             |
//! | 24     | 4    | dtype tag, `u32`: 1 = complex128        |
//! | 28     | 4    | reserved, zero                          |
//! | 32     | 16·rows·cols | entries column-major, each `re: f64, im: f64` |
//!
//! JSON form (small matrices): `{"rows": R, "cols": C, "order": "column-major",
//! "data": [[re, im], ...]}`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

const MAGIC: &[u8; 4] = b"CMAT";
const VERSION: u32 = 1;
const DTYPE_COMPLEX128: u32 = 1;

pub fn write_matrix_binary<W: Write>(m: &CMatrix, mut w: W) -> std::io::Result<()> {
    let mut header = Vec::with_capacity(32);
    header.extend_from_slice(MAGIC);
    header.extend_from_slice(&VERSION.to_le_bytes());
    header.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    header.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    header.extend_from_slice(&DTYPE_COMPLEX128.to_le_bytes());
    header.extend_from_slice(&0u32.to_le_bytes());
    w.write_all(&header)?;
    let mut payload = Vec::with_capacity(16 * m.rows() * m.cols());
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            let z = m.get(i, j);
            payload.extend_from_slice(&z.re.to_le_bytes());
            payload.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    w.write_all(&payload)?;
    w.flush()
}

fn le_u32(b: &[u8]) -> u32 {
    u32::from_le_bytes(b.try_into().expect("4 bytes"))
}

fn le_u64(b: &[u8]) -> u64 {
    u64::from_le_bytes(b.try_into().expect("8 bytes"))
}

fn le_f64(b: &[u8]) -> f64 {
    f64::from_le_bytes(b.try_into().expect("8 bytes"))
}

pub fn read_matrix_binary<R: Read>(mut r: R) -> Result<CMatrix> {
    let mut header = [0u8; 32];
    r.read_exact(&mut header)
        .map_err(|e| Error::Serialization(format!("matrix header: {e}")))?;
    if &header[0..4] != MAGIC {
        return Err(Error::Serialization("bad matrix magic".into()));
    }
    let version = le_u32(&header[4..8]);
    if version != VERSION {
        return Err(Error::Serialization(format!(
            "unsupported matrix version {version}"
        )));
    }
    let rows = le_u64(&header[8..16]) as usize;
    let cols = le_u64(&header[16..24]) as usize;
    if le_u32(&header[24..28]) != DTYPE_COMPLEX128 {
        return Err(Error::Serialization("unsupported matrix dtype".into()));
    }
    let mut payload = vec![0u8; 16 * rows * cols];
    r.read_exact(&mut payload)
        .map_err(|e| Error::Serialization(format!("matrix payload: {e}")))?;
    let mut data = vec![C64::new(0.0, 0.0); rows * cols];
    for (k, chunk) in payload.chunks_exact(16).enumerate() {
        let (j, i) = (k / rows, k % rows);
        data[i * cols + j] = C64::new(le_f64(&chunk[..8]), le_f64(&chunk[8..]));
    }
    CMatrix::new(rows, cols, data)
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    order: String,
    data: Vec<[f64; 2]>,
}

pub fn matrix_to_json(m: &CMatrix) -> String {
    let mut data = Vec::with_capacity(m.rows() * m.cols());
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            let z = m.get(i, j);
            data.push([z.re, z.im]);
        }
    }
    let doc = MatrixJson {
        rows: m.rows(),
        cols: m.cols(),
        order: "column-major".into(),
        data,
    };
    serde_json::to_string(&doc).expect("matrix JSON is always serializable")
}

pub fn matrix_from_json(text: &str) -> Result<CMatrix> {
    let doc: MatrixJson =
        serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
    if doc.order != "column-major" {
        return Err(Error::Serialization(format!(
            "unsupported order {}",
            doc.order
        )));
    }
    if doc.data.len() != doc.rows * doc.cols {
        return Err(Error::Serialization(
            "matrix JSON entry count mismatch".into(),
        ));
    }
    let (rows, cols) = (doc.rows, doc.cols);
    let m = CMatrix::from_fn(rows, cols, |i, j| {
        let [re, im] = doc.data[j * rows + i];
        C64::new(re, im)
    });
    m.check_finite()?;
    Ok(m)
}
