//! Field snapshot files.
//!
//! A snapshot is one line of JSON header, a newline, then a raw payload of
//! little-endian `f64` pairs (re, im). Components vary fastest, then x¹, x², x³.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{BispinorField, GridSpec};
use crate::{Error, Physics, Result};

pub const FORMAT: &str = "lln-snapshot";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotHeader {
    pub format: String,
    pub version: u32,
    /// `bispinor` (φ₁, φ₂) or `potential` (U, ϖ₁, ϖ₂, ϖ₃ in the real parts).
    pub kind: String,
    pub grid: GridSpec,
    pub m: f64,
    pub hbar: f64,
    #[serde(rename = "G")]
    pub g_newton: f64,
    pub time: f64,
    #[serde(default = "one")]
    pub mass_scale: f64,
    pub components: usize,
    pub endianness: String,
    pub scalar: String,
}

fn one() -> f64 {
    1.0
}

impl SnapshotHeader {
    pub fn new(kind: &str, grid: GridSpec, physics: Physics, time: f64, components: usize) -> Self {
        SnapshotHeader {
            format: FORMAT.into(),
            version: 1,
            kind: kind.into(),
            grid,
            m: physics.m,
            hbar: physics.hbar,
            g_newton: physics.g_newton,
            time,
            mass_scale: 1.0,
            components,
            endianness: "little".into(),
            scalar: "f64-complex-interleaved".into(),
        }
    }

    pub fn physics(&self) -> Physics {
        Physics { m: self.m, hbar: self.hbar, g_newton: self.g_newton }
    }
}

pub fn write_raw<W: Write>(mut w: W, header: &SnapshotHeader, comps: &[&[C64]]) -> Result<()> {
    if comps.len() != header.components {
        return Err(Error::Validation("component count does not match header".into()));
    }
    serde_json::to_writer(&mut w, header)?;
    w.write_all(b"\n")?;
    let n = header.grid.len();
    let mut buf = Vec::with_capacity(n * comps.len() * 16);
    for i in 0..n {
        for c in comps {
            buf.extend_from_slice(&c[i].re.to_le_bytes());
            buf.extend_from_slice(&c[i].im.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Read a snapshot; rejects non-finite payload values.
pub fn read_raw<R: Read>(r: R) -> Result<(SnapshotHeader, Vec<Vec<C64>>)> {
    let mut r = BufReader::new(r);
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: SnapshotHeader = serde_json::from_str(line.trim_end())?;
    if header.format != FORMAT {
        return Err(Error::Validation(format!("unknown snapshot format {:?}", header.format)));
    }
    if header.endianness != "little" {
        return Err(Error::Validation("only little-endian payloads are supported".into()));
    }
    header.grid.validate()?;
    let n = header.grid.len();
    let nc = header.components;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != n * nc * 16 {
        return Err(Error::Validation(format!(
            "payload has {} bytes, expected {}",
            bytes.len(),
            n * nc * 16
        )));
    }
    let mut comps = vec![Vec::with_capacity(n); nc];
    let rd = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    for i in 0..n {
        for (c, comp) in comps.iter_mut().enumerate() {
            let o = (i * nc + c) * 16;
            let v = C64::new(rd(o), rd(o + 8));
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Validation(format!("non-finite value at node {i}, component {c}")));
            }
            comp.push(v);
        }
    }
    Ok((header, comps))
}

pub fn write_field(path: &Path, f: &BispinorField) -> Result<()> {
    let mut h = SnapshotHeader::new("bispinor", f.grid, f.physics, f.time, 2);
    h.mass_scale = f.mass_scale;
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_raw(file, &h, &[&f.phi[0], &f.phi[1]])
}

pub fn read_field(path: &Path) -> Result<BispinorField> {
    let (h, mut comps) = read_raw(std::fs::File::open(path)?)?;
    if h.kind != "bispinor" || h.components != 2 {
        return Err(Error::Validation(format!("expected a 2-component bispinor snapshot, got {:?}", h.kind)));
    }
    let phi1 = comps.pop().expect("two components");
    let phi0 = comps.pop().expect("two components");
    Ok(BispinorField { grid: h.grid, phi: [phi0, phi1], physics: h.physics(), time: h.time, mass_scale: h.mass_scale })
}
