//! Flat binary serialization of [`GridField`].
//!
//! Layout, all little-endian:
//!
//! ```text
//! b"CMGF"  u16 version  u8 representation (0 space, 1 frequency)  u8 ndim
//! ndim × (f64 extent, u32 n)
//! Π n × (f64 re, f64 im)        row-major, last axis fastest
//! ```

use std::io::{self, Read, Write};

use crate::grid::{Axis, GridField, Representation, MAX_AXES};
use crate::Complex64;

pub const MAGIC: &[u8; 4] = b"CMGF";
pub const VERSION: u16 = 1;

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

pub fn write_field<W: Write>(f: &GridField, mut w: W) -> io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    let repr = match f.representation() {
        Representation::Space => 0u8,
        Representation::Frequency => 1u8,
    };
    w.write_all(&[repr, f.ndim() as u8])?;
    for a in f.axes() {
        w.write_all(&a.extent.to_le_bytes())?;
        w.write_all(&(a.n as u32).to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(16 * f.len());
    for v in f.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> io::Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

pub fn read_field<R: Read>(mut r: R) -> io::Result<GridField> {
    if &read_array::<4, _>(&mut r)? != MAGIC {
        return Err(invalid("not a field file (bad magic)"));
    }
    let version = u16::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(invalid(format!("unsupported field format version {version}")));
    }
    let [repr, ndim] = read_array::<2, _>(&mut r)?;
    let repr = match repr {
        0 => Representation::Space,
        1 => Representation::Frequency,
        t => return Err(invalid(format!("unknown representation tag {t}"))),
    };
    if ndim == 0 || ndim as usize > MAX_AXES {
        return Err(invalid(format!("field has {ndim} axes")));
    }
    let mut axes = Vec::with_capacity(ndim as usize);
    for _ in 0..ndim {
        let extent = f64::from_le_bytes(read_array(&mut r)?);
        let n = u32::from_le_bytes(read_array(&mut r)?) as usize;
        axes.push(Axis::new(extent, n).map_err(|e| invalid(e.to_string()))?);
    }
    let total: usize = axes.iter().map(|a| a.n).product();
    let mut buf = vec![0u8; 16 * total];
    r.read_exact(&mut buf)?;
    let mut rest = Vec::new();
    if r.read_to_end(&mut rest)? > 0 {
        return Err(invalid("trailing bytes after field payload"));
    }
    let values = buf
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    GridField::new(axes, values, repr).map_err(|e| invalid(e.to_string()))
}
