//! TNSR1 binary tensor files.
//!
//! Layout: magic `TNSR`, version byte `1`, `u32` order K, K `u32` extents,
//! then `∏ d_k` `f64` values in column-major order. All integers and floats
//! are little-endian.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

pub const MAGIC: &[u8; 4] = b"TNSR";
pub const VERSION: u8 = 1;

pub fn write_tensor<W: Write>(mut w: W, t: &DenseTensor) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&[VERSION])?;
    let order = u32::try_from(t.order())
        .map_err(|_| Error::InvalidDims("order does not fit in u32".into()))?;
    w.write_all(&order.to_le_bytes())?;
    for &d in t.dims() {
        let d = u32::try_from(d)
            .map_err(|_| Error::InvalidDims(format!("extent {d} does not fit in u32")))?;
        w.write_all(&d.to_le_bytes())?;
    }
    for x in t.data() {
        w.write_all(&x.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reader that tracks its byte offset for error reporting.
struct Cursor<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> Cursor<R> {
    fn fill(&mut self, buf: &mut [u8], what: &str) -> Result<()> {
        let mut got = 0;
        while got < buf.len() {
            match self.inner.read(&mut buf[got..]) {
                Ok(0) => {
                    return Err(Error::Format {
                        offset: self.offset + got as u64,
                        reason: format!("unexpected end of data while reading {what}"),
                    })
                }
                Ok(n) => got += n,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
        self.offset += buf.len() as u64;
        Ok(())
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        let mut b = [0u8; 4];
        self.fill(&mut b, what)?;
        Ok(u32::from_le_bytes(b))
    }

    fn bad(&self, at: u64, reason: impl Into<String>) -> Error {
        Error::Format {
            offset: at,
            reason: reason.into(),
        }
    }
}

pub fn read_tensor<R: Read>(r: R) -> Result<DenseTensor> {
    let mut cur = Cursor { inner: r, offset: 0 };

    let mut magic = [0u8; 4];
    cur.fill(&mut magic, "magic")?;
    if &magic != MAGIC {
        return Err(cur.bad(0, format!("bad magic {magic:?}")));
    }
    let mut version = [0u8; 1];
    cur.fill(&mut version, "version")?;
    if version[0] != VERSION {
        return Err(cur.bad(4, format!("unsupported version {}", version[0])));
    }

    let order_at = cur.offset;
    let order = cur.u32("order")? as usize;
    if order < 2 {
        return Err(cur.bad(order_at, format!("tensor order must be at least 2, got {order}")));
    }

    let mut dims = Vec::with_capacity(order.min(64));
    let mut len: usize = 1;
    for k in 0..order {
        let at = cur.offset;
        let d = cur.u32(&format!("extent {k}"))? as usize;
        if d == 0 {
            return Err(cur.bad(at, format!("extent {k} is zero")));
        }
        len = len
            .checked_mul(d)
            .filter(|n| n.checked_mul(8).is_some())
            .ok_or_else(|| cur.bad(at, "element count overflows"))?;
        dims.push(d);
    }

    let mut data = Vec::with_capacity(len.min(1 << 24));
    let mut b = [0u8; 8];
    for i in 0..len {
        cur.fill(&mut b, &format!("element {i}"))?;
        data.push(f64::from_le_bytes(b));
    }

    let mut extra = [0u8; 1];
    let end = cur.offset;
    if cur.inner.read(&mut extra)? != 0 {
        return Err(cur.bad(end, "trailing bytes after tensor payload"));
    }

    DenseTensor::new(dims, data)
}

pub fn save(path: impl AsRef<Path>, t: &DenseTensor) -> Result<()> {
    write_tensor(BufWriter::new(File::create(path)?), t)
}

pub fn load(path: impl AsRef<Path>) -> Result<DenseTensor> {
    read_tensor(BufReader::new(File::open(path)?))
}
