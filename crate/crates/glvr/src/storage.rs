//! Shared persistence: the GLVT tensor format, PGM/PPM image emission,
//! and atomic file writes.
//!
//! All multi-byte integers and floats are little-endian; payload floats are
//! `f64`. Readers validate fully before returning anything: a malformed
//! file never produces a partial value. Byte-level layouts are documented
//! in `docs/formats.md`.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

pub const TENSOR_MAGIC: [u8; 4] = *b"GLVT";
pub const CHECKPOINT_MAGIC: [u8; 4] = *b"GLVR";
pub const FORMAT_VERSION: u32 = 1;

/// Sequential little-endian reader over a fully loaded byte buffer.
/// Shortage errors report the total bytes needed so far versus available.
pub(crate) struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(buf: &'a [u8]) -> Self {
        Cursor { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).ok_or(Error::Truncated {
            expected: u64::MAX,
            actual: self.buf.len() as u64,
        })?;
        if end > self.buf.len() {
            return Err(Error::Truncated {
                expected: end as u64,
                actual: self.buf.len() as u64,
            });
        }
        let slice = &self.buf[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    pub(crate) fn read_magic(&mut self, expected: [u8; 4]) -> Result<()> {
        let got = self.take(4)?;
        let actual = [got[0], got[1], got[2], got[3]];
        if actual != expected {
            return Err(Error::BadMagic { expected, actual });
        }
        Ok(())
    }

    pub(crate) fn read_version(&mut self) -> Result<()> {
        let v = self.read_u32()?;
        if v != FORMAT_VERSION {
            return Err(Error::Version {
                expected: FORMAT_VERSION,
                actual: v,
            });
        }
        Ok(())
    }

    pub(crate) fn read_u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn read_u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub(crate) fn read_u64(&mut self) -> Result<u64> {
        let b = self.take(8)?;
        Ok(u64::from_le_bytes(b.try_into().unwrap()))
    }

    pub(crate) fn read_f64_vec(&mut self, count: usize) -> Result<Vec<f64>> {
        let bytes = self.take(count * 8)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    pub(crate) fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::invalid(format!(
                "trailing bytes: {} past end of payload",
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }
}

pub(crate) fn push_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}

pub(crate) fn push_u64(buf: &mut Vec<u8>, v: u64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

pub(crate) fn push_f64_slice(buf: &mut Vec<u8>, vs: &[f64]) {
    buf.reserve(vs.len() * 8);
    for v in vs {
        buf.extend_from_slice(&v.to_le_bytes());
    }
}

/// Serializes a tensor: magic "GLVT", version, rank, dims, row-major f64 data.
pub fn tensor_to_bytes(tensor: &Tensor) -> Result<Vec<u8>> {
    if tensor.rank() == 0 {
        return Err(Error::invalid("rank-0 tensors cannot be serialized"));
    }
    let mut buf = Vec::with_capacity(16 + tensor.rank() * 4 + tensor.len() * 8);
    buf.extend_from_slice(&TENSOR_MAGIC);
    push_u32(&mut buf, FORMAT_VERSION);
    push_u32(&mut buf, tensor.rank() as u32);
    for &d in tensor.shape() {
        let d = u32::try_from(d).map_err(|_| Error::invalid("dimension exceeds u32"))?;
        push_u32(&mut buf, d);
    }
    push_f64_slice(&mut buf, tensor.data());
    Ok(buf)
}

pub fn tensor_from_bytes(bytes: &[u8]) -> Result<Tensor> {
    let mut cur = Cursor::new(bytes);
    cur.read_magic(TENSOR_MAGIC)?;
    cur.read_version()?;
    let rank = cur.read_u32()? as usize;
    if rank == 0 {
        return Err(Error::invalid("rank 0 is not a valid tensor"));
    }
    let mut shape = Vec::with_capacity(rank);
    for _ in 0..rank {
        shape.push(cur.read_u32()? as usize);
    }
    let count = shape
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::invalid("tensor shape overflows usize"))?;
    let data = cur.read_f64_vec(count)?;
    cur.finish()?;
    let tensor = Tensor::new(shape, data)?;
    if !tensor.is_finite() {
        return Err(Error::invalid("tensor file contains non-finite values"));
    }
    Ok(tensor)
}

pub fn write_tensor(path: impl AsRef<Path>, tensor: &Tensor) -> Result<()> {
    atomic_write(path.as_ref(), &tensor_to_bytes(tensor)?)
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor> {
    tensor_from_bytes(&fs::read(path)?)
}

/// Maps a value in `[-1, 1]` to a byte with round-half-up, clamped to
/// `[0, 255]`. Inputs may exceed the range by at most `1e-6`.
fn to_byte(v: f64) -> Result<u8> {
    if !v.is_finite() || !(-1.0 - 1e-6..=1.0 + 1e-6).contains(&v) {
        return Err(Error::invalid(format!(
            "pixel value {v} outside [-1, 1]"
        )));
    }
    let scaled = ((v + 1.0) * 127.5).round(); // round half away from zero = half up for v >= -1
    Ok(scaled.clamp(0.0, 255.0) as u8)
}

/// Renders a `[h, w]` tensor as binary PGM (P5) or a `[3, h, w]` tensor as
/// binary PPM (P6), mapping `[-1, 1]` to `[0, 255]`.
pub fn image_bytes(tensor: &Tensor) -> Result<Vec<u8>> {
    match tensor.shape() {
        [h, w] => {
            let mut buf = format!("P5\n{w} {h}\n255\n").into_bytes();
            for &v in tensor.data() {
                buf.push(to_byte(v)?);
            }
            Ok(buf)
        }
        [3, h, w] => {
            let mut buf = format!("P6\n{w} {h}\n255\n").into_bytes();
            let plane = h * w;
            let data = tensor.data();
            for i in 0..plane {
                for c in 0..3 {
                    buf.push(to_byte(data[c * plane + i])?);
                }
            }
            Ok(buf)
        }
        other => Err(Error::dim(
            "image tensor",
            "[h, w] or [3, h, w]",
            format!("{other:?}"),
        )),
    }
}

pub fn write_image(path: impl AsRef<Path>, tensor: &Tensor) -> Result<()> {
    atomic_write(path.as_ref(), &image_bytes(tensor)?)
}

/// Writes via a temp file in the target directory plus rename, so readers
/// never observe a half-written file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    use std::io::Write;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
