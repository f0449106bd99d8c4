//! VSEM1 embedding payloads.
//!
//! Layout: the 5-byte magic `VSEM1`, a little-endian `u32` frame count, a
//! little-endian `u32` dimension, then `count * dim` little-endian `f32`
//! values in frame-major order.

use std::io::{Read, Write};

use super::FrameEmbedding;

pub const MAGIC: &[u8; 5] = b"VSEM1";
pub const HEADER_LEN: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PayloadHeader {
    pub frames: u32,
    pub dimension: u32,
}

#[derive(Debug, thiserror::Error)]
pub enum PayloadError {
    #[error("bad magic {0:?}")]
    BadMagic([u8; 5]),
    #[error("truncated payload")]
    Truncated,
    #[error("zero dimension")]
    ZeroDimension,
    #[error("non-finite value at frame {frame}")]
    NonFinite { frame: usize },
    #[error("trailing bytes after {0} frames")]
    Trailing(u32),
    #[error(transparent)]
    Io(std::io::Error),
}

fn read_exact_or_truncated<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<(), PayloadError> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => PayloadError::Truncated,
        _ => PayloadError::Io(e),
    })
}

pub fn read_header<R: Read>(r: &mut R) -> Result<PayloadHeader, PayloadError> {
    let mut buf = [0u8; HEADER_LEN];
    read_exact_or_truncated(r, &mut buf)?;
    let mut magic = [0u8; 5];
    magic.copy_from_slice(&buf[..5]);
    if &magic != MAGIC {
        return Err(PayloadError::BadMagic(magic));
    }
    let frames = u32::from_le_bytes(buf[5..9].try_into().unwrap());
    let dimension = u32::from_le_bytes(buf[9..13].try_into().unwrap());
    if dimension == 0 {
        return Err(PayloadError::ZeroDimension);
    }
    Ok(PayloadHeader { frames, dimension })
}

/// Reads a complete payload. Trailing bytes after the declared frames are
/// rejected so that a header/body disagreement cannot go unnoticed.
pub fn read_payload<R: Read>(r: &mut R) -> Result<(PayloadHeader, Vec<FrameEmbedding>), PayloadError> {
    let header = read_header(r)?;
    let dim = header.dimension as usize;
    let mut row = vec![0u8; dim * 4];
    let mut frames = Vec::with_capacity(header.frames as usize);
    for frame in 0..header.frames as usize {
        read_exact_or_truncated(r, &mut row)?;
        let values: Vec<f32> = row
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(PayloadError::NonFinite { frame });
        }
        frames.push(FrameEmbedding::from_finite(values));
    }
    let mut probe = [0u8; 1];
    match r.read(&mut probe) {
        Ok(0) => {}
        Ok(_) => return Err(PayloadError::Trailing(header.frames)),
        Err(e) => return Err(PayloadError::Io(e)),
    }
    Ok((header, frames))
}

pub fn write_payload<W: Write>(w: &mut W, frames: &[FrameEmbedding]) -> std::io::Result<()> {
    let dim = frames.first().map_or(0, |f| f.dim());
    w.write_all(MAGIC)?;
    w.write_all(&(frames.len() as u32).to_le_bytes())?;
    w.write_all(&(dim as u32).to_le_bytes())?;
    let mut row = Vec::with_capacity(dim * 4);
    for frame in frames {
        row.clear();
        for v in frame.as_slice() {
            row.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&row)?;
    }
    Ok(())
}

/// Encodes frames into an in-memory VSEM1 buffer.
pub fn encode(frames: &[FrameEmbedding]) -> Vec<u8> {
    let dim = frames.first().map_or(0, |f| f.dim());
    let mut out = Vec::with_capacity(HEADER_LEN + frames.len() * dim * 4);
    write_payload(&mut out, frames).expect("writing to a Vec cannot fail");
    out
}

pub fn decode(bytes: &[u8]) -> Result<Vec<FrameEmbedding>, PayloadError> {
    let mut cursor = bytes;
    read_payload(&mut cursor).map(|(_, frames)| frames)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frames(rows: &[&[f32]]) -> Vec<FrameEmbedding> {
        rows.iter().map(|r| FrameEmbedding::new(r.to_vec()).unwrap()).collect()
    }

    #[test]
    fn header_layout_is_little_endian() {
        let bytes = encode(&frames(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]));
        assert_eq!(&bytes[..5], b"VSEM1");
        assert_eq!(&bytes[5..9], &[3, 0, 0, 0]);
        assert_eq!(&bytes[9..13], &[2, 0, 0, 0]);
        assert_eq!(&bytes[13..17], &1.0f32.to_le_bytes());
        assert_eq!(bytes.len(), 13 + 3 * 2 * 4);
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let mut bytes = encode(&frames(&[&[1.0, 2.0]]));
        assert!(matches!(
            decode(&bytes[..bytes.len() - 1]),
            Err(PayloadError::Truncated)
        ));
        assert!(matches!(decode(&bytes[..7]), Err(PayloadError::Truncated)));
        bytes[0] = b'X';
        assert!(matches!(decode(&bytes), Err(PayloadError::BadMagic(_))));
    }

    #[test]
    fn rejects_trailing_bytes_and_nan() {
        let mut bytes = encode(&frames(&[&[1.0, 2.0]]));
        bytes.push(0);
        assert!(matches!(decode(&bytes), Err(PayloadError::Trailing(1))));

        let mut bytes = encode(&frames(&[&[1.0, 2.0]]));
        bytes[13..17].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(matches!(decode(&bytes), Err(PayloadError::NonFinite { frame: 0 })));
    }
}
