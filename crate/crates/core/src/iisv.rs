//! IISV: a raw, uncompressed clip container.
//!
//! ```text
//! offset  size  field (little-endian)
//!      0     4  magic "IISV"
//!      4     4  version (1)
//!      8     4  width
//!     12     4  height
//!     16     4  frame_count
//!     20     4  fps_milli
//!     24     …  frame_count × width × height × 3 bytes of RGB8, temporal order
//! ```
//!
//! The file length must be exactly `24 + frame_count·width·height·3`.

use alloc::vec::Vec;

use crate::frame::{Clip, Frame};
use crate::ErrorName;

pub const MAGIC: [u8; 4] = *b"IISV";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IisvError {
    #[error("not an IISV container (bad magic)")]
    BadMagic,
    #[error("unsupported IISV version {0}")]
    UnsupportedVersion(u32),
    #[error("truncated IISV data: expected {expected} bytes, got {actual}")]
    Truncated { expected: u64, actual: u64 },
    #[error("IISV data has {extra} bytes past the last frame")]
    TrailingBytes { extra: u64 },
    #[error("IISV header has a zero width, height or frame count")]
    ZeroDimension,
    #[error("IISV header has fps_milli = 0")]
    ZeroFps,
}

impl ErrorName for IisvError {
    fn name(&self) -> &'static str {
        match self {
            IisvError::BadMagic => "BadMagic",
            IisvError::UnsupportedVersion(_) => "UnsupportedVersion",
            IisvError::Truncated { .. } => "Truncated",
            IisvError::TrailingBytes { .. } => "TrailingBytes",
            IisvError::ZeroDimension => "ZeroDimension",
            IisvError::ZeroFps => "ZeroFps",
        }
    }
}

fn u32_at(bytes: &[u8], offset: usize) -> u32 {
    u32::from_le_bytes(bytes[offset..offset + 4].try_into().unwrap())
}

pub fn decode_iisv(bytes: &[u8]) -> Result<Clip, IisvError> {
    if !MAGIC.starts_with(&bytes[..bytes.len().min(4)]) {
        return Err(IisvError::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(IisvError::Truncated {
            expected: HEADER_LEN as u64,
            actual: bytes.len() as u64,
        });
    }
    let version = u32_at(bytes, 4);
    if version != VERSION {
        return Err(IisvError::UnsupportedVersion(version));
    }
    let width = u32_at(bytes, 8);
    let height = u32_at(bytes, 12);
    let count = u32_at(bytes, 16);
    let fps_milli = u32_at(bytes, 20);
    if width == 0 || height == 0 || count == 0 {
        return Err(IisvError::ZeroDimension);
    }
    if fps_milli == 0 {
        return Err(IisvError::ZeroFps);
    }

    // Products of three u32s fit in u128 without overflow.
    let frame_len = width as u128 * height as u128 * 3;
    let expected = HEADER_LEN as u128 + frame_len * count as u128;
    let actual = bytes.len() as u128;
    if actual < expected {
        return Err(IisvError::Truncated {
            expected: u64::try_from(expected).unwrap_or(u64::MAX),
            actual: actual as u64,
        });
    }
    if actual > expected {
        return Err(IisvError::TrailingBytes {
            extra: (actual - expected) as u64,
        });
    }

    let frame_len = frame_len as usize;
    let frames = bytes[HEADER_LEN..]
        .chunks_exact(frame_len)
        .map(|chunk| {
            Frame::new(width as usize, height as usize, chunk.to_vec())
                .expect("dimensions validated above")
        })
        .collect();
    Ok(Clip::new(frames, fps_milli).expect("uniform frames with positive fps"))
}

pub fn encode_iisv(clip: &Clip) -> Vec<u8> {
    let frame_len = clip.width() * clip.height() * 3;
    let mut out = Vec::with_capacity(HEADER_LEN + frame_len * clip.len());
    out.extend_from_slice(&MAGIC);
    for field in [
        VERSION,
        clip.width() as u32,
        clip.height() as u32,
        clip.len() as u32,
        clip.fps_milli(),
    ] {
        out.extend_from_slice(&field.to_le_bytes());
    }
    for frame in clip.frames() {
        out.extend_from_slice(frame.pixels());
    }
    out
}
