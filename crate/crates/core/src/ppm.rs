//! Binary PPM (P6, maxval 255) reading and writing.

use alloc::format;
use alloc::vec::Vec;

use crate::frame::Frame;
use crate::ErrorName;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PpmError {
    #[error("unsupported PPM variant: {0}")]
    UnsupportedFormat(&'static str),
    #[error("truncated PPM data")]
    Truncated,
    #[error("malformed PPM header")]
    MalformedHeader,
    #[error("PPM image has a zero dimension")]
    ZeroDimension,
}

impl ErrorName for PpmError {
    fn name(&self) -> &'static str {
        match self {
            PpmError::UnsupportedFormat(_) => "UnsupportedFormat",
            PpmError::Truncated => "Truncated",
            PpmError::MalformedHeader => "MalformedHeader",
            PpmError::ZeroDimension => "ZeroDimension",
        }
    }
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderReader<'_> {
    /// Skips whitespace and `#` comments (which run to end of line).
    fn skip_blank(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Result<u64, PpmError> {
        self.skip_blank();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(if self.pos >= self.bytes.len() {
                PpmError::Truncated
            } else {
                PpmError::MalformedHeader
            });
        }
        let digits = core::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        digits.parse().map_err(|_| PpmError::MalformedHeader)
    }
}

pub fn read_ppm(bytes: &[u8]) -> Result<Frame, PpmError> {
    if bytes.len() < 2 {
        return Err(PpmError::Truncated);
    }
    match &bytes[..2] {
        b"P6" => {}
        b"P1" | b"P4" => return Err(PpmError::UnsupportedFormat("PBM bitmap")),
        b"P2" | b"P5" => return Err(PpmError::UnsupportedFormat("PGM graymap")),
        b"P3" => return Err(PpmError::UnsupportedFormat("ASCII PPM")),
        b"P7" => return Err(PpmError::UnsupportedFormat("PAM")),
        _ => return Err(PpmError::UnsupportedFormat("not a netpbm file")),
    }
    let mut r = HeaderReader { bytes, pos: 2 };
    if !bytes
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(if bytes.len() == 2 {
            PpmError::Truncated
        } else {
            PpmError::MalformedHeader
        });
    }
    let width = r.number()?;
    let height = r.number()?;
    let maxval = r.number()?;
    if maxval != 255 {
        return Err(PpmError::UnsupportedFormat("maxval other than 255"));
    }
    if width == 0 || height == 0 {
        return Err(PpmError::ZeroDimension);
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(r.pos) {
        None => return Err(PpmError::Truncated),
        Some(b) if b.is_ascii_whitespace() => r.pos += 1,
        Some(_) => return Err(PpmError::MalformedHeader),
    }
    let len = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or(PpmError::MalformedHeader)?;
    let raster = &bytes[r.pos..];
    if (raster.len() as u64) < len {
        return Err(PpmError::Truncated);
    }
    Frame::new(
        width as usize,
        height as usize,
        raster[..len as usize].to_vec(),
    )
    .map_err(|_| PpmError::MalformedHeader)
}

pub fn write_ppm(frame: &Frame) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", frame.width(), frame.height());
    let mut out = Vec::with_capacity(header.len() + frame.pixels().len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(frame.pixels());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Rgb;
    use alloc::vec;

    #[test]
    fn single_red_pixel() {
        let f = Frame::filled(1, 1, Rgb(255, 0, 0)).unwrap();
        let bytes = write_ppm(&f);
        assert_eq!(bytes, b"P6\n1 1\n255\n\xFF\x00\x00".to_vec());
        assert_eq!(read_ppm(&bytes).unwrap(), f);
    }

    #[test]
    fn gradient_round_trip() {
        let f = Frame::new(
            2,
            2,
            vec![0, 0, 0, 85, 85, 85, 170, 170, 170, 255, 255, 255],
        )
        .unwrap();
        assert_eq!(read_ppm(&write_ppm(&f)).unwrap(), f);
    }

    #[test]
    fn comments_and_spacing() {
        let bytes = b"P6 # made by hand\n  2\t1 # dims\n255\r\x01\x02\x03\x04\x05\x06";
        let f = read_ppm(bytes).unwrap();
        assert_eq!(f.dims(), (2, 1));
        assert_eq!(f.pixel(1, 0), Rgb(4, 5, 6));
    }

    #[test]
    fn rejects_other_variants() {
        assert!(matches!(
            read_ppm(b"P5\n1 1\n255\n\x00"),
            Err(PpmError::UnsupportedFormat(_))
        ));
        assert!(matches!(
            read_ppm(b"P3\n1 1\n255\n0 0 0"),
            Err(PpmError::UnsupportedFormat(_))
        ));
        assert!(matches!(
            read_ppm(b"P6\n1 1\n65535\n\0\0\0\0\0\0"),
            Err(PpmError::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn truncated_inputs() {
        assert_eq!(read_ppm(b"P6\n2 2\n255\n\0\0\0"), Err(PpmError::Truncated));
        assert_eq!(read_ppm(b"P6\n2 2\n255"), Err(PpmError::Truncated));
        assert_eq!(read_ppm(b"P6\n2"), Err(PpmError::Truncated));
        assert_eq!(read_ppm(b"P"), Err(PpmError::Truncated));
    }

    #[test]
    fn malformed_header() {
        assert_eq!(read_ppm(b"P6\nx 2\n255\n"), Err(PpmError::MalformedHeader));
        assert_eq!(read_ppm(b"P6\n0 2\n255\n"), Err(PpmError::ZeroDimension));
        assert_eq!(
            read_ppm(b"P6\n99999999999 99999999999\n255\n"),
            Err(PpmError::MalformedHeader)
        );
    }
}
