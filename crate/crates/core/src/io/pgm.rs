//! Binary PGM (`P5`), 8-bit only.
//!
//! Header tokens are separated by whitespace and may be interleaved with
//! `#` comments running to end of line. Exactly one whitespace byte
//! separates the maxval token from the raster.

use std::path::Path;

use crate::error::{Error, Result};
use crate::types::GrayImage;

use super::{read_file, write_atomic};

pub fn encode(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn token(&mut self) -> Option<&[u8]> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.bytes.get(self.pos) == Some(&b'#') {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> std::result::Result<u32, String> {
        let tok = self.token().ok_or_else(|| format!("missing {what}"))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("bad {what}: {:?}", String::from_utf8_lossy(tok)))
    }
}

/// Parses a P5 image and attaches `spacing` (mm/px).
pub fn decode(bytes: &[u8], spacing: f64) -> std::result::Result<GrayImage, String> {
    let mut h = Header { bytes, pos: 0 };
    if h.token() != Some(b"P5") {
        return Err("not a binary PGM (missing P5 magic)".into());
    }
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(format!("unsupported maxval {maxval}; only 8-bit PGM is supported"));
    }
    if h.pos >= bytes.len() || !bytes[h.pos].is_ascii_whitespace() {
        return Err("missing raster".into());
    }
    let raster = &bytes[h.pos + 1..];
    let len = width as usize * height as usize;
    if raster.len() < len {
        return Err(format!("raster has {} bytes, expected {len}", raster.len()));
    }
    GrayImage::new(width, height, raster[..len].to_vec(), spacing).map_err(|e| e.to_string())
}

pub fn read(path: &Path, spacing: f64) -> Result<GrayImage> {
    let bytes = read_file(path)?;
    decode(&bytes, spacing).map_err(|m| Error::format(path, m))
}

pub fn write(path: &Path, img: &GrayImage) -> Result<()> {
    write_atomic(path, &encode(img))
}
