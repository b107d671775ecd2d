//! `HMAP v1` heatmap stacks.
//!
//! | offset | size          | content                                   |
//! |--------|---------------|-------------------------------------------|
//! | 0      | 4             | magic `HMAP`                              |
//! | 4      | 4             | channels, u32 little-endian               |
//! | 8      | 4             | height, u32 little-endian                 |
//! | 12     | 4             | width, u32 little-endian                  |
//! | 16     | 4·c·h·w       | f32 little-endian, channel-major, rows    |

use std::path::Path;

use crate::error::{Error, Result};
use crate::types::Heatmap;

use super::{read_file, write_atomic};

pub const MAGIC: &[u8; 4] = b"HMAP";
const HEADER_LEN: usize = 16;

/// Encodes a stack whose channels all share one shape. Values are stored
/// as f32.
pub fn encode(stack: &[Heatmap], width: u32, height: u32) -> Result<Vec<u8>> {
    if let Some(h) = stack.iter().find(|h| h.dims() != (width, height)) {
        return Err(Error::ShapeMismatch {
            left: (width, height),
            right: h.dims(),
        });
    }
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * stack.len() * width as usize * height as usize);
    out.extend_from_slice(MAGIC);
    for v in [stack.len() as u32, height, width] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for h in stack {
        for &v in h.values() {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    Ok(out)
}

/// A decoded stack with its declared shape (kept even with zero channels).
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapStack {
    pub width: u32,
    pub height: u32,
    pub channels: Vec<Heatmap>,
}

pub fn decode(bytes: &[u8]) -> std::result::Result<HeatmapStack, String> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err("not an HMAP v1 file".into());
    }
    let word = |i: usize| u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap());
    let (channels, height, width) = (word(0) as usize, word(1), word(2));
    let plane = width as usize * height as usize;
    let expected = channels
        .checked_mul(plane)
        .and_then(|n| n.checked_mul(4))
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or("declared size overflows")?;
    if bytes.len() != expected {
        return Err(format!("file is {} bytes, header implies {expected}", bytes.len()));
    }
    let mut stack = Vec::with_capacity(channels);
    for (c, chunk) in bytes[HEADER_LEN..]
        .chunks_exact(4 * plane.max(1))
        .take(channels)
        .enumerate()
    {
        let values = chunk
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()) as f64)
            .collect();
        stack.push(Heatmap::new(width, height, values).map_err(|e| format!("channel {c}: {e}"))?);
    }
    Ok(HeatmapStack {
        width,
        height,
        channels: stack,
    })
}

pub fn read(path: &Path) -> Result<HeatmapStack> {
    let bytes = read_file(path)?;
    decode(&bytes).map_err(|m| Error::format(path, m))
}

pub fn write(path: &Path, stack: &[Heatmap], width: u32, height: u32) -> Result<()> {
    write_atomic(path, &encode(stack, width, height)?)
}
