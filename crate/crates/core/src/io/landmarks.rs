//! Landmark text files.
//!
//! ```text
//! #count=N
//! 0,x0,y0
//! 1,x1,y1
//! ...
//! ```
//!
//! Coordinates are decimal pixels in the image frame. Lines must appear in
//! index order. Blank lines are ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::Point;

use super::{read_file, write_atomic};

pub fn encode(points: &[Point]) -> String {
    let mut out = format!("#count={}\n", points.len());
    for (i, p) in points.iter().enumerate() {
        let _ = writeln!(out, "{i},{},{}", p.x, p.y);
    }
    out
}

pub fn decode(text: &str) -> std::result::Result<Vec<Point>, String> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or("empty landmark file")?;
    let count: usize = header
        .trim()
        .strip_prefix("#count=")
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| format!("bad header {header:?}, expected #count=N"))?;
    let mut points = Vec::with_capacity(count);
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.trim().split(',').collect();
        let [idx, x, y] = fields[..] else {
            return Err(format!("line {}: expected index,x,y", lineno + 1));
        };
        let parse = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite());
        match (idx.trim().parse::<usize>(), parse(x), parse(y)) {
            (Ok(i), Some(x), Some(y)) if i == points.len() => points.push(Point::new(x, y)),
            (Ok(i), Some(_), Some(_)) => {
                return Err(format!(
                    "line {}: index {i} out of order, expected {}",
                    lineno + 1,
                    points.len()
                ))
            }
            _ => return Err(format!("line {}: cannot parse {line:?}", lineno + 1)),
        }
    }
    if points.len() != count {
        return Err(format!("header says {count} landmarks, found {}", points.len()));
    }
    Ok(points)
}

pub fn read(path: &Path) -> Result<Vec<Point>> {
    let bytes = read_file(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|_| Error::format(path, "not UTF-8"))?;
    decode(text).map_err(|m| Error::format(path, m))
}

pub fn write(path: &Path, points: &[Point]) -> Result<()> {
    write_atomic(path, encode(points).as_bytes())
}
