//! PGM (portable graymap) reading and writing.
//!
//! Supports the ASCII `P2` and binary `P5` variants with a maximum value
//! up to 255. Intensities map linearly between `[0, maxval]` on disk and
//! `[0, 1]` in memory.

use std::path::Path;

use crate::error::{Error, Result};
use crate::kernels::PixelGrid;

/// PGM flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    /// ASCII samples.
    P2,
    /// One binary byte per sample.
    P5,
}

/// Parse a PGM image from raw bytes.
pub fn decode(bytes: &[u8]) -> Result<PixelGrid> {
    let mut cursor = 0usize;
    let magic = next_token(bytes, &mut cursor)?;
    let format = match magic.as_str() {
        "P2" => PgmFormat::P2,
        "P5" => PgmFormat::P5,
        other => return Err(Error::Pgm(format!("unsupported magic '{other}'"))),
    };
    let width = next_usize(bytes, &mut cursor, "width")?;
    let height = next_usize(bytes, &mut cursor, "height")?;
    let maxval = next_usize(bytes, &mut cursor, "maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::Pgm(format!(
            "degenerate dimensions {width}x{height}"
        )));
    }
    if !(1..=255).contains(&maxval) {
        return Err(Error::Pgm(format!(
            "unsupported maxval {maxval} (expected 1..=255)"
        )));
    }
    let count = width * height;
    let samples: Vec<usize> = match format {
        PgmFormat::P2 => {
            let mut v = Vec::with_capacity(count);
            for _ in 0..count {
                v.push(next_usize(bytes, &mut cursor, "sample")?);
            }
            v
        }
        PgmFormat::P5 => {
            // exactly one whitespace byte separates the header from the data
            let data = &bytes[cursor..];
            if data.len() < count {
                return Err(Error::Pgm(format!(
                    "expected {count} raster bytes, found {}",
                    data.len()
                )));
            }
            data[..count].iter().map(|&b| b as usize).collect()
        }
    };
    let mut pixels = Vec::with_capacity(count);
    for (i, s) in samples.into_iter().enumerate() {
        if s > maxval {
            return Err(Error::Pgm(format!(
                "sample {s} at index {i} exceeds maxval {maxval}"
            )));
        }
        pixels.push(s as f64 / maxval as f64);
    }
    PixelGrid::new(width, height, pixels)
}

/// Serialize a grid as PGM with maxval 255.
pub fn encode(grid: &PixelGrid, format: PgmFormat) -> Vec<u8> {
    let header = format!(
        "{}\n{} {}\n255\n",
        match format {
            PgmFormat::P2 => "P2",
            PgmFormat::P5 => "P5",
        },
        grid.width(),
        grid.height()
    );
    let mut bytes = header.into_bytes();
    match format {
        PgmFormat::P2 => {
            for y in 0..grid.height() {
                let row: Vec<String> = (0..grid.width())
                    .map(|x| quantize(grid.get(x, y)).to_string())
                    .collect();
                bytes.extend_from_slice(row.join(" ").as_bytes());
                bytes.push(b'\n');
            }
        }
        PgmFormat::P5 => {
            for y in 0..grid.height() {
                for x in 0..grid.width() {
                    bytes.push(quantize(grid.get(x, y)));
                }
            }
        }
    }
    bytes
}

/// Read a PGM file.
pub fn read(path: &Path) -> Result<PixelGrid> {
    decode(&std::fs::read(path)?)
}

/// Write a PGM file atomically.
pub fn write(path: &Path, grid: &PixelGrid, format: PgmFormat) -> Result<()> {
    crate::io::write_atomic(path, &encode(grid, format))?;
    Ok(())
}

fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Next whitespace-delimited token, skipping `#` comments.
fn next_token(bytes: &[u8], cursor: &mut usize) -> Result<String> {
    loop {
        while *cursor < bytes.len() && bytes[*cursor].is_ascii_whitespace() {
            *cursor += 1;
        }
        if *cursor < bytes.len() && bytes[*cursor] == b'#' {
            while *cursor < bytes.len() && bytes[*cursor] != b'\n' {
                *cursor += 1;
            }
            continue;
        }
        break;
    }
    let start = *cursor;
    while *cursor < bytes.len() && !bytes[*cursor].is_ascii_whitespace() {
        *cursor += 1;
    }
    if start == *cursor {
        return Err(Error::Pgm("unexpected end of header".into()));
    }
    let token = std::str::from_utf8(&bytes[start..*cursor])
        .map_err(|_| Error::Pgm("non-ASCII header".into()))?
        .to_string();
    // the single whitespace byte after the maxval belongs to the header
    if *cursor < bytes.len() {
        *cursor += 1;
    }
    Ok(token)
}

fn next_usize(bytes: &[u8], cursor: &mut usize, what: &str) -> Result<usize> {
    let token = next_token(bytes, cursor)?;
    token
        .parse()
        .map_err(|_| Error::Pgm(format!("invalid {what} '{token}'")))
}
