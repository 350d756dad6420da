//! Reading and writing mask files.
//!
//! Supported formats are plain PBM (`P1`), raw PBM (`P4`, rows padded to a
//! byte boundary, most significant bit first) and an ASCII grid of `0`/`1`
//! characters with one row per line. In every format a `1` is a marked pixel.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::raster::BitRaster;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskFormat {
    PbmAscii,
    PbmBinary,
    AsciiGrid,
}

impl MaskFormat {
    /// Guesses the format from the leading magic number. Anything that does
    /// not start with `P1` or `P4` is treated as an ASCII grid.
    pub fn sniff(bytes: &[u8]) -> Self {
        match bytes {
            [b'P', b'1', ..] => MaskFormat::PbmAscii,
            [b'P', b'4', ..] => MaskFormat::PbmBinary,
            _ => MaskFormat::AsciiGrid,
        }
    }
}

impl fmt::Display for MaskFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MaskFormat::PbmAscii => "pbm-ascii",
            MaskFormat::PbmBinary => "pbm-binary",
            MaskFormat::AsciiGrid => "ascii-grid",
        })
    }
}

impl FromStr for MaskFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pbm-ascii" | "p1" => Ok(MaskFormat::PbmAscii),
            "pbm-binary" | "p4" => Ok(MaskFormat::PbmBinary),
            "ascii-grid" | "grid" => Ok(MaskFormat::AsciiGrid),
            other => Err(format!("unknown mask format `{other}`")),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MaskError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("truncated payload: expected {expected} pixels, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("invalid pixel byte 0x{byte:02x} at offset {offset}")]
    InvalidPixel { byte: u8, offset: usize },
}

pub fn parse_mask(bytes: &[u8], format: MaskFormat) -> Result<BitRaster, MaskError> {
    match format {
        MaskFormat::PbmAscii => parse_pbm(bytes, b"P1"),
        MaskFormat::PbmBinary => parse_pbm(bytes, b"P4"),
        MaskFormat::AsciiGrid => parse_ascii_grid(bytes),
    }
}

pub fn write_mask(raster: &BitRaster, format: MaskFormat) -> Vec<u8> {
    match format {
        MaskFormat::PbmAscii => write_pbm_ascii(raster),
        MaskFormat::PbmBinary => write_pbm_binary(raster),
        MaskFormat::AsciiGrid => write_ascii_grid(raster),
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_whitespace_and_comments(&mut self) {
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(c) = self.peek() {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn header_u32(&mut self, what: &str) -> Result<u32, MaskError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(MaskError::MalformedHeader(format!("expected {what}")));
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        let value = digits
            .parse::<u32>()
            .map_err(|_| MaskError::MalformedHeader(format!("{what} `{digits}` out of range")))?;
        match self.peek() {
            None => Ok(value),
            Some(b) if b.is_ascii_whitespace() || b == b'#' => Ok(value),
            Some(b) => Err(MaskError::MalformedHeader(format!(
                "unexpected byte 0x{b:02x} after {what}"
            ))),
        }
    }
}

fn parse_pbm(bytes: &[u8], magic: &[u8; 2]) -> Result<BitRaster, MaskError> {
    if !bytes.starts_with(magic) {
        return Err(MaskError::MalformedHeader(format!(
            "missing magic number {}",
            String::from_utf8_lossy(magic)
        )));
    }
    let mut cur = Cursor { bytes, pos: 2 };
    if cur
        .peek()
        .is_some_and(|b| !b.is_ascii_whitespace() && b != b'#')
    {
        return Err(MaskError::MalformedHeader(
            "magic number not followed by whitespace".into(),
        ));
    }
    let width = cur.header_u32("width")?;
    let height = cur.header_u32("height")?;
    let mut raster =
        BitRaster::try_new(width, height).map_err(|e| MaskError::MalformedHeader(e.to_string()))?;

    if magic == b"P1" {
        read_plain_payload(&mut cur, &mut raster)?;
    } else {
        read_raw_payload(&mut cur, &mut raster)?;
    }
    Ok(raster)
}

fn read_plain_payload(cur: &mut Cursor<'_>, raster: &mut BitRaster) -> Result<(), MaskError> {
    let (w, expected) = (raster.width() as usize, raster.len());
    let mut found = 0usize;
    loop {
        cur.skip_whitespace_and_comments();
        let Some(b) = cur.peek() else { break };
        let marked = match b {
            b'0' => false,
            b'1' => true,
            _ => {
                return Err(MaskError::InvalidPixel {
                    byte: b,
                    offset: cur.pos,
                })
            }
        };
        if found == expected {
            return Err(MaskError::DimensionMismatch {
                expected: format!("{expected} pixels"),
                found: "extra pixel data".into(),
            });
        }
        if marked {
            raster.set((found % w) as u32, (found / w) as u32, true);
        }
        found += 1;
        cur.pos += 1;
    }
    if found < expected {
        return Err(MaskError::Truncated { expected, found });
    }
    Ok(())
}

fn read_raw_payload(cur: &mut Cursor<'_>, raster: &mut BitRaster) -> Result<(), MaskError> {
    let (w, h) = (raster.width(), raster.height());
    // Exactly one whitespace byte separates the header from the payload.
    match cur.peek() {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        None if raster.is_empty() => return Ok(()),
        None => {
            return Err(MaskError::Truncated {
                expected: raster.len(),
                found: 0,
            })
        }
        Some(_) => {
            return Err(MaskError::MalformedHeader(
                "comment after height in raw PBM".into(),
            ))
        }
    }
    let stride = (w as usize).div_ceil(8);
    let payload = &cur.bytes[cur.pos..];
    let needed = stride * h as usize;
    if payload.len() < needed {
        let full_rows = payload.len().checked_div(stride).unwrap_or(0);
        return Err(MaskError::Truncated {
            expected: raster.len(),
            found: full_rows * w as usize,
        });
    }
    if payload.len() > needed {
        return Err(MaskError::DimensionMismatch {
            expected: format!("{needed} payload bytes"),
            found: format!("{} payload bytes", payload.len()),
        });
    }
    for y in 0..h {
        let row = &payload[y as usize * stride..(y as usize + 1) * stride];
        for x in 0..w {
            if (row[x as usize / 8] >> (7 - x % 8)) & 1 == 1 {
                raster.set(x, y, true);
            }
        }
    }
    Ok(())
}

fn parse_ascii_grid(bytes: &[u8]) -> Result<BitRaster, MaskError> {
    let mut rows: Vec<&[u8]> = bytes
        .split(|&b| b == b'\n')
        .map(|line| line.strip_suffix(b"\r").unwrap_or(line))
        .collect();
    while rows.last().is_some_and(|r| r.is_empty()) {
        rows.pop();
    }
    let width = rows.first().map_or(0, |r| r.len());
    let width =
        u32::try_from(width).map_err(|_| MaskError::MalformedHeader("grid row too long".into()))?;
    let height = u32::try_from(rows.len())
        .map_err(|_| MaskError::MalformedHeader("too many grid rows".into()))?;
    let mut raster =
        BitRaster::try_new(width, height).map_err(|e| MaskError::MalformedHeader(e.to_string()))?;
    let mut offset = 0usize;
    for (y, row) in rows.iter().enumerate() {
        if row.len() != width as usize {
            return Err(MaskError::DimensionMismatch {
                expected: format!("{width} columns"),
                found: format!("{} columns in row {y}", row.len()),
            });
        }
        for (x, &b) in row.iter().enumerate() {
            match b {
                b'0' => {}
                b'1' => raster.set(x as u32, y as u32, true),
                _ => {
                    return Err(MaskError::InvalidPixel {
                        byte: b,
                        offset: offset + x,
                    })
                }
            }
        }
        offset += bytes[offset..]
            .iter()
            .position(|&b| b == b'\n')
            .map_or(bytes.len() - offset, |p| p + 1);
    }
    Ok(raster)
}

/// Plain PBM with lines wrapped at 70 characters.
pub fn write_pbm_ascii(raster: &BitRaster) -> Vec<u8> {
    let mut out = format!("P1\n{} {}\n", raster.width(), raster.height()).into_bytes();
    for y in 0..raster.height() {
        let mut column = 0;
        for bit in raster.row(y) {
            if column == 70 {
                out.push(b'\n');
                column = 0;
            }
            out.push(if bit { b'1' } else { b'0' });
            column += 1;
        }
        out.push(b'\n');
    }
    out
}

pub fn write_pbm_binary(raster: &BitRaster) -> Vec<u8> {
    let mut out = format!("P4\n{} {}\n", raster.width(), raster.height()).into_bytes();
    let stride = (raster.width() as usize).div_ceil(8);
    for y in 0..raster.height() {
        let mut row = vec![0u8; stride];
        for (x, bit) in raster.row(y).enumerate() {
            if bit {
                row[x / 8] |= 0x80 >> (x % 8);
            }
        }
        out.extend_from_slice(&row);
    }
    out
}

/// One line of `0`/`1` per row. Any raster without pixels is written as an
/// empty grid and reads back as 0x0.
pub fn write_ascii_grid(raster: &BitRaster) -> Vec<u8> {
    let mut out = Vec::with_capacity(raster.len() + raster.height() as usize);
    if raster.width() == 0 {
        return out;
    }
    for y in 0..raster.height() {
        out.extend(raster.row(y).map(|b| if b { b'1' } else { b'0' }));
        out.push(b'\n');
    }
    out
}
