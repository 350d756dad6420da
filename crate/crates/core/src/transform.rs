//! Grid-to-world affine transforms and ESRI world files.

use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TransformError {
    #[error("degenerate transform: a*e - b*d = 0")]
    Degenerate,
    #[error("world file must have 6 numeric lines, found {0}")]
    LineCount(usize),
    #[error("world file line {line} is not a number: `{text}`")]
    NotANumber { line: usize, text: String },
}

/// Maps a grid corner `(x, y)` to `(lon, lat)`:
///
/// ```text
/// lon = a*x + b*y + c
/// lat = d*x + e*y + f
/// ```
///
/// `(c, f)` is the world position of the top-left corner of pixel `(0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineTransform {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl AffineTransform {
    pub const IDENTITY: AffineTransform = AffineTransform {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 0.0,
        e: 1.0,
        f: 0.0,
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Result<Self, TransformError> {
        let t = AffineTransform { a, b, c, d, e, f };
        if t.determinant() == 0.0 {
            return Err(TransformError::Degenerate);
        }
        Ok(t)
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.e - self.b * self.d
    }

    #[inline]
    pub fn apply(&self, x: f64, y: f64) -> [f64; 2] {
        [
            self.a * x + self.b * y + self.c,
            self.d * x + self.e * y + self.f,
        ]
    }
}

impl Default for AffineTransform {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl FromStr for AffineTransform {
    type Err = TransformError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_world_file(s)
    }
}

/// Parses a six-line world file (`A, D, B, E, C, F`).
///
/// World files locate the center of the top-left pixel; the returned
/// transform is shifted by half a pixel so that it maps corner coordinates.
pub fn parse_world_file(text: &str) -> Result<AffineTransform, TransformError> {
    let lines: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    if lines.len() != 6 {
        return Err(TransformError::LineCount(lines.len()));
    }
    let mut values = [0.0; 6];
    for (i, (slot, line)) in values.iter_mut().zip(&lines).enumerate() {
        *slot = line
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| TransformError::NotANumber {
                line: i + 1,
                text: line.to_string(),
            })?;
    }
    let [a, d, b, e, c, f] = values;
    AffineTransform::new(a, b, c - 0.5 * (a + b), d, e, f - 0.5 * (d + e))
}
