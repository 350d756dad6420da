//! Binary raster masks.
//!
//! The origin is the top-left pixel; `x` grows to the right and `y` grows
//! downward. Reads outside the grid return unmarked, which lets the window
//! scan run over the full `(w + 1) x (h + 1)` corner grid without sentinel
//! rows or columns.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

const WORD_BITS: usize = 64;

#[derive(Debug, Error, PartialEq)]
pub enum RasterError {
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("raster of {width}x{height} pixels does not fit in memory")]
    TooLarge { width: u32, height: u32 },
}

/// A row-major bit mask of marked pixels.
#[derive(Clone, PartialEq, Eq)]
pub struct BitRaster {
    width: u32,
    height: u32,
    words: Vec<u64>,
}

impl BitRaster {
    /// Creates an all-unmarked raster.
    pub fn new(width: u32, height: u32) -> Self {
        let len = pixel_count(width, height).expect("raster dimensions overflow usize");
        Self {
            width,
            height,
            words: vec![0; len.div_ceil(WORD_BITS)],
        }
    }

    pub fn try_new(width: u32, height: u32) -> Result<Self, RasterError> {
        pixel_count(width, height).ok_or(RasterError::TooLarge { width, height })?;
        Ok(Self::new(width, height))
    }

    /// Builds a raster from a row-major slice of flags.
    ///
    /// Panics if `bits.len() != width * height`.
    pub fn from_bits(width: u32, height: u32, bits: &[bool]) -> Self {
        let mut raster = Self::new(width, height);
        assert_eq!(
            bits.len(),
            raster.len(),
            "bit slice length does not match {width}x{height}"
        );
        for (i, &bit) in bits.iter().enumerate() {
            if bit {
                raster.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        raster
    }

    /// Builds a raster whose pixel `i` (row-major) is marked when bit `i`
    /// of `mask` is set. Used to enumerate every raster of a given size.
    pub fn from_index_bits(width: u32, height: u32, mask: u64) -> Self {
        let mut raster = Self::new(width, height);
        assert!(raster.len() <= WORD_BITS, "at most 64 pixels");
        if !raster.words.is_empty() {
            let keep = if raster.len() == WORD_BITS {
                u64::MAX
            } else {
                (1u64 << raster.len()) - 1
            };
            raster.words[0] = mask & keep;
        }
        raster
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Number of pixels, `width * height`.
    pub fn len(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Returns whether pixel `(x, y)` is marked. Any coordinate outside the
    /// grid reads as unmarked.
    #[inline]
    pub fn get(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= i64::from(self.width) || y >= i64::from(self.height) {
            return false;
        }
        self.bit(y as usize * self.width as usize + x as usize)
    }

    /// Sets pixel `(x, y)`. Panics when out of bounds.
    pub fn set(&mut self, x: u32, y: u32, marked: bool) {
        assert!(
            x < self.width && y < self.height,
            "pixel ({x}, {y}) outside {}x{} raster",
            self.width,
            self.height
        );
        let i = y as usize * self.width as usize + x as usize;
        let word = &mut self.words[i / WORD_BITS];
        if marked {
            *word |= 1 << (i % WORD_BITS);
        } else {
            *word &= !(1 << (i % WORD_BITS));
        }
    }

    #[inline]
    pub(crate) fn bit(&self, index: usize) -> bool {
        (self.words[index / WORD_BITS] >> (index % WORD_BITS)) & 1 == 1
    }

    /// Number of marked pixels.
    pub fn count_marked(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Iterates the pixels of row `y` from left to right.
    pub fn row(&self, y: u32) -> impl Iterator<Item = bool> + '_ {
        let start = y as usize * self.width as usize;
        (start..start + self.width as usize).map(move |i| self.bit(i))
    }
}

impl std::fmt::Debug for BitRaster {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitRaster {}x{}", self.width, self.height)?;
        for y in 0..self.height {
            let line: String = self.row(y).map(|b| if b { '#' } else { '.' }).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

fn pixel_count(width: u32, height: u32) -> Option<usize> {
    (width as usize).checked_mul(height as usize)
}

/// Generates a raster where each pixel is marked independently with
/// probability `p`.
///
/// The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`.
/// Pixels are drawn in row-major order; pixel `i` is marked when
/// `(next_u64() >> 11) * 2^-53 < p`, so `p = 0` marks nothing and `p = 1`
/// marks everything.
pub fn gen_bernoulli(width: u32, height: u32, p: f64, seed: u64) -> Result<BitRaster, RasterError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(RasterError::InvalidProbability(p));
    }
    let mut raster = BitRaster::try_new(width, height)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (1u64 << 53) as f64;
    for i in 0..raster.len() {
        let u = (rng.next_u64() >> 11) as f64 * scale;
        if u < p {
            raster.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
        }
    }
    Ok(raster)
}
