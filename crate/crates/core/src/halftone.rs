//! Ordered dithering with a board as the threshold array.
//!
//! The board is tiled over the image and pixel `(r, c)` is compared with
//! `A = board[r mod m][c mod n]`. With luminance `L` and white level `Lmax`
//! the pixel is inked iff `(Lmax - L) * m*n > A * (Lmax + 1)`, evaluated in
//! integers. White (`L = Lmax`) is never inked.

use alloc::vec::Vec;
use core::fmt;

use crate::grid::Board;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalftoneError {
    MaxvalOutOfRange(u32),
    PixelCountMismatch { expected: usize, found: usize },
    PixelAboveMaxval { index: usize, value: u16, maxval: u16 },
    DimensionMismatch,
}

impl fmt::Display for HalftoneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HalftoneError::MaxvalOutOfRange(v) => write!(f, "maxval {v} outside 1..=65535"),
            HalftoneError::PixelCountMismatch { expected, found } => {
                write!(f, "expected {expected} pixels, found {found}")
            }
            HalftoneError::PixelAboveMaxval { index, value, maxval } => {
                write!(f, "pixel {index} has value {value} above maxval {maxval}")
            }
            HalftoneError::DimensionMismatch => write!(f, "image and region dimensions do not match"),
        }
    }
}

impl core::error::Error for HalftoneError {}

/// Grayscale raster, row-major, `0` black to `maxval` white.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    maxval: u16,
    pixels: Vec<u16>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, maxval: u32, pixels: Vec<u16>) -> Result<Self, HalftoneError> {
        if maxval == 0 || maxval > u16::MAX as u32 {
            return Err(HalftoneError::MaxvalOutOfRange(maxval));
        }
        let maxval = maxval as u16;
        let expected = width * height;
        if pixels.len() != expected {
            return Err(HalftoneError::PixelCountMismatch { expected, found: pixels.len() });
        }
        if let Some((index, &value)) = pixels.iter().enumerate().find(|(_, &p)| p > maxval) {
            return Err(HalftoneError::PixelAboveMaxval { index, value, maxval });
        }
        Ok(GrayImage { width, height, maxval, pixels })
    }

    /// Every pixel set to `level`.
    pub fn constant(width: usize, height: usize, maxval: u32, level: u16) -> Result<Self, HalftoneError> {
        GrayImage::new(width, height, maxval, alloc::vec![level; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn maxval(&self) -> u16 {
        self.maxval
    }

    pub fn pixels(&self) -> &[u16] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u16 {
        self.pixels[row * self.width + col]
    }
}

/// Binary raster, row-major, `true` is ink (black).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitImage {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BitImage {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, HalftoneError> {
        let expected = width * height;
        if bits.len() != expected {
            return Err(HalftoneError::PixelCountMismatch { expected, found: bits.len() });
        }
        Ok(BitImage { width, height, bits })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn ink_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// The threshold rule for a single pixel.
pub fn is_ink(level: u16, maxval: u16, threshold: u32, cells: usize) -> bool {
    let darkness = (maxval - level) as u128 * cells as u128;
    darkness > threshold as u128 * (maxval as u128 + 1)
}

/// Ink cells in one full tile of constant luminance `level`.
pub fn tile_ink_count(level: u16, maxval: u16, cells: usize) -> usize {
    (0..cells as u32).filter(|&a| is_ink(level, maxval, a, cells)).count()
}

pub fn dither(image: &GrayImage, board: &Board) -> BitImage {
    let (m, n) = (board.rows(), board.cols());
    let cells = m * n;
    let mut bits = Vec::with_capacity(image.pixels.len());
    for r in 0..image.height {
        let tile_row = board.row(r % m);
        for c in 0..image.width {
            let a = tile_row[c % n];
            bits.push(is_ink(image.get(r, c), image.maxval, a, cells));
        }
    }
    BitImage { width: image.width, height: image.height, bits }
}

/// Fewest and most inked pixels over the toroidal `k x l` windows of a
/// single tile.
pub fn window_uniformity(bits: &BitImage, k: usize, l: usize) -> Result<(usize, usize), HalftoneError> {
    let (m, n) = (bits.height, bits.width);
    if m == 0 || n == 0 || k == 0 || l == 0 || k > m || l > n {
        return Err(HalftoneError::DimensionMismatch);
    }
    let mut lo = usize::MAX;
    let mut hi = 0;
    for i in 0..m {
        for j in 0..n {
            let mut ink = 0;
            for a in 0..k {
                for b in 0..l {
                    ink += bits.get((i + a) % m, (j + b) % n) as usize;
                }
            }
            lo = lo.min(ink);
            hi = hi.max(ink);
        }
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn most_perfect() -> Board {
        Board::from_rows(&[[0, 14, 3, 13], [11, 5, 8, 6], [12, 2, 15, 1], [7, 9, 4, 10]]).unwrap()
    }

    #[test]
    fn image_validation() {
        assert_eq!(GrayImage::new(1, 1, 0, vec![0]), Err(HalftoneError::MaxvalOutOfRange(0)));
        assert_eq!(GrayImage::new(1, 1, 70000, vec![0]), Err(HalftoneError::MaxvalOutOfRange(70000)));
        assert!(matches!(GrayImage::new(2, 1, 255, vec![0]), Err(HalftoneError::PixelCountMismatch { .. })));
        assert!(matches!(GrayImage::new(1, 1, 15, vec![16]), Err(HalftoneError::PixelAboveMaxval { .. })));
    }

    #[test]
    fn threshold_rule_examples() {
        let board = most_perfect();
        let white = GrayImage::constant(8, 8, 255, 255).unwrap();
        assert_eq!(dither(&white, &board).ink_count(), 0);

        let mid = GrayImage::constant(4, 4, 255, 127).unwrap();
        let out = dither(&mid, &board);
        assert_eq!(out.ink_count(), 8);
        for (bit, &a) in out.bits().iter().zip(board.cells()) {
            assert_eq!(*bit, a < 8);
        }

        let black = GrayImage::constant(4, 4, 255, 0).unwrap();
        assert_eq!(dither(&black, &board).ink_count(), 16);
        assert_eq!(tile_ink_count(127, 255, 16), 8);
        assert_eq!(tile_ink_count(0, 255, 16), 16);
    }

    #[test]
    fn black_leaves_paper_when_maxval_is_small() {
        // Lmax = 1 < mn: (1 - 0) * 16 > A * 2 holds only for A < 8
        assert_eq!(tile_ink_count(0, 1, 16), 8);
    }

    #[test]
    fn uniformity_examples() {
        let mid = GrayImage::constant(4, 4, 255, 127).unwrap();
        let good = dither(&mid, &most_perfect());
        assert_eq!(window_uniformity(&good, 2, 2), Ok((2, 2)));

        let plain = dither(&mid, &Board::row_major(4, 4).unwrap());
        assert_eq!(window_uniformity(&plain, 2, 2), Ok((0, 4)));

        let white = dither(&GrayImage::constant(4, 4, 255, 255).unwrap(), &most_perfect());
        assert_eq!(window_uniformity(&white, 2, 2), Ok((0, 0)));

        assert_eq!(window_uniformity(&white, 5, 2), Err(HalftoneError::DimensionMismatch));
    }

    #[test]
    fn tiling_wraps() {
        let board = Board::from_rows(&[[0, 1], [2, 3]]).unwrap();
        let img = GrayImage::new(3, 3, 3, vec![0, 1, 2, 1, 2, 3, 0, 0, 0]).unwrap();
        let out = dither(&img, &board);
        // (3 - L) * 4 > A * 4  <=>  A < 3 - L
        let want: Vec<bool> = [(0, 0), (1, 1), (2, 0), (1, 2), (2, 3), (3, 2), (0, 0), (0, 1), (0, 0)]
            .iter()
            .map(|&(l, a)| a < 3 - l)
            .collect();
        assert_eq!(out.bits(), want.as_slice());
    }
}
