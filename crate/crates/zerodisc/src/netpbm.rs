//! NetPBM codecs: PGM (P2/P5) in, PBM (P1/P4) out.
//!
//! PBM follows the NetPBM convention that `1` is black, which matches the
//! ink bit of [`BitImage`].

use thiserror::Error;
use zerodisc_core::halftone::{BitImage, GrayImage, HalftoneError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PnmError {
    #[error("unsupported or missing magic number")]
    BadMagic,
    #[error("file ends before all samples were read")]
    TruncatedData,
    #[error("maxval {0} outside 1..=65535")]
    MaxvalOutOfRange(u64),
    #[error("malformed header: {0}")]
    BadHeader(&'static str),
    #[error("malformed sample at byte {0}")]
    BadSample(usize),
    #[error("sample {value} exceeds maxval {maxval}")]
    SampleOutOfRange { value: u32, maxval: u32 },
    #[error(transparent)]
    Image(#[from] HalftoneError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbmMode {
    /// ASCII.
    P1,
    /// Packed bits, rows padded to a byte boundary.
    P4,
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
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

    /// Next unsigned decimal, `None` at end of input.
    fn number(&mut self) -> Result<Option<u64>, usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        if start >= self.data.len() {
            return Ok(None);
        }
        let mut value: u64 = 0;
        while let Some(&b) = self.data.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value.saturating_mul(10).saturating_add((b - b'0') as u64);
            self.pos += 1;
        }
        if self.pos == start {
            return Err(start);
        }
        Ok(Some(value))
    }

    fn header_field(&mut self, what: &'static str) -> Result<u64, PnmError> {
        match self.number() {
            Ok(Some(v)) => Ok(v),
            Ok(None) => Err(PnmError::TruncatedData),
            Err(_) => Err(PnmError::BadHeader(what)),
        }
    }
}

fn magic(data: &[u8]) -> Option<&[u8]> {
    data.get(..2)
}

pub fn read_pgm(data: &[u8]) -> Result<GrayImage, PnmError> {
    let binary = match magic(data) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        _ => return Err(PnmError::BadMagic),
    };
    let mut cur = Cursor { data, pos: 2 };
    let width = cur.header_field("width")? as usize;
    let height = cur.header_field("height")? as usize;
    let maxval = cur.header_field("maxval")?;
    if maxval == 0 || maxval > u16::MAX as u64 {
        return Err(PnmError::MaxvalOutOfRange(maxval));
    }
    let count = width.checked_mul(height).ok_or(PnmError::BadHeader("dimensions"))?;
    let mut pixels = Vec::with_capacity(count.min(1 << 26));

    if binary {
        // exactly one whitespace byte separates the header from the raster
        match data.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            Some(_) => return Err(PnmError::BadHeader("missing separator after maxval")),
            None => return Err(PnmError::TruncatedData),
        }
        let wide = maxval > 255;
        let bytes = if wide { 2 } else { 1 };
        let raster = &data[cur.pos..];
        if raster.len() / bytes < count {
            return Err(PnmError::TruncatedData);
        }
        for i in 0..count {
            let v = if wide {
                u16::from_be_bytes([raster[2 * i], raster[2 * i + 1]])
            } else {
                raster[i] as u16
            };
            if v as u64 > maxval {
                return Err(PnmError::SampleOutOfRange { value: v as u32, maxval: maxval as u32 });
            }
            pixels.push(v);
        }
    } else {
        for _ in 0..count {
            let v = match cur.number() {
                Ok(Some(v)) => v,
                Ok(None) => return Err(PnmError::TruncatedData),
                Err(at) => return Err(PnmError::BadSample(at)),
            };
            if v > maxval {
                return Err(PnmError::SampleOutOfRange { value: v.min(u32::MAX as u64) as u32, maxval: maxval as u32 });
            }
            pixels.push(v as u16);
        }
    }
    Ok(GrayImage::new(width, height, maxval as u32, pixels)?)
}

/// PGM encoder, used to produce test inputs.
pub fn write_pgm(image: &GrayImage, binary: bool) -> Vec<u8> {
    let maxval = image.maxval();
    let magic = if binary { "P5" } else { "P2" };
    let mut out = format!("{magic}\n{} {}\n{maxval}\n", image.width(), image.height()).into_bytes();
    if binary {
        for &p in image.pixels() {
            if maxval > 255 {
                out.extend_from_slice(&p.to_be_bytes());
            } else {
                out.push(p as u8);
            }
        }
    } else {
        for row in image.pixels().chunks(image.width().max(1)) {
            let line: Vec<String> = row.iter().map(|p| p.to_string()).collect();
            out.extend_from_slice(line.join(" ").as_bytes());
            out.push(b'\n');
        }
    }
    out
}

// Plain PBM lines should stay within 70 characters.
const P1_BITS_PER_LINE: usize = 35;

pub fn write_pbm(bits: &BitImage, mode: PbmMode) -> Vec<u8> {
    let (w, h) = (bits.width(), bits.height());
    let magic = match mode {
        PbmMode::P1 => "P1",
        PbmMode::P4 => "P4",
    };
    let mut out = format!("{magic}\n{w} {h}\n").into_bytes();
    if w == 0 {
        return out;
    }
    for row in bits.bits().chunks(w) {
        match mode {
            PbmMode::P1 => {
                for line in row.chunks(P1_BITS_PER_LINE) {
                    for (i, &b) in line.iter().enumerate() {
                        if i > 0 {
                            out.push(b' ');
                        }
                        out.push(if b { b'1' } else { b'0' });
                    }
                    out.push(b'\n');
                }
            }
            PbmMode::P4 => {
                for byte in row.chunks(8) {
                    let packed = byte
                        .iter()
                        .enumerate()
                        .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i)));
                    out.push(packed);
                }
            }
        }
    }
    out
}

pub fn read_pbm(data: &[u8]) -> Result<BitImage, PnmError> {
    let ascii = match magic(data) {
        Some(b"P1") => true,
        Some(b"P4") => false,
        _ => return Err(PnmError::BadMagic),
    };
    let mut cur = Cursor { data, pos: 2 };
    let width = cur.header_field("width")? as usize;
    let height = cur.header_field("height")? as usize;
    let count = width.checked_mul(height).ok_or(PnmError::BadHeader("dimensions"))?;
    let mut bits = Vec::with_capacity(count.min(1 << 26));
    if ascii {
        while bits.len() < count {
            cur.skip_space_and_comments();
            match data.get(cur.pos) {
                Some(b'0') => bits.push(false),
                Some(b'1') => bits.push(true),
                Some(_) => return Err(PnmError::BadSample(cur.pos)),
                None => return Err(PnmError::TruncatedData),
            }
            cur.pos += 1;
        }
    } else {
        if count > 0 {
            match data.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                Some(_) => return Err(PnmError::BadHeader("missing separator after height")),
                None => return Err(PnmError::TruncatedData),
            }
        }
        let stride = width.div_ceil(8);
        let raster = &data[cur.pos.min(data.len())..];
        if raster.len() < stride * height {
            return Err(PnmError::TruncatedData);
        }
        for r in 0..height {
            let row = &raster[r * stride..(r + 1) * stride];
            for c in 0..width {
                bits.push(row[c / 8] & (0x80 >> (c % 8)) != 0);
            }
        }
    }
    Ok(BitImage::new(width, height, bits)?)
}
