//! Binary PGM (P5) / PPM (P6) images, 8-bit only.

use std::fs;
use std::path::Path;

use crate::error::{CoreError, Result};

/// Row-major 8-bit grayscale raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

/// Row-major interleaved RGB raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[u8; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PnmImage {
    Gray(GrayImage),
    Rgb(RgbImage),
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Self {
        assert_eq!(pixels.len(), width * height, "pixel count must equal width*height");
        GrayImage { width, height, pixels }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        GrayImage { width, height, pixels }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.pixels.chunks(self.width.max(1)).map(<[u8]>::to_vec).collect()
    }
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Self {
        assert_eq!(pixels.len(), width * height, "pixel count must equal width*height");
        RgbImage { width, height, pixels }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> [u8; 3]) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        RgbImage { width, height, pixels }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }
}

impl PnmImage {
    pub fn width(&self) -> usize {
        match self {
            PnmImage::Gray(g) => g.width,
            PnmImage::Rgb(c) => c.width,
        }
    }

    pub fn height(&self) -> usize {
        match self {
            PnmImage::Gray(g) => g.height,
            PnmImage::Rgb(c) => c.height,
        }
    }

    /// RGB view; gray pixels are replicated into all three channels.
    pub fn to_rgb(&self) -> RgbImage {
        match self {
            PnmImage::Rgb(c) => c.clone(),
            PnmImage::Gray(g) => RgbImage {
                width: g.width,
                height: g.height,
                pixels: g.pixels.iter().map(|&v| [v, v, v]).collect(),
            },
        }
    }
}

struct Header {
    magic: [u8; 2],
    width: usize,
    height: usize,
    maxval: usize,
    data_start: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < 2 {
        return Err(CoreError::Pnm("file too short for magic number".into()));
    }
    let magic = [bytes[0], bytes[1]];
    if &magic != b"P5" && &magic != b"P6" {
        return Err(CoreError::Pnm(format!(
            "bad magic {:?}, expected P5 or P6",
            String::from_utf8_lossy(&magic)
        )));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // whitespace and '#' comments between header tokens
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while !matches!(bytes.get(pos), None | Some(b'\n')) {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(CoreError::Pnm("truncated or non-numeric header".into()));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CoreError::Pnm("header value out of range".into()))?;
    }
    // exactly one whitespace byte separates maxval from the raster
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(CoreError::Pnm("missing whitespace after maxval".into()));
    }
    Ok(Header {
        magic,
        width: fields[0],
        height: fields[1],
        maxval: fields[2],
        data_start: pos + 1,
    })
}

pub fn decode_pnm(bytes: &[u8]) -> Result<PnmImage> {
    let h = parse_header(bytes)?;
    if h.maxval != 255 {
        return Err(CoreError::Pnm(format!("maxval {} unsupported, expected 255", h.maxval)));
    }
    if h.width == 0 || h.height == 0 {
        return Err(CoreError::Pnm("zero image dimension".into()));
    }
    let channels = if &h.magic == b"P5" { 1 } else { 3 };
    let need = h.width * h.height * channels;
    let data = &bytes[h.data_start..];
    if data.len() < need {
        return Err(CoreError::Pnm(format!(
            "truncated payload: {} of {need} bytes",
            data.len()
        )));
    }
    let data = &data[..need];
    Ok(if channels == 1 {
        PnmImage::Gray(GrayImage::new(h.width, h.height, data.to_vec()))
    } else {
        PnmImage::Rgb(RgbImage::new(
            h.width,
            h.height,
            data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect(),
        ))
    })
}

pub fn read_ppm(path: impl AsRef<Path>) -> Result<PnmImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| CoreError::io(path, e))?;
    decode_pnm(&bytes)
}

/// Width and height from the header alone.
pub fn read_pnm_dimensions(path: impl AsRef<Path>) -> Result<(usize, usize)> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| CoreError::io(path, e))?;
    let h = parse_header(&bytes)?;
    Ok((h.width, h.height))
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.pixels);
    out
}

pub fn encode_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend(img.pixels.iter().flatten());
    out
}

pub fn write_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_pgm(img)).map_err(|e| CoreError::io(path, e))
}

pub fn write_ppm(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_ppm(img)).map_err(|e| CoreError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decodes_two_by_two_pgm() {
        let mut bytes = b"P5\n2 2\n255\n".to_vec();
        bytes.extend([0, 255, 255, 0]);
        let PnmImage::Gray(g) = decode_pnm(&bytes).unwrap() else {
            panic!("expected gray");
        };
        assert_eq!(g.rows(), vec![vec![0, 255], vec![255, 0]]);
    }

    #[test]
    fn decodes_single_white_ppm() {
        let mut bytes = b"P6 1 1 255\n".to_vec();
        bytes.extend([255, 255, 255]);
        let PnmImage::Rgb(c) = decode_pnm(&bytes).unwrap() else {
            panic!("expected rgb");
        };
        assert_eq!(c.get(0, 0), [255, 255, 255]);
    }

    #[test]
    fn skips_header_comments() {
        let mut bytes = b"P5\n# made by hand\n1 1\n255\n".to_vec();
        bytes.push(7);
        assert_eq!(decode_pnm(&bytes).unwrap(), PnmImage::Gray(GrayImage::new(1, 1, vec![7])));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(decode_pnm(b"P3\n1 1\n255\n0 0 0").is_err());
        assert!(decode_pnm(b"P5\n1 1\n65535\n\0\0").is_err());
        assert!(decode_pnm(b"P6\n2 2\n255\n\0\0\0").is_err());
        assert!(decode_pnm(b"P5\n2").is_err());
    }

    #[test]
    fn encode_decode_round_trip() {
        let rgb = RgbImage::from_fn(5, 3, |x, y| [x as u8 * 40, y as u8 * 70, 9]);
        assert_eq!(decode_pnm(&encode_ppm(&rgb)).unwrap(), PnmImage::Rgb(rgb));
        let gray = GrayImage::from_fn(4, 4, |x, y| (x * 16 + y) as u8);
        assert_eq!(decode_pnm(&encode_pgm(&gray)).unwrap(), PnmImage::Gray(gray));
    }
}
