//! Gray-level co-occurrence matrices and the contrast/correlation statistics,
//! evaluated over a 3×3 grid of ROI blocks.

use deepfuse_core::GrayImage;

use crate::error::{Result, VisionError};

pub const DEFAULT_LEVELS: usize = 32;

/// Distance-1 offsets `(dx, dy)`: 0°, 45°, 90° and 135° in image coordinates.
pub const OFFSETS: [(i32, i32); 4] = [(1, 0), (1, 1), (0, 1), (-1, 1)];

const MIN_SIGMA: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedImage {
    pub width: usize,
    pub height: usize,
    pub levels: usize,
    pub data: Vec<u16>,
}

impl QuantizedImage {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> usize {
        usize::from(self.data[y * self.width + x])
    }

    /// Copy of the rectangle `[x0, x1) × [y0, y1)`.
    pub fn crop(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> QuantizedImage {
        let mut data = Vec::with_capacity((x1 - x0) * (y1 - y0));
        for y in y0..y1 {
            data.extend_from_slice(&self.data[y * self.width + x0..y * self.width + x1]);
        }
        QuantizedImage {
            width: x1 - x0,
            height: y1 - y0,
            levels: self.levels,
            data,
        }
    }
}

/// `level = floor(pixel · levels / 256)`.
pub fn quantize_gray(img: &GrayImage, levels: usize) -> QuantizedImage {
    assert!((2..=256).contains(&levels), "levels must be in 2..=256");
    QuantizedImage {
        width: img.width,
        height: img.height,
        levels,
        data: img
            .pixels
            .iter()
            .map(|&p| (usize::from(p) * levels / 256) as u16)
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Glcm {
    pub levels: usize,
    /// Row-major `levels × levels`.
    pub p: Vec<f64>,
    pub offset: (i32, i32),
    pub symmetric: bool,
    pub normalized: bool,
}

impl Glcm {
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.levels + j]
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn transpose(&self) -> Glcm {
        let n = self.levels;
        let mut p = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                p[j * n + i] = self.at(i, j);
            }
        }
        Glcm { p, ..self.clone() }
    }
}

/// Counts pairs `(p, p + offset)` with both ends inside the image. The
/// symmetric form adds the transpose; the normalized form divides by the
/// total so the entries sum to one.
pub fn glcm(img: &QuantizedImage, offset: (i32, i32), symmetric: bool, normalized: bool) -> Result<Glcm> {
    let n = img.levels;
    let (dx, dy) = offset;
    let mut p = vec![0.0; n * n];
    let mut pairs = 0usize;
    let (w, h) = (img.width as i64, img.height as i64);
    for y in 0..h {
        let qy = y + i64::from(dy);
        if !(0..h).contains(&qy) {
            continue;
        }
        for x in 0..w {
            let qx = x + i64::from(dx);
            if !(0..w).contains(&qx) {
                continue;
            }
            let a = img.get(x as usize, y as usize);
            let b = img.get(qx as usize, qy as usize);
            p[a * n + b] += 1.0;
            if symmetric {
                p[b * n + a] += 1.0;
            }
            pairs += 1;
        }
    }
    if pairs == 0 {
        return Err(VisionError::TooSmall(format!(
            "{}x{} image has no pixel pairs at offset {offset:?}",
            img.width, img.height
        )));
    }
    if normalized {
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= total);
    }
    Ok(Glcm {
        levels: n,
        p,
        offset,
        symmetric,
        normalized,
    })
}

/// `Σ P(i,j)·(i−j)²` over the normalized matrix.
pub fn glcm_contrast(g: &Glcm) -> f64 {
    let total = g.total();
    if total == 0.0 {
        return 0.0;
    }
    let n = g.levels;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = i as f64 - j as f64;
            acc += g.at(i, j) * d * d;
        }
    }
    acc / total
}

/// `Σ (i−μᵢ)(j−μⱼ)·P(i,j) / (σᵢσⱼ)` with marginal means and deviations taken
/// from the normalized matrix. Errors when either deviation is zero.
pub fn glcm_correlation(g: &Glcm) -> Result<f64> {
    let total = g.total();
    if total == 0.0 {
        return Err(VisionError::ZeroVariance);
    }
    let n = g.levels;
    let (mut mu_i, mut mu_j) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let p = g.at(i, j) / total;
            mu_i += i as f64 * p;
            mu_j += j as f64 * p;
        }
    }
    let (mut var_i, mut var_j, mut cov) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let p = g.at(i, j) / total;
            let (di, dj) = (i as f64 - mu_i, j as f64 - mu_j);
            var_i += p * di * di;
            var_j += p * dj * dj;
            cov += p * di * dj;
        }
    }
    let (s_i, s_j) = (var_i.sqrt(), var_j.sqrt());
    if s_i < MIN_SIGMA || s_j < MIN_SIGMA {
        return Err(VisionError::ZeroVariance);
    }
    Ok((cov / (s_i * s_j)).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockTexture {
    /// Mean contrast over the four offsets.
    pub contrast: f64,
    /// Mean correlation over the offsets where it is defined; `None` when
    /// undefined for all four.
    pub correlation: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextureStats {
    pub contrast: f64,
    pub correlation: f64,
    pub degenerate_blocks: usize,
}

pub fn block_texture(block: &QuantizedImage) -> Result<BlockTexture> {
    let mut contrast = 0.0;
    let mut corr_sum = 0.0;
    let mut corr_n = 0usize;
    for off in OFFSETS {
        let g = glcm(block, off, true, true)?;
        contrast += glcm_contrast(&g);
        match glcm_correlation(&g) {
            Ok(c) => {
                corr_sum += c;
                corr_n += 1;
            }
            Err(VisionError::ZeroVariance) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(BlockTexture {
        contrast: contrast / OFFSETS.len() as f64,
        correlation: (corr_n > 0).then(|| corr_sum / corr_n as f64),
    })
}

/// Splits `len` into three spans; the last absorbs the remainder.
fn thirds(len: usize) -> [(usize, usize); 3] {
    let s = len / 3;
    [(0, s), (s, 2 * s), (2 * s, len)]
}

/// Texture of each block of the 3×3 grid, row-major.
pub fn block_textures(roi: &GrayImage, levels: usize) -> Result<Vec<BlockTexture>> {
    if roi.width < 9 || roi.height < 9 {
        return Err(VisionError::TooSmall(format!(
            "ROI {}x{} is smaller than 9x9",
            roi.width, roi.height
        )));
    }
    let q = quantize_gray(roi, levels);
    let mut out = Vec::with_capacity(9);
    for (y0, y1) in thirds(q.height) {
        for (x0, x1) in thirds(q.width) {
            out.push(block_texture(&q.crop(x0, y0, x1, y1))?);
        }
    }
    Ok(out)
}

/// Contrast averaged over all nine blocks; correlation averaged over the
/// blocks where it is defined. If no block has a defined correlation the
/// error still carries the contrast.
pub fn blockwise_texture(roi: &GrayImage, levels: usize) -> Result<TextureStats> {
    let blocks = block_textures(roi, levels)?;
    let contrast = blocks.iter().map(|b| b.contrast).sum::<f64>() / blocks.len() as f64;
    let defined: Vec<f64> = blocks.iter().filter_map(|b| b.correlation).collect();
    if defined.is_empty() {
        return Err(VisionError::AllBlocksDegenerate { contrast });
    }
    Ok(TextureStats {
        contrast,
        correlation: defined.iter().sum::<f64>() / defined.len() as f64,
        degenerate_blocks: blocks.len() - defined.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn from_levels(width: usize, levels: usize, data: &[u16]) -> QuantizedImage {
        QuantizedImage {
            width,
            height: data.len() / width,
            levels,
            data: data.to_vec(),
        }
    }

    /// Direct enumeration over every ordered pixel pair.
    fn brute_force(img: &QuantizedImage, (dx, dy): (i32, i32), symmetric: bool) -> Vec<f64> {
        let n = img.levels;
        let mut p = vec![0.0; n * n];
        let coords: Vec<(usize, usize)> = (0..img.height).flat_map(|y| (0..img.width).map(move |x| (x, y))).collect();
        for &(ax, ay) in &coords {
            for &(bx, by) in &coords {
                if bx as i64 - ax as i64 == i64::from(dx) && by as i64 - ay as i64 == i64::from(dy) {
                    let (a, b) = (img.get(ax, ay), img.get(bx, by));
                    p[a * n + b] += 1.0;
                    if symmetric {
                        p[b * n + a] += 1.0;
                    }
                }
            }
        }
        let total: f64 = p.iter().sum();
        p.iter().map(|v| v / total).collect()
    }

    #[test]
    fn quantization_buckets() {
        let g = GrayImage::new(3, 1, vec![0, 128, 255]);
        assert_eq!(quantize_gray(&g, 32).data, vec![0, 16, 31]);
        let all = GrayImage::new(256, 1, (0..=255).collect());
        assert_eq!(quantize_gray(&all, 256).data, (0..=255u16).collect::<Vec<_>>());
    }

    #[test]
    fn two_by_two_symmetric_normalized() {
        let img = from_levels(2, 2, &[0, 0, 1, 1]);
        let g = glcm(&img, (1, 0), true, true).unwrap();
        assert_eq!(g.p, vec![0.5, 0.0, 0.0, 0.5]);
        assert_eq!(glcm_contrast(&g), 0.0);
    }

    #[test]
    fn constant_image_single_entry() {
        let img = from_levels(5, 4, &[3; 20]);
        for off in OFFSETS {
            let g = glcm(&img, off, true, true).unwrap();
            assert_eq!(g.at(3, 3), 1.0);
            assert_eq!(glcm_contrast(&g), 0.0);
            assert!(matches!(glcm_correlation(&g), Err(VisionError::ZeroVariance)));
        }
    }

    #[test]
    fn hand_evaluated_matrices() {
        let anti = Glcm {
            levels: 2,
            p: vec![0.0, 0.5, 0.5, 0.0],
            offset: (1, 0),
            symmetric: true,
            normalized: true,
        };
        assert_eq!(glcm_contrast(&anti), 1.0);
        assert!((glcm_correlation(&anti).unwrap() + 1.0).abs() < 1e-12);
        let diag = Glcm {
            p: vec![0.5, 0.0, 0.0, 0.5],
            ..anti
        };
        assert_eq!(glcm_contrast(&diag), 0.0);
        assert!((glcm_correlation(&diag).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_pairs_is_an_error() {
        let img = from_levels(1, 2, &[0]);
        assert!(glcm(&img, (1, 0), true, true).is_err());
    }

    proptest! {
        #[test]
        fn matches_brute_force(w in 1usize..9, h in 1usize..9, seed in proptest::collection::vec(0u16..8, 64), off in 0usize..4, sym: bool) {
            let img = from_levels(w, 8, &seed[..w * h]);
            let off = OFFSETS[off];
            match glcm(&img, off, sym, true) {
                Ok(g) => {
                    let bf = brute_force(&img, off, sym);
                    for (a, b) in g.p.iter().zip(&bf) {
                        prop_assert!((a - b).abs() < 1e-12);
                    }
                    prop_assert!((g.total() - 1.0).abs() < 1e-9);
                }
                Err(_) => prop_assert!(w < 2 || h < 2),
            }
        }

        #[test]
        fn statistics_bounds(data in proptest::collection::vec(0u16..6, 36), off in 0usize..4) {
            let img = from_levels(6, 6, &data);
            let g = glcm(&img, OFFSETS[off], false, true).unwrap();
            let c = glcm_contrast(&g);
            prop_assert!(c >= 0.0);
            let diagonal = (0..6).all(|i| (0..6).all(|j| i == j || g.at(i, j) == 0.0));
            prop_assert_eq!(c == 0.0, diagonal);
            if let Ok(r) = glcm_correlation(&g) {
                prop_assert!((-1.0..=1.0).contains(&r));
                let rt = glcm_correlation(&g.transpose()).unwrap();
                prop_assert!((r - rt).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_roi_is_fully_degenerate() {
        let roi = GrayImage::new(12, 12, vec![90; 144]);
        match blockwise_texture(&roi, DEFAULT_LEVELS) {
            Err(VisionError::AllBlocksDegenerate { contrast }) => assert_eq!(contrast, 0.0),
            other => panic!("expected degeneracy, got {other:?}"),
        }
    }

    #[test]
    fn vertical_stripes_match_whole_matrix_brute_force() {
        // Columns alternate between levels 0 and 31 at 32 levels.
        let roi = GrayImage::from_fn(18, 18, |x, _| if x % 2 == 0 { 0 } else { 255 });
        let q = quantize_gray(&roi, 32);
        let mut want_contrast = 0.0;
        let mut want_corr = 0.0;
        for (y0, y1) in thirds(18) {
            for (x0, x1) in thirds(18) {
                let block = q.crop(x0, y0, x1, y1);
                let mut c = 0.0;
                let mut r = 0.0;
                for off in OFFSETS {
                    let p = brute_force(&block, off, true);
                    let g = Glcm { levels: 32, p, offset: off, symmetric: true, normalized: true };
                    c += glcm_contrast(&g);
                    r += glcm_correlation(&g).unwrap();
                }
                want_contrast += c / 4.0;
                want_corr += r / 4.0;
            }
        }
        let got = blockwise_texture(&roi, 32).unwrap();
        assert!((got.contrast - want_contrast / 9.0).abs() < 1e-9);
        assert!((got.correlation - want_corr / 9.0).abs() < 1e-9);
        // horizontal neighbours always differ by 31 levels, vertical never differ
        let blocks = block_textures(&roi, 32).unwrap();
        assert!(blocks.iter().all(|b| b.contrast > 0.0));
    }

    #[test]
    fn identical_tiles_equal_single_tile() {
        let tile = GrayImage::from_fn(7, 5, |x, y| ((x * 37 + y * 91) % 256) as u8);
        let roi = GrayImage::from_fn(21, 15, |x, y| tile.get(x % 7, y % 5));
        let direct = block_texture(&quantize_gray(&tile, 32)).unwrap();
        let grid = blockwise_texture(&roi, 32).unwrap();
        assert!((grid.contrast - direct.contrast).abs() < 1e-12);
        assert!((grid.correlation - direct.correlation.unwrap()).abs() < 1e-12);
        assert_eq!(grid.degenerate_blocks, 0);
    }

    #[test]
    fn small_roi_rejected() {
        assert!(blockwise_texture(&GrayImage::new(8, 20, vec![0; 160]), 32).is_err());
    }
}
