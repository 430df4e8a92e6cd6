//! Image ingestion, patch extraction and reassembly, PSNR, and the
//! dictionary-atom mosaic renderer.
//!
//! PGM (P2/P5, maxval up to 65535) is the one supported codec: it is
//! simple enough to be bit-exact without external dependencies.
//! Intensities are stored as `f64` in `[0, 1]`, scaled by the file's
//! maxval.

use std::fs;
use std::path::Path;

use crate::data::{DataSet, Shape};
use crate::dictionary::{Atom, Dictionary};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// A grayscale image with intensities in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    height: usize,
    width: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<GrayImage> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidConfig(
                "image dimensions must be positive".into(),
            ));
        }
        if pixels.len() != height * width {
            return Err(Error::ShapeMismatch {
                expected: height * width,
                got: pixels.len(),
            });
        }
        if pixels
            .iter()
            .any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0)
        {
            return Err(Error::InvalidConfig(
                "pixel intensities must be finite and within [0, 1]".into(),
            ));
        }
        Ok(GrayImage {
            height,
            width,
            pixels,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn pixel(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }
}

/// PGM flavor: ASCII (`P2`) or binary (`P5`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    Ascii,
    Binary,
}

/// Patch layout of a grid extraction; origins are (row, col) of each
/// patch's top-left pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchGrid {
    pub patch_rows: usize,
    pub patch_cols: usize,
    pub origins: Vec<(usize, usize)>,
    /// True when border anchoring made some patches overlap.
    pub overlap: bool,
}

fn pgm_tokens(bytes: &[u8]) -> PgmTokenizer<'_> {
    PgmTokenizer { bytes, pos: 0 }
}

struct PgmTokenizer<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PgmTokenizer<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&'a str> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::MalformedPgm("unexpected end of header".into()));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| Error::MalformedPgm("non-ASCII header".into()))
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let t = self.token()?;
        t.parse()
            .map_err(|_| Error::MalformedPgm(format!("bad {} '{}'", what, t)))
    }
}

/// Reads a P2 or P5 PGM file. Intensities are scaled by the file's
/// maxval into `[0, 1]`.
pub fn load_pgm(path: &Path) -> Result<GrayImage> {
    let bytes = fs::read(path)?;
    let mut tok = pgm_tokens(&bytes);
    let magic = tok.token()?;
    let binary = match magic {
        "P2" => false,
        "P5" => true,
        other => {
            return Err(Error::MalformedPgm(format!(
                "unsupported magic '{}'",
                other
            )));
        }
    };
    let width = tok.number("width")?;
    let height = tok.number("height")?;
    let maxval = tok.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedPgm("zero image dimension".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::MalformedPgm(format!(
            "maxval {} out of range",
            maxval
        )));
    }
    let count = width * height;
    let mut raw = Vec::with_capacity(count);
    if binary {
        // Exactly one whitespace byte separates the header from the payload.
        if tok.pos >= bytes.len() || !bytes[tok.pos].is_ascii_whitespace() {
            return Err(Error::MalformedPgm("missing payload separator".into()));
        }
        let mut pos = tok.pos + 1;
        let wide = maxval > 255;
        let need = count * if wide { 2 } else { 1 };
        if bytes.len() < pos + need {
            return Err(Error::MalformedPgm("truncated binary payload".into()));
        }
        for _ in 0..count {
            let v = if wide {
                let hi = bytes[pos] as usize;
                let lo = bytes[pos + 1] as usize;
                pos += 2;
                hi << 8 | lo
            } else {
                let v = bytes[pos] as usize;
                pos += 1;
                v
            };
            raw.push(v);
        }
    } else {
        for _ in 0..count {
            let v = tok
                .number("pixel")
                .map_err(|_| Error::MalformedPgm("truncated ASCII payload".into()))?;
            raw.push(v);
        }
    }
    if raw.iter().any(|&v| v > maxval) {
        return Err(Error::MalformedPgm("pixel value exceeds maxval".into()));
    }
    let scale = 1.0 / maxval as f64;
    GrayImage::new(
        height,
        width,
        raw.into_iter().map(|v| v as f64 * scale).collect(),
    )
}

/// Writes a binary (P5) 8-bit PGM.
pub fn save_pgm(img: &GrayImage, path: &Path) -> Result<()> {
    save_pgm_with(img, path, PgmFormat::Binary, 255)
}

/// Writes a PGM in the requested format. Intensities are quantized by
/// rounding to `maxval` steps, so a load/save round trip at the original
/// maxval reproduces the payload exactly.
pub fn save_pgm_with(img: &GrayImage, path: &Path, format: PgmFormat, maxval: u16) -> Result<()> {
    if maxval == 0 {
        return Err(Error::InvalidConfig("maxval must be positive".into()));
    }
    let quantize = |p: f64| -> usize {
        let v = (p * maxval as f64).round();
        (v.max(0.0) as usize).min(maxval as usize)
    };
    let mut out: Vec<u8> = Vec::new();
    let magic = match format {
        PgmFormat::Ascii => "P2",
        PgmFormat::Binary => "P5",
    };
    out.extend_from_slice(
        format!("{}\n{} {}\n{}\n", magic, img.width, img.height, maxval).as_bytes(),
    );
    match format {
        PgmFormat::Binary => {
            let wide = maxval > 255;
            for &p in &img.pixels {
                let v = quantize(p);
                if wide {
                    out.push((v >> 8) as u8);
                    out.push((v & 0xff) as u8);
                } else {
                    out.push(v as u8);
                }
            }
        }
        PgmFormat::Ascii => {
            for row in 0..img.height {
                let line: Vec<String> = (0..img.width)
                    .map(|col| quantize(img.pixel(row, col)).to_string())
                    .collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
    }
    fs::write(path, out)?;
    Ok(())
}

fn check_patch_fits(img: &GrayImage, m1: usize, m2: usize) -> Result<()> {
    if m1 == 0 || m2 == 0 {
        return Err(Error::InvalidConfig(
            "patch dimensions must be positive".into(),
        ));
    }
    if m1 > img.height || m2 > img.width {
        return Err(Error::PatchLargerThanImage {
            patch: (m1, m2),
            image: (img.height, img.width),
        });
    }
    Ok(())
}

fn patch_values(img: &GrayImage, origin: (usize, usize), m1: usize, m2: usize) -> Vec<f64> {
    let mut values = Vec::with_capacity(m1 * m2);
    for r in 0..m1 {
        let row = origin.0 + r;
        let start = row * img.width + origin.1;
        values.extend_from_slice(&img.pixels[start..start + m2]);
    }
    values
}

/// Draws `count` patches uniformly (with replacement) over all valid
/// top-left origins. One SplitMix64 draw selects each origin as
/// `index = draw % (valid_rows * valid_cols)`, so the sequence is
/// identical on every platform for a given seed.
pub fn extract_random_patches(
    img: &GrayImage,
    m1: usize,
    m2: usize,
    count: usize,
    seed: u64,
) -> Result<DataSet> {
    check_patch_fits(img, m1, m2)?;
    if count == 0 {
        return Err(Error::InvalidConfig(
            "patch count must be at least 1".into(),
        ));
    }
    let valid_rows = img.height - m1 + 1;
    let valid_cols = img.width - m2 + 1;
    let mut rng = SplitMix64::new(seed);
    let rows: Vec<Vec<f64>> = (0..count)
        .map(|_| {
            let idx = rng.next_below((valid_rows * valid_cols) as u64) as usize;
            patch_values(img, (idx / valid_cols, idx % valid_cols), m1, m2)
        })
        .collect();
    DataSet::from_rows(Shape::Patch(m1, m2), rows)
}

/// Tiles the image with non-overlapping `m1 x m2` blocks; when a
/// dimension is not divisible, the last row/column of blocks is anchored
/// to the image border and overlaps its neighbor, so every pixel is
/// covered.
pub fn extract_grid_patches(img: &GrayImage, m1: usize, m2: usize) -> Result<(DataSet, PatchGrid)> {
    check_patch_fits(img, m1, m2)?;
    let mut row_anchors: Vec<usize> = (0..=(img.height - m1)).step_by(m1).collect();
    if !img.height.is_multiple_of(m1) {
        row_anchors.push(img.height - m1);
    }
    let mut col_anchors: Vec<usize> = (0..=(img.width - m2)).step_by(m2).collect();
    if !img.width.is_multiple_of(m2) {
        col_anchors.push(img.width - m2);
    }
    let mut origins = Vec::with_capacity(row_anchors.len() * col_anchors.len());
    let mut rows = Vec::with_capacity(origins.capacity());
    for &r in &row_anchors {
        for &c in &col_anchors {
            origins.push((r, c));
            rows.push(patch_values(img, (r, c), m1, m2));
        }
    }
    let grid = PatchGrid {
        patch_rows: m1,
        patch_cols: m2,
        origins,
        overlap: !img.height.is_multiple_of(m1) || !img.width.is_multiple_of(m2),
    };
    Ok((DataSet::from_rows(Shape::Patch(m1, m2), rows)?, grid))
}

/// Inverse of grid extraction: pixels covered by several patches take the
/// average of the contributions, uncovered pixels are zero, and the
/// result is clamped to `[0, 1]`.
pub fn reassemble(
    patches: &DataSet,
    grid: &PatchGrid,
    height: usize,
    width: usize,
) -> Result<GrayImage> {
    let (m1, m2) = (grid.patch_rows, grid.patch_cols);
    if patches.len() != grid.origins.len() {
        return Err(Error::InvalidConfig(format!(
            "grid names {} patches but data set has {}",
            grid.origins.len(),
            patches.len()
        )));
    }
    if patches.shape() != Shape::Patch(m1, m2) {
        return Err(Error::ShapeMismatch {
            expected: m1 * m2,
            got: patches.shape().len(),
        });
    }
    let mut sums = vec![0.0; height * width];
    let mut counts = vec![0u32; height * width];
    for (sample, &(r0, c0)) in patches.samples().iter().zip(&grid.origins) {
        if r0 + m1 > height || c0 + m2 > width {
            return Err(Error::InvalidConfig(format!(
                "patch origin ({}, {}) falls outside the {}x{} image",
                r0, c0, height, width
            )));
        }
        for r in 0..m1 {
            for c in 0..m2 {
                let at = (r0 + r) * width + (c0 + c);
                sums[at] += sample.values()[r * m2 + c];
                counts[at] += 1;
            }
        }
    }
    let pixels: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &n)| {
            if n == 0 {
                0.0
            } else {
                (s / n as f64).clamp(0.0, 1.0)
            }
        })
        .collect();
    GrayImage::new(height, width, pixels)
}

/// Peak signal-to-noise ratio with peak 1.0; identical images are
/// reported as a distinguished value rather than a division by zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    Identical,
    Decibels(f64),
}

impl Psnr {
    /// Decibel value, mapping `Identical` to infinity.
    pub fn as_db(&self) -> f64 {
        match *self {
            Psnr::Identical => f64::INFINITY,
            Psnr::Decibels(db) => db,
        }
    }
}

impl std::fmt::Display for Psnr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Psnr::Identical => write!(f, "inf"),
            Psnr::Decibels(db) => write!(f, "{}", db),
        }
    }
}

pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<Psnr> {
    if a.height != b.height || a.width != b.width {
        return Err(Error::ImageDimensionMismatch);
    }
    let mse: f64 = a
        .pixels
        .iter()
        .zip(&b.pixels)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / a.pixels.len() as f64;
    if mse == 0.0 {
        Ok(Psnr::Identical)
    } else {
        Ok(Psnr::Decibels(10.0 * (1.0 / mse).log10()))
    }
}

/// Renders patch-shaped atoms as a tiled mosaic in the atoms' order,
/// each atom affinely rescaled to `[0, 1]` (constant atoms become
/// mid-gray), with one-pixel separators around every tile.
pub fn atom_mosaic(dict: &Dictionary, columns: usize) -> Result<GrayImage> {
    let atoms: Vec<&Atom> = dict.atoms().iter().collect();
    atom_mosaic_of(&atoms, dict.shape(), columns)
}

/// Mosaic over an explicit atom selection (for example the top atoms by
/// usage).
pub fn atom_mosaic_of(atoms: &[&Atom], shape: Shape, columns: usize) -> Result<GrayImage> {
    let (m1, m2) = shape.patch_dims().ok_or(Error::PatchShapeRequired)?;
    if columns == 0 {
        return Err(Error::InvalidConfig(
            "mosaic needs at least one column".into(),
        ));
    }
    if atoms.is_empty() {
        return Err(Error::InvalidConfig(
            "mosaic needs at least one atom".into(),
        ));
    }
    let rows = atoms.len().div_ceil(columns);
    let height = rows * m1 + rows + 1;
    let width = columns * m2 + columns + 1;
    let mut pixels = vec![0.0; height * width];
    for (i, atom) in atoms.iter().enumerate() {
        let tile_r = i / columns;
        let tile_c = i % columns;
        let top = 1 + tile_r * (m1 + 1);
        let left = 1 + tile_c * (m2 + 1);
        let lo = atom.values().iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = atom
            .values()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let range = hi - lo;
        for r in 0..m1 {
            for c in 0..m2 {
                let v = atom.values()[r * m2 + c];
                let scaled = if range == 0.0 { 0.5 } else { (v - lo) / range };
                pixels[(top + r) * width + (left + c)] = scaled;
            }
        }
    }
    GrayImage::new(height, width, pixels)
}
