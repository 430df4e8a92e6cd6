//! Core numeric containers and the preprocessing transforms applied to
//! samples before clustering or when forming node representatives.
//!
//! Samples are either flat vectors or `m1 x m2` patches; patches are
//! vectorized in row-major order everywhere in this crate.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape shared by all samples of a data set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    /// Flat vector of the given length.
    Flat(usize),
    /// `rows x cols` patch, vectorized row-major.
    Patch(usize, usize),
}

impl Shape {
    /// Number of scalar values per sample.
    pub fn len(&self) -> usize {
        match *self {
            Shape::Flat(n) => n,
            Shape::Patch(m1, m2) => m1 * m2,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Patch dimensions, if this is a patch shape.
    pub fn patch_dims(&self) -> Option<(usize, usize)> {
        match *self {
            Shape::Flat(_) => None,
            Shape::Patch(m1, m2) => Some((m1, m2)),
        }
    }
}

/// One training vector or patch. Ids are 1-based and unique per data set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    id: usize,
    shape: Shape,
    values: Vec<f64>,
}

impl Sample {
    /// Builds a sample, validating length and finiteness.
    pub fn new(id: usize, shape: Shape, values: Vec<f64>) -> Result<Sample> {
        if values.len() != shape.len() {
            return Err(Error::ShapeMismatch {
                expected: shape.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { id });
        }
        Ok(Sample { id, shape, values })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// An ordered collection of samples with a common shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSet {
    shape: Shape,
    samples: Vec<Sample>,
}

impl DataSet {
    /// Builds a data set from rows of values; ids are assigned 1..=N in order.
    pub fn from_rows(shape: Shape, rows: Vec<Vec<f64>>) -> Result<DataSet> {
        if rows.is_empty() {
            return Err(Error::EmptyDataSet);
        }
        let samples = rows
            .into_iter()
            .enumerate()
            .map(|(i, values)| Sample::new(i + 1, shape, values))
            .collect::<Result<Vec<_>>>()?;
        Ok(DataSet { shape, samples })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    /// Looks up a sample by its 1-based id.
    pub fn get(&self, id: usize) -> Option<&Sample> {
        if id >= 1 && id <= self.samples.len() {
            Some(&self.samples[id - 1])
        } else {
            None
        }
    }

    /// Sample by id; panics on an id outside `1..=N`. Internal callers only
    /// pass ids drawn from validated index sets.
    pub(crate) fn sample(&self, id: usize) -> &Sample {
        self.get(id).expect("sample id out of range")
    }

    /// Mean of the samples named by `indices` (1-based ids).
    pub fn centroid_of(&self, indices: &[usize]) -> Vec<f64> {
        let n = self.shape.len();
        let mut acc = vec![0.0; n];
        for &id in indices {
            for (a, v) in acc.iter_mut().zip(self.sample(id).values()) {
                *a += v;
            }
        }
        let scale = 1.0 / indices.len() as f64;
        for a in acc.iter_mut() {
            *a *= scale;
        }
        acc
    }

    /// Writes the data set as CSV: a `# shape m1 m2 n` header line (m1 = m2
    /// = 0 for flat data) followed by one row-major vectorized sample per
    /// line. Values use shortest round-trip formatting, so a load after a
    /// save reproduces the data exactly.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        let (m1, m2) = self.shape.patch_dims().unwrap_or((0, 0));
        writeln!(out, "# shape {} {} {}", m1, m2, self.shape.len()).unwrap();
        for s in &self.samples {
            let row: Vec<String> = s.values().iter().map(|v| format!("{}", v)).collect();
            writeln!(out, "{}", row.join(",")).unwrap();
        }
        fs::write(path, out)?;
        Ok(())
    }

    pub fn load_csv(path: &Path) -> Result<DataSet> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedCsv("empty file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 || fields[0] != "#" || fields[1] != "shape" {
            return Err(Error::MalformedCsv(format!(
                "expected '# shape m1 m2 n' header, got '{}'",
                header
            )));
        }
        let parse = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::MalformedCsv(format!("bad header field '{}'", s)))
        };
        let (m1, m2, n) = (parse(fields[2])?, parse(fields[3])?, parse(fields[4])?);
        let shape = if m1 == 0 && m2 == 0 {
            Shape::Flat(n)
        } else if m1 * m2 == n {
            Shape::Patch(m1, m2)
        } else {
            return Err(Error::MalformedCsv(format!(
                "shape {}x{} does not match n = {}",
                m1, m2, n
            )));
        };
        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|f| {
                    f.trim().parse::<f64>().map_err(|_| {
                        Error::MalformedCsv(format!("bad value '{}' on line {}", f, lineno + 2))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        DataSet::from_rows(shape, rows)
    }
}

/// Squared Euclidean/Frobenius distance between two value slices.
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Euclidean/Frobenius norm of raw values (node representatives and
/// dictionary atoms are plain value slices).
pub fn norm(values: &[f64]) -> f64 {
    values.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Frobenius norm of a sample; for flat samples this is the Euclidean norm.
pub fn frobenius_norm(s: &Sample) -> f64 {
    norm(s.values())
}

/// Largest singular value of a patch sample, by power iteration on
/// `A^T A` with a deterministic all-ones start vector (relative tolerance
/// 1e-10, at most 1000 iterations). For flat samples this is defined as
/// the Euclidean norm.
pub fn spectral_norm(s: &Sample) -> f64 {
    match s.shape() {
        Shape::Flat(_) => norm(s.values()),
        Shape::Patch(m1, m2) => spectral_norm_values(s.values(), m1, m2),
    }
}

pub(crate) fn spectral_norm_values(values: &[f64], m1: usize, m2: usize) -> f64 {
    // Iterate on the Gram matrix of the smaller dimension.
    let gram_dim = m2.min(m1);
    let gram = if m2 <= m1 {
        // G = A^T A, size m2 x m2
        gram_matrix(values, m1, m2, false)
    } else {
        // G = A A^T, size m1 x m1
        gram_matrix(values, m1, m2, true)
    };
    let mut v = vec![1.0 / (gram_dim as f64).sqrt(); gram_dim];
    let mut lambda = 0.0f64;
    for _ in 0..1000 {
        let mut w = vec![0.0; gram_dim];
        for i in 0..gram_dim {
            let row = &gram[i * gram_dim..(i + 1) * gram_dim];
            w[i] = row.iter().zip(&v).map(|(g, x)| g * x).sum();
        }
        let wnorm = norm(&w);
        if wnorm == 0.0 {
            return 0.0;
        }
        let new_lambda: f64 = v.iter().zip(&w).map(|(x, y)| x * y).sum();
        for x in w.iter_mut() {
            *x /= wnorm;
        }
        v = w;
        if (new_lambda - lambda).abs() <= 1e-10 * new_lambda.abs().max(1e-300) {
            lambda = new_lambda;
            break;
        }
        lambda = new_lambda;
    }
    lambda.max(0.0).sqrt()
}

/// Row-major Gram matrix of a row-major `m1 x m2` patch:
/// `A A^T` when `transpose`, else `A^T A`.
fn gram_matrix(values: &[f64], m1: usize, m2: usize, transpose: bool) -> Vec<f64> {
    let dim = if transpose { m1 } else { m2 };
    let mut gram = vec![0.0; dim * dim];
    if transpose {
        for i in 0..m1 {
            for j in 0..m1 {
                let (ri, rj) = (&values[i * m2..(i + 1) * m2], &values[j * m2..(j + 1) * m2]);
                gram[i * m1 + j] = ri.iter().zip(rj).map(|(a, b)| a * b).sum();
            }
        }
    } else {
        for i in 0..m2 {
            for j in 0..m2 {
                let mut acc = 0.0;
                for r in 0..m1 {
                    acc += values[r * m2 + i] * values[r * m2 + j];
                }
                gram[i * m2 + j] = acc;
            }
        }
    }
    gram
}

/// Best rank-`r` approximation of a patch sample in Frobenius norm,
/// via truncated SVD.
pub fn rank_r_approx(s: &Sample, r: usize) -> Result<Sample> {
    let (m1, m2) = s.shape().patch_dims().ok_or(Error::PatchShapeRequired)?;
    let approx = rank_r_values(s.values(), m1, m2, r)?;
    Sample::new(s.id(), s.shape(), approx)
}

pub(crate) fn rank_r_values(values: &[f64], m1: usize, m2: usize, r: usize) -> Result<Vec<f64>> {
    let max = m1.min(m2);
    if r < 1 || r > max {
        return Err(Error::RankOutOfRange { rank: r, max });
    }
    let mat = DMatrix::from_row_slice(m1, m2, values);
    let svd = mat.svd(true, true);
    let u = svd.u.as_ref().expect("svd with vectors");
    let vt = svd.v_t.as_ref().expect("svd with vectors");
    // Keep the r largest singular values (ties by index for determinism).
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut approx = DMatrix::zeros(m1, m2);
    for &k in order.iter().take(r) {
        let sigma = svd.singular_values[k];
        let uk = u.column(k);
        let vk = vt.row(k);
        for i in 0..m1 {
            for j in 0..m2 {
                approx[(i, j)] += sigma * uk[i] * vk[j];
            }
        }
    }
    let mut out = Vec::with_capacity(m1 * m2);
    for i in 0..m1 {
        for j in 0..m2 {
            out.push(approx[(i, j)]);
        }
    }
    Ok(out)
}

/// Singular values of a patch sample in descending order.
pub fn singular_values(s: &Sample) -> Result<Vec<f64>> {
    let (m1, m2) = s.shape().patch_dims().ok_or(Error::PatchShapeRequired)?;
    let mat = DMatrix::from_row_slice(m1, m2, s.values());
    let mut sv: Vec<f64> = mat.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(sv)
}

/// M-term approximation in the orthonormal type-II DCT basis: transform,
/// keep the `m` largest-magnitude coefficients (ties broken by the smaller
/// row-major coefficient index), invert.
pub fn dct_mterm_approx(s: &Sample, m: usize) -> Result<Sample> {
    let approx = dct_mterm_values(s.values(), s.shape(), m)?;
    Sample::new(s.id(), s.shape(), approx)
}

pub(crate) fn dct_mterm_values(values: &[f64], shape: Shape, m: usize) -> Result<Vec<f64>> {
    let n = shape.len();
    if m < 1 || m > n {
        return Err(Error::TermsOutOfRange { terms: m, max: n });
    }
    let mut coeffs = dct_forward(values, shape);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        coeffs[b]
            .abs()
            .partial_cmp(&coeffs[a].abs())
            .unwrap()
            .then(a.cmp(&b))
    });
    for &k in order.iter().skip(m) {
        coeffs[k] = 0.0;
    }
    Ok(dct_inverse(&coeffs, shape))
}

/// Orthonormal 1-D DCT-II of `x`.
fn dct1d(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    let scale0 = (1.0 / n as f64).sqrt();
    let scale = (2.0 / n as f64).sqrt();
    for (k, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (i, &v) in x.iter().enumerate() {
            acc +=
                v * (std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64).cos();
        }
        *o = acc * if k == 0 { scale0 } else { scale };
    }
    out
}

/// Inverse of [`dct1d`] (orthonormal DCT-III).
fn idct1d(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    let mut out = vec![0.0; n];
    let scale0 = (1.0 / n as f64).sqrt();
    let scale = (2.0 / n as f64).sqrt();
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = c[0] * scale0;
        for (k, &v) in c.iter().enumerate().skip(1) {
            acc += v
                * scale
                * (std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64).cos();
        }
        *o = acc;
    }
    out
}

pub(crate) fn dct_forward(values: &[f64], shape: Shape) -> Vec<f64> {
    match shape {
        Shape::Flat(_) => dct1d(values),
        Shape::Patch(m1, m2) => separable_2d(values, m1, m2, dct1d),
    }
}

pub(crate) fn dct_inverse(coeffs: &[f64], shape: Shape) -> Vec<f64> {
    match shape {
        Shape::Flat(_) => idct1d(coeffs),
        Shape::Patch(m1, m2) => separable_2d(coeffs, m1, m2, idct1d),
    }
}

/// Applies a 1-D transform along rows and then columns of a row-major
/// `m1 x m2` array.
fn separable_2d(values: &[f64], m1: usize, m2: usize, f: fn(&[f64]) -> Vec<f64>) -> Vec<f64> {
    let mut out = vec![0.0; m1 * m2];
    for i in 0..m1 {
        let row = f(&values[i * m2..(i + 1) * m2]);
        out[i * m2..(i + 1) * m2].copy_from_slice(&row);
    }
    let mut col = vec![0.0; m1];
    for j in 0..m2 {
        for i in 0..m1 {
            col[i] = out[i * m2 + j];
        }
        let t = f(&col);
        for i in 0..m1 {
            out[i * m2 + j] = t[i];
        }
    }
    out
}

/// A transform applied to every sample of a data set before clustering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preprocessor {
    Identity,
    /// Truncated-SVD approximation of each patch.
    RankR(usize),
    /// M-term DCT approximation of each sample.
    DctMTerm(usize),
    /// Reduces each sample to the single spectral-norm feature
    /// `s_j = ||centroid - Y_j||_2`, producing a flat 1-D data set.
    SpectralNormFeature,
}

impl Preprocessor {
    pub fn apply(&self, data: &DataSet) -> Result<DataSet> {
        match self {
            Preprocessor::Identity => Ok(data.clone()),
            Preprocessor::RankR(r) => {
                let (m1, m2) = data.shape().patch_dims().ok_or(Error::PatchShapeRequired)?;
                let rows = data
                    .samples()
                    .iter()
                    .map(|s| rank_r_values(s.values(), m1, m2, *r))
                    .collect::<Result<Vec<_>>>()?;
                DataSet::from_rows(data.shape(), rows)
            }
            Preprocessor::DctMTerm(m) => {
                let rows = data
                    .samples()
                    .iter()
                    .map(|s| dct_mterm_values(s.values(), data.shape(), *m))
                    .collect::<Result<Vec<_>>>()?;
                DataSet::from_rows(data.shape(), rows)
            }
            Preprocessor::SpectralNormFeature => {
                let ids: Vec<usize> = (1..=data.len()).collect();
                let center = data.centroid_of(&ids);
                let rows = data
                    .samples()
                    .iter()
                    .map(|s| {
                        let diff: Vec<f64> =
                            center.iter().zip(s.values()).map(|(c, v)| c - v).collect();
                        let feat = match data.shape() {
                            Shape::Flat(_) => norm(&diff),
                            Shape::Patch(m1, m2) => spectral_norm_values(&diff, m1, m2),
                        };
                        vec![feat]
                    })
                    .collect();
                DataSet::from_rows(Shape::Flat(1), rows)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn patch(id: usize, m1: usize, m2: usize, values: &[f64]) -> Sample {
        Sample::new(id, Shape::Patch(m1, m2), values.to_vec()).unwrap()
    }

    #[test]
    fn frobenius_basics() {
        let zero = patch(1, 3, 3, &[0.0; 9]);
        assert_eq!(frobenius_norm(&zero), 0.0);
        let flat = Sample::new(1, Shape::Flat(2), vec![3.0, 4.0]).unwrap();
        assert_eq!(frobenius_norm(&flat), 5.0);
        // 3x3 patch with entries 0 everywhere except a 1 and a 2.
        let y7 = patch(7, 3, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 2.0]);
        assert!((frobenius_norm(&y7) - 5.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn spectral_norm_basics() {
        let eye = patch(1, 2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert!((spectral_norm(&eye) - 1.0).abs() < 1e-9);
        let diag = patch(1, 2, 2, &[3.0, 0.0, 0.0, 1.0]);
        assert!((spectral_norm(&diag) - 3.0).abs() < 1e-9);
        let nilpotent = patch(1, 2, 2, &[0.0, 2.0, 0.0, 0.0]);
        assert!((spectral_norm(&nilpotent) - 2.0).abs() < 1e-9);
        let zero = patch(1, 2, 2, &[0.0; 4]);
        assert_eq!(spectral_norm(&zero), 0.0);
        // Wide patch exercises the A A^T branch.
        let wide = patch(1, 1, 3, &[2.0, 0.0, 0.0]);
        assert!((spectral_norm(&wide) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn rank_approx_basics() {
        // Rank-1 input must be reproduced exactly.
        let r1 = patch(1, 2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let approx = rank_r_approx(&r1, 1).unwrap();
        for (a, b) in approx.values().iter().zip(r1.values()) {
            assert!((a - b).abs() < 1e-10);
        }
        // Eckart-Young on a diagonal matrix.
        let diag = patch(1, 2, 2, &[5.0, 0.0, 0.0, 2.0]);
        let approx = rank_r_approx(&diag, 1).unwrap();
        let want = [5.0, 0.0, 0.0, 0.0];
        for (a, b) in approx.values().iter().zip(&want) {
            assert!((a - b).abs() < 1e-10, "{:?}", approx.values());
        }
        assert!(matches!(
            rank_r_approx(&diag, 3),
            Err(Error::RankOutOfRange { .. })
        ));
        assert!(matches!(
            rank_r_approx(&diag, 0),
            Err(Error::RankOutOfRange { .. })
        ));
    }

    #[test]
    fn rank_approx_error_is_singular_tail() {
        let mut rng = crate::rng::SplitMix64::new(5);
        let values: Vec<f64> = (0..16).map(|_| rng.next_gaussian()).collect();
        let s = patch(1, 4, 4, &values);
        let approx = rank_r_approx(&s, 2).unwrap();
        let err = dist_sq(s.values(), approx.values()).sqrt();
        let sv = singular_values(&s).unwrap();
        let tail = (sv[2] * sv[2] + sv[3] * sv[3]).sqrt();
        assert!((err - tail).abs() < 1e-9, "err {} tail {}", err, tail);
    }

    #[test]
    fn dct_basics() {
        let constant = patch(1, 2, 2, &[0.7; 4]);
        let approx = dct_mterm_approx(&constant, 1).unwrap();
        for (a, b) in approx.values().iter().zip(constant.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        let mut rng = crate::rng::SplitMix64::new(11);
        let values: Vec<f64> = (0..9).map(|_| rng.next_gaussian()).collect();
        let s = patch(1, 3, 3, &values);
        let full = dct_mterm_approx(&s, 9).unwrap();
        for (a, b) in full.values().iter().zip(s.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(matches!(
            dct_mterm_approx(&s, 10),
            Err(Error::TermsOutOfRange { .. })
        ));
    }

    #[test]
    fn dct_one_term_keeps_dominant_basis_function() {
        // Input built from the code's own basis: 3 * b1 + 1 * b2.
        let shape = Shape::Patch(3, 3);
        let mut c = vec![0.0; 9];
        c[4] = 3.0;
        c[7] = 1.0;
        let input = dct_inverse(&c, shape);
        let s = Sample::new(1, shape, input).unwrap();
        let approx = dct_mterm_approx(&s, 1).unwrap();
        let mut c1 = vec![0.0; 9];
        c1[4] = 3.0;
        let want = dct_inverse(&c1, shape);
        for (a, b) in approx.values().iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn preprocessor_validation_and_features() {
        let data =
            DataSet::from_rows(Shape::Flat(2), vec![vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert!(matches!(
            Preprocessor::RankR(1).apply(&data),
            Err(Error::PatchShapeRequired)
        ));
        let feats = Preprocessor::SpectralNormFeature.apply(&data).unwrap();
        assert_eq!(feats.shape(), Shape::Flat(1));
        // centroid (1, 0); distances 1 and 1
        assert!((feats.sample(1).values()[0] - 1.0).abs() < 1e-12);
        assert!((feats.sample(2).values()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dataset_validation() {
        assert!(matches!(
            DataSet::from_rows(Shape::Flat(2), vec![]),
            Err(Error::EmptyDataSet)
        ));
        assert!(matches!(
            DataSet::from_rows(Shape::Flat(2), vec![vec![1.0]]),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(
            DataSet::from_rows(Shape::Flat(1), vec![vec![f64::NAN]]),
            Err(Error::NonFiniteValue { id: 1 })
        ));
        let d = DataSet::from_rows(Shape::Flat(1), vec![vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(d.get(1).unwrap().id(), 1);
        assert!(d.get(0).is_none());
        assert!(d.get(3).is_none());
    }

    #[test]
    fn csv_round_trip() {
        let dir = std::env::temp_dir().join("treedict_data_csv_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("data.csv");
        let data = DataSet::from_rows(
            Shape::Patch(2, 2),
            vec![vec![1.0, 0.25, -3.5, 1e-17], vec![0.1, 0.2, 0.3, 0.4]],
        )
        .unwrap();
        data.save_csv(&path).unwrap();
        let back = DataSet::load_csv(&path).unwrap();
        assert_eq!(data, back);
        std::fs::write(&path, "no header\n1,2\n").unwrap();
        assert!(matches!(
            DataSet::load_csv(&path),
            Err(Error::MalformedCsv(_))
        ));
    }

    proptest! {
        #[test]
        fn rank_error_monotone(values in proptest::collection::vec(-10.0f64..10.0, 16)) {
            let s = patch(1, 4, 4, &values);
            let mut last = f64::INFINITY;
            for r in 1..=4 {
                let approx = rank_r_approx(&s, r).unwrap();
                let err = dist_sq(s.values(), approx.values()).sqrt();
                prop_assert!(err <= last + 1e-9);
                last = err;
            }
        }

        #[test]
        fn dct_error_monotone_and_full_roundtrip(values in proptest::collection::vec(-10.0f64..10.0, 12)) {
            let s = patch(1, 3, 4, &values);
            let mut last = f64::INFINITY;
            for m in 1..=12 {
                let approx = dct_mterm_approx(&s, m).unwrap();
                let err = dist_sq(s.values(), approx.values()).sqrt();
                prop_assert!(err <= last + 1e-9);
                last = err;
            }
            prop_assert!(last < 1e-12);
        }

        #[test]
        fn spectral_le_frobenius(values in proptest::collection::vec(-10.0f64..10.0, 12)) {
            let s = patch(1, 4, 3, &values);
            prop_assert!(spectral_norm(&s) <= frobenius_norm(&s) + 1e-9);
        }
    }
}
