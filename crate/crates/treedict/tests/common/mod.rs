//! Shared fixtures for the integration suites: the eight-patch toy
//! data set with its reference centroids, and a synthetic grayscale
//! image generator.

use treedict::imaging::GrayImage;
use treedict::rng::SplitMix64;
use treedict::{DataSet, Shape};

/// The eight 3x3 training patches, row-major, ids 1..=8.
pub fn toy_patches() -> DataSet {
    let rows: Vec<Vec<f64>> = vec![
        vec![1., 0., 0., 1., 2., 0., 0., 1., 3.],
        vec![1., 0., 0., 1., 2., 0., 0., 1., 5.],
        vec![1., 0., 0., 1., 1., 0., 1., 0., 0.],
        vec![2., 0., 0., 5., 5., 0., 2., 7., 5.],
        vec![1., 0., 0., 0., 2., 0., 0., 0., 5.],
        vec![2., 2., 0., 3., 5., 1., 2., 5., 7.],
        vec![0., 0., 0., 0., 0., 0., 0., 1., 2.],
        vec![1., 0., 0., 1., 2., 0., 0., 0., 0.],
    ];
    DataSet::from_rows(Shape::Patch(3, 3), rows).unwrap()
}

/// Reference node centroids, stored rounded (most entries to two
/// decimals, one to a single decimal). Tolerances are half a unit in
/// the last stored place.
pub struct ReferenceCentroid {
    pub indices: Vec<usize>,
    pub values: [f64; 9],
    pub tolerances: [f64; 9],
}

pub fn reference_centroids() -> Vec<ReferenceCentroid> {
    let two = 0.0051; // two stored decimals
    let one = 0.051; // one stored decimal
    vec![
        ReferenceCentroid {
            indices: vec![1, 2, 3, 4, 5, 6, 7, 8],
            values: [1.13, 0.25, 0.0, 1.5, 2.38, 0.13, 0.63, 1.88, 3.38],
            tolerances: [two; 9],
        },
        ReferenceCentroid {
            indices: vec![1, 2, 3, 5, 7, 8],
            values: [0.83, 0.0, 0.0, 0.67, 1.5, 0.0, 0.17, 0.5, 2.5],
            tolerances: [two; 9],
        },
        ReferenceCentroid {
            indices: vec![4, 6],
            values: [2.0, 1.0, 0.0, 4.0, 5.0, 0.5, 2.0, 6.0, 6.0],
            tolerances: [two; 9],
        },
        ReferenceCentroid {
            indices: vec![1, 2, 5],
            values: [1.0, 0.0, 0.0, 0.67, 2.0, 0.0, 0.0, 0.67, 4.3],
            tolerances: [two, two, two, two, two, two, two, two, one],
        },
        ReferenceCentroid {
            indices: vec![3, 7, 8],
            values: [0.67, 0.0, 0.0, 0.67, 1.0, 0.0, 0.33, 0.33, 0.67],
            tolerances: [two; 9],
        },
    ]
}

/// A smooth synthetic grayscale image: overlapping Gaussian bumps on a
/// diagonal gradient plus mild deterministic texture, kept inside
/// [0.1, 0.9] so reconstructions rarely clamp.
#[allow(dead_code)] // only the acceptance suite renders images
pub fn synthetic_image(height: usize, width: usize, seed: u64) -> GrayImage {
    let mut rng = SplitMix64::new(seed);
    let bumps: Vec<(f64, f64, f64, f64)> = (0..6)
        .map(|_| {
            (
                rng.next_f64() * height as f64,
                rng.next_f64() * width as f64,
                2.0 + rng.next_f64() * (height.min(width) as f64 / 3.0),
                if rng.next_f64() < 0.5 { -1.0 } else { 1.0 },
            )
        })
        .collect();
    let mut pixels = Vec::with_capacity(height * width);
    for r in 0..height {
        for c in 0..width {
            let mut v = 0.35 * (r as f64 / height as f64) + 0.25 * (c as f64 / width as f64);
            for &(br, bc, s, sign) in &bumps {
                let d2 = (r as f64 - br).powi(2) + (c as f64 - bc).powi(2);
                v += sign * 0.3 * (-d2 / (2.0 * s * s)).exp();
            }
            v += 0.03 * ((r as f64 * 0.9).sin() * (c as f64 * 0.7).cos());
            pixels.push(v);
        }
    }
    let lo = pixels.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = pixels.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = (hi - lo).max(1e-12);
    let pixels = pixels
        .into_iter()
        .map(|v| 0.1 + 0.8 * (v - lo) / range)
        .collect();
    GrayImage::new(height, width, pixels).unwrap()
}
