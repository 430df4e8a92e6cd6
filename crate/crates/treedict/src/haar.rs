//! Classical discrete Haar wavelet transform, used as the correctness
//! oracle for the tree-based construction: on scalar data of length 2^L
//! split into equal halves, tree representatives and difference atoms
//! equal the transform's approximation and detail coefficients up to
//! explicit powers of sqrt(2).

use crate::error::{Error, Result};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Output of a full Haar analysis: the single coarsest approximation
/// coefficient plus the detail coefficients of every level.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarCoefficients {
    /// Coarsest approximation coefficient `a_{0,0}`.
    pub a00: f64,
    /// `details[j]` holds the `2^j` detail coefficients of level `j`.
    pub details: Vec<Vec<f64>>,
}

impl HaarCoefficients {
    /// Number of transform levels L.
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Length of the analyzed signal (2^L).
    pub fn signal_len(&self) -> usize {
        1 << self.levels()
    }

    fn check_shapes(&self) -> Result<()> {
        for (j, d) in self.details.iter().enumerate() {
            if d.len() != (1 << j) {
                return Err(Error::CoefficientShapeMismatch);
            }
        }
        Ok(())
    }

    /// Squared Euclidean norm of the coefficient vector.
    pub fn energy(&self) -> f64 {
        self.a00 * self.a00 + self.details.iter().flatten().map(|d| d * d).sum::<f64>()
    }
}

/// Full Haar analysis of a signal whose length is a power of two:
/// `a_{j,k} = (a_{j+1,2k} + a_{j+1,2k+1}) / sqrt(2)` and
/// `d_{j,k} = (a_{j+1,2k} - a_{j+1,2k+1}) / sqrt(2)`, applied L times.
pub fn haar_analysis(signal: &[f64]) -> Result<HaarCoefficients> {
    if signal.is_empty() || !signal.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo { len: signal.len() });
    }
    let levels = signal.len().trailing_zeros() as usize;
    let mut approx = signal.to_vec();
    let mut details = vec![Vec::new(); levels];
    for j in (0..levels).rev() {
        let half = approx.len() / 2;
        let mut next = Vec::with_capacity(half);
        let mut d = Vec::with_capacity(half);
        for k in 0..half {
            next.push((approx[2 * k] + approx[2 * k + 1]) / SQRT2);
            d.push((approx[2 * k] - approx[2 * k + 1]) / SQRT2);
        }
        details[j] = d;
        approx = next;
    }
    Ok(HaarCoefficients {
        a00: approx[0],
        details,
    })
}

/// Inverts [`haar_analysis`]: `a_{j+1,2k} = (a_{j,k} + d_{j,k}) / sqrt(2)`
/// and `a_{j+1,2k+1} = (a_{j,k} - d_{j,k}) / sqrt(2)`.
pub fn haar_reconstruction(coeffs: &HaarCoefficients) -> Result<Vec<f64>> {
    coeffs.check_shapes()?;
    let mut approx = vec![coeffs.a00];
    for d in &coeffs.details {
        let mut next = Vec::with_capacity(approx.len() * 2);
        for (a, dd) in approx.iter().zip(d) {
            next.push((a + dd) / SQRT2);
            next.push((a - dd) / SQRT2);
        }
        approx = next;
    }
    Ok(approx)
}

/// Evaluates one approximation/detail pair directly from the samples,
/// without recursion:
/// `a_{L-l,k} = 2^{-l/2} * sum of the 2^l samples under the node`, and for
/// `l > 0` the detail is the same scaling applied to the difference of the
/// two half-sums. `co_level` is `l`, the depth of the subtree under the
/// coefficient; `l = 0` returns the sample itself with no detail.
pub fn haar_explicit(signal: &[f64], co_level: usize, k: usize) -> Result<(f64, Option<f64>)> {
    if signal.is_empty() || !signal.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo { len: signal.len() });
    }
    let levels = signal.len().trailing_zeros() as usize;
    if co_level > levels || k >= (1 << (levels - co_level)) {
        return Err(Error::HaarIndexOutOfRange);
    }
    let block = 1usize << co_level;
    let start = k * block;
    let scale = 2f64.powf(-(co_level as f64) / 2.0);
    let total: f64 = signal[start..start + block].iter().sum();
    let a = scale * total;
    let d = if co_level == 0 {
        None
    } else {
        let half = block / 2;
        let first: f64 = signal[start..start + half].iter().sum();
        let second: f64 = signal[start + half..start + block].iter().sum();
        Some(scale * (first - second))
    };
    Ok((a, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    #[test]
    fn constant_and_antisymmetric_pairs() {
        let c = haar_analysis(&[1.0, 1.0]).unwrap();
        assert!((c.a00 - SQRT2).abs() < 1e-15);
        assert!(c.details[0][0].abs() < 1e-15);

        let c = haar_analysis(&[1.0, -1.0]).unwrap();
        assert!(c.a00.abs() < 1e-15);
        assert!((c.details[0][0] - SQRT2).abs() < 1e-15);
    }

    #[test]
    fn four_sample_reference_values() {
        let c = haar_analysis(&[4.0, 2.0, 5.0, 5.0]).unwrap();
        assert!((c.a00 - 8.0).abs() < 1e-12);
        assert!((c.details[0][0] - (-2.0)).abs() < 1e-12);
        assert!((c.details[1][0] - SQRT2).abs() < 1e-12);
        assert!(c.details[1][1].abs() < 1e-12);

        let back = haar_reconstruction(&c).unwrap();
        for (x, y) in back.iter().zip(&[4.0, 2.0, 5.0, 5.0]) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_coefficients_give_zero_signal() {
        let c = HaarCoefficients {
            a00: 0.0,
            details: vec![vec![0.0], vec![0.0, 0.0]],
        };
        let signal = haar_reconstruction(&c).unwrap();
        assert_eq!(signal, vec![0.0; 4]);
    }

    #[test]
    fn shape_validation() {
        assert!(matches!(
            haar_analysis(&[1.0, 2.0, 3.0]),
            Err(Error::NotPowerOfTwo { len: 3 })
        ));
        assert!(matches!(
            haar_analysis(&[]),
            Err(Error::NotPowerOfTwo { len: 0 })
        ));
        let bad = HaarCoefficients {
            a00: 1.0,
            details: vec![vec![0.0, 0.0]],
        };
        assert!(matches!(
            haar_reconstruction(&bad),
            Err(Error::CoefficientShapeMismatch)
        ));
    }

    #[test]
    fn length_one_signal() {
        let c = haar_analysis(&[7.5]).unwrap();
        assert_eq!(c.a00, 7.5);
        assert_eq!(c.levels(), 0);
        assert_eq!(haar_reconstruction(&c).unwrap(), vec![7.5]);
    }

    #[test]
    fn explicit_base_cases() {
        let signal = [4.0, 2.0, 5.0, 5.0];
        // Co-level 0 returns the sample itself, no detail.
        for (k, &x) in signal.iter().enumerate() {
            let (a, d) = haar_explicit(&signal, 0, k).unwrap();
            assert_eq!(a, x);
            assert!(d.is_none());
        }
        let (a, d) = haar_explicit(&signal, 2, 0).unwrap();
        assert!((a - 8.0).abs() < 1e-12);
        assert!((d.unwrap() - (-2.0)).abs() < 1e-12);
        assert!(matches!(
            haar_explicit(&signal, 3, 0),
            Err(Error::HaarIndexOutOfRange)
        ));
        assert!(matches!(
            haar_explicit(&signal, 1, 2),
            Err(Error::HaarIndexOutOfRange)
        ));
    }

    #[test]
    fn constant_signal_explicit() {
        let c = 3.25;
        let signal = vec![c; 8];
        for co_level in 0..=3usize {
            for k in 0..(8 >> co_level) {
                let (a, d) = haar_explicit(&signal, co_level, k).unwrap();
                assert!((a - 2f64.powf(co_level as f64 / 2.0) * c).abs() < 1e-12);
                if let Some(d) = d {
                    assert!(d.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn explicit_agrees_with_analysis_everywhere() {
        let mut rng = SplitMix64::new(31);
        for levels in 0..=6usize {
            let n = 1 << levels;
            let signal: Vec<f64> = (0..n).map(|_| rng.next_gaussian() * 3.0).collect();
            let c = haar_analysis(&signal).unwrap();
            for co_level in 1..=levels {
                let j = levels - co_level;
                for k in 0..(1usize << j) {
                    let (_, d) = haar_explicit(&signal, co_level, k).unwrap();
                    assert!(
                        (d.unwrap() - c.details[j][k]).abs() < 1e-12,
                        "detail mismatch at level {} pos {}",
                        j,
                        k
                    );
                }
            }
            let (a, _) = haar_explicit(&signal, levels, 0).unwrap();
            assert!((a - c.a00).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn perfect_reconstruction_and_energy(
            levels in 0usize..7,
            seed in 0u64..u64::MAX,
        ) {
            let mut rng = SplitMix64::new(seed);
            let n = 1usize << levels;
            let signal: Vec<f64> = (0..n).map(|_| rng.next_gaussian() * 10.0).collect();
            let c = haar_analysis(&signal).unwrap();
            let back = haar_reconstruction(&c).unwrap();
            for (x, y) in back.iter().zip(&signal) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            let signal_energy: f64 = signal.iter().map(|x| x * x).sum();
            prop_assert!((c.energy() - signal_energy).abs() <= 1e-10 * signal_energy.max(1.0));
        }
    }
}
