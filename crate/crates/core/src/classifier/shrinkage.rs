//! Covariance shrinkage toward the diagonal of the sample covariance, with
//! the analytic intensity of Schäfer and Strimmer (2005, target "D").

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shrinkage {
    /// Analytic optimum, clipped to `[0, 1]`.
    Analytic,
    /// Fixed intensity in `[0, 1]`.
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShrunkCovariance {
    /// `λ·T + (1 − λ)·S`.
    pub sigma: DMatrix<f64>,
    /// Unbiased sample covariance `S`.
    pub sample: DMatrix<f64>,
    /// `λ`.
    pub intensity: f64,
}

/// Shrink the covariance of rows that are already centered.
///
/// The target keeps the sample variances and zeroes every covariance, so
/// only off-diagonal entries shrink. The analytic intensity is
/// `Σ_{i≠j} Var(s_ij) / Σ_{i≠j} s_ij²`, with `Var(s_ij)` estimated from the
/// per-sample products `w_kij = x_ki x_kj`.
pub fn shrink_covariance(samples: &DMatrix<f64>, shrinkage: Shrinkage) -> Result<ShrunkCovariance> {
    let (n, d) = samples.shape();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    if d == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: 0,
        });
    }
    let nf = n as f64;
    // Σ_k w_kij
    let cross = samples.transpose() * samples;
    let sample = &cross / (nf - 1.0);

    let intensity = match shrinkage {
        Shrinkage::Fixed(l) => {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::Config(format!("shrinkage intensity {l} outside [0, 1]")));
            }
            l
        }
        Shrinkage::Analytic => {
            // Σ_k w_kij²
            let squares = samples.component_mul(samples);
            let fourth = squares.transpose() * &squares;
            let scale = nf / (nf - 1.0).powi(3);
            let (mut num, mut den) = (0.0, 0.0);
            for j in 0..d {
                for i in 0..d {
                    if i == j {
                        continue;
                    }
                    let w_mean = cross[(i, j)] / nf;
                    num += scale * (fourth[(i, j)] - nf * w_mean * w_mean).max(0.0);
                    den += sample[(i, j)].powi(2);
                }
            }
            if den > 0.0 {
                (num / den).clamp(0.0, 1.0)
            } else {
                0.0
            }
        }
    };

    let mut sigma = sample.scale(1.0 - intensity);
    for i in 0..d {
        sigma[(i, i)] = sample[(i, i)];
    }
    Ok(ShrunkCovariance {
        sigma,
        sample,
        intensity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedTree;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(n: usize, chol: &DMatrix<f64>, seed: u64) -> DMatrix<f64> {
        let d = chol.nrows();
        let mut rng = SeedTree::new(seed).rng();
        let z = DMatrix::<f64>::from_fn(n, d, |_, _| StandardNormal.sample(&mut rng));
        let mut x: DMatrix<f64> = z * chol.transpose();
        // center with the sample mean
        for j in 0..d {
            let m = x.column(j).mean();
            x.column_mut(j).add_scalar_mut(-m);
        }
        x
    }

    #[test]
    fn endpoints_reproduce_target_and_sample() {
        let chol = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.5, 1.0, 0.0, 0.2, -0.3, 1.0]);
        let x = gaussian(50, &chol, 1);
        let s0 = shrink_covariance(&x, Shrinkage::Fixed(0.0)).unwrap();
        assert_eq!(s0.sigma, s0.sample);
        let s1 = shrink_covariance(&x, Shrinkage::Fixed(1.0)).unwrap();
        let target = DMatrix::from_diagonal(&s1.sample.diagonal());
        assert_eq!(s1.sigma, target);
    }

    #[test]
    fn analytic_estimate_is_consistent_for_large_samples() {
        // Σ = L Lᵀ with strong correlations.
        let chol = DMatrix::from_row_slice(
            5,
            5,
            &[
                1.0, 0.0, 0.0, 0.0, 0.0, //
                0.8, 0.6, 0.0, 0.0, 0.0, //
                0.5, 0.3, 0.8, 0.0, 0.0, //
                -0.4, 0.2, 0.1, 0.9, 0.0, //
                0.3, -0.5, 0.2, 0.3, 0.7,
            ],
        );
        let truth = &chol * chol.transpose();
        let x = gaussian(5000, &chol, 2);
        let s = shrink_covariance(&x, Shrinkage::Analytic).unwrap();
        assert!(s.intensity < 0.05, "λ* = {}", s.intensity);
        let rel = (&s.sigma - &truth).norm() / truth.norm();
        assert!(rel < 0.1, "relative Frobenius error {rel}");
    }

    #[test]
    fn independent_features_shrink_hard() {
        let x = gaussian(20, &DMatrix::identity(10, 10), 3);
        let s = shrink_covariance(&x, Shrinkage::Analytic).unwrap();
        assert!(s.intensity > 0.3, "λ* = {}", s.intensity);
        assert!((0.0..=1.0).contains(&s.intensity));
    }

    #[test]
    fn rejects_single_sample_and_bad_intensity() {
        let x = DMatrix::from_row_slice(1, 2, &[1.0, 2.0]);
        assert!(matches!(shrink_covariance(&x, Shrinkage::Analytic), Err(Error::TooFewSamples { .. })));
        let x = DMatrix::from_row_slice(2, 1, &[1.0, -1.0]);
        assert!(shrink_covariance(&x, Shrinkage::Fixed(1.5)).is_err());
    }
}
