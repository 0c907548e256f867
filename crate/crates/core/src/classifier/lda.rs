use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use nalgebra::{Cholesky, DMatrix, DVector};

use super::shrinkage::{shrink_covariance, Shrinkage};
use crate::eeg::{FeatureMatrix, Label};
use crate::error::{Error, Result};

/// Two-class Gaussian model with a shared shrunk covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaModel {
    pub mu_rel: DVector<f64>,
    pub mu_irr: DVector<f64>,
    pub sigma: DMatrix<f64>,
    /// `[p(relevant), p(irrelevant)]`.
    pub priors: [f64; 2],
    pub shrinkage_intensity: f64,
    weights: DVector<f64>,
    bias: f64,
}

const MODEL_MAGIC: &[u8; 8] = b"NRLDAM01";
const MODEL_VERSION: u32 = 1;

impl LdaModel {
    pub fn train(features: &FeatureMatrix, shrinkage: Shrinkage) -> Result<Self> {
        if features.labels.contains(&Label::Unlabeled) {
            return Err(Error::DegenerateTrainingSet("unlabeled epochs in training data".into()));
        }
        Self::train_rows(&features.data, &features.relevant_mask(), shrinkage)
    }

    /// Fit from raw rows and a relevance mask.
    pub fn train_rows(x: &DMatrix<f64>, relevant: &[bool], shrinkage: Shrinkage) -> Result<Self> {
        let (n, d) = x.shape();
        if relevant.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: relevant.len(),
            });
        }
        let n_rel = relevant.iter().filter(|&&r| r).count();
        let n_irr = n - n_rel;
        if n_rel == 0 || n_irr == 0 {
            return Err(Error::DegenerateTrainingSet(format!(
                "{n_rel} relevant and {n_irr} irrelevant samples"
            )));
        }

        let mut mu_rel = DVector::zeros(d);
        let mut mu_irr = DVector::zeros(d);
        for (i, &r) in relevant.iter().enumerate() {
            let row = x.row(i).transpose();
            if r {
                mu_rel += row;
            } else {
                mu_irr += row;
            }
        }
        mu_rel /= n_rel as f64;
        mu_irr /= n_irr as f64;

        let mut residuals = x.clone();
        for (i, &r) in relevant.iter().enumerate() {
            let mu = if r { &mu_rel } else { &mu_irr };
            let mut row = residuals.row_mut(i);
            row -= mu.transpose();
        }
        let cov = shrink_covariance(&residuals, shrinkage)?;
        let priors = [n_rel as f64 / n as f64, n_irr as f64 / n as f64];
        Self::from_parts(mu_rel, mu_irr, cov.sigma, priors, cov.intensity)
    }

    fn from_parts(
        mu_rel: DVector<f64>,
        mu_irr: DVector<f64>,
        sigma: DMatrix<f64>,
        priors: [f64; 2],
        shrinkage_intensity: f64,
    ) -> Result<Self> {
        let chol = Cholesky::new(sigma.clone()).ok_or(Error::NotPositiveDefinite)?;
        let weights = chol.solve(&(&mu_rel - &mu_irr));
        let bias = -0.5 * (&mu_rel + &mu_irr).dot(&weights) + (priors[0] / priors[1]).ln();
        Ok(Self {
            mu_rel,
            mu_irr,
            sigma,
            priors,
            shrinkage_intensity,
            weights,
            bias,
        })
    }

    pub fn dim(&self) -> usize {
        self.mu_rel.len()
    }

    /// Discriminant direction `Σ⁻¹(µ_rel − µ_irr)`.
    pub fn discriminant(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    /// Log posterior odds of relevance.
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias)
    }

    /// `(p(relevant | x), p(irrelevant | x))`.
    pub fn posterior(&self, x: &[f64]) -> Result<(f64, f64)> {
        let z = self.decision(x)?;
        Ok((logistic(z), logistic(-z)))
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        self.decision(x).map(logistic)
    }

    /// p(relevant) for every row.
    pub fn predict_rows(&self, x: &DMatrix<f64>) -> Result<Vec<f64>> {
        if x.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.ncols(),
            });
        }
        let z = x * &self.weights;
        Ok(z.iter().map(|&v| logistic(v + self.bias)).collect())
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(MODEL_MAGIC)?;
        w.write_u32::<LE>(MODEL_VERSION)?;
        w.write_u64::<LE>(self.dim() as u64)?;
        for v in self.mu_rel.iter().chain(self.mu_irr.iter()) {
            w.write_f64::<LE>(*v)?;
        }
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                w.write_f64::<LE>(self.sigma[(i, j)])?;
            }
        }
        w.write_f64::<LE>(self.priors[0])?;
        w.write_f64::<LE>(self.priors[1])?;
        w.write_f64::<LE>(self.shrinkage_intensity)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let bad = |msg: &str| Error::Config(format!("invalid model file: {msg}"));
        let mut read = || -> std::io::Result<_> {
            let mut magic = [0u8; 8];
            r.read_exact(&mut magic)?;
            let version = r.read_u32::<LE>()?;
            let d = r.read_u64::<LE>()? as usize;
            let mut vec = |len: usize| -> std::io::Result<Vec<f64>> {
                (0..len).map(|_| r.read_f64::<LE>()).collect()
            };
            let mu_rel = vec(d)?;
            let mu_irr = vec(d)?;
            let sigma = vec(d * d)?;
            let tail = vec(3)?;
            Ok((magic, version, d, mu_rel, mu_irr, sigma, tail))
        };
        let (magic, version, d, mu_rel, mu_irr, sigma, tail) =
            read().map_err(|e| bad(&e.to_string()))?;
        if &magic != MODEL_MAGIC || version != MODEL_VERSION {
            return Err(bad("unknown format or version"));
        }
        Self::from_parts(
            DVector::from_vec(mu_rel),
            DVector::from_vec(mu_irr),
            DMatrix::from_row_slice(d, d, &sigma),
            [tail[0], tail[1]],
            tail[2],
        )
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).map_err(|e| Error::io(path, e))?;
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(&mut bytes.as_slice())
    }
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Relevant iff `p > 0.5`.
pub fn binarize(p: f64) -> Label {
    binarize_at(p, 0.5)
}

pub fn binarize_at(p: f64, threshold: f64) -> Label {
    if p > threshold {
        Label::Relevant
    } else {
        Label::Irrelevant
    }
}
