//! Grand averages and interval statistics over ERP components.

use super::types::{window_samples, Epoch, Label};
use crate::error::{Error, Result};
use crate::stats::{paired_t_test, TTest};

/// Mean ERP, `n_channels × n_samples` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ErpCurve {
    pub n_channels: usize,
    pub n_samples: usize,
    pub fs: f64,
    pub n_epochs: usize,
    pub data: Vec<f64>,
}

impl ErpCurve {
    pub fn channel(&self, c: usize) -> &[f64] {
        &self.data[c * self.n_samples..(c + 1) * self.n_samples]
    }

    /// Mean amplitude of channel `c` over `[start_ms, end_ms)`.
    pub fn interval_mean(&self, c: usize, start_ms: f64, end_ms: f64) -> f64 {
        let r = window_samples(self.fs, start_ms, end_ms);
        let ch = &self.channel(c)[r];
        ch.iter().sum::<f64>() / ch.len() as f64
    }

    /// Pointwise `self - other`.
    pub fn difference(&self, other: &ErpCurve) -> Result<ErpCurve> {
        if self.data.len() != other.data.len() {
            return Err(Error::DimensionMismatch {
                expected: self.data.len(),
                actual: other.data.len(),
            });
        }
        Ok(ErpCurve {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
            n_epochs: self.n_epochs.min(other.n_epochs),
            ..self.clone()
        })
    }
}

/// Pointwise mean over all epochs carrying `condition`.
pub fn grand_average(epochs: &[Epoch], condition: Label) -> Result<ErpCurve> {
    let selected: Vec<&Epoch> = epochs.iter().filter(|e| e.label == condition).collect();
    let first = selected
        .first()
        .ok_or_else(|| Error::EmptyCondition(condition.to_string()))?;
    let mut data = vec![0.0; first.data.len()];
    for e in &selected {
        if e.data.len() != data.len() {
            return Err(Error::DimensionMismatch {
                expected: data.len(),
                actual: e.data.len(),
            });
        }
        data.iter_mut().zip(&e.data).for_each(|(acc, v)| *acc += v);
    }
    let n = selected.len() as f64;
    data.iter_mut().for_each(|v| *v /= n);
    Ok(ErpCurve {
        n_channels: first.n_channels,
        n_samples: first.n_samples,
        fs: first.fs,
        n_epochs: selected.len(),
        data,
    })
}

/// Mean of per-participant averages, each participant weighted equally.
pub fn average_of_averages(curves: &[ErpCurve]) -> Result<ErpCurve> {
    let first = curves
        .first()
        .ok_or_else(|| Error::EmptyCondition("no participants".into()))?;
    let mut data = vec![0.0; first.data.len()];
    for c in curves {
        if c.data.len() != data.len() {
            return Err(Error::DimensionMismatch {
                expected: data.len(),
                actual: c.data.len(),
            });
        }
        data.iter_mut().zip(&c.data).for_each(|(acc, v)| *acc += v);
    }
    let n = curves.len() as f64;
    data.iter_mut().for_each(|v| *v /= n);
    Ok(ErpCurve {
        data,
        n_epochs: curves.iter().map(|c| c.n_epochs).sum(),
        ..first.clone()
    })
}

/// Paired two-sided t-test on per-participant interval means.
pub fn interval_test(relevant: &[f64], irrelevant: &[f64]) -> Result<TTest> {
    paired_t_test(relevant, irrelevant)
}

/// Canonical component windows, in ms.
pub const P3_WINDOW: (f64, f64) = (250.0, 350.0);
pub const N400_WINDOW: (f64, f64) = (350.0, 500.0);
pub const P600_WINDOW: (f64, f64) = (500.0, 850.0);

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(v: f64, label: Label) -> Epoch {
        Epoch {
            n_channels: 2,
            n_samples: 250,
            fs: 200.0,
            data: vec![v; 500],
            word: "w".into(),
            block: 1,
            label,
            doc: None,
        }
    }

    #[test]
    fn single_epoch_is_its_own_average() {
        let e = constant(1.5, Label::Relevant);
        let avg = grand_average(&[e.clone()], Label::Relevant).unwrap();
        assert_eq!(avg.data, e.data);
        assert_eq!(avg.n_epochs, 1);
    }

    #[test]
    fn symmetric_epochs_cancel() {
        let epochs = [constant(1.0, Label::Irrelevant), constant(-1.0, Label::Irrelevant), constant(9.0, Label::Relevant)];
        let avg = grand_average(&epochs, Label::Irrelevant).unwrap();
        assert!(avg.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn empty_condition_errors() {
        let err = grand_average(&[constant(1.0, Label::Relevant)], Label::Irrelevant).unwrap_err();
        assert!(matches!(err, Error::EmptyCondition(_)));
    }

    #[test]
    fn interval_mean_and_difference() {
        let a = grand_average(&[constant(3.0, Label::Relevant)], Label::Relevant).unwrap();
        let b = grand_average(&[constant(1.0, Label::Irrelevant)], Label::Irrelevant).unwrap();
        let d = a.difference(&b).unwrap();
        assert_eq!(d.interval_mean(1, P600_WINDOW.0, P600_WINDOW.1), 2.0);
    }
}
