//! Zero-phase FIR band-pass (0.5–35 Hz) for continuous recordings.
//!
//! Both edges are linear-phase windowed-sinc designs with a Hamming window.
//! The 35 Hz low-pass has order `fs / 2` (100 at 200 Hz). A 0.5 Hz high-pass
//! needs a far longer kernel for its transition band to sit near 0.5 Hz, so
//! its order is chosen from the Hamming transition width, `3.3 · fs / 0.5`.
//! The cascaded kernel is applied forward and backward, which squares the
//! magnitude response and cancels the phase.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::types::Recording;
use crate::error::{Error, Result};

pub const LOW_PASS_HZ: f64 = 35.0;
pub const HIGH_PASS_HZ: f64 = 0.5;
pub const MIN_FS_HZ: f64 = 80.0;

const HAMMING_TRANSITION: f64 = 3.3;

#[derive(Debug, Clone)]
pub struct BandPass {
    fs: f64,
    kernel: Vec<f64>,
}

fn even_order(x: f64) -> usize {
    let n = x.round() as usize;
    n + n % 2
}

/// Unit-DC-gain windowed-sinc low-pass with `order + 1` taps.
pub fn lowpass_kernel(fs: f64, cutoff_hz: f64, order: usize) -> Vec<f64> {
    let fc = cutoff_hz / fs;
    let mid = order as f64 / 2.0;
    let mut h: Vec<f64> = (0..=order)
        .map(|n| {
            let x = n as f64 - mid;
            let sinc = if x == 0.0 {
                2.0 * fc
            } else {
                (2.0 * PI * fc * x).sin() / (PI * x)
            };
            let window = 0.54 - 0.46 * (2.0 * PI * n as f64 / order as f64).cos();
            sinc * window
        })
        .collect();
    let sum: f64 = h.iter().sum();
    h.iter_mut().for_each(|v| *v /= sum);
    h
}

/// Spectral inversion of a low-pass: zero DC gain.
pub fn highpass_kernel(fs: f64, cutoff_hz: f64, order: usize) -> Vec<f64> {
    let mut h = lowpass_kernel(fs, cutoff_hz, order);
    h.iter_mut().for_each(|v| *v = -*v);
    h[order / 2] += 1.0;
    h
}

/// Full linear convolution via FFT.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    if a.len().min(b.len()) <= 32 {
        let mut out = vec![0.0; out_len];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        return out;
    }
    let n = out_len.next_power_of_two();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);
    let pad = |v: &[f64]| {
        let mut buf: Vec<Complex<f64>> = v.iter().map(|&x| Complex::new(x, 0.0)).collect();
        buf.resize(n, Complex::new(0.0, 0.0));
        buf
    };
    let mut fa = pad(a);
    let mut fb = pad(b);
    fft.process(&mut fa);
    fft.process(&mut fb);
    fa.iter_mut().zip(&fb).for_each(|(x, y)| *x *= y);
    ifft.process(&mut fa);
    fa.truncate(out_len);
    fa.into_iter().map(|c| c.re / n as f64).collect()
}

impl BandPass {
    pub fn design(fs: f64) -> Result<Self> {
        if !(fs >= MIN_FS_HZ) {
            return Err(Error::SamplingRateTooLow { fs, min: MIN_FS_HZ });
        }
        let lp = lowpass_kernel(fs, LOW_PASS_HZ, even_order(fs / 2.0));
        let hp = highpass_kernel(fs, HIGH_PASS_HZ, even_order(HAMMING_TRANSITION * fs / HIGH_PASS_HZ));
        Ok(Self {
            fs,
            kernel: convolve(&lp, &hp),
        })
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    /// The cascaded single-pass kernel (symmetric, odd length).
    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    /// Single-pass magnitude response at `freq_hz`; the applied response is
    /// its square.
    pub fn gain(&self, freq_hz: f64) -> f64 {
        let w = 2.0 * PI * freq_hz / self.fs;
        let (re, im) = self
            .kernel
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(re, im), (n, &h)| {
                (re + h * (w * n as f64).cos(), im - h * (w * n as f64).sin())
            });
        (re * re + im * im).sqrt()
    }

    /// Filter one trace forward and backward. Edges are padded with an odd
    /// reflection so that constant and linear trends carry through the pad.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        if n == 0 {
            return Vec::new();
        }
        let taps = self.kernel.len();
        let pad = taps.min(n - 1);
        let mut padded = Vec::with_capacity(n + 2 * pad);
        padded.extend((1..=pad).rev().map(|k| 2.0 * x[0] - x[k]));
        padded.extend_from_slice(x);
        padded.extend((1..=pad).map(|k| 2.0 * x[n - 1] - x[n - 1 - k]));

        let delay = taps / 2;
        let once = |signal: &[f64]| -> Vec<f64> {
            let full = convolve(signal, &self.kernel);
            full[delay..delay + signal.len()].to_vec()
        };
        // Symmetric kernel with delay compensation: each pass is already
        // zero-phase, so forward-backward reduces to two centered passes.
        let y = once(&once(&padded));
        y[pad..pad + n].to_vec()
    }
}

/// Band-pass every channel of a recording; events and metadata are kept.
pub fn filter(recording: &Recording) -> Result<Recording> {
    let bp = BandPass::design(recording.fs)?;
    Ok(Recording {
        data: recording.data.iter().map(|ch| bp.apply(ch)).collect(),
        ..recording.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(freq: f64, fs: f64, n: usize, amp: f64) -> Vec<f64> {
        (0..n)
            .map(|k| amp * (2.0 * PI * freq * k as f64 / fs).sin())
            .collect()
    }

    /// RMS-based amplitude over the central half, away from edges.
    fn central_amplitude(x: &[f64]) -> f64 {
        let n = x.len();
        let mid = &x[n / 4..3 * n / 4];
        (mid.iter().map(|v| v * v).sum::<f64>() / mid.len() as f64).sqrt() * 2f64.sqrt()
    }

    #[test]
    fn rejects_low_sampling_rate() {
        assert!(matches!(BandPass::design(60.0), Err(Error::SamplingRateTooLow { .. })));
        assert!(BandPass::design(80.0).is_ok());
    }

    #[test]
    fn kernel_is_symmetric_with_zero_dc() {
        let bp = BandPass::design(200.0).unwrap();
        let k = bp.kernel();
        assert_eq!(k.len() % 2, 1);
        for i in 0..k.len() / 2 {
            assert!((k[i] - k[k.len() - 1 - i]).abs() < 1e-15);
        }
        assert!(k.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn attenuates_line_noise() {
        let bp = BandPass::design(200.0).unwrap();
        let x = sine(50.0, 200.0, 4000, 10.0);
        let y = bp.apply(&x);
        assert!(central_amplitude(&y) < 0.05 * 10.0, "{}", central_amplitude(&y));
        // Designed response, squared by the second pass.
        assert!(bp.gain(50.0).powi(2) < 0.05);
    }

    #[test]
    fn passes_alpha_band() {
        let bp = BandPass::design(200.0).unwrap();
        let y = bp.apply(&sine(10.0, 200.0, 4000, 10.0));
        let amp = central_amplitude(&y);
        assert!((amp - 10.0).abs() < 0.5, "{amp}");
        assert!((bp.gain(10.0).powi(2) - 1.0).abs() < 0.05);
    }

    #[test]
    fn removes_dc_offset() {
        let bp = BandPass::design(200.0).unwrap();
        let y = bp.apply(&vec![10.0; 3000]);
        assert!(y[500..2500].iter().all(|v| v.abs() < 0.1));
    }

    #[test]
    fn preserves_length_and_is_linear() {
        let bp = BandPass::design(200.0).unwrap();
        let x: Vec<f64> = (0..1500).map(|k| ((k * 37) % 101) as f64 - 50.0).collect();
        let z = sine(7.0, 200.0, 1500, 3.0);
        let (a, b) = (2.5, -1.25);
        let mix: Vec<f64> = x.iter().zip(&z).map(|(u, v)| a * u + b * v).collect();
        let fx = bp.apply(&x);
        let fz = bp.apply(&z);
        let fmix = bp.apply(&mix);
        assert_eq!(fmix.len(), 1500);
        let scale = fmix.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for k in 0..1500 {
            let expect = a * fx[k] + b * fz[k];
            assert!((fmix[k] - expect).abs() <= 1e-6 * scale);
        }
    }

    #[test]
    fn fft_and_direct_convolution_agree() {
        let a: Vec<f64> = (0..200).map(|i| (i as f64 * 0.3).sin()).collect();
        let b: Vec<f64> = (0..50).map(|i| (i as f64 * 0.7).cos()).collect();
        let fast = convolve(&a, &b);
        let mut slow = vec![0.0; 249];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                slow[i + j] += x * y;
            }
        }
        for (f, s) in fast.iter().zip(&slow) {
            assert!((f - s).abs() < 1e-10);
        }
    }
}
