//! Complex sample sequences with an attached sample rate.

use num_complex::Complex64;

use crate::error::{GaborError, Result};

/// A finite complex-valued signal of length `N` with a sample rate in Hz.
///
/// The sample rate defaults to 1.0 when a source does not provide one, in
/// which case frequencies are in cycles per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<Complex64>,
    sample_rate: f64,
}

impl Signal {
    /// Builds a signal, validating length and finiteness.
    pub fn new(samples: Vec<Complex64>, sample_rate: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(GaborError::SignalTooShort(samples.len()));
        }
        for (i, z) in samples.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(GaborError::NonFiniteSample(i));
            }
        }
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(GaborError::BadConfig(format!(
                "sample rate must be finite and positive, got {sample_rate}"
            )));
        }
        Ok(Self { samples, sample_rate })
    }

    /// Builds a signal from real samples.
    pub fn from_real(samples: &[f64], sample_rate: f64) -> Result<Self> {
        Self::new(samples.iter().map(|&x| Complex64::new(x, 0.0)).collect(), sample_rate)
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    /// Energy of the signal, `sum |f(n)|^2`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Truncates or zero-pads to exactly `n` samples, returning what was done.
    pub fn fit_length(&self, n: usize) -> Result<(Signal, LengthPolicy)> {
        let policy = match self.len().cmp(&n) {
            std::cmp::Ordering::Equal => LengthPolicy::Unchanged,
            std::cmp::Ordering::Greater => LengthPolicy::Truncated { from: self.len() },
            std::cmp::Ordering::Less => LengthPolicy::ZeroPadded { from: self.len() },
        };
        let mut samples = self.samples.clone();
        samples.resize(n, Complex64::new(0.0, 0.0));
        Ok((Signal::new(samples, self.sample_rate)?, policy))
    }
}

/// Records how a signal was adjusted to the analysis length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum LengthPolicy {
    Unchanged,
    Truncated { from: usize },
    ZeroPadded { from: usize },
}
