//! Synthetic test signals with exact ground truth.
//!
//! Every generator is specified declaratively by a [`SynthSpec`] (JSON-
//! friendly, tagged by `kind`) and returns both the signal and a
//! [`GroundTruth`] carrying per-sample instantaneous frequency and — when
//! noise is requested — per-sample SNR, so estimators can be scored
//! against exact references. All randomness is drawn from a counter-seeded
//! ChaCha8 stream: the same spec always produces the same samples, bit for
//! bit.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{GaborError, Result};
use crate::signal::Signal;
use crate::window::{synth_window, WindowParams};

const TAU: f64 = 2.0 * std::f64::consts::PI;

fn default_amplitude() -> f64 {
    1.0
}

/// Declarative description of a synthetic signal.
///
/// Frequencies are in Hz, times in seconds, and chirp slopes follow each
/// variant's field documentation. `noise_std` is the standard deviation of
/// white Gaussian noise added per sample (0 = noiseless) and `seed` makes
/// the noise reproducible.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SynthSpec {
    /// Pure sinusoid `amplitude * cos(2 pi frequency t)`.
    Tone {
        n: usize,
        sample_rate: f64,
        frequency: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default)]
        noise_std: f64,
        #[serde(default)]
        seed: u64,
    },
    /// Cosine sweeping linearly from `f_start` to `f_end` over the signal.
    LinearChirp {
        n: usize,
        sample_rate: f64,
        f_start: f64,
        f_end: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default)]
        noise_std: f64,
        #[serde(default)]
        seed: u64,
    },
    /// The chirped Gaussian window itself as a (complex) signal; the
    /// matched-filter test case. `sigma` and `s` follow the window
    /// conventions (relative width, slope in bins per sample).
    ChirpedGaussian {
        n: usize,
        sample_rate: f64,
        sigma: f64,
        s: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default)]
        noise_std: f64,
        #[serde(default)]
        seed: u64,
    },
    /// Two equal-amplitude cosine chirps starting at `f_lo` and `f_lo +
    /// spacing`, both sweeping at `sweep_rate` Hz per second; the
    /// resolvability test case.
    TwoChirpPair {
        n: usize,
        sample_rate: f64,
        f_lo: f64,
        spacing: f64,
        sweep_rate: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default)]
        noise_std: f64,
        #[serde(default)]
        seed: u64,
    },
    /// Band-limited square wave chirping from `f_start` to `f_end` over the
    /// first `active_len` samples (whole signal when omitted), its envelope
    /// decaying log-linearly at `decay_db_per_s`; zero afterwards. Odd
    /// harmonics are kept while they stay below Nyquist.
    SquareChirpDecay {
        n: usize,
        sample_rate: f64,
        f_start: f64,
        f_end: f64,
        #[serde(default)]
        active_len: Option<usize>,
        decay_db_per_s: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default)]
        noise_std: f64,
        #[serde(default)]
        seed: u64,
    },
    /// Train of exponentially decaying sine bursts every `interval`
    /// seconds starting at `start_time`, each gliding from `frequency` at
    /// `glide` Hz per second.
    BubbleTrain {
        n: usize,
        sample_rate: f64,
        n_bursts: usize,
        start_time: f64,
        interval: f64,
        tau: f64,
        frequency: f64,
        glide: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default)]
        noise_std: f64,
        #[serde(default)]
        seed: u64,
    },
    /// White Gaussian noise alone.
    WhiteNoise {
        n: usize,
        sample_rate: f64,
        std: f64,
        #[serde(default)]
        seed: u64,
    },
}

impl SynthSpec {
    /// Number of samples the spec will produce.
    pub fn n(&self) -> usize {
        match *self {
            SynthSpec::Tone { n, .. }
            | SynthSpec::LinearChirp { n, .. }
            | SynthSpec::ChirpedGaussian { n, .. }
            | SynthSpec::TwoChirpPair { n, .. }
            | SynthSpec::SquareChirpDecay { n, .. }
            | SynthSpec::BubbleTrain { n, .. }
            | SynthSpec::WhiteNoise { n, .. } => n,
        }
    }

    /// Replaces the noise seed (used by pipeline-level seed overrides).
    pub fn set_seed(&mut self, value: u64) {
        match self {
            SynthSpec::Tone { seed, .. }
            | SynthSpec::LinearChirp { seed, .. }
            | SynthSpec::ChirpedGaussian { seed, .. }
            | SynthSpec::TwoChirpPair { seed, .. }
            | SynthSpec::SquareChirpDecay { seed, .. }
            | SynthSpec::BubbleTrain { seed, .. }
            | SynthSpec::WhiteNoise { seed, .. } => *seed = value,
        }
    }
}

/// Exact per-sample reference data for a synthesized signal.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GroundTruth {
    /// Starting frequency of each deterministic component, in Hz.
    pub component_frequencies: Vec<f64>,
    /// Instantaneous frequency of the (dominant) component per sample, in
    /// Hz; `NaN` where the signal is silent; `None` for pure noise.
    pub instantaneous_frequency: Option<Vec<f64>>,
    /// Instantaneous SNR per sample in dB, present when noise was added;
    /// `-inf` where the signal is silent.
    pub snr_db: Option<Vec<f64>>,
    /// Standard deviation of the added noise (0 when noiseless).
    pub noise_std: f64,
}

fn bad(msg: String) -> GaborError {
    GaborError::BadSynthSpec(msg)
}

fn check_common(n: usize, sample_rate: f64, amplitude: f64, noise_std: f64) -> Result<()> {
    if n < 2 {
        return Err(bad(format!("need at least 2 samples, got {n}")));
    }
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(bad(format!("sample rate must be positive, got {sample_rate}")));
    }
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(bad(format!("amplitude must be positive, got {amplitude}")));
    }
    if !(noise_std.is_finite() && noise_std >= 0.0) {
        return Err(bad(format!("noise_std must be >= 0, got {noise_std}")));
    }
    Ok(())
}

fn check_freq(label: &str, f: f64, sample_rate: f64) -> Result<()> {
    if !(f.is_finite() && (0.0..=sample_rate / 2.0).contains(&f)) {
        return Err(bad(format!(
            "{label} = {f} Hz outside [0, Nyquist = {}]",
            sample_rate / 2.0
        )));
    }
    Ok(())
}

fn noise_vec(n: usize, std: f64, seed: u64) -> Vec<f64> {
    if std == 0.0 {
        return vec![0.0; n];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, std).unwrap();
    (0..n).map(|_| normal.sample(&mut rng)).collect()
}

/// Per-sample SNR in dB for a deterministic amplitude envelope against
/// noise of variance `v`: `10 log10((a^2/2) / v)`.
fn snr_track(amps: &[f64], v: f64) -> Vec<f64> {
    amps.iter()
        .map(|&a| {
            if a > 0.0 {
                10.0 * (a * a / 2.0 / v).log10()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect()
}

/// Builds the signal described by `spec` together with its ground truth.
pub fn synthesize(spec: &SynthSpec) -> Result<(Signal, GroundTruth)> {
    match *spec {
        SynthSpec::Tone {
            n,
            sample_rate,
            frequency,
            amplitude,
            noise_std,
            seed,
        } => {
            check_common(n, sample_rate, amplitude, noise_std)?;
            check_freq("frequency", frequency, sample_rate)?;
            let noise = noise_vec(n, noise_std, seed);
            let samples: Vec<f64> = (0..n)
                .map(|t| amplitude * (TAU * frequency * t as f64 / sample_rate).cos() + noise[t])
                .collect();
            let truth = GroundTruth {
                component_frequencies: vec![frequency],
                instantaneous_frequency: Some(vec![frequency; n]),
                snr_db: (noise_std > 0.0)
                    .then(|| snr_track(&vec![amplitude; n], noise_std * noise_std)),
                noise_std,
            };
            Ok((Signal::from_real(&samples, sample_rate)?, truth))
        }
        SynthSpec::LinearChirp {
            n,
            sample_rate,
            f_start,
            f_end,
            amplitude,
            noise_std,
            seed,
        } => {
            check_common(n, sample_rate, amplitude, noise_std)?;
            check_freq("f_start", f_start, sample_rate)?;
            check_freq("f_end", f_end, sample_rate)?;
            let dur = n as f64 / sample_rate;
            let rate = (f_end - f_start) / dur; // Hz per second
            let noise = noise_vec(n, noise_std, seed);
            let mut freq = Vec::with_capacity(n);
            let samples: Vec<f64> = (0..n)
                .map(|t| {
                    let u = t as f64 / sample_rate;
                    freq.push(f_start + rate * u);
                    amplitude * (TAU * (f_start * u + rate * u * u / 2.0)).cos() + noise[t]
                })
                .collect();
            let truth = GroundTruth {
                component_frequencies: vec![f_start],
                instantaneous_frequency: Some(freq),
                snr_db: (noise_std > 0.0)
                    .then(|| snr_track(&vec![amplitude; n], noise_std * noise_std)),
                noise_std,
            };
            Ok((Signal::from_real(&samples, sample_rate)?, truth))
        }
        SynthSpec::ChirpedGaussian {
            n,
            sample_rate,
            sigma,
            s,
            amplitude,
            noise_std,
            seed,
        } => {
            check_common(n, sample_rate, amplitude, noise_std)?;
            let g = synth_window(WindowParams::new(sigma, s), n)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let normal = Normal::new(0.0, noise_std.max(f64::MIN_POSITIVE)).unwrap();
            let samples: Vec<Complex64> = g
                .values()
                .iter()
                .map(|&z| {
                    let w = if noise_std > 0.0 {
                        Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng))
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    amplitude * z + w
                })
                .collect();
            // Instantaneous frequency of the analytic chirp on centered
            // times: s scaled to Hz.
            let freq: Vec<f64> = (0..n)
                .map(|t| {
                    let tc = crate::window::centered_time(t, n);
                    s * (n as f64 + 1.0) / (n as f64 * n as f64) * tc * sample_rate
                })
                .collect();
            let truth = GroundTruth {
                component_frequencies: vec![0.0],
                instantaneous_frequency: Some(freq),
                snr_db: None,
                noise_std,
            };
            Ok((Signal::new(samples, sample_rate)?, truth))
        }
        SynthSpec::TwoChirpPair {
            n,
            sample_rate,
            f_lo,
            spacing,
            sweep_rate,
            amplitude,
            noise_std,
            seed,
        } => {
            check_common(n, sample_rate, amplitude, noise_std)?;
            if !(spacing.is_finite() && spacing > 0.0) {
                return Err(bad(format!("spacing must be positive, got {spacing}")));
            }
            let dur = n as f64 / sample_rate;
            check_freq("f_lo", f_lo, sample_rate)?;
            check_freq("f_lo + spacing", f_lo + spacing, sample_rate)?;
            check_freq("swept f_lo end", f_lo + sweep_rate * dur, sample_rate)?;
            check_freq(
                "swept f_hi end",
                f_lo + spacing + sweep_rate * dur,
                sample_rate,
            )?;
            let noise = noise_vec(n, noise_std, seed);
            let mut freq = Vec::with_capacity(n);
            let samples: Vec<f64> = (0..n)
                .map(|t| {
                    let u = t as f64 / sample_rate;
                    let sweep = sweep_rate * u * u / 2.0;
                    freq.push(f_lo + spacing / 2.0 + sweep_rate * u);
                    amplitude
                        * ((TAU * (f_lo * u + sweep)).cos()
                            + (TAU * ((f_lo + spacing) * u + sweep)).cos())
                        + noise[t]
                })
                .collect();
            let truth = GroundTruth {
                component_frequencies: vec![f_lo, f_lo + spacing],
                instantaneous_frequency: Some(freq),
                snr_db: (noise_std > 0.0)
                    .then(|| snr_track(&vec![amplitude; n], noise_std * noise_std)),
                noise_std,
            };
            Ok((Signal::from_real(&samples, sample_rate)?, truth))
        }
        SynthSpec::SquareChirpDecay {
            n,
            sample_rate,
            f_start,
            f_end,
            active_len,
            decay_db_per_s,
            amplitude,
            noise_std,
            seed,
        } => {
            check_common(n, sample_rate, amplitude, noise_std)?;
            check_freq("f_start", f_start, sample_rate)?;
            check_freq("f_end", f_end, sample_rate)?;
            if !decay_db_per_s.is_finite() {
                return Err(bad(format!("decay_db_per_s must be finite, got {decay_db_per_s}")));
            }
            let active = active_len.unwrap_or(n);
            if active < 2 || active > n {
                return Err(bad(format!(
                    "active_len {active} outside [2, n = {n}]"
                )));
            }
            let f_max = f_start.max(f_end);
            let harmonics: Vec<usize> = (1..)
                .step_by(2)
                .take_while(|&k| k as f64 * f_max < sample_rate / 2.0)
                .collect();
            if harmonics.is_empty() {
                return Err(bad(format!(
                    "fundamental {f_max} Hz already at or above Nyquist"
                )));
            }
            let dur_active = active as f64 / sample_rate;
            let rate = (f_end - f_start) / dur_active;
            let noise = noise_vec(n, noise_std, seed);
            let mut fund_amp = vec![0.0; n];
            let mut freq = vec![f64::NAN; n];
            let samples: Vec<f64> = (0..n)
                .map(|t| {
                    if t >= active {
                        return noise[t];
                    }
                    let u = t as f64 / sample_rate;
                    let phase = TAU * (f_start * u + rate * u * u / 2.0);
                    let a = amplitude * 10f64.powf(-decay_db_per_s * u / 20.0);
                    fund_amp[t] = 4.0 / std::f64::consts::PI * a;
                    freq[t] = f_start + rate * u;
                    let wave: f64 = harmonics
                        .iter()
                        .map(|&k| 4.0 / (std::f64::consts::PI * k as f64) * (k as f64 * phase).sin())
                        .sum();
                    a * wave + noise[t]
                })
                .collect();
            let truth = GroundTruth {
                component_frequencies: harmonics.iter().map(|&k| k as f64 * f_start).collect(),
                instantaneous_frequency: Some(freq),
                snr_db: (noise_std > 0.0).then(|| snr_track(&fund_amp, noise_std * noise_std)),
                noise_std,
            };
            Ok((Signal::from_real(&samples, sample_rate)?, truth))
        }
        SynthSpec::BubbleTrain {
            n,
            sample_rate,
            n_bursts,
            start_time,
            interval,
            tau,
            frequency,
            glide,
            amplitude,
            noise_std,
            seed,
        } => {
            check_common(n, sample_rate, amplitude, noise_std)?;
            check_freq("frequency", frequency, sample_rate)?;
            if n_bursts == 0 {
                return Err(bad("n_bursts must be at least 1".into()));
            }
            if !(start_time.is_finite() && start_time >= 0.0) {
                return Err(bad(format!("start_time must be >= 0, got {start_time}")));
            }
            if !(interval.is_finite() && interval > 0.0) {
                return Err(bad(format!("interval must be positive, got {interval}")));
            }
            if !(tau.is_finite() && tau > 0.0) {
                return Err(bad(format!("tau must be positive, got {tau}")));
            }
            if !glide.is_finite() {
                return Err(bad(format!("glide must be finite, got {glide}")));
            }
            let noise = noise_vec(n, noise_std, seed);
            let mut freq = vec![f64::NAN; n];
            let samples: Vec<f64> = (0..n)
                .map(|t| {
                    let u = t as f64 / sample_rate;
                    let mut x = 0.0;
                    for k in 0..n_bursts {
                        let dt = u - (start_time + k as f64 * interval);
                        if dt >= 0.0 {
                            x += amplitude
                                * (-dt / tau).exp()
                                * (TAU * (frequency * dt + glide * dt * dt / 2.0)).sin();
                            // The most recent burst dominates; record its
                            // glide as the instantaneous frequency.
                            freq[t] = frequency + glide * dt;
                        }
                    }
                    x + noise[t]
                })
                .collect();
            let truth = GroundTruth {
                component_frequencies: vec![frequency],
                instantaneous_frequency: Some(freq),
                snr_db: None,
                noise_std,
            };
            Ok((Signal::from_real(&samples, sample_rate)?, truth))
        }
        SynthSpec::WhiteNoise {
            n,
            sample_rate,
            std,
            seed,
        } => {
            if !(std.is_finite() && std > 0.0) {
                return Err(bad(format!("std must be positive, got {std}")));
            }
            check_common(n, sample_rate, 1.0, std)?;
            let samples = noise_vec(n, std, seed);
            let truth = GroundTruth {
                component_frequencies: vec![],
                instantaneous_frequency: None,
                snr_db: None,
                noise_std: std,
            };
            Ok((Signal::from_real(&samples, sample_rate)?, truth))
        }
    }
}
