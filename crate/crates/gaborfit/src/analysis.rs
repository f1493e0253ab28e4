//! Coefficient-domain analysis: ridge tracking, close-component
//! resolvability, and calibrated per-frame SNR estimation.
//!
//! All three consumers expect coefficients in a separable layout (the same
//! number of bins in every frame, as produced by rectangular, sheared, and
//! half-band lattices) and work frame by frame. SNR estimation is
//! calibrated: [`calibrate_gain`] measures the peak response of a window
//! to a unit-amplitude reference on a given lattice once, and
//! [`estimate_snr`] converts peak magnitudes to amplitudes with that gain.

#[cfg(test)]
use num_complex::Complex64;

use crate::dgt::{dgt, TfCoefficients};
use crate::error::{GaborError, Result};
use crate::lattice::QuantizedLattice;
use crate::signal::Signal;
use crate::window::GaborWindow;

/// One tracked frame: `time` in seconds, peak `frequency` in Hz (`None`
/// when the frame is identically zero), and the peak magnitude.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TrackEntry {
    pub time: f64,
    pub frequency: Option<f64>,
    pub magnitude: f64,
}

/// Per-frame peak-frequency track.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FrequencyTrack {
    pub entries: Vec<TrackEntry>,
}

/// Per-frame count of distinct spectral peaks inside a frequency band.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ResolvabilityReport {
    /// Band analyzed, in Hz.
    pub band: (f64, f64),
    /// Number of distinct local maxima per frame.
    pub per_frame: Vec<usize>,
    /// Fraction of frames with at least two distinct maxima.
    pub resolved_fraction: f64,
}

/// One SNR reading: `time` in seconds, estimated SNR in dB. The value is
/// `+inf` when the noise floor estimate falls below numerical resolution.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SnrEntry {
    pub time: f64,
    pub snr_db: f64,
}

/// Per-frame SNR estimates plus the shared noise-floor and gain values
/// they were computed from.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SnrTrack {
    pub entries: Vec<SnrEntry>,
    /// Median per-bin noise power across frames.
    pub noise_power: f64,
    /// Magnitude-to-amplitude conversion factor used.
    pub calibration_gain: f64,
}

fn uniform_bins(coeffs: &TfCoefficients) -> Result<usize> {
    if coeffs.n_frames() == 0 {
        return Err(GaborError::EmptyCoefficients);
    }
    coeffs.uniform_bin_count().ok_or(GaborError::NotSeparable)
}

/// Index of the largest magnitude; ties resolve to the lowest index (and
/// therefore, with ascending bins, to the lowest frequency).
fn argmax(mags: &[f64]) -> usize {
    let mut best = 0;
    for (i, &m) in mags.iter().enumerate() {
        if m > mags[best] {
            best = i;
        }
    }
    best
}

/// Tracks the per-frame peak frequency.
///
/// Each frame contributes one entry at time `shift / sample_rate`; the
/// frequency is the bin with the largest magnitude converted to Hz (ties
/// go to the lowest bin). A frame whose coefficients are all exactly zero
/// yields a gap (`frequency: None`).
pub fn track_peak(coeffs: &TfCoefficients, sample_rate: f64) -> Result<FrequencyTrack> {
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(GaborError::BadConfig(format!(
            "sample rate must be positive, got {sample_rate}"
        )));
    }
    uniform_bins(coeffs)?;
    let n = coeffs.n() as f64;
    let entries = (0..coeffs.n_frames())
        .map(|j| {
            let mags: Vec<f64> = coeffs.frame_values(j).iter().map(|v| v.norm()).collect();
            let i = argmax(&mags);
            let time = coeffs.time_shifts()[j] as f64 / sample_rate;
            if mags[i] == 0.0 {
                TrackEntry {
                    time,
                    frequency: None,
                    magnitude: 0.0,
                }
            } else {
                TrackEntry {
                    time,
                    frequency: Some(coeffs.frame_bins(j)[i] as f64 * sample_rate / n),
                    magnitude: mags[i],
                }
            }
        })
        .collect();
    Ok(FrequencyTrack { entries })
}

/// Counts distinct spectral peaks per frame within `band` (Hz).
///
/// A peak is a strict interior local maximum of the frame's magnitude
/// sequence restricted to the band, ignoring maxima below `1e-8` times the
/// frame's in-band maximum (numerical ripple in otherwise silent regions).
/// A frame counts as resolved when it shows at least two peaks.
pub fn resolvability(coeffs: &TfCoefficients, band: (f64, f64)) -> Result<ResolvabilityReport> {
    let (lo, hi) = band;
    let nyquist = coeffs.sample_rate() / 2.0;
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi && hi <= nyquist) {
        return Err(GaborError::EmptyBand { lo, hi });
    }
    uniform_bins(coeffs)?;
    let n = coeffs.n() as f64;
    let sr = coeffs.sample_rate();
    let mut any_in_band = false;
    let mut per_frame = Vec::with_capacity(coeffs.n_frames());
    for j in 0..coeffs.n_frames() {
        let mags: Vec<f64> = coeffs
            .frame_bins(j)
            .iter()
            .zip(coeffs.frame_values(j))
            .filter(|(&xi, _)| {
                let f = xi as f64 * sr / n;
                lo <= f && f <= hi
            })
            .map(|(_, v)| v.norm())
            .collect();
        if !mags.is_empty() {
            any_in_band = true;
        }
        let floor = 1e-8 * mags.iter().cloned().fold(0.0, f64::max);
        let count = (1..mags.len().saturating_sub(1))
            .filter(|&i| mags[i] > mags[i - 1] && mags[i] > mags[i + 1] && mags[i] > floor)
            .count();
        per_frame.push(count);
    }
    if !any_in_band {
        return Err(GaborError::EmptyBand { lo, hi });
    }
    let resolved = per_frame.iter().filter(|&&c| c >= 2).count();
    let resolved_fraction = resolved as f64 / per_frame.len() as f64;
    Ok(ResolvabilityReport {
        band,
        per_frame,
        resolved_fraction,
    })
}

/// Measures the magnitude-to-amplitude gain of a window on a lattice.
///
/// Synthesizes a unit-amplitude real reference at the lattice bin nearest
/// to `N/4` — chirping at the window's own slope so the reference sweeps
/// the way the window expects — transforms it, and averages the per-frame
/// peak magnitude over interior frames (the first and last two frames are
/// skipped to avoid wrap-around bias). The gain is the reciprocal of that
/// average, so `gain * peak magnitude` recovers amplitude `1.0` on the
/// reference itself.
pub fn calibrate_gain(
    window: &GaborWindow,
    lattice: &QuantizedLattice,
    sample_rate: f64,
) -> Result<f64> {
    let n = window.len();
    if lattice.n() != n {
        return Err(GaborError::LengthMismatch {
            expected: n,
            got: lattice.n(),
        });
    }
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(GaborError::BadConfig(format!(
            "sample rate must be positive, got {sample_rate}"
        )));
    }
    let nf = n as f64;
    let target = nf / 4.0;
    let calbin = *lattice
        .points()
        .iter()
        .take_while(|&&(x, _)| x == lattice.time_shifts()[0])
        .map(|(_, xi)| xi)
        .min_by(|&&a, &&b| {
            (a as f64 - target)
                .abs()
                .partial_cmp(&(b as f64 - target).abs())
                .unwrap()
                .then(a.cmp(&b))
        })
        .ok_or(GaborError::EmptyLattice)?;
    let s = window.params().s;
    let reference: Vec<f64> = (0..n)
        .map(|t| {
            let tf = t as f64;
            let u = tf - nf / 2.0;
            (2.0 * std::f64::consts::PI / nf * (calbin as f64 * tf + s * u * u / 2.0)).sin()
        })
        .collect();
    let coeffs = dgt(&Signal::from_real(&reference, sample_rate)?, window, lattice)?;
    let peaks: Vec<f64> = (0..coeffs.n_frames())
        .map(|j| {
            coeffs
                .frame_values(j)
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max)
        })
        .collect();
    let interior = if peaks.len() > 4 {
        &peaks[2..peaks.len() - 2]
    } else {
        &peaks[..]
    };
    let mean = interior.iter().sum::<f64>() / interior.len() as f64;
    if !(mean.is_finite() && mean > 0.0) {
        return Err(GaborError::BadConfig(format!(
            "degenerate calibration: window (sigma={}, s={}) gave no response",
            window.params().sigma,
            s
        )));
    }
    Ok(1.0 / mean)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        (values[m - 1] + values[m]) / 2.0
    }
}

/// Estimates per-frame SNR from peak magnitudes and an off-peak noise
/// floor.
///
/// Per frame, the peak bin is located and the noise is averaged over
/// "clean" bins: at least `guard_bins` bins away from the peak *and* below
/// the peak's first harmonic by the same margin (`bin <= 2 * peak_bin -
/// guard`), which keeps harmonics of non-sinusoidal signals out of the
/// noise estimate. Frames with fewer than four clean bins contribute no
/// noise reading; the per-bin noise power is the median of the remaining
/// frames' means, shared by all entries. Each entry is `10 log10((gain *
/// peak)^2 / 2 / noise_power)`; when the noise floor falls below `1e-20`
/// times the strongest frame's signal power the estimate saturates at
/// `+inf`.
pub fn estimate_snr(coeffs: &TfCoefficients, gain: f64, guard_bins: usize) -> Result<SnrTrack> {
    if !(gain.is_finite() && gain > 0.0) {
        return Err(GaborError::BadConfig(format!(
            "calibration gain must be positive, got {gain}"
        )));
    }
    if guard_bins == 0 {
        return Err(GaborError::BadConfig(
            "guard_bins must be at least 1".into(),
        ));
    }
    let nb = uniform_bins(coeffs)?;
    let sr = coeffs.sample_rate();

    let mut amps = Vec::with_capacity(coeffs.n_frames());
    let mut frame_noise = Vec::new();
    for j in 0..coeffs.n_frames() {
        let bins = coeffs.frame_bins(j);
        let mags: Vec<f64> = coeffs.frame_values(j).iter().map(|v| v.norm()).collect();
        let ipk = argmax(&mags);
        let xpk = bins[ipk] as f64;
        let step = if nb > 1 {
            (bins[nb - 1] - bins[0]) as f64 / (nb - 1) as f64
        } else {
            1.0
        };
        let g_abs = guard_bins as f64 * step;
        let clean: Vec<f64> = bins
            .iter()
            .zip(&mags)
            .filter(|(&xi, _)| {
                let x = xi as f64;
                x <= 2.0 * xpk - g_abs && (x - xpk).abs() >= g_abs
            })
            .map(|(_, &m)| m * m)
            .collect();
        if clean.len() >= 4 {
            frame_noise.push(clean.iter().sum::<f64>() / clean.len() as f64);
        }
        amps.push(gain * mags[ipk]);
    }
    if frame_noise.is_empty() {
        return Err(GaborError::AllBinsExcluded {
            guard: guard_bins,
            bins: nb,
        });
    }
    let noise_power = median(&mut frame_noise);
    let max_signal = amps.iter().map(|a| a * a / 2.0).fold(0.0, f64::max);
    let floor = 1e-20 * max_signal;
    let entries = coeffs
        .time_shifts()
        .iter()
        .zip(&amps)
        .map(|(&x, &amp)| {
            let signal = amp * amp / 2.0;
            let snr_db = if noise_power <= floor {
                if signal > 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                10.0 * (signal / noise_power).log10()
            };
            SnrEntry {
                time: x as f64 / sr,
                snr_db,
            }
        })
        .collect();
    Ok(SnrTrack {
        entries,
        noise_power,
        calibration_gain: gain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::half_band_lattice;
    use crate::window::{synth_window, WindowParams};
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    fn tone(n: usize, bin: f64, amp: f64) -> Vec<f64> {
        (0..n)
            .map(|t| amp * (TAU * bin * t as f64 / n as f64).cos())
            .collect()
    }

    fn add_noise(samples: &mut [f64], std: f64, seed: u64) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, std).unwrap();
        for s in samples.iter_mut() {
            *s += normal.sample(&mut rng);
        }
    }

    #[test]
    fn tracks_an_on_bin_tone_exactly() {
        let n = 64;
        let f = Signal::from_real(&tone(n, 12.0, 1.0), 64.0).unwrap();
        let g = synth_window(WindowParams::new(1.0, 0.0), n).unwrap();
        let lat = half_band_lattice(8, 1, n).unwrap();
        let track = track_peak(&dgt(&f, &g, &lat).unwrap(), 64.0).unwrap();
        assert_eq!(track.entries.len(), 8);
        for (j, e) in track.entries.iter().enumerate() {
            assert_eq!(e.frequency, Some(12.0));
            assert!((e.time - (8 * j) as f64 / 64.0).abs() < 1e-12);
            assert!(e.magnitude > 0.0);
        }
    }

    #[test]
    fn peak_ties_resolve_to_the_lowest_bin() {
        // Two frames with exactly tied magnitudes: the lower bin must win.
        let one = Complex64::new(1.0, 0.0);
        let coeffs = TfCoefficients::from_parts(
            8,
            8.0,
            vec![0, 4],
            vec![vec![2, 5, 7], vec![1, 3, 6]],
            vec![vec![one, one, one], vec![one, -one, one]],
        );
        let track = track_peak(&coeffs, 8.0).unwrap();
        assert_eq!(track.entries[0].frequency, Some(2.0));
        assert_eq!(track.entries[1].frequency, Some(1.0));
    }

    #[test]
    fn zero_frames_become_gaps() {
        let n = 64;
        let f = Signal::new(vec![Complex64::new(0.0, 0.0); n], 1.0).unwrap();
        let g = synth_window(WindowParams::new(1.0, 0.0), n).unwrap();
        let lat = half_band_lattice(8, 1, n).unwrap();
        let track = track_peak(&dgt(&f, &g, &lat).unwrap(), 1.0).unwrap();
        assert!(track.entries.iter().all(|e| e.frequency.is_none()));
        assert!(track.entries.iter().all(|e| e.magnitude == 0.0));
    }

    #[test]
    fn chirp_slope_recovered_by_regression() {
        let n = 256;
        let sr = 256.0;
        let slope = 0.15; // bins per sample
        let samples: Vec<f64> = (0..n)
            .map(|t| {
                let tf = t as f64;
                (TAU * (40.0 * tf / n as f64 + slope * tf * tf / (2.0 * n as f64))).cos()
            })
            .collect();
        let f = Signal::from_real(&samples, sr).unwrap();
        let g = synth_window(WindowParams::new(1.0, slope), n).unwrap();
        let lat = half_band_lattice(8, 1, n).unwrap();
        let track = track_peak(&dgt(&f, &g, &lat).unwrap(), sr).unwrap();

        // Least-squares slope over interior frames (wrap-around corrupts
        // the outermost frames of a non-periodic chirp).
        let pts: Vec<(f64, f64)> = track.entries[2..track.entries.len() - 2]
            .iter()
            .map(|e| (e.time, e.frequency.unwrap()))
            .collect();
        let m = pts.len() as f64;
        let (sx, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let fitted = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        let expected = slope * sr; // Hz per second
        assert!(
            (fitted - expected).abs() < 0.1 * expected,
            "fitted {fitted}, expected {expected}"
        );
    }

    #[test]
    fn resolvability_separates_two_tones_and_degrades_with_spacing() {
        let n = 256;
        let sr = 256.0;
        let g = synth_window(WindowParams::new(1.0, 0.0), n).unwrap();
        let lat = half_band_lattice(8, 1, n).unwrap();
        let fraction = |spacing: f64| {
            let samples: Vec<f64> = (0..n)
                .map(|t| {
                    let tf = t as f64 / n as f64;
                    (TAU * (70.0 - spacing / 2.0) * tf).cos() + (TAU * (70.0 + spacing / 2.0) * tf).cos()
                })
                .collect();
            let f = Signal::from_real(&samples, sr).unwrap();
            resolvability(&dgt(&f, &g, &lat).unwrap(), (40.0, 100.0))
                .unwrap()
                .resolved_fraction
        };
        let wide = fraction(20.0);
        let mid = fraction(8.0);
        let tight = fraction(2.0);
        assert_eq!(wide, 1.0);
        assert!(wide >= mid && mid >= tight, "{wide} {mid} {tight}");
        assert!(tight < 1.0);

        // One tone resolves nothing.
        let f = Signal::from_real(&tone(n, 70.0, 1.0), sr).unwrap();
        let rep = resolvability(&dgt(&f, &g, &lat).unwrap(), (40.0, 100.0)).unwrap();
        assert_eq!(rep.resolved_fraction, 0.0);

        // Band validation.
        let coeffs = dgt(&f, &g, &lat).unwrap();
        assert!(matches!(
            resolvability(&coeffs, (100.0, 40.0)),
            Err(GaborError::EmptyBand { .. })
        ));
        assert!(matches!(
            resolvability(&coeffs, (0.0, 1000.0)),
            Err(GaborError::EmptyBand { .. })
        ));
    }

    #[test]
    fn calibration_closure_recovers_unit_amplitude() {
        let n = 256;
        let sr = 256.0;
        let params = WindowParams::new(1.0, 0.1);
        let g = synth_window(params, n).unwrap();
        let lat = half_band_lattice(8, 1, n).unwrap();
        let gain = calibrate_gain(&g, &lat, sr).unwrap();

        // A phase-shifted copy of the reference (cosine instead of sine)
        // must come back with amplitude 1 on interior frames.
        let samples: Vec<f64> = (0..n)
            .map(|t| {
                let tf = t as f64;
                let u = tf - n as f64 / 2.0;
                (TAU / n as f64 * (64.0 * tf + 0.1 * u * u / 2.0)).cos()
            })
            .collect();
        let f = Signal::from_real(&samples, sr).unwrap();
        let coeffs = dgt(&f, &g, &lat).unwrap();
        let peaks: Vec<f64> = (2..coeffs.n_frames() - 2)
            .map(|j| {
                coeffs
                    .frame_values(j)
                    .iter()
                    .map(|v| v.norm())
                    .fold(0.0, f64::max)
            })
            .collect();
        let mean_amp = gain * peaks.iter().sum::<f64>() / peaks.len() as f64;
        assert!(
            (mean_amp - 1.0).abs() < 0.01,
            "recovered amplitude {mean_amp}"
        );
    }

    #[test]
    fn snr_estimate_matches_known_noise_level() {
        let n = 512;
        let sr = 512.0;
        // A tone wants a wide window: sigma = 16 keeps the spectral skirt
        // within a few bins, so a 12-bin guard isolates it from the noise
        // bins.
        let g = synth_window(WindowParams::new(16.0, 0.0), n).unwrap();
        let lat = half_band_lattice(16, 1, n).unwrap();
        let gain = calibrate_gain(&g, &lat, sr).unwrap();

        let std = 0.1;
        let mut samples = tone(n, 128.0, 1.0);
        add_noise(&mut samples, std, 7);
        let f = Signal::from_real(&samples, sr).unwrap();
        let snr = estimate_snr(&dgt(&f, &g, &lat).unwrap(), gain, 12).unwrap();

        let true_snr = 10.0 * (0.5 / (std * std)).log10();
        let mean = snr.entries.iter().map(|e| e.snr_db).sum::<f64>() / snr.entries.len() as f64;
        assert!(
            (mean - true_snr).abs() < 1.5,
            "estimated {mean} dB, true {true_snr} dB"
        );
        assert!((snr.calibration_gain - gain).abs() == 0.0);
    }

    #[test]
    fn noise_power_tracks_the_true_variance_across_seeds() {
        let n = 256;
        let sr = 256.0;
        let g = synth_window(WindowParams::new(8.0, 0.0), n).unwrap();
        let lat = half_band_lattice(16, 1, n).unwrap();
        let std = 0.1;
        let truth = std * std; // unit-energy window: per-bin power = variance

        let mut sum = 0.0;
        let seeds = 20;
        for seed in 0..seeds {
            let mut samples = tone(n, 64.0, 1.0);
            add_noise(&mut samples, std, seed);
            let f = Signal::from_real(&samples, sr).unwrap();
            sum += estimate_snr(&dgt(&f, &g, &lat).unwrap(), 1.0, 12)
                .unwrap()
                .noise_power;
        }
        let mean = sum / seeds as f64;
        assert!(
            (mean - truth).abs() < 0.2 * truth,
            "mean noise power {mean}, true {truth}"
        );
    }

    #[test]
    fn noiseless_tone_saturates_to_infinite_snr() {
        let n = 256;
        let sr = 256.0;
        let g = synth_window(WindowParams::new(1.0, 0.0), n).unwrap();
        let lat = half_band_lattice(8, 1, n).unwrap();
        let f = Signal::from_real(&tone(n, 64.0, 1.0), sr).unwrap();
        // A guard of 48 bins pushes the noise bins into the far Gaussian
        // tail, below the numerical floor.
        let snr = estimate_snr(&dgt(&f, &g, &lat).unwrap(), 1.0, 48).unwrap();
        assert!(snr.entries.iter().all(|e| e.snr_db == f64::INFINITY));
    }

    #[test]
    fn rejects_bad_snr_inputs() {
        let n = 64;
        let g = synth_window(WindowParams::new(1.0, 0.0), n).unwrap();
        let lat = half_band_lattice(16, 1, n).unwrap();
        let f = Signal::from_real(&tone(n, 16.0, 1.0), 64.0).unwrap();
        let coeffs = dgt(&f, &g, &lat).unwrap();
        // A guard wider than the whole band leaves no clean bins anywhere.
        assert!(matches!(
            estimate_snr(&coeffs, 1.0, 40),
            Err(GaborError::AllBinsExcluded { .. })
        ));
        assert!(estimate_snr(&coeffs, 0.0, 3).is_err());
        assert!(estimate_snr(&coeffs, 1.0, 0).is_err());
    }

    #[test]
    fn ragged_layouts_are_rejected() {
        let coeffs = TfCoefficients::from_parts(
            8,
            8.0,
            vec![0, 4],
            vec![vec![0, 1], vec![0]],
            vec![
                vec![Complex64::new(1.0, 0.0); 2],
                vec![Complex64::new(1.0, 0.0)],
            ],
        );
        assert!(matches!(
            track_peak(&coeffs, 8.0),
            Err(GaborError::NotSeparable)
        ));
        assert!(matches!(
            estimate_snr(&coeffs, 1.0, 1),
            Err(GaborError::NotSeparable)
        ));
    }
}
