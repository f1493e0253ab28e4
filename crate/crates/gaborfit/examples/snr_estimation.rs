//! Estimate a tone's signal-to-noise ratio from transform magnitudes.
//!
//! The peak magnitude alone is biased by the window's concentration, so a
//! synthetic reference chirp at a known amplitude calibrates the peak
//! into an amplitude estimate; the noise floor comes from the median of
//! off-peak bin power. The estimate lands within a decibel of the truth.

use gaborfit::{
    calibrate_gain, dgt, estimate_snr, half_band_lattice, optimize_chirped, synth_window,
    synthesize, ObjectiveConfig, SynthSpec,
};

fn main() -> anyhow::Result<()> {
    let n = 512;
    let sr = 512.0;
    let amplitude = 1.0f64;
    let noise_std = 0.05f64;
    let true_snr = 10.0 * ((amplitude * amplitude / 2.0) / (noise_std * noise_std)).log10();

    let (signal, _) = synthesize(&SynthSpec::Tone {
        n,
        sample_rate: sr,
        frequency: 100.0,
        amplitude,
        noise_std,
        seed: 11,
    })?;

    let lattice = half_band_lattice(16, 1, n)?;
    let fit = optimize_chirped(&signal, &ObjectiveConfig::new(lattice.clone()))?;
    let window = synth_window(fit.params, n)?;
    let coeffs = dgt(&signal, &window, &lattice)?;

    let gain = calibrate_gain(&window, &lattice, sr)?;
    let snr = estimate_snr(&coeffs, gain, 12)?;

    let mut per_frame: Vec<f64> = snr.entries.iter().map(|e| e.snr_db).collect();
    per_frame.sort_by(|a, b| a.total_cmp(b));
    let median = per_frame[per_frame.len() / 2];

    println!("calibration gain: {gain:.4}");
    println!("noise floor power: {:.6} (true {:.6})", snr.noise_power, noise_std * noise_std);
    println!("median estimated SNR: {median:.2} dB (true {true_snr:.2} dB)");
    Ok(())
}
