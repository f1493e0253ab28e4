//! Fit one window per regime of a piecewise signal.
//!
//! The first half sweeps down, the second half sweeps up; no single chirp
//! rate suits both. Segmented fitting optimizes each part separately and
//! interpolates the parameters between segment middles so the framewise
//! transform changes window smoothly instead of jumping at the boundary.

use gaborfit::{
    half_band_lattice, nsdgt, optimize_segmented, synthesize, track_peak, ObjectiveConfig,
    Signal, SynthSpec,
};

fn main() -> anyhow::Result<()> {
    let n = 256;
    let sr = n as f64;
    let half = n / 2;
    let (down, _) = synthesize(&SynthSpec::LinearChirp {
        n: half,
        sample_rate: sr,
        f_start: 90.0,
        f_end: 90.0 - 0.2 * half as f64,
        amplitude: 1.0,
        noise_std: 0.0,
        seed: 0,
    })?;
    let (up, _) = synthesize(&SynthSpec::LinearChirp {
        n: half,
        sample_rate: sr,
        f_start: 35.0,
        f_end: 35.0 + 0.2 * half as f64,
        amplitude: 1.0,
        noise_std: 0.0,
        seed: 0,
    })?;
    let mut samples = down.samples().to_vec();
    samples.extend_from_slice(up.samples());
    let signal = Signal::new(samples, sr)?;

    let lattice = half_band_lattice(8, 1, n)?;
    let mut config = ObjectiveConfig::new(lattice.clone());
    config.grid = (8, 11);
    config.sigma_range = (4.0 / n as f64, 1.5);

    let plan = optimize_segmented(&signal, &[half], &config)?;
    for (i, fit) in plan.per_segment().iter().enumerate() {
        println!(
            "segment {i}: sigma = {:.4}, s = {:+.3}, objective {:.3}",
            fit.params.sigma, fit.params.s, fit.objective
        );
    }

    println!("\nframewise window parameters (interpolated between segment middles):");
    let track = plan.per_frame();
    for (shift, params) in lattice.time_shifts().iter().zip(track.params()) {
        if shift % 32 == 0 {
            println!("  shift {shift:>4}: sigma = {:.4}, s = {:+.3}", params.sigma, params.s);
        }
    }

    let coeffs = nsdgt(&signal, track, &lattice)?;
    let peaks = track_peak(&coeffs, sr)?;
    let quarter = &peaks.entries[peaks.entries.len() / 4];
    let three_quarter = &peaks.entries[3 * peaks.entries.len() / 4];
    println!(
        "\ntracked frequency: {:.0} Hz mid-descent, {:.0} Hz mid-ascent",
        quarter.frequency.unwrap_or(f64::NAN),
        three_quarter.frequency.unwrap_or(f64::NAN)
    );
    Ok(())
}
