//! Render a spectrogram of a linear chirp with a signal-fitted window.
//!
//! The window's chirp rate is fitted to the sweep, so the ridge stays
//! narrow across the whole signal instead of blurring at the ends.

use gaborfit::{
    dgt, emit_spectrogram, half_band_lattice, optimal_lattice, optimize_chirped, quantize,
    synth_window, synthesize, ObjectiveConfig, SynthSpec,
};

fn main() -> anyhow::Result<()> {
    let spec = SynthSpec::LinearChirp {
        n: 512,
        sample_rate: 512.0,
        f_start: 60.0,
        f_end: 140.0,
        amplitude: 1.0,
        noise_std: 0.01,
        seed: 1,
    };
    let (signal, _) = synthesize(&spec)?;
    let n = signal.len();

    // Fit the window on a provisional rectangular sampling, then build the
    // matched lattice from the fitted parameters.
    let provisional = half_band_lattice(8, 1, n)?;
    let fit = optimize_chirped(&signal, &ObjectiveConfig::new(provisional))?;
    println!(
        "fitted window: sigma = {:.3}, s = {:+.4} ({} objective evaluations)",
        fit.params.sigma,
        fit.params.s,
        fit.trace.len()
    );

    let lattice = quantize(&optimal_lattice(fit.params, n, 4.0)?)?;
    println!(
        "lattice: {} points, redundancy {:.2}",
        lattice.points().len(),
        lattice.realized_redundancy()
    );

    let window = synth_window(fit.params, n)?;
    let coeffs = dgt(&signal, &window, &lattice)?;
    if let Some((shift, bin, magnitude)) = coeffs.peak() {
        println!(
            "coefficient energy {:.1}, peak |V| = {:.3} at shift {shift}, bin {bin}",
            coeffs.energy(),
            magnitude
        );
    }

    let out = std::env::temp_dir().join("gaborfit_spectrogram");
    std::fs::create_dir_all(&out)?;
    let pgm = out.join("spectrogram.pgm");
    emit_spectrogram(&coeffs, &pgm, 60.0)?;
    println!("wrote {}", pgm.display());
    Ok(())
}
