//! Separate two chirps three bins apart: chirped versus plain window.
//!
//! Both components sweep at the same rate. A chirp-matched window tilts
//! its resolution cell along the sweep and keeps the pair separated in
//! every frame; the best plain Gaussian must trade time against frequency
//! resolution and loses the gap in half the frames.

use gaborfit::{
    dgt, half_band_lattice, optimize_chirped, optimize_real, resolvability, synth_window,
    synthesize, ObjectiveConfig, SynthSpec,
};

fn main() -> anyhow::Result<()> {
    let n = 1024;
    let sr = n as f64; // one bin per hertz
    let (signal, _) = synthesize(&SynthSpec::TwoChirpPair {
        n,
        sample_rate: sr,
        f_lo: 100.0,
        spacing: 3.0,
        sweep_rate: 204.8, // 0.2 bins per sample over the one-second signal
        amplitude: 1.0,
        noise_std: 0.0,
        seed: 0,
    })?;

    let lattice = half_band_lattice(64, 1, n)?;
    let config = ObjectiveConfig::new(lattice.clone());
    let band = (92.0, 316.0); // covers the swept pair with margin

    for (label, fit) in [
        ("chirp-matched", optimize_chirped(&signal, &config)?),
        ("plain Gaussian", optimize_real(&signal, &config)?),
    ] {
        let window = synth_window(fit.params, n)?;
        let coeffs = dgt(&signal, &window, &lattice)?;
        let report = resolvability(&coeffs, band)?;
        println!(
            "{label:>14}: sigma = {:.4}, s = {:+.3} -> both components visible in {:.0}% of frames",
            fit.params.sigma,
            fit.params.s,
            100.0 * report.resolved_fraction
        );
    }
    Ok(())
}
