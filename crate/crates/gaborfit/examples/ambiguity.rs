//! Sample a window's ambiguity function on its matched lattice.
//!
//! The ambiguity function transforms the window against itself, so its
//! magnitude shows how energy spreads over neighbouring lattice points.
//! A well-matched lattice concentrates everything at the origin.

use gaborfit::{ambiguity, emit_spectrogram, optimal_lattice, quantize, synth_window, WindowParams};

fn main() -> anyhow::Result<()> {
    let n = 256;
    let params = WindowParams { sigma: 0.5, s: 0.25 };
    let window = synth_window(params, n)?;
    let lattice = quantize(&optimal_lattice(params, n, 4.0)?)?;

    let coeffs = ambiguity(&window, &lattice)?;
    let origin = coeffs
        .iter_points()
        .find(|(x, xi, _)| *x == 0 && *xi == 0)
        .map(|(_, _, v)| v.norm())
        .unwrap_or(0.0);

    // Energy captured at the origin versus leaked elsewhere.
    let total: f64 = coeffs.iter_points().map(|(_, _, v)| v.norm_sqr()).sum();
    println!("origin magnitude {origin:.6} (unit-energy window gives 1)");
    println!(
        "origin share of sampled energy: {:.1}%",
        100.0 * origin * origin / total
    );

    let out = std::env::temp_dir().join("gaborfit_ambiguity");
    std::fs::create_dir_all(&out)?;
    let pgm = out.join("ambiguity.pgm");
    emit_spectrogram(&coeffs, &pgm, 80.0)?;
    println!("wrote {}", pgm.display());
    Ok(())
}
