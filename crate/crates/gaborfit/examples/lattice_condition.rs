//! Compare frame condition numbers across lattice geometries.
//!
//! At equal redundancy, the hexagonal lattice matched to the window's
//! shape keeps the frame operator closest to a multiple of the identity;
//! a square grid is slightly worse and a badly elongated one far worse,
//! even though all three use the same number of coefficients.

use gaborfit::{
    frame_condition, optimal_lattice, quantize, rectangular_lattice, synth_window, WindowParams,
};

fn main() -> anyhow::Result<()> {
    let n = 144;
    let params = WindowParams { sigma: 1.0, s: 0.0 };
    let window = synth_window(params, n)?;

    let hex = quantize(&optimal_lattice(params, n, 4.0)?)?;
    let rect = quantize(&rectangular_lattice(6, 6, n)?)?;
    // Same density, but cells stretched 4:1 against the window's shape.
    let skew = quantize(&rectangular_lattice(3, 12, n)?)?;

    for (name, lattice) in [("hexagonal", &hex), ("square", &rect), ("elongated", &skew)] {
        let cond = frame_condition(&window, lattice)?;
        println!(
            "{name:>12}: {} points, redundancy {:.2}, frame condition {:.6}",
            lattice.points().len(),
            lattice.realized_redundancy(),
            cond
        );
    }

    // Too few points for the signal dimension: the frame operator loses
    // rank and the condition number diverges.
    let sparse = quantize(&rectangular_lattice(24, 12, n)?)?;
    let cond = frame_condition(&window, &sparse)?;
    println!(
        "{:>12}: {} points, redundancy {:.2}, frame condition {}",
        "undersampled",
        sparse.points().len(),
        sparse.realized_redundancy(),
        cond
    );
    Ok(())
}
