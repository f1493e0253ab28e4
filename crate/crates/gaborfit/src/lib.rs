//! Adaptive Gabor analysis: chirped Gaussian windows fitted to a signal,
//! matched sheared-hexagonal time-frequency lattices, and the measurement
//! tools built on top of them (frequency tracking, close-tone
//! resolvability, calibrated per-frame SNR).
//!
//! The pipeline, end to end:
//!
//! 1. pick or [synthesize](synth) a signal;
//! 2. [optimize](optimize) the window's width and chirp slope by maximizing
//!    the `l_p` concentration (`p > 2`) of its transform;
//! 3. build a [lattice](lattice) matched to the fitted window (a sheared,
//!    dilated hexagonal packing) and quantize it to integer grid points;
//! 4. take the [transform](dgt) — or its frame-varying variant when the
//!    signal has been segmented — and feed the coefficients to the
//!    [analysis](analysis) layer or emit them as images/CSV.
//!
//! Every runnable capability has a corresponding example under `examples/`.

pub mod analysis;
pub mod dgt;
pub mod emit;
pub mod error;
pub mod lattice;
pub mod optimize;
pub mod run;
pub mod segment;
pub mod signal;
pub mod synth;
pub mod wav;
pub mod window;

pub use analysis::{
    calibrate_gain, estimate_snr, resolvability, track_peak, FrequencyTrack, ResolvabilityReport,
    SnrEntry, SnrTrack, TrackEntry,
};
pub use dgt::{ambiguity, dgt, nsdgt, TfCoefficients};
pub use emit::{emit_snr_csv, emit_spectrogram, emit_track_csv};
pub use error::{GaborError, Result};
pub use lattice::{
    frame_condition, half_band_lattice, optimal_lattice, quantize, rectangular_lattice,
    LatticeSpec, LatticeSource, LatticeStructure, QuantizedLattice,
};
pub use optimize::{objective, optimize_chirped, optimize_real, ObjectiveConfig, OptResult};
pub use run::{run, InputSource, LatticeChoice, RunConfig, RunReport, Task, WindowMode};
pub use segment::{optimize_segmented, SegmentationPlan};
pub use signal::{LengthPolicy, Signal};
pub use synth::{synthesize, GroundTruth, SynthSpec};
pub use wav::{load_wav, write_wav, SampleFormat, WavInfo};
pub use window::{synth_window, FramewiseWindowTrack, GaborWindow, WindowParams};
