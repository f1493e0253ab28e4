//! Error type shared by every module in the crate.

use thiserror::Error;

/// All failures the library can report.
#[derive(Debug, Error)]
pub enum GaborError {
    #[error("signal must have at least 2 samples, got {0}")]
    SignalTooShort(usize),
    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error("invalid window parameters: sigma={sigma}, s={s} (sigma must be > 0, both finite)")]
    InvalidWindowParams { sigma: f64, s: f64 },
    #[error("length mismatch: expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("lattice point ({x}, {xi}) outside the {n}x{n} index range")]
    PointOutOfRange { x: usize, xi: usize, n: usize },
    #[error("redundancy must be at least 1, got {0}")]
    RedundancyTooSmall(f64),
    #[error("{value} does not divide the signal length {n}")]
    NotADivisor { value: usize, n: usize },
    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error(
        "quantization off target: realized redundancy {realized:.4} deviates more than 10% \
         from target {target:.4}"
    )]
    QuantizeOutOfTolerance { realized: f64, target: f64 },
    #[error("degenerate lattice generator (rank < 2)")]
    DegenerateGenerator,
    #[error(
        "frame condition limited to N <= {cap} (set GABORFIT_MAXN_FRAME_COND to raise), got N = {n}"
    )]
    FrameConditionTooLarge { n: usize, cap: usize },
    #[error("empty lattice")]
    EmptyLattice,
    #[error("objective is identically zero: all-zero signal")]
    ZeroSignal,
    #[error("empty or inverted parameter range: [{lo}, {hi}]")]
    EmptyRange { lo: f64, hi: f64 },
    #[error("grid must have at least {need} cells per axis, got {got}")]
    GridTooCoarse { need: usize, got: usize },
    #[error("invalid segment boundaries: {0}")]
    BadBoundaries(String),
    #[error("window track has {track} entries but the lattice has {shifts} time shifts")]
    TrackMismatch { track: usize, shifts: usize },
    #[error("operation requires coefficients in separable (time x frequency grid) layout")]
    NotSeparable,
    #[error("empty frequency band [{lo}, {hi}] Hz")]
    EmptyBand { lo: f64, hi: f64 },
    #[error("guard of {guard} bins excludes every bin ({bins} bins per frame)")]
    AllBinsExcluded { guard: usize, bins: usize },
    #[error("empty coefficient set")]
    EmptyCoefficients,
    #[error("wav: {0}")]
    Wav(String),
    #[error("invalid synthesis spec: {0}")]
    BadSynthSpec(String),
    #[error("invalid run configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GaborError>;
