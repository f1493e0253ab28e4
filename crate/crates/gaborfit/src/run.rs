//! End-to-end pipeline: load or synthesize a signal, fit a window, build a
//! lattice, transform, and produce task-specific artifacts plus a JSON
//! report that embeds the exact configuration used.
//!
//! Window fitting always runs on a provisional dense half-band lattice
//! (the final lattice usually depends on the fitted parameters, so it
//! cannot be used for the fit itself); the configured lattice is built
//! afterwards and used for the transform and all downstream analysis.
//! Given identical configurations — including seeds — every artifact is
//! byte-identical across runs.

use std::path::{Path, PathBuf};

use crate::analysis::{
    calibrate_gain, estimate_snr, resolvability, track_peak, ResolvabilityReport,
};
use crate::dgt::{ambiguity, dgt, nsdgt, TfCoefficients};
use crate::emit::{emit_snr_csv, emit_spectrogram, emit_track_csv};
use crate::error::{GaborError, Result};
use crate::lattice::{
    frame_condition, half_band_lattice, optimal_lattice, quantize, rectangular_lattice,
    LatticeStructure, QuantizedLattice,
};
use crate::optimize::{optimize_chirped, optimize_real, ObjectiveConfig, OptResult, DEFAULT_P};
use crate::segment::optimize_segmented;
use crate::signal::LengthPolicy;
use crate::synth::{synthesize, GroundTruth, SynthSpec};
use crate::wav::{load_wav, write_wav, SampleFormat};
use crate::window::{synth_window, WindowParams};

/// Where the signal comes from.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputSource {
    Wav { path: PathBuf },
    Synth { spec: SynthSpec },
}

/// Which lattice the transform runs on.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatticeChoice {
    /// Sheared hexagonal lattice matched to the fitted window.
    Optimal,
    /// Rectangular grid with the given steps.
    Rectangular { a: usize, b: usize },
    /// Dense nonnegative-frequency grid (analysis-oriented).
    HalfBand { a: usize, b: usize },
}

/// How the window is fitted.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WindowMode {
    /// Gaussian with the chirp slope pinned to zero.
    Real,
    /// Chirped Gaussian, width and slope both free.
    Chirped,
    /// Independent chirped fits per part, interpolated across frames.
    Segmented { boundaries: Vec<usize> },
}

/// What to produce.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Task {
    /// Write the synthesized signal and its ground truth; no analysis.
    Synth,
    /// Spectrogram image + magnitude CSV.
    Spectrogram,
    /// Window ambiguity table image + CSV.
    Ambiguity,
    /// Fit the window and stop (report only).
    Optimize,
    /// Build the lattice and report its generator and frame condition.
    Lattice,
    /// Peak-frequency track CSV.
    Track,
    /// Count resolvable components in a band (Hz).
    Resolve { band: (f64, f64) },
    /// Calibrated per-frame SNR CSV.
    Snr { guard_bins: usize },
}

/// Full pipeline configuration. Embedded verbatim in every report.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunConfig {
    pub input: InputSource,
    pub task: Task,
    pub out_dir: PathBuf,
    /// Transform length; input is zero-padded or truncated to fit. `None`
    /// keeps the input length.
    pub n: Option<usize>,
    /// Concentration exponent for the window fit.
    pub p: f64,
    /// Target redundancy of the optimal lattice.
    pub redundancy: f64,
    pub lattice: LatticeChoice,
    pub window: WindowMode,
    /// Overrides the synthesis noise seed when set.
    pub seed: Option<u64>,
    /// Spectrogram dynamic range in dB.
    pub dynamic_range_db: f64,
}

impl RunConfig {
    /// Defaults: keep the input length, `p = 2.5`, redundancy 4, optimal
    /// lattice, chirped window, 60 dB of dynamic range.
    pub fn new(input: InputSource, task: Task, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            input,
            task,
            out_dir: out_dir.into(),
            n: None,
            p: DEFAULT_P,
            redundancy: 4.0,
            lattice: LatticeChoice::Optimal,
            window: WindowMode::Chirped,
            seed: None,
            dynamic_range_db: 60.0,
        }
    }
}

/// One window fit in the report.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FitSummary {
    pub params: WindowParams,
    pub objective: f64,
    pub evaluations: usize,
}

impl From<&OptResult> for FitSummary {
    fn from(r: &OptResult) -> Self {
        Self {
            params: r.params,
            objective: r.objective,
            evaluations: r.trace.len(),
        }
    }
}

/// Lattice actually used, as reported.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LatticeSummary {
    pub generator: [[f64; 2]; 2],
    pub target_redundancy: f64,
    pub realized_redundancy: f64,
    pub points: usize,
    pub structure: LatticeStructure,
    /// `None` when the transform length exceeds the frame-condition cap.
    pub frame_condition: Option<f64>,
}

/// SNR task summary (full track goes to CSV).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SnrSummary {
    pub calibration_gain: f64,
    pub noise_power: f64,
    /// Median over frames with a finite estimate.
    pub median_snr_db: Option<f64>,
}

/// Everything a run produced. Serialized to `report.json` in the output
/// directory.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub n: usize,
    pub sample_rate: f64,
    pub length_policy: LengthPolicy,
    /// True when a multichannel WAV was averaged to mono.
    pub downmixed: bool,
    /// One fit per part (one entry unless segmented); empty for synth-only
    /// runs.
    pub fits: Vec<FitSummary>,
    pub lattice: Option<LatticeSummary>,
    pub resolvability: Option<ResolvabilityReport>,
    pub snr: Option<SnrSummary>,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
}

/// Largest time step that still gives at least 48 analysis frames (and
/// divides `n` so frames tile the signal evenly).
fn provisional_time_step(n: usize) -> usize {
    (1..=n / 48).rev().find(|d| n % d == 0).unwrap_or(1)
}

fn aggregate_params(fits: &[OptResult]) -> WindowParams {
    let ln_sigma = fits.iter().map(|r| r.params.sigma.ln()).sum::<f64>() / fits.len() as f64;
    let s = fits.iter().map(|r| r.params.s).sum::<f64>() / fits.len() as f64;
    WindowParams::new(ln_sigma.exp(), s)
}

fn median_finite(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut v: Vec<f64> = values.filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    })
}

fn write_ground_truth_csv(truth: &GroundTruth, sample_rate: f64, path: &Path) -> Result<()> {
    use std::io::Write;
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "sample,time,instantaneous_frequency,snr_db")?;
    let n = truth
        .instantaneous_frequency
        .as_ref()
        .map(|v| v.len())
        .or_else(|| truth.snr_db.as_ref().map(|v| v.len()))
        .unwrap_or(0);
    for t in 0..n {
        let freq = truth
            .instantaneous_frequency
            .as_ref()
            .map(|v| v[t])
            .filter(|f| !f.is_nan())
            .map(|f| f.to_string())
            .unwrap_or_default();
        let snr = truth
            .snr_db
            .as_ref()
            .map(|v| v[t].to_string())
            .unwrap_or_default();
        writeln!(w, "{t},{},{freq},{snr}", t as f64 / sample_rate)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the configured pipeline, writing artifacts into
/// `config.out_dir` and returning the report (also written there as
/// `report.json`).
pub fn run(config: &RunConfig) -> Result<RunReport> {
    std::fs::create_dir_all(&config.out_dir)?;
    let out = |name: &str| config.out_dir.join(name);

    // --- Input ---------------------------------------------------------
    let mut truth: Option<GroundTruth> = None;
    let mut downmixed = false;
    let signal = match &config.input {
        InputSource::Wav { path } => {
            let (sig, info) = load_wav(path).map_err(|e| match e {
                GaborError::Io(io) => {
                    GaborError::Wav(format!("{}: {io}", path.display()))
                }
                other => other,
            })?;
            downmixed = info.downmixed;
            sig
        }
        InputSource::Synth { spec } => {
            let mut spec = spec.clone();
            if let Some(seed) = config.seed {
                spec.set_seed(seed);
            }
            let (sig, t) = synthesize(&spec)?;
            truth = Some(t);
            sig
        }
    };
    let (signal, length_policy) = match config.n {
        Some(n) => signal.fit_length(n)?,
        None => (signal, LengthPolicy::Unchanged),
    };
    let n = signal.len();
    let sample_rate = signal.sample_rate();
    let mut outputs: Vec<String> = Vec::new();

    let mut report = RunReport {
        config: config.clone(),
        n,
        sample_rate,
        length_policy,
        downmixed,
        fits: Vec::new(),
        lattice: None,
        resolvability: None,
        snr: None,
        outputs: Vec::new(),
    };

    if let Task::Synth = config.task {
        write_wav(&out("signal.wav"), &signal, SampleFormat::Float32)?;
        outputs.push("signal.wav".into());
        if let Some(t) = &truth {
            write_ground_truth_csv(t, sample_rate, &out("ground_truth.csv"))?;
            outputs.push("ground_truth.csv".into());
        }
        return finish(report, outputs, &config.out_dir);
    }

    // --- Window fit on the provisional lattice --------------------------
    let prov = half_band_lattice(provisional_time_step(n), 1, n)?;
    let mut cfg = ObjectiveConfig::new(prov);
    cfg.p = config.p;
    let (fits, plan) = match &config.window {
        WindowMode::Real => (vec![optimize_real(&signal, &cfg)?], None),
        WindowMode::Chirped => (vec![optimize_chirped(&signal, &cfg)?], None),
        WindowMode::Segmented { boundaries } => {
            let plan = optimize_segmented(&signal, boundaries, &cfg)?;
            (plan.per_segment().to_vec(), Some(plan))
        }
    };
    report.fits = fits.iter().map(FitSummary::from).collect();
    let params = aggregate_params(&fits);
    let window = synth_window(params, n)?;

    if let Task::Optimize = config.task {
        return finish(report, outputs, &config.out_dir);
    }

    // --- Final lattice ---------------------------------------------------
    let (lattice, generator, target_redundancy): (QuantizedLattice, [[f64; 2]; 2], f64) =
        match config.lattice {
            LatticeChoice::Optimal => {
                let spec = optimal_lattice(params, n, config.redundancy)?;
                (quantize(&spec)?, spec.generator, spec.redundancy)
            }
            LatticeChoice::Rectangular { a, b } => {
                let spec = rectangular_lattice(a, b, n)?;
                (quantize(&spec)?, spec.generator, spec.redundancy)
            }
            LatticeChoice::HalfBand { a, b } => {
                let lat = half_band_lattice(a, b, n)?;
                let redundancy = lat.realized_redundancy();
                (lat, [[a as f64, 0.0], [0.0, b as f64]], redundancy)
            }
        };
    let condition = match frame_condition(&window, &lattice) {
        Ok(c) => Some(c),
        Err(GaborError::FrameConditionTooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    report.lattice = Some(LatticeSummary {
        generator,
        target_redundancy,
        realized_redundancy: lattice.realized_redundancy(),
        points: lattice.points().len(),
        structure: lattice.structure().clone(),
        frame_condition: condition,
    });

    if let Task::Lattice = config.task {
        return finish(report, outputs, &config.out_dir);
    }

    // --- Transform -------------------------------------------------------
    let coeffs: TfCoefficients = match &plan {
        Some(plan) => nsdgt(&signal, &plan.track_for(lattice.time_shifts())?, &lattice)?,
        None => dgt(&signal, &window, &lattice)?,
    };

    // --- Task outputs ----------------------------------------------------
    match &config.task {
        Task::Spectrogram => {
            emit_spectrogram(&coeffs, &out("spectrogram.pgm"), config.dynamic_range_db)?;
            outputs.push("spectrogram.pgm".into());
            outputs.push("spectrogram.csv".into());
        }
        Task::Ambiguity => {
            let amb = ambiguity(&window, &lattice)?;
            emit_spectrogram(&amb, &out("ambiguity.pgm"), config.dynamic_range_db)?;
            outputs.push("ambiguity.pgm".into());
            outputs.push("ambiguity.csv".into());
        }
        Task::Track => {
            let track = track_peak(&coeffs, sample_rate)?;
            emit_track_csv(&track, &out("track.csv"))?;
            outputs.push("track.csv".into());
        }
        Task::Resolve { band } => {
            report.resolvability = Some(resolvability(&coeffs, *band)?);
        }
        Task::Snr { guard_bins } => {
            let gain = calibrate_gain(&window, &lattice, sample_rate)?;
            let snr = estimate_snr(&coeffs, gain, *guard_bins)?;
            emit_snr_csv(&snr, &out("snr.csv"))?;
            outputs.push("snr.csv".into());
            report.snr = Some(SnrSummary {
                calibration_gain: gain,
                noise_power: snr.noise_power,
                median_snr_db: median_finite(snr.entries.iter().map(|e| e.snr_db)),
            });
        }
        Task::Synth | Task::Optimize | Task::Lattice => unreachable!("handled above"),
    }
    finish(report, outputs, &config.out_dir)
}

fn finish(mut report: RunReport, mut outputs: Vec<String>, dir: &Path) -> Result<RunReport> {
    outputs.push("report.json".into());
    report.outputs = outputs;
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| GaborError::BadConfig(format!("report serialization failed: {e}")))?;
    std::fs::write(dir.join("report.json"), json + "\n")?;
    Ok(report)
}
