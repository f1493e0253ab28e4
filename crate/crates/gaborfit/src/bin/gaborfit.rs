//! Command-line front end for the adaptive Gabor analysis pipeline.
//!
//! Every subcommand builds a [`gaborfit::RunConfig`], executes the
//! pipeline, writes artifacts into `--out`, and prints the JSON report to
//! stdout. Errors print a structured `{"error": ...}` line to stderr and
//! exit nonzero.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use gaborfit::{run, InputSource, LatticeChoice, RunConfig, SynthSpec, Task, WindowMode};

#[derive(Parser)]
#[command(
    name = "gaborfit",
    about = "Adaptive Gabor analysis: fitted chirped windows, matched lattices, measurement tools",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Input WAV file (16-bit PCM or float32; multichannel is downmixed).
    #[arg(long, conflicts_with = "synth")]
    input: Option<PathBuf>,

    /// Synthesis spec: inline JSON (starts with '{') or a path to a JSON
    /// file. See the library's SynthSpec for the schema.
    #[arg(long)]
    synth: Option<String>,

    /// Transform length; the signal is zero-padded or truncated to fit.
    #[arg(long)]
    n: Option<usize>,

    /// Concentration exponent for the window fit (must exceed 2).
    #[arg(long, default_value_t = 2.5)]
    p: f64,

    /// Target redundancy of the optimal lattice.
    #[arg(long, default_value_t = 4.0)]
    redundancy: f64,

    /// Lattice: "optimal", "rect:a,b", or "half:a,b".
    #[arg(long, default_value = "optimal")]
    lattice: String,

    /// Window mode: "real", "chirped", or "segmented:b1,b2,...".
    #[arg(long, default_value = "chirped")]
    window: String,

    /// Override the synthesis noise seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Spectrogram dynamic range in dB.
    #[arg(long, default_value_t = 60.0)]
    dynamic_range_db: f64,

    /// Output directory for artifacts and report.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a signal; write signal.wav and ground_truth.csv.
    Synth(CommonArgs),
    /// Transform and render a spectrogram or ambiguity image.
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
        /// "spectrogram" or "ambiguity".
        #[arg(long, default_value = "spectrogram")]
        mode: String,
    },
    /// Fit the window and report its parameters and objective.
    Optimize(CommonArgs),
    /// Build the lattice; report generator, redundancy, frame condition.
    Lattice(CommonArgs),
    /// Track the per-frame peak frequency to track.csv.
    Track(CommonArgs),
    /// Count resolvable components within a band.
    Resolve {
        #[command(flatten)]
        common: CommonArgs,
        /// Frequency band "lo,hi" in Hz.
        #[arg(long)]
        band: String,
    },
    /// Estimate calibrated per-frame SNR to snr.csv.
    Snr {
        #[command(flatten)]
        common: CommonArgs,
        /// Bins to exclude around the tracked peak (and its first
        /// harmonic) when estimating the noise floor.
        #[arg(long, default_value_t = 12)]
        guard: usize,
    },
}

fn parse_input(common: &CommonArgs) -> anyhow::Result<InputSource> {
    match (&common.input, &common.synth) {
        (Some(path), None) => Ok(InputSource::Wav { path: path.clone() }),
        (None, Some(synth)) => {
            let json = if synth.trim_start().starts_with('{') {
                synth.clone()
            } else {
                std::fs::read_to_string(synth)
                    .with_context(|| format!("reading synth spec file {synth}"))?
            };
            let spec: SynthSpec =
                serde_json::from_str(&json).context("parsing synth spec JSON")?;
            Ok(InputSource::Synth { spec })
        }
        _ => bail!("exactly one of --input or --synth is required"),
    }
}

fn parse_pair(text: &str, what: &str) -> anyhow::Result<(usize, usize)> {
    let (a, b) = text
        .split_once(',')
        .with_context(|| format!("{what} wants the form \"a,b\", got {text:?}"))?;
    Ok((
        a.trim().parse().with_context(|| format!("bad {what} time step {a:?}"))?,
        b.trim().parse().with_context(|| format!("bad {what} bin step {b:?}"))?,
    ))
}

fn parse_lattice(text: &str) -> anyhow::Result<LatticeChoice> {
    match text.split_once(':') {
        None if text == "optimal" => Ok(LatticeChoice::Optimal),
        Some(("rect", rest)) => {
            let (a, b) = parse_pair(rest, "rect lattice")?;
            Ok(LatticeChoice::Rectangular { a, b })
        }
        Some(("half", rest)) => {
            let (a, b) = parse_pair(rest, "half-band lattice")?;
            Ok(LatticeChoice::HalfBand { a, b })
        }
        _ => bail!("unknown lattice {text:?}; use optimal, rect:a,b, or half:a,b"),
    }
}

fn parse_window(text: &str) -> anyhow::Result<WindowMode> {
    match text.split_once(':') {
        None if text == "real" => Ok(WindowMode::Real),
        None if text == "chirped" => Ok(WindowMode::Chirped),
        Some(("segmented", rest)) => {
            let boundaries = rest
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .with_context(|| format!("bad segment boundaries {rest:?}"))?;
            Ok(WindowMode::Segmented { boundaries })
        }
        _ => bail!("unknown window {text:?}; use real, chirped, or segmented:b1,b2,..."),
    }
}

fn parse_band(text: &str) -> anyhow::Result<(f64, f64)> {
    let (lo, hi) = text
        .split_once(',')
        .with_context(|| format!("--band wants \"lo,hi\" in Hz, got {text:?}"))?;
    Ok((
        lo.trim().parse().with_context(|| format!("bad band edge {lo:?}"))?,
        hi.trim().parse().with_context(|| format!("bad band edge {hi:?}"))?,
    ))
}

fn build_config(common: &CommonArgs, task: Task) -> anyhow::Result<RunConfig> {
    Ok(RunConfig {
        input: parse_input(common)?,
        task,
        out_dir: common.out.clone(),
        n: common.n,
        p: common.p,
        redundancy: common.redundancy,
        lattice: parse_lattice(&common.lattice)?,
        window: parse_window(&common.window)?,
        seed: common.seed,
        dynamic_range_db: common.dynamic_range_db,
    })
}

fn real_main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let config = match &cli.command {
        Command::Synth(common) => build_config(common, Task::Synth)?,
        Command::Analyze { common, mode } => {
            let task = match mode.as_str() {
                "spectrogram" => Task::Spectrogram,
                "ambiguity" => Task::Ambiguity,
                _ => bail!("unknown analyze mode {mode:?}; use spectrogram or ambiguity"),
            };
            build_config(common, task)?
        }
        Command::Optimize(common) => build_config(common, Task::Optimize)?,
        Command::Lattice(common) => build_config(common, Task::Lattice)?,
        Command::Track(common) => build_config(common, Task::Track)?,
        Command::Resolve { common, band } => {
            build_config(common, Task::Resolve { band: parse_band(band)? })?
        }
        Command::Snr { common, guard } => {
            build_config(common, Task::Snr { guard_bins: *guard })?
        }
    };
    let report = run(&config)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn main() {
    if let Err(e) = real_main() {
        let detail = serde_json::json!({ "error": format!("{e:#}") });
        eprintln!("{detail}");
        std::process::exit(1);
    }
}
