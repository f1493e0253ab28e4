//! Rendering coefficient tables and analysis tracks to files: binary PGM
//! spectrograms (with a raw-magnitude CSV written alongside) and CSV
//! serializations of frequency and SNR tracks.
//!
//! All numeric CSV fields use Rust's shortest round-trip float formatting,
//! so re-parsing a file reproduces the original values bit for bit and
//! identical inputs always produce byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::analysis::{FrequencyTrack, SnrTrack};
use crate::dgt::TfCoefficients;
use crate::error::{GaborError, Result};

/// Writes a grayscale PGM (binary `P5`, one byte per pixel) spectrogram of
/// the coefficient magnitudes, plus a CSV of the raw magnitudes at the
/// same path with extension `csv`.
///
/// Pixels map `20 log10(|V| / max |V|)` affinely from
/// `[-dynamic_range_db, 0]` onto `[0, 255]`, clamped at the ends; columns
/// are frames in time order and rows are bins with the lowest frequency at
/// the bottom. The CSV lists `shift,bin,magnitude` triples in frame order.
///
/// Requires a separable layout (equal bin count per frame) so the image is
/// rectangular.
pub fn emit_spectrogram(
    coeffs: &TfCoefficients,
    path: &Path,
    dynamic_range_db: f64,
) -> Result<()> {
    if coeffs.n_frames() == 0 {
        return Err(GaborError::EmptyCoefficients);
    }
    let height = coeffs.uniform_bin_count().ok_or(GaborError::NotSeparable)?;
    if height == 0 {
        return Err(GaborError::EmptyCoefficients);
    }
    if !(dynamic_range_db.is_finite() && dynamic_range_db > 0.0) {
        return Err(GaborError::BadConfig(format!(
            "dynamic range must be positive, got {dynamic_range_db} dB"
        )));
    }
    let width = coeffs.n_frames();
    let mags: Vec<Vec<f64>> = (0..width)
        .map(|j| coeffs.frame_values(j).iter().map(|v| v.norm()).collect())
        .collect();
    let max = mags
        .iter()
        .flat_map(|col| col.iter().copied())
        .fold(0.0, f64::max);

    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{width} {height}\n255\n")?;
    // Top row = highest bin index, so low frequencies sit at the bottom.
    for row in (0..height).rev() {
        for col in &mags {
            let px = if max > 0.0 && col[row] > 0.0 {
                let db = 20.0 * (col[row] / max).log10();
                (255.0 * (db + dynamic_range_db) / dynamic_range_db)
                    .round()
                    .clamp(0.0, 255.0) as u8
            } else {
                0
            };
            w.write_all(&[px])?;
        }
    }
    w.flush()?;

    let mut c = BufWriter::new(File::create(path.with_extension("csv"))?);
    writeln!(c, "shift,bin,magnitude")?;
    for (x, xi, v) in coeffs.iter_points() {
        writeln!(c, "{x},{xi},{}", v.norm())?;
    }
    c.flush()?;
    Ok(())
}

/// Writes a frequency track as `time,frequency,magnitude` CSV; gap frames
/// leave the frequency field empty.
pub fn emit_track_csv(track: &FrequencyTrack, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "time,frequency,magnitude")?;
    for e in &track.entries {
        match e.frequency {
            Some(f) => writeln!(w, "{},{},{}", e.time, f, e.magnitude)?,
            None => writeln!(w, "{},,{}", e.time, e.magnitude)?,
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes an SNR track as `time,snr_db` CSV. Non-finite estimates render
/// as `inf` / `-inf`, which `f64::from_str` parses back exactly.
pub fn emit_snr_csv(snr: &SnrTrack, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "time,snr_db")?;
    for e in &snr.entries {
        writeln!(w, "{},{}", e.time, e.snr_db)?;
    }
    w.flush()?;
    Ok(())
}
