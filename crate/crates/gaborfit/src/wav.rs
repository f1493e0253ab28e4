//! Minimal WAV file I/O: 16-bit PCM and 32-bit IEEE float, mono or
//! multichannel (multichannel input is averaged down to mono, and the
//! downmix is reported so callers can surface it).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{GaborError, Result};
use crate::signal::Signal;

/// On-disk sample encodings supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleFormat {
    /// Signed 16-bit integers; `[-1, 1]` maps to `[-32768, 32767]`.
    Pcm16,
    /// IEEE 754 single precision, unscaled.
    Float32,
}

/// What was found in a loaded file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct WavInfo {
    pub channels: u16,
    pub format: SampleFormat,
    /// True when multiple channels were averaged down to mono.
    pub downmixed: bool,
}

fn wav_err(msg: impl Into<String>) -> GaborError {
    GaborError::Wav(msg.into())
}

/// Reads a WAV file into a mono [`Signal`].
///
/// Accepts PCM16 and float32 data, any channel count; channels are
/// averaged sample-by-sample and the returned [`WavInfo`] records the
/// downmix. PCM samples are normalized by `1/32768`.
pub fn load_wav(path: &Path) -> Result<(Signal, WavInfo)> {
    let mut r = BufReader::new(File::open(path)?);

    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|_| wav_err("truncated header"))?;
    if &magic != b"RIFF" {
        return Err(wav_err("not a RIFF file"));
    }
    r.read_u32::<LittleEndian>()?; // declared size; chunks are authoritative
    r.read_exact(&mut magic).map_err(|_| wav_err("truncated header"))?;
    if &magic != b"WAVE" {
        return Err(wav_err("not a WAVE file"));
    }

    let mut fmt: Option<(u16, u16, u32, u16)> = None; // (audio_format, channels, sample_rate, bits)
    let mut data: Option<Vec<u8>> = None;
    loop {
        let mut id = [0u8; 4];
        match r.read_exact(&mut id) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => break,
            Err(e) => return Err(e.into()),
        }
        let size = r.read_u32::<LittleEndian>()? as usize;
        match &id {
            b"fmt " => {
                if size < 16 {
                    return Err(wav_err("fmt chunk too small"));
                }
                let audio_format = r.read_u16::<LittleEndian>()?;
                let channels = r.read_u16::<LittleEndian>()?;
                let sample_rate = r.read_u32::<LittleEndian>()?;
                r.read_u32::<LittleEndian>()?; // byte rate
                r.read_u16::<LittleEndian>()?; // block align
                let bits = r.read_u16::<LittleEndian>()?;
                let mut rest = vec![0u8; size - 16 + size % 2];
                r.read_exact(&mut rest)?;
                fmt = Some((audio_format, channels, sample_rate, bits));
            }
            b"data" => {
                let mut bytes = vec![0u8; size];
                r.read_exact(&mut bytes).map_err(|_| wav_err("truncated data chunk"))?;
                if size % 2 == 1 {
                    let mut pad = [0u8; 1];
                    let _ = r.read_exact(&mut pad);
                }
                data = Some(bytes);
            }
            _ => {
                let mut skip = vec![0u8; size + size % 2];
                r.read_exact(&mut skip).map_err(|_| wav_err("truncated chunk"))?;
            }
        }
    }

    let (audio_format, channels, sample_rate, bits) = fmt.ok_or_else(|| wav_err("missing fmt chunk"))?;
    let data = data.ok_or_else(|| wav_err("missing data chunk"))?;
    if channels == 0 {
        return Err(wav_err("zero channels"));
    }
    let format = match (audio_format, bits) {
        (1, 16) => SampleFormat::Pcm16,
        (3, 32) => SampleFormat::Float32,
        _ => {
            return Err(wav_err(format!(
                "unsupported encoding: format tag {audio_format}, {bits} bits"
            )))
        }
    };
    let bytes_per = match format {
        SampleFormat::Pcm16 => 2,
        SampleFormat::Float32 => 4,
    };
    let stride = bytes_per * channels as usize;
    if data.len() % stride != 0 {
        return Err(wav_err("data chunk not a whole number of frames"));
    }
    let n = data.len() / stride;
    let mut samples = Vec::with_capacity(n);
    for frame in data.chunks_exact(stride) {
        let mut acc = 0.0;
        for ch in frame.chunks_exact(bytes_per) {
            acc += match format {
                SampleFormat::Pcm16 => i16::from_le_bytes([ch[0], ch[1]]) as f64 / 32768.0,
                SampleFormat::Float32 => {
                    f32::from_le_bytes([ch[0], ch[1], ch[2], ch[3]]) as f64
                }
            };
        }
        samples.push(acc / channels as f64);
    }
    let info = WavInfo {
        channels,
        format,
        downmixed: channels > 1,
    };
    Ok((Signal::from_real(&samples, sample_rate as f64)?, info))
}

/// Writes the real part of a signal as a mono WAV file.
///
/// PCM16 rounds `x * 32768` to the nearest integer and clamps to the
/// 16-bit range, so any `x` in `[-1, 1]` survives a round trip within one
/// least significant bit. Float32 stores the nearest single-precision
/// value with no scaling or clamping.
pub fn write_wav(path: &Path, signal: &Signal, format: SampleFormat) -> Result<()> {
    let sr = signal.sample_rate();
    if sr < 1.0 || sr > u32::MAX as f64 {
        return Err(wav_err(format!("sample rate {sr} not representable in WAV")));
    }
    let n = signal.len();
    let (tag, bits, bytes_per) = match format {
        SampleFormat::Pcm16 => (1u16, 16u16, 2usize),
        SampleFormat::Float32 => (3, 32, 4),
    };
    let data_len = n * bytes_per;
    // Float files carry a "fact" chunk with the frame count.
    let fact_len = if tag == 3 { 12 } else { 0 };
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(b"RIFF")?;
    w.write_u32::<LittleEndian>((4 + 24 + fact_len + 8 + data_len) as u32)?;
    w.write_all(b"WAVE")?;
    w.write_all(b"fmt ")?;
    w.write_u32::<LittleEndian>(16)?;
    w.write_u16::<LittleEndian>(tag)?;
    w.write_u16::<LittleEndian>(1)?; // mono
    w.write_u32::<LittleEndian>(sr.round() as u32)?;
    w.write_u32::<LittleEndian>(sr.round() as u32 * bytes_per as u32)?;
    w.write_u16::<LittleEndian>(bytes_per as u16)?;
    w.write_u16::<LittleEndian>(bits)?;
    if tag == 3 {
        w.write_all(b"fact")?;
        w.write_u32::<LittleEndian>(4)?;
        w.write_u32::<LittleEndian>(n as u32)?;
    }
    w.write_all(b"data")?;
    w.write_u32::<LittleEndian>(data_len as u32)?;
    for z in signal.samples() {
        match format {
            SampleFormat::Pcm16 => {
                let q = (z.re * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
                w.write_i16::<LittleEndian>(q)?;
            }
            SampleFormat::Float32 => w.write_f32::<LittleEndian>(z.re as f32)?,
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("gaborfit-wav-tests");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    fn ramp(n: usize) -> Vec<f64> {
        (0..n).map(|t| (t as f64 / n as f64) * 1.9 - 0.95).collect()
    }

    #[test]
    fn pcm16_round_trips_within_one_lsb() {
        let path = temp("pcm16.wav");
        let original = ramp(257);
        let sig = Signal::from_real(&original, 8000.0).unwrap();
        write_wav(&path, &sig, SampleFormat::Pcm16).unwrap();
        let (back, info) = load_wav(&path).unwrap();
        assert_eq!(info.channels, 1);
        assert_eq!(info.format, SampleFormat::Pcm16);
        assert!(!info.downmixed);
        assert_eq!(back.len(), 257);
        assert_eq!(back.sample_rate(), 8000.0);
        for (a, b) in original.iter().zip(back.samples()) {
            assert!((a - b.re).abs() <= 1.0 / 32768.0, "{a} vs {}", b.re);
        }
    }

    #[test]
    fn float32_round_trips_at_single_precision() {
        let path = temp("f32.wav");
        let original: Vec<f64> = ramp(100).iter().map(|x| x * 2.5).collect();
        let sig = Signal::from_real(&original, 44100.0).unwrap();
        write_wav(&path, &sig, SampleFormat::Float32).unwrap();
        let (back, info) = load_wav(&path).unwrap();
        assert_eq!(info.format, SampleFormat::Float32);
        for (a, b) in original.iter().zip(back.samples()) {
            assert_eq!(*a as f32 as f64, b.re);
        }
    }

    #[test]
    fn pcm16_clamps_out_of_range_samples() {
        let path = temp("clip.wav");
        let sig = Signal::from_real(&[1.2, -1.5, 0.0, 0.5], 8000.0).unwrap();
        write_wav(&path, &sig, SampleFormat::Pcm16).unwrap();
        let (back, _) = load_wav(&path).unwrap();
        assert_eq!(back.samples()[0].re, 32767.0 / 32768.0);
        assert_eq!(back.samples()[1].re, -1.0);
    }

    /// Hand-built stereo PCM16 file.
    fn write_stereo(path: &std::path::Path, left: &[i16], right: &[i16]) {
        let n = left.len();
        let mut w = BufWriter::new(File::create(path).unwrap());
        w.write_all(b"RIFF").unwrap();
        w.write_u32::<LittleEndian>((36 + n * 4) as u32).unwrap();
        w.write_all(b"WAVEfmt ").unwrap();
        w.write_u32::<LittleEndian>(16).unwrap();
        w.write_u16::<LittleEndian>(1).unwrap();
        w.write_u16::<LittleEndian>(2).unwrap();
        w.write_u32::<LittleEndian>(8000).unwrap();
        w.write_u32::<LittleEndian>(8000 * 4).unwrap();
        w.write_u16::<LittleEndian>(4).unwrap();
        w.write_u16::<LittleEndian>(16).unwrap();
        w.write_all(b"data").unwrap();
        w.write_u32::<LittleEndian>((n * 4) as u32).unwrap();
        for i in 0..n {
            w.write_i16::<LittleEndian>(left[i]).unwrap();
            w.write_i16::<LittleEndian>(right[i]).unwrap();
        }
        w.flush().unwrap();
    }

    #[test]
    fn stereo_is_averaged_and_reported() {
        let path = temp("stereo.wav");
        let left = [16384i16, -16384, 8192, 0];
        let right = [-16384i16, 16384, 8192, 4096];
        write_stereo(&path, &left, &right);
        let (sig, info) = load_wav(&path).unwrap();
        assert_eq!(info.channels, 2);
        assert!(info.downmixed);
        assert_eq!(sig.samples()[0].re, 0.0);
        assert_eq!(sig.samples()[1].re, 0.0);
        assert_eq!(sig.samples()[2].re, 8192.0 / 32768.0);
        assert_eq!(sig.samples()[3].re, 2048.0 / 32768.0);
    }

    #[test]
    fn unknown_chunks_are_skipped() {
        let path = temp("extra-chunk.wav");
        let mut w = BufWriter::new(File::create(&path).unwrap());
        w.write_all(b"RIFF").unwrap();
        w.write_u32::<LittleEndian>(200).unwrap();
        w.write_all(b"WAVE").unwrap();
        w.write_all(b"LIST").unwrap(); // metadata chunk to skip
        w.write_u32::<LittleEndian>(6).unwrap();
        w.write_all(b"INFOab").unwrap();
        w.write_all(b"fmt ").unwrap();
        w.write_u32::<LittleEndian>(16).unwrap();
        w.write_u16::<LittleEndian>(1).unwrap();
        w.write_u16::<LittleEndian>(1).unwrap();
        w.write_u32::<LittleEndian>(8000).unwrap();
        w.write_u32::<LittleEndian>(16000).unwrap();
        w.write_u16::<LittleEndian>(2).unwrap();
        w.write_u16::<LittleEndian>(16).unwrap();
        w.write_all(b"data").unwrap();
        w.write_u32::<LittleEndian>(4).unwrap();
        w.write_i16::<LittleEndian>(100).unwrap();
        w.write_i16::<LittleEndian>(-100).unwrap();
        w.flush().unwrap();
        let (sig, _) = load_wav(&path).unwrap();
        assert_eq!(sig.len(), 2);
        assert_eq!(sig.samples()[0].re, 100.0 / 32768.0);
    }

    #[test]
    fn rejects_malformed_files() {
        let bad_magic = temp("bad-magic.wav");
        std::fs::write(&bad_magic, b"MP3 nonsense").unwrap();
        assert!(matches!(load_wav(&bad_magic), Err(GaborError::Wav(_))));

        let no_data = temp("no-data.wav");
        let mut w = BufWriter::new(File::create(&no_data).unwrap());
        w.write_all(b"RIFF").unwrap();
        w.write_u32::<LittleEndian>(4).unwrap();
        w.write_all(b"WAVE").unwrap();
        w.flush().unwrap();
        assert!(matches!(load_wav(&no_data), Err(GaborError::Wav(_))));

        // 8-bit PCM is not supported.
        let bad_bits = temp("bad-bits.wav");
        let mut w = BufWriter::new(File::create(&bad_bits).unwrap());
        w.write_all(b"RIFF").unwrap();
        w.write_u32::<LittleEndian>(40).unwrap();
        w.write_all(b"WAVEfmt ").unwrap();
        w.write_u32::<LittleEndian>(16).unwrap();
        w.write_u16::<LittleEndian>(1).unwrap();
        w.write_u16::<LittleEndian>(1).unwrap();
        w.write_u32::<LittleEndian>(8000).unwrap();
        w.write_u32::<LittleEndian>(8000).unwrap();
        w.write_u16::<LittleEndian>(1).unwrap();
        w.write_u16::<LittleEndian>(8).unwrap();
        w.write_all(b"data").unwrap();
        w.write_u32::<LittleEndian>(2).unwrap();
        w.write_u16::<LittleEndian>(0).unwrap();
        w.flush().unwrap();
        assert!(matches!(load_wav(&bad_bits), Err(GaborError::Wav(_))));
    }
}
