//! Write a signal to WAV in both supported encodings and read it back.
//!
//! Float32 preserves samples to single precision exactly; 16-bit PCM
//! quantizes to 1/32768, which is plenty for the analysis pipeline and
//! half the file size.

use gaborfit::{load_wav, synthesize, write_wav, SampleFormat, SynthSpec};

fn main() -> anyhow::Result<()> {
    let (signal, _) = synthesize(&SynthSpec::LinearChirp {
        n: 2048,
        sample_rate: 8000.0,
        f_start: 400.0,
        f_end: 1200.0,
        amplitude: 0.8,
        noise_std: 0.0,
        seed: 0,
    })?;

    let out = std::env::temp_dir().join("gaborfit_wav_roundtrip");
    std::fs::create_dir_all(&out)?;

    for (format, name) in [
        (SampleFormat::Float32, "chirp_f32.wav"),
        (SampleFormat::Pcm16, "chirp_i16.wav"),
    ] {
        let path = out.join(name);
        write_wav(&path, &signal, format)?;
        let (reloaded, info) = load_wav(&path)?;
        let bytes = std::fs::metadata(&path)?.len();

        let worst = signal
            .samples()
            .iter()
            .zip(reloaded.samples())
            .map(|(a, b)| (a.re - b.re).abs())
            .fold(0.0f64, f64::max);
        println!(
            "{name}: {bytes} bytes, {} channel(s), sample rate {}, max round-trip error {worst:.2e}",
            info.channels,
            reloaded.sample_rate()
        );
    }
    Ok(())
}
