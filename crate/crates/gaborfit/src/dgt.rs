//! The discrete Gabor transform on a quantized lattice, plus the window
//! ambiguity table and the frame-varying variant.
//!
//! A coefficient at lattice point `(x, xi)` is the inner product of the
//! signal with the window shifted to time `x` and modulated to bin `xi`:
//!
//! ```text
//! V(x, xi) = sum_{t=0}^{N-1} f(t) * conj(g((t - x) mod N)) * exp(-i 2 pi xi t / N)
//! ```
//!
//! The window enters conjugated, so a coefficient is literally `<f,
//! g_{x,xi}>`. For real windows the choice is invisible; for chirped
//! windows it is what makes a window with slope `s` respond maximally to a
//! signal chirping at `+s` rather than `-s`, which every downstream
//! consumer (optimization, tracking, SNR) relies on.
//!
//! All coefficients for one time shift form the FFT of `f(t) * conj(g(t -
//! x))`, so the transform costs one length-`N` FFT per distinct shift.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{GaborError, Result};
use crate::lattice::QuantizedLattice;
use crate::signal::Signal;
use crate::window::{synth_window, FramewiseWindowTrack, GaborWindow};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward_fft(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

/// Transform coefficients grouped by analysis frame (time shift).
///
/// Frame `j` covers the lattice's `j`-th distinct time shift; its bins are
/// sorted ascending and its values align index-for-index with its bins.
#[derive(Debug, Clone, PartialEq)]
pub struct TfCoefficients {
    n: usize,
    sample_rate: f64,
    shifts: Vec<usize>,
    bins: Vec<Vec<usize>>,
    values: Vec<Vec<Complex64>>,
}

impl TfCoefficients {
    /// Assembles a coefficient set from raw frames without running a
    /// transform; lets tests exercise consumers on hand-built tables.
    #[cfg(test)]
    pub(crate) fn from_parts(
        n: usize,
        sample_rate: f64,
        shifts: Vec<usize>,
        bins: Vec<Vec<usize>>,
        values: Vec<Vec<Complex64>>,
    ) -> Self {
        Self {
            n,
            sample_rate,
            shifts,
            bins,
            values,
        }
    }

    /// Transform length.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn n_frames(&self) -> usize {
        self.shifts.len()
    }

    /// Distinct time shifts, ascending.
    pub fn time_shifts(&self) -> &[usize] {
        &self.shifts
    }

    /// Frequency bins of frame `j`, ascending.
    pub fn frame_bins(&self, j: usize) -> &[usize] {
        &self.bins[j]
    }

    /// Coefficients of frame `j`, aligned with `frame_bins(j)`.
    pub fn frame_values(&self, j: usize) -> &[Complex64] {
        &self.values[j]
    }

    /// Number of bins per frame when every frame has the same count.
    pub fn uniform_bin_count(&self) -> Option<usize> {
        let first = self.bins.first()?.len();
        self.bins.iter().all(|b| b.len() == first).then_some(first)
    }

    /// All `(shift, bin, value)` triples in frame order.
    pub fn iter_points(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.shifts.iter().enumerate().flat_map(move |(j, &x)| {
            self.bins[j]
                .iter()
                .zip(&self.values[j])
                .map(move |(&xi, &v)| (x, xi, v))
        })
    }

    /// Sum of squared magnitudes over all coefficients.
    pub fn energy(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|col| col.iter().map(|v| v.norm_sqr()))
            .sum()
    }

    /// Largest coefficient magnitude, with its shift and bin; ties go to
    /// the earliest frame, then the lowest bin.
    pub fn peak(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (x, xi, v) in self.iter_points() {
            let mag = v.norm();
            if best.map_or(true, |(_, _, m)| mag > m) {
                best = Some((x, xi, mag));
            }
        }
        best
    }
}

enum FrameWindow<'a> {
    Fixed(&'a GaborWindow),
    Track(&'a FramewiseWindowTrack),
}

fn transform(
    f: &Signal,
    lattice: &QuantizedLattice,
    windows: FrameWindow<'_>,
) -> Result<TfCoefficients> {
    let n = f.len();
    if lattice.n() != n {
        return Err(GaborError::LengthMismatch {
            expected: n,
            got: lattice.n(),
        });
    }
    let fft = forward_fft(n);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];

    let samples = f.samples();
    let points = lattice.points();
    let shifts = lattice.time_shifts().to_vec();
    let mut bins: Vec<Vec<usize>> = Vec::with_capacity(shifts.len());
    let mut values: Vec<Vec<Complex64>> = Vec::with_capacity(shifts.len());

    let mut start = 0usize;
    for (j, &x) in shifts.iter().enumerate() {
        let mut end = start;
        while end < points.len() && points[end].0 == x {
            end += 1;
        }
        let frame_window;
        let gv: &[Complex64] = match windows {
            FrameWindow::Fixed(g) => g.values(),
            FrameWindow::Track(track) => {
                frame_window = synth_window(track.params()[j], n)?;
                frame_window.values()
            }
        };
        for (t, b) in buf.iter_mut().enumerate() {
            *b = samples[t] * gv[(t + n - x) % n].conj();
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        let frame_bins: Vec<usize> = points[start..end].iter().map(|&(_, xi)| xi).collect();
        let frame_values: Vec<Complex64> = frame_bins.iter().map(|&xi| buf[xi]).collect();
        bins.push(frame_bins);
        values.push(frame_values);
        start = end;
    }

    Ok(TfCoefficients {
        n,
        sample_rate: f.sample_rate(),
        shifts,
        bins,
        values,
    })
}

/// Transform of `f` against the window `g` on the given lattice.
pub fn dgt(f: &Signal, g: &GaborWindow, lattice: &QuantizedLattice) -> Result<TfCoefficients> {
    if g.len() != f.len() {
        return Err(GaborError::LengthMismatch {
            expected: f.len(),
            got: g.len(),
        });
    }
    transform(f, lattice, FrameWindow::Fixed(g))
}

/// Ambiguity table of a window: the transform of the window analyzed by
/// itself. Its magnitude shows the window's time-frequency concentration
/// cell; the peak sits at `(0, 0)` with value 1 for a unit-energy window.
pub fn ambiguity(g: &GaborWindow, lattice: &QuantizedLattice) -> Result<TfCoefficients> {
    let f = Signal::new(g.values().to_vec(), 1.0)?;
    dgt(&f, g, lattice)
}

/// Sum of `|coefficient|^p` over the lattice, streamed straight from the
/// per-frame FFT buffer. Equivalent to transforming and summing, without
/// materializing the coefficient table — this is the optimizer's hot path,
/// evaluated hundreds of times per fit.
pub(crate) fn lp_concentration(
    f: &Signal,
    g: &GaborWindow,
    lattice: &QuantizedLattice,
    p: f64,
) -> Result<f64> {
    let n = f.len();
    if g.len() != n {
        return Err(GaborError::LengthMismatch {
            expected: n,
            got: g.len(),
        });
    }
    if lattice.n() != n {
        return Err(GaborError::LengthMismatch {
            expected: n,
            got: lattice.n(),
        });
    }
    let fft = forward_fft(n);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];

    let samples = f.samples();
    let gv = g.values();
    let points = lattice.points();
    let fast_p = (p - 2.5).abs() < 1e-12;

    let mut total = 0.0;
    let mut start = 0usize;
    while start < points.len() {
        let x = points[start].0;
        let mut end = start;
        while end < points.len() && points[end].0 == x {
            end += 1;
        }
        for (t, b) in buf.iter_mut().enumerate() {
            *b = samples[t] * gv[(t + n - x) % n].conj();
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for &(_, xi) in &points[start..end] {
            total += if fast_p {
                // |v|^2.5 = (|v|^2)^1.25 without a transcendental call.
                let e = buf[xi].norm_sqr();
                e * e.sqrt().sqrt()
            } else {
                buf[xi].norm().powf(p)
            };
        }
        start = end;
    }
    Ok(total)
}

/// Frame-varying transform: frame `j` is analyzed with a window fresh from
/// `track.params()[j]`, on a single lattice shared by all frames.
pub fn nsdgt(
    f: &Signal,
    track: &FramewiseWindowTrack,
    lattice: &QuantizedLattice,
) -> Result<TfCoefficients> {
    if track.len() != lattice.time_shifts().len() {
        return Err(GaborError::TrackMismatch {
            track: track.len(),
            shifts: lattice.time_shifts().len(),
        });
    }
    transform(f, lattice, FrameWindow::Track(track))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{quantize, rectangular_lattice};
    use crate::window::{synth_window, WindowParams};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn full_lattice(n: usize) -> QuantizedLattice {
        quantize(&rectangular_lattice(1, 1, n).unwrap()).unwrap()
    }

    fn random_signal(rng: &mut ChaCha8Rng, n: usize) -> Signal {
        let samples: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Signal::new(samples, 1.0).unwrap()
    }

    /// Literal triple-loop evaluation of the coefficient sum, one lattice
    /// point at a time. Quadratic per point; the oracle the fast path must
    /// match.
    fn dgt_brute(f: &Signal, g: &GaborWindow, lattice: &QuantizedLattice) -> Vec<Complex64> {
        let n = f.len();
        lattice
            .points()
            .iter()
            .map(|&(x, xi)| {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in 0..n {
                    let ph = -2.0 * std::f64::consts::PI * (xi as f64) * (t as f64) / n as f64;
                    acc += f.samples()[t]
                        * g.values()[(t + n - x) % n].conj()
                        * Complex64::from_polar(1.0, ph);
                }
                acc
            })
            .collect()
    }

    fn flat_values(c: &TfCoefficients) -> Vec<Complex64> {
        c.iter_points().map(|(_, _, v)| v).collect()
    }

    #[test]
    fn fast_transform_matches_brute_force_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &n in &[13usize, 16, 24, 64] {
            let f = random_signal(&mut rng, n);
            let g = synth_window(
                WindowParams::new(rng.gen_range(0.2..2.0), rng.gen_range(-0.8..0.8)),
                n,
            )
            .unwrap();
            // A scattering of random points plus a separable grid.
            let mut pts: Vec<(usize, usize)> = (0..3 * n)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .collect();
            pts.push((0, 0));
            let lat = QuantizedLattice::from_points(n, pts).unwrap();
            let fast = flat_values(&dgt(&f, &g, &lat).unwrap());
            let slow = dgt_brute(&f, &g, &lat);
            let scale = slow.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() <= 1e-10 * scale, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn impulse_spreads_the_reversed_window_across_all_bins() {
        let n = 16;
        let mut samples = vec![Complex64::new(0.0, 0.0); n];
        samples[0] = Complex64::new(1.0, 0.0);
        let f = Signal::new(samples, 1.0).unwrap();
        let g = synth_window(WindowParams::new(0.5, 0.0), n).unwrap();
        let c = dgt(&f, &g, &full_lattice(n)).unwrap();
        for (x, _, v) in c.iter_points() {
            let expect = g.values()[(n - x) % n].conj();
            assert!((v - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn window_against_itself_gives_unit_peak_at_origin() {
        let n = 32;
        let g = synth_window(WindowParams::new(1.0, 0.4), n).unwrap();
        let f = Signal::new(g.values().to_vec(), 1.0).unwrap();
        let c = dgt(&f, &g, &full_lattice(n)).unwrap();
        let v00 = c
            .iter_points()
            .find(|&(x, xi, _)| x == 0 && xi == 0)
            .unwrap()
            .2;
        assert!((v00 - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn full_lattice_energy_is_n_times_signal_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &n in &[8usize, 16, 32] {
            let f = random_signal(&mut rng, n);
            let g = synth_window(WindowParams::new(0.7, 0.3), n).unwrap();
            let c = dgt(&f, &g, &full_lattice(n)).unwrap();
            let lhs = c.energy();
            let rhs = n as f64 * f.energy();
            assert!((lhs - rhs).abs() < 1e-10 * rhs, "n={n}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn transform_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 24;
        let f1 = random_signal(&mut rng, n);
        let f2 = random_signal(&mut rng, n);
        let (alpha, beta) = (Complex64::new(0.7, -1.1), Complex64::new(-0.3, 0.4));
        let mixed: Vec<Complex64> = f1
            .samples()
            .iter()
            .zip(f2.samples())
            .map(|(&a, &b)| alpha * a + beta * b)
            .collect();
        let fm = Signal::new(mixed, 1.0).unwrap();
        let g = synth_window(WindowParams::new(1.2, -0.5), n).unwrap();
        let lat = quantize(&rectangular_lattice(4, 2, n).unwrap()).unwrap();
        let cm = flat_values(&dgt(&fm, &g, &lat).unwrap());
        let c1 = flat_values(&dgt(&f1, &g, &lat).unwrap());
        let c2 = flat_values(&dgt(&f2, &g, &lat).unwrap());
        let scale = cm.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for ((m, a), b) in cm.iter().zip(&c1).zip(&c2) {
            assert!((m - (alpha * a + beta * b)).norm() < 1e-10 * scale);
        }
    }

    #[test]
    fn rejects_mismatched_lengths() {
        let f = Signal::from_real(&[1.0; 16], 1.0).unwrap();
        let g = synth_window(WindowParams::new(1.0, 0.0), 24).unwrap();
        assert!(matches!(
            dgt(&f, &g, &full_lattice(16)),
            Err(GaborError::LengthMismatch { .. })
        ));
        let g16 = synth_window(WindowParams::new(1.0, 0.0), 16).unwrap();
        assert!(matches!(
            dgt(&f, &g16, &full_lattice(24)),
            Err(GaborError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn ambiguity_peaks_at_origin_with_unit_magnitude() {
        let n = 48;
        for &s in &[0.0, 0.5, -0.8] {
            let g = synth_window(WindowParams::new(0.8, s), n).unwrap();
            let c = ambiguity(&g, &full_lattice(n)).unwrap();
            let (px, pxi, pmag) = c.peak().unwrap();
            assert_eq!((px, pxi), (0, 0), "s={s}");
            assert!((pmag - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn untilted_ambiguity_is_centrally_symmetric() {
        let n = 36;
        let g = synth_window(WindowParams::new(1.0, 0.0), n).unwrap();
        let c = ambiguity(&g, &full_lattice(n)).unwrap();
        let mut table = vec![0.0f64; n * n];
        for (x, xi, v) in c.iter_points() {
            table[x * n + xi] = v.norm();
        }
        for x in 0..n {
            for xi in 0..n {
                let mirror = table[((n - x) % n) * n + (n - xi) % n];
                assert!((table[x * n + xi] - mirror).abs() < 1e-10);
            }
        }
    }

    /// Magnitude-weighted covariance of centered (shift, bin) coordinates:
    /// zero for an untilted window, nonzero along the chirp's ridge.
    fn tf_covariance(c: &TfCoefficients) -> f64 {
        let center = crate::window::centered_time;
        let mut wsum = 0.0;
        let mut cov = 0.0;
        for (x, xi, v) in c.iter_points() {
            let w = v.norm();
            wsum += w;
            cov += w * center(x, c.n()) * center(xi, c.n());
        }
        cov / wsum
    }

    #[test]
    fn chirp_shears_the_ambiguity_ridge() {
        let n = 256;
        let flat = synth_window(WindowParams::new(1.0, 0.0), n).unwrap();
        let tilted = synth_window(WindowParams::new(1.0, 0.5), n).unwrap();
        let lat = full_lattice(n);
        let cov_flat = tf_covariance(&ambiguity(&flat, &lat).unwrap());
        let cov_tilted = tf_covariance(&ambiguity(&tilted, &lat).unwrap());
        assert!(cov_flat.abs() <= 1e-10, "flat covariance {cov_flat}");
        assert!(cov_tilted > 0.1, "tilted covariance {cov_tilted}");
    }

    #[test]
    fn constant_track_reduces_to_single_window_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 32;
        let f = random_signal(&mut rng, n);
        let params = WindowParams::new(0.6, 0.25);
        let g = synth_window(params, n).unwrap();
        let lat = quantize(&rectangular_lattice(4, 4, n).unwrap()).unwrap();
        let track = FramewiseWindowTrack::constant(params, lat.time_shifts().len());
        let a = flat_values(&dgt(&f, &g, &lat).unwrap());
        let b = flat_values(&nsdgt(&f, &track, &lat).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn each_column_depends_only_on_its_own_track_entry() {
        let n = 32;
        let mut samples = vec![Complex64::new(0.0, 0.0); n];
        samples[0] = Complex64::new(1.0, 0.0);
        let f = Signal::new(samples, 1.0).unwrap();
        let lat = quantize(&rectangular_lattice(8, 4, n).unwrap()).unwrap();
        let base = vec![WindowParams::new(0.5, 0.0); 4];
        let mut changed = base.clone();
        changed[2] = WindowParams::new(2.0, 0.7);
        let ca = nsdgt(&f, &FramewiseWindowTrack::new(base), &lat).unwrap();
        let cb = nsdgt(&f, &FramewiseWindowTrack::new(changed), &lat).unwrap();
        for j in 0..4 {
            let same = ca
                .frame_values(j)
                .iter()
                .zip(cb.frame_values(j))
                .all(|(a, b)| (a - b).norm() < 1e-15);
            assert_eq!(same, j != 2, "frame {j}");
        }
    }

    #[test]
    fn track_length_must_match_lattice() {
        let f = Signal::from_real(&[0.5; 32], 1.0).unwrap();
        let lat = quantize(&rectangular_lattice(8, 4, 32).unwrap()).unwrap();
        let track = FramewiseWindowTrack::constant(WindowParams::new(1.0, 0.0), 3);
        assert!(matches!(
            nsdgt(&f, &track, &lat),
            Err(GaborError::TrackMismatch { track: 3, shifts: 4 })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn brute_force_equivalence_on_random_inputs(
            seed in 0u64..1000,
            n in prop::sample::select(vec![9usize, 12, 20, 33, 64]),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_signal(&mut rng, n);
            let g = synth_window(
                WindowParams::new(rng.gen_range(0.1..3.0), rng.gen_range(-1.0..1.0)),
                n,
            )
            .unwrap();
            let pts: Vec<(usize, usize)> = (0..2 * n)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .collect();
            let lat = QuantizedLattice::from_points(n, pts).unwrap();
            let fast = flat_values(&dgt(&f, &g, &lat).unwrap());
            let slow = dgt_brute(&f, &g, &lat);
            let scale = slow.iter().map(|v| v.norm()).fold(1e-30, f64::max);
            for (a, b) in fast.iter().zip(&slow) {
                prop_assert!((a - b).norm() <= 1e-10 * scale);
            }
        }
    }
}
