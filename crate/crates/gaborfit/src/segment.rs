//! Piecewise window fitting: optimize each user-delimited part of the
//! signal independently, then interpolate the per-part optima across
//! analysis frames so the frame-varying transform can adapt smoothly.
//!
//! Each part is zeroed-out-of-place to the full signal length and fitted
//! with the usual two-parameter search, so one lattice and one transform
//! size serve the whole signal. A part's optimum is anchored at the frame
//! containing the part's middle sample; between anchors the width
//! interpolates linearly in `ln sigma` (staying positive and monotone) and
//! the slope linearly; outside the first and last anchors the track is
//! constant.

use num_complex::Complex64;

use crate::error::{GaborError, Result};
use crate::optimize::{optimize_chirped, ObjectiveConfig, OptResult};
use crate::signal::Signal;
use crate::window::{FramewiseWindowTrack, WindowParams};

/// Result of segmented optimization: the part layout, each part's fit, and
/// the interpolated per-frame parameter track.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SegmentationPlan {
    n: usize,
    boundaries: Vec<usize>,
    part_middles: Vec<usize>,
    per_segment: Vec<OptResult>,
    per_frame: FramewiseWindowTrack,
}

impl SegmentationPlan {
    /// Interior part boundaries (strictly increasing, exclusive of 0 and
    /// the signal length).
    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    /// Middle sample of each part; the anchor positions of the track.
    pub fn part_middles(&self) -> &[usize] {
        &self.part_middles
    }

    /// One fit per part, in order.
    pub fn per_segment(&self) -> &[OptResult] {
        &self.per_segment
    }

    /// Interpolated parameters, one entry per lattice time shift of the
    /// config the plan was built with.
    pub fn per_frame(&self) -> &FramewiseWindowTrack {
        &self.per_frame
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Re-interpolates the per-part optima onto a different set of time
    /// shifts (for transforming on a lattice other than the one used
    /// during fitting).
    pub fn track_for(&self, shifts: &[usize]) -> Result<FramewiseWindowTrack> {
        let optima: Vec<WindowParams> = self.per_segment.iter().map(|r| r.params).collect();
        interpolate_track(&self.part_middles, &optima, shifts)
    }
}

/// Frame index anchoring a part: the last shift at or before the part's
/// middle sample (frame 0 when the middle precedes every shift).
fn anchor_frame(shifts: &[usize], middle: usize) -> usize {
    shifts.partition_point(|&x| x <= middle).saturating_sub(1)
}

fn interpolate_track(
    middles: &[usize],
    optima: &[WindowParams],
    shifts: &[usize],
) -> Result<FramewiseWindowTrack> {
    let anchors: Vec<usize> = middles.iter().map(|&m| anchor_frame(shifts, m)).collect();
    if anchors.windows(2).any(|w| w[0] >= w[1]) {
        return Err(GaborError::BadBoundaries(
            "parts are too short for this lattice: middle frames collide".into(),
        ));
    }
    let params: Vec<WindowParams> = (0..shifts.len())
        .map(|j| {
            if j <= anchors[0] {
                return optima[0];
            }
            if j >= *anchors.last().unwrap() {
                return *optima.last().unwrap();
            }
            // j lies strictly between the first and last anchors.
            let k = anchors.partition_point(|&a| a <= j) - 1;
            if anchors[k] == j {
                return optima[k];
            }
            let theta = (j - anchors[k]) as f64 / (anchors[k + 1] - anchors[k]) as f64;
            WindowParams::new(
                ((1.0 - theta) * optima[k].sigma.ln() + theta * optima[k + 1].sigma.ln()).exp(),
                (1.0 - theta) * optima[k].s + theta * optima[k + 1].s,
            )
        })
        .collect();
    Ok(FramewiseWindowTrack::new(params))
}

/// Fits a window to each part of the signal and interpolates the optima
/// into a framewise parameter track.
///
/// `boundaries` are interior split points: `k` boundaries make `k + 1`
/// parts `[0, b_1), [b_1, b_2), ..., [b_k, N)`. Each part must span at
/// least four lattice time steps so its anchor frames stay distinct; parts
/// are zero-padded in place to the full length before fitting.
pub fn optimize_segmented(
    f: &Signal,
    boundaries: &[usize],
    cfg: &ObjectiveConfig,
) -> Result<SegmentationPlan> {
    let n = f.len();
    let shifts = cfg.lattice.time_shifts();
    if shifts.is_empty() {
        return Err(GaborError::EmptyLattice);
    }
    let mut edges = Vec::with_capacity(boundaries.len() + 2);
    edges.push(0usize);
    edges.extend_from_slice(boundaries);
    edges.push(n);
    for w in edges.windows(2) {
        if w[0] >= w[1] {
            return Err(GaborError::BadBoundaries(format!(
                "boundaries must be strictly increasing within (0, {n}), got {boundaries:?}"
            )));
        }
    }
    let step = n as f64 / shifts.len() as f64;
    let min_len = 4.0 * step;
    for (i, w) in edges.windows(2).enumerate() {
        let len = w[1] - w[0];
        if (len as f64) < min_len {
            return Err(GaborError::BadBoundaries(format!(
                "part {i} has {len} samples but needs at least {} (four lattice time steps)",
                min_len.ceil() as usize
            )));
        }
    }

    let mut per_segment = Vec::with_capacity(edges.len() - 1);
    let mut part_middles = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let masked: Vec<Complex64> = f
            .samples()
            .iter()
            .enumerate()
            .map(|(t, &z)| {
                if (lo..hi).contains(&t) {
                    z
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        let part = Signal::new(masked, f.sample_rate())?;
        per_segment.push(optimize_chirped(&part, cfg)?);
        part_middles.push(lo + (hi - lo) / 2);
    }

    let optima: Vec<WindowParams> = per_segment.iter().map(|r| r.params).collect();
    let per_frame = interpolate_track(&part_middles, &optima, shifts)?;
    Ok(SegmentationPlan {
        n,
        boundaries: boundaries.to_vec(),
        part_middles,
        per_segment,
        per_frame,
    })
}
