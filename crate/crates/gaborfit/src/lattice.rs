//! Time-frequency sampling lattices: continuous generators, integer
//! quantization, and frame-condition diagnostics.
//!
//! A lattice is described in two stages. A [`LatticeSpec`] carries a real
//! 2x2 generator matrix whose columns are generator vectors in (time,
//! frequency) coordinates; [`quantize`] turns it into a concrete set of
//! integer sample points on the `N x N` time-frequency grid. The quantizer
//! prefers a structured "separable with shear" form (uniform time step,
//! uniform bin step, per-column bin offsets) and falls back to rounding a
//! rescaled copy of the generator when no structured form realizes the
//! requested redundancy closely enough.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::error::{GaborError, Result};
use crate::window::{GaborWindow, WindowParams};

/// Relative tolerance on realized redundancy accepted by [`quantize`].
pub const REDUNDANCY_TOL: f64 = 0.10;

/// Default cap on the transform length accepted by [`frame_condition`].
pub const DEFAULT_FRAME_COND_MAX_N: usize = 512;

/// Environment variable overriding the [`frame_condition`] length cap.
pub const FRAME_COND_MAX_N_VAR: &str = "GABORFIT_MAXN_FRAME_COND";

/// How a lattice generator was produced.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatticeSource {
    /// Matched to a window via shear and dilation of the hexagonal packing.
    Optimal { params: WindowParams },
    /// Plain rectangular grid with the given steps.
    Rectangular { a: usize, b: usize },
    /// Caller-supplied generator or point set.
    Custom,
}

/// Continuous description of a lattice on the `n x n` time-frequency torus.
///
/// `generator` is row-major; row 0 is the time coordinate and row 1 the
/// frequency coordinate, so the generator vectors are the columns
/// `(generator[0][0], generator[1][0])` and `(generator[0][1],
/// generator[1][1])`. Generators are kept time-ordered lower-triangular:
/// the second generator is purely a frequency step. `|det| = n /
/// redundancy` so the lattice has `redundancy * n` points per fundamental
/// tile.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LatticeSpec {
    pub generator: [[f64; 2]; 2],
    pub n: usize,
    /// Target redundancy (points per signal sample).
    pub redundancy: f64,
    pub source: LatticeSource,
}

/// Structure of a quantized point set.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatticeStructure {
    /// Points `(a j, (b m + offsets[j]) mod n)`: uniform steps with a
    /// per-column bin offset following the generator's shear.
    Separable {
        a: usize,
        b: usize,
        offsets: Vec<usize>,
    },
    /// Irregular point set from rounding a continuous lattice.
    General,
}

/// A concrete set of integer (time shift, frequency bin) sample points.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct QuantizedLattice {
    n: usize,
    points: Vec<(usize, usize)>,
    time_shifts: Vec<usize>,
    structure: LatticeStructure,
    realized_redundancy: f64,
}

fn distinct_shifts(points: &[(usize, usize)]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for &(x, _) in points {
        if out.last() != Some(&x) {
            out.push(x);
        }
    }
    out
}

impl QuantizedLattice {
    fn from_sorted(n: usize, points: Vec<(usize, usize)>, structure: LatticeStructure) -> Self {
        let time_shifts = distinct_shifts(&points);
        let realized = points.len() as f64 / n as f64;
        Self {
            n,
            points,
            time_shifts,
            structure,
            realized_redundancy: realized,
        }
    }

    /// Builds a lattice from an explicit point list. Points are deduplicated
    /// and sorted; each coordinate must lie in `0..n`.
    pub fn from_points(n: usize, points: Vec<(usize, usize)>) -> Result<Self> {
        if n < 2 {
            return Err(GaborError::SignalTooShort(n));
        }
        if points.is_empty() {
            return Err(GaborError::EmptyLattice);
        }
        for &(x, xi) in &points {
            if x >= n || xi >= n {
                return Err(GaborError::PointOutOfRange { x, xi, n });
            }
        }
        let set: BTreeSet<(usize, usize)> = points.into_iter().collect();
        let points: Vec<(usize, usize)> = set.into_iter().collect();
        Ok(Self::from_sorted(n, points, LatticeStructure::General))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Points sorted by time shift, then frequency bin.
    pub fn points(&self) -> &[(usize, usize)] {
        &self.points
    }

    /// Distinct time shifts in ascending order.
    pub fn time_shifts(&self) -> &[usize] {
        &self.time_shifts
    }

    pub fn structure(&self) -> &LatticeStructure {
        &self.structure
    }

    /// `(a, b, offsets)` when the point set is separable with shear.
    pub fn separable(&self) -> Option<(usize, usize, &[usize])> {
        match &self.structure {
            LatticeStructure::Separable { a, b, offsets } => Some((*a, *b, offsets)),
            LatticeStructure::General => None,
        }
    }

    /// Points per signal sample actually realized.
    pub fn realized_redundancy(&self) -> f64 {
        self.realized_redundancy
    }
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// The hexagonal generator with unit determinant, time-ordered
/// lower-triangular: columns `(3^{1/4}/sqrt2, 1/(3^{1/4} sqrt2))` and
/// `(0, sqrt2/3^{1/4})`.
fn hexagonal_generator() -> [[f64; 2]; 2] {
    let c = 3f64.powf(0.25);
    let r2 = std::f64::consts::SQRT_2;
    [[c / r2, 0.0], [1.0 / (c * r2), r2 / c]]
}

/// Generator matched to a chirped Gaussian window: the unit hexagonal
/// packing dilated by the window width, sheared by the chirp slope, and
/// scaled so the lattice density gives the requested redundancy.
///
/// The shear is applied last and exactly, so
/// `optimal_lattice(sigma, s) == Shear(s) * optimal_lattice(sigma, 0)`
/// holds bit for bit.
pub fn optimal_lattice(params: WindowParams, n: usize, redundancy: f64) -> Result<LatticeSpec> {
    if n < 2 {
        return Err(GaborError::SignalTooShort(n));
    }
    if !(params.sigma.is_finite() && params.sigma > 0.0) || !params.s.is_finite() {
        return Err(GaborError::InvalidWindowParams {
            sigma: params.sigma,
            s: params.s,
        });
    }
    if !redundancy.is_finite() || redundancy < 1.0 {
        return Err(GaborError::RedundancyTooSmall(redundancy));
    }
    let scale = (n as f64 / redundancy).sqrt();
    let hex = hexagonal_generator();
    let rs = params.sigma.sqrt();
    // scale * Dilate(sigma) * Hex, all lower-triangular.
    let base = [
        [scale * hex[0][0] * rs, 0.0],
        [scale * hex[1][0] / rs, scale * hex[1][1] / rs],
    ];
    // Shear(s) adds s * (time row) to the frequency row.
    let generator = [
        base[0],
        [params.s * base[0][0] + base[1][0], params.s * base[0][1] + base[1][1]],
    ];
    Ok(LatticeSpec {
        generator,
        n,
        redundancy,
        source: LatticeSource::Optimal { params },
    })
}

/// Rectangular lattice generator with time step `a` and bin step `b`; both
/// must divide `n`. Redundancy is `n / (a b)`.
pub fn rectangular_lattice(a: usize, b: usize, n: usize) -> Result<LatticeSpec> {
    if n < 2 {
        return Err(GaborError::SignalTooShort(n));
    }
    if a == 0 || n % a != 0 {
        return Err(GaborError::NotADivisor { value: a, n });
    }
    if b == 0 || n % b != 0 {
        return Err(GaborError::NotADivisor { value: b, n });
    }
    Ok(LatticeSpec {
        generator: [[a as f64, 0.0], [0.0, b as f64]],
        n,
        redundancy: n as f64 / (a as f64 * b as f64),
        source: LatticeSource::Rectangular { a, b },
    })
}

/// Dense nonnegative-frequency lattice for analyzing real signals: points
/// `(a j, b m)` for every bin `b m <= n/2` (Nyquist inclusive). Real
/// signals have Hermitian spectra, so the upper half band adds no
/// information; sampling only the lower half keeps per-frame spectra
/// single-sided, which peak tracking and noise estimation rely on. `a`
/// must divide `n`; `b` must leave at least two bins.
pub fn half_band_lattice(a: usize, b: usize, n: usize) -> Result<QuantizedLattice> {
    if n < 2 {
        return Err(GaborError::SignalTooShort(n));
    }
    if a == 0 || n % a != 0 {
        return Err(GaborError::NotADivisor { value: a, n });
    }
    if b == 0 || b > n / 2 {
        return Err(GaborError::BadConfig(format!(
            "bin step {b} leaves fewer than two bins below Nyquist ({})",
            n / 2
        )));
    }
    let mut points = Vec::new();
    for j in 0..n / a {
        let mut xi = 0;
        while xi <= n / 2 {
            points.push((a * j, xi));
            xi += b;
        }
    }
    Ok(QuantizedLattice::from_sorted(
        n,
        points,
        LatticeStructure::General,
    ))
}

/// Quantizes a continuous generator to integer grid points.
///
/// Two strategies are tried in order:
///
/// 1. **Structured snap.** Over all divisor pairs `(a, b)` of `n`, pick the
///    pair whose redundancy `n/(a b)` deviates least from the target,
///    breaking ties by how closely `a` matches the generator's time step
///    and then by `(a, b)`. If the deviation is within [`REDUNDANCY_TOL`],
///    emit points `(a j, (b m + off_j) mod n)` where `off_j` rounds the
///    generator's shear `generator[1][0]/generator[0][0]` evaluated at time
///    `a j`. Integer rectangular generators reproduce their grid exactly.
/// 2. **Rounding fallback.** For rescalings `gamma` near 1 (tried closest
///    to 1 first), round every point of `gamma * generator * Z^2` that
///    falls in the fundamental tile `[-0.5, n-0.5)^2` to the nearest
///    integer pair, wrap modulo `n`, and deduplicate; keep the rescaling
///    whose realized redundancy deviates least from the target.
///
/// Errors with [`GaborError::QuantizeOutOfTolerance`] if neither strategy
/// lands within [`REDUNDANCY_TOL`] of the target redundancy.
pub fn quantize(spec: &LatticeSpec) -> Result<QuantizedLattice> {
    let n = spec.n;
    if n < 2 {
        return Err(GaborError::SignalTooShort(n));
    }
    let m = spec.generator;
    if m[0][1].abs() > 1e-9 * m[0][0].abs().max(m[1][1].abs()) {
        return Err(GaborError::DegenerateGenerator);
    }
    if !(m[0][0].is_finite() && m[0][0] > 0.0 && m[1][1].is_finite() && m[1][1] > 0.0) {
        return Err(GaborError::DegenerateGenerator);
    }
    let target = spec.redundancy;
    if !target.is_finite() || target <= 0.0 {
        return Err(GaborError::DegenerateGenerator);
    }

    // Structured snap over divisor pairs.
    let divs = divisors(n);
    let mut best: Option<(f64, f64, usize, usize)> = None;
    for &a in &divs {
        let aspect = (a as f64 / m[0][0]).ln().abs();
        for &b in &divs {
            let realized = n as f64 / (a as f64 * b as f64);
            let dev = (realized - target).abs() / target;
            let better = match &best {
                None => true,
                Some(k) => (dev, aspect, a, b) < *k,
            };
            if better {
                best = Some((dev, aspect, a, b));
            }
        }
    }
    let (dev, _, a, b) = best.expect("divisor list is never empty");
    if dev <= REDUNDANCY_TOL {
        let slope = m[1][0] / m[0][0];
        let cols = n / a;
        let rows = n / b;
        let offsets: Vec<usize> = (0..cols)
            .map(|j| (slope * (a * j) as f64).round().rem_euclid(n as f64) as usize % n)
            .collect();
        let mut points: Vec<(usize, usize)> = Vec::with_capacity(cols * rows);
        for (j, &off) in offsets.iter().enumerate() {
            let mut frame: Vec<usize> = (0..rows).map(|mm| (b * mm + off) % n).collect();
            frame.sort_unstable();
            points.extend(frame.into_iter().map(|xi| (a * j, xi)));
        }
        return Ok(QuantizedLattice::from_sorted(
            n,
            points,
            LatticeStructure::Separable { a, b, offsets },
        ));
    }

    // Rounding fallback with rescaling, closest-to-unity first.
    let mut gammas = vec![1.0f64];
    for k in 1..=12 {
        let step = 0.005 * k as f64;
        gammas.push(1.0 - step);
        gammas.push(1.0 + step);
    }
    let mut best_pts: Option<(f64, BTreeSet<(usize, usize)>)> = None;
    let nf = n as f64;
    for gamma in gammas {
        let g00 = gamma * m[0][0];
        let g10 = gamma * m[1][0];
        let g11 = gamma * m[1][1];
        let mut pts: BTreeSet<(usize, usize)> = BTreeSet::new();
        // Time coordinate is g00 * k1; enumerate k1 across the tile.
        let k1_lo = (-0.5 / g00).ceil() as i64;
        let k1_hi = ((nf - 0.5) / g00).ceil() as i64;
        for k1 in k1_lo..k1_hi {
            let x = g00 * k1 as f64;
            if !(-0.5..nf - 0.5).contains(&x) {
                continue;
            }
            let base = g10 * k1 as f64;
            let k2_lo = ((-0.5 - base) / g11).ceil() as i64;
            let k2_hi = ((nf - 0.5 - base) / g11).ceil() as i64;
            for k2 in k2_lo..k2_hi {
                let xi = base + g11 * k2 as f64;
                if !(-0.5..nf - 0.5).contains(&xi) {
                    continue;
                }
                let xq = x.round().rem_euclid(nf) as usize % n;
                let xiq = xi.round().rem_euclid(nf) as usize % n;
                pts.insert((xq, xiq));
            }
        }
        if pts.is_empty() {
            continue;
        }
        let dev = (pts.len() as f64 / nf - target).abs() / target;
        let better = match &best_pts {
            None => true,
            Some((d, _)) => dev < d - 1e-15,
        };
        if better {
            best_pts = Some((dev, pts));
        }
    }
    match best_pts {
        Some((dev, pts)) if dev <= REDUNDANCY_TOL => {
            let points: Vec<(usize, usize)> = pts.into_iter().collect();
            Ok(QuantizedLattice::from_sorted(
                n,
                points,
                LatticeStructure::General,
            ))
        }
        Some((_, pts)) => Err(GaborError::QuantizeOutOfTolerance {
            realized: pts.len() as f64 / nf,
            target,
        }),
        None => Err(GaborError::EmptyLattice),
    }
}

fn frame_condition_cap() -> Result<usize> {
    match std::env::var(FRAME_COND_MAX_N_VAR) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            GaborError::BadConfig(format!(
                "{FRAME_COND_MAX_N_VAR} must be a positive integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(DEFAULT_FRAME_COND_MAX_N),
    }
}

/// Ratio of the largest to smallest eigenvalue of the frame operator
/// `S = sum_{(x, xi)} g_{x,xi} g_{x,xi}^*` over the lattice points, where
/// `g_{x,xi}(t) = g(t - x) exp(i 2 pi xi t / n)`.
///
/// A ratio near 1 means the coefficient map is stably invertible; the
/// sentinel `+inf` is returned when the smallest eigenvalue falls below
/// `1e-12` times the largest (the atoms do not span). Dense
/// eigendecomposition is `O(n^3)`, so lengths above the cap (default
/// [`DEFAULT_FRAME_COND_MAX_N`], overridable via the
/// `GABORFIT_MAXN_FRAME_COND` environment variable) are rejected.
pub fn frame_condition(g: &GaborWindow, lattice: &QuantizedLattice) -> Result<f64> {
    let n = g.len();
    if lattice.n() != n {
        return Err(GaborError::LengthMismatch {
            expected: n,
            got: lattice.n(),
        });
    }
    let cap = frame_condition_cap()?;
    if n > cap {
        return Err(GaborError::FrameConditionTooLarge { n, cap });
    }
    if lattice.points().is_empty() {
        return Err(GaborError::EmptyLattice);
    }

    // Group bins by shift: the bin sum collapses to a factor depending only
    // on the difference of time indices, which keeps assembly at
    // O(points * n + shifts * n^2) instead of O(points * n^2).
    let gv = g.values();
    let mut s = vec![Complex64::new(0.0, 0.0); n * n];
    let pts = lattice.points();
    let mut idx = 0usize;
    while idx < pts.len() {
        let x = pts[idx].0;
        let mut end = idx;
        while end < pts.len() && pts[end].0 == x {
            end += 1;
        }
        // c[d] = sum over the frame's bins of exp(i 2 pi xi d / n).
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        for &(_, xi) in &pts[idx..end] {
            for (d, cd) in c.iter_mut().enumerate() {
                let ph = 2.0 * std::f64::consts::PI * (xi as f64) * (d as f64) / n as f64;
                *cd += Complex64::from_polar(1.0, ph);
            }
        }
        for row in 0..n {
            let gr = gv[(row + n - x) % n];
            for col in 0..n {
                let gc = gv[(col + n - x) % n].conj();
                let d = (row + n - col) % n;
                s[row * n + col] += gr * gc * c[d];
            }
        }
        idx = end;
    }

    // Real symmetric embedding [[Re, -Im], [Im, Re]] of the Hermitian
    // operator; its spectrum is that of S with doubled multiplicity.
    let two = 2 * n;
    let mut emb = nalgebra::DMatrix::<f64>::zeros(two, two);
    for row in 0..n {
        for col in 0..n {
            let z = s[row * n + col];
            emb[(row, col)] = z.re;
            emb[(row, n + col)] = -z.im;
            emb[(n + row, col)] = z.im;
            emb[(n + row, n + col)] = z.re;
        }
    }
    let emb = (&emb + emb.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(emb);
    let mut lmin = f64::INFINITY;
    let mut lmax = f64::NEG_INFINITY;
    for &l in eig.eigenvalues.iter() {
        lmin = lmin.min(l);
        lmax = lmax.max(l);
    }
    if !(lmax.is_finite() && lmax > 0.0) {
        return Err(GaborError::EmptyLattice);
    }
    if lmin < 1e-12 * lmax {
        return Ok(f64::INFINITY);
    }
    Ok(lmax / lmin)
}
