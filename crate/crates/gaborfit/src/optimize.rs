//! Window-parameter fitting by maximizing transform concentration.
//!
//! The figure of merit is the `l_p` norm (to the `p`-th power, `p > 2`) of
//! the transform coefficients on a fixed lattice. Because every window has
//! unit energy, total coefficient energy is roughly parameter-independent,
//! so pushing the `p`-norm up means concentrating energy in fewer
//! coefficients — the window that best matches the signal's local
//! time-frequency geometry wins.
//!
//! The landscape is smooth but can be multimodal for multicomponent
//! signals, so every search runs a coarse grid first (log-spaced in the
//! width `sigma`, linear in the chirp slope `s`) and then a local
//! derivative-free refinement from the best cell: a simplex in `(ln sigma,
//! s)` for the two-parameter fit, golden-section on `ln sigma` when the
//! slope is pinned to zero. Grid cells are scanned in ascending `sigma`,
//! then ascending `s`, and only a strictly larger objective replaces the
//! incumbent, so ties resolve toward the smallest parameters,
//! deterministically.

use crate::dgt::lp_concentration;
use crate::error::{GaborError, Result};
use crate::lattice::QuantizedLattice;
use crate::signal::Signal;
use crate::window::{synth_window, WindowParams};

pub const DEFAULT_P: f64 = 2.5;
pub const DEFAULT_GRID: (usize, usize) = (24, 17);
pub const DEFAULT_REFINE_TOL: f64 = 1e-3;

/// Configuration for the concentration objective and its optimizers.
#[derive(Debug, Clone)]
pub struct ObjectiveConfig {
    /// Concentration exponent; must exceed 2.
    pub p: f64,
    /// Lattice the objective is evaluated on.
    pub lattice: QuantizedLattice,
    /// Inclusive search range for the window width.
    pub sigma_range: (f64, f64),
    /// Inclusive search range for the chirp slope.
    pub s_range: (f64, f64),
    /// Coarse grid size `(n_sigma, n_s)`.
    pub grid: (usize, usize),
    /// Refinement stops when the candidate spread (in `(ln sigma, s)`
    /// coordinates) drops below this.
    pub refine_tol: f64,
}

impl ObjectiveConfig {
    /// Defaults for a given lattice: `p = 2.5`, `sigma` spanning `[4/N,
    /// N/4]` (a few samples up to a quarter of the signal), slope in
    /// `[-1, 1]`, a 24 x 17 grid, refinement tolerance `1e-3`.
    pub fn new(lattice: QuantizedLattice) -> Self {
        let n = lattice.n() as f64;
        Self {
            p: DEFAULT_P,
            lattice,
            sigma_range: (4.0 / n, n / 4.0),
            s_range: (-1.0, 1.0),
            grid: DEFAULT_GRID,
            refine_tol: DEFAULT_REFINE_TOL,
        }
    }
}

/// Outcome of a window fit: the best parameters, the objective there, and
/// every evaluation made along the way, in evaluation order.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct OptResult {
    pub params: WindowParams,
    pub objective: f64,
    pub trace: Vec<(WindowParams, f64)>,
}

fn validate(f: &Signal, cfg: &ObjectiveConfig, needs_s_axis: bool) -> Result<()> {
    if f.len() != cfg.lattice.n() {
        return Err(GaborError::LengthMismatch {
            expected: cfg.lattice.n(),
            got: f.len(),
        });
    }
    if !(cfg.p.is_finite() && cfg.p > 2.0) {
        return Err(GaborError::BadConfig(format!(
            "concentration exponent must exceed 2, got {}",
            cfg.p
        )));
    }
    let (lo, hi) = cfg.sigma_range;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
        return Err(GaborError::EmptyRange { lo, hi });
    }
    let (slo, shi) = cfg.s_range;
    if !(slo.is_finite() && shi.is_finite() && slo <= shi) {
        return Err(GaborError::EmptyRange { lo: slo, hi: shi });
    }
    if !(cfg.refine_tol.is_finite() && cfg.refine_tol > 0.0) {
        return Err(GaborError::BadConfig(format!(
            "refine_tol must be positive, got {}",
            cfg.refine_tol
        )));
    }
    if cfg.grid.0 < 2 {
        return Err(GaborError::GridTooCoarse {
            need: 2,
            got: cfg.grid.0,
        });
    }
    if needs_s_axis && cfg.grid.1 < 2 {
        return Err(GaborError::GridTooCoarse {
            need: 2,
            got: cfg.grid.1,
        });
    }
    Ok(())
}

/// Concentration of the transform of `f` under the window `params`:
/// `sum over lattice points of |V(x, xi)|^p`.
pub fn objective(f: &Signal, params: WindowParams, cfg: &ObjectiveConfig) -> Result<f64> {
    validate(f, cfg, false)?;
    let g = synth_window(params, f.len())?;
    lp_concentration(f, &g, &cfg.lattice, cfg.p)
}

/// Search state shared by the optimizers: records every evaluation and
/// keeps the incumbent under the strictly-greater rule, so earlier (lower
/// sigma, then lower s) candidates win ties.
struct Search<'a> {
    f: &'a Signal,
    cfg: &'a ObjectiveConfig,
    trace: Vec<(WindowParams, f64)>,
    best: Option<(WindowParams, f64)>,
}

impl<'a> Search<'a> {
    fn new(f: &'a Signal, cfg: &'a ObjectiveConfig) -> Self {
        Self {
            f,
            cfg,
            trace: Vec::new(),
            best: None,
        }
    }

    fn eval(&mut self, sigma: f64, s: f64) -> Result<f64> {
        let params = WindowParams::new(sigma, s);
        let o = objective(self.f, params, self.cfg)?;
        self.trace.push((params, o));
        if self.best.map_or(true, |(_, b)| o > b) {
            self.best = Some((params, o));
        }
        Ok(o)
    }

    fn finish(self) -> OptResult {
        let (params, objective) = self.best.expect("search evaluated at least one candidate");
        OptResult {
            params,
            objective,
            trace: self.trace,
        }
    }
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

fn log_grid(range: (f64, f64), count: usize) -> Vec<f64> {
    linspace(range.0.ln(), range.1.ln(), count)
        .into_iter()
        .map(f64::exp)
        .collect()
}

/// Two-parameter fit of width and chirp slope.
///
/// Coarse grid scan over `cfg.grid` cells, then simplex refinement in
/// `(ln sigma, s)` clamped to the configured box, stopping once the
/// simplex's parameter spread falls below `cfg.refine_tol`. The returned
/// optimum is the best evaluation seen anywhere, so refinement can only
/// improve on the grid winner, never lose it.
pub fn optimize_chirped(f: &Signal, cfg: &ObjectiveConfig) -> Result<OptResult> {
    validate(f, cfg, true)?;
    if f.energy() == 0.0 {
        return Err(GaborError::ZeroSignal);
    }
    let sigmas = log_grid(cfg.sigma_range, cfg.grid.0);
    let slopes = linspace(cfg.s_range.0, cfg.s_range.1, cfg.grid.1);
    let mut search = Search::new(f, cfg);
    for &sigma in &sigmas {
        for &s in &slopes {
            search.eval(sigma, s)?;
        }
    }
    let (start, _) = search.best.expect("grid is nonempty");

    let lo = [cfg.sigma_range.0.ln(), cfg.s_range.0];
    let hi = [cfg.sigma_range.1.ln(), cfg.s_range.1];
    let clamp = |u: [f64; 2]| [u[0].clamp(lo[0], hi[0]), u[1].clamp(lo[1], hi[1])];
    let eval_u = |search: &mut Search, u: [f64; 2]| -> Result<f64> {
        search.eval(u[0].exp(), u[1])
    };

    // Initial simplex around the grid winner, sized at half a grid cell;
    // if a vertex would clamp onto the start point, step the other way.
    let du = ((hi[0] - lo[0]) / (cfg.grid.0 - 1) as f64).max(cfg.refine_tol) * 0.5;
    let ds = ((hi[1] - lo[1]) / (cfg.grid.1 - 1) as f64).max(cfg.refine_tol) * 0.5;
    let u0 = clamp([start.sigma.ln(), start.s]);
    let offset = |u: [f64; 2], axis: usize, step: f64| -> [f64; 2] {
        let mut fwd = u;
        fwd[axis] += step;
        let fwd = clamp(fwd);
        if fwd != u {
            fwd
        } else {
            let mut back = u;
            back[axis] -= step;
            clamp(back)
        }
    };
    let mut simplex: Vec<([f64; 2], f64)> = Vec::with_capacity(3);
    for u in [u0, offset(u0, 0, du), offset(u0, 1, ds)] {
        let o = eval_u(&mut search, u)?;
        simplex.push((u, o));
    }

    for _ in 0..200 {
        // Best first; ties toward smaller parameters for determinism.
        simplex.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap()
                .then(a.0[0].partial_cmp(&b.0[0]).unwrap())
                .then(a.0[1].partial_cmp(&b.0[1]).unwrap())
        });
        let spread = simplex[1..]
            .iter()
            .map(|(u, _)| {
                (u[0] - simplex[0].0[0])
                    .abs()
                    .max((u[1] - simplex[0].0[1]).abs())
            })
            .fold(0.0, f64::max);
        if spread < cfg.refine_tol {
            break;
        }
        let (best, second, worst) = (simplex[0], simplex[1], simplex[2]);
        let centroid = [
            0.5 * (best.0[0] + second.0[0]),
            0.5 * (best.0[1] + second.0[1]),
        ];
        let reflect = clamp([
            centroid[0] + (centroid[0] - worst.0[0]),
            centroid[1] + (centroid[1] - worst.0[1]),
        ]);
        let fr = eval_u(&mut search, reflect)?;
        if fr > best.1 {
            let expand = clamp([
                centroid[0] + 2.0 * (centroid[0] - worst.0[0]),
                centroid[1] + 2.0 * (centroid[1] - worst.0[1]),
            ]);
            let fe = eval_u(&mut search, expand)?;
            simplex[2] = if fe > fr { (expand, fe) } else { (reflect, fr) };
        } else if fr > second.1 {
            simplex[2] = (reflect, fr);
        } else {
            let contract = clamp([
                centroid[0] + 0.5 * (worst.0[0] - centroid[0]),
                centroid[1] + 0.5 * (worst.0[1] - centroid[1]),
            ]);
            let fc = eval_u(&mut search, contract)?;
            if fc > worst.1 {
                simplex[2] = (contract, fc);
            } else {
                // Shrink toward the best vertex.
                for k in 1..3 {
                    let u = clamp([
                        0.5 * (simplex[k].0[0] + best.0[0]),
                        0.5 * (simplex[k].0[1] + best.0[1]),
                    ]);
                    let o = eval_u(&mut search, u)?;
                    simplex[k] = (u, o);
                }
            }
        }
    }

    Ok(search.finish())
}

/// One-parameter fit of the width with the chirp slope pinned to zero.
///
/// Coarse log-`sigma` grid, then golden-section refinement of `ln sigma`
/// on the bracket around the best grid cell.
pub fn optimize_real(f: &Signal, cfg: &ObjectiveConfig) -> Result<OptResult> {
    validate(f, cfg, false)?;
    if f.energy() == 0.0 {
        return Err(GaborError::ZeroSignal);
    }
    let sigmas = log_grid(cfg.sigma_range, cfg.grid.0);
    let mut search = Search::new(f, cfg);
    let mut best_idx = 0usize;
    let mut best_obj = f64::NEG_INFINITY;
    for (i, &sigma) in sigmas.iter().enumerate() {
        let o = search.eval(sigma, 0.0)?;
        if o > best_obj {
            best_obj = o;
            best_idx = i;
        }
    }

    let mut a = sigmas[best_idx.saturating_sub(1)].ln();
    let mut b = sigmas[(best_idx + 1).min(sigmas.len() - 1)].ln();
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    while b - a > cfg.refine_tol {
        let c = b - INV_PHI * (b - a);
        let d = a + INV_PHI * (b - a);
        let fc = search.eval(c.exp(), 0.0)?;
        let fd = search.eval(d.exp(), 0.0)?;
        if fc > fd {
            b = d;
        } else {
            a = c;
        }
    }

    Ok(search.finish())
}
