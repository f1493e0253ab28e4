//! Chirped Gaussian analysis windows on the cyclic group of order `N`.
//!
//! A window is parametrised by a width `sigma` (relative to the signal
//! length) and a chirp slope `s` measured in frequency bins per sample. The
//! envelope is a periodised Gaussian sampled on centered times, and the chirp
//! term tilts the window's time-frequency concentration along the line
//! `xi = s * t`.

use num_complex::Complex64;

use crate::error::{GaborError, Result};

/// Width and chirp slope of a Gaussian window.
///
/// `sigma` is dimensionless: the envelope is `exp(-pi t^2 / (N sigma))`, so
/// `sigma = 1` gives a window whose time and frequency spreads match (in
/// units of samples and bins). `s` is the chirp slope in bins per sample;
/// `s = 0` is an ordinary real Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WindowParams {
    pub sigma: f64,
    pub s: f64,
}

impl WindowParams {
    pub fn new(sigma: f64, s: f64) -> Self {
        Self { sigma, s }
    }
}

/// A unit-energy window vector of length `N` together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GaborWindow {
    values: Vec<Complex64>,
    params: WindowParams,
}

impl GaborWindow {
    /// Wraps precomputed values without validation; lets tests probe
    /// transforms with hand-built window vectors.
    #[cfg(test)]
    pub(crate) fn from_raw(values: Vec<Complex64>, params: WindowParams) -> Self {
        Self { values, params }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn params(&self) -> WindowParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Centered time coordinate: indices below `ceil(N/2)` map to themselves,
/// the rest wrap to negative times `n - N`.
pub(crate) fn centered_time(n: usize, len: usize) -> f64 {
    if n < len.div_ceil(2) {
        n as f64
    } else {
        n as f64 - len as f64
    }
}

/// Builds the unit-energy chirped Gaussian window of length `n`.
///
/// The unnormalised samples are
/// `(2/(n sigma))^{1/4} exp(-pi t^2/(n sigma)) exp(i pi s t^2 (n+1)/n^2)`
/// on centered times `t`, renormalised to exact unit energy. The `(n+1)/n^2`
/// factor makes `s` the slope of the window's time-frequency ridge in bins
/// per sample on the discrete grid.
pub fn synth_window(params: WindowParams, n: usize) -> Result<GaborWindow> {
    if n < 2 {
        return Err(GaborError::SignalTooShort(n));
    }
    if !(params.sigma.is_finite() && params.sigma > 0.0) || !params.s.is_finite() {
        return Err(GaborError::InvalidWindowParams {
            sigma: params.sigma,
            s: params.s,
        });
    }
    let nf = n as f64;
    let amp = (2.0 / (nf * params.sigma)).powf(0.25);
    let chirp_rate = std::f64::consts::PI * params.s * (nf + 1.0) / (nf * nf);
    let mut values: Vec<Complex64> = (0..n)
        .map(|i| {
            let t = centered_time(i, n);
            let envelope = amp * (-std::f64::consts::PI * t * t / (nf * params.sigma)).exp();
            let phase = chirp_rate * t * t;
            Complex64::from_polar(envelope, phase)
        })
        .collect();
    let norm: f64 = values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(GaborError::InvalidWindowParams {
            sigma: params.sigma,
            s: params.s,
        });
    }
    for z in &mut values {
        *z /= norm;
    }
    Ok(GaborWindow { values, params })
}

/// Window parameters per analysis frame: entry `j` applies to the `j`-th
/// distinct time shift of the lattice (ascending order).
///
/// A constant track reduces the frame-varying transform to the ordinary one;
/// tracks produced by segmented optimization interpolate between per-part
/// optima.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FramewiseWindowTrack {
    params: Vec<WindowParams>,
}

impl FramewiseWindowTrack {
    pub fn new(params: Vec<WindowParams>) -> Self {
        Self { params }
    }

    /// The same parameters for every one of `len` frames.
    pub fn constant(params: WindowParams, len: usize) -> Self {
        Self {
            params: vec![params; len],
        }
    }

    pub fn params(&self) -> &[WindowParams] {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(z: Complex64, re: f64, im: f64) -> bool {
        (z.re - re).abs() < 1e-12 && (z.im - im).abs() < 1e-12
    }

    #[test]
    fn matches_direct_evaluation() {
        // Values computed independently from the closed form (N=16, sigma=1,
        // s=0.3), frozen here.
        let g = synth_window(WindowParams::new(1.0, 0.3), 16).unwrap();
        let v = g.values();
        assert!(close(v[0], 0.594603557495411, 0.0));
        assert!(close(v[1], 0.487643956879547, 0.030559799557461));
        assert!(close(v[2], 0.262651314621088, 0.067162608497949));
        assert!(close(v[15], 0.487643956879547, 0.030559799557461));

        let g = synth_window(WindowParams::new(0.25, 0.0), 144).unwrap();
        let v = g.values();
        assert!(close(v[0], 0.485491771707323, 0.0));
        assert!(close(v[1], 0.444920616741658, 0.0));
        assert!(close(v[5], 0.054789620797797, 0.0));
        assert!(close(v[143], 0.444920616741658, 0.0));

        let g = synth_window(WindowParams::new(0.5, -0.7), 17).unwrap();
        let v = g.values();
        assert!(close(v[0], 0.696469459157413, 0.0));
        assert!(close(v[3], 0.008298050207924, -0.023602710617311));
        assert!(close(v[16], 0.476760879398506, -0.065712956051726));
    }

    #[test]
    fn zero_slope_window_is_real_and_even() {
        let g = synth_window(WindowParams::new(0.7, 0.0), 32).unwrap();
        let v = g.values();
        for z in v {
            assert!(z.im.abs() < 1e-15);
            assert!(z.re > 0.0);
        }
        for k in 1..32 {
            assert!((v[k].re - v[32 - k].re).abs() < 1e-15);
        }
    }

    #[test]
    fn narrower_sigma_decays_faster() {
        let wide = synth_window(WindowParams::new(1.0, 0.0), 64).unwrap();
        let narrow = synth_window(WindowParams::new(0.25, 0.0), 64).unwrap();
        // Energy within +-4 samples of the origin.
        let near = |g: &GaborWindow| -> f64 {
            (0..64)
                .filter(|&i| centered_time(i, 64).abs() <= 4.0)
                .map(|i| g.values()[i].norm_sqr())
                .sum()
        };
        assert!(near(&narrow) > near(&wide));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(synth_window(WindowParams::new(0.0, 0.0), 16).is_err());
        assert!(synth_window(WindowParams::new(-1.0, 0.0), 16).is_err());
        assert!(synth_window(WindowParams::new(f64::NAN, 0.0), 16).is_err());
        assert!(synth_window(WindowParams::new(1.0, f64::INFINITY), 16).is_err());
        assert!(synth_window(WindowParams::new(1.0, 0.0), 1).is_err());
    }

    proptest! {
        #[test]
        fn unit_energy(lsig in -3.0f64..3.0, s in -1.0f64..1.0, n in 2usize..200) {
            let g = synth_window(WindowParams::new(lsig.exp(), s), n).unwrap();
            let e: f64 = g.values().iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((e - 1.0).abs() < 1e-12);
        }

        #[test]
        fn chirp_preserves_magnitudes(lsig in -2.0f64..2.0, s in -1.0f64..1.0, n in 2usize..120) {
            let flat = synth_window(WindowParams::new(lsig.exp(), 0.0), n).unwrap();
            let tilted = synth_window(WindowParams::new(lsig.exp(), s), n).unwrap();
            for (a, b) in flat.values().iter().zip(tilted.values()) {
                prop_assert!((a.norm() - b.norm()).abs() < 1e-12);
            }
        }
    }
}
