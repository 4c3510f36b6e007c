//! Baseline denoisers applied along the time axis of every A-scan.
//!
//! Each filter reads one A-scan at a time and never looks across scan
//! positions, so volumes are processed in parallel with schedule-independent
//! results. Boundaries replicate the edge sample.

mod gaussian;
mod median;
mod tv;
mod wiener;

pub use gaussian::{gaussian_1d, gaussian_kernel, gaussian_signal};
pub use median::{median_1d, median_signal};
pub use tv::{rof_objective, tv_denoise_1d, tv_denoise_signal, Rof1d, TvOutcome};
pub use wiener::{auto_noise_var, wiener_adaptive_1d, wiener_signal, NoiseVar};

use rayon::prelude::*;

use crate::error::{param, Result};
use crate::volume::ScanVolume;

/// Parameters for the four time-axis baselines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams1D {
    pub gaussian_sigma_samples: f64,
    pub median_window: usize,
    pub wiener_window: usize,
    pub wiener_noise_var: NoiseVar,
    /// `None` selects 0.1 × the input's maximum absolute amplitude.
    pub tv_lambda: Option<f64>,
    pub tv_max_iter: usize,
    pub tv_tol: f64,
}

impl Default for FilterParams1D {
    fn default() -> Self {
        Self {
            gaussian_sigma_samples: 2.0,
            median_window: 5,
            wiener_window: 7,
            wiener_noise_var: NoiseVar::Auto,
            tv_lambda: None,
            tv_max_iter: 500,
            tv_tol: 1e-6,
        }
    }
}

impl FilterParams1D {
    pub fn tv_lambda_for(&self, vol: &ScanVolume) -> f64 {
        self.tv_lambda.unwrap_or_else(|| default_tv_lambda(vol))
    }
}

pub fn default_tv_lambda(vol: &ScanVolume) -> f64 {
    0.1 * vol.max_abs()
}

pub(crate) fn check_window(window: usize, nt: usize) -> Result<()> {
    if window == 0 || window.is_multiple_of(2) {
        return param(format!("window must be odd and positive, got {window}"));
    }
    if window > nt {
        return param(format!("window {window} exceeds {nt} time samples"));
    }
    Ok(())
}

#[inline]
pub(crate) fn clamped(signal: &[f64], i: isize) -> f64 {
    signal[i.clamp(0, signal.len() as isize - 1) as usize]
}

/// Runs `f` on every A-scan (widened to f64) in parallel.
pub(crate) fn map_ascans<F>(vol: &ScanVolume, f: F) -> ScanVolume
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let nt = vol.nt();
    let mut out = vec![0.0f32; vol.samples().len()];
    out.par_chunks_mut(nt)
        .zip(vol.samples().par_chunks(nt))
        .for_each_init(
            || (vec![0.0f64; nt], vec![0.0f64; nt]),
            |(input, output), (dst, src)| {
                for (a, &b) in input.iter_mut().zip(src) {
                    *a = f64::from(b);
                }
                f(input, output);
                for (a, &b) in dst.iter_mut().zip(output.iter()) {
                    *a = b as f32;
                }
            },
        );
    vol.with_samples(out)
}
