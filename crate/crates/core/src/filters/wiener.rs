use rayon::prelude::*;

use crate::error::{param, Result};
use crate::volume::ScanVolume;

use super::{check_window, clamped, map_ascans};

/// Noise power for the adaptive Wiener filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseVar {
    /// Mean of every local variance in the volume.
    Auto,
    Fixed(f64),
}

/// Local mean and (1/n) variance over the clamped window at `i`.
#[inline]
fn local_stats(x: &[f64], i: usize, window: usize) -> (f64, f64) {
    let half = (window / 2) as isize;
    let n = window as f64;
    let values = (0..window as isize).map(|k| clamped(x, i as isize + k - half));
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var)
}

fn wiener_into(x: &[f64], window: usize, noise_var: f64, out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let (mean, var) = local_stats(x, i, window);
        // gain = max(v - nv, 0) / max(v, nv), written as 1 - nv / v when
        // v > nv so a zero noise power reproduces x exactly.
        *o = if var <= noise_var {
            mean
        } else {
            x[i] - (noise_var / var) * (x[i] - mean)
        };
    }
}

pub fn wiener_signal(x: &[f64], window: usize, noise_var: f64) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    wiener_into(x, window, noise_var, &mut out);
    out
}

/// The mean of all per-position local variances across the volume.
pub fn auto_noise_var(vol: &ScanVolume, window: usize) -> Result<f64> {
    check_window(window, vol.nt())?;
    let nt = vol.nt();
    let total: f64 = vol
        .samples()
        .par_chunks(nt)
        .map(|a| {
            let x: Vec<f64> = a.iter().map(|&s| f64::from(s)).collect();
            (0..nt).map(|i| local_stats(&x, i, window).1).sum::<f64>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(total / vol.samples().len() as f64)
}

pub fn wiener_adaptive_1d(
    vol: &ScanVolume,
    window: usize,
    noise_var: NoiseVar,
) -> Result<ScanVolume> {
    check_window(window, vol.nt())?;
    let nv = match noise_var {
        NoiseVar::Auto => auto_noise_var(vol, window)?,
        NoiseVar::Fixed(v) if v.is_finite() && v >= 0.0 => v,
        NoiseVar::Fixed(v) => return param(format!("noise variance must be nonnegative, got {v}")),
    };
    Ok(map_ascans(vol, |x, out| wiener_into(x, window, nv, out)))
}
