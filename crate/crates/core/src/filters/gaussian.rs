use crate::error::{param, Result};
use crate::volume::ScanVolume;

use super::{clamped, map_ascans};

/// Sampled Gaussian over `[-⌈4σ⌉, ⌈4σ⌉]`, renormalized to unit sum.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (4.0 * sigma).ceil() as isize;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|j| (-((j * j) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

pub fn gaussian_signal(x: &[f64], sigma: f64) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    convolve_into(x, &gaussian_kernel(sigma), &mut out);
    out
}

fn convolve_into(x: &[f64], kernel: &[f64], out: &mut [f64]) {
    let radius = (kernel.len() / 2) as isize;
    for (i, o) in out.iter_mut().enumerate() {
        *o = kernel
            .iter()
            .enumerate()
            .map(|(k, w)| w * clamped(x, i as isize + k as isize - radius))
            .sum();
    }
}

pub fn gaussian_1d(vol: &ScanVolume, sigma_samples: f64) -> Result<ScanVolume> {
    if !(sigma_samples.is_finite() && sigma_samples > 0.0) {
        return param(format!(
            "gaussian sigma must be positive, got {sigma_samples}"
        ));
    }
    let kernel = gaussian_kernel(sigma_samples);
    Ok(map_ascans(vol, |x, out| convolve_into(x, &kernel, out)))
}
