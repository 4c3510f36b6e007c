use crate::volume::ScanVolume;

/// Gaussian consistency constant for the median absolute deviation.
pub const MAD_SCALE: f64 = 0.6745;

/// Robust noise estimate from finest-scale Haar details along time:
/// `median(|x[2i] − x[2i+1]| / √2) / 0.6745` over every A-scan.
///
/// The median of an even count is the lower middle order statistic.
pub fn estimate_sigma_mad(vol: &ScanVolume) -> f64 {
    let pairs = vol.nt() / 2;
    if pairs == 0 {
        return 0.0;
    }
    let mut details: Vec<f64> = Vec::with_capacity(pairs * vol.nx() * vol.ny());
    for a in vol.ascans() {
        details.extend(a.chunks_exact(2).map(|p| {
            ((f64::from(p[0]) - f64::from(p[1])) * std::f64::consts::FRAC_1_SQRT_2).abs()
        }));
    }
    let mid = (details.len() - 1) / 2;
    let (_, median, _) = details.select_nth_unstable_by(mid, f64::total_cmp);
    *median / MAD_SCALE
}
