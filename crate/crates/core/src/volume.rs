//! The scan volume data model and the C-scan / line-profile extractors.
//!
//! A volume holds `nx * ny * nt` single-precision samples in ix-outer,
//! iy-middle, it-inner order, so every A-scan is a contiguous slice.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Acquisition metadata carried alongside the samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanMetadata {
    pub sample_rate_hz: f64,
    pub pitch_x_m: f64,
    pub pitch_y_m: f64,
    pub transducer_center_freq_hz: f64,
    pub excitation_amplitude_v: f64,
    pub aperture_m: f64,
    pub focal_length_m: f64,
}

impl Default for ScanMetadata {
    /// The 50 MHz focused transducer (6.35 mm aperture, 12 mm focal length)
    /// driven at 0.21 V, sampled at 250 MHz on a 10 µm grid.
    fn default() -> Self {
        Self {
            sample_rate_hz: 250e6,
            pitch_x_m: 1e-5,
            pitch_y_m: 1e-5,
            transducer_center_freq_hz: 50e6,
            excitation_amplitude_v: 0.21,
            aperture_m: 6.35e-3,
            focal_length_m: 12e-3,
        }
    }
}

impl ScanMetadata {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("sample_rate_hz", self.sample_rate_hz),
            ("pitch_x_m", self.pitch_x_m),
            ("pitch_y_m", self.pitch_y_m),
            ("transducer_center_freq_hz", self.transducer_center_freq_hz),
            ("excitation_amplitude_v", self.excitation_amplitude_v),
            ("aperture_m", self.aperture_m),
            ("focal_length_m", self.focal_length_m),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidHeader(format!("{name} is not finite")));
            }
        }
        for (name, v) in &fields[..4] {
            if *v <= 0.0 {
                return Err(Error::InvalidHeader(format!("{name} must be positive")));
            }
        }
        for (name, v) in &fields[4..] {
            if *v < 0.0 {
                return Err(Error::InvalidHeader(format!("{name} must be nonnegative")));
            }
        }
        Ok(())
    }
}

/// An x × y × time amplitude volume in volts.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanVolume {
    nx: usize,
    ny: usize,
    nt: usize,
    samples: Vec<f32>,
    meta: ScanMetadata,
}

impl ScanVolume {
    /// Builds a volume, checking the sample count, finiteness and metadata.
    pub fn new(
        nx: usize,
        ny: usize,
        nt: usize,
        samples: Vec<f32>,
        meta: ScanMetadata,
    ) -> Result<Self> {
        if nx == 0 || ny == 0 || nt == 0 {
            return Err(Error::InvalidHeader(format!(
                "zero dimension in {nx}x{ny}x{nt}"
            )));
        }
        let expected = nx
            .checked_mul(ny)
            .and_then(|v| v.checked_mul(nt))
            .ok_or_else(|| Error::InvalidHeader("dimensions overflow".into()))?;
        if samples.len() != expected {
            return Err(Error::Shape(format!(
                "{} samples for a {nx}x{ny}x{nt} volume",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Param(format!("sample {i} is not finite")));
        }
        meta.validate()?;
        Ok(Self {
            nx,
            ny,
            nt,
            samples,
            meta,
        })
    }

    pub fn zeros(nx: usize, ny: usize, nt: usize, meta: ScanMetadata) -> Result<Self> {
        Self::new(nx, ny, nt, vec![0.0; nx * ny * nt], meta)
    }

    /// Builds a volume by evaluating `f(ix, iy, it)` at every voxel.
    pub fn from_fn(
        nx: usize,
        ny: usize,
        nt: usize,
        meta: ScanMetadata,
        mut f: impl FnMut(usize, usize, usize) -> f32,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(nx * ny * nt);
        for ix in 0..nx {
            for iy in 0..ny {
                for it in 0..nt {
                    samples.push(f(ix, iy, it));
                }
            }
        }
        Self::new(nx, ny, nt, samples, meta)
    }

    /// Same shape and metadata, new samples. Used by filters whose output is
    /// finite by construction.
    pub(crate) fn with_samples(&self, samples: Vec<f32>) -> Self {
        debug_assert_eq!(samples.len(), self.samples.len());
        debug_assert!(samples.iter().all(|s| s.is_finite()));
        Self {
            samples,
            ..self.clone()
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.nx, self.ny, self.nt)
    }

    pub fn meta(&self) -> &ScanMetadata {
        &self.meta
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f32> {
        self.samples
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, it: usize) -> usize {
        (ix * self.ny + iy) * self.nt + it
    }

    #[inline]
    pub fn sample(&self, ix: usize, iy: usize, it: usize) -> f32 {
        self.samples[self.index(ix, iy, it)]
    }

    /// The time signal recorded at scan position `(ix, iy)`.
    pub fn ascan(&self, ix: usize, iy: usize) -> &[f32] {
        let start = self.index(ix, iy, 0);
        &self.samples[start..start + self.nt]
    }

    pub fn ascans(&self) -> std::slice::ChunksExact<'_, f32> {
        self.samples.chunks_exact(self.nt)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples
            .iter()
            .fold(0.0f64, |m, &s| m.max(f64::from(s.abs())))
    }

    /// Samples widened to f64, the precision every filter works in.
    pub fn to_f64(&self) -> Vec<f64> {
        self.samples.iter().map(|&s| f64::from(s)).collect()
    }

    /// Narrows f64 results back to storage precision.
    pub(crate) fn narrowed_like(&self, data: &[f64]) -> Self {
        self.with_samples(data.iter().map(|&v| v as f32).collect())
    }

    pub fn same_shape(&self, other: &ScanVolume) -> bool {
        self.dims() == other.dims()
    }

    /// Extracts the C-scan over `gate`: the maximum absolute amplitude of
    /// each A-scan within the half-open sample interval.
    pub fn cscan(&self, gate: Range<usize>) -> Result<CScanImage> {
        extract_cscan(self, gate)
    }
}

/// A 2D amplitude map of a volume, indexed `pixel(ix, iy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CScanImage {
    nx: usize,
    ny: usize,
    /// Row-major with ix inner: `pixels[iy * nx + ix]`.
    pixels: Vec<f64>,
    gate: Range<usize>,
}

impl CScanImage {
    /// Builds an image from pixels laid out `iy * nx + ix`.
    pub fn new(nx: usize, ny: usize, pixels: Vec<f64>, gate: Range<usize>) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Shape(format!("zero dimension in {nx}x{ny} image")));
        }
        if pixels.len() != nx * ny {
            return Err(Error::Shape(format!(
                "{} pixels for a {nx}x{ny} image",
                pixels.len()
            )));
        }
        if gate.start >= gate.end {
            return Err(Error::Gate {
                t0: gate.start,
                t1: gate.end,
                nt: gate.end,
            });
        }
        if pixels.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::Param("pixels must be finite and nonnegative".into()));
        }
        Ok(Self {
            nx,
            ny,
            pixels,
            gate,
        })
    }

    pub fn from_fn(nx: usize, ny: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut pixels = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                pixels.push(f(ix, iy));
            }
        }
        Self::new(nx, ny, pixels, 0..1)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn gate(&self) -> Range<usize> {
        self.gate.clone()
    }

    #[inline]
    pub fn pixel(&self, ix: usize, iy: usize) -> f64 {
        self.pixels[iy * self.nx + ix]
    }

    /// Pixels in display order: rows top to bottom, ix inner.
    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn row(&self, iy: usize) -> &[f64] {
        &self.pixels[iy * self.nx..(iy + 1) * self.nx]
    }

    /// The row the CLI profiles by default.
    pub fn center_row(&self) -> usize {
        self.ny / 2
    }
}

/// One row of a C-scan.
#[derive(Debug, Clone, PartialEq)]
pub struct LineProfile {
    pub row: usize,
    pub values: Vec<f64>,
}

pub fn extract_cscan(vol: &ScanVolume, gate: Range<usize>) -> Result<CScanImage> {
    let nt = vol.nt();
    if gate.start >= gate.end || gate.end > nt {
        return Err(Error::Gate {
            t0: gate.start,
            t1: gate.end,
            nt,
        });
    }
    let (nx, ny) = (vol.nx(), vol.ny());
    let mut pixels = vec![0.0; nx * ny];
    for ix in 0..nx {
        for iy in 0..ny {
            let peak = vol.ascan(ix, iy)[gate.clone()]
                .iter()
                .fold(0.0f32, |m, s| m.max(s.abs()));
            pixels[iy * nx + ix] = f64::from(peak);
        }
    }
    Ok(CScanImage {
        nx,
        ny,
        pixels,
        gate,
    })
}

pub fn extract_line_profile(img: &CScanImage, row: usize) -> Result<LineProfile> {
    if row >= img.ny() {
        return Err(Error::Index {
            index: row,
            len: img.ny(),
        });
    }
    Ok(LineProfile {
        row,
        values: img.row(row).to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> ScanMetadata {
        ScanMetadata::default()
    }

    #[test]
    fn cscan_takes_max_abs() {
        let v = ScanVolume::new(1, 1, 3, vec![0.1, -0.5, 0.2], meta()).unwrap();
        let img = extract_cscan(&v, 0..3).unwrap();
        assert_eq!(img.pixel(0, 0), 0.5);
    }

    #[test]
    fn cscan_of_zeros_is_zero() {
        let v = ScanVolume::zeros(3, 2, 5, meta()).unwrap();
        let img = extract_cscan(&v, 1..4).unwrap();
        assert!(img.pixels().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn cscan_respects_gate() {
        let v = ScanVolume::new(1, 1, 4, vec![9.0, 1.0, -2.0, 7.0], meta()).unwrap();
        assert_eq!(extract_cscan(&v, 1..3).unwrap().pixel(0, 0), 2.0);
    }

    #[test]
    #[allow(clippy::reversed_empty_ranges)]
    fn bad_gates_are_rejected() {
        let v = ScanVolume::zeros(2, 2, 4, meta()).unwrap();
        assert!(matches!(extract_cscan(&v, 0..0), Err(Error::Gate { .. })));
        assert!(matches!(extract_cscan(&v, 3..2), Err(Error::Gate { .. })));
        assert!(matches!(extract_cscan(&v, 0..5), Err(Error::Gate { .. })));
        assert!(extract_cscan(&v, 0..4).is_ok());
    }

    #[test]
    fn line_profile_reads_one_row() {
        let img = CScanImage::from_fn(3, 3, |ix, iy| (ix + 10 * iy) as f64).unwrap();
        let p = extract_line_profile(&img, 1).unwrap();
        assert_eq!(p.values, vec![10.0, 11.0, 12.0]);
        assert_eq!(p.row, 1);
    }

    #[test]
    fn line_profile_of_constant_image() {
        let img = CScanImage::from_fn(4, 2, |_, _| 0.25).unwrap();
        assert_eq!(extract_line_profile(&img, 0).unwrap().values, vec![0.25; 4]);
    }

    #[test]
    fn line_profile_row_out_of_range() {
        let img = CScanImage::from_fn(3, 3, |_, _| 1.0).unwrap();
        assert_eq!(
            extract_line_profile(&img, 3),
            Err(Error::Index { index: 3, len: 3 })
        );
    }

    #[test]
    fn center_row_rounds_down() {
        let img = CScanImage::from_fn(2, 64, |_, _| 1.0).unwrap();
        assert_eq!(img.center_row(), 32);
        let img = CScanImage::from_fn(2, 5, |_, _| 1.0).unwrap();
        assert_eq!(img.center_row(), 2);
    }

    #[test]
    fn volume_rejects_bad_construction() {
        assert!(ScanVolume::new(0, 1, 1, vec![], meta()).is_err());
        assert!(ScanVolume::new(2, 1, 1, vec![0.0], meta()).is_err());
        assert!(ScanVolume::new(1, 1, 1, vec![f32::NAN], meta()).is_err());
        let bad = ScanMetadata {
            sample_rate_hz: 0.0,
            ..meta()
        };
        assert!(ScanVolume::new(1, 1, 1, vec![0.0], bad).is_err());
    }

    #[test]
    fn layout_is_time_inner() {
        let v = ScanVolume::from_fn(2, 3, 4, meta(), |ix, iy, it| {
            (100 * ix + 10 * iy + it) as f32
        })
        .unwrap();
        assert_eq!(v.ascan(1, 2), &[120.0, 121.0, 122.0, 123.0]);
        assert_eq!(v.samples()[4], 10.0);
    }
}
