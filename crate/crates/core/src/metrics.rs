//! Full-reference quality metrics against synthetic ground truth.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::volume::{CScanImage, ScanVolume};

/// SSIM window edge length.
pub const SSIM_WINDOW: usize = 8;

/// Anything the element-wise metrics can compare.
pub trait Samples {
    fn shape(&self) -> Vec<usize>;
    fn values(&self) -> Box<dyn Iterator<Item = f64> + '_>;
}

impl Samples for ScanVolume {
    fn shape(&self) -> Vec<usize> {
        vec![self.nx(), self.ny(), self.nt()]
    }

    fn values(&self) -> Box<dyn Iterator<Item = f64> + '_> {
        Box::new(self.samples().iter().map(|&s| f64::from(s)))
    }
}

impl Samples for CScanImage {
    fn shape(&self) -> Vec<usize> {
        vec![self.nx(), self.ny()]
    }

    fn values(&self) -> Box<dyn Iterator<Item = f64> + '_> {
        Box::new(self.pixels().iter().copied())
    }
}

impl Samples for [f64] {
    fn shape(&self) -> Vec<usize> {
        vec![self.len()]
    }

    fn values(&self) -> Box<dyn Iterator<Item = f64> + '_> {
        Box::new(self.iter().copied())
    }
}

fn check_shapes<A: Samples + ?Sized>(a: &A, b: &A) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::Shape(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    Ok(())
}

pub fn mse<A: Samples + ?Sized>(a: &A, b: &A) -> Result<f64> {
    check_shapes(a, b)?;
    let (sum, n) = a
        .values()
        .zip(b.values())
        .fold((0.0, 0usize), |(s, n), (x, y)| {
            (s + (x - y) * (x - y), n + 1)
        });
    Ok(if n == 0 { 0.0 } else { sum / n as f64 })
}

/// `10 log10(peak² / mse)` in dB; infinite for identical inputs.
pub fn psnr_db<A: Samples + ?Sized>(reference: &A, test: &A, peak: f64) -> Result<f64> {
    if !(peak.is_finite() && peak > 0.0) {
        return Err(Error::Param(format!("peak must be positive, got {peak}")));
    }
    Ok(psnr_from_mse(mse(reference, test)?, peak))
}

pub fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

/// Mean SSIM over every 8×8 window at stride 1, with uniform weights and
/// the dynamic range taken from the data.
pub fn ssim_2d(a: &CScanImage, b: &CScanImage) -> Result<f64> {
    check_shapes(a, b)?;
    let (nx, ny) = (a.nx(), a.ny());
    if nx < SSIM_WINDOW || ny < SSIM_WINDOW {
        return Err(Error::Param(format!(
            "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {nx}x{ny}"
        )));
    }
    let peak = |img: &CScanImage| img.pixels().iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let l = peak(a).max(peak(b));
    if l == 0.0 {
        return Ok(1.0);
    }
    Ok(ssim_windows(nx, ny, a.pixels(), b.pixels(), l))
}

/// SSIM over raw row-major (`iy * nx + ix`) buffers, which may be signed.
pub(crate) fn ssim_windows(nx: usize, ny: usize, a: &[f64], b: &[f64], l: f64) -> f64 {
    let c1 = (0.01 * l).powi(2);
    let c2 = (0.03 * l).powi(2);
    let n = (SSIM_WINDOW * SSIM_WINDOW) as f64;
    let mut total = 0.0;
    let mut count = 0usize;
    for y0 in 0..=ny - SSIM_WINDOW {
        for x0 in 0..=nx - SSIM_WINDOW {
            let (mut sa, mut sb) = (0.0, 0.0);
            for y in y0..y0 + SSIM_WINDOW {
                for x in x0..x0 + SSIM_WINDOW {
                    sa += a[y * nx + x];
                    sb += b[y * nx + x];
                }
            }
            let (ma, mb) = (sa / n, sb / n);
            let (mut va, mut vb, mut cov) = (0.0, 0.0, 0.0);
            for y in y0..y0 + SSIM_WINDOW {
                for x in x0..x0 + SSIM_WINDOW {
                    let da = a[y * nx + x] - ma;
                    let db = b[y * nx + x] - mb;
                    va += da * da;
                    vb += db * db;
                    cov += da * db;
                }
            }
            let (va, vb, cov) = (va / n, vb / n, cov / n);
            total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
                / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            count += 1;
        }
    }
    total / count as f64
}

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub mse: f64,
    pub psnr_db: f64,
    pub ssim: f64,
    pub sigma_est_v: f64,
}

impl MetricsReport {
    /// Volume-level MSE/PSNR, SSIM on the gated C-scans, and the MAD noise
    /// estimate of `test`. `peak` defaults to `max |reference|`.
    pub fn compute(
        reference: &ScanVolume,
        test: &ScanVolume,
        gate: std::ops::Range<usize>,
        peak: Option<f64>,
    ) -> Result<Self> {
        let mse = mse(reference, test)?;
        let peak = match peak {
            Some(p) => p,
            None => reference.max_abs(),
        };
        let psnr_db = if peak > 0.0 {
            psnr_from_mse(mse, peak)
        } else if mse == 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        let ssim = ssim_2d(&reference.cscan(gate.clone())?, &test.cscan(gate)?)?;
        Ok(Self {
            mse,
            psnr_db,
            ssim,
            sigma_est_v: crate::bm4d::estimate_sigma_mad(test),
        })
    }
}

pub const METRICS_CSV_HEADER: &str = "filter,psnr_db,mse,ssim,sigma_est_v,runtime_ms";

fn fmt_real(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

/// `filter,psnr_db,mse,ssim,sigma_est_v,runtime_ms` row without a newline.
pub fn metrics_csv_row(filter: &str, report: &MetricsReport, runtime_ms: f64) -> String {
    let mut out = String::new();
    write!(
        out,
        "{filter},{},{},{},{},{}",
        fmt_real(report.psnr_db),
        fmt_real(report.mse),
        fmt_real(report.ssim),
        fmt_real(report.sigma_est_v),
        fmt_real(runtime_ms)
    )
    .unwrap();
    out
}

/// Parses a metrics CSV back into `(filter, report, runtime_ms)` rows.
pub fn parse_metrics_csv(text: &str) -> Result<Vec<(String, MetricsReport, f64)>> {
    let mut lines = text.lines();
    if lines.next() != Some(METRICS_CSV_HEADER) {
        return Err(Error::Param("metrics CSV header mismatch".into()));
    }
    let real = |s: &str| -> Result<f64> {
        match s {
            "inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            _ => s
                .parse()
                .map_err(|_| Error::Param(format!("bad number {s:?} in metrics CSV"))),
        }
    };
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(Error::Param(format!("bad metrics row {line:?}")));
            }
            Ok((
                f[0].to_string(),
                MetricsReport {
                    psnr_db: real(f[1])?,
                    mse: real(f[2])?,
                    ssim: real(f[3])?,
                    sigma_est_v: real(f[4])?,
                },
                real(f[5])?,
            ))
        })
        .collect()
}
