//! File formats: the ASV volume container, binary PGM for C-scans and CSV
//! for line profiles and time signals.
//!
//! ASV layout (little-endian):
//!
//! | offset | size          | content                                       |
//! |--------|---------------|-----------------------------------------------|
//! | 0      | 4             | magic `ASV1`                                  |
//! | 4      | 3 × u32       | nx, ny, nt                                    |
//! | 16     | 7 × f64       | sample rate, pitch x/y, center frequency, excitation, aperture, focal length |
//! | 72     | nx·ny·nt × f32 | samples, ix outer / iy middle / it inner     |

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::volume::{CScanImage, LineProfile, ScanMetadata, ScanVolume};

pub const ASV_MAGIC: &[u8; 4] = b"ASV1";
pub const ASV_HEADER_LEN: usize = 4 + 3 * 4 + 7 * 8;

pub fn write_asv(vol: &ScanVolume) -> Vec<u8> {
    let mut out = Vec::with_capacity(ASV_HEADER_LEN + vol.samples().len() * 4);
    out.extend_from_slice(ASV_MAGIC);
    for d in [vol.nx(), vol.ny(), vol.nt()] {
        let d = u32::try_from(d).expect("volume dimension exceeds u32");
        out.extend_from_slice(&d.to_le_bytes());
    }
    let m = vol.meta();
    for f in [
        m.sample_rate_hz,
        m.pitch_x_m,
        m.pitch_y_m,
        m.transducer_center_freq_hz,
        m.excitation_amplitude_v,
        m.aperture_m,
        m.focal_length_m,
    ] {
        out.extend_from_slice(&f.to_le_bytes());
    }
    for s in vol.samples() {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

pub fn read_asv(bytes: &[u8]) -> Result<ScanVolume> {
    if bytes.len() < 4 {
        return Err(Error::Truncated {
            needed: ASV_HEADER_LEN,
            got: bytes.len(),
        });
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if &magic != ASV_MAGIC {
        return Err(Error::Format(magic));
    }
    if bytes.len() < ASV_HEADER_LEN {
        return Err(Error::Truncated {
            needed: ASV_HEADER_LEN,
            got: bytes.len(),
        });
    }

    let u32_at = |off: usize| u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap()) as usize;
    let f64_at = |off: usize| f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());

    let (nx, ny, nt) = (u32_at(4), u32_at(8), u32_at(12));
    if nx == 0 || ny == 0 || nt == 0 {
        return Err(Error::InvalidHeader(format!(
            "zero dimension in {nx}x{ny}x{nt}"
        )));
    }
    let meta = ScanMetadata {
        sample_rate_hz: f64_at(16),
        pitch_x_m: f64_at(24),
        pitch_y_m: f64_at(32),
        transducer_center_freq_hz: f64_at(40),
        excitation_amplitude_v: f64_at(48),
        aperture_m: f64_at(56),
        focal_length_m: f64_at(64),
    };
    meta.validate()?;

    let count = nx
        .checked_mul(ny)
        .and_then(|v| v.checked_mul(nt))
        .ok_or_else(|| Error::InvalidHeader("dimensions overflow".into()))?;
    let needed = count
        .checked_mul(4)
        .and_then(|v| v.checked_add(ASV_HEADER_LEN))
        .ok_or_else(|| Error::InvalidHeader("dimensions overflow".into()))?;
    if bytes.len() < needed {
        return Err(Error::Truncated {
            needed,
            got: bytes.len(),
        });
    }
    if bytes.len() > needed {
        return Err(Error::InvalidHeader(format!(
            "{} trailing bytes after payload",
            bytes.len() - needed
        )));
    }
    let samples = bytes[ASV_HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    ScanVolume::new(nx, ny, nt, samples, meta)
}

/// Encodes a C-scan as a binary P5 graymap with per-image min-max scaling.
pub fn write_pgm(img: &CScanImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.nx(), img.ny());
    let mut out = Vec::with_capacity(header.len() + img.pixels().len());
    out.extend_from_slice(header.as_bytes());

    let (lo, hi) = img
        .pixels()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
            (lo.min(p), hi.max(p))
        });
    let range = hi - lo;
    out.extend(img.pixels().iter().map(|&p| {
        if range > 0.0 {
            // f64::round rounds half away from zero.
            (255.0 * (p - lo) / range).round().clamp(0.0, 255.0) as u8
        } else {
            0
        }
    }));
    out
}

pub fn write_profile_csv(profile: &LineProfile) -> String {
    let mut out = String::from("ix,amplitude_v\n");
    for (ix, v) in profile.values.iter().enumerate() {
        writeln!(out, "{ix},{v}").unwrap();
    }
    out
}

/// One row per pixel, `iy` outer: `ix,iy,amplitude_v`.
pub fn write_cscan_csv(img: &CScanImage) -> String {
    let mut out = String::from("ix,iy,amplitude_v\n");
    for iy in 0..img.ny() {
        for ix in 0..img.nx() {
            writeln!(out, "{ix},{iy},{}", img.pixel(ix, iy)).unwrap();
        }
    }
    out
}

/// Writes named time signals side by side, one row per sample:
/// `it,time_s,<name>,...`.
pub fn write_signals_csv(sample_rate_hz: f64, columns: &[(&str, &[f32])]) -> Result<String> {
    let len = columns.first().map_or(0, |(_, c)| c.len());
    if columns.iter().any(|(_, c)| c.len() != len) {
        return Err(Error::Shape("signal columns differ in length".into()));
    }
    let mut out = String::from("it,time_s");
    for (name, _) in columns {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for it in 0..len {
        write!(out, "{it},{}", it as f64 / sample_rate_hz).unwrap();
        for (_, c) in columns {
            write!(out, ",{}", c[it]).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}
