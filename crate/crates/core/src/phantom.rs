//! Synthetic ground truth: reflector maps rendered as Gabor echoes, plus
//! reproducible additive white Gaussian noise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::GaussianRng;
use crate::volume::{ScanMetadata, ScanVolume};

/// Gaussian-enveloped cosine echo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub center_freq_hz: f64,
    pub envelope_sigma_s: f64,
    #[serde(default)]
    pub phase_rad: f64,
}

impl Default for PulseSpec {
    fn default() -> Self {
        Self {
            center_freq_hz: 50e6,
            envelope_sigma_s: 30e-9,
            phase_rad: 0.0,
        }
    }
}

impl PulseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.center_freq_hz.is_finite() && self.center_freq_hz > 0.0) {
            return Err(Error::Spec("pulse center_freq_hz must be positive".into()));
        }
        if !(self.envelope_sigma_s.is_finite() && self.envelope_sigma_s > 0.0) {
            return Err(Error::Spec(
                "pulse envelope_sigma_s must be positive".into(),
            ));
        }
        if !self.phase_rad.is_finite() {
            return Err(Error::Spec("pulse phase_rad must be finite".into()));
        }
        Ok(())
    }
}

/// `amp · exp(−(t−τ)²/(2σ²)) · cos(2π f₀ (t−τ) + φ)`.
pub fn gabor_pulse(t: f64, tau: f64, amp: f64, pulse: &PulseSpec) -> f64 {
    let dt = t - tau;
    let s = pulse.envelope_sigma_s;
    amp * (-dt * dt / (2.0 * s * s)).exp()
        * (2.0 * std::f64::consts::PI * pulse.center_freq_hz * dt + pulse.phase_rad).cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReflectorShape {
    Disk,
    Ring,
}

/// A flat reflecting feature in the scan plane. Coordinates are grid units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reflector {
    pub shape: ReflectorShape,
    pub center_x: f64,
    pub center_y: f64,
    pub radius: f64,
    /// Only meaningful for rings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_radius: Option<f64>,
    pub reflectivity: f64,
    pub delay_s: f64,
}

impl Reflector {
    pub fn disk(cx: f64, cy: f64, radius: f64, reflectivity: f64, delay_s: f64) -> Self {
        Self {
            shape: ReflectorShape::Disk,
            center_x: cx,
            center_y: cy,
            radius,
            inner_radius: None,
            reflectivity,
            delay_s,
        }
    }

    pub fn ring(
        cx: f64,
        cy: f64,
        inner_radius: f64,
        radius: f64,
        reflectivity: f64,
        delay_s: f64,
    ) -> Self {
        Self {
            shape: ReflectorShape::Ring,
            center_x: cx,
            center_y: cy,
            radius,
            inner_radius: Some(inner_radius),
            reflectivity,
            delay_s,
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let d = (x - self.center_x).hypot(y - self.center_y);
        match self.shape {
            ReflectorShape::Disk => d <= self.radius,
            ReflectorShape::Ring => d <= self.radius && d >= self.inner_radius.unwrap_or(0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = [
            self.center_x,
            self.center_y,
            self.radius,
            self.reflectivity,
            self.delay_s,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Spec("reflector fields must be finite".into()));
        }
        if self.radius <= 0.0 {
            return Err(Error::Spec("reflector radius must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.reflectivity) {
            return Err(Error::Spec("reflectivity must lie in [0, 1]".into()));
        }
        if self.shape == ReflectorShape::Ring {
            match self.inner_radius {
                Some(r) if r.is_finite() && r > 0.0 && r < self.radius => {}
                _ => return Err(Error::Spec("ring needs 0 < inner_radius < radius".into())),
            }
        }
        Ok(())
    }
}

/// Declarative description of a synthetic scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    pub nx: usize,
    pub ny: usize,
    pub nt: usize,
    pub sample_rate_hz: f64,
    #[serde(default)]
    pub pulse: PulseSpec,
    #[serde(default)]
    pub reflectors: Vec<Reflector>,
    #[serde(default)]
    pub background_reflectivity: f64,
    #[serde(default)]
    pub background_delay_s: f64,
}

pub const COIN64_DELAY_S: f64 = 400e-9;

impl PhantomSpec {
    /// The `coin64` preset: a 64×64×256 coin-like target with an outer disk,
    /// a bright ring and a dim center boss, all echoing at 400 ns.
    pub fn coin64() -> Self {
        Self::coin(64, 64, 256)
    }

    /// The coin layout scaled to an arbitrary grid. Radii scale with the
    /// smaller lateral dimension; `coin(64, 64, 256)` is the preset exactly.
    pub fn coin(nx: usize, ny: usize, nt: usize) -> Self {
        let cx = (nx as f64 - 1.0) / 2.0;
        let cy = (ny as f64 - 1.0) / 2.0;
        let k = nx.min(ny) as f64 / 64.0;
        let d = COIN64_DELAY_S;
        Self {
            nx,
            ny,
            nt,
            sample_rate_hz: 250e6,
            pulse: PulseSpec::default(),
            reflectors: vec![
                Reflector::disk(cx, cy, 30.0 * k, 0.5, d),
                Reflector::ring(cx, cy, 18.0 * k, 24.0 * k, 0.9, d),
                Reflector::disk(cx, cy, 8.0 * k, 0.2, d),
            ],
            background_reflectivity: 0.0,
            background_delay_s: d,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 || self.nt == 0 {
            return Err(Error::Spec(format!(
                "dimensions must be positive, got {}x{}x{}",
                self.nx, self.ny, self.nt
            )));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::Spec("sample_rate_hz must be positive".into()));
        }
        self.pulse.validate()?;
        if !(0.0..=1.0).contains(&self.background_reflectivity) {
            return Err(Error::Spec(
                "background_reflectivity must lie in [0, 1]".into(),
            ));
        }
        let window = self.nt as f64 / self.sample_rate_hz;
        let delays = self
            .reflectors
            .iter()
            .map(|r| r.delay_s)
            .chain(std::iter::once(self.background_delay_s));
        for delay in delays {
            if !(delay.is_finite() && delay >= 0.0 && delay < window) {
                return Err(Error::Spec(format!(
                    "delay {delay} s outside the time window [0, {window})"
                )));
            }
        }
        for r in &self.reflectors {
            r.validate()?;
        }
        Ok(())
    }

    /// Reflectivity and delay at a grid point; the last listed reflector
    /// containing the point wins.
    pub fn reflector_at(&self, ix: usize, iy: usize) -> (f64, f64) {
        self.reflectors
            .iter()
            .rev()
            .find(|r| r.contains(ix as f64, iy as f64))
            .map_or(
                (self.background_reflectivity, self.background_delay_s),
                |r| (r.reflectivity, r.delay_s),
            )
    }
}

pub fn render_phantom(spec: &PhantomSpec) -> Result<ScanVolume> {
    spec.validate()?;
    let meta = ScanMetadata {
        sample_rate_hz: spec.sample_rate_hz,
        transducer_center_freq_hz: spec.pulse.center_freq_hz,
        ..ScanMetadata::default()
    };
    let fs = spec.sample_rate_hz;
    let mut samples = Vec::with_capacity(spec.nx * spec.ny * spec.nt);
    for ix in 0..spec.nx {
        for iy in 0..spec.ny {
            let (r, tau) = spec.reflector_at(ix, iy);
            samples.extend(
                (0..spec.nt).map(|it| gabor_pulse(it as f64 / fs, tau, r, &spec.pulse) as f32),
            );
        }
    }
    ScanVolume::new(spec.nx, spec.ny, spec.nt, samples, meta)
}

/// The noise realization `add_awgn` would add to a volume of `len` samples.
pub fn noise_field(len: usize, sigma_v: f64, seed: u64) -> Vec<f64> {
    let mut rng = GaussianRng::new(seed);
    (0..len).map(|_| sigma_v * rng.next_normal()).collect()
}

/// Adds white Gaussian noise of standard deviation `sigma_v`, drawn in flat
/// payload order from the seeded generator.
pub fn add_awgn(vol: &ScanVolume, sigma_v: f64, seed: u64) -> Result<ScanVolume> {
    if !(sigma_v.is_finite() && sigma_v >= 0.0) {
        return Err(Error::Param(format!(
            "noise sigma must be finite and nonnegative, got {sigma_v}"
        )));
    }
    if sigma_v == 0.0 {
        return Ok(vol.clone());
    }
    let noise = noise_field(vol.samples().len(), sigma_v, seed);
    let samples = vol
        .samples()
        .iter()
        .zip(&noise)
        .map(|(&s, &n)| (f64::from(s) + n) as f32)
        .collect();
    ScanVolume::new(vol.nx(), vol.ny(), vol.nt(), samples, *vol.meta())
}
