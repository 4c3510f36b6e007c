//! Flag types shared by several subcommands.

use std::ops::Range;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sam_denoise::bm4d::{Aggregation, BMParams};
use sam_denoise::filters::FilterParams1D;

/// Denoising for scanning acoustic microscopy volumes.
#[derive(Debug, Parser)]
#[command(name = "sam-denoise", version, about)]
pub struct Cli {
    /// Worker threads; 1 runs everything on the calling thread.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a clean synthetic phantom.
    Synth(SynthArgs),
    /// Add white Gaussian noise to a volume.
    Noise(NoiseArgs),
    /// Run one denoiser on a volume.
    Denoise(DenoiseArgs),
    /// Export a gated max-amplitude C-scan.
    Cscan(CscanArgs),
    /// Export one row of a gated C-scan.
    Profile(ProfileArgs),
    /// Compare a volume against a reference.
    Metrics(MetricsArgs),
    /// Run every filter on a clean/noisy pair and export the comparison.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Coin64,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, conflicts_with = "spec")]
    pub preset: Option<Preset>,
    /// JSON phantom description.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Grid size for the scaled coin layout.
    #[arg(long, conflicts_with_all = ["preset", "spec"])]
    pub nx: Option<usize>,
    #[arg(long, conflicts_with_all = ["preset", "spec"])]
    pub ny: Option<usize>,
    #[arg(long, conflicts_with_all = ["preset", "spec"])]
    pub nt: Option<usize>,
    #[arg(long, conflicts_with = "spec")]
    pub sample_rate_hz: Option<f64>,
    #[arg(long, conflicts_with = "spec")]
    pub center_freq_hz: Option<f64>,
    #[arg(long, conflicts_with = "spec")]
    pub envelope_sigma_s: Option<f64>,
    #[arg(long, conflicts_with = "spec")]
    pub phase_rad: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Noise standard deviation in volts.
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: f64,
    /// Read `--sigma` as a fraction of the input's peak amplitude.
    #[arg(long)]
    pub relative: bool,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterKind {
    Bm4d,
    Hard,
    Wiener,
    Gaussian,
    Median,
    Tv,
}

impl FilterKind {
    pub fn name(self) -> &'static str {
        match self {
            FilterKind::Bm4d => "bm4d",
            FilterKind::Hard => "hard",
            FilterKind::Wiener => "wiener",
            FilterKind::Gaussian => "gaussian",
            FilterKind::Median => "median",
            FilterKind::Tv => "tv",
        }
    }
}

/// Noise level: a value in volts or `auto` for the MAD estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SigmaArg {
    #[default]
    Auto,
    Volts(f64),
}

pub fn parse_sigma(s: &str) -> Result<SigmaArg, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(SigmaArg::Auto);
    }
    let v: f64 = s
        .parse()
        .map_err(|_| format!("expected `auto` or a number, got {s:?}"))?;
    if !(v.is_finite() && v >= 0.0) {
        return Err(format!("sigma must be finite and nonnegative, got {v}"));
    }
    Ok(SigmaArg::Volts(v))
}

/// `AxBxC` in (x, y, t) order.
pub fn parse_triple(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split(['x', 'X', ',']).collect();
    if parts.len() != 3 {
        return Err(format!("expected XxYxT, got {s:?}"));
    }
    let mut out = [0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p
            .trim()
            .parse()
            .map_err(|_| format!("bad integer {p:?} in {s:?}"))?;
    }
    Ok(out)
}

/// `t0:t1`, half-open.
pub fn parse_gate(s: &str) -> Result<Range<usize>, String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected t0:t1, got {s:?}"))?;
    let t0 = a
        .trim()
        .parse()
        .map_err(|_| format!("bad gate start {a:?}"))?;
    let t1 = b
        .trim()
        .parse()
        .map_err(|_| format!("bad gate end {b:?}"))?;
    Ok(t0..t1)
}

/// `ix,iy`.
pub fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected ix,iy, got {s:?}"))?;
    let ix = a.trim().parse().map_err(|_| format!("bad ix {a:?}"))?;
    let iy = b.trim().parse().map_err(|_| format!("bad iy {b:?}"))?;
    Ok((ix, iy))
}

/// Parameters of every denoiser. Unset values keep the library defaults.
#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    /// Noise level in volts, or `auto`.
    #[arg(long, value_parser = parse_sigma, default_value = "auto")]
    pub sigma: SigmaArg,
    #[arg(long, value_parser = parse_triple)]
    pub block: Option<[usize; 3]>,
    #[arg(long, value_parser = parse_triple)]
    pub step: Option<[usize; 3]>,
    #[arg(long, value_parser = parse_triple)]
    pub search: Option<[usize; 3]>,
    #[arg(long)]
    pub max_group: Option<usize>,
    /// Matching threshold in units of σ².
    #[arg(long)]
    pub tau: Option<f64>,
    /// Hard threshold in units of σ.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Aggregate into N private buffers instead of the ordered pass.
    #[arg(long)]
    pub partitions: Option<usize>,
    /// Median or Wiener window length in samples.
    #[arg(long)]
    pub window: Option<usize>,
    /// Gaussian width in samples.
    #[arg(long)]
    pub gaussian_sigma: Option<f64>,
    /// TV weight in volts; defaults to 0.1 × the input's peak.
    #[arg(long)]
    pub tv_lambda: Option<f64>,
    #[arg(long)]
    pub tv_iters: Option<usize>,
    #[arg(long)]
    pub tv_tol: Option<f64>,
}

impl FilterArgs {
    pub fn bm_params(&self, sigma: f64) -> BMParams {
        let d = BMParams::with_sigma(sigma);
        BMParams {
            block: self.block.unwrap_or(d.block),
            step: self.step.unwrap_or(d.step),
            search_radius: self.search.unwrap_or(d.search_radius),
            max_group: self.max_group.unwrap_or(d.max_group),
            match_tau: self.tau.unwrap_or(d.match_tau),
            lambda_hard: self.lambda.unwrap_or(d.lambda_hard),
            sigma,
        }
    }

    pub fn aggregation(&self) -> Aggregation {
        match self.partitions {
            Some(n) => Aggregation::Partitioned(n),
            None => Aggregation::Ordered,
        }
    }

    /// Baseline parameters; `window` applies to whichever filter runs.
    pub fn baseline(&self) -> FilterParams1D {
        let d = FilterParams1D::default();
        FilterParams1D {
            gaussian_sigma_samples: self.gaussian_sigma.unwrap_or(d.gaussian_sigma_samples),
            median_window: self.window.unwrap_or(d.median_window),
            wiener_window: self.window.unwrap_or(d.wiener_window),
            wiener_noise_var: d.wiener_noise_var,
            tv_lambda: self.tv_lambda.or(d.tv_lambda),
            tv_max_iter: self.tv_iters.unwrap_or(d.tv_max_iter),
            tv_tol: self.tv_tol.unwrap_or(d.tv_tol),
        }
    }
}

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub filter: FilterKind,
    #[command(flatten)]
    pub params: FilterArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CscanArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Time gate `t0:t1`; defaults to the whole A-scan.
    #[arg(long, value_parser = parse_gate)]
    pub gate: Option<Range<usize>>,
    #[arg(long)]
    pub pgm: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_gate)]
    pub gate: Option<Range<usize>>,
    /// Defaults to ny / 2.
    #[arg(long)]
    pub row: Option<usize>,
    #[arg(long)]
    pub csv: PathBuf,
    /// Also write the C-scan the row was taken from.
    #[arg(long)]
    pub pgm: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long, value_parser = parse_gate)]
    pub gate: Option<Range<usize>>,
    /// PSNR peak in volts; defaults to the reference's peak.
    #[arg(long)]
    pub peak: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub clean: PathBuf,
    #[arg(long)]
    pub noisy: PathBuf,
    #[arg(long)]
    pub outdir: PathBuf,
    /// Filters to run after the noisy passthrough.
    #[arg(
        long,
        value_delimiter = ',',
        default_values = ["gaussian", "median", "wiener", "tv", "bm4d"]
    )]
    pub filters: Vec<FilterKind>,
    #[arg(long, value_parser = parse_gate)]
    pub gate: Option<Range<usize>>,
    #[arg(long)]
    pub row: Option<usize>,
    /// A-scans to export as `ix,iy`; defaults to the volume center.
    #[arg(long, value_parser = parse_pair)]
    pub ascan: Vec<(usize, usize)>,
    #[command(flatten)]
    pub params: FilterArgs,
}
