use std::fs;
use std::ops::Range;
use std::path::Path;
use std::time::Instant;

use sam_denoise::bm4d::{denoise_hard_with, denoise_two_stage, estimate_sigma_mad};
use sam_denoise::filters::{
    auto_noise_var, gaussian_1d, median_1d, tv_denoise_1d, wiener_adaptive_1d, NoiseVar,
};
use sam_denoise::io::{
    read_asv, write_asv, write_cscan_csv, write_pgm, write_profile_csv, write_signals_csv,
};
use sam_denoise::metrics::{metrics_csv_row, MetricsReport, METRICS_CSV_HEADER};
use sam_denoise::phantom::{add_awgn, render_phantom, PhantomSpec};
use sam_denoise::volume::{extract_cscan, extract_line_profile, ScanVolume};

use crate::args::{
    CompareArgs, CscanArgs, DenoiseArgs, FilterArgs, FilterKind, MetricsArgs, NoiseArgs, Preset,
    ProfileArgs, SigmaArg, SynthArgs,
};
use crate::error::{usage, CliError, CliResult};

pub fn read_volume(path: &Path) -> CliResult<ScanVolume> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    read_asv(&bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn full_gate(vol: &ScanVolume, gate: &Option<Range<usize>>) -> Range<usize> {
    gate.clone().unwrap_or(0..vol.nt())
}

pub fn synth(args: &SynthArgs) -> CliResult<()> {
    let mut spec = if let Some(path) = &args.spec {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str::<PhantomSpec>(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
    } else if args.preset == Some(Preset::Coin64) {
        PhantomSpec::coin64()
    } else {
        PhantomSpec::coin(
            args.nx.unwrap_or(64),
            args.ny.unwrap_or(64),
            args.nt.unwrap_or(256),
        )
    };
    if let Some(v) = args.sample_rate_hz {
        spec.sample_rate_hz = v;
    }
    if let Some(v) = args.center_freq_hz {
        spec.pulse.center_freq_hz = v;
    }
    if let Some(v) = args.envelope_sigma_s {
        spec.pulse.envelope_sigma_s = v;
    }
    if let Some(v) = args.phase_rad {
        spec.pulse.phase_rad = v;
    }
    let vol = render_phantom(&spec)?;
    write_file(&args.out, write_asv(&vol))?;
    println!(
        "{} {}x{}x{}",
        args.out.display(),
        vol.nx(),
        vol.ny(),
        vol.nt()
    );
    Ok(())
}

pub fn noise(args: &NoiseArgs) -> CliResult<()> {
    let vol = read_volume(&args.input)?;
    let sigma = if args.relative {
        args.sigma * vol.max_abs()
    } else {
        args.sigma
    };
    let noisy = add_awgn(&vol, sigma, args.seed)?;
    write_file(&args.out, write_asv(&noisy))?;
    println!("{} sigma_v={sigma}", args.out.display());
    Ok(())
}

/// Result of one filter run.
pub struct FilterRun {
    pub volume: ScanVolume,
    /// Noise level the filter used, with where it came from.
    pub sigma: Option<(f64, &'static str)>,
    pub runtime_ms: f64,
}

fn resolve_sigma(arg: SigmaArg, vol: &ScanVolume) -> (f64, &'static str) {
    match arg {
        SigmaArg::Volts(v) => (v, "explicit"),
        SigmaArg::Auto => (estimate_sigma_mad(vol), "estimated"),
    }
}

pub fn run_filter(kind: FilterKind, vol: &ScanVolume, params: &FilterArgs) -> CliResult<FilterRun> {
    let start = Instant::now();
    let base = params.baseline();
    let (volume, sigma) = match kind {
        FilterKind::Bm4d | FilterKind::Hard => {
            let sigma = resolve_sigma(params.sigma, vol);
            let p = params.bm_params(sigma.0);
            let out = if kind == FilterKind::Bm4d {
                denoise_two_stage(vol, &p, params.aggregation())?.estimate
            } else {
                denoise_hard_with(vol, &p, params.aggregation())?
            };
            (out, Some(sigma))
        }
        FilterKind::Wiener => {
            let (nv, sigma) = match params.sigma {
                SigmaArg::Volts(v) => (NoiseVar::Fixed(v * v), (v, "explicit")),
                SigmaArg::Auto => {
                    let nv = auto_noise_var(vol, base.wiener_window)?;
                    (NoiseVar::Fixed(nv), (nv.sqrt(), "estimated"))
                }
            };
            (
                wiener_adaptive_1d(vol, base.wiener_window, nv)?,
                Some(sigma),
            )
        }
        FilterKind::Gaussian => (gaussian_1d(vol, base.gaussian_sigma_samples)?, None),
        FilterKind::Median => (median_1d(vol, base.median_window)?, None),
        FilterKind::Tv => (
            tv_denoise_1d(vol, base.tv_lambda_for(vol), base.tv_max_iter, base.tv_tol)?,
            None,
        ),
    };
    Ok(FilterRun {
        volume,
        sigma,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn denoise(args: &DenoiseArgs) -> CliResult<()> {
    let vol = read_volume(&args.input)?;
    let run = run_filter(args.filter, &vol, &args.params)?;
    write_file(&args.out, write_asv(&run.volume))?;
    println!("filter={}", args.filter.name());
    if let Some((sigma, source)) = run.sigma {
        println!("sigma_v={sigma} ({source})");
    }
    println!("runtime_ms={:.3}", run.runtime_ms);
    Ok(())
}

pub fn cscan(args: &CscanArgs) -> CliResult<()> {
    if args.pgm.is_none() && args.csv.is_none() {
        return usage("cscan needs --pgm and/or --csv");
    }
    let vol = read_volume(&args.input)?;
    let img = extract_cscan(&vol, full_gate(&vol, &args.gate))?;
    if let Some(path) = &args.pgm {
        write_file(path, write_pgm(&img))?;
    }
    if let Some(path) = &args.csv {
        write_file(path, write_cscan_csv(&img))?;
    }
    println!("{}x{}", img.nx(), img.ny());
    Ok(())
}

pub fn profile(args: &ProfileArgs) -> CliResult<()> {
    let vol = read_volume(&args.input)?;
    let img = extract_cscan(&vol, full_gate(&vol, &args.gate))?;
    let row = args.row.unwrap_or_else(|| img.center_row());
    let profile = extract_line_profile(&img, row)?;
    write_file(&args.csv, write_profile_csv(&profile))?;
    if let Some(path) = &args.pgm {
        write_file(path, write_pgm(&img))?;
    }
    println!("row={row}");
    Ok(())
}

pub fn metrics(args: &MetricsArgs) -> CliResult<()> {
    let reference = read_volume(&args.reference)?;
    let test = read_volume(&args.test)?;
    if !reference.same_shape(&test) {
        return Err(CliError::Data(format!(
            "shape mismatch: {:?} vs {:?}",
            reference.dims(),
            test.dims()
        )));
    }
    if let Some(p) = args.peak {
        if !(p.is_finite() && p > 0.0) {
            return usage(format!("peak must be positive, got {p}"));
        }
    }
    let report = MetricsReport::compute(
        &reference,
        &test,
        full_gate(&reference, &args.gate),
        args.peak,
    )?;
    let name = args
        .test
        .file_stem()
        .map_or_else(|| "test".into(), |s| s.to_string_lossy().into_owned());
    println!("{METRICS_CSV_HEADER}");
    println!("{}", metrics_csv_row(&name, &report, 0.0));
    Ok(())
}

pub const FAILED_MARKER: &str = "FAILED";

pub fn compare(args: &CompareArgs) -> CliResult<()> {
    let clean = read_volume(&args.clean)?;
    let noisy = read_volume(&args.noisy)?;
    if !clean.same_shape(&noisy) {
        return Err(CliError::Data(format!(
            "clean {:?} and noisy {:?} differ in shape",
            clean.dims(),
            noisy.dims()
        )));
    }
    fs::create_dir_all(&args.outdir).map_err(|e| CliError::io(&args.outdir, e))?;
    let marker = args.outdir.join(FAILED_MARKER);
    if marker.exists() {
        fs::remove_file(&marker).map_err(|e| CliError::io(&marker, e))?;
    }
    compare_into(args, &clean, &noisy).inspect_err(|e| {
        // Best effort: the original error is what the caller needs.
        let _ = fs::write(&marker, format!("{e}\n"));
    })
}

fn compare_into(args: &CompareArgs, clean: &ScanVolume, noisy: &ScanVolume) -> CliResult<()> {
    let gate = full_gate(clean, &args.gate);
    let row = args.row.unwrap_or(clean.ny() / 2);
    let ascans = if args.ascan.is_empty() {
        vec![(clean.nx() / 2, clean.ny() / 2)]
    } else {
        args.ascan.clone()
    };
    for &(ix, iy) in &ascans {
        if ix >= clean.nx() || iy >= clean.ny() {
            return usage(format!(
                "A-scan ({ix}, {iy}) outside the {}x{} grid",
                clean.nx(),
                clean.ny()
            ));
        }
    }
    // Validate the gate and row before spending time on filters.
    extract_line_profile(&extract_cscan(clean, gate.clone())?, row)?;

    let peak = clean.max_abs();
    let peak = (peak > 0.0).then_some(peak);
    let mut outputs: Vec<(&str, ScanVolume)> = Vec::new();
    let mut table = format!("{METRICS_CSV_HEADER}\n");
    let mut stages: Vec<(&str, Option<FilterKind>)> = vec![("none", None)];
    stages.extend(args.filters.iter().map(|&k| (k.name(), Some(k))));

    for (name, kind) in stages {
        let (vol, runtime_ms) = match kind {
            None => (noisy.clone(), 0.0),
            Some(k) => {
                let run = run_filter(k, noisy, &args.params)?;
                (run.volume, run.runtime_ms)
            }
        };
        let img = extract_cscan(&vol, gate.clone())?;
        let dir = &args.outdir;
        write_file(&dir.join(format!("{name}.asv")), write_asv(&vol))?;
        write_file(&dir.join(format!("{name}.pgm")), write_pgm(&img))?;
        write_file(
            &dir.join(format!("{name}_profile.csv")),
            write_profile_csv(&extract_line_profile(&img, row)?),
        )?;
        let report = MetricsReport::compute(clean, &vol, gate.clone(), peak)?;
        table.push_str(&metrics_csv_row(name, &report, runtime_ms));
        table.push('\n');
        println!(
            "{name}: psnr_db={:.3} ssim={:.4} runtime_ms={runtime_ms:.1}",
            report.psnr_db, report.ssim
        );
        outputs.push((name, vol));
    }
    write_file(&args.outdir.join("metrics.csv"), table)?;

    for (ix, iy) in ascans {
        let mut columns: Vec<(&str, &[f32])> = vec![("clean", clean.ascan(ix, iy))];
        columns.extend(outputs.iter().map(|(name, v)| (*name, v.ascan(ix, iy))));
        let csv = write_signals_csv(clean.meta().sample_rate_hz, &columns)?;
        write_file(&args.outdir.join(format!("ascan_{ix}_{iy}.csv")), csv)?;
    }
    Ok(())
}
