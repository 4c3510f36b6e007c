//! Acceptance criteria A1–A10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use sam_denoise::bm4d::{
    dct_1d_forward, dct_1d_inverse, denoise_bm4d, denoise_hard, estimate_sigma_mad,
    haar_1d_forward, haar_1d_inverse, BMParams,
};
use sam_denoise::filters::{
    gaussian_1d, median_1d, rof_objective, tv_denoise_1d, tv_denoise_signal, wiener_adaptive_1d,
    FilterParams1D, NoiseVar, Rof1d,
};
use sam_denoise::io::read_asv;
use sam_denoise::metrics::{mse, parse_metrics_csv, psnr_db};
use sam_denoise::phantom::{add_awgn, render_phantom, PhantomSpec};
use sam_denoise::rng::GaussianRng;
use sam_denoise::volume::{extract_cscan, ScanMetadata, ScanVolume};

type Outcome = Result<String, String>;
type Inverse = fn(&[f64]) -> sam_denoise::error::Result<Vec<f64>>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cli(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_sam-denoise"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr).trim()
        ))
    }
}

fn coin64_noisy(rel_sigma: f64) -> (ScanVolume, ScanVolume, f64) {
    let clean = render_phantom(&PhantomSpec::coin64()).unwrap();
    let peak = clean.max_abs();
    let noisy = add_awgn(&clean, rel_sigma * peak, 42).unwrap();
    (clean, noisy, peak)
}

/// Runs `compare` on the coin64 fixture once; A1 and A10 both read it.
fn compare_fixture(dir: &Path) -> Result<(), String> {
    cli(dir, &["synth", "--preset", "coin64", "--out", "clean.asv"])?;
    cli(
        dir,
        &[
            "noise",
            "--in",
            "clean.asv",
            "--sigma",
            "0.1",
            "--relative",
            "--seed",
            "42",
            "--out",
            "noisy.asv",
        ],
    )?;
    cli(
        dir,
        &[
            "--threads",
            "1",
            "compare",
            "--clean",
            "clean.asv",
            "--noisy",
            "noisy.asv",
            "--outdir",
            "cmp",
        ],
    )
}

fn a1_ranking(dir: &Path) -> Outcome {
    let text = fs::read_to_string(dir.join("cmp/metrics.csv")).map_err(|e| e.to_string())?;
    let rows = parse_metrics_csv(&text).map_err(|e| e.to_string())?;
    let get = |name: &str| {
        rows.iter()
            .find(|r| r.0 == name)
            .map(|r| (r.1.psnr_db, r.2))
    };
    let (Some((bm4d, bm4d_ms)), Some((wiener, _)), Some((noisy, _))) =
        (get("bm4d"), get("wiener"), get("none"))
    else {
        return Err("metrics.csv lacks bm4d/wiener/none rows".into());
    };
    check(
        bm4d > wiener + 0.5 && wiener > noisy + 0.5 && bm4d - noisy >= 5.0 && bm4d_ms < 120_000.0,
        format!(
            "psnr bm4d {bm4d:.3} dB, wiener {wiener:.3} dB, noisy {noisy:.3} dB; \
             bm4d-wiener {:.3} (>0.5), wiener-noisy {:.3} (>0.5), bm4d-noisy {:.3} (>=5); \
             bm4d {:.1} s single-threaded (<120)",
            bm4d - wiener,
            wiener - noisy,
            bm4d - noisy,
            bm4d_ms / 1e3
        ),
    )
}

fn a2_identity() -> Outcome {
    let (_, noisy, _) = coin64_noisy(0.1);
    let start = Instant::now();
    let out = denoise_bm4d(&noisy, &BMParams::with_sigma(0.0)).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let dev = noisy
        .samples()
        .iter()
        .zip(out.samples())
        .map(|(a, b)| (f64::from(*a) - f64::from(*b)).abs())
        .fold(0.0, f64::max);
    check(
        dev <= 1e-12 && secs < 10.0,
        format!("max deviation {dev:e} (<=1e-12), {secs:.2} s (<10)"),
    )
}

fn a3_constants() -> Outcome {
    let mut worst: f64 = 0.0;
    for c in [0.37f32, -1.25, 0.0] {
        let vol =
            ScanVolume::new(16, 16, 64, vec![c; 16 * 16 * 64], ScanMetadata::default()).unwrap();
        let d = FilterParams1D::default();
        let bm = BMParams::with_sigma(0.1);
        let outputs = [
            gaussian_1d(&vol, d.gaussian_sigma_samples),
            median_1d(&vol, d.median_window),
            wiener_adaptive_1d(&vol, d.wiener_window, NoiseVar::Auto),
            tv_denoise_1d(&vol, 0.1, d.tv_max_iter, d.tv_tol),
            denoise_hard(&vol, &bm),
            denoise_bm4d(&vol, &bm),
        ];
        for out in outputs {
            let out = out.map_err(|e| e.to_string())?;
            for &v in out.samples() {
                worst = worst.max((f64::from(v) - f64::from(c)).abs());
            }
        }
    }
    check(
        worst <= 1e-12,
        format!("six filters, max deviation {worst:e} (<=1e-12)"),
    )
}

fn a4_transforms() -> Outcome {
    let start = Instant::now();
    let mut rng = GaussianRng::new(4);
    let mut worst: f64 = 0.0;
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    for n in [1usize, 2, 4, 8, 16] {
        for _ in 0..1000 {
            let x: Vec<f64> = (0..n).map(|_| rng.next_normal()).collect();
            let e = norm(&x);
            let pairs = [
                (dct_1d_forward(&x).unwrap(), dct_1d_inverse as Inverse),
                (haar_1d_forward(&x).unwrap(), haar_1d_inverse as Inverse),
            ];
            for (coeffs, inverse) in pairs {
                worst = worst.max((norm(&coeffs) - e).abs() / e);
                let back = inverse(&coeffs).unwrap();
                let err: Vec<f64> = back.iter().zip(&x).map(|(a, b)| a - b).collect();
                worst = worst.max(norm(&err) / e);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-9 && secs < 5.0,
        format!(
            "DCT+Haar x 5000 vectors, worst relative error {worst:e} (<=1e-9), {secs:.2} s (<5)"
        ),
    )
}

fn a5_oracles() -> Outcome {
    let mut rng = GaussianRng::new(5);
    let mut cases = 0usize;
    for nx in 1..=8 {
        for ny in 1..=8 {
            for nt in [1, 2, 7, 16] {
                let vol = ScanVolume::from_fn(nx, ny, nt, ScanMetadata::default(), |_, _, _| {
                    rng.next_normal() as f32
                })
                .unwrap();
                // C-scan: every gate.
                for t0 in 0..nt {
                    for t1 in t0 + 1..=nt {
                        let img = extract_cscan(&vol, t0..t1).unwrap();
                        for iy in 0..ny {
                            for ix in 0..nx {
                                let mut m = 0.0f64;
                                for it in t0..t1 {
                                    m = m.max(f64::from(vol.sample(ix, iy, it)).abs());
                                }
                                if img.pixel(ix, iy) != m {
                                    return Err(format!(
                                        "cscan differs at {nx}x{ny}x{nt} gate {t0}:{t1}"
                                    ));
                                }
                            }
                        }
                        cases += 1;
                    }
                }
                // Median: every odd window.
                for w in (1..=nt).step_by(2) {
                    let out = median_1d(&vol, w).unwrap();
                    let h = (w / 2) as isize;
                    for ix in 0..nx {
                        for iy in 0..ny {
                            let a = vol.ascan(ix, iy);
                            for i in 0..nt {
                                let mut win: Vec<f32> = (-h..=h)
                                    .map(|k| a[(i as isize + k).clamp(0, nt as isize - 1) as usize])
                                    .collect();
                                win.sort_by(f32::total_cmp);
                                if out.sample(ix, iy, i) != win[w / 2] {
                                    return Err(format!(
                                        "median differs at {nx}x{ny}x{nt} window {w}"
                                    ));
                                }
                            }
                        }
                    }
                    cases += 1;
                }
                // MSE against a second volume.
                let other = ScanVolume::from_fn(nx, ny, nt, ScanMetadata::default(), |_, _, _| {
                    rng.next_normal() as f32
                })
                .unwrap();
                let mut sum = 0.0f64;
                for ix in 0..nx {
                    for iy in 0..ny {
                        for it in 0..nt {
                            let d = f64::from(vol.sample(ix, iy, it))
                                - f64::from(other.sample(ix, iy, it));
                            sum += d * d;
                        }
                    }
                }
                if mse(&vol, &other).unwrap() != sum / (nx * ny * nt) as f64 {
                    return Err(format!("mse differs at {nx}x{ny}x{nt}"));
                }
                cases += 1;
            }
        }
    }
    Ok(format!(
        "cscan, median_1d, mse bit-exact on {cases} fixtures up to 8x8x16"
    ))
}

fn a6_sigma() -> Outcome {
    let zero = ScanVolume::zeros(32, 32, 128, ScanMetadata::default()).unwrap();
    let estimates: Vec<f64> = (1..=10)
        .map(|seed| estimate_sigma_mad(&add_awgn(&zero, 0.1, seed).unwrap()))
        .collect();
    let inside = estimates
        .iter()
        .filter(|s| (0.085..=0.115).contains(*s))
        .count();
    let (lo, hi) = estimates
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &s| (l.min(s), h.max(s)));
    check(
        inside == 10,
        format!("{inside}/10 seeds within ±15%, range [{lo:.4}, {hi:.4}]"),
    )
}

fn a7_tv() -> Outcome {
    let mut rng = GaussianRng::new(7);
    let mut increases = 0usize;
    let mut raw_increases = 0usize;
    for trial in 0..20 {
        let f: Vec<f64> = (0..64).map(|_| rng.next_normal()).collect();
        let lambda = 0.25 * (1 + trial % 8) as f64;
        let mut rof = Rof1d::new(&f, lambda);
        let mut prev = rof.objective();
        let mut prev_raw = rof_objective(rof.dual_primal(), &f, lambda);
        for _ in 0..500 {
            rof.step();
            let obj = rof_objective(rof.u(), &f, lambda);
            if obj > prev {
                increases += 1;
            }
            let raw = rof_objective(rof.dual_primal(), &f, lambda);
            if raw > prev_raw {
                raw_increases += 1;
            }
            prev = obj;
            prev_raw = raw;
        }
    }
    let out = tv_denoise_signal(&[0.0, 1.0], 0.25, 10_000, 1e-12);
    let err = (out.u[0] - 0.25).abs().max((out.u[1] - 0.75).abs());
    check(
        increases == 0 && err <= 1e-6,
        format!(
            "objective of the returned iterate rose {increases} times in 10000 steps \
             (raw dual iterate: {raw_increases}); [0,1] λ=0.25 -> [{:.7}, {:.7}], error {err:e} (<=1e-6)",
            out.u[0], out.u[1]
        ),
    )
}

fn a8_determinism(dir: &Path) -> Outcome {
    let d = dir.join("a8");
    fs::create_dir_all(&d).map_err(|e| e.to_string())?;
    for tag in ["a", "b"] {
        cli(
            &d,
            &[
                "synth",
                "--nx",
                "32",
                "--ny",
                "32",
                "--nt",
                "128",
                "--out",
                &format!("clean_{tag}.asv"),
            ],
        )?;
        cli(
            &d,
            &[
                "noise",
                "--in",
                &format!("clean_{tag}.asv"),
                "--sigma",
                "0.1",
                "--relative",
                "--seed",
                "42",
                "--out",
                &format!("noisy_{tag}.asv"),
            ],
        )?;
        cli(
            &d,
            &[
                "denoise",
                "--in",
                &format!("noisy_{tag}.asv"),
                "--filter",
                "bm4d",
                "--out",
                &format!("den_{tag}.asv"),
            ],
        )?;
    }
    cli(
        &d,
        &[
            "--threads",
            "1",
            "denoise",
            "--in",
            "noisy_a.asv",
            "--filter",
            "bm4d",
            "--out",
            "den_t1.asv",
        ],
    )?;
    cli(
        &d,
        &[
            "--threads",
            "4",
            "denoise",
            "--in",
            "noisy_a.asv",
            "--filter",
            "bm4d",
            "--out",
            "den_t4.asv",
        ],
    )?;
    let read = |name: &str| fs::read(d.join(name)).unwrap();
    let same = read("clean_a.asv") == read("clean_b.asv")
        && read("noisy_a.asv") == read("noisy_b.asv")
        && read("den_a.asv") == read("den_b.asv")
        && read("den_t1.asv") == read("den_t4.asv")
        && read("den_a.asv") == read("den_t1.asv");
    check(same, "synth | noise | denoise bm4d on 32x32x128: repeat runs and --threads 1 vs 4 byte-identical".into())
}

fn a9_monotone() -> Outcome {
    let mut psnr = Vec::new();
    for rel in [0.05, 0.2] {
        let (clean, noisy, peak) = coin64_noisy(rel);
        let sigma = estimate_sigma_mad(&noisy);
        let out = denoise_bm4d(&noisy, &BMParams::with_sigma(sigma)).map_err(|e| e.to_string())?;
        psnr.push(psnr_db(&clean, &out, peak).unwrap());
    }
    check(
        psnr[0] >= psnr[1],
        format!(
            "psnr bm4d at 0.05 peak {:.3} dB >= at 0.2 peak {:.3} dB",
            psnr[0], psnr[1]
        ),
    )
}

fn a10_compare(dir: &Path) -> Outcome {
    let out = dir.join("cmp");
    let text = fs::read_to_string(out.join("metrics.csv")).map_err(|e| e.to_string())?;
    let names: Vec<String> = parse_metrics_csv(&text)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|r| r.0)
        .collect();
    let expected = ["none", "gaussian", "median", "wiener", "tv", "bm4d"];
    if names != expected {
        return Err(format!("metrics.csv rows {names:?}"));
    }
    let clean = read_asv(&fs::read(dir.join("clean.asv")).unwrap()).unwrap();
    let header = format!("P5\n{} {}\n255\n", clean.nx(), clean.ny());
    for name in expected {
        let pgm = fs::read(out.join(format!("{name}.pgm"))).map_err(|e| e.to_string())?;
        if !pgm.starts_with(header.as_bytes())
            || pgm.len() != header.len() + clean.nx() * clean.ny()
        {
            return Err(format!(
                "{name}.pgm is not a valid {}x{} P5",
                clean.nx(),
                clean.ny()
            ));
        }
        let csv = fs::read_to_string(out.join(format!("{name}_profile.csv")))
            .map_err(|e| e.to_string())?;
        if csv.lines().count() != clean.nx() + 1 {
            return Err(format!(
                "{name}_profile.csv has {} lines",
                csv.lines().count()
            ));
        }
    }
    Ok(format!(
        "metrics.csv with {} filter rows, {} valid P5 images, profiles with {} lines",
        names.len(),
        expected.len(),
        clean.nx() + 1
    ))
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let d = dir.path();
    let fixture = compare_fixture(d);
    let from_fixture = |f: fn(&Path) -> Outcome| -> Outcome {
        match &fixture {
            Ok(()) => f(d),
            Err(e) => Err(format!("compare fixture failed: {e}")),
        }
    };

    let results: Vec<(&str, Outcome)> = vec![
        ("A1", from_fixture(a1_ranking)),
        ("A2", a2_identity()),
        ("A3", a3_constants()),
        ("A4", a4_transforms()),
        ("A5", a5_oracles()),
        ("A6", a6_sigma()),
        ("A7", a7_tv()),
        ("A8", a8_determinism(d)),
        ("A9", a9_monotone()),
        ("A10", from_fixture(a10_compare)),
    ];

    let mut failed = 0;
    for (id, outcome) in &results {
        match outcome {
            Ok(detail) => println!("{id:<4} PASS  {detail}"),
            Err(detail) => {
                failed += 1;
                println!("{id:<4} FAIL  {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
