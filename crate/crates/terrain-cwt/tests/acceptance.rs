//! Acceptance suite: one PASS/FAIL/SKIP line per criterion, exit status 1 if
//! any criterion fails.
//!
//! Criterion 8 runs only when `TERRAIN_CWT_RUGGED_DEM` and
//! `TERRAIN_CWT_FLAT_DEM` point at the rugged and flat crops of a real DEM.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use terrain_cwt::ascii::write_ascii_grid;
use terrain_cwt_core::grid::{synth_terrain, SynthKind, SynthSpec};
use terrain_cwt_core::hillshade::{hillshade, illumination, shade_value};
use terrain_cwt_core::riskmap::{
    cwt_band_power_map, default_window_cells, dft_band_power_map, render_power_map, DEFAULT_CLIP_PERCENTILES,
    DEFAULT_OVERLAP,
};
use terrain_cwt_core::spectral::{cwt_variance_spectrum, dft_periodogram};
use terrain_cwt_core::wavelet::{
    build_scale_set, cwt2d, mexican_hat, reflect, sampled_kernel, CwtEngine, DEFAULT_DELTA_J, DEFAULT_S0,
};
use terrain_cwt_core::{DemGrid, FrequencyBand, PowerMap, ShadeParams, Window};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, detail: String) -> Check {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn noise(rows: usize, cols: usize, sigma: f64, seed: u64) -> DemGrid {
    let spec = SynthSpec {
        noise_sigma: sigma,
        seed,
        ..SynthSpec::new(SynthKind::FlatPlusNoise)
    };
    synth_terrain(&spec, rows, cols, 1.0).unwrap()
}

fn wavelet_normalization() -> Check {
    let h = 0.01;
    let n = 800i64;
    let (mut mean, mut energy) = (0.0, 0.0);
    for i in -n..=n {
        for j in -n..=n {
            let v = mexican_hat(i as f64 * h, j as f64 * h);
            mean += v;
            energy += v * v;
        }
    }
    mean *= h * h;
    energy *= h * h;
    let centre = mexican_hat(0.0, 0.0);
    ensure(
        (energy - 1.0).abs() <= 1e-3 && mean.abs() <= 1e-6 && (centre - 0.79788).abs() <= 1e-4,
        format!("∫ψ² = {energy:.9}, ∫ψ = {mean:.2e}, ψ(0,0) = {centre:.6}"),
    )
}

fn cwt_oracle() -> Check {
    let mut worst = 0.0f64;
    for seed in 0..3 {
        let grid = noise(32, 32, 1.0, 1000 + seed);
        let engine = CwtEngine::new(&grid, 8.0).map_err(|e| e.to_string())?;
        for s in [2.0, 4.0, 8.0] {
            let fast = engine.plane(s);
            let radius = (8.0 * s).ceil() as usize;
            let kernel = sampled_kernel(s, radius);
            let (width, r) = (2 * radius + 1, radius as isize);
            let mut err = 0.0f64;
            let mut scale = 0.0f64;
            for a in 0..32 {
                for b in 0..32 {
                    let mut acc = 0.0;
                    for dy in -r..=r {
                        let row = reflect(a as isize + dy, 32);
                        for dx in -r..=r {
                            let col = reflect(b as isize + dx, 32);
                            acc += grid.get(row, col) * kernel[(dy + r) as usize * width + (dx + r) as usize];
                        }
                    }
                    err = err.max((fast[a * 32 + b] - acc).abs());
                    scale = scale.max(acc.abs());
                }
            }
            worst = worst.max(err / scale);
        }
    }
    ensure(worst <= 1e-6, format!("max relative deviation {worst:.2e} over 3 grids x scales {{2,4,8}}"))
}

fn scale_wavelength_law() -> Check {
    let scales = build_scale_set(DEFAULT_S0, DEFAULT_DELTA_J, 16).map_err(|e| e.to_string())?;
    let mut details = Vec::new();
    let mut ok = true;
    for lambda in [16.0, 32.0, 64.0] {
        let grid = synth_terrain(&SynthSpec::sinusoid(1.0, lambda, 0.0), 256, 256, 1.0).unwrap();
        let spectrum = cwt_variance_spectrum(&cwt2d(&grid, &scales).map_err(|e| e.to_string())?).unwrap();
        let est = 1.0 / spectrum.argmax_frequency().unwrap();
        let steps = (est / lambda).log2() / DEFAULT_DELTA_J;
        ok &= steps.abs() <= 1.0;
        details.push(format!("λ={lambda}: {est:.2} ({steps:+.2} steps)"));
    }
    ensure(ok, details.join(", "))
}

fn periodogram_identities() -> Check {
    let (m, n) = (24, 40);
    let constant = DemGrid::from_values(m, n, 1.0, vec![3.5; m * n]).unwrap();
    let p = dft_periodogram(&constant, Window::None).unwrap();
    let leak = p.power[1..].iter().fold(0.0f64, |a, &b| a.max(b));
    let dc_only = (p.power[0] - 3.5 * 3.5).abs() < 1e-12 && leak < 1e-20 * p.power[0];

    let impulse = DemGrid::from_fn(m, n, 1.0, |r, c| if r == 5 && c == 7 { 1.0 } else { 0.0 }).unwrap();
    let p = dft_periodogram(&impulse, Window::None).unwrap();
    let expected = 1.0 / ((m * n) as f64).powi(2);
    let flat = p.power.iter().all(|&v| (v - expected).abs() < 1e-12 * expected);

    let grid = noise(m, n, 2.0, 99);
    let p = dft_periodogram(&grid, Window::None).unwrap();
    let total: f64 = p.power.iter().sum();
    let mean_sq = grid.values().iter().map(|v| v * v).sum::<f64>() / (m * n) as f64;
    let parseval = (total - mean_sq).abs() / mean_sq;
    ensure(
        dc_only && flat && parseval < 1e-9,
        format!("constant DC-only: {dc_only}, impulse flat: {flat}, Parseval rel. error {parseval:.1e}"),
    )
}

struct BandLine {
    peak_wavelength: f64,
    peak_frequency: f64,
    f_lo: f64,
    f_hi: f64,
}

fn parse_band_output(stdout: &str) -> Vec<(String, BandLine)> {
    let mut out = Vec::new();
    let mut method = String::new();
    let mut fields = std::collections::HashMap::new();
    let flush = |method: &str, fields: &std::collections::HashMap<String, f64>, out: &mut Vec<(String, BandLine)>| {
        if !method.is_empty() {
            out.push((
                method.to_string(),
                BandLine {
                    peak_wavelength: fields["peak_wavelength_m"],
                    peak_frequency: fields["peak_frequency_per_m"],
                    f_lo: fields["f_lo_per_m"],
                    f_hi: fields["f_hi_per_m"],
                },
            ));
        }
    };
    for line in stdout.lines() {
        let Some((k, v)) = line.split_once('=') else { continue };
        if k == "method" {
            flush(&method, &fields, &mut out);
            method = v.to_string();
            fields.clear();
        } else if let Ok(x) = v.parse::<f64>() {
            fields.insert(k.to_string(), x);
        }
    }
    flush(&method, &fields, &mut out);
    out
}

fn run_band(rugged: &Path, flat: &Path, out: &Path) -> std::result::Result<Vec<(String, BandLine)>, String> {
    let output = Command::new(env!("CARGO_BIN_EXE_terrain-cwt"))
        .args(["band", "--method", "both", "--rugged"])
        .arg(rugged)
        .arg("--flat")
        .arg(flat)
        .arg("-o")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if !output.status.success() {
        return Err(String::from_utf8_lossy(&output.stderr).trim().to_string());
    }
    Ok(parse_band_output(&String::from_utf8_lossy(&output.stdout)))
}

fn normalization_pipeline() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (n, lambda) = (256, 32.0);
    let flat = noise(n, n, 0.5, 77);
    let tone = synth_terrain(&SynthSpec::sinusoid(1.0, lambda, 20.0), n, n, 1.0).unwrap();
    let rugged = DemGrid::from_values(n, n, 1.0, flat.values().iter().zip(tone.values()).map(|(a, b)| a + b).collect())
        .unwrap();
    let (rp, fp) = (dir.path().join("rugged.asc"), dir.path().join("flat.asc"));
    write_ascii_grid(&rugged, &rp).map_err(|e| e.to_string())?;
    write_ascii_grid(&flat, &fp).map_err(|e| e.to_string())?;
    let results = run_band(&rp, &fp, &dir.path().join("band.csv"))?;
    let get = |m: &str| results.iter().find(|(k, _)| k == m).map(|(_, b)| b);
    let (Some(cwt), Some(dft)) = (get("cwt"), get("dft")) else {
        return Err("band output lacks a method block".into());
    };
    let dft_bins = (dft.peak_frequency - 1.0 / lambda).abs() * n as f64;
    let cwt_steps = (cwt.peak_wavelength / lambda).log2() / DEFAULT_DELTA_J;
    let (wc, wd) = (cwt.f_hi - cwt.f_lo, dft.f_hi - dft.f_lo);
    ensure(
        dft_bins <= 1.0 && cwt_steps.abs() <= 1.0 && wc > wd,
        format!(
            "DFT peak {:.2} m ({dft_bins:.2} bins off), CWT peak {:.2} m ({cwt_steps:+.2} steps), FWHM CWT {wc:.4} > DFT {wd:.4} m⁻¹",
            dft.peak_wavelength, cwt.peak_wavelength
        ),
    )
}

fn half_ratio(map: &PowerMap) -> f64 {
    let (mut east, mut west) = (0.0, 0.0);
    for r in 0..map.rows {
        for c in 0..map.cols {
            if c >= map.cols / 2 {
                east += map.get(r, c);
            } else {
                west += map.get(r, c);
            }
        }
    }
    east / west
}

fn riskmap_contrast() -> Check {
    let spec = SynthSpec {
        kind: SynthKind::CompositeHalf,
        ..SynthSpec::sinusoid(1.0, 16.0, 0.0)
    };
    let grid = synth_terrain(&spec, 256, 256, 1.0).unwrap();
    let band = FrequencyBand::from_wavelengths(10.0, 30.0).unwrap();
    let cwt = cwt_band_power_map(&grid, &band, DEFAULT_S0, DEFAULT_DELTA_J).map_err(|e| e.to_string())?;
    let window = default_window_cells(&band, 1.0);
    let dft = dft_band_power_map(&grid, &band, window, DEFAULT_OVERLAP).map_err(|e| e.to_string())?.map;
    let (rc, rd) = (half_ratio(&cwt), half_ratio(&dft));
    let decades = [&cwt, &dft]
        .map(|m| render_power_map(m, DEFAULT_CLIP_PERCENTILES).map(|r| r.legend_decades()).unwrap_or(0.0));
    ensure(
        rc > 10.0 && rd > 10.0 && decades.iter().all(|&d| d >= 2.0),
        format!(
            "half ratio CWT {rc:.1}, DFT {rd:.1} (window {window}); legend decades {:.1} / {:.1}",
            decades[0], decades[1]
        ),
    )
}

fn hillshade_checks() -> Check {
    let params = ShadeParams::new(235.0, 45.0).unwrap();
    let flat = DemGrid::from_values(8, 8, 5.0, vec![100.0; 64]).unwrap();
    let flat_ok = hillshade(&flat, &params).unwrap().iter().all(|&v| v == 180);

    let az = 235f64.to_radians();
    // a 45° slope whose steepest descent points at the sun
    let (dzdx, dzdy) = (-az.sin(), -az.cos());
    let plane = DemGrid::from_fn(8, 8, 1.0, |r, c| dzdx * c as f64 + dzdy * r as f64).unwrap();
    let lit = hillshade(&plane, &params).unwrap();
    let aligned = lit.iter().all(|&v| v == 255) && shade_value(&params, 45f64.to_radians(), az) == 255;

    let dyadic = DemGrid::from_fn(16, 16, 2.0, |r, c| ((r * 37 + c * 11) % 29) as f64 * 0.375).unwrap();
    let lifted = dyadic.map(|v| v + 1024.0);
    let offset = hillshade(&dyadic, &params).unwrap() == hillshade(&lifted, &params).unwrap();
    ensure(
        flat_ok && aligned && offset,
        format!(
            "flat=180: {flat_ok}, aligned=255: {aligned} (raw {:.6}), offset-invariant: {offset}",
            illumination(&params, 45f64.to_radians(), az)
        ),
    )
}

fn real_dem_band() -> Option<Check> {
    let rugged = std::env::var_os("TERRAIN_CWT_RUGGED_DEM")?;
    let flat = std::env::var_os("TERRAIN_CWT_FLAT_DEM")?;
    Some((|| {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let results = run_band(Path::new(&rugged), Path::new(&flat), &dir.path().join("band.csv"))?;
        let get = |m: &str| results.iter().find(|(k, _)| k == m).map(|(_, b)| b);
        let (Some(cwt), Some(dft)) = (get("cwt"), get("dft")) else {
            return Err("band output lacks a method block".into());
        };
        let (wc, wd) = (cwt.f_hi - cwt.f_lo, dft.f_hi - dft.f_lo);
        ensure(
            (1000.0..=3333.0).contains(&cwt.peak_wavelength) && wc < wd,
            format!(
                "CWT peak {:.0} m, band {:.5}..{:.5} m⁻¹ (width {wc:.5}) vs DFT width {wd:.5}",
                cwt.peak_wavelength, cwt.f_lo, cwt.f_hi
            ),
        )
    })())
}

fn timed(limit: Duration, f: impl FnOnce() -> Check) -> Outcome {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let time = format!("{:.2} s, limit {} s", elapsed.as_secs_f64(), limit.as_secs());
    match result {
        Ok(d) if elapsed <= limit => Outcome::Pass(format!("{d} [{time}]")),
        Ok(d) => Outcome::Fail(format!("{d} [too slow: {time}]")),
        Err(d) => Outcome::Fail(format!("{d} [{time}]")),
    }
}

fn main() {
    let secs = Duration::from_secs;
    let criteria: Vec<(&str, Box<dyn FnOnce() -> Outcome>)> = vec![
        ("wavelet normalization", Box::new(move || timed(secs(1), wavelet_normalization))),
        ("CWT oracle equivalence", Box::new(move || timed(secs(10), cwt_oracle))),
        ("scale-wavelength law", Box::new(move || timed(secs(30), scale_wavelength_law))),
        ("periodogram identities", Box::new(move || timed(secs(1), periodogram_identities))),
        ("normalization pipeline", Box::new(move || timed(secs(30), normalization_pipeline))),
        ("risk-map contrast", Box::new(move || timed(secs(60), riskmap_contrast))),
        ("hillshade", Box::new(move || timed(secs(1), hillshade_checks))),
        (
            "real DEM band",
            Box::new(move || match real_dem_band() {
                None => Outcome::Skip("TERRAIN_CWT_RUGGED_DEM / TERRAIN_CWT_FLAT_DEM not set".into()),
                Some(check) => match check {
                    Ok(d) => Outcome::Pass(d),
                    Err(d) => Outcome::Fail(d),
                },
            }),
        ),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let line = match run() {
            Outcome::Pass(d) => format!("PASS  {d}"),
            Outcome::Fail(d) => {
                failed += 1;
                format!("FAIL  {d}")
            }
            Outcome::Skip(d) => format!("SKIP  {d}"),
        };
        println!("criterion {} ({name}): {line}", i + 1);
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
