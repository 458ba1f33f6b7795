//! Independent checks of the wavelet and spectral estimators against direct
//! numerical evaluation.

use num_complex::Complex64;
use terrain_cwt_core::fft::{signed_index, Direction, Fft2d};
use terrain_cwt_core::grid::{synth_terrain, SynthKind, SynthSpec};
use terrain_cwt_core::spectral::{
    cwt_variance_spectrum, dft_periodogram, find_peak_fwhm, normalize_spectrum, radial_average,
    radial_counts, Interpolation,
};
use terrain_cwt_core::wavelet::{
    build_scale_set, cwt2d, mexican_hat, mexican_hat_hat, reflect, sampled_kernel,
    spectral_peak_frequency, CwtEngine,
};
use terrain_cwt_core::{DemGrid, Window};

fn noise_grid(rows: usize, cols: usize, seed: u64) -> DemGrid {
    let spec = SynthSpec {
        noise_sigma: 1.0,
        seed,
        ..SynthSpec::new(SynthKind::FlatPlusNoise)
    };
    synth_terrain(&spec, rows, cols, 1.0).unwrap()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

#[test]
fn mother_wavelet_has_zero_mean_and_unit_energy() {
    let h = 0.01;
    let n = (12.0 / h) as i64;
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
    assert!(mean.abs() < 1e-9, "mean {mean}");
    assert!((energy - 1.0).abs() < 1e-9, "energy {energy}");
}

#[test]
fn analytic_transform_matches_sampled_kernel_fft() {
    let (n, s) = (256usize, 8.0);
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for k in 0..n {
        for l in 0..n {
            let (y, x) = (signed_index(k, n), signed_index(l, n));
            data[k * n + l] = Complex64::new(mexican_hat(x / s, y / s) / s, 0.0);
        }
    }
    Fft2d::new(n, n).process(&mut data, Direction::Forward);
    let mut peak = 0.0f64;
    let mut worst = 0.0f64;
    let mut best_rho = 0.0;
    for k in 0..n {
        for l in 0..n {
            let (v, u) = (signed_index(k, n) / n as f64, signed_index(l, n) / n as f64);
            let exact = mexican_hat_hat(u, v, s);
            let z = data[k * n + l];
            worst = worst.max((z.re - exact).abs()).max(z.im.abs());
            if exact > peak {
                peak = exact;
                best_rho = u.hypot(v);
            }
        }
    }
    assert!(worst / peak < 1e-3, "relative error {}", worst / peak);
    // the lattice maximum sits within one frequency step of the analytic peak
    assert!((best_rho - spectral_peak_frequency(s)).abs() <= 1.0 / n as f64);
    let rho = spectral_peak_frequency(s);
    let at = mexican_hat_hat(rho, 0.0, s);
    assert!(at > mexican_hat_hat(rho * 1.01, 0.0, s));
    assert!(at > mexican_hat_hat(rho * 0.99, 0.0, s));
}

// Direct convolution of the mirror-extended field with the sampled kernel.
fn brute_force_plane(grid: &DemGrid, s: f64, radius: usize) -> Vec<f64> {
    let (rows, cols) = grid.shape();
    let kernel = sampled_kernel(s, radius);
    let width = 2 * radius + 1;
    let r = radius as isize;
    let mut out = vec![0.0; rows * cols];
    for a in 0..rows {
        for b in 0..cols {
            let mut acc = 0.0;
            for dy in -r..=r {
                let row = reflect(a as isize + dy, rows);
                for dx in -r..=r {
                    let col = reflect(b as isize + dx, cols);
                    acc += grid.get(row, col) * kernel[((dy + r) as usize) * width + (dx + r) as usize];
                }
            }
            out[a * cols + b] = acc;
        }
    }
    out
}

#[test]
fn fft_transform_matches_direct_convolution() {
    for seed in [1, 2] {
        let grid = noise_grid(32, 32, seed);
        let engine = CwtEngine::new(&grid, 8.0).unwrap();
        for s in [2.0, 4.0, 8.0] {
            let fast = engine.plane(s);
            let slow = brute_force_plane(&grid, s, (8.0 * s).ceil() as usize);
            let scale = max_abs(&slow);
            let err = fast.iter().zip(&slow).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(err / scale < 1e-6, "seed {seed} s {s}: {}", err / scale);
        }
    }
}

#[test]
fn impulse_response_is_the_scaled_kernel() {
    let n = 64;
    let centre = 32;
    let grid = DemGrid::from_fn(n, n, 1.0, |r, c| if r == centre && c == centre { 1.0 } else { 0.0 }).unwrap();
    let s = 2.0;
    let plane = CwtEngine::new(&grid, s).unwrap().plane(s);
    for dy in -6isize..=6 {
        for dx in -6isize..=6 {
            let got = plane[(centre as isize + dy) as usize * n + (centre as isize + dx) as usize];
            let expected = mexican_hat(dx as f64 / s, dy as f64 / s) / s;
            assert!((got - expected).abs() < 1e-6, "({dy},{dx}) {got} vs {expected}");
        }
    }
}

#[test]
fn transform_is_linear() {
    let (f, g) = (noise_grid(40, 48, 5), noise_grid(40, 48, 6));
    let combo = DemGrid::from_values(
        40,
        48,
        1.0,
        f.values().iter().zip(g.values()).map(|(a, b)| 2.5 * a - 0.75 * b).collect(),
    )
    .unwrap();
    let scales = build_scale_set(2.0, 0.5, 4).unwrap();
    let (vf, vg, vc) = (cwt2d(&f, &scales).unwrap(), cwt2d(&g, &scales).unwrap(), cwt2d(&combo, &scales).unwrap());
    for j in 0..scales.len() {
        for i in 0..40 * 48 {
            let expected = 2.5 * vf.planes[j][i] - 0.75 * vg.planes[j][i];
            assert!((vc.planes[j][i] - expected).abs() < 1e-10);
        }
    }
}

#[test]
fn transform_commutes_with_interior_shifts() {
    let n = 96;
    let bump = |r0: usize, c0: usize| {
        DemGrid::from_fn(n, n, 1.0, move |r, c| {
            let (dr, dc) = (r as f64 - r0 as f64, c as f64 - c0 as f64);
            (-(dr * dr + dc * dc) / 18.0).exp()
        })
        .unwrap()
    };
    let (a, b) = (bump(40, 44), bump(47, 39));
    let s = 3.0;
    let (pa, pb) = (
        CwtEngine::new(&a, s).unwrap().plane(s),
        CwtEngine::new(&b, s).unwrap().plane(s),
    );
    for r in 20..70 {
        for c in 20..70 {
            let shifted = pb[(r + 7) * n + (c - 5)];
            assert!((pa[r * n + c] - shifted).abs() < 1e-9);
        }
    }
}

#[test]
fn constant_offset_has_no_response() {
    let g = noise_grid(48, 48, 9);
    let lifted = g.map(|v| v + 1234.5);
    let scales = build_scale_set(2.0, 0.25, 8).unwrap();
    let (a, b) = (cwt2d(&g, &scales).unwrap(), cwt2d(&lifted, &scales).unwrap());
    for (pa, pb) in a.planes.iter().zip(&b.planes) {
        for (x, y) in pa.iter().zip(pb) {
            assert!((x - y).abs() < 1e-8);
        }
    }
}

#[test]
fn sinusoid_variance_peaks_within_one_ladder_step() {
    for lambda in [16.0, 32.0] {
        let grid = synth_terrain(&SynthSpec::sinusoid(1.0, lambda, 30.0), 256, 256, 1.0).unwrap();
        let scales = build_scale_set(2.0, 1.0 / 16.0, 44).unwrap();
        let spectrum = cwt_variance_spectrum(&cwt2d(&grid, &scales).unwrap()).unwrap();
        let f = spectrum.argmax_frequency().unwrap();
        let ratio = lambda * f;
        assert!(ratio > 2f64.powf(-0.25) && ratio < 2f64.powf(0.25), "λ {lambda}: ratio {ratio}");
    }
}

#[test]
fn periodogram_obeys_parseval() {
    let grid = noise_grid(48, 80, 11);
    let p = dft_periodogram(&grid, Window::None).unwrap();
    let total: f64 = p.power.iter().sum();
    let mean_sq = grid.values().iter().map(|v| v * v).sum::<f64>() / grid.values().len() as f64;
    assert!((total - mean_sq).abs() / mean_sq < 1e-9);
}

#[test]
fn radial_bins_partition_the_lattice() {
    let grid = noise_grid(40, 64, 12);
    let p = dft_periodogram(&grid, Window::None).unwrap();
    let spectrum = radial_average(&p).unwrap();
    let counts = radial_counts(&p);
    assert_eq!(counts.len(), spectrum.len());
    assert_eq!(counts.iter().sum::<usize>(), 40 * 64 - 1);
    let reassembled: f64 = spectrum.powers().iter().zip(&counts).map(|(m, &n)| m * n as f64).sum();
    let without_dc: f64 = p.power.iter().sum::<f64>() - p.power[0];
    assert!((reassembled - without_dc).abs() < 1e-12 * without_dc);
}

fn rugged_and_flat(lambda: f64) -> (DemGrid, DemGrid) {
    let sinusoid = SynthSpec {
        noise_sigma: 0.2,
        seed: 21,
        ..SynthSpec::sinusoid(1.0, lambda, 0.0)
    };
    let flat = SynthSpec {
        kind: SynthKind::FlatPlusNoise,
        ..sinusoid
    };
    (
        synth_terrain(&sinusoid, 128, 128, 1.0).unwrap(),
        synth_terrain(&flat, 128, 128, 1.0).unwrap(),
    )
}

#[test]
fn normalized_dft_spectrum_peaks_at_the_ridge_frequency() {
    let (rugged, flat) = rugged_and_flat(16.0);
    let spectra = [&rugged, &flat].map(|g| radial_average(&dft_periodogram(g, Window::Hann).unwrap()).unwrap());
    let ratio = normalize_spectrum(&spectra[0], &spectra[1]).unwrap().spectrum;
    let band = find_peak_fwhm(&ratio, Interpolation::LogFrequency).unwrap();
    assert!((band.peak_frequency - 1.0 / 16.0).abs() < 1e-12);
}

#[test]
fn wavelet_band_is_wider_than_fourier_band() {
    let (rugged, flat) = rugged_and_flat(16.0);
    let scales = build_scale_set(2.0, 0.125, 36).unwrap();
    let cwt = [&rugged, &flat].map(|g| cwt_variance_spectrum(&cwt2d(g, &scales).unwrap()).unwrap());
    let dft = [&rugged, &flat].map(|g| radial_average(&dft_periodogram(g, Window::Hann).unwrap()).unwrap());
    let band = |s: &[terrain_cwt_core::PowerSpectrum; 2]| {
        let ratio = normalize_spectrum(&s[0], &s[1]).unwrap().spectrum;
        find_peak_fwhm(&ratio, Interpolation::LogFrequency).unwrap()
    };
    let (bc, bd) = (band(&cwt), band(&dft));
    assert!(bc.width() > bd.width(), "cwt {} dft {}", bc.width(), bd.width());
}

#[test]
fn tapered_noise_power_matches_variance_on_average() {
    let mut ratios = 0.0;
    let seeds = 8;
    for seed in 0..seeds {
        let g = noise_grid(128, 128, 100 + seed);
        let mean_sq = g.values().iter().map(|v| v * v).sum::<f64>() / g.values().len() as f64;
        let total: f64 = dft_periodogram(&g, Window::Hann).unwrap().power.iter().sum();
        ratios += total / mean_sq;
    }
    let mean_ratio = ratios / seeds as f64;
    assert!((mean_ratio - 1.0).abs() < 0.01, "{mean_ratio}");
}
