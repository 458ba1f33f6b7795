//! Unit-energy 2D Mexican hat wavelet and the 2D continuous wavelet transform.
//!
//! The mother wavelet is `ψ(x, y) = (2 − x² − y²)·exp(−(x² + y²)/2)/√(2π)`,
//! which has `∫∫ψ² = 1`. At scale `s` the analysing kernel is the
//! L²-preserving dilation `(1/s)·ψ(x/s, y/s)`, so every scale carries unit
//! energy and coefficient planes at different scales are directly comparable.
//!
//! The transform is evaluated in the frequency domain: the field is extended
//! by half-sample symmetric reflection, transformed once, multiplied by the
//! analytic Fourier transform of each scaled kernel and transformed back.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::fft::{signed_index, Direction, Fft2d};
use crate::{DemGrid, Error, Result};

/// Kernel support in units of scale; `|ψ| < 1e-4·ψ(0)` beyond it.
pub const TRUNCATION_RADIUS: f64 = 5.0;

/// Smallest default scale, in cells.
pub const DEFAULT_S0: f64 = 2.0;

/// Default ladder spacing exponent.
pub const DEFAULT_DELTA_J: f64 = 0.25;

const INV_SQRT_TAU: f64 = 0.398_942_280_401_432_7;

/// Mother wavelet at dimensionless coordinates.
pub fn mexican_hat(x: f64, y: f64) -> f64 {
    let r2 = x * x + y * y;
    INV_SQRT_TAU * (2.0 - r2) * (-0.5 * r2).exp()
}

/// Continuous Fourier transform of `(1/s)·ψ(x/s, y/s)` at spatial frequency
/// `(u, v)` in cycles per cell:
/// `s·(8π³/√(2π))·s²ρ²·exp(−2π²s²ρ²)` with `ρ² = u² + v²`.
///
/// Real, non-negative and radially symmetric; zero at the origin with its
/// single radial maximum at `ρ = 1/(√2·π·s)`.
pub fn mexican_hat_hat(u: f64, v: f64, s: f64) -> f64 {
    let q = s * s * (u * u + v * v);
    s * 8.0 * PI * PI * PI * INV_SQRT_TAU * q * (-2.0 * PI * PI * q).exp()
}

/// Radial frequency (cycles per cell) at which [`mexican_hat_hat`] peaks.
pub fn spectral_peak_frequency(s: f64) -> f64 {
    1.0 / (core::f64::consts::SQRT_2 * PI * s)
}

// 2π/√(5/2)
fn wavelength_per_scale() -> f64 {
    2.0 * PI / 2.5f64.sqrt()
}

/// Equivalent Fourier wavelength in metres of scale `s` (cells):
/// `λ = 2πs/√2.5 · Δ`.
pub fn scale_to_wavelength(s: f64, cell_size: f64) -> Result<f64> {
    check_positive(s)?;
    check_positive(cell_size)?;
    Ok(wavelength_per_scale() * s * cell_size)
}

/// Inverse of [`scale_to_wavelength`].
pub fn wavelength_to_scale(wavelength: f64, cell_size: f64) -> Result<f64> {
    check_positive(wavelength)?;
    check_positive(cell_size)?;
    Ok(wavelength / (cell_size * wavelength_per_scale()))
}

fn check_positive(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveInput)
    }
}

/// Dyadic scale ladder `s_j = s0·2^(j·δj)` for `j` in `j_min..=j_max`.
///
/// A ladder built by [`build_scale_set`] starts at `j = 0`; sub-ladders taken
/// with [`ScaleSet::restrict_to_band`] keep the parent's indices so each scale
/// value is bit-identical to its parent's.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSet {
    s0: f64,
    delta_j: f64,
    j_min: usize,
    j_max: usize,
}

/// Validates and builds `J + 1` scales starting at `s0` cells.
pub fn build_scale_set(s0: f64, delta_j: f64, count_minus_one: usize) -> Result<ScaleSet> {
    if !(s0.is_finite() && s0 >= 2.0) {
        return Err(Error::InvalidScaleParams("s0 must be at least 2 cells"));
    }
    if !(delta_j > 0.0 && delta_j <= 1.0) {
        return Err(Error::InvalidScaleParams("delta_j must lie in (0, 1]"));
    }
    Ok(ScaleSet {
        s0,
        delta_j,
        j_min: 0,
        j_max: count_minus_one,
    })
}

impl ScaleSet {
    /// Default ladder for a grid: `s0 = 2`, `δj = 0.25`, and `J` such that the
    /// largest equivalent wavelength is about a third of the smaller grid
    /// dimension (never fewer than two scales).
    pub fn default_for(rows: usize, cols: usize) -> Result<Self> {
        let target = wavelength_to_scale(rows.min(cols) as f64 / 3.0, 1.0)?;
        let steps = ((target / DEFAULT_S0).log2() / DEFAULT_DELTA_J).round();
        build_scale_set(DEFAULT_S0, DEFAULT_DELTA_J, steps.max(1.0) as usize)
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn delta_j(&self) -> f64 {
        self.delta_j
    }

    /// Ladder index range `(j_min, j_max)`.
    pub fn index_range(&self) -> (usize, usize) {
        (self.j_min, self.j_max)
    }

    pub fn len(&self) -> usize {
        self.j_max - self.j_min + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Scale of ladder index `j`.
    pub fn scale_at(&self, j: usize) -> f64 {
        self.s0 * 2f64.powf(j as f64 * self.delta_j)
    }

    /// Scales in ascending order.
    pub fn scales(&self) -> Vec<f64> {
        (self.j_min..=self.j_max).map(|j| self.scale_at(j)).collect()
    }

    pub fn max_scale(&self) -> f64 {
        self.scale_at(self.j_max)
    }

    /// Sub-ladder of the scales whose equivalent frequency `1/λ(s)` lies in
    /// `[f_lo, f_hi]` cycles per metre, or `None` when no scale qualifies.
    pub fn restrict_to_band(&self, f_lo: f64, f_hi: f64, cell_size: f64) -> Option<Self> {
        let inside: Vec<usize> = (self.j_min..=self.j_max)
            .filter(|&j| {
                let f = 1.0 / (wavelength_per_scale() * self.scale_at(j) * cell_size);
                f >= f_lo && f <= f_hi
            })
            .collect();
        Some(Self {
            j_min: *inside.first()?,
            j_max: *inside.last()?,
            ..self.clone()
        })
    }
}

/// Coefficient planes `CWT(a, b, s)`, one per scale, each shaped like the
/// source grid (row-major, south row first).
#[derive(Debug, Clone, PartialEq)]
pub struct CwtVolume {
    pub rows: usize,
    pub cols: usize,
    pub cell_size: f64,
    pub scales: ScaleSet,
    pub planes: Vec<Vec<f64>>,
}

/// Index into a half-sample symmetric extension (`… x1 x0 | x0 x1 …`) of a
/// length-`n` axis; the extension has period `2n`.
pub fn reflect(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period) as usize;
    if m < n {
        m
    } else {
        2 * n - 1 - m
    }
}

/// Mirror padding, in cells, needed by scales up to `s_max`.
pub fn padding_for(s_max: f64) -> usize {
    (TRUNCATION_RADIUS * s_max).ceil() as usize
}

/// The shared half of a multi-scale transform: the forward FFT of the
/// mirror-extended field. Each [`CwtEngine::plane`] call is independent.
#[derive(Debug, Clone)]
pub struct CwtEngine {
    rows: usize,
    cols: usize,
    padded_rows: usize,
    padded_cols: usize,
    offset_row: usize,
    offset_col: usize,
    fft: Fft2d,
    spectrum: Vec<Complex64>,
}

impl CwtEngine {
    /// Prepares a field for scales up to `s_max` cells.
    pub fn new(grid: &DemGrid, s_max: f64) -> Result<Self> {
        grid.require_complete()?;
        check_positive(s_max)?;
        let (rows, cols) = grid.shape();
        let wavelength_cells = wavelength_per_scale() * s_max;
        if wavelength_cells > 2.0 * rows.max(cols) as f64 {
            return Err(Error::ScaleTooLargeForGrid {
                scale: s_max,
                wavelength_cells,
                rows,
                cols,
            });
        }
        let pad = padding_for(s_max);
        let padded_rows = (rows + 2 * pad).next_power_of_two();
        let padded_cols = (cols + 2 * pad).next_power_of_two();
        let offset_row = (padded_rows - rows) / 2;
        let offset_col = (padded_cols - cols) / 2;
        let values = grid.values();
        let mut spectrum = Vec::with_capacity(padded_rows * padded_cols);
        for pr in 0..padded_rows {
            let r = reflect(pr as isize - offset_row as isize, rows);
            for pc in 0..padded_cols {
                let c = reflect(pc as isize - offset_col as isize, cols);
                spectrum.push(Complex64::new(values[r * cols + c], 0.0));
            }
        }
        let fft = Fft2d::new(padded_rows, padded_cols);
        fft.process(&mut spectrum, Direction::Forward);
        Ok(Self {
            rows,
            cols,
            padded_rows,
            padded_cols,
            offset_row,
            offset_col,
            fft,
            spectrum,
        })
    }

    /// Padded working extent `(rows, cols)`.
    pub fn padded_shape(&self) -> (usize, usize) {
        (self.padded_rows, self.padded_cols)
    }

    /// Coefficient plane at scale `s`, cropped to the source shape.
    pub fn plane(&self, s: f64) -> Vec<f64> {
        let (pr, pc) = (self.padded_rows, self.padded_cols);
        let v_axis: Vec<f64> = (0..pr).map(|k| signed_index(k, pr) / pr as f64).collect();
        let u_axis: Vec<f64> = (0..pc).map(|l| signed_index(l, pc) / pc as f64).collect();
        let mut buf = self.spectrum.clone();
        for (k, row) in buf.chunks_exact_mut(pc).enumerate() {
            let v = v_axis[k];
            for (z, &u) in row.iter_mut().zip(&u_axis) {
                *z *= mexican_hat_hat(u, v, s);
            }
        }
        self.fft.process(&mut buf, Direction::Inverse);
        let norm = 1.0 / (pr * pc) as f64;
        let mut out = Vec::with_capacity(self.rows * self.cols);
        for r in 0..self.rows {
            let start = (r + self.offset_row) * pc + self.offset_col;
            out.extend(buf[start..start + self.cols].iter().map(|z| z.re * norm));
        }
        out
    }

    /// Planes for every scale of `scales`, in ladder order.
    pub fn planes(&self, scales: &ScaleSet) -> Vec<Vec<f64>> {
        let list = scales.scales();
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            list.par_iter().map(|&s| self.plane(s)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            list.iter().map(|&s| self.plane(s)).collect()
        }
    }
}

/// 2D continuous wavelet transform of a complete (and normally detrended)
/// grid at every scale of `scales`.
pub fn cwt2d(grid: &DemGrid, scales: &ScaleSet) -> Result<CwtVolume> {
    let engine = CwtEngine::new(grid, scales.max_scale())?;
    Ok(CwtVolume {
        rows: grid.rows(),
        cols: grid.cols(),
        cell_size: grid.cell_size(),
        scales: scales.clone(),
        planes: engine.planes(scales),
    })
}

/// Samples the scaled kernel `(1/s)ψ(dx/s, dy/s)` on a `(2R+1)²` stencil of
/// integer offsets, `R = radius` cells, row-major with `dy` outer.
pub fn sampled_kernel(s: f64, radius: usize) -> Vec<f64> {
    let r = radius as isize;
    let mut k = vec![0.0; (2 * radius + 1) * (2 * radius + 1)];
    for dy in -r..=r {
        for dx in -r..=r {
            let idx = ((dy + r) * (2 * r + 1) + dx + r) as usize;
            k[idx] = mexican_hat(dx as f64 / s, dy as f64 / s) / s;
        }
    }
    k
}
