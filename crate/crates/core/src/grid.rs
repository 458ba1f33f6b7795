//! Elevation raster model and the preprocessing steps that feed the spectral
//! routines.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use core::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::{Error, Result};

/// Default sentinel for missing elevations.
pub const DEFAULT_NODATA: f64 = -9999.0;

/// Largest tolerated share of nodata cells before a tile is rejected.
pub const DEFAULT_MAX_VOID_FRACTION: f64 = 0.1;

/// A rectangular elevation raster with square cells.
///
/// Rows are stored south-first: row 0 is the southernmost row, so `y`
/// increases with the row index. Columns run west to east.
#[derive(Debug, Clone, PartialEq)]
pub struct DemGrid {
    rows: usize,
    cols: usize,
    cell_size: f64,
    origin_x: f64,
    origin_y: f64,
    nodata: f64,
    values: Vec<f64>,
}

impl DemGrid {
    pub fn new(
        rows: usize,
        cols: usize,
        cell_size: f64,
        origin_x: f64,
        origin_y: f64,
        nodata: f64,
        values: Vec<f64>,
    ) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(Error::InvalidGrid("grid needs at least 2 rows and 2 columns"));
        }
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(Error::InvalidGrid("cell size must be finite and positive"));
        }
        if !(origin_x.is_finite() && origin_y.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite"));
        }
        if values.len() != rows * cols {
            return Err(Error::InvalidGrid("value count does not equal rows x cols"));
        }
        if values.iter().any(|&v| !v.is_finite() && !same_value(v, nodata)) {
            return Err(Error::InvalidGrid("values must be finite or the nodata sentinel"));
        }
        Ok(Self {
            rows,
            cols,
            cell_size,
            origin_x,
            origin_y,
            nodata,
            values,
        })
    }

    /// Grid with origin (0, 0) and the default nodata sentinel.
    pub fn from_values(rows: usize, cols: usize, cell_size: f64, values: Vec<f64>) -> Result<Self> {
        Self::new(rows, cols, cell_size, 0.0, 0.0, DEFAULT_NODATA, values)
    }

    /// Builds a grid by evaluating `f(row, col)` at every cell.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        cell_size: f64,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                values.push(f(r, c));
            }
        }
        Self::from_values(rows, cols, cell_size, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn origin(&self) -> (f64, f64) {
        (self.origin_x, self.origin_y)
    }

    pub fn nodata(&self) -> f64 {
        self.nodata
    }

    /// Row-major values, south row first.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn is_nodata(&self, value: f64) -> bool {
        same_value(value, self.nodata)
    }

    pub fn nodata_count(&self) -> usize {
        self.values.iter().filter(|&&v| self.is_nodata(v)).count()
    }

    /// Fails with [`Error::ContainsNoData`] if any cell is void.
    pub fn require_complete(&self) -> Result<()> {
        match self.nodata_count() {
            0 => Ok(()),
            count => Err(Error::ContainsNoData { count }),
        }
    }

    /// Same geometry, new values. Callers guarantee the length.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            values,
            ..self.clone()
        }
    }

    /// Cell-wise map over a complete grid; geometry is preserved.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

fn same_value(a: f64, b: f64) -> bool {
    a == b || (a.is_nan() && b.is_nan())
}

/// Replaces every nodata cell by the mean of its valid 8-neighbours, sweeping
/// until no voids remain. Each sweep reads only values from the previous one.
pub fn fill_nodata(grid: &DemGrid, max_fraction: f64) -> Result<DemGrid> {
    let total = grid.values.len();
    let voids = grid.nodata_count();
    let fraction = voids as f64 / total as f64;
    if fraction > max_fraction {
        return Err(Error::TooManyVoids {
            fraction,
            max_fraction,
        });
    }
    if voids == 0 {
        return Ok(grid.clone());
    }
    let (rows, cols) = grid.shape();
    let mut valid: Vec<bool> = grid.values.iter().map(|&v| !grid.is_nodata(v)).collect();
    let mut values = grid.values.clone();
    let mut remaining = voids;
    while remaining > 0 {
        let mut updates = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let idx = r * cols + c;
                if valid[idx] {
                    continue;
                }
                let (mut sum, mut n) = (0.0, 0usize);
                for dr in -1isize..=1 {
                    for dc in -1isize..=1 {
                        if dr == 0 && dc == 0 {
                            continue;
                        }
                        let (nr, nc) = (r as isize + dr, c as isize + dc);
                        if nr < 0 || nc < 0 || nr >= rows as isize || nc >= cols as isize {
                            continue;
                        }
                        let nidx = nr as usize * cols + nc as usize;
                        if valid[nidx] {
                            sum += values[nidx];
                            n += 1;
                        }
                    }
                }
                if n > 0 {
                    updates.push((idx, sum / n as f64));
                }
            }
        }
        if updates.is_empty() {
            // only reachable when every cell is void
            return Err(Error::TooManyVoids {
                fraction,
                max_fraction,
            });
        }
        remaining -= updates.len();
        for (idx, v) in updates {
            values[idx] = v;
            valid[idx] = true;
        }
    }
    Ok(grid.with_values(values))
}

/// Least-squares plane `z = a*x + b*y + c`, with `x`, `y` in metres measured
/// from the centre of cell (0, 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Plane {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.a * x + self.b * y + self.c
    }
}

/// Fits a plane to a complete grid. On a full rectangular lattice the centred
/// normal equations decouple, so no linear solve is needed.
pub fn fit_plane(grid: &DemGrid) -> Result<Plane> {
    grid.require_complete()?;
    let (rows, cols) = grid.shape();
    let d = grid.cell_size;
    let xm = (cols - 1) as f64 / 2.0;
    let ym = (rows - 1) as f64 / 2.0;
    let zm = grid.mean();
    let (mut sxz, mut syz) = (0.0, 0.0);
    for r in 0..rows {
        let dy = r as f64 - ym;
        for c in 0..cols {
            let dz = grid.get(r, c) - zm;
            sxz += (c as f64 - xm) * dz;
            syz += dy * dz;
        }
    }
    // Σ(x - x̄)² over the lattice, in cell units
    let sxx = rows as f64 * sum_sq_dev(cols);
    let syy = cols as f64 * sum_sq_dev(rows);
    // a one-cell-wide axis carries no tilt
    let a = if sxx > 0.0 { sxz / sxx / d } else { 0.0 };
    let b = if syy > 0.0 { syz / syy / d } else { 0.0 };
    let c = zm - a * xm * d - b * ym * d;
    Ok(Plane { a, b, c })
}

// Σ_{i<n} (i - (n-1)/2)² = n(n² - 1)/12
fn sum_sq_dev(n: usize) -> f64 {
    let n = n as f64;
    n * (n * n - 1.0) / 12.0
}

/// Subtracts the least-squares plane; the result has zero mean and no tilt.
pub fn detrend_plane(grid: &DemGrid) -> Result<(DemGrid, Plane)> {
    let plane = fit_plane(grid)?;
    let d = grid.cell_size;
    let cols = grid.cols;
    let values = grid
        .values
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let (r, c) = (i / cols, i % cols);
            z - plane.eval(c as f64 * d, r as f64 * d)
        })
        .collect();
    Ok((grid.with_values(values), plane))
}

/// Sub-raster of `height x width` cells starting at (`row0`, `col0`).
pub fn crop(grid: &DemGrid, row0: usize, col0: usize, height: usize, width: usize) -> Result<DemGrid> {
    let (row_end, col_end) = (row0.saturating_add(height), col0.saturating_add(width));
    if height == 0 || width == 0 || row_end > grid.rows || col_end > grid.cols {
        return Err(Error::OutOfBounds {
            row0,
            col0,
            row_end,
            col_end,
            rows: grid.rows,
            cols: grid.cols,
        });
    }
    let mut values = Vec::with_capacity(height * width);
    for r in row0..row_end {
        values.extend_from_slice(&grid.values[r * grid.cols + col0..r * grid.cols + col_end]);
    }
    // A 1x1 window is a legal crop even though it is not a spectral grid.
    Ok(DemGrid {
        rows: height,
        cols: width,
        cell_size: grid.cell_size,
        origin_x: grid.origin_x + col0 as f64 * grid.cell_size,
        origin_y: grid.origin_y + row0 as f64 * grid.cell_size,
        nodata: grid.nodata,
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    Flat,
    Plane,
    Sinusoid,
    FlatPlusNoise,
    /// Flat west half, sinusoid east half.
    CompositeHalf,
}

impl SynthKind {
    pub fn has_sinusoid(self) -> bool {
        matches!(self, SynthKind::Sinusoid | SynthKind::CompositeHalf)
    }

    pub fn name(self) -> &'static str {
        match self {
            SynthKind::Flat => "flat",
            SynthKind::Plane => "plane",
            SynthKind::Sinusoid => "sinusoid",
            SynthKind::FlatPlusNoise => "flat-plus-noise",
            SynthKind::CompositeHalf => "composite-half",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "flat" => SynthKind::Flat,
            "plane" => SynthKind::Plane,
            "sinusoid" => SynthKind::Sinusoid,
            "flat-plus-noise" => SynthKind::FlatPlusNoise,
            "composite-half" => SynthKind::CompositeHalf,
            _ => return None,
        })
    }
}

/// Parameters of a synthetic test surface.
///
/// `amplitude` is the sinusoid amplitude, the constant level of `flat`, and
/// for `plane` the rise over one `wavelength` along `orientation`. Gaussian
/// noise of `noise_sigma` is added to every kind when positive, drawn from a
/// ChaCha8 stream seeded with `seed` in row-major order, so two kinds with
/// the same seed share the same noise field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub amplitude: f64,
    pub wavelength: f64,
    /// Degrees counter-clockwise from the +x (east) axis.
    pub orientation: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(kind: SynthKind) -> Self {
        Self {
            kind,
            amplitude: 0.0,
            wavelength: 0.0,
            orientation: 0.0,
            noise_sigma: 0.0,
            seed: 0,
        }
    }

    pub fn sinusoid(amplitude: f64, wavelength: f64, orientation: f64) -> Self {
        Self {
            amplitude,
            wavelength,
            orientation,
            ..Self::new(SynthKind::Sinusoid)
        }
    }
}

/// Generates a deterministic synthetic surface.
///
/// The sinusoid is `A·sin(2π(x·cosθ + y·sinθ)/λ)` with `x = col·Δ`,
/// `y = row·Δ`.
pub fn synth_terrain(spec: &SynthSpec, rows: usize, cols: usize, cell_size: f64) -> Result<DemGrid> {
    if !(cell_size.is_finite() && cell_size > 0.0) {
        return Err(Error::InvalidGrid("cell size must be finite and positive"));
    }
    if !spec.amplitude.is_finite() || !spec.orientation.is_finite() {
        return Err(Error::InvalidSynthSpec("amplitude and orientation must be finite"));
    }
    if !(spec.noise_sigma.is_finite() && spec.noise_sigma >= 0.0) {
        return Err(Error::InvalidSynthSpec("noise sigma must be finite and non-negative"));
    }
    let needs_wavelength = spec.kind.has_sinusoid() || spec.kind == SynthKind::Plane;
    if needs_wavelength && !(spec.wavelength.is_finite() && spec.wavelength > 0.0) {
        return Err(Error::InvalidSynthSpec("wavelength must be finite and positive"));
    }
    if spec.kind.has_sinusoid() && spec.wavelength <= 2.0 * cell_size {
        return Err(Error::SubNyquistWavelength {
            wavelength: spec.wavelength,
            nyquist: 2.0 * cell_size,
        });
    }
    let theta = spec.orientation.to_radians();
    let (dir_x, dir_y) = (theta.cos(), theta.sin());
    let k = 2.0 * PI / spec.wavelength;
    let sinusoid = |r: usize, c: usize| {
        let (x, y) = (c as f64 * cell_size, r as f64 * cell_size);
        spec.amplitude * (k * (x * dir_x + y * dir_y)).sin()
    };
    let mut values = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            values[r * cols + c] = match spec.kind {
                SynthKind::Flat => spec.amplitude,
                SynthKind::FlatPlusNoise => 0.0,
                SynthKind::Plane => {
                    let (x, y) = (c as f64 * cell_size, r as f64 * cell_size);
                    spec.amplitude * (x * dir_x + y * dir_y) / spec.wavelength
                }
                SynthKind::Sinusoid => sinusoid(r, c),
                SynthKind::CompositeHalf if c < cols / 2 => 0.0,
                SynthKind::CompositeHalf => sinusoid(r, c),
            };
        }
    }
    if spec.noise_sigma > 0.0 {
        let normal = Normal::new(0.0, spec.noise_sigma)
            .map_err(|_| Error::InvalidSynthSpec("noise sigma"))?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        for v in values.iter_mut() {
            *v += normal.sample(&mut rng);
        }
    }
    DemGrid::from_values(rows, cols, cell_size, values)
}
