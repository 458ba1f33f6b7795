//! Gradient, slope/aspect and hillshade.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use core::f64::consts::TAU;


use crate::{DemGrid, Error, Result};

/// Light source position. Angles are degrees at the interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadeParams {
    azimuth_deg: f64,
    altitude_deg: f64,
}

impl ShadeParams {
    pub const DEFAULT_AZIMUTH: f64 = 235.0;
    pub const DEFAULT_ALTITUDE: f64 = 45.0;

    /// `azimuth_deg` clockwise from north in `[0, 360)`, `altitude_deg` above
    /// the horizon in `(0, 90]`.
    pub fn new(azimuth_deg: f64, altitude_deg: f64) -> Result<Self> {
        if !(0.0..360.0).contains(&azimuth_deg) {
            return Err(Error::InvalidShadeParams("azimuth must lie in [0, 360)"));
        }
        if !(altitude_deg > 0.0 && altitude_deg <= 90.0) {
            return Err(Error::InvalidShadeParams("altitude must lie in (0, 90]"));
        }
        Ok(Self {
            azimuth_deg,
            altitude_deg,
        })
    }

    pub fn azimuth_deg(&self) -> f64 {
        self.azimuth_deg
    }

    pub fn altitude_deg(&self) -> f64 {
        self.altitude_deg
    }

    pub fn zenith_deg(&self) -> f64 {
        90.0 - self.altitude_deg
    }
}

impl Default for ShadeParams {
    fn default() -> Self {
        Self {
            azimuth_deg: Self::DEFAULT_AZIMUTH,
            altitude_deg: Self::DEFAULT_ALTITUDE,
        }
    }
}

/// Elevation change per metre along +x (east) and +y (north).
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub rows: usize,
    pub cols: usize,
    pub dzdx: Vec<f64>,
    pub dzdy: Vec<f64>,
}

/// Unweighted finite differences: central in the interior, one-sided on the
/// border rows and columns.
pub fn gradient(grid: &DemGrid) -> Result<GradientField> {
    grid.require_complete()?;
    let (rows, cols) = grid.shape();
    let d = grid.cell_size();
    let z = grid.values();
    let at = |r: usize, c: usize| z[r * cols + c];
    let mut dzdx = Vec::with_capacity(rows * cols);
    let mut dzdy = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            dzdx.push(difference(c, cols, |i| at(r, i)) / d);
            dzdy.push(difference(r, rows, |i| at(i, c)) / d);
        }
    }
    Ok(GradientField {
        rows,
        cols,
        dzdx,
        dzdy,
    })
}

// Derivative in index units along one axis; zero on a single-cell axis.
fn difference(i: usize, n: usize, f: impl Fn(usize) -> f64) -> f64 {
    if n < 2 {
        0.0
    } else if i == 0 {
        f(1) - f(0)
    } else if i == n - 1 {
        f(n - 1) - f(n - 2)
    } else {
        (f(i + 1) - f(i - 1)) / 2.0
    }
}

/// Slope angle in radians.
pub fn slope_at(dzdx: f64, dzdy: f64) -> f64 {
    dzdx.hypot(dzdy).atan()
}

/// Direction of steepest descent in radians clockwise from north, in
/// `[0, 2π)`. Flat cells get 0.
pub fn aspect_at(dzdx: f64, dzdy: f64) -> f64 {
    if dzdx == 0.0 && dzdy == 0.0 {
        return 0.0;
    }
    // descent vector (-dzdx, -dzdy) in (east, north); bearing = atan2(east, north)
    let a = (-dzdx).atan2(-dzdy);
    if a < 0.0 {
        a + TAU
    } else if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Slope and aspect rasters, both in radians.
pub fn slope_aspect(grad: &GradientField) -> (Vec<f64>, Vec<f64>) {
    grad.dzdx
        .iter()
        .zip(&grad.dzdy)
        .map(|(&gx, &gy)| (slope_at(gx, gy), aspect_at(gx, gy)))
        .unzip()
}

/// Unclamped illumination `255·(cos z·cos s + sin z·sin s·cos(az − aspect))`.
pub fn illumination(params: &ShadeParams, slope: f64, aspect: f64) -> f64 {
    let zenith = params.zenith_deg().to_radians();
    let azimuth = params.azimuth_deg.to_radians();
    255.0 * (zenith.cos() * slope.cos() + zenith.sin() * slope.sin() * (azimuth - aspect).cos())
}

/// Shade byte for one cell: illumination clamped to `[0, 255]` and rounded.
pub fn shade_value(params: &ShadeParams, slope: f64, aspect: f64) -> u8 {
    illumination(params, slope, aspect).clamp(0.0, 255.0).round() as u8
}

/// 8-bit hillshade raster in the grid's row order (south row first).
pub fn hillshade(grid: &DemGrid, params: &ShadeParams) -> Result<Vec<u8>> {
    let grad = gradient(grid)?;
    Ok(grad
        .dzdx
        .iter()
        .zip(&grad.dzdy)
        .map(|(&gx, &gy)| shade_value(params, slope_at(gx, gy), aspect_at(gx, gy)))
        .collect())
}
