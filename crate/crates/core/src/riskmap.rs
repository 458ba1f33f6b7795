//! Per-cell band power maps and their color rendering.
//!
//! A high value marks terrain whose relief concentrates energy in the band
//! typical of landslide-prone slopes.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;


use crate::grid::{crop, detrend_plane};
use crate::spectral::{dft_periodogram, Method, Window};
use crate::wavelet::{build_scale_set, wavelength_to_scale, CwtEngine, ScaleSet};
use crate::{DemGrid, Error, Result};

/// Rendering floor relative to the map maximum.
pub const EPSILON_FRACTION: f64 = 1e-12;

pub const DEFAULT_CLIP_PERCENTILES: (f64, f64) = (2.0, 98.0);

pub const DEFAULT_OVERLAP: f64 = 0.5;

/// Closed frequency band in cycles per metre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyBand {
    f_lo: f64,
    f_hi: f64,
}

impl FrequencyBand {
    pub fn new(f_lo: f64, f_hi: f64) -> Result<Self> {
        if !(f_lo.is_finite() && f_hi.is_finite() && f_lo > 0.0 && f_lo < f_hi) {
            return Err(Error::InvalidBand { f_lo, f_hi });
        }
        Ok(Self { f_lo, f_hi })
    }

    /// Band between two wavelengths in metres, in either order.
    pub fn from_wavelengths(a: f64, b: f64) -> Result<Self> {
        let (short, long) = if a < b { (a, b) } else { (b, a) };
        Self::new(1.0 / long, 1.0 / short)
    }

    pub fn f_lo(&self) -> f64 {
        self.f_lo
    }

    pub fn f_hi(&self) -> f64 {
        self.f_hi
    }

    pub fn contains(&self, f: f64) -> bool {
        f >= self.f_lo && f <= self.f_hi
    }
}

/// Summed in-band power per cell, shaped like the source grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerMap {
    pub rows: usize,
    pub cols: usize,
    pub cell_size: f64,
    pub values: Vec<f64>,
    pub method: Method,
    pub band: FrequencyBand,
}

impl PowerMap {
    pub fn max(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &v| m.max(v))
    }

    /// `(log10 ε, log10 max)` with `ε = 1e-12·max`; `None` for an all-zero map.
    pub fn log10_range(&self) -> Option<(f64, f64)> {
        let max = self.max();
        (max > 0.0).then(|| ((EPSILON_FRACTION * max).log10(), max.log10()))
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }
}

/// Scales of the `(s0, δj)` ladder whose equivalent frequency lies in `band`.
pub fn band_scales(band: &FrequencyBand, s0: f64, delta_j: f64, cell_size: f64) -> Result<ScaleSet> {
    let empty = || Error::EmptyBand {
        f_lo: band.f_lo,
        f_hi: band.f_hi,
    };
    // largest scale worth generating: the one at f_lo
    let top = wavelength_to_scale(1.0 / band.f_lo, cell_size)?;
    if top < s0 {
        return Err(empty());
    }
    let steps = ((top / s0).log2() / delta_j).floor() as usize;
    build_scale_set(s0, delta_j, steps)?
        .restrict_to_band(band.f_lo, band.f_hi, cell_size)
        .ok_or_else(empty)
}

/// Per-cell `Σ_s CWT(a,b,s)²` over the ladder scales inside `band`.
pub fn cwt_band_power_map(grid: &DemGrid, band: &FrequencyBand, s0: f64, delta_j: f64) -> Result<PowerMap> {
    let scales = band_scales(band, s0, delta_j, grid.cell_size())?;
    cwt_power_map_for_scales(grid, &scales, *band)
}

/// Same as [`cwt_band_power_map`] for an explicit scale set.
pub fn cwt_power_map_for_scales(grid: &DemGrid, scales: &ScaleSet, band: FrequencyBand) -> Result<PowerMap> {
    let engine = CwtEngine::new(grid, scales.max_scale())?;
    let mut values = vec![0.0; grid.rows() * grid.cols()];
    for plane in engine.planes(scales) {
        for (acc, c) in values.iter_mut().zip(plane) {
            *acc += c * c;
        }
    }
    Ok(PowerMap {
        rows: grid.rows(),
        cols: grid.cols(),
        cell_size: grid.cell_size(),
        values,
        method: Method::Cwt,
        band,
    })
}

/// Smallest power of two covering two periods of the band's lowest frequency.
pub fn default_window_cells(band: &FrequencyBand, cell_size: f64) -> usize {
    let cells = (2.0 / (band.f_lo * cell_size)).ceil().max(2.0) as usize;
    cells.next_power_of_two()
}

/// A DFT band power map and the tiling that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct DftPowerMap {
    pub map: PowerMap,
    pub window: usize,
    pub step: usize,
    /// The window spans fewer than two periods of `f_lo`.
    pub under_resolved: bool,
}

/// Tile origins along one axis: every `step` cells, plus a final tile flush
/// with the far edge.
fn tile_starts(n: usize, window: usize, step: usize) -> Vec<usize> {
    let mut starts: Vec<usize> = (0..=n - window).step_by(step).collect();
    if starts.last().map_or(true, |&s| s + window < n) {
        starts.push(n - window);
    }
    starts
}

/// Sliding-window DFT band power: each `window²` tile is plane-detrended,
/// Hann-tapered and reduced to the sum of its periodogram over lattice points
/// whose radial frequency lies in `band`. Tile values sit at tile centres and
/// are bilinearly interpolated to every cell (held constant beyond the outer
/// centres).
pub fn dft_band_power_map(grid: &DemGrid, band: &FrequencyBand, window: usize, overlap: f64) -> Result<DftPowerMap> {
    grid.require_complete()?;
    let (rows, cols) = grid.shape();
    if window < 2 || window > rows || window > cols {
        return Err(Error::WindowLargerThanGrid { window, rows, cols });
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::InvalidOverlap(overlap));
    }
    let step = ((window as f64 * (1.0 - overlap)).round() as usize).max(1);
    let row_starts = tile_starts(rows, window, step);
    let col_starts = tile_starts(cols, window, step);
    let tiles: Vec<(usize, usize)> = row_starts
        .iter()
        .flat_map(|&r| col_starts.iter().map(move |&c| (r, c)))
        .collect();
    let tile_power = |&(r0, c0): &(usize, usize)| -> Result<f64> {
        let tile = crop(grid, r0, c0, window, window)?;
        let (tile, _) = detrend_plane(&tile)?;
        Ok(dft_periodogram(&tile, Window::Hann)?.band_power(band.f_lo, band.f_hi))
    };
    #[cfg(feature = "parallel")]
    let powers: Vec<f64> = {
        use rayon::prelude::*;
        tiles.par_iter().map(tile_power).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let powers: Vec<f64> = tiles.iter().map(tile_power).collect::<Result<_>>()?;

    let centre = |s: usize| s as f64 + (window as f64 - 1.0) / 2.0;
    let row_centres: Vec<f64> = row_starts.iter().map(|&s| centre(s)).collect();
    let col_centres: Vec<f64> = col_starts.iter().map(|&s| centre(s)).collect();
    let row_weights: Vec<(usize, usize, f64)> = (0..rows).map(|r| bracket(&row_centres, r as f64)).collect();
    let col_weights: Vec<(usize, usize, f64)> = (0..cols).map(|c| bracket(&col_centres, c as f64)).collect();
    let nc = col_starts.len();
    let at = |i: usize, j: usize| powers[i * nc + j];
    let mut values = Vec::with_capacity(rows * cols);
    for &(i0, i1, ty) in &row_weights {
        for &(j0, j1, tx) in &col_weights {
            let low = at(i0, j0) * (1.0 - tx) + at(i0, j1) * tx;
            let high = at(i1, j0) * (1.0 - tx) + at(i1, j1) * tx;
            values.push((low * (1.0 - ty) + high * ty).max(0.0));
        }
    }
    Ok(DftPowerMap {
        map: PowerMap {
            rows,
            cols,
            cell_size: grid.cell_size(),
            values,
            method: Method::Dft,
            band: *band,
        },
        window,
        step,
        under_resolved: (window as f64) < 2.0 / (band.f_lo * grid.cell_size()),
    })
}

// Neighbouring centres around x and the weight of the upper one.
fn bracket(centres: &[f64], x: f64) -> (usize, usize, f64) {
    let last = centres.len() - 1;
    if x <= centres[0] {
        return (0, 0, 0.0);
    }
    if x >= centres[last] {
        return (last, last, 0.0);
    }
    let upper = centres.partition_point(|&c| c <= x);
    let lower = upper - 1;
    let t = (x - centres[lower]) / (centres[upper] - centres[lower]);
    (lower, upper, t)
}

/// 8-bit RGB raster, row-major, top row first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            pixels: vec![[255, 255, 255]; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        self.pixels[y * self.width + x] = rgb;
    }

    pub fn as_bytes(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }
}

// blue → cyan → green → yellow → red → dark wine
const RAMP: [[f64; 3]; 6] = [
    [8.0, 16.0, 140.0],
    [0.0, 220.0, 255.0],
    [20.0, 190.0, 40.0],
    [255.0, 240.0, 0.0],
    [220.0, 20.0, 10.0],
    [100.0, 0.0, 35.0],
];

/// Ramp color at position `t ∈ [0, 1]`.
pub fn ramp_color(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0) * (RAMP.len() - 1) as f64;
    let i = (t.floor() as usize).min(RAMP.len() - 2);
    let frac = t - i as f64;
    let mut out = [0u8; 3];
    for (ch, o) in out.iter_mut().enumerate() {
        let v = RAMP[i][ch] + (RAMP[i + 1][ch] - RAMP[i][ch]) * frac;
        *o = v.round() as u8;
    }
    out
}

/// Legend width in pixels, appended to the right of the map.
pub const LEGEND_WIDTH: usize = 24;
const LEGEND_GAP: usize = 6;
const LEGEND_STRIP: usize = 12;

/// A rendered power map and the log10 domain its color ramp spans.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderedMap {
    pub image: RgbImage,
    /// log10 power at the blue end of the ramp.
    pub log10_lo: f64,
    /// log10 power at the dark-wine end.
    pub log10_hi: f64,
    pub epsilon: f64,
}

impl RenderedMap {
    pub fn legend_decades(&self) -> f64 {
        self.log10_hi - self.log10_lo
    }
}

/// Maps cell values to ramp positions for a given log10 domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScale {
    pub lo: f64,
    pub hi: f64,
    pub epsilon: f64,
}

impl LogScale {
    /// Ramp position of a power value; cells at or below ε sit at 0.
    pub fn position(&self, power: f64) -> f64 {
        if power <= self.epsilon {
            return 0.0;
        }
        let v = (power + self.epsilon).log10();
        if self.hi > self.lo {
            ((v - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
        } else if v >= self.hi {
            1.0
        } else {
            0.0
        }
    }
}

/// Linear-interpolated percentile of an ascending slice.
fn percentile(sorted: &[f64], pct: f64) -> f64 {
    let rank = pct / 100.0 * (sorted.len() - 1) as f64;
    let i = rank.floor() as usize;
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + (sorted[j] - sorted[i]) * (rank - i as f64)
}

/// Log scale clipped at the given percentiles of `log10(power + ε)`.
pub fn log_scale(map: &PowerMap, clip_percentiles: (f64, f64)) -> Result<LogScale> {
    let (p_lo, p_hi) = clip_percentiles;
    if !(0.0..=100.0).contains(&p_lo) || !(0.0..=100.0).contains(&p_hi) || p_lo >= p_hi {
        return Err(Error::InvalidPercentiles { lo: p_lo, hi: p_hi });
    }
    let max = map.max();
    if !(max > 0.0) {
        return Err(Error::AllZeroMap);
    }
    let epsilon = EPSILON_FRACTION * max;
    let mut logs: Vec<f64> = map.values.iter().map(|&v| (v.max(0.0) + epsilon).log10()).collect();
    logs.sort_by(|a, b| a.total_cmp(b));
    Ok(LogScale {
        lo: percentile(&logs, p_lo),
        hi: percentile(&logs, p_hi),
        epsilon,
    })
}

/// Renders the map north-up with a vertical log10 legend strip on the right;
/// whole decades are ticked in black beside the strip.
pub fn render_power_map(map: &PowerMap, clip_percentiles: (f64, f64)) -> Result<RenderedMap> {
    let scale = log_scale(map, clip_percentiles)?;
    let height = map.rows;
    let mut image = RgbImage::new(map.cols + LEGEND_WIDTH, height);
    for r in 0..map.rows {
        let y = map.rows - 1 - r;
        for c in 0..map.cols {
            image.set(c, y, ramp_color(scale.position(map.get(r, c))));
        }
    }
    let x0 = map.cols + LEGEND_GAP;
    let span = scale.hi - scale.lo;
    for y in 0..height {
        let t = if height > 1 {
            1.0 - y as f64 / (height - 1) as f64
        } else {
            1.0
        };
        let color = ramp_color(t);
        for x in x0..x0 + LEGEND_STRIP {
            image.set(x, y, color);
        }
    }
    if span > 0.0 && height > 1 {
        let mut decade = scale.lo.ceil();
        while decade <= scale.hi {
            let t = (decade - scale.lo) / span;
            let y = ((1.0 - t) * (height - 1) as f64).round() as usize;
            for x in x0 + LEGEND_STRIP..(x0 + LEGEND_STRIP + 4).min(image.width) {
                image.set(x, y, [0, 0, 0]);
            }
            decade += 1.0;
        }
    }
    Ok(RenderedMap {
        image,
        log10_lo: scale.lo,
        log10_hi: scale.hi,
        epsilon: scale.epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::scale_to_wavelength;

    fn map(rows: usize, cols: usize, values: Vec<f64>) -> PowerMap {
        PowerMap {
            rows,
            cols,
            cell_size: 1.0,
            values,
            method: Method::Cwt,
            band: FrequencyBand::new(0.01, 0.1).unwrap(),
        }
    }

    #[test]
    fn band_validation() {
        assert!(FrequencyBand::new(0.0, 1.0).is_err());
        assert!(FrequencyBand::new(0.2, 0.1).is_err());
        assert!(FrequencyBand::new(0.1, f64::INFINITY).is_err());
        let b = FrequencyBand::from_wavelengths(3333.0, 1000.0).unwrap();
        assert!((b.f_lo() - 0.0003).abs() < 1e-7 && (b.f_hi() - 0.001).abs() < 1e-12);
    }

    #[test]
    fn band_scales_lie_in_band() {
        let band = FrequencyBand::from_wavelengths(20.0, 60.0).unwrap();
        let set = band_scales(&band, 2.0, 0.25, 1.0).unwrap();
        assert!(set.len() >= 2);
        for s in set.scales() {
            assert!(band.contains(1.0 / scale_to_wavelength(s, 1.0).unwrap()));
        }
        let tiny = FrequencyBand::new(0.2, 0.24).unwrap();
        assert!(matches!(band_scales(&tiny, 2.0, 0.25, 1.0), Err(Error::EmptyBand { .. })));
    }

    #[test]
    fn flat_grid_maps_are_zero() {
        let g = DemGrid::from_fn(48, 48, 1.0, |_, _| 0.0).unwrap();
        let band = FrequencyBand::from_wavelengths(10.0, 30.0).unwrap();
        let cwt = cwt_band_power_map(&g, &band, 2.0, 0.25).unwrap();
        assert!(cwt.values.iter().all(|&v| v == 0.0));
        let dft = dft_band_power_map(&g, &band, 16, 0.5).unwrap();
        assert!(dft.map.values.iter().all(|&v| v == 0.0));
        assert!(dft.under_resolved);
    }

    #[test]
    fn tiling_covers_both_edges() {
        assert_eq!(tile_starts(10, 4, 2), [0, 2, 4, 6]);
        assert_eq!(tile_starts(11, 4, 2), [0, 2, 4, 6, 7]);
        assert_eq!(tile_starts(4, 4, 2), [0]);
    }

    #[test]
    fn dft_window_checks() {
        let g = DemGrid::from_fn(16, 32, 1.0, |_, _| 0.0).unwrap();
        let band = FrequencyBand::new(0.05, 0.2).unwrap();
        assert!(matches!(
            dft_band_power_map(&g, &band, 32, 0.5),
            Err(Error::WindowLargerThanGrid { .. })
        ));
        assert!(matches!(dft_band_power_map(&g, &band, 8, 1.0), Err(Error::InvalidOverlap(_))));
        assert_eq!(default_window_cells(&band, 1.0), 64);
        assert_eq!(default_window_cells(&FrequencyBand::new(1.0 / 48.0, 0.1).unwrap(), 1.0), 128);
    }

    #[test]
    fn bilinear_bracket() {
        let c = [1.5, 3.5, 5.5];
        assert_eq!(bracket(&c, 0.0), (0, 0, 0.0));
        assert_eq!(bracket(&c, 9.0), (2, 2, 0.0));
        assert_eq!(bracket(&c, 2.5), (0, 1, 0.5));
        assert_eq!(bracket(&c, 3.5), (1, 2, 0.0));
    }

    #[test]
    fn two_value_map_uses_two_colors() {
        let values: Vec<f64> = (0..64).map(|i| if i % 2 == 0 { 0.0 } else { 5.0 }).collect();
        let rendered = render_power_map(&map(8, 8, values), DEFAULT_CLIP_PERCENTILES).unwrap();
        let mut colors: Vec<[u8; 3]> = (0..8)
            .flat_map(|y| (0..8).map(move |x| (x, y)))
            .map(|(x, y)| rendered.image.get(x, y))
            .collect();
        colors.sort();
        colors.dedup();
        assert_eq!(colors, {
            let mut v = vec![ramp_color(0.0), ramp_color(1.0)];
            v.sort();
            v
        });
        assert!((rendered.log10_lo - (5e-12f64).log10()).abs() < 1e-9);
        assert!((rendered.log10_hi - 5f64.log10()).abs() < 1e-9);
    }

    #[test]
    fn all_zero_map_is_rejected() {
        assert_eq!(render_power_map(&map(2, 2, vec![0.0; 4]), (2.0, 98.0)), Err(Error::AllZeroMap));
        assert!(matches!(
            render_power_map(&map(2, 2, vec![1.0; 4]), (50.0, 10.0)),
            Err(Error::InvalidPercentiles { .. })
        ));
    }

    #[test]
    fn image_is_north_up_with_legend() {
        // south row hot, north row cold
        let values: Vec<f64> = (0..16).map(|i| if i < 4 { 100.0 } else { 1e-3 }).collect();
        let rendered = render_power_map(&map(4, 4, values), (0.0, 100.0)).unwrap();
        assert_eq!(rendered.image.width, 4 + LEGEND_WIDTH);
        assert_eq!(rendered.image.get(0, 3), ramp_color(1.0));
        assert_eq!(rendered.image.get(0, 0), ramp_color(0.0));
        assert_eq!(rendered.image.get(4 + LEGEND_GAP, 0), ramp_color(1.0));
        assert_eq!(rendered.image.get(4 + LEGEND_GAP, 3), ramp_color(0.0));
    }
}
