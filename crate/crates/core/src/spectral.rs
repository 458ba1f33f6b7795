//! Power spectra by wavelet variance and by DFT periodogram, rugged/flat
//! normalization, and peak + FWHM band extraction.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::fft::{norm_sqr, signed_index, Direction, Fft2d};
use crate::wavelet::{scale_to_wavelength, CwtVolume};
use crate::{DemGrid, Error, Result};

/// Normalization drops flat-reference samples below this fraction of the
/// reference maximum.
pub const FLOOR_FRACTION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Cwt,
    Dft,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Cwt => "cwt",
            Method::Dft => "dft",
        }
    }
}

impl core::fmt::Display for Method {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    None,
    Hann,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSample {
    /// Cycles per metre.
    pub frequency: f64,
    pub power: f64,
    /// Metres; always `1 / frequency`.
    pub wavelength: f64,
}

/// One-dimensional power spectrum on an ascending frequency axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    samples: Vec<SpectrumSample>,
    method: Method,
    shape: (usize, usize),
    cell_size: f64,
}

impl PowerSpectrum {
    /// Builds a spectrum from `(frequency, power)` pairs. Frequencies must be
    /// positive and strictly increasing, powers finite and non-negative.
    pub fn new(
        points: impl IntoIterator<Item = (f64, f64)>,
        method: Method,
        shape: (usize, usize),
        cell_size: f64,
    ) -> Result<Self> {
        let samples: Vec<SpectrumSample> = points
            .into_iter()
            .map(|(frequency, power)| SpectrumSample {
                frequency,
                power,
                wavelength: 1.0 / frequency,
            })
            .collect();
        let mut previous = 0.0;
        for s in &samples {
            if !(s.frequency.is_finite() && s.frequency > previous) {
                return Err(Error::AxisMismatch("frequencies must be positive and strictly increasing"));
            }
            if !(s.power.is_finite() && s.power >= 0.0) {
                return Err(Error::AxisMismatch("powers must be finite and non-negative"));
            }
            previous = s.frequency;
        }
        Ok(Self {
            samples,
            method,
            shape,
            cell_size,
        })
    }

    pub fn samples(&self) -> &[SpectrumSample] {
        &self.samples
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Shape `(rows, cols)` of the source grid.
    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.frequency).collect()
    }

    pub fn powers(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.power).collect()
    }

    /// Frequency of the largest power (first one on ties).
    pub fn argmax_frequency(&self) -> Option<f64> {
        let mut best: Option<&SpectrumSample> = None;
        for s in &self.samples {
            if best.map_or(true, |b| s.power > b.power) {
                best = Some(s);
            }
        }
        best.map(|s| s.frequency)
    }
}

/// Wavelet variance spectrum: for each scale,
/// `σ²(s) = Σ_{a,b} CWT(a,b,s)² / (2·Na·Nb)`, placed at frequency
/// `1/λ(s)` with `λ` from [`scale_to_wavelength`].
pub fn cwt_variance_spectrum(volume: &CwtVolume) -> Result<PowerSpectrum> {
    let n = (volume.rows * volume.cols) as f64;
    let mut points: Vec<(f64, f64)> = volume
        .scales
        .scales()
        .into_iter()
        .zip(&volume.planes)
        .map(|(s, plane)| {
            let power = plane.iter().map(|c| c * c).sum::<f64>() / (2.0 * n);
            scale_to_wavelength(s, volume.cell_size).map(|lambda| (1.0 / lambda, power))
        })
        .collect::<Result<_>>()?;
    points.reverse();
    PowerSpectrum::new(points, Method::Cwt, (volume.rows, volume.cols), volume.cell_size)
}

/// Periodogram `p(k,l) = |F(k,l)|²/(M²N²)` on the full DFT lattice.
///
/// `k` indexes rows (northward frequency), `l` columns (eastward); DC sits at
/// index 0 and bins above Nyquist hold negative frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram2D {
    pub rows: usize,
    pub cols: usize,
    pub cell_size: f64,
    pub power: Vec<f64>,
}

impl Periodogram2D {
    /// Frequency steps `(1/(MΔ), 1/(NΔ))` along rows and columns.
    pub fn frequency_steps(&self) -> (f64, f64) {
        (
            1.0 / (self.rows as f64 * self.cell_size),
            1.0 / (self.cols as f64 * self.cell_size),
        )
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.power[k * self.cols + l]
    }

    /// Radial frequency in cycles per metre of lattice point `(k, l)`.
    pub fn radial_frequency(&self, k: usize, l: usize) -> f64 {
        let (dfy, dfx) = self.frequency_steps();
        let fy = signed_index(k, self.rows) * dfy;
        let fx = signed_index(l, self.cols) * dfx;
        fy.hypot(fx)
    }

    /// Sum of power over lattice points with radial frequency in `[f_lo, f_hi]`.
    pub fn band_power(&self, f_lo: f64, f_hi: f64) -> f64 {
        let mut total = 0.0;
        for k in 0..self.rows {
            for l in 0..self.cols {
                let f = self.radial_frequency(k, l);
                if f >= f_lo && f <= f_hi {
                    total += self.get(k, l);
                }
            }
        }
        total
    }
}

/// Periodic Hann taper of length `n`.
pub fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

/// DFT periodogram of a complete grid. With [`Window::Hann`] the field is
/// tapered by a separable Hann window and the result divided by the taper's
/// mean-square gain.
pub fn dft_periodogram(grid: &DemGrid, window: Window) -> Result<Periodogram2D> {
    grid.require_complete()?;
    let (rows, cols) = grid.shape();
    let values = grid.values();
    let (taper_rows, taper_cols, gain) = match window {
        Window::None => (None, None, 1.0),
        Window::Hann => {
            let (wr, wc) = (hann(rows), hann(cols));
            let mean_sq = |w: &[f64]| w.iter().map(|x| x * x).sum::<f64>() / w.len() as f64;
            let gain = mean_sq(&wr) * mean_sq(&wc);
            (Some(wr), Some(wc), gain)
        }
    };
    let mut data: Vec<Complex64> = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let wr = taper_rows.as_ref().map_or(1.0, |w| w[r]);
        for c in 0..cols {
            let wc = taper_cols.as_ref().map_or(1.0, |w| w[c]);
            data.push(Complex64::new(values[r * cols + c] * wr * wc, 0.0));
        }
    }
    Fft2d::new(rows, cols).process(&mut data, Direction::Forward);
    let norm = 1.0 / ((rows * cols) as f64).powi(2) / gain;
    Ok(Periodogram2D {
        rows,
        cols,
        cell_size: grid.cell_size(),
        power: data.into_iter().map(|z| norm_sqr(z) * norm).collect(),
    })
}

/// Bin sums and counts of the annulus average; index `b` covers radial
/// frequencies in `[(b − ½)w, (b + ½)w)` with `w = 1/(max(M,N)·Δ)`.
fn radial_bins(p: &Periodogram2D) -> (f64, Vec<f64>, Vec<usize>) {
    let width = 1.0 / (p.rows.max(p.cols) as f64 * p.cell_size);
    let mut sums: Vec<f64> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for k in 0..p.rows {
        for l in 0..p.cols {
            if k == 0 && l == 0 {
                continue;
            }
            let bin = (p.radial_frequency(k, l) / width + 0.5).floor() as usize;
            if bin >= sums.len() {
                sums.resize(bin + 1, 0.0);
                counts.resize(bin + 1, 0);
            }
            sums[bin] += p.get(k, l);
            counts[bin] += 1;
        }
    }
    (width, sums, counts)
}

/// Collapses the lattice into annulus means one fundamental frequency wide.
/// DC and empty bins are left out.
pub fn radial_average(p: &Periodogram2D) -> Result<PowerSpectrum> {
    let (width, sums, counts) = radial_bins(p);
    let points = sums
        .iter()
        .zip(&counts)
        .enumerate()
        .filter(|&(b, (_, &n))| b > 0 && n > 0)
        .map(|(b, (&sum, &n))| (b as f64 * width, sum / n as f64));
    PowerSpectrum::new(points, Method::Dft, (p.rows, p.cols), p.cell_size)
}

/// Number of lattice points behind each sample of [`radial_average`].
pub fn radial_counts(p: &Periodogram2D) -> Vec<usize> {
    let (_, _, counts) = radial_bins(p);
    counts.into_iter().skip(1).filter(|&n| n > 0).collect()
}

/// Ratio spectrum plus the frequencies dropped because the flat reference
/// was below the floor there.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSpectrum {
    pub spectrum: PowerSpectrum,
    pub dropped: Vec<f64>,
}

/// Pointwise `rugged / flat` on a shared frequency axis.
pub fn normalize_spectrum(rugged: &PowerSpectrum, flat: &PowerSpectrum) -> Result<NormalizedSpectrum> {
    if rugged.method != flat.method {
        return Err(Error::AxisMismatch("spectra come from different methods"));
    }
    if rugged.len() != flat.len() {
        return Err(Error::AxisMismatch("spectra have different lengths"));
    }
    let same_axis = rugged
        .samples
        .iter()
        .zip(&flat.samples)
        .all(|(a, b)| (a.frequency - b.frequency).abs() <= 1e-9 * a.frequency.max(b.frequency));
    if !same_axis {
        return Err(Error::AxisMismatch("frequency axes differ"));
    }
    let max_flat = flat.samples.iter().fold(0.0f64, |m, s| m.max(s.power));
    let floor = FLOOR_FRACTION * max_flat;
    let mut points = Vec::with_capacity(rugged.len());
    let mut dropped = Vec::new();
    for (r, f) in rugged.samples.iter().zip(&flat.samples) {
        if f.power < floor || f.power == 0.0 {
            dropped.push(r.frequency);
        } else {
            points.push((r.frequency, r.power / f.power));
        }
    }
    if points.is_empty() {
        return Err(Error::AllBinsFloored);
    }
    Ok(NormalizedSpectrum {
        spectrum: PowerSpectrum::new(points, rugged.method, rugged.shape, rugged.cell_size)?,
        dropped,
    })
}

/// How half-maximum crossings are interpolated between samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    #[default]
    LogFrequency,
    LinearFrequency,
}

/// A spectral peak and its full-width-at-half-maximum band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandResult {
    pub peak_wavelength: f64,
    pub peak_frequency: f64,
    pub peak_power: f64,
    pub f_lo: f64,
    pub f_hi: f64,
    /// The low-frequency half-maximum crossing was not reached; `f_lo` is the
    /// first sample's frequency.
    pub censored_lo: bool,
    /// Same for the high-frequency side.
    pub censored_hi: bool,
    pub method: Method,
}

impl BandResult {
    pub fn width(&self) -> f64 {
        self.f_hi - self.f_lo
    }
}

/// Finds the global maximum (ignoring the lowest-frequency sample) and its
/// half-maximum edges.
pub fn find_peak_fwhm(spectrum: &PowerSpectrum, interpolation: Interpolation) -> Result<BandResult> {
    let s = &spectrum.samples;
    let n = s.len();
    if n < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: n });
    }
    let mut idx = 1;
    for i in 2..n {
        if s[i].power > s[idx].power {
            idx = i;
        }
    }
    let peak = s[idx].power;
    // the peak must be an interior local maximum, strictly above one neighbour
    let (left, right) = (s[idx - 1].power, s.get(idx + 1).map_or(f64::INFINITY, |x| x.power));
    if idx == n - 1 || peak <= 0.0 || peak < left || peak < right || (peak == left && peak == right) {
        return Err(Error::NoPeak);
    }
    let half = peak / 2.0;
    let axis = |f: f64| match interpolation {
        Interpolation::LogFrequency => f.ln(),
        Interpolation::LinearFrequency => f,
    };
    let unaxis = |x: f64| match interpolation {
        Interpolation::LogFrequency => x.exp(),
        Interpolation::LinearFrequency => x,
    };
    // crossing between `below` (power <= half) and `above` (power > half)
    let crossing = |below: &SpectrumSample, above: &SpectrumSample| {
        let t = (half - below.power) / (above.power - below.power);
        let x = axis(below.frequency) + t * (axis(above.frequency) - axis(below.frequency));
        unaxis(x)
    };
    let (f_lo, censored_lo) = match (0..idx).rev().find(|&i| s[i].power <= half) {
        Some(i) => (crossing(&s[i], &s[i + 1]), false),
        None => (s[0].frequency, true),
    };
    let (f_hi, censored_hi) = match (idx + 1..n).find(|&i| s[i].power <= half) {
        Some(i) => (crossing(&s[i], &s[i - 1]), false),
        None => (s[n - 1].frequency, true),
    };
    Ok(BandResult {
        peak_wavelength: s[idx].wavelength,
        peak_frequency: s[idx].frequency,
        peak_power: peak,
        f_lo,
        f_hi,
        censored_lo,
        censored_hi,
        method: spectrum.method,
    })
}
