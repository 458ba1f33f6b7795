//! Spectral terrain analysis of digital elevation models.
//!
//! The crate is `no_std` (it needs `alloc`) and carries the numerical side of
//! the toolkit:
//!
//! - [`grid`]: the [`DemGrid`] raster, nodata filling, plane detrending,
//!   cropping and synthetic terrain.
//! - [`hillshade`]: gradients, slope/aspect and illumination shading.
//! - [`wavelet`]: the unit-energy 2D Mexican hat, the scale/wavelength law and
//!   the FFT-accelerated 2D continuous wavelet transform.
//! - [`spectral`]: wavelet variance spectra, DFT periodograms, radial
//!   averaging, rugged/flat normalization and peak + FWHM band extraction.
//! - [`riskmap`]: per-cell band power maps by both methods and their
//!   log-scale color rendering.
//!
//! File formats, PNG encoding and the command line live in the `terrain-cwt`
//! crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
pub mod fft;
pub mod grid;
pub mod hillshade;
pub mod riskmap;
pub mod spectral;
pub mod wavelet;

pub use error::{Error, Result};
pub use grid::{DemGrid, SynthKind, SynthSpec};
pub use hillshade::{GradientField, ShadeParams};
pub use riskmap::{FrequencyBand, PowerMap, RenderedMap, RgbImage};
pub use spectral::{BandResult, Method, Periodogram2D, PowerSpectrum, Window};
pub use wavelet::{CwtVolume, ScaleSet};
