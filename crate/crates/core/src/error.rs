use thiserror::Error;

/// Errors produced by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("grid contains {count} nodata cells")]
    ContainsNoData { count: usize },
    #[error("nodata fraction {fraction:.4} exceeds the allowed {max_fraction:.4}")]
    TooManyVoids { fraction: f64, max_fraction: f64 },
    #[error("wavelength {wavelength} m is not above the Nyquist limit of {nyquist} m")]
    SubNyquistWavelength { wavelength: f64, nyquist: f64 },
    #[error("invalid synthetic terrain parameters: {0}")]
    InvalidSynthSpec(&'static str),
    #[error("window rows {row0}..{row_end}, cols {col0}..{col_end} lies outside a {rows}x{cols} grid")]
    OutOfBounds {
        row0: usize,
        col0: usize,
        row_end: usize,
        col_end: usize,
        rows: usize,
        cols: usize,
    },
    #[error("input must be finite and positive")]
    NonPositiveInput,
    #[error("invalid scale ladder: {0}")]
    InvalidScaleParams(&'static str),
    #[error("scale {scale} (wavelength {wavelength_cells:.1} cells) is too large for a {rows}x{cols} grid")]
    ScaleTooLargeForGrid {
        scale: f64,
        wavelength_cells: f64,
        rows: usize,
        cols: usize,
    },
    #[error("invalid shading parameters: {0}")]
    InvalidShadeParams(&'static str),
    #[error("spectra do not share a frequency axis: {0}")]
    AxisMismatch(&'static str),
    #[error("every sample of the flat reference spectrum is below the noise floor")]
    AllBinsFloored,
    #[error("spectrum has no interior peak")]
    NoPeak,
    #[error("spectrum needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid frequency band [{f_lo}, {f_hi}]")]
    InvalidBand { f_lo: f64, f_hi: f64 },
    #[error("no scale of the ladder falls inside the band [{f_lo}, {f_hi}] cycles/m")]
    EmptyBand { f_lo: f64, f_hi: f64 },
    #[error("window of {window} cells does not fit a {rows}x{cols} grid")]
    WindowLargerThanGrid { window: usize, rows: usize, cols: usize },
    #[error("invalid window overlap {0}; expected 0 <= overlap < 1")]
    InvalidOverlap(f64),
    #[error("power map has no positive value")]
    AllZeroMap,
    #[error("invalid clip percentiles ({lo}, {hi})")]
    InvalidPercentiles { lo: f64, hi: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
