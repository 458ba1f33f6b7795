//! CSV spectra and PNG images.

use std::io::Cursor;
use std::path::Path;

use image::{ImageFormat, RgbImage as PngRgb, GrayImage};
use terrain_cwt_core::{PowerSpectrum, RgbImage};

use crate::atomic::write_atomic;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 4] = ["frequency_per_m", "wavelength_m", "power", "method"];

/// One header line, then one block per spectrum. Every block runs from short
/// to long wavelength so blocks from different methods line up.
pub fn spectrum_csv(spectra: &[&PowerSpectrum]) -> std::result::Result<Vec<u8>, csv::Error> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER)?;
    for spectrum in spectra {
        let method = spectrum.method().name();
        for s in spectrum.samples().iter().rev() {
            writer.write_record([
                s.frequency.to_string(),
                s.wavelength.to_string(),
                s.power.to_string(),
                method.to_string(),
            ])?;
        }
    }
    writer.into_inner().map_err(|e| e.into_error().into())
}

pub fn write_spectrum_csv(spectra: &[&PowerSpectrum], path: &Path) -> Result<()> {
    let bytes = spectrum_csv(spectra).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    write_atomic(path, &bytes)
}

/// Flips a south-first raster to the top-row-first order images use.
pub fn north_up<T: Copy>(values: &[T], rows: usize, cols: usize) -> Vec<T> {
    values.chunks_exact(cols).rev().take(rows).flatten().copied().collect()
}

fn encode_png(path: &Path, encode: impl FnOnce(&mut Cursor<Vec<u8>>) -> image::ImageResult<()>) -> Result<()> {
    let mut buf = Cursor::new(Vec::new());
    encode(&mut buf).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })?;
    write_atomic(path, buf.get_ref())
}

/// Writes an 8-bit grayscale PNG from a south-first raster.
pub fn write_gray_png(values: &[u8], rows: usize, cols: usize, path: &Path) -> Result<()> {
    let image = GrayImage::from_raw(cols as u32, rows as u32, north_up(values, rows, cols))
        .expect("buffer length matches dimensions");
    encode_png(path, |buf| image.write_to(buf, ImageFormat::Png))
}

/// Writes an RGB image, already in top-row-first order.
pub fn write_rgb_png(image: &RgbImage, path: &Path) -> Result<()> {
    let png = PngRgb::from_raw(image.width as u32, image.height as u32, image.as_bytes())
        .expect("buffer length matches dimensions");
    encode_png(path, |buf| png.write_to(buf, ImageFormat::Png))
}

#[cfg(test)]
mod tests {
    use super::*;
    use terrain_cwt_core::Method;

    #[test]
    fn csv_blocks_run_from_short_to_long_wavelength() {
        let s = PowerSpectrum::new([(0.25, 1.0), (0.5, 2.5)], Method::Dft, (4, 4), 1.0).unwrap();
        let text = String::from_utf8(spectrum_csv(&[&s]).unwrap()).unwrap();
        assert_eq!(
            text,
            "frequency_per_m,wavelength_m,power,method\n0.5,2,2.5,dft\n0.25,4,1,dft\n"
        );
    }

    #[test]
    fn north_up_reverses_rows() {
        assert_eq!(north_up(&[1, 2, 3, 4, 5, 6], 3, 2), vec![5, 6, 3, 4, 1, 2]);
    }
}
