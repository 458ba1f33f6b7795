//! Command-line surface. Each subcommand resolves its parameters, records them
//! in a [`Manifest`] and writes its outputs atomically.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use terrain_cwt_core::grid::{detrend_plane, fill_nodata, synth_terrain, DEFAULT_MAX_VOID_FRACTION};
use terrain_cwt_core::hillshade::hillshade;
use terrain_cwt_core::riskmap::{
    band_scales, cwt_power_map_for_scales, default_window_cells, dft_band_power_map, render_power_map,
    DEFAULT_CLIP_PERCENTILES, DEFAULT_OVERLAP,
};
use terrain_cwt_core::spectral::{
    cwt_variance_spectrum, dft_periodogram, find_peak_fwhm, normalize_spectrum, radial_average,
    Interpolation,
};
use terrain_cwt_core::wavelet::{build_scale_set, cwt2d, DEFAULT_DELTA_J, DEFAULT_S0};
use terrain_cwt_core::{
    BandResult, DemGrid, FrequencyBand, Method, PowerMap, PowerSpectrum, ScaleSet, ShadeParams, SynthKind,
    SynthSpec, Window,
};

use crate::ascii::{read_ascii_grid, write_ascii_grid};
use crate::error::{Error, Result};
use crate::export::{write_gray_png, write_rgb_png, write_spectrum_csv};
use crate::manifest::Manifest;

#[derive(Debug, Parser)]
#[command(name = "terrain-cwt", version, about = "Spectral terrain analysis of ESRI ASCII DEMs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Shaded relief as a grayscale PNG.
    Hillshade(HillshadeArgs),
    /// Wavelet variance and/or radially averaged DFT spectrum as CSV.
    Spectrum(SpectrumArgs),
    /// Rugged/flat normalized spectrum, its peak and half-maximum band.
    Band(BandArgs),
    /// Per-cell band power map rendered as a color PNG.
    Riskmap(RiskmapArgs),
    /// Synthetic test terrain as an ASCII grid.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Cwt,
    Dft,
    Both,
}

impl MethodArg {
    fn methods(self) -> &'static [Method] {
        match self {
            MethodArg::Cwt => &[Method::Cwt],
            MethodArg::Dft => &[Method::Dft],
            MethodArg::Both => &[Method::Cwt, Method::Dft],
        }
    }

    fn name(self) -> &'static str {
        match self {
            MethodArg::Cwt => "cwt",
            MethodArg::Dft => "dft",
            MethodArg::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaperArg {
    Hann,
    None,
}

impl TaperArg {
    fn window(self) -> Window {
        match self {
            TaperArg::Hann => Window::Hann,
            TaperArg::None => Window::None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            TaperArg::Hann => "hann",
            TaperArg::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InterpArg {
    Log,
    Linear,
}

/// Preprocessing shared by the spectral commands.
#[derive(Debug, Clone, Args)]
pub struct PrepArgs {
    /// Skip least-squares plane removal.
    #[arg(long)]
    pub no_detrend: bool,
    /// Largest tolerated share of nodata cells.
    #[arg(long, default_value_t = DEFAULT_MAX_VOID_FRACTION)]
    pub max_void_fraction: f64,
}

impl PrepArgs {
    fn record(&self, m: &mut Manifest) {
        m.set("no-detrend", self.no_detrend);
        m.set("max-void-fraction", self.max_void_fraction);
    }

    fn prepare(&self, grid: &DemGrid) -> Result<DemGrid> {
        let filled = fill_nodata(grid, self.max_void_fraction)?;
        if self.no_detrend {
            Ok(filled)
        } else {
            Ok(detrend_plane(&filled)?.0)
        }
    }
}

/// Dyadic scale ladder.
#[derive(Debug, Clone, Args)]
pub struct LadderArgs {
    /// Smallest scale in cells.
    #[arg(long, default_value_t = DEFAULT_S0)]
    pub s0: f64,
    /// Ladder step in octaves.
    #[arg(long, default_value_t = DEFAULT_DELTA_J)]
    pub delta_j: f64,
    /// Number of steps above s0; by default the ladder reaches about a third
    /// of the smaller grid side.
    #[arg(long)]
    pub scales: Option<usize>,
}

impl LadderArgs {
    fn resolve(&self, rows: usize, cols: usize) -> Result<ScaleSet> {
        let steps = match self.scales {
            Some(j) => j,
            None => {
                let default = ScaleSet::default_for(rows, cols)?;
                let (_, j_max) = default.index_range();
                // keep the same top scale when s0 or δj differ from the defaults
                let top = default.max_scale();
                if self.s0 == DEFAULT_S0 && self.delta_j == DEFAULT_DELTA_J {
                    j_max
                } else {
                    ((top / self.s0).log2() / self.delta_j).round().max(1.0) as usize
                }
            }
        };
        Ok(build_scale_set(self.s0, self.delta_j, steps)?)
    }

    fn record(&self, m: &mut Manifest, ladder: &ScaleSet) {
        m.set("s0", self.s0);
        m.set("delta-j", self.delta_j);
        m.set("scales", ladder.index_range().1);
    }
}

#[derive(Debug, Clone, Args)]
pub struct HillshadeArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Sun azimuth, degrees clockwise from north.
    #[arg(long, default_value_t = 235.0)]
    pub azimuth: f64,
    /// Sun altitude above the horizon, degrees.
    #[arg(long, default_value_t = 45.0)]
    pub altitude: f64,
    /// Also write the shade values as an ASCII grid.
    #[arg(long)]
    pub asc: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_VOID_FRACTION)]
    pub max_void_fraction: f64,
    /// Write the resolved parameters here.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Cwt)]
    pub method: MethodArg,
    #[command(flatten)]
    pub ladder: LadderArgs,
    /// Taper applied before the DFT.
    #[arg(long, value_enum, default_value_t = TaperArg::Hann)]
    pub taper: TaperArg,
    #[command(flatten)]
    pub prep: PrepArgs,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BandArgs {
    #[arg(long)]
    pub rugged: PathBuf,
    #[arg(long)]
    pub flat: PathBuf,
    /// CSV of the normalized spectrum.
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Cwt)]
    pub method: MethodArg,
    #[command(flatten)]
    pub ladder: LadderArgs,
    #[arg(long, value_enum, default_value_t = TaperArg::Hann)]
    pub taper: TaperArg,
    /// Axis on which half-maximum crossings are interpolated.
    #[arg(long, value_enum, default_value_t = InterpArg::Log)]
    pub interpolation: InterpArg,
    #[command(flatten)]
    pub prep: PrepArgs,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RiskmapArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// PNG path; with `--method both` it gains `_cwt` and `_dft` suffixes.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Lower band edge, cycles per metre.
    #[arg(long)]
    pub f_lo: f64,
    /// Upper band edge, cycles per metre.
    #[arg(long)]
    pub f_hi: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Cwt)]
    pub method: MethodArg,
    #[arg(long, default_value_t = DEFAULT_S0)]
    pub s0: f64,
    #[arg(long, default_value_t = DEFAULT_DELTA_J)]
    pub delta_j: f64,
    /// DFT tile side in cells; by default two periods of f_lo, rounded up to
    /// a power of two.
    #[arg(long)]
    pub window_cells: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_OVERLAP)]
    pub overlap: f64,
    #[arg(long, default_value_t = DEFAULT_CLIP_PERCENTILES.0)]
    pub clip_lo: f64,
    #[arg(long, default_value_t = DEFAULT_CLIP_PERCENTILES.1)]
    pub clip_hi: f64,
    /// Also write the raw power raster as an ASCII grid.
    #[arg(long)]
    pub raw_asc: Option<PathBuf>,
    #[command(flatten)]
    pub prep: PrepArgs,
    /// Manifest path; defaults to `<output stem>.manifest.txt` beside the PNG.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKindArg {
    Flat,
    Plane,
    Sinusoid,
    FlatPlusNoise,
    CompositeHalf,
}

impl From<SynthKindArg> for SynthKind {
    fn from(k: SynthKindArg) -> Self {
        match k {
            SynthKindArg::Flat => SynthKind::Flat,
            SynthKindArg::Plane => SynthKind::Plane,
            SynthKindArg::Sinusoid => SynthKind::Sinusoid,
            SynthKindArg::FlatPlusNoise => SynthKind::FlatPlusNoise,
            SynthKindArg::CompositeHalf => SynthKind::CompositeHalf,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKindArg,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 256)]
    pub rows: usize,
    #[arg(long, default_value_t = 256)]
    pub cols: usize,
    /// Metres.
    #[arg(long, default_value_t = 1.0)]
    pub cell_size: f64,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    /// Metres; required by sinusoid, composite-half and plane.
    #[arg(long, default_value_t = 0.0)]
    pub wavelength: f64,
    /// Degrees counter-clockwise from east.
    #[arg(long, default_value_t = 0.0)]
    pub orientation: f64,
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Hillshade(a) => cmd_hillshade(&a),
        Command::Spectrum(a) => cmd_spectrum(&a),
        Command::Band(a) => cmd_band(&a),
        Command::Riskmap(a) => cmd_riskmap(&a),
        Command::Synth(a) => cmd_synth(&a),
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn finish(manifest: &Manifest, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => manifest.write(p),
        None => Ok(()),
    }
}

pub fn cmd_hillshade(a: &HillshadeArgs) -> Result<()> {
    let params = ShadeParams::new(a.azimuth, a.altitude)?;
    let grid = fill_nodata(&read_ascii_grid(&a.input)?, a.max_void_fraction)?;
    let shade = hillshade(&grid, &params)?;
    write_gray_png(&shade, grid.rows(), grid.cols(), &a.output)?;
    if let Some(asc) = &a.asc {
        let values = shade.iter().map(|&v| f64::from(v)).collect();
        let (x, y) = grid.origin();
        let out = DemGrid::new(grid.rows(), grid.cols(), grid.cell_size(), x, y, grid.nodata(), values)?;
        write_ascii_grid(&out, asc)?;
    }
    let mut m = Manifest::new("hillshade");
    m.set("input", path_str(&a.input))
        .set("output", path_str(&a.output))
        .set("azimuth", a.azimuth)
        .set("altitude", a.altitude)
        .set("max-void-fraction", a.max_void_fraction);
    if let Some(asc) = &a.asc {
        m.set("asc", path_str(asc));
    }
    finish(&m, a.manifest.as_deref())
}

fn cwt_spectrum(grid: &DemGrid, ladder: &ScaleSet) -> Result<PowerSpectrum> {
    Ok(cwt_variance_spectrum(&cwt2d(grid, ladder)?)?)
}

fn dft_spectrum(grid: &DemGrid, taper: TaperArg) -> Result<PowerSpectrum> {
    Ok(radial_average(&dft_periodogram(grid, taper.window())?)?)
}

pub fn cmd_spectrum(a: &SpectrumArgs) -> Result<()> {
    let grid = a.prep.prepare(&read_ascii_grid(&a.input)?)?;
    let ladder = a.ladder.resolve(grid.rows(), grid.cols())?;
    let spectra = a
        .method
        .methods()
        .iter()
        .map(|m| match m {
            Method::Cwt => cwt_spectrum(&grid, &ladder),
            Method::Dft => dft_spectrum(&grid, a.taper),
        })
        .collect::<Result<Vec<_>>>()?;
    write_spectrum_csv(&spectra.iter().collect::<Vec<_>>(), &a.output)?;

    let mut m = Manifest::new("spectrum");
    m.set("input", path_str(&a.input))
        .set("output", path_str(&a.output))
        .set("method", a.method.name());
    a.ladder.record(&mut m, &ladder);
    m.set("taper", a.taper.name());
    a.prep.record(&mut m);
    finish(&m, a.manifest.as_deref())
}

fn print_band(out: &mut impl std::io::Write, band: &BandResult, dropped: usize) -> std::io::Result<()> {
    writeln!(out, "method={}", band.method)?;
    writeln!(out, "peak_wavelength_m={}", band.peak_wavelength)?;
    writeln!(out, "peak_frequency_per_m={}", band.peak_frequency)?;
    writeln!(out, "peak_power={}", band.peak_power)?;
    writeln!(out, "f_lo_per_m={}", band.f_lo)?;
    writeln!(out, "f_hi_per_m={}", band.f_hi)?;
    writeln!(out, "band_wavelength_m={}..{}", 1.0 / band.f_hi, 1.0 / band.f_lo)?;
    writeln!(out, "censored_lo={}", band.censored_lo)?;
    writeln!(out, "censored_hi={}", band.censored_hi)?;
    writeln!(out, "dropped_bins={dropped}")
}

pub fn cmd_band(a: &BandArgs) -> Result<()> {
    let rugged_raw = read_ascii_grid(&a.rugged)?;
    let flat_raw = read_ascii_grid(&a.flat)?;
    if rugged_raw.cell_size() != flat_raw.cell_size() {
        return Err(Error::CellSizeMismatch {
            rugged: rugged_raw.cell_size(),
            flat: flat_raw.cell_size(),
        });
    }
    let rugged = a.prep.prepare(&rugged_raw)?;
    let flat = a.prep.prepare(&flat_raw)?;
    let ladder = a.ladder.resolve(
        rugged.rows().min(flat.rows()),
        rugged.cols().min(flat.cols()),
    )?;
    let interpolation = match a.interpolation {
        InterpArg::Log => Interpolation::LogFrequency,
        InterpArg::Linear => Interpolation::LinearFrequency,
    };
    let mut normalized = Vec::new();
    let mut results = Vec::new();
    for method in a.method.methods() {
        let (r, f) = match method {
            Method::Cwt => (cwt_spectrum(&rugged, &ladder)?, cwt_spectrum(&flat, &ladder)?),
            Method::Dft => (dft_spectrum(&rugged, a.taper)?, dft_spectrum(&flat, a.taper)?),
        };
        let ratio = normalize_spectrum(&r, &f)?;
        results.push((find_peak_fwhm(&ratio.spectrum, interpolation), ratio.dropped.len()));
        normalized.push(ratio.spectrum);
    }
    write_spectrum_csv(&normalized.iter().collect::<Vec<_>>(), &a.output)?;

    let mut m = Manifest::new("band");
    m.set("rugged", path_str(&a.rugged))
        .set("flat", path_str(&a.flat))
        .set("output", path_str(&a.output))
        .set("method", a.method.name());
    a.ladder.record(&mut m, &ladder);
    m.set("taper", a.taper.name()).set(
        "interpolation",
        match a.interpolation {
            InterpArg::Log => "log",
            InterpArg::Linear => "linear",
        },
    );
    a.prep.record(&mut m);
    finish(&m, a.manifest.as_deref())?;

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let io = |source| Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    };
    let mut first_error = None;
    for (result, dropped) in results {
        match result {
            Ok(band) => print_band(&mut out, &band, dropped).map_err(io)?,
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    out.flush().map_err(io)?;
    match first_error {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{suffix}"),
    };
    path.with_file_name(name)
}

pub fn manifest_path_for(output: &Path) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    output.with_file_name(format!("{stem}.manifest.txt"))
}

/// Output paths for one method of a riskmap run.
pub fn riskmap_paths(a: &RiskmapArgs, method: Method) -> (PathBuf, Option<PathBuf>) {
    if a.method == MethodArg::Both {
        (
            suffixed(&a.output, method.name()),
            a.raw_asc.as_deref().map(|p| suffixed(p, method.name())),
        )
    } else {
        (a.output.clone(), a.raw_asc.clone())
    }
}

pub fn cmd_riskmap(a: &RiskmapArgs) -> Result<()> {
    let band = FrequencyBand::new(a.f_lo, a.f_hi)?;
    let clip = (a.clip_lo, a.clip_hi);
    let grid = a.prep.prepare(&read_ascii_grid(&a.input)?)?;
    let window = a.window_cells.unwrap_or_else(|| default_window_cells(&band, grid.cell_size()));

    let mut m = Manifest::new("riskmap");
    m.set("input", path_str(&a.input))
        .set("output", path_str(&a.output))
        .set("f-lo", a.f_lo)
        .set("f-hi", a.f_hi)
        .set("method", a.method.name())
        .set("s0", a.s0)
        .set("delta-j", a.delta_j)
        .set("window-cells", window)
        .set("overlap", a.overlap)
        .set("clip-lo", a.clip_lo)
        .set("clip-hi", a.clip_hi);
    if let Some(raw) = &a.raw_asc {
        m.set("raw-asc", path_str(raw));
    }
    a.prep.record(&mut m);

    let mut maps: Vec<PowerMap> = Vec::new();
    for &method in a.method.methods() {
        let map = match method {
            Method::Cwt => {
                let scales = band_scales(&band, a.s0, a.delta_j, grid.cell_size())?;
                cwt_power_map_for_scales(&grid, &scales, band)?
            }
            Method::Dft => {
                let dft = dft_band_power_map(&grid, &band, window, a.overlap)?;
                if dft.under_resolved {
                    eprintln!(
                        "warning: a {window}-cell window spans fewer than two periods of f_lo = {} m^-1",
                        a.f_lo
                    );
                }
                dft.map
            }
        };
        maps.push(map);
    }
    for map in &maps {
        let rendered = render_power_map(map, clip)?;
        let (png, raw) = riskmap_paths(a, map.method);
        write_rgb_png(&rendered.image, &png)?;
        if let Some(raw) = raw {
            let (x, y) = grid.origin();
            let out = DemGrid::new(map.rows, map.cols, map.cell_size, x, y, grid.nodata(), map.values.clone())?;
            write_ascii_grid(&out, &raw)?;
        }
        println!(
            "{} legend_log10={}..{} png={}",
            map.method,
            rendered.log10_lo,
            rendered.log10_hi,
            png.display()
        );
    }
    let manifest = a.manifest.clone().unwrap_or_else(|| manifest_path_for(&a.output));
    m.write(&manifest)
}

pub fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let spec = SynthSpec {
        kind: a.kind.into(),
        amplitude: a.amplitude,
        wavelength: a.wavelength,
        orientation: a.orientation,
        noise_sigma: a.noise_sigma,
        seed: a.seed,
    };
    let grid = synth_terrain(&spec, a.rows, a.cols, a.cell_size)?;
    write_ascii_grid(&grid, &a.output)?;
    let mut m = Manifest::new("synth");
    m.set("kind", spec.kind.name())
        .set("output", path_str(&a.output))
        .set("rows", a.rows)
        .set("cols", a.cols)
        .set("cell-size", a.cell_size)
        .set("amplitude", a.amplitude)
        .set("wavelength", a.wavelength)
        .set("orientation", a.orientation)
        .set("noise-sigma", a.noise_sigma)
        .set("seed", a.seed);
    finish(&m, a.manifest.as_deref())
}
