//! ESRI ASCII grid (`.asc`) reading and writing.
//!
//! Files list the northernmost row first; [`DemGrid`] stores the southernmost
//! row first, so rows are reversed on the way in and out. Values are written
//! in Rust's shortest round-trip form, which makes `parse(format(g)) == g`
//! bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use terrain_cwt_core::grid::DEFAULT_NODATA;
use terrain_cwt_core::DemGrid;

use crate::atomic::write_atomic;
use crate::error::{Error, Result};

/// Problems in the text of an ASCII grid. Line numbers are 1-based.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AsciiError {
    #[error("line {line}: missing header key `{key}`")]
    MissingHeaderKey { key: &'static str, line: usize },
    #[error("line {line}: expected {expected} {what}, found {found}")]
    NonRectangularBody {
        line: usize,
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: cannot parse `{token}` as a number")]
    UnparseableNumber { line: usize, token: String },
    #[error("line {line}: header key `{key}` given twice")]
    DuplicateHeaderKey { key: String, line: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(#[from] terrain_cwt_core::Error),
}

#[derive(Default)]
struct Header {
    ncols: Option<usize>,
    nrows: Option<usize>,
    xll: Option<(f64, bool)>,
    yll: Option<(f64, bool)>,
    cellsize: Option<f64>,
    nodata: Option<f64>,
}

fn number<T: std::str::FromStr>(token: Option<&str>, line: usize) -> std::result::Result<T, AsciiError> {
    let token = token.unwrap_or("");
    token.parse().map_err(|_| AsciiError::UnparseableNumber {
        line,
        token: token.to_string(),
    })
}

/// Parses the text of an ASCII grid. Header keys are case-insensitive;
/// `xllcenter`/`yllcenter` are accepted and shifted to the corner.
pub fn parse_ascii_grid(text: &str) -> std::result::Result<DemGrid, AsciiError> {
    let mut header = Header::default();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();
    while let Some(&(line, content)) = lines.peek() {
        let mut tokens = content.split_whitespace();
        let Some(key) = tokens.next() else {
            lines.next();
            continue;
        };
        let key = key.to_ascii_lowercase();
        let duplicate = || AsciiError::DuplicateHeaderKey {
            key: key.clone(),
            line,
        };
        match key.as_str() {
            "ncols" if header.ncols.is_some() => return Err(duplicate()),
            "nrows" if header.nrows.is_some() => return Err(duplicate()),
            "cellsize" if header.cellsize.is_some() => return Err(duplicate()),
            "nodata_value" if header.nodata.is_some() => return Err(duplicate()),
            "xllcorner" | "xllcenter" if header.xll.is_some() => return Err(duplicate()),
            "yllcorner" | "yllcenter" if header.yll.is_some() => return Err(duplicate()),
            "ncols" => header.ncols = Some(number(tokens.next(), line)?),
            "nrows" => header.nrows = Some(number(tokens.next(), line)?),
            "cellsize" => header.cellsize = Some(number(tokens.next(), line)?),
            "nodata_value" => header.nodata = Some(number(tokens.next(), line)?),
            "xllcorner" => header.xll = Some((number(tokens.next(), line)?, false)),
            "xllcenter" => header.xll = Some((number(tokens.next(), line)?, true)),
            "yllcorner" => header.yll = Some((number(tokens.next(), line)?, false)),
            "yllcenter" => header.yll = Some((number(tokens.next(), line)?, true)),
            _ => break,
        }
        lines.next();
    }
    let body_line = lines.peek().map_or(text.lines().count() + 1, |&(l, _)| l);
    let missing = |key| AsciiError::MissingHeaderKey { key, line: body_line };
    let ncols = header.ncols.ok_or_else(|| missing("ncols"))?;
    let nrows = header.nrows.ok_or_else(|| missing("nrows"))?;
    let cell_size = header.cellsize.ok_or_else(|| missing("cellsize"))?;
    let (x, x_centre) = header.xll.ok_or_else(|| missing("xllcorner"))?;
    let (y, y_centre) = header.yll.ok_or_else(|| missing("yllcorner"))?;
    let origin_x = if x_centre { x - cell_size / 2.0 } else { x };
    let origin_y = if y_centre { y - cell_size / 2.0 } else { y };
    let nodata = header.nodata.unwrap_or(DEFAULT_NODATA);

    let mut file_rows: Vec<Vec<f64>> = Vec::with_capacity(nrows);
    let mut last_line = body_line;
    for (line, content) in lines {
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        last_line = line;
        if file_rows.len() == nrows {
            return Err(AsciiError::NonRectangularBody {
                line,
                what: "rows",
                expected: nrows,
                found: nrows + 1,
            });
        }
        if tokens.len() != ncols {
            return Err(AsciiError::NonRectangularBody {
                line,
                what: "values on the row",
                expected: ncols,
                found: tokens.len(),
            });
        }
        let row = tokens
            .iter()
            .map(|t| number::<f64>(Some(t), line))
            .collect::<std::result::Result<Vec<f64>, _>>()?;
        file_rows.push(row);
    }
    if file_rows.len() != nrows {
        return Err(AsciiError::NonRectangularBody {
            line: last_line,
            what: "rows",
            expected: nrows,
            found: file_rows.len(),
        });
    }
    let values: Vec<f64> = file_rows.into_iter().rev().flatten().collect();
    Ok(DemGrid::new(nrows, ncols, cell_size, origin_x, origin_y, nodata, values)?)
}

/// Renders a grid as ASCII grid text, north row first.
pub fn format_ascii_grid(grid: &DemGrid) -> String {
    let (x, y) = grid.origin();
    let mut out = String::new();
    let _ = writeln!(out, "ncols {}", grid.cols());
    let _ = writeln!(out, "nrows {}", grid.rows());
    let _ = writeln!(out, "xllcorner {x}");
    let _ = writeln!(out, "yllcorner {y}");
    let _ = writeln!(out, "cellsize {}", grid.cell_size());
    let _ = writeln!(out, "NODATA_value {}", grid.nodata());
    for row in grid.values().chunks_exact(grid.cols()).rev() {
        let mut first = true;
        for v in row {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

pub fn read_ascii_grid(path: &Path) -> Result<DemGrid> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_ascii_grid(&text).map_err(|source| Error::Parse {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_ascii_grid(grid: &DemGrid, path: &Path) -> Result<()> {
    write_atomic(path, format_ascii_grid(grid).as_bytes())
}
