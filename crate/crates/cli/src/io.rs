//! Text and image formats.
//!
//! Grid CSV: one `#` header line, then one line per row. Complex grids store
//! interleaved `re,im` pairs, real grids one value per cell. Numbers carry 17
//! significant digits so that rereading reproduces every double exactly.
//!
//! PGM: binary P5, maxval 255, row index 0 at the bottom of the image.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use torus_wigner::{Complex64, ComplexGrid};

use crate::error::{CliError, CliResult};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `# torus-wigner <version> key=value ...`
pub fn header(pairs: &[(&str, String)]) -> String {
    let mut h = format!("# torus-wigner {}", env!("CARGO_PKG_VERSION"));
    for (k, v) in pairs {
        let _ = write!(h, " {k}={v}");
    }
    h
}

pub fn complex_grid_csv(grid: &ComplexGrid, header_line: &str) -> String {
    let mut out = String::with_capacity(grid.rows() * grid.cols() * 48);
    out.push_str(header_line);
    out.push('\n');
    for r in 0..grid.rows() {
        let fields: Vec<String> = grid
            .row(r)
            .iter()
            .flat_map(|z| [fmt_f64(z.re), fmt_f64(z.im)])
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn real_grid_csv(rows: usize, cols: usize, values: &[f64], header_line: &str) -> String {
    let mut out = String::new();
    out.push_str(header_line);
    out.push('\n');
    for r in 0..rows {
        let fields: Vec<String> = values[r * cols..(r + 1) * cols].iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Data lines with their 1-based line numbers, skipping comments and blanks.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_fields(path: &str, line: usize, text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|f| {
            let f = f.trim();
            let x: f64 = f.parse().map_err(|_| CliError::Parse {
                path: path.to_string(),
                line,
                message: format!("'{f}' is not a number"),
            })?;
            if !x.is_finite() {
                return Err(CliError::Parse {
                    path: path.to_string(),
                    line,
                    message: format!("non-finite value '{f}'"),
                });
            }
            Ok(x)
        })
        .collect()
}

/// Reads a square complex grid stored as interleaved pairs.
pub fn parse_complex_grid(path: &str, text: &str) -> CliResult<ComplexGrid> {
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (line, l) in data_lines(text) {
        let values = parse_fields(path, line, l)?;
        if values.len() % 2 != 0 {
            return Err(CliError::Parse {
                path: path.into(),
                line,
                message: format!("expected interleaved re,im pairs, found {} fields", values.len()),
            });
        }
        let c = values.len() / 2;
        match cols {
            None => cols = Some(c),
            Some(expected) if expected != c => {
                return Err(CliError::Parse {
                    path: path.into(),
                    line,
                    message: format!("expected {} fields, found {}", 2 * expected, values.len()),
                })
            }
            _ => {}
        }
        data.extend(values.chunks(2).map(|p| Complex64::new(p[0], p[1])));
        rows += 1;
    }
    let cols = cols.ok_or_else(|| CliError::Parse {
        path: path.into(),
        line: text.lines().count().max(1),
        message: "no data rows".into(),
    })?;
    if rows != cols {
        return Err(CliError::Parse {
            path: path.into(),
            line: text.lines().count(),
            message: format!("grid must be square, found {rows} rows of {cols} entries"),
        });
    }
    Ok(ComplexGrid::from_vec(rows, cols, data)?)
}

/// Reads a state file of `n,re,im` lines covering every index once.
pub fn parse_state(path: &str, text: &str) -> CliResult<Vec<Complex64>> {
    let mut entries: Vec<(usize, usize, Complex64)> = Vec::new();
    for (line, l) in data_lines(text) {
        let fields: Vec<&str> = l.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(CliError::Parse {
                path: path.into(),
                line,
                message: format!("expected n,re,im, found {} fields", fields.len()),
            });
        }
        let n: usize = fields[0].parse().map_err(|_| CliError::Parse {
            path: path.into(),
            line,
            message: format!("'{}' is not a basis index", fields[0]),
        })?;
        let v = parse_fields(path, line, &fields[1..].join(","))?;
        entries.push((line, n, Complex64::new(v[0], v[1])));
    }
    if entries.is_empty() {
        return Err(CliError::Parse {
            path: path.into(),
            line: 1,
            message: "no data rows".into(),
        });
    }
    let dim = entries.len();
    let mut amps: Vec<Option<Complex64>> = vec![None; dim];
    for (line, n, z) in entries {
        let slot = amps.get_mut(n).ok_or_else(|| CliError::Parse {
            path: path.into(),
            line,
            message: format!("index {n} out of range for {dim} entries"),
        })?;
        if slot.is_some() {
            return Err(CliError::Parse {
                path: path.into(),
                line,
                message: format!("duplicate index {n}"),
            });
        }
        *slot = Some(z);
    }
    Ok(amps.into_iter().map(|z| z.expect("every index filled")).collect())
}

/// Whether a data file holds `n,re,im` state rows rather than a grid.
pub fn looks_like_state(text: &str) -> bool {
    data_lines(text).next().is_some_and(|(_, l)| l.split(',').count() == 3)
}

/// Greyscale image of `values` (row-major, `rows x cols`).
///
/// Linear min -> 0, max -> 255, or with `symmetric` the range
/// `[-max|x|, max|x|]` so that zero is mid-grey. Row 0 is the bottom line.
pub fn pgm(rows: usize, cols: usize, values: &[f64], symmetric: bool) -> Vec<u8> {
    let (lo, hi) = if symmetric {
        let a = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        (-a, a)
    } else {
        values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
    };
    let span = hi - lo;
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    for r in (0..rows).rev() {
        for &x in &values[r * cols..(r + 1) * cols] {
            let level = if span > 0.0 {
                (255.0 * (x - lo) / span).round().clamp(0.0, 255.0)
            } else if symmetric {
                128.0
            } else {
                0.0
            };
            out.push(level as u8);
        }
    }
    out
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let g = ComplexGrid::from_fn(3, 3, |i, j| {
            Complex64::new(0.1 * i as f64 + 1.0 / 3.0, -(j as f64).sqrt() * 1e-300)
        });
        let text = complex_grid_csv(&g, &header(&[("kind", "complex".into())]));
        let back = parse_complex_grid("mem", &text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_complex_grid("f.csv", "# h\n1,0,2,0\n1,x,0,0\n").unwrap_err();
        assert_eq!(err.to_string(), "f.csv:3: 'x' is not a number");
        let err = parse_complex_grid("f.csv", "1,0,2,0\n1,0\n").unwrap_err();
        assert!(err.to_string().starts_with("f.csv:2:"));
        assert!(parse_complex_grid("f.csv", "1,0,2,0\n").is_err());
        assert!(parse_complex_grid("f.csv", "# only\n").is_err());
    }

    #[test]
    fn state_files() {
        let s = parse_state("s", "# state\n1,0,1\n0,1,0\n").unwrap();
        assert_eq!(s, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]);
        assert!(parse_state("s", "0,1,0\n0,1,0\n")
            .unwrap_err()
            .to_string()
            .contains("duplicate"));
        assert!(parse_state("s", "0,1,0\n2,1,0\n").is_err());
        assert!(looks_like_state("0,1,0\n"));
        assert!(!looks_like_state("1,0,0,0\n"));
    }

    #[test]
    fn pgm_layout() {
        let img = pgm(2, 3, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], false);
        let head = b"P5\n3 2\n255\n";
        assert_eq!(&img[..head.len()], head);
        assert_eq!(&img[head.len()..], &[153, 204, 255, 0, 51, 102]);
        let sym = pgm(1, 3, &[-1.0, 0.0, 0.5], true);
        assert_eq!(&sym[sym.len() - 3..], &[0, 128, 191]);
        let flat = pgm(1, 2, &[1.0, 1.0], false);
        assert_eq!(&flat[flat.len() - 2..], &[0, 0]);
    }
}
