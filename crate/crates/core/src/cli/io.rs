use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use super::config::GridFormat;
use crate::error::{Error, Result};
use crate::pe::ComplexField2D;
use crate::signal::WaveformSample;

const GRID_HEADER: &str = "# nx nz dx dz x0 z0 k";

fn header_values(field: &ComplexField2D) -> String {
    format!(
        "# {} {} {} {} {} {} {}",
        field.nx, field.nz, field.dx, field.dz, field.x0, field.z0, field.k
    )
}

/// Text grid: two header lines, then `nx·nz` rows `re,im` with `x` outer.
pub fn grid_text(field: &ComplexField2D) -> String {
    let mut out = String::with_capacity(field.values().len() * 40 + 64);
    out.push_str(GRID_HEADER);
    out.push('\n');
    out.push_str(&header_values(field));
    out.push('\n');
    for v in field.values() {
        let _ = writeln!(out, "{},{}", v.re, v.im);
    }
    out
}

/// Packed little-endian `re, im` pairs in the same order as the text grid.
pub fn grid_binary(field: &ComplexField2D) -> (String, Vec<u8>) {
    let header = format!("{GRID_HEADER}\n{}\n", header_values(field));
    let mut bytes = Vec::with_capacity(field.values().len() * 16);
    for v in field.values() {
        bytes.extend_from_slice(&v.re.to_le_bytes());
        bytes.extend_from_slice(&v.im.to_le_bytes());
    }
    (header, bytes)
}

/// Encoded files for one grid: `(suffix, bytes)` pairs.
pub fn encode_grid(field: &ComplexField2D, format: GridFormat) -> Vec<(&'static str, Vec<u8>)> {
    match format {
        GridFormat::Text => vec![(".csv", grid_text(field).into_bytes())],
        GridFormat::Binary => {
            let (header, bytes) = grid_binary(field);
            vec![(".bin", bytes), (".hdr", header.into_bytes())]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct GridHeader {
    nx: usize,
    nz: usize,
    dx: f64,
    dz: f64,
    x0: f64,
    z0: f64,
    k: f64,
}

fn parse_header(path: &Path, lines: &mut dyn Iterator<Item = &str>) -> Result<GridHeader> {
    let bad = |message: String| Error::ConfigParse {
        path: path.to_path_buf(),
        message,
    };
    let first = lines.next().ok_or_else(|| bad("empty grid file".into()))?;
    if first.trim() != GRID_HEADER {
        return Err(bad(format!("unexpected header {first:?}")));
    }
    let values = lines.next().ok_or_else(|| bad("missing header values".into()))?;
    let fields: Vec<&str> = values.trim_start_matches('#').split_whitespace().collect();
    if fields.len() != 7 {
        return Err(bad(format!("expected 7 header values, found {}", fields.len())));
    }
    let num = |i: usize| fields[i].parse::<f64>().map_err(|e| bad(format!("header field {i}: {e}")));
    let count = |i: usize| fields[i].parse::<usize>().map_err(|e| bad(format!("header field {i}: {e}")));
    Ok(GridHeader {
        nx: count(0)?,
        nz: count(1)?,
        dx: num(2)?,
        dz: num(3)?,
        x0: num(4)?,
        z0: num(5)?,
        k: num(6)?,
    })
}

fn empty_field(h: GridHeader) -> ComplexField2D {
    ComplexField2D::zeros(h.nx, h.nz, h.x0, h.z0, h.dx, h.dz, h.k)
}

/// Reads a text grid written by [`grid_text`].
pub fn read_grid_text(path: &Path) -> Result<ComplexField2D> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header = parse_header(path, &mut lines)?;
    let mut field = empty_field(header);
    let expected = header.nx * header.nz;
    let mut count = 0;
    for (slot, line) in field.values_mut().iter_mut().zip(&mut lines) {
        let (re, im) = line.split_once(',').ok_or_else(|| Error::ConfigParse {
            path: path.to_path_buf(),
            message: format!("row {count}: expected `re,im`"),
        })?;
        let parse = |t: &str| {
            t.trim().parse::<f64>().map_err(|e| Error::ConfigParse {
                path: path.to_path_buf(),
                message: format!("row {count}: {e}"),
            })
        };
        *slot = Complex64::new(parse(re)?, parse(im)?);
        count += 1;
    }
    if count != expected || lines.next().is_some() {
        return Err(Error::ConfigParse {
            path: path.to_path_buf(),
            message: format!("expected {expected} rows"),
        });
    }
    Ok(field)
}

/// Reads a binary grid and its header sidecar.
pub fn read_grid_binary(data: &Path, header: &Path) -> Result<ComplexField2D> {
    let text = std::fs::read_to_string(header).map_err(|e| Error::io(header, e))?;
    let h = parse_header(header, &mut text.lines())?;
    let bytes = std::fs::read(data).map_err(|e| Error::io(data, e))?;
    if bytes.len() != h.nx * h.nz * 16 {
        return Err(Error::ConfigParse {
            path: data.to_path_buf(),
            message: format!("expected {} bytes, found {}", h.nx * h.nz * 16, bytes.len()),
        });
    }
    let mut field = empty_field(h);
    for (slot, chunk) in field.values_mut().iter_mut().zip(bytes.chunks_exact(16)) {
        let re = f64::from_le_bytes(chunk[..8].try_into().expect("8-byte half"));
        let im = f64::from_le_bytes(chunk[8..].try_into().expect("8-byte half"));
        *slot = Complex64::new(re, im);
    }
    Ok(field)
}

/// Probe rows `s_m, value_re, value_im, envelope`.
pub fn probe_text(x: f64, z: f64, s: &[f64], values: &[Complex64]) -> String {
    let mut out = format!("# probe x={x} z={z}\n# s_m,value_re,value_im,envelope\n");
    for (s, v) in s.iter().zip(values) {
        let _ = writeln!(out, "{s},{},{},{}", v.re, v.im, v.norm());
    }
    out
}

/// Waveform rows `s_m, F, Re_Fplus, Im_Fplus, envelope`.
pub fn waveform_text(samples: &[WaveformSample]) -> String {
    let mut out = String::from("# s_m,F,Re_Fplus,Im_Fplus,envelope\n");
    for w in samples {
        let _ = writeln!(out, "{},{},{},{},{}", w.s, w.value, w.plus.re, w.plus.im, w.envelope);
    }
    out
}

/// Comma-separated table with a commented header.
pub fn table_text(columns: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = format!("# {}\n", columns.join(","));
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Snapshot file stem, e.g. `snap_003_s1250`.
pub fn snapshot_stem(index: usize, ct: f64) -> String {
    let meters = if ct.fract() == 0.0 {
        format!("{ct:.0}")
    } else {
        format!("{ct}").replace('.', "p")
    };
    format!("snap_{index:03}_s{meters}")
}
