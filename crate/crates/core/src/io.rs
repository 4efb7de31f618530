//! Density matrix files.
//!
//! JSON: `{"rho": [[[re, im], ...4], ...4]}`, rows of complex entries.
//! CSV: one record of 32 numbers, the 16 real parts in row-major order
//! followed by the 16 imaginary parts. A header line is allowed.

use std::path::Path;

use nalgebra::Matrix4;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::qubit_map::DensityMatrix;
use crate::tolerance::Tolerances;
use crate::C64;

#[derive(Debug, Deserialize)]
struct StateFile {
    rho: [[[f64; 2]; 4]; 4],
}

pub fn parse_json(text: &str) -> Result<Matrix4<C64>> {
    let f: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("json: {e}")))?;
    Ok(Matrix4::from_fn(|r, c| C64::new(f.rho[r][c][0], f.rho[r][c][1])))
}

/// One matrix row per line.
pub fn to_json(m: &Matrix4<C64>) -> String {
    let entry = |z: C64| serde_json::to_string(&[z.re, z.im]).expect("finite floats serialize");
    let rows: Vec<String> = (0..4)
        .map(|r| format!("    [{}]", (0..4).map(|c| entry(m[(r, c)])).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("{{\n  \"rho\": [\n{}\n  ]\n}}", rows.join(",\n"))
}

pub fn parse_csv(text: &str) -> Result<Matrix4<C64>> {
    let mut values = None;
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(v) if values.is_none() => values = Some((n + 1, v)),
            Ok(_) => return Err(Error::Parse(format!("csv: extra record on line {}", n + 1))),
            Err(_) if n == 0 => continue,
            Err(e) => return Err(Error::Parse(format!("csv line {}: {e}", n + 1))),
        }
    }
    let (line, v) = values.ok_or_else(|| Error::Parse("csv: no data record".into()))?;
    if v.len() != 32 {
        return Err(Error::Parse(format!("csv line {line}: expected 32 fields, found {}", v.len())));
    }
    Ok(Matrix4::from_fn(|r, c| C64::new(v[4 * r + c], v[16 + 4 * r + c])))
}

pub fn to_csv(m: &Matrix4<C64>) -> String {
    let mut header = Vec::with_capacity(32);
    let mut row = Vec::with_capacity(32);
    for (part, f) in [("re", 0), ("im", 1)] {
        for r in 0..4 {
            for c in 0..4 {
                header.push(format!("{part}{r}{c}"));
                let z = m[(r, c)];
                row.push(format!("{:?}", if f == 0 { z.re } else { z.im }));
            }
        }
    }
    format!("{}\n{}\n", header.join(","), row.join(","))
}

/// Raw 4×4 matrix from a `.json` or `.csv` file, without validation.
pub fn read_matrix(path: &Path) -> Result<Matrix4<C64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("csv") => parse_csv(&text),
        _ => parse_json(&text),
    }
}

pub fn read_state(path: &Path) -> Result<DensityMatrix> {
    DensityMatrix::new(read_matrix(path)?, Tolerances::default().psd)
}
