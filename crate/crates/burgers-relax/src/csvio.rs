//! Deterministic CSV reading/writing.
//!
//! All numeric output uses exactly 17 significant digits ('.' decimal,
//! '\n' line ends), so identical inputs produce byte-identical files.

use std::io::Write;
use std::path::Path;

use crate::constitutive::StrainHistory;
use crate::error::{Error, Result};
use crate::tensor::{kelvin_len, SymTensor2};

/// Formats a float with 17 significant digits.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes rows with a header line; every cell already stringified.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Kelvin component labels in the frozen ordering, prefixed by `name`.
pub fn kelvin_labels(dim: usize, name: &str) -> Vec<String> {
    let labels: &[&str] = match dim {
        2 => &["11", "22", "12"],
        _ => &["11", "22", "33", "23", "13", "12"],
    };
    labels.iter().map(|s| format!("{name}_{s}")).collect()
}

/// Reads a strain history CSV: columns (t, e components in Kelvin order),
/// with or without a header line.
pub fn read_strain_history(path: &Path, dim: usize) -> Result<StrainHistory> {
    let content = std::fs::read_to_string(path)?;
    let dt = kelvin_len(dim);
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if lineno == 0 && cells[0].parse::<f64>().is_err() {
            continue; // header
        }
        if cells.len() != dt + 1 {
            return Err(Error::Csv(format!(
                "line {}: expected {} columns (t + {} Kelvin components), got {}",
                lineno + 1,
                dt + 1,
                dt,
                cells.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::Csv(format!("line {}: bad number {s:?}", lineno + 1)))
        };
        times.push(parse(cells[0])?);
        let kelvin = nalgebra::DVector::from_iterator(
            dt,
            cells[1..].iter().map(|s| parse(s)).collect::<Result<Vec<_>>>()?,
        );
        values.push(SymTensor2::from_kelvin(dim, kelvin)?);
    }
    StrainHistory::new(times, values)
}

/// Writes a stress trace CSV: columns (t, sigma components in Kelvin order).
pub fn write_stress_trace(
    path: &Path,
    dim: usize,
    times: &[f64],
    stress: &[SymTensor2],
    extra: Option<(&str, &[f64])>,
) -> Result<()> {
    let mut header: Vec<String> = vec!["t".into()];
    header.extend(kelvin_labels(dim, "sigma"));
    if let Some((name, _)) = extra {
        header.push(name.into());
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut row = vec![fmt(t)];
            row.extend(stress[i].kelvin().iter().map(|&v| fmt(v)));
            if let Some((_, vals)) = extra {
                row.push(fmt(vals[i]));
            }
            row
        })
        .collect();
    write_csv(path, &header_refs, &rows)
}
