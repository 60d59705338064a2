//! Matrix and sequence file formats.
//!
//! Matrices: JSON `{"rows": m, "cols": n, "data": [[re, im], ...]}` in
//! row-major order (plain numbers are accepted for real entries), or CSV with
//! one matrix row per line and cells like `1.5`, `2-3j` or `-1e-3+0.5j`.
//! Sequences: CSV with one value per line (`re` or `re,im`), or a JSON array
//! of numbers or `[re, im]` pairs.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::operators::{ComplexMatrix, C64};
use crate::represent::DyadicDecomposition;
use crate::seqspace::SeqSample;

fn json_error(origin: &str, e: &serde_json::Error) -> Error {
    Error::parse(format!("{origin}:{}:{}", e.line(), e.column()), e.to_string())
}

fn scalar_from_json(v: &Value, at: &str) -> Result<C64> {
    let num = |x: &Value, part: &str| {
        x.as_f64()
            .ok_or_else(|| Error::parse(at.to_string(), format!("{part} is not a number: {x}")))
    };
    match v {
        Value::Number(_) => Ok(C64::new(num(v, "entry")?, 0.0)),
        Value::Array(pair) if pair.len() == 2 => Ok(C64::new(num(&pair[0], "real part")?, num(&pair[1], "imaginary part")?)),
        other => Err(Error::parse(at.to_string(), format!("expected a number or [re, im], got {other}"))),
    }
}

fn scalar_to_json(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn matrix_to_json(t: &ComplexMatrix) -> String {
    let data: Vec<Value> = t.row_major().into_iter().map(scalar_to_json).collect();
    let v = json!({ "rows": t.rows(), "cols": t.cols(), "data": data });
    serde_json::to_string_pretty(&v).expect("serializable")
}

pub fn parse_matrix_json(text: &str, origin: &str) -> Result<ComplexMatrix> {
    let v: Value = serde_json::from_str(text).map_err(|e| json_error(origin, &e))?;
    let field = |name: &str| {
        v.get(name)
            .ok_or_else(|| Error::parse(origin.to_string(), format!("missing field {name:?}")))
    };
    let dim = |name: &str| -> Result<usize> {
        field(name)?
            .as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| Error::parse(format!("{origin}: field {name:?}"), "expected a positive integer"))
    };
    let (rows, cols) = (dim("rows")?, dim("cols")?);
    let data = field("data")?
        .as_array()
        .ok_or_else(|| Error::parse(format!("{origin}: field \"data\""), "expected an array"))?;
    let entries = data
        .iter()
        .enumerate()
        .map(|(i, x)| scalar_from_json(x, &format!("{origin}: data[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    ComplexMatrix::new(rows, cols, entries).map_err(|e| Error::parse(origin.to_string(), e.to_string()))
}

/// Parses `1.5`, `-2j`, `2-3j`, `1e-3+4.5j` (also with `i` for the unit).
pub fn parse_complex(cell: &str) -> Option<C64> {
    let s: String = cell.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix(['j', 'i']) else {
        return s.parse().ok().map(|re| C64::new(re, 0.0));
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let unit = |t: &str| match t {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => t.parse().ok(),
    };
    match split {
        Some(k) => Some(C64::new(body[..k].parse().ok()?, unit(&body[k..])?)),
        None => Some(C64::new(0.0, unit(body)?)),
    }
}

pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{:?}", z.re)
    } else if z.im < 0.0 || z.im.is_sign_negative() {
        format!("{:?}{:?}j", z.re, z.im)
    } else {
        format!("{:?}+{:?}j", z.re, z.im)
    }
}

pub fn parse_matrix_csv(text: &str, origin: &str) -> Result<ComplexMatrix> {
    let mut entries = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        match cols {
            None => cols = Some(cells.len()),
            Some(c) if c != cells.len() => {
                return Err(Error::parse(
                    format!("{origin}:{}", line_no + 1),
                    format!("expected {c} cells, found {}", cells.len()),
                ))
            }
            _ => {}
        }
        for (k, cell) in cells.iter().enumerate() {
            let z = parse_complex(cell).ok_or_else(|| {
                Error::parse(format!("{origin}:{}:{}", line_no + 1, k + 1), format!("bad complex number {cell:?}"))
            })?;
            entries.push(z);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::parse(origin.to_string(), "no matrix rows"))?;
    ComplexMatrix::new(rows, cols, entries).map_err(|e| Error::parse(origin.to_string(), e.to_string()))
}

pub fn matrix_to_csv(t: &ComplexMatrix) -> String {
    let mut out = String::new();
    for i in 0..t.rows() {
        let row: Vec<String> = (0..t.cols()).map(|j| format_complex(t.get(i, j))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Reads a matrix file; `.json` selects JSON, anything else CSV.
pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path)?;
    let origin = path.display().to_string();
    if is_json(path) {
        parse_matrix_json(&text, &origin)
    } else {
        parse_matrix_csv(&text, &origin)
    }
}

pub fn parse_sequence_csv(text: &str, origin: &str) -> Result<SeqSample> {
    let mut values = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = || format!("{origin}:{}", line_no + 1);
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::parse(at(), format!("bad number {s:?}")));
        let z = match parts.as_slice() {
            [re] => C64::new(num(re)?, 0.0),
            [re, im] => C64::new(num(re)?, num(im)?),
            _ => return Err(Error::parse(at(), "expected `re` or `re,im`")),
        };
        values.push(z);
    }
    SeqSample::new(values).map_err(|e| Error::parse(origin.to_string(), e.to_string()))
}

pub fn parse_sequence_json(text: &str, origin: &str) -> Result<SeqSample> {
    let v: Value = serde_json::from_str(text).map_err(|e| json_error(origin, &e))?;
    let arr = v
        .as_array()
        .ok_or_else(|| Error::parse(origin.to_string(), "expected a JSON array"))?;
    let values = arr
        .iter()
        .enumerate()
        .map(|(i, x)| scalar_from_json(x, &format!("{origin}: [{i}]")))
        .collect::<Result<Vec<_>>>()?;
    SeqSample::new(values).map_err(|e| Error::parse(origin.to_string(), e.to_string()))
}

pub fn read_sequence(path: &Path) -> Result<SeqSample> {
    let text = fs::read_to_string(path)?;
    let origin = path.display().to_string();
    if is_json(path) {
        parse_sequence_json(&text, &origin)
    } else {
        parse_sequence_csv(&text, &origin)
    }
}

pub fn sequence_to_csv(x: &SeqSample) -> String {
    x.values().iter().map(|z| format!("{:?},{:?}\n", z.re, z.im)).collect()
}

pub fn sequence_to_json(x: &SeqSample) -> String {
    let v: Vec<Value> = x.values().iter().map(|z| scalar_to_json(*z)).collect();
    serde_json::to_string(&v).expect("serializable")
}

/// Writes `manifest.json` plus `block_<n>.json` for every block into `dir`.
pub fn write_decomposition(dir: &Path, dec: &DyadicDecomposition) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let mut names = Vec::new();
    for (n, g) in dec.blocks.iter().enumerate() {
        let name = format!("block_{n}.json");
        let path = dir.join(&name);
        fs::write(&path, matrix_to_json(g))?;
        names.push(name);
        files.push(path);
    }
    let manifest = json!({ "decomposition": dec, "block_files": names });
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest).expect("serializable"))?;
    files.push(path);
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_cells() {
        assert_eq!(parse_complex("1.5"), Some(C64::new(1.5, 0.0)));
        assert_eq!(parse_complex("2-3j"), Some(C64::new(2.0, -3.0)));
        assert_eq!(parse_complex("-1e-3+4.5j"), Some(C64::new(-1e-3, 4.5)));
        assert_eq!(parse_complex("1e+2-1e-2i"), Some(C64::new(100.0, -0.01)));
        assert_eq!(parse_complex("-j"), Some(C64::new(0.0, -1.0)));
        assert_eq!(parse_complex("3j"), Some(C64::new(0.0, 3.0)));
        assert_eq!(parse_complex("abc"), None);
        assert_eq!(parse_complex(""), None);
        for z in [C64::new(1.25, -0.5), C64::new(-3.0, 0.0), C64::new(1e-300, 2e10)] {
            assert_eq!(parse_complex(&format_complex(z)), Some(z));
        }
    }

    #[test]
    fn matrix_round_trips() {
        let t = ComplexMatrix::new(2, 2, vec![C64::new(1.0, 2.0), C64::new(0.0, -1.0), C64::new(3.5, 0.0), C64::new(-0.25, 1e-9)])
            .unwrap();
        assert_eq!(parse_matrix_json(&matrix_to_json(&t), "m").unwrap(), t);
        assert_eq!(parse_matrix_csv(&matrix_to_csv(&t), "m").unwrap(), t);
    }

    #[test]
    fn plain_real_json() {
        let t = parse_matrix_json(r#"{"rows":2,"cols":1,"data":[1, [2, 0.5]]}"#, "m").unwrap();
        assert_eq!(t.get(1, 0), C64::new(2.0, 0.5));
    }

    #[test]
    fn errors_carry_locations() {
        let e = parse_matrix_csv("1,2\n3,x\n", "a.csv").unwrap_err().to_string();
        assert!(e.contains("a.csv:2:2"), "{e}");
        let e = parse_matrix_csv("1,2\n3\n", "a.csv").unwrap_err().to_string();
        assert!(e.contains("a.csv:2"), "{e}");
        let e = parse_matrix_json("{\"rows\": 2,\n \"cols\": }", "b.json").unwrap_err().to_string();
        assert!(e.contains("b.json:2:"), "{e}");
        let e = parse_matrix_json(r#"{"rows":1,"cols":2,"data":[1]}"#, "c.json").unwrap_err().to_string();
        assert!(e.contains("c.json"), "{e}");
        let e = parse_sequence_csv("1\n2,3,4\n", "s.csv").unwrap_err().to_string();
        assert!(e.contains("s.csv:2"), "{e}");
    }

    #[test]
    fn sequence_round_trips() {
        let x = SeqSample::new(vec![C64::new(3.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 2.0)]).unwrap();
        assert_eq!(parse_sequence_csv(&sequence_to_csv(&x), "s").unwrap().values(), x.values());
        assert_eq!(parse_sequence_json(&sequence_to_json(&x), "s").unwrap().values(), x.values());
        let y = parse_sequence_json("[1, 2.5]", "s").unwrap();
        assert_eq!(y.rearrangement(), &[2.5, 1.0]);
    }
}
