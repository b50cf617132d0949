//! Number formatting and file writers shared by the subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Every number leaves the program with 17 significant digits.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn field(x: f64) -> String {
    if x.is_finite() {
        sig17(x)
    } else {
        x.to_string()
    }
}

/// A float serialized with 17 significant digits; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(sig17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num(x)
    }
}

/// `serialize_with` helper for plain `f64` fields.
pub fn num<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    Num(*x).serialize(s)
}

pub fn nums(xs: &[f64]) -> Vec<Num> {
    xs.iter().copied().map(Num).collect()
}

pub fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    serde_json::to_writer_pretty(&mut lock, value)?;
    writeln!(lock)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Writes `# config <json>`, the header and one row per record.
pub fn write_csv<C: Serialize>(path: &Path, config: &C, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "# config {}", serde_json::to_string(config)?)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for row in rows {
        out.write_record(row)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(sig17(5.0), "5.0000000000000000e0");
        assert_eq!(sig17(0.1), "1.0000000000000001e-1");
        assert_eq!(sig17(-92954.0), "-9.2954000000000000e4");
        for x in [0.1, 1.0 / 3.0, 1e-300, 6.02e23, std::f64::consts::PI] {
            assert_eq!(sig17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_numbers() {
        let v = vec![Num(1.5), Num(f64::INFINITY), Num(f64::NAN)];
        assert_eq!(serde_json::to_string(&v).unwrap(), "[1.5000000000000000e0,null,null]");
        let back: Vec<Option<f64>> = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(back, vec![Some(1.5), None, None]);
    }
}
