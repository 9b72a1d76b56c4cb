use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use lowosc_core::config::{ExportFormats, NumberFormat};
use lowosc_core::{Error, Result, Scalar};

/// Writes `bytes` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", dir.join(name).display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    let path = dir.join(name);
    tmp.persist(&path).map_err(|e| io(e.error))?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    write_atomic(dir, name, text.as_bytes())
}

/// Decimal rendering of `v` rounded half away from zero to `digits` places.
pub fn decimal(v: &Scalar, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let num = v.numer().abs() * &scale;
    let den = v.denom();
    let (mut q, r) = num.div_rem(den);
    if r * 2u32 >= *den {
        q += 1u32;
    }
    let (int, frac) = q.div_rem(&scale);
    let sign = if v.is_negative() && !(int.is_zero() && frac.is_zero()) { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{int}");
    }
    format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits as usize)
}

pub fn render(v: &Scalar, f: &ExportFormats) -> String {
    match f.numbers {
        NumberFormat::Rational => v.to_string(),
        NumberFormat::Decimal => decimal(v, f.digits),
    }
}

/// CSV text with a header row.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv { text: header.join(",") + "\n" }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn bytes(&self) -> &[u8] {
        self.text.as_bytes()
    }
}
