//! CSV and JSON writers. Floats go out with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{LabError, Result};

/// `{:.16e}`, with `NaN` / `inf` spelled out.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Accumulates CSV text with a fixed header.
pub struct Csv {
    columns: usize,
    text: String,
}

/// One CSV cell.
pub enum Cell<'a> {
    F(f64),
    I(i64),
    U(u64),
    S(&'a str),
    B(bool),
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            columns: header.len(),
            text: header.join(",") + "\n",
        }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        assert_eq!(cells.len(), self.columns, "csv row width");
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            match c {
                Cell::F(x) => self.text.push_str(&fmt_float(*x)),
                Cell::I(v) => write!(self.text, "{v}").unwrap(),
                Cell::U(v) => write!(self.text, "{v}").unwrap(),
                Cell::S(s) => {
                    if s.contains([',', '"', '\n']) {
                        write!(self.text, "\"{}\"", s.replace('"', "\"\"")).unwrap()
                    } else {
                        self.text.push_str(s)
                    }
                }
                Cell::B(b) => write!(self.text, "{b}").unwrap(),
            }
        }
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| LabError::Io {
        path: dir.display().to_string(),
        source,
    })
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|source| LabError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

pub fn write_json<S: Serialize>(dir: &Path, name: &str, value: &S) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(dir, name, &text)
}
