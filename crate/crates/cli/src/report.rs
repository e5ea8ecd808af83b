use std::io::{self, Write};

use clap::ValueEnum;
use nalgebra::DVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Aligned `key  value` lines for people.
    Text,
    /// `key<TAB>value` lines with fixed key names.
    Kv,
}

/// Ordered key/value output.
#[derive(Debug, Default)]
pub struct Report {
    rows: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn str(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.rows.push((key.to_string(), value.into()));
        self
    }

    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.str(key, fmt_f64(value))
    }

    pub fn int(&mut self, key: &str, value: usize) -> &mut Self {
        self.str(key, value.to_string())
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.str(key, if value { "true" } else { "false" })
    }

    pub fn verdict(&mut self, key: &str, ok: bool) -> &mut Self {
        self.str(key, if ok { "OK" } else { "VIOLATED" })
    }

    pub fn vector(&mut self, key: &str, v: &DVector<f64>) -> &mut Self {
        let joined = v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(" ");
        self.str(key, joined)
    }

    pub fn write(&self, out: &mut dyn Write, format: Format) -> io::Result<()> {
        let width = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.rows {
            match format {
                Format::Kv => writeln!(out, "{k}\t{v}")?,
                Format::Text => writeln!(out, "{k:<width$}  {v}")?,
            }
        }
        Ok(())
    }
}

/// Shortest representation that parses back to the same value.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}
