use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::Value;

/// Formats a real with 17 significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Csv {
            buf: format!("{header}\n"),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

pub fn write_text(dest: Option<&Path>, text: &str) -> Result<()> {
    match dest {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes the metadata sidecar next to `out`, or to stderr without one.
pub fn write_meta(out: Option<&Path>, meta: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(meta)? + "\n";
    match out {
        Some(path) => {
            let path = sibling(path, ".meta.json");
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            io::stderr().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, -2.0 / 3.0, 1e-300, 6.02214076e23] {
            let s = real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(real(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_rows_use_lf() {
        let mut c = Csv::new("a,b");
        c.row(&[real(1.0), real(2.0)]);
        assert_eq!(c.into_string(), "a,b\n1.0000000000000000e0,2.0000000000000000e0\n");
    }
}
