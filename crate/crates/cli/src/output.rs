use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::run::CliError;

/// Artifact directory; files are written once each, by this thread only.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root).map_err(|e| CliError::Io(format!("cannot create `{}`: {e}", root.display())))?;
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.root.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("cannot write `{}`: {e}", path.display())))
    }

    pub fn write_json(&self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }
}

/// Shortest round-trip decimal, in exponent form outside [1e-4, 1e6);
/// non-finite values as `inf`/`-inf`/`nan`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        let a = x.abs();
        if a != 0.0 && !(1e-4..1e6).contains(&a) {
            format!("{x:e}")
        } else {
            format!("{x}")
        }
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn lifetime(t: Option<f64>) -> String {
    t.map_or_else(|| "inf".into(), num)
}

/// CSV from a header and rows of already formatted cells.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_non_finite() {
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(1.5e-9), "1.5e-9");
        assert_eq!(num(-2.0e30), "-2e30");
        assert_eq!(num(0.0), "0");
        assert_eq!(lifetime(None), "inf");
    }

    #[test]
    fn csv_layout() {
        let s = csv(&["a", "b"], vec![vec!["1".into(), "2".into()]]);
        assert_eq!(s, "a,b\n1,2\n");
    }
}
