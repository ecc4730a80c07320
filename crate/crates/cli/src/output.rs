//! Artifact files: CSV tables and the JSON manifest.
//!
//! CSV files have one header row naming every column with its unit, `\n`
//! line endings and numbers in scientific notation with 9 significant digits.

use std::path::{Path, PathBuf};

use csv::{QuoteStyle, Terminator, WriterBuilder};
use serde::Serialize;

use crate::error::{CliError, Result};

/// Fixed-precision scientific notation, 9 significant digits.
pub fn num(x: f64) -> String {
    // avoid a "-0" that depends on the sign of a rounding residue
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.8e}")
}

/// Output directory plus the list of files written into it.
#[derive(Debug)]
pub struct Artifacts {
    root: PathBuf,
    prefix: String,
    files: Vec<String>,
}

impl Artifacts {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|source| CliError::Io {
            path: root.to_path_buf(),
            source,
        })?;
        Ok(Artifacts {
            root: root.to_path_buf(),
            prefix: String::new(),
            files: Vec::new(),
        })
    }

    /// Sub-directory whose files are later merged with [`Artifacts::absorb`].
    pub fn subdir(&self, name: &str) -> Result<Self> {
        let mut sub = Artifacts::create(&self.root.join(name))?;
        sub.prefix = format!("{}{name}/", self.prefix);
        Ok(sub)
    }

    pub fn absorb(&mut self, other: Artifacts) {
        self.files.extend(other.files);
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn csv<I>(&mut self, name: &str, header: &[&str], rows: I) -> Result<PathBuf>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let path = self.root.join(name);
        let wrap = |source| CliError::Csv {
            path: path.clone(),
            source,
        };
        let mut w = WriterBuilder::new()
            .terminator(Terminator::Any(b'\n'))
            .quote_style(QuoteStyle::Necessary)
            .from_path(&path)
            .map_err(wrap)?;
        w.write_record(header).map_err(wrap)?;
        for row in rows {
            w.write_record(&row).map_err(wrap)?;
        }
        w.flush().map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        self.files.push(format!("{}{name}", self.prefix));
        Ok(path)
    }

    /// Pretty JSON with a trailing newline. Not listed in [`Artifacts::files`].
    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.root.join(name);
        let mut text = serde_json::to_string_pretty(value).map_err(|source| CliError::Json {
            path: path.clone(),
            source,
        })?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(0.0), "0.00000000e0");
        assert_eq!(num(-0.0), "0.00000000e0");
        assert_eq!(num(98100.0), "9.81000000e4");
        assert_eq!(num(-1.234567891e-7), "-1.23456789e-7");
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = Artifacts::create(dir.path()).unwrap();
        a.csv("t.csv", &["a_m", "b"], vec![vec![num(1.0), "x,y".into()]])
            .unwrap();
        let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert_eq!(text, "a_m,b\n1.00000000e0,\"x,y\"\n");
        let mut sub = a.subdir("s").unwrap();
        sub.csv("u.csv", &["c"], Vec::<Vec<String>>::new()).unwrap();
        a.absorb(sub);
        assert_eq!(a.files(), ["t.csv", "s/u.csv"]);
    }
}
