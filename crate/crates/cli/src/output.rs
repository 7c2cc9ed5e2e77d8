//! CSV and flat report writers. Numbers carry 12 significant digits.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Scientific notation with 12 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.11e}")
}

/// `<prefix>_<suffix>`, creating the parent directory if needed.
pub fn output_path(prefix: &Path, suffix: &str) -> Result<PathBuf> {
    let name = format!(
        "{}_{suffix}",
        prefix.file_name().and_then(|n| n.to_str()).unwrap_or("run")
    );
    let path = prefix.with_file_name(name);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(path)
}

pub struct Csv {
    path: PathBuf,
    out: BufWriter<File>,
}

impl Csv {
    pub fn create(prefix: &Path, suffix: &str, header: &[&str]) -> Result<Self> {
        let path = output_path(prefix, suffix)?;
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut csv = Csv {
            path,
            out: BufWriter::new(file),
        };
        csv.row(header.iter().map(|s| s.to_string()))?;
        Ok(csv)
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, fields: I) -> Result<()> {
        let line = fields.into_iter().collect::<Vec<_>>().join(",");
        writeln!(self.out, "{line}").with_context(|| format!("writing {}", self.path.display()))
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.out
            .flush()
            .with_context(|| format!("writing {}", self.path.display()))?;
        Ok(self.path)
    }
}

/// Flat `key=value` report.
#[derive(Default)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn num(&mut self, key: &str, v: f64) -> &mut Self {
        self.text(key, num(v))
    }

    pub fn text(&mut self, key: &str, v: impl ToString) -> &mut Self {
        self.lines.push((key.to_string(), v.to_string()));
        self
    }

    pub fn render(&self) -> String {
        self.lines.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn write(&self, prefix: &Path, suffix: &str) -> Result<PathBuf> {
        let path = output_path(prefix, suffix)?;
        fs::write(&path, self.render()).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(1.7e-8), "1.70000000000e-8");
        assert_eq!(num(-123456.789012345), "-1.23456789012e5");
    }

    #[test]
    fn suffixed_paths() {
        let p = output_path(Path::new("run"), "field.csv").unwrap();
        assert_eq!(p, PathBuf::from("run_field.csv"));
    }
}
