//! CSV, JSON and plot-data writers.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

/// Reals are written with 17 significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

pub fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn coords(x: &[u32]) -> String {
    x.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

/// Collects the files written by one run.
#[derive(Debug)]
pub struct OutDir {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(dir: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(OutDir { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn target(&mut self, name: &str) -> PathBuf {
        let path = self.dir.join(name);
        self.written.push(path.clone());
        path
    }

    pub fn csv<H, R>(&mut self, name: &str, header: &[H], rows: impl IntoIterator<Item = R>) -> anyhow::Result<()>
    where
        H: AsRef<str>,
        R: IntoIterator,
        R::Item: AsRef<[u8]>,
    {
        let path = self.target(name);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(header.iter().map(|h| h.as_ref()))?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        let path = self.target(name);
        let mut w = BufWriter::new(File::create(&path).with_context(|| format!("writing {}", path.display()))?);
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    /// Two whitespace-separated columns, one point per line.
    pub fn dat(
        &mut self,
        name: &str,
        columns: (&str, &str),
        points: impl IntoIterator<Item = (f64, f64)>,
    ) -> anyhow::Result<()> {
        let path = self.target(name);
        let mut w = BufWriter::new(File::create(&path).with_context(|| format!("writing {}", path.display()))?);
        writeln!(w, "# {} {}", columns.0, columns.1)?;
        for (x, y) in points {
            writeln!(w, "{} {}", real(x), real(y))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2f64.sqrt(), 1e-300, 123456.789] {
            assert_eq!(real(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(real(0.5), "5.0000000000000000e-1");
    }
}
