//! CSV tables with fixed formatting: 17 significant digits, `\n` endings.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use anyhow::Context;

pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Buffers rows, then writes to a file or stdout in one go.
pub struct Table {
    inner: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> anyhow::Result<Self> {
        let mut inner = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        inner.write_record(header)?;
        Ok(Self { inner })
    }

    pub fn row<I, S>(&mut self, fields: I) -> anyhow::Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner.write_record(fields)?;
        Ok(())
    }

    pub fn into_bytes(self) -> anyhow::Result<Vec<u8>> {
        self.inner.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {}", e.error()))
    }

    /// `None` writes to stdout.
    pub fn finish(self, out: Option<&Path>) -> anyhow::Result<()> {
        let bytes = self.into_bytes()?;
        match out {
            Some(path) => {
                let mut f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
                f.write_all(&bytes)?;
            }
            None => io::stdout().lock().write_all(&bytes)?,
        }
        Ok(())
    }
}
