//! Result records and their CSV / JSON forms.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}`")),
        }
    }
}

/// One grid point. Maps keep column order stable; a non-finite output is
/// written as `nan`/`null` and marked by the `finite` flag.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ResultRecord {
    pub inputs: BTreeMap<String, f64>,
    pub outputs: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
}

impl ResultRecord {
    pub fn input(mut self, k: &str, v: f64) -> Self {
        self.inputs.insert(k.into(), v);
        self
    }

    pub fn output(mut self, k: &str, v: f64) -> Self {
        self.outputs.insert(k.into(), v);
        self
    }

    pub fn flag(mut self, k: &str, v: bool) -> Self {
        self.flags.insert(k.into(), v);
        self
    }

    /// Adds the `finite` flag over all outputs.
    pub fn finish(self) -> Self {
        let finite = self.outputs.values().all(|v| v.is_finite());
        self.flag("finite", finite)
    }
}

/// 17 significant digits, enough to round-trip an `f64`.
pub fn cell(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "nan".into()
    }
}

pub fn config_hash(canonical: &str) -> String {
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_csv(mut w: impl Write, records: &[ResultRecord], hash: &str) -> std::io::Result<()> {
    let Some(first) = records.first() else {
        return Ok(());
    };
    let header: Vec<&str> = first
        .inputs
        .keys()
        .chain(first.outputs.keys())
        .chain(first.flags.keys())
        .map(String::as_str)
        .collect();
    writeln!(w, "{}", header.join(","))?;
    for r in records {
        let row: Vec<String> = r
            .inputs
            .values()
            .chain(r.outputs.values())
            .map(|&v| cell(v))
            .chain(r.flags.values().map(|b| b.to_string()))
            .collect();
        writeln!(w, "{}", row.join(","))?;
    }
    writeln!(w, "# caplab {VERSION}")?;
    writeln!(w, "# config_sha256 {hash}")
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    version: &'a str,
    config: &'a str,
    config_sha256: &'a str,
    records: &'a [ResultRecord],
}

pub fn write_json(w: impl Write, records: &[ResultRecord], canonical: &str, hash: &str) -> std::io::Result<()> {
    let doc = JsonDoc { version: VERSION, config: canonical, config_sha256: hash, records };
    serde_json::to_writer_pretty(w, &doc).map_err(std::io::Error::other)
}

/// Writes to `path`, or stdout when there is none.
pub fn emit(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), CliError> {
    let res = match path {
        Some(p) => std::fs::File::create(p).and_then(|file| {
            let mut w = std::io::BufWriter::new(file);
            f(&mut w)?;
            w.flush()
        }),
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            f(&mut w)
        }
    };
    res.map_err(|e| match path {
        Some(p) => CliError::Io(format!("writing {}: {e}", p.display())),
        None => CliError::Io(format!("writing stdout: {e}")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1.8790330539983988, 6.02e23, -2.5e-300] {
            let c = cell(v);
            assert_eq!(c.parse::<f64>().unwrap(), v, "{c}");
        }
        assert_eq!(cell(f64::NAN), "nan");
    }

    #[test]
    fn csv_layout() {
        let r = ResultRecord::default().input("x", 0.5).output("ic", 1.25).finish();
        let mut buf = Vec::new();
        write_csv(&mut buf, &[r], "abc").unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,ic,finite");
        assert_eq!(lines[1], "5.0000000000000000e-1,1.2500000000000000e0,true");
        assert_eq!(lines.last().unwrap(), &"# config_sha256 abc");
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(config_hash("a=1\n"), config_hash("a=1\n"));
        assert_ne!(config_hash("a=1\n"), config_hash("a=2\n"));
        assert_eq!(config_hash("").len(), 64);
    }
}
