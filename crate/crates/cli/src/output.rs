//! CSV and sidecar writing. Floats use a fixed 12-significant-digit scientific
//! format so identical inputs give byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use wqed_core::config::ConfigDocument;
use wqed_core::model::SystemSpec;

use crate::{CliResult, Failure};

pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

pub struct Run {
    pub subcommand: &'static str,
    pub config_sha256: String,
    pub document: ConfigDocument,
    pub system: SystemSpec,
    pub csv_path: PathBuf,
}

impl Run {
    pub fn new(
        subcommand: &'static str,
        text: &str,
        document: ConfigDocument,
        system: SystemSpec,
        output: &Path,
    ) -> Run {
        Run {
            subcommand,
            config_sha256: hex::encode(Sha256::digest(text.as_bytes())),
            document,
            system,
            csv_path: output.to_path_buf(),
        }
    }

    pub fn sidecar_path(&self) -> PathBuf {
        self.csv_path.with_extension("json")
    }

    /// Numeric rows; every cell in the fixed float format.
    pub fn write(
        &self,
        header: &[&str],
        rows: impl Iterator<Item = Vec<f64>>,
        arguments: Value,
        summary: Value,
    ) -> CliResult<()> {
        self.write_cells(
            header,
            rows.map(|r| r.into_iter().map(fmt_float).collect()),
            arguments,
            summary,
        )
    }

    pub fn write_cells(
        &self,
        header: &[&str],
        rows: impl Iterator<Item = Vec<String>>,
        arguments: Value,
        summary: Value,
    ) -> CliResult<()> {
        fn io(p: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
            move |e| Failure::Config(format!("cannot write {}: {e}", p.display()))
        }
        let file = File::create(&self.csv_path).map_err(io(&self.csv_path))?;
        let mut out = BufWriter::new(file);
        let mut n_rows = 0usize;
        let body = || -> std::io::Result<()> {
            writeln!(
                out,
                "# wqed {} {} config_sha256={}",
                env!("CARGO_PKG_VERSION"),
                self.subcommand,
                self.config_sha256
            )?;
            writeln!(out, "{}", header.join(","))?;
            for row in rows {
                writeln!(out, "{}", row.join(","))?;
                n_rows += 1;
            }
            out.flush()
        };
        body().map_err(io(&self.csv_path))?;

        let sidecar = json!({
            "wqed_version": env!("CARGO_PKG_VERSION"),
            "subcommand": self.subcommand,
            "config_sha256": self.config_sha256,
            "config": serde_json::to_value(&self.document).expect("config document serializes"),
            "arguments": arguments,
            "columns": header,
            "rows": n_rows,
            "summary": summary,
        });
        let path = self.sidecar_path();
        let mut text = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
        text.push('\n');
        std::fs::write(&path, text).map_err(io(&path))
    }
}
