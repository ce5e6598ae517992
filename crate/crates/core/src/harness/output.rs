//! CSV, JSON metadata and gnuplot `.dat` emission.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

use super::config::ExperimentConfig;
use super::ota::{resolve_link_gains, LinkGains, SNR_DEFINITION};
use super::sweep::SweepTable;

pub const CSV_HEADER: &str =
    "scheme,axis,axis_value,mean_rate_bpshz,std_err,outage_frac,n_realizations,master_seed";

#[derive(Serialize)]
struct Metadata<'a> {
    generator: String,
    axis: &'a str,
    values: &'a [f64],
    schemes: &'a [String],
    config: &'a ExperimentConfig,
    aperture_w: f64,
    link_gains: Option<LinkGains>,
    snr_definition: &'static str,
    csv_columns: &'static str,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

/// `{:?}` on f64 is the shortest string that parses back to the same bits.
fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub fn render_csv(table: &SweepTable) -> String {
    let axis = table.axis.map_or("none", |a| a.name());
    let mut out = String::with_capacity(64 * (table.rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &table.rows {
        let r = &row.result;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.scheme,
            axis,
            row.axis_value.map(fmt_f64).unwrap_or_default(),
            fmt_f64(r.mean_rate),
            fmt_f64(r.std_error),
            fmt_f64(r.outage_fraction),
            r.n_realizations,
            table.config.master_seed,
        );
    }
    out
}

pub fn render_metadata(table: &SweepTable) -> Result<String> {
    let meta = Metadata {
        generator: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        axis: table.axis.map_or("none", |a| a.name()),
        values: &table.values,
        schemes: &table.schemes,
        config: &table.config,
        aperture_w: table.config.fas.aperture(),
        link_gains: resolve_link_gains(&table.config).ok(),
        snr_definition: SNR_DEFINITION,
        csv_columns: CSV_HEADER,
    };
    let mut s = serde_json::to_string_pretty(&meta)
        .map_err(|e| Error::config(format!("cannot serialise metadata: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Writes `csv_path` and a JSON sidecar next to it (same stem, `.json`).
/// Returns the sidecar path.
pub fn emit_results(table: &SweepTable, csv_path: &Path) -> Result<PathBuf> {
    if table.rows.is_empty() {
        return Err(Error::config("refusing to write an empty results table"));
    }
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(csv_path, render_csv(table)).map_err(io_err(csv_path))?;
    let meta_path = csv_path.with_extension("json");
    fs::write(&meta_path, render_metadata(table)?).map_err(io_err(&meta_path))?;
    Ok(meta_path)
}

/// One gnuplot-friendly `<scheme>.dat` per scheme in `dir`.
pub fn emit_dat(table: &SweepTable, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let axis = table.axis.map_or("none", |a| a.name());
    let mut written = Vec::new();
    for scheme in &table.schemes {
        let mut body = format!("# scheme {scheme}\n# {axis} mean_rate_bpshz std_err outage_frac\n");
        for row in table.series(scheme) {
            let r = &row.result;
            let _ = writeln!(
                body,
                "{} {} {} {}",
                row.axis_value.map(fmt_f64).unwrap_or_else(|| "0".into()),
                fmt_f64(r.mean_rate),
                fmt_f64(r.std_error),
                fmt_f64(r.outage_fraction)
            );
        }
        let name: String = scheme
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
            .collect();
        let path = dir.join(format!("{name}.dat"));
        fs::write(&path, body).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}
