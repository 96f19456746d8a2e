//! Output files: the entropy table, the fit summary, plot data and raw
//! density tables.
//!
//! All contents are rendered in memory first and then moved into place via
//! temporary files in the output directory, so a failed run never leaves a
//! truncated file behind.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::scaling::{LogLawFit, SweepResult};

pub const TABLE_HEADER: &str =
    "N,S_r(min),S_r,S_r(max),S_k(min),S_k,S_k(max),S(min),S,S(max),Omega";

/// `printf("%.*g")`-style formatting with `digits` significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn sig6(x: f64) -> String {
    format_significant(x, 6)
}

/// Rounds to six significant digits for JSON output.
fn round6(x: f64) -> f64 {
    sig6(x).parse().expect("formatted number parses")
}

pub fn render_table(sweep: &SweepResult) -> String {
    let mut out = String::new();
    writeln!(out, "{TABLE_HEADER}").unwrap();
    for e in &sweep.entries {
        let r = &e.report;
        let mut row = e.n_particles.to_string();
        for v in r.table_row().iter().chain(std::iter::once(&r.omega)) {
            row.push(',');
            row.push_str(&sig6(*v));
        }
        writeln!(out, "{row}").unwrap();
    }
    out
}

#[derive(Serialize)]
struct FitSummary {
    a: f64,
    b: f64,
    rms_residual: f64,
    n_min: f64,
    n_max: f64,
}

pub fn render_fit(fit: &LogLawFit) -> String {
    let summary = FitSummary {
        a: round6(fit.intercept),
        b: round6(fit.slope),
        rms_residual: round6(fit.rms_residual),
        n_min: fit.n_min,
        n_max: fit.n_max,
    };
    let mut s = serde_json::to_string_pretty(&summary).expect("plain struct serializes");
    s.push('\n');
    s
}

fn render_columns(header: &str, rows: impl Iterator<Item = (u64, f64)>) -> String {
    let mut out = format!("# {header}\n");
    for (n, v) in rows {
        writeln!(out, "{n} {}", sig6(v)).unwrap();
    }
    out
}

pub fn render_fig1(sweep: &SweepResult) -> String {
    render_columns(
        "N S",
        sweep.entries.iter().map(|e| (e.n_particles, e.report.s_total)),
    )
}

pub fn render_fig2(sweep: &SweepResult) -> String {
    render_columns(
        "N Omega",
        sweep.entries.iter().map(|e| (e.n_particles, e.report.omega)),
    )
}

/// Two-column density table at full precision, readable by the ingester.
pub fn render_density_table(label: &str, coords: &[f64], values: &[f64]) -> String {
    let mut out = format!("# {label}\n");
    for (x, v) in coords.iter().zip(values) {
        writeln!(out, "{x:.17e} {v:.17e}").unwrap();
    }
    out
}

/// Writes every `(name, contents)` pair into `dir` atomically.
pub fn write_atomically(dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut staged = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let mut tmp = tempfile::Builder::new()
            .prefix(".bec-entropy-")
            .tempfile_in(dir)
            .map_err(io_err(dir))?;
        tmp.write_all(contents.as_bytes()).map_err(io_err(tmp.path()))?;
        tmp.flush().map_err(io_err(tmp.path()))?;
        // temp files are created owner-only; outputs should be world-readable
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            tmp.as_file()
                .set_permissions(std::fs::Permissions::from_mode(0o644))
                .map_err(io_err(tmp.path()))?;
        }
        staged.push((tmp, dir.join(name)));
    }
    let mut written = Vec::with_capacity(staged.len());
    for (tmp, target) in staged {
        tmp.persist(&target).map_err(|e| Error::Io {
            path: target.clone(),
            source: e.error,
        })?;
        written.push(target);
    }
    Ok(written)
}

/// Renders the requested outputs of a sweep and writes them to the
/// configured directory. `fit.json` is skipped when no fit is available (fewer than three N).
pub fn emit_reports(
    sweep: &SweepResult,
    fit: Option<&LogLawFit>,
    config: &RunConfig,
) -> Result<Vec<PathBuf>> {
    if sweep.entries.is_empty() {
        return Err(Error::InvalidInput("nothing to report: empty sweep".into()));
    }
    let mut files = Vec::new();
    if config.wants(OutputFormat::Csv) {
        files.push(("table.csv".to_string(), render_table(sweep)));
    }
    if let (true, Some(fit)) = (config.wants(OutputFormat::Json), fit) {
        files.push(("fit.json".to_string(), render_fit(fit)));
    }
    if config.wants(OutputFormat::PlotData) {
        files.push(("fig1.dat".to_string(), render_fig1(sweep)));
        files.push(("fig2.dat".to_string(), render_fig2(sweep)));
    }
    for entry in &sweep.entries {
        if let Some(pair) = &entry.densities {
            let n = entry.n_particles;
            files.push((
                format!("rho_N{n}.dat"),
                render_density_table("r rho(r)", pair.rho.grid().nodes(), pair.rho.values()),
            ));
            files.push((
                format!("nk_N{n}.dat"),
                render_density_table("k n(k)", pair.nk.grid().nodes(), pair.nk.values()),
            ));
        }
    }
    write_atomically(&config.out_dir, &files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(4.92512345, 6), "4.92512");
        assert_eq!(format_significant(6.434, 6), "6.434");
        assert_eq!(format_significant(-1.5573, 6), "-1.5573");
        assert_eq!(format_significant(0.00262345678, 6), "0.00262346");
        assert_eq!(format_significant(1234567.0, 6), "1.23457e+06");
        assert_eq!(format_significant(1e-5, 6), "1e-05");
        assert_eq!(format_significant(100000.0, 6), "100000");
        assert_eq!(format_significant(0.0, 6), "0");
        assert_eq!(format_significant(9.9999999, 6), "10");
    }

    #[test]
    fn atomic_write_into_fresh_directory() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("nested/out");
        let written = write_atomically(
            &out,
            &[("a.txt".into(), "alpha\n".into()), ("b.txt".into(), "beta\n".into())],
        )
        .unwrap();
        assert_eq!(written.len(), 2);
        assert_eq!(std::fs::read_to_string(out.join("a.txt")).unwrap(), "alpha\n");
        let leftovers: Vec<_> = std::fs::read_dir(&out)
            .unwrap()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_name().to_string_lossy().starts_with(".bec-entropy-"))
            .collect();
        assert!(leftovers.is_empty());
    }

    #[test]
    fn unwritable_directory_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        // a regular file where the directory should be
        let err = write_atomically(&blocker.join("sub"), &[("t.csv".into(), "1\n".into())]);
        assert!(matches!(err, Err(Error::Io { .. })));
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
