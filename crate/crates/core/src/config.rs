//! Run configuration: built-in defaults, then a flat TOML file, then flags.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gpe::{DEFAULT_GRID_POINTS, DEFAULT_SCATTERING_LENGTH, DEFAULT_TOL, DEFAULT_TRAP_LENGTH};
use crate::radial::MIN_POINTS;
use crate::scaling::{SweepSettings, REFERENCE_N_VALUES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutputFormat {
    Csv,
    Json,
    PlotData,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "plotdata" => Ok(Self::PlotData),
            other => Err(Error::Config(format!(
                "unknown output format `{other}` (expected csv, json or plotdata)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    GpeSweep,
    IngestDensities { position: PathBuf, momentum: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_values: Vec<u64>,
    /// Å
    pub scattering_length: f64,
    /// Å
    pub trap_length: f64,
    pub r_max: Option<f64>,
    pub grid_points: usize,
    pub tol: f64,
    pub out_dir: PathBuf,
    pub formats: Vec<OutputFormat>,
    pub export_densities: bool,
    pub mode: Mode,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_values: REFERENCE_N_VALUES.to_vec(),
            scattering_length: DEFAULT_SCATTERING_LENGTH,
            trap_length: DEFAULT_TRAP_LENGTH,
            r_max: None,
            grid_points: DEFAULT_GRID_POINTS,
            tol: DEFAULT_TOL,
            out_dir: PathBuf::from("."),
            formats: vec![OutputFormat::Csv, OutputFormat::Json, OutputFormat::PlotData],
            export_densities: false,
            mode: Mode::GpeSweep,
        }
    }
}

impl RunConfig {
    pub fn sweep_settings(&self) -> SweepSettings {
        SweepSettings {
            grid_points: self.grid_points,
            r_max: self.r_max,
            tol: self.tol,
            keep_densities: self.export_densities,
            ..SweepSettings::default()
        }
    }

    pub fn wants(&self, format: OutputFormat) -> bool {
        self.formats.contains(&format)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(Error::Config("n-values must not be empty".into()));
        }
        if self.n_values.contains(&0) {
            return Err(Error::Config("particle numbers must be at least 1".into()));
        }
        if self.n_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("n-values must be strictly increasing".into()));
        }
        if !(self.scattering_length.is_finite() && self.scattering_length >= 0.0) {
            return Err(Error::Config(format!(
                "scattering length must be non-negative, got {}",
                self.scattering_length
            )));
        }
        if !(self.trap_length.is_finite() && self.trap_length > 0.0) {
            return Err(Error::Config(format!(
                "trap length must be positive, got {}",
                self.trap_length
            )));
        }
        if let Some(r) = self.r_max {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::Config(format!("r-max must be positive, got {r}")));
            }
        }
        if self.grid_points < MIN_POINTS {
            return Err(Error::Config(format!(
                "grid-points must be at least {MIN_POINTS}, got {}",
                self.grid_points
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.formats.is_empty() {
            return Err(Error::Config("at least one output format is required".into()));
        }
        Ok(())
    }
}

/// Command-line flags. Anything left unset falls back to the config file,
/// then to the built-in defaults.
#[derive(Debug, Parser)]
#[command(name = "bec-entropy", version, about = "Information entropy of trapped Bose condensates")]
pub struct CliArgs {
    /// Comma-separated particle numbers, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    pub n_values: Option<Vec<u64>>,
    #[arg(long = "scattering-length-angstrom")]
    pub scattering_length: Option<f64>,
    #[arg(long = "trap-length-angstrom")]
    pub trap_length: Option<f64>,
    /// Box radius in oscillator lengths (default scales with the Thomas-Fermi radius).
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output directory; an empty value means the current directory.
    #[arg(long)]
    pub out_dir: Option<String>,
    /// Comma-separated subset of csv, json, plotdata.
    #[arg(long, value_delimiter = ',')]
    pub format: Option<Vec<String>>,
    /// Also write the position and momentum densities of every N.
    #[arg(long)]
    pub export_densities: bool,
    #[arg(long, value_name = "FILE")]
    pub ingest_position: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub ingest_momentum: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n_values: Option<Vec<u64>>,
    pub scattering_length_angstrom: Option<f64>,
    pub trap_length_angstrom: Option<f64>,
    pub r_max: Option<f64>,
    pub grid_points: Option<usize>,
    pub tol: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<Vec<String>>,
    pub export_densities: Option<bool>,
    pub ingest_position: Option<PathBuf>,
    pub ingest_momentum: Option<PathBuf>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

fn parse_formats(raw: &[String]) -> Result<Vec<OutputFormat>> {
    let mut formats = raw
        .iter()
        .map(|s| s.parse())
        .collect::<Result<Vec<OutputFormat>>>()?;
    formats.sort();
    formats.dedup();
    Ok(formats)
}

/// Merges flags over file values over defaults and validates the result.
pub fn parse_config(args: &CliArgs, file: Option<&FileConfig>) -> Result<RunConfig> {
    let empty = FileConfig::default();
    let file = file.unwrap_or(&empty);
    let mut cfg = RunConfig::default();

    let flag_ingest = args.ingest_position.is_some() || args.ingest_momentum.is_some();
    if flag_ingest && args.n_values.is_some() {
        return Err(Error::Config(
            "--n-values conflicts with density ingestion".into(),
        ));
    }

    if let Some(v) = args.n_values.clone().or_else(|| file.n_values.clone()) {
        cfg.n_values = v;
    }
    if let Some(a) = args.scattering_length.or(file.scattering_length_angstrom) {
        cfg.scattering_length = a;
    }
    if let Some(b) = args.trap_length.or(file.trap_length_angstrom) {
        cfg.trap_length = b;
    }
    cfg.r_max = args.r_max.or(file.r_max);
    if let Some(n) = args.grid_points.or(file.grid_points) {
        cfg.grid_points = n;
    }
    if let Some(t) = args.tol.or(file.tol) {
        cfg.tol = t;
    }
    if let Some(dir) = args.out_dir.clone().map(PathBuf::from).or_else(|| file.out_dir.clone()) {
        cfg.out_dir = if dir.as_os_str().is_empty() {
            PathBuf::from(".")
        } else {
            dir
        };
    }
    if let Some(raw) = args.format.as_ref().or(file.format.as_ref()) {
        cfg.formats = parse_formats(raw)?;
    }
    cfg.export_densities = args.export_densities || file.export_densities.unwrap_or(false);

    let (position, momentum) = if flag_ingest {
        (args.ingest_position.clone(), args.ingest_momentum.clone())
    } else {
        (file.ingest_position.clone(), file.ingest_momentum.clone())
    };
    cfg.mode = match (position, momentum) {
        (Some(position), Some(momentum)) => Mode::IngestDensities { position, momentum },
        (None, None) => Mode::GpeSweep,
        _ => {
            return Err(Error::Config(
                "--ingest-position and --ingest-momentum must be given together".into(),
            ))
        }
    };

    cfg.validate()?;
    Ok(cfg)
}

/// Parses raw process arguments, loading `--config` when given.
pub fn config_from_args<I, T>(args: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = CliArgs::try_parse_from(args).map_err(|e| Error::Config(e.to_string()))?;
    let file = args.config.as_deref().map(FileConfig::load).transpose()?;
    parse_config(&args, file.as_ref())
}
