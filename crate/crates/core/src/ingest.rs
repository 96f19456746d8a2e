//! Ingestion of externally tabulated position and momentum densities.
//!
//! Files hold two numeric columns (coordinate, density) separated by
//! whitespace or commas; `#` starts a comment. Coordinates must form a
//! uniform mesh starting at zero. Each density is renormalized to one and
//! then goes through the same entropy path as a computed condensate.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::entropy::EntropyReport;
use crate::error::{Error, Result};
use crate::momentum::{DensityPair, MomentumDensity, MomentumGrid};
use crate::radial::{integrate_radial, RadialFunction, RadialGrid, UniformMesh};

/// Largest normalization defect accepted before renormalizing.
pub const MAX_NORM_DEFECT: f64 = 0.1;
const NEGATIVE_TOL: f64 = -1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DensityKind {
    Position,
    Momentum,
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestedDensity {
    pub source: PathBuf,
    pub kind: DensityKind,
    pub coords: Vec<f64>,
    /// Renormalized density values.
    pub density: Vec<f64>,
    /// `|∫ρ d³x − 1|` of the file as read.
    pub normalization_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestionResult {
    pub report: EntropyReport,
    pub position: IngestedDensity,
    pub momentum: IngestedDensity,
}

#[derive(Debug)]
struct Table {
    coords: Vec<f64>,
    values: Vec<f64>,
    lines: Vec<usize>,
}

fn parse_table(path: &Path, text: &str) -> Result<Table> {
    let fail = |line: usize, message: String| Error::Ingest {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut table = Table {
        coords: Vec::new(),
        values: Vec::new(),
        lines: Vec::new(),
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(fail(line, format!("expected 2 columns, found {}", fields.len())));
        }
        let mut nums = [0.0; 2];
        for (slot, field) in nums.iter_mut().zip(&fields) {
            *slot = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| fail(line, format!("`{field}` is not a finite number")))?;
        }
        let [x, v] = nums;
        if let Some(&prev) = table.coords.last() {
            if x <= prev {
                return Err(fail(
                    line,
                    format!("coordinate {x} does not increase (previous {prev})"),
                ));
            }
        }
        if v < NEGATIVE_TOL {
            return Err(fail(line, format!("negative density {v}")));
        }
        table.coords.push(x);
        table.values.push(v.max(0.0));
        table.lines.push(line);
    }
    if table.coords.is_empty() {
        return Err(fail(0, "no data rows".into()));
    }
    Ok(table)
}

fn load(path: &Path, kind: DensityKind) -> Result<(IngestedDensity, UniformMesh)> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let table = parse_table(path, &text)?;
    let mesh = UniformMesh::from_nodes(&table.coords).map_err(|e| Error::Ingest {
        path: path.to_path_buf(),
        line: table.lines[0],
        message: e.to_string(),
    })?;
    let integral = mesh.integrate_spherical(&table.values);
    let defect = (integral - 1.0).abs();
    if !(defect <= MAX_NORM_DEFECT) {
        return Err(Error::Ingest {
            path: path.to_path_buf(),
            line: 0,
            message: format!(
                "density integrates to {integral}, more than {MAX_NORM_DEFECT} away from 1"
            ),
        });
    }
    let density = table.values.iter().map(|v| v / integral).collect();
    Ok((
        IngestedDensity {
            source: path.to_path_buf(),
            kind,
            coords: table.coords,
            density,
            normalization_defect: defect,
        },
        mesh,
    ))
}

/// Reads a position and a momentum density and computes their full report.
pub fn ingest_density_pair(position: &Path, momentum: &Path) -> Result<IngestionResult> {
    let (pos, r_mesh) = load(position, DensityKind::Position)?;
    let (mom, k_mesh) = load(momentum, DensityKind::Momentum)?;
    let rho = RadialFunction::new(RadialGrid::from_nodes(r_mesh.nodes())?, pos.density.clone())?;
    debug_assert!((integrate_radial(&rho)? - 1.0).abs() < 1e-12);
    let nk = MomentumDensity::new(MomentumGrid::from_nodes(k_mesh.nodes())?, mom.density.clone())?;
    let pair = DensityPair::new(rho, nk)?;
    let report = EntropyReport::from_pair(&pair, None)?;
    Ok(IngestionResult {
        report,
        position: pos,
        momentum: mom,
    })
}
