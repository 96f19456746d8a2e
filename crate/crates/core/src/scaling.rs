//! Particle-number sweeps, the `S = a + b ln N` regression and the audit of
//! the entropy inequality chains.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::EntropyReport;
use crate::error::{Error, Result};
use crate::gpe::{solve_ground_state, CondensateState, TrapSpec, DEFAULT_GRID_POINTS, DEFAULT_TOL};
use crate::momentum::{to_momentum, DensityPair, MomentumGrid, DEFAULT_OVERSAMPLING};
use crate::radial::RadialGrid;

/// Particle numbers of the reference bosonic table.
pub const REFERENCE_N_VALUES: [u64; 10] = [
    500, 1_000, 3_000, 5_000, 7_000, 10_000, 50_000, 100_000, 500_000, 1_000_000,
];

/// A bound touched within this distance still counts as satisfied.
pub const AUDIT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub grid_points: usize,
    /// Fixed box size; `None` scales it with the Thomas–Fermi radius per N.
    pub r_max: Option<f64>,
    pub tol: f64,
    pub k_oversampling: usize,
    /// Keep each entry's densities (needed for export).
    pub keep_densities: bool,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            grid_points: DEFAULT_GRID_POINTS,
            r_max: None,
            tol: DEFAULT_TOL,
            k_oversampling: DEFAULT_OVERSAMPLING,
            keep_densities: false,
        }
    }
}

impl SweepSettings {
    pub fn grid_for(&self, spec: &TrapSpec) -> Result<RadialGrid> {
        match self.r_max {
            Some(r_max) => RadialGrid::new(r_max, self.grid_points),
            None => spec.default_grid(self.grid_points),
        }
    }
}

/// One system carried through solve, transform and entropy analysis.
#[derive(Debug, Clone)]
pub struct SystemAnalysis {
    pub state: CondensateState,
    pub pair: DensityPair,
    pub report: EntropyReport,
}

pub fn analyze_system(spec: &TrapSpec, settings: &SweepSettings) -> Result<SystemAnalysis> {
    let grid = settings.grid_for(spec)?;
    let state = solve_ground_state(spec, &grid, settings.tol)?;
    let kgrid = MomentumGrid::for_radial(&grid, settings.k_oversampling)?;
    let pair = to_momentum(&state.psi, &kgrid)?;
    let report = EntropyReport::from_pair(&pair, Some(spec.n_particles()))?;
    Ok(SystemAnalysis {
        state,
        pair,
        report,
    })
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub n_particles: u64,
    pub report: EntropyReport,
    pub chemical_potential: f64,
    pub virial_residual: f64,
    pub mu_identity_residual: f64,
    pub iterations: usize,
    pub diluteness: f64,
    pub momentum_leakage: f64,
    pub r_max: f64,
    pub densities: Option<DensityPair>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub entries: Vec<SweepEntry>,
    pub template: TrapSpec,
    pub settings: SweepSettings,
}

impl SweepResult {
    pub fn reports(&self) -> Vec<EntropyReport> {
        self.entries.iter().map(|e| e.report.clone()).collect()
    }

    /// `(N, S)` pairs for the regression.
    pub fn entropy_points(&self) -> Vec<(f64, f64)> {
        self.entries
            .iter()
            .map(|e| (e.n_particles as f64, e.report.s_total))
            .collect()
    }
}

/// Solves every N independently (in parallel) and collects the reports in
/// increasing N.
pub fn run_sweep(
    template: &TrapSpec,
    n_values: &[u64],
    settings: &SweepSettings,
) -> Result<SweepResult> {
    if n_values.is_empty() {
        return Err(Error::InvalidInput("sweep needs at least one particle number".into()));
    }
    if n_values.contains(&0) {
        return Err(Error::InvalidInput("particle numbers must be at least 1".into()));
    }
    if n_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "particle numbers must be strictly increasing".into(),
        ));
    }

    let outcomes: Vec<(u64, Result<SweepEntry>)> = n_values
        .par_iter()
        .map(|&n| (n, sweep_entry(template, n, settings)))
        .collect();

    let mut entries = Vec::with_capacity(outcomes.len());
    let mut failure = None;
    for (n, outcome) in outcomes {
        match outcome {
            Ok(entry) => entries.push(entry),
            Err(e) if failure.is_none() => failure = Some((n, e)),
            Err(_) => {}
        }
    }
    if let Some((n_particles, source)) = failure {
        return Err(Error::SweepFailed {
            n_particles,
            source: Box::new(source),
            partial: entries.into_iter().map(|e| (e.n_particles, e.report)).collect(),
        });
    }
    Ok(SweepResult {
        entries,
        template: *template,
        settings: settings.clone(),
    })
}

fn sweep_entry(template: &TrapSpec, n: u64, settings: &SweepSettings) -> Result<SweepEntry> {
    let spec = template.with_particles(n)?;
    let analysis = analyze_system(&spec, settings)?;
    let SystemAnalysis {
        state,
        pair,
        report,
    } = analysis;
    Ok(SweepEntry {
        n_particles: n,
        report,
        chemical_potential: state.chemical_potential,
        virial_residual: state.virial_residual(),
        mu_identity_residual: state.mu_identity_residual(),
        iterations: state.iterations,
        diluteness: state.diluteness,
        momentum_leakage: pair.momentum_leakage,
        r_max: state.psi.grid().r_max(),
        densities: settings.keep_densities.then_some(pair),
    })
}

/// Least-squares line `S = intercept + slope · ln N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLawFit {
    pub intercept: f64,
    pub slope: f64,
    pub rms_residual: f64,
    pub n_min: f64,
    pub n_max: f64,
}

impl LogLawFit {
    pub fn predict(&self, n: f64) -> f64 {
        self.intercept + self.slope * n.ln()
    }
}

/// Ordinary least squares of S on ln N.
pub fn fit_log_law(points: &[(f64, f64)]) -> Result<LogLawFit> {
    if points.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "log-law fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(n, s)) = points.iter().find(|(n, s)| !(*n >= 1.0 && n.is_finite() && s.is_finite())) {
        return Err(Error::InvalidInput(format!("invalid fit point (N = {n}, S = {s})")));
    }
    // canonical order makes the result independent of input order
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let m = pts.len() as f64;
    let x_mean = pts.iter().map(|(n, _)| n.ln()).sum::<f64>() / m;
    let y_mean = pts.iter().map(|(_, s)| s).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|(n, _)| (n.ln() - x_mean).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("all particle numbers are equal".into()));
    }
    let sxy: f64 = pts.iter().map(|(n, s)| (n.ln() - x_mean) * (s - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let rms_residual = (pts
        .iter()
        .map(|(n, s)| (s - intercept - slope * n.ln()).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(LogLawFit {
        intercept,
        slope,
        rms_residual,
        n_min: pts[0].0,
        n_max: pts[pts.len() - 1].0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chain {
    Position,
    Momentum,
    Total,
}

/// `lower ≤ value ≤ upper` with its two slacks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub chain: Chain,
    /// `value − lower`
    pub lower_slack: f64,
    /// `upper − value`
    pub upper_slack: f64,
    pub holds: bool,
}

impl ChainCheck {
    fn new(chain: Chain, lower: f64, value: f64, upper: f64) -> Self {
        let lower_slack = value - lower;
        let upper_slack = upper - value;
        Self {
            chain,
            lower_slack,
            upper_slack,
            holds: lower_slack >= -AUDIT_TOL && upper_slack >= -AUDIT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub n_particles: Option<u64>,
    pub checks: [ChainCheck; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityAudit {
    pub rows: Vec<AuditRow>,
    pub passed: bool,
}

impl InequalityAudit {
    pub fn check_count(&self) -> usize {
        self.rows.len() * 3
    }

    pub fn failures(&self) -> impl Iterator<Item = (&AuditRow, &ChainCheck)> {
        self.rows
            .iter()
            .flat_map(|row| row.checks.iter().map(move |c| (row, c)))
            .filter(|(_, c)| !c.holds)
    }
}

pub fn audit_reports(reports: &[EntropyReport]) -> InequalityAudit {
    let rows: Vec<AuditRow> = reports
        .iter()
        .map(|r| AuditRow {
            n_particles: r.n_particles,
            checks: [
                ChainCheck::new(Chain::Position, r.s_r_min, r.s_r, r.s_r_max),
                ChainCheck::new(Chain::Momentum, r.s_k_min, r.s_k, r.s_k_max),
                ChainCheck::new(Chain::Total, r.s_min, r.s_total, r.s_max),
            ],
        })
        .collect();
    let passed = rows.iter().all(|row| row.checks.iter().all(|c| c.holds));
    InequalityAudit { rows, passed }
}

pub fn audit_inequalities(sweep: &SweepResult) -> InequalityAudit {
    audit_reports(&sweep.reports())
}
