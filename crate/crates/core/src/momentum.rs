//! Momentum distribution of a spherically symmetric wavefunction.
//!
//! The transform is the sine-kernel (l = 0 Hankel) integral
//!
//! ```text
//! φ(k) = √(2/π) (1/k) ∫₀^∞ ψ(r) sin(kr) r dr
//! ```
//!
//! evaluated by direct quadrature on the radial mesh. The quadrature is the
//! trapezoid rule: `r ψ(r) sin(kr)` is even in r and vanishes at `r_max`, so
//! the trapezoid sum is spectrally accurate for all k up to the Nyquist
//! frequency. Simpson's alternating weights would alias k onto `π/h − k`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::radial::{check_finite, integrate_radial, RadialFunction, RadialGrid, UniformMesh};

/// Largest tolerated deviation of `∫n(k) d³k` from one before renormalization.
pub const MAX_LEAKAGE: f64 = 1e-3;
/// Default ratio of momentum-mesh to radial-mesh intervals.
pub const DEFAULT_OVERSAMPLING: usize = 4;

/// Uniform momentum mesh starting at `k = 0`, in inverse oscillator lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    mesh: UniformMesh,
}

impl MomentumGrid {
    pub fn new(k_max: f64, n_points: usize) -> Result<Self> {
        Ok(Self {
            mesh: UniformMesh::new(k_max, n_points)?,
        })
    }

    pub fn from_nodes(coords: &[f64]) -> Result<Self> {
        Ok(Self {
            mesh: UniformMesh::from_nodes(coords)?,
        })
    }

    /// Nyquist-consistent mesh: `k_max = π / Δr` with `oversampling` times as
    /// many intervals as the radial grid.
    pub fn for_radial(grid: &RadialGrid, oversampling: usize) -> Result<Self> {
        let k_max = PI / grid.spacing();
        Self::new(k_max, oversampling.max(1) * (grid.n_points() - 1) + 1)
    }

    pub fn k_max(&self) -> f64 {
        self.mesh.max()
    }

    pub fn spacing(&self) -> f64 {
        self.mesh.spacing()
    }

    pub fn n_points(&self) -> usize {
        self.mesh.n_points()
    }

    pub fn nodes(&self) -> &[f64] {
        self.mesh.nodes()
    }

    pub fn mesh(&self) -> &UniformMesh {
        &self.mesh
    }
}

/// Radial samples of a momentum-space density on a [`MomentumGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumDensity {
    grid: MomentumGrid,
    values: Vec<f64>,
}

impl MomentumDensity {
    pub fn new(grid: MomentumGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::InvalidInput(format!(
                "{} samples for a momentum grid of {} points",
                values.len(),
                grid.n_points()
            )));
        }
        check_finite(&values)?;
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `∫ f(k) 4π k² dk`
    pub fn integrate(&self) -> f64 {
        self.grid.mesh.integrate_spherical(&self.values)
    }
}

/// Matched, unit-normalized position and momentum densities.
#[derive(Debug, Clone)]
pub struct DensityPair {
    pub rho: RadialFunction,
    pub nk: MomentumDensity,
    /// `|∫n(k) d³k − 1|` before renormalization.
    pub momentum_leakage: f64,
}

const PAIR_NORM_TOL: f64 = 1e-6;

impl DensityPair {
    /// Pairs two densities after checking sign and normalization.
    pub fn new(rho: RadialFunction, nk: MomentumDensity) -> Result<Self> {
        check_density(rho.values())?;
        check_density(nk.values())?;
        for integral in [integrate_radial(&rho)?, nk.integrate()] {
            if (integral - 1.0).abs() > PAIR_NORM_TOL {
                return Err(Error::NotNormalized {
                    integral,
                    tolerance: PAIR_NORM_TOL,
                });
            }
        }
        Ok(Self {
            rho,
            nk,
            momentum_leakage: 0.0,
        })
    }
}

pub(crate) fn check_density(values: &[f64]) -> Result<()> {
    match values.iter().position(|&v| v < -1e-12) {
        Some(index) => Err(Error::NegativeDensity {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

/// Momentum amplitude `φ(k)` of a radial wavefunction.
pub fn momentum_amplitude(psi: &RadialFunction, kgrid: &MomentumGrid) -> Vec<f64> {
    let r = psi.grid().nodes();
    let h = psi.grid().spacing();
    let n = r.len();
    // trapezoid weights times r ψ(r)
    let weighted: Vec<f64> = r
        .iter()
        .zip(psi.values())
        .enumerate()
        .map(|(i, (&ri, &p))| {
            let w = if i == 0 || i == n - 1 { 0.5 * h } else { h };
            w * ri * p
        })
        .collect();
    let prefactor = (2.0 / PI).sqrt();
    kgrid
        .nodes()
        .par_iter()
        .map(|&k| {
            let s: f64 = if k == 0.0 {
                weighted.iter().zip(r).map(|(w, ri)| w * ri).sum()
            } else {
                weighted.iter().zip(r).map(|(w, ri)| w * (k * ri).sin()).sum::<f64>() / k
            };
            prefactor * s
        })
        .collect()
}

/// Transforms a normalized wavefunction into the pair `(|ψ|², |φ|²)`.
pub fn to_momentum(psi: &RadialFunction, kgrid: &MomentumGrid) -> Result<DensityPair> {
    let rho = psi.map(|_, p| p * p)?;
    let norm = integrate_radial(&rho)?;
    if (norm - 1.0).abs() > PAIR_NORM_TOL {
        return Err(Error::NotNormalized {
            integral: norm,
            tolerance: PAIR_NORM_TOL,
        });
    }
    let rho = rho.map(|_, p| p / norm)?;

    let phi = momentum_amplitude(psi, kgrid);
    let nk = MomentumDensity::new(kgrid.clone(), phi.iter().map(|p| p * p).collect())?;
    let total = nk.integrate();
    let leakage = (total - 1.0).abs();
    if leakage > MAX_LEAKAGE {
        return Err(Error::MomentumLeakage {
            defect: leakage,
            limit: MAX_LEAKAGE,
        });
    }
    let nk = MomentumDensity::new(kgrid.clone(), nk.values.iter().map(|v| v / total).collect())?;
    Ok(DensityPair {
        rho,
        nk,
        momentum_leakage: leakage,
    })
}
