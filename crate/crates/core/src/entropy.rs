//! Shannon information entropies of conjugate densities, the rigorous
//! bounds relating them to `T` and `⟨r²⟩`, and Landsberg's order parameter.
//!
//! All entropies are in nats. Lengths are in oscillator units, so `S_r` and
//! `S_k` individually depend on that choice while `S = S_r + S_k` does not.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::momentum::{check_density, DensityPair, MomentumDensity};
use crate::radial::{first_derivative, integrate_radial, RadialFunction, UniformMesh};

/// Samples below this contribute nothing to `−p ln p`.
pub const DENSITY_FLOOR: f64 = 1e-30;
/// Admitted normalization error of a density passed to [`shannon_entropy`].
pub const NORM_TOL: f64 = 1e-6;
/// Amount by which `S` may exceed `S(max)` and still count as saturation.
pub const SATURATION_SLACK: f64 = 1e-6;

/// `(3/2)(1 + ln π)`, the entropy of the unit Gaussian in either space.
pub fn gaussian_entropy() -> f64 {
    1.5 * (1.0 + PI.ln())
}

/// `3(1 + ln π) ≈ 6.434`, the lower bound on `S_r + S_k` in three dimensions.
pub fn eur_lower_bound() -> f64 {
    2.0 * gaussian_entropy()
}

/// A radially symmetric density sampled on a uniform mesh from the origin.
pub trait SphericalDensity {
    fn mesh(&self) -> &UniformMesh;
    fn samples(&self) -> &[f64];
}

impl SphericalDensity for RadialFunction {
    fn mesh(&self) -> &UniformMesh {
        self.grid().mesh()
    }
    fn samples(&self) -> &[f64] {
        self.values()
    }
}

impl SphericalDensity for MomentumDensity {
    fn mesh(&self) -> &UniformMesh {
        self.grid().mesh()
    }
    fn samples(&self) -> &[f64] {
        self.values()
    }
}

/// `−∫ p ln p d³x` for a unit-normalized, non-negative density.
pub fn shannon_entropy<D: SphericalDensity>(density: &D) -> Result<f64> {
    let mesh = density.mesh();
    let p = density.samples();
    check_density(p)?;
    let norm = mesh.integrate_spherical(p);
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized {
            integral: norm,
            tolerance: NORM_TOL,
        });
    }
    let integrand: Vec<f64> = p
        .iter()
        .map(|&v| if v < DENSITY_FLOOR { 0.0 } else { -v * v.ln() })
        .collect();
    Ok(mesh.integrate_spherical(&integrand))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    /// `T = ∫ n(k) k²/2 d³k`
    pub kinetic: f64,
    /// `⟨r²⟩ = ∫ ρ(r) r² d³r`
    pub msr: f64,
    /// Set when the last tenth of either mesh carries more than `1e-6` of a moment.
    pub tail_warning: bool,
}

fn moment_with_tail(mesh: &UniformMesh, integrand: Vec<f64>) -> (f64, bool) {
    let total = mesh.integrate_spherical(&integrand);
    let cut = integrand.len() - integrand.len() / 10;
    let tail: Vec<f64> = integrand
        .iter()
        .enumerate()
        .map(|(i, &v)| if i >= cut { v } else { 0.0 })
        .collect();
    let tail = mesh.integrate_spherical(&tail);
    (total, tail.abs() > 1e-6 * total.abs())
}

pub fn moments(pair: &DensityPair) -> Moments {
    let r_mesh = pair.rho.grid().mesh();
    let r2: Vec<f64> = r_mesh
        .nodes()
        .iter()
        .zip(pair.rho.values())
        .map(|(r, p)| r * r * p)
        .collect();
    let (msr, r_tail) = moment_with_tail(r_mesh, r2);

    let k_mesh = pair.nk.grid().mesh();
    let k2: Vec<f64> = k_mesh
        .nodes()
        .iter()
        .zip(pair.nk.values())
        .map(|(k, n)| 0.5 * k * k * n)
        .collect();
    let (kinetic, k_tail) = moment_with_tail(k_mesh, k2);

    Moments {
        kinetic,
        msr,
        tail_warning: r_tail || k_tail,
    }
}

/// Kinetic energy `½ ∫ |∇ψ|² d³r` from the position-space wavefunction.
pub fn kinetic_from_gradient(psi: &RadialFunction) -> Result<f64> {
    let d = first_derivative(psi)?;
    Ok(0.5 * integrate_radial(&d.map(|_, g| g * g)?)?)
}

/// Lower and upper limits of `S_r`, `S_k` and `S` in terms of `T` and `⟨r²⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EurBounds {
    pub s_r_min: f64,
    pub s_r_max: f64,
    pub s_k_min: f64,
    pub s_k_max: f64,
    pub s_min: f64,
    pub s_max: f64,
}

pub fn eur_bounds(kinetic: f64, msr: f64) -> Result<EurBounds> {
    if !(kinetic > 0.0 && kinetic.is_finite()) || !(msr > 0.0 && msr.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "bounds need positive T and <r^2>, got T = {kinetic}, <r^2> = {msr}"
        )));
    }
    let c = gaussian_entropy();
    let t_term = 1.5 * (4.0 / 3.0 * kinetic).ln();
    let r_term = 1.5 * (2.0 / 3.0 * msr).ln();
    Ok(EurBounds {
        s_r_min: c - t_term,
        s_r_max: c + r_term,
        s_k_min: c - r_term,
        s_k_max: c + t_term,
        s_min: 2.0 * c,
        s_max: 2.0 * c + 1.5 * (8.0 / 9.0 * msr * kinetic).ln(),
    })
}

/// Landsberg's `Ω = 1 − S / S(max)`.
///
/// `S` may exceed `S(max)` by [`SATURATION_SLACK`] (a saturated bound computed
/// numerically); Ω is then 0.
pub fn landsberg_omega(s_total: f64, s_max: f64) -> Result<f64> {
    if !(s_max > 0.0) {
        return Err(Error::InvalidInput(format!("S(max) must be positive, got {s_max}")));
    }
    if s_total > s_max + SATURATION_SLACK {
        return Err(Error::BoundViolation { s_total, s_max });
    }
    if s_total < 0.0 {
        return Err(Error::InvalidInput(format!(
            "entropy sum must be non-negative for an order parameter, got {s_total}"
        )));
    }
    Ok((1.0 - s_total / s_max).max(0.0))
}

/// Every information-theoretic quantity for one system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub n_particles: Option<u64>,
    pub s_r: f64,
    pub s_k: f64,
    pub s_total: f64,
    pub kinetic: f64,
    pub msr: f64,
    pub s_r_min: f64,
    pub s_r_max: f64,
    pub s_k_min: f64,
    pub s_k_max: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub omega: f64,
    pub moment_tail_warning: bool,
}

impl EntropyReport {
    pub fn from_pair(pair: &DensityPair, n_particles: Option<u64>) -> Result<Self> {
        let s_r = shannon_entropy(&pair.rho)?;
        let s_k = shannon_entropy(&pair.nk)?;
        let m = moments(pair);
        let b = eur_bounds(m.kinetic, m.msr)?;
        let s_total = s_r + s_k;
        let omega = landsberg_omega(s_total, b.s_max)?;
        Ok(Self {
            n_particles,
            s_r,
            s_k,
            s_total,
            kinetic: m.kinetic,
            msr: m.msr,
            s_r_min: b.s_r_min,
            s_r_max: b.s_r_max,
            s_k_min: b.s_k_min,
            s_k_max: b.s_k_max,
            s_min: b.s_min,
            s_max: b.s_max,
            omega,
            moment_tail_warning: m.tail_warning,
        })
    }

    pub fn bounds(&self) -> EurBounds {
        EurBounds {
            s_r_min: self.s_r_min,
            s_r_max: self.s_r_max,
            s_k_min: self.s_k_min,
            s_k_max: self.s_k_max,
            s_min: self.s_min,
            s_max: self.s_max,
        }
    }

    /// Disorder `Δ = 1 − Ω`.
    pub fn disorder(&self) -> f64 {
        1.0 - self.omega
    }

    /// The nine values in table order: `S_r(min), S_r, S_r(max), S_k(min),
    /// S_k, S_k(max), S(min), S, S(max)`.
    pub fn table_row(&self) -> [f64; 9] {
        [
            self.s_r_min,
            self.s_r,
            self.s_r_max,
            self.s_k_min,
            self.s_k,
            self.s_k_max,
            self.s_min,
            self.s_total,
            self.s_max,
        ]
    }
}
