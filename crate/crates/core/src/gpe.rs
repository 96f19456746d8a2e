//! Ground state of the stationary Gross–Pitaevskii equation in an isotropic
//! harmonic trap.
//!
//! Oscillator units throughout (`ħ = m = ω = 1`, lengths in units of the trap
//! length `b`). With `∫|ψ|² d³r = 1` the equation reads
//!
//! ```text
//! [-½∇² + ½r² + g|ψ|²] ψ = μ ψ,     g = 4π N a / b
//! ```
//!
//! and is solved for `u(r) = r ψ(r)` with `u(0) = u(r_max) = 0` by normalized
//! imaginary-time propagation. Each step is backward Euler in the linear part
//! with the mean-field potential frozen at the previous iterate, so every step
//! is a single tridiagonal solve.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::radial::{RadialFunction, RadialGrid};

/// Scattering length of ⁸⁷Rb used for the reference system, in Å.
pub const DEFAULT_SCATTERING_LENGTH: f64 = 52.9;
/// Oscillator length of the reference trap, in Å.
pub const DEFAULT_TRAP_LENGTH: f64 = 12180.0;
/// Default number of radial mesh points.
pub const DEFAULT_GRID_POINTS: usize = 2001;
/// Default relative tolerance on successive chemical potentials.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Couplings below this start from a Gaussian, above it from a Thomas–Fermi profile.
const TF_GUESS_THRESHOLD: f64 = 10.0;
/// Wavefunction magnitude allowed next to the outer wall.
const BOUNDARY_THRESHOLD: f64 = 1e-10;

/// Particle number and interaction parameters of one trapped gas.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrapSpec {
    n_particles: u64,
    scattering_length: f64,
    trap_length: f64,
    coupling: f64,
}

impl TrapSpec {
    /// `scattering_length` and `trap_length` in Å.
    pub fn new(n_particles: u64, scattering_length: f64, trap_length: f64) -> Result<Self> {
        if n_particles < 1 {
            return Err(Error::InvalidInput("particle number must be at least 1".into()));
        }
        if !(scattering_length.is_finite() && scattering_length >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "scattering length must be finite and non-negative, got {scattering_length}"
            )));
        }
        if !(trap_length.is_finite() && trap_length > 0.0) {
            return Err(Error::InvalidInput(format!(
                "trap length must be positive, got {trap_length}"
            )));
        }
        Ok(Self {
            n_particles,
            scattering_length,
            trap_length,
            coupling: Self::coupling_for(n_particles, scattering_length, trap_length),
        })
    }

    /// The reference ⁸⁷Rb trap (a = 52.9 Å, b = 12180 Å).
    pub fn rubidium(n_particles: u64) -> Result<Self> {
        Self::new(n_particles, DEFAULT_SCATTERING_LENGTH, DEFAULT_TRAP_LENGTH)
    }

    /// Non-interacting gas in the reference trap.
    pub fn ideal(n_particles: u64) -> Result<Self> {
        Self::new(n_particles, 0.0, DEFAULT_TRAP_LENGTH)
    }

    pub fn with_particles(&self, n_particles: u64) -> Result<Self> {
        Self::new(n_particles, self.scattering_length, self.trap_length)
    }

    fn coupling_for(n: u64, a: f64, b: f64) -> f64 {
        4.0 * PI * n as f64 * (a / b)
    }

    pub fn n_particles(&self) -> u64 {
        self.n_particles
    }

    pub fn scattering_length(&self) -> f64 {
        self.scattering_length
    }

    pub fn trap_length(&self) -> f64 {
        self.trap_length
    }

    /// Dimensionless `g = 4π N a / b`.
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// `N a / b`
    pub fn reduced_interaction(&self) -> f64 {
        self.n_particles as f64 * self.scattering_length / self.trap_length
    }

    /// Default mesh: `r_max = 3 √(2 μ_TF)` with a floor of 10 oscillator lengths.
    pub fn default_grid(&self, n_points: usize) -> Result<RadialGrid> {
        let r_max = match thomas_fermi_mu(self) {
            Ok(mu) => (3.0 * (2.0 * mu).sqrt()).max(10.0),
            Err(_) => 10.0,
        };
        RadialGrid::new(r_max, n_points)
    }
}

/// Chemical potential in the Thomas–Fermi limit, `½ (15 N a / b)^{2/5}` in ħω.
pub fn thomas_fermi_mu(spec: &TrapSpec) -> Result<f64> {
    if spec.coupling() <= 0.0 {
        return Err(Error::InvalidInput(
            "Thomas-Fermi limit undefined without interactions".into(),
        ));
    }
    Ok(0.5 * (15.0 * spec.reduced_interaction()).powf(0.4))
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Relative change of μ between iterations that counts as converged.
    pub tol: f64,
    /// L² norm of `Hψ − μψ` required at convergence.
    pub residual_tol: f64,
    pub max_iterations: usize,
    pub initial_step: f64,
    pub max_step: f64,
    /// Record the energy every this many accepted steps.
    pub energy_sample_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            residual_tol: 1e-6,
            max_iterations: 200_000,
            initial_step: 0.05,
            max_step: 2.0,
            energy_sample_every: 10,
        }
    }
}

/// Converged condensate. Energies are per particle in units of ħω.
#[derive(Debug, Clone)]
pub struct CondensateState {
    pub psi: RadialFunction,
    pub chemical_potential: f64,
    pub kinetic_energy: f64,
    pub trap_energy: f64,
    pub interaction_energy: f64,
    pub iterations: usize,
    /// Final `‖Hψ − μψ‖`.
    pub residual: f64,
    /// Energy functional sampled along the accepted imaginary-time steps.
    pub energy_trace: Vec<f64>,
    /// Peak gas parameter `n(0) a³`, reported but not enforced.
    pub diluteness: f64,
}

impl CondensateState {
    pub fn total_energy(&self) -> f64 {
        self.kinetic_energy + self.trap_energy + self.interaction_energy
    }

    /// `2T − 2V + 3E_int`, zero for an exact stationary state.
    pub fn virial_residual(&self) -> f64 {
        2.0 * self.kinetic_energy - 2.0 * self.trap_energy + 3.0 * self.interaction_energy
    }

    /// `μ − (T + V + 2E_int)`
    pub fn mu_identity_residual(&self) -> f64 {
        self.chemical_potential
            - (self.kinetic_energy + self.trap_energy + 2.0 * self.interaction_energy)
    }

    /// Trap energy equals `½⟨r²⟩`.
    pub fn mean_square_radius(&self) -> f64 {
        2.0 * self.trap_energy
    }
}

pub fn solve_ground_state(spec: &TrapSpec, grid: &RadialGrid, tol: f64) -> Result<CondensateState> {
    let options = SolverOptions {
        tol,
        ..SolverOptions::default()
    };
    solve_ground_state_with(spec, grid, &options)
}

pub fn solve_ground_state_with(
    spec: &TrapSpec,
    grid: &RadialGrid,
    options: &SolverOptions,
) -> Result<CondensateState> {
    if !(options.tol > 0.0 && options.tol.is_finite()) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", options.tol)));
    }
    let problem = RadialProblem::new(grid, spec.coupling());
    let mut u = problem.initial_guess(spec);
    problem.normalize(&mut u);

    let mut dt = options.initial_step;
    let mut energy = problem.energy(&u);
    let mut mu_prev = f64::NAN;
    let mut trace = vec![energy.total()];
    let mut accepted = 0usize;
    let mut residual = f64::INFINITY;
    let mut scratch = Tridiagonal::new(u.len());

    for iteration in 0..options.max_iterations {
        let (mu, res) = problem.mu_and_residual(&u);
        residual = res;
        let mu_change = (mu - mu_prev).abs() / mu.abs();
        if mu_change < options.tol && residual < options.residual_tol {
            return problem.finish(spec, u, mu, iteration, residual, trace);
        }
        mu_prev = mu;

        loop {
            let mut next = problem.step(&u, dt, &mut scratch);
            problem.normalize(&mut next);
            let next_energy = problem.energy(&next);
            if next_energy.total() <= energy.total() + 1e-13 * energy.total().abs() {
                u = next;
                energy = next_energy;
                dt = (dt * 1.2).min(options.max_step);
                break;
            }
            dt *= 0.5;
            if dt < 1e-12 {
                return Err(Error::NonConvergence {
                    iterations: iteration,
                    residual,
                });
            }
        }
        accepted += 1;
        if accepted % options.energy_sample_every.max(1) == 0 {
            trace.push(energy.total());
        }
    }
    Err(Error::NonConvergence {
        iterations: options.max_iterations,
        residual,
    })
}

#[derive(Debug, Clone, Copy)]
struct Energies {
    kinetic: f64,
    trap: f64,
    interaction: f64,
}

impl Energies {
    fn total(&self) -> f64 {
        self.kinetic + self.trap + self.interaction
    }
}

/// Discretized radial problem on the interior nodes `r_1 .. r_{n-2}`.
struct RadialProblem<'a> {
    grid: &'a RadialGrid,
    radii: Vec<f64>,
    h: f64,
    coupling: f64,
}

impl<'a> RadialProblem<'a> {
    fn new(grid: &'a RadialGrid, coupling: f64) -> Self {
        let nodes = grid.nodes();
        Self {
            grid,
            radii: nodes[1..nodes.len() - 1].to_vec(),
            h: grid.spacing(),
            coupling,
        }
    }

    /// `4π h`, the measure of the discrete inner product on u.
    fn measure(&self) -> f64 {
        4.0 * PI * self.h
    }

    fn initial_guess(&self, spec: &TrapSpec) -> Vec<f64> {
        if self.coupling < TF_GUESS_THRESHOLD {
            return self.radii.iter().map(|&r| r * (-0.5 * r * r).exp()).collect();
        }
        // inverted parabola plus a small Gaussian so the edge stays smooth
        let mu = thomas_fermi_mu(spec).expect("coupling is positive");
        self.radii
            .iter()
            .map(|&r| {
                let tf = (mu - 0.5 * r * r).max(0.0) / self.coupling;
                r * (tf + 1e-4 * (-0.5 * r * r).exp() / PI.powf(1.5)).sqrt()
            })
            .collect()
    }

    fn normalize(&self, u: &mut [f64]) {
        let norm = (self.measure() * u.iter().map(|x| x * x).sum::<f64>()).sqrt();
        u.iter_mut().for_each(|x| *x /= norm);
    }

    fn potential(&self, u: &[f64]) -> Vec<f64> {
        self.radii
            .iter()
            .zip(u)
            .map(|(&r, &x)| 0.5 * r * r + self.coupling * (x / r).powi(2))
            .collect()
    }

    /// `−½ u''` with Dirichlet walls.
    fn kinetic_apply(&self, u: &[f64]) -> Vec<f64> {
        let m = u.len();
        let c = 0.5 / (self.h * self.h);
        (0..m)
            .map(|i| {
                let left = if i > 0 { u[i - 1] } else { 0.0 };
                let right = if i + 1 < m { u[i + 1] } else { 0.0 };
                c * (2.0 * u[i] - left - right)
            })
            .collect()
    }

    fn energy(&self, u: &[f64]) -> Energies {
        let w = self.measure();
        let tu = self.kinetic_apply(u);
        let kinetic = w * u.iter().zip(&tu).map(|(a, b)| a * b).sum::<f64>();
        let trap = w * self.radii.iter().zip(u).map(|(r, x)| 0.5 * r * r * x * x).sum::<f64>();
        let interaction = w
            * 0.5
            * self.coupling
            * self.radii.iter().zip(u).map(|(r, x)| x.powi(4) / (r * r)).sum::<f64>();
        Energies {
            kinetic,
            trap,
            interaction,
        }
    }

    fn mu_and_residual(&self, u: &[f64]) -> (f64, f64) {
        let w = self.measure();
        let v = self.potential(u);
        let hu: Vec<f64> = self
            .kinetic_apply(u)
            .into_iter()
            .zip(v.iter().zip(u))
            .map(|(t, (v, x))| t + v * x)
            .collect();
        let mu = w * u.iter().zip(&hu).map(|(a, b)| a * b).sum::<f64>();
        let res = (w * hu.iter().zip(u).map(|(a, x)| (a - mu * x).powi(2)).sum::<f64>()).sqrt();
        (mu, res)
    }

    /// Solves `(1 + dt H[u]) u' = u`.
    fn step(&self, u: &[f64], dt: f64, tri: &mut Tridiagonal) -> Vec<f64> {
        let c = 0.5 / (self.h * self.h);
        let v = self.potential(u);
        for (i, vi) in v.iter().enumerate() {
            tri.diag[i] = 1.0 + dt * (2.0 * c + vi);
            tri.off[i] = -dt * c;
        }
        tri.solve(u)
    }

    fn finish(
        &self,
        spec: &TrapSpec,
        mut u: Vec<f64>,
        mu: f64,
        iterations: usize,
        residual: f64,
        energy_trace: Vec<f64>,
    ) -> Result<CondensateState> {
        if u.iter().sum::<f64>() < 0.0 {
            u.iter_mut().for_each(|x| *x = -*x);
        }
        let edge = u.last().copied().unwrap_or(0.0) / self.radii.last().copied().unwrap_or(1.0);
        if edge.abs() > BOUNDARY_THRESHOLD {
            return Err(Error::BoundaryClipping {
                value: edge,
                r_max: self.grid.r_max(),
            });
        }
        let energies = self.energy(&u);

        let n = self.grid.n_points();
        let mut psi = vec![0.0; n];
        for (i, (&x, &r)) in u.iter().zip(&self.radii).enumerate() {
            psi[i + 1] = (x / r).max(0.0);
        }
        // ψ is even in r: ψ(h), ψ(2h) fix ψ(0) to O(h⁴)
        psi[0] = ((4.0 * psi[1] - psi[2]) / 3.0).max(0.0);
        let psi = RadialFunction::new(self.grid.clone(), psi)?;
        let norm = crate::radial::integrate_radial(&psi.map(|_, p| p * p)?)?;
        let psi = psi.map(|_, p| p / norm.sqrt())?;

        let psi0 = psi.values()[0];
        let a_over_b = spec.scattering_length() / spec.trap_length();
        Ok(CondensateState {
            diluteness: spec.n_particles() as f64 * psi0 * psi0 * a_over_b.powi(3),
            psi,
            chemical_potential: mu,
            kinetic_energy: energies.kinetic,
            trap_energy: energies.trap,
            interaction_energy: energies.interaction,
            iterations,
            residual,
            energy_trace,
        })
    }
}

/// Symmetric tridiagonal system with constant-size scratch space.
struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
    c_prime: Vec<f64>,
}

impl Tridiagonal {
    fn new(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            off: vec![0.0; n],
            c_prime: vec![0.0; n],
        }
    }

    /// Thomas algorithm; the matrix is diagonally dominant so no pivoting.
    fn solve(&mut self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut x = vec![0.0; n];
        self.c_prime[0] = self.off[0] / self.diag[0];
        x[0] = rhs[0] / self.diag[0];
        for i in 1..n {
            let denom = self.diag[i] - self.off[i] * self.c_prime[i - 1];
            self.c_prime[i] = self.off[i] / denom;
            x[i] = (rhs[i] - self.off[i] * x[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.c_prime[i] * x[i + 1];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::integrate_radial;
    use approx::assert_abs_diff_eq;

    #[test]
    fn coupling_matches_definition() {
        let s = TrapSpec::rubidium(10_000).unwrap();
        let g = 4.0 * PI * 10_000.0 * 52.9 / 12180.0;
        assert!((s.coupling() - g).abs() <= 1e-12 * g);
        assert_eq!(TrapSpec::ideal(5).unwrap().coupling(), 0.0);
    }

    #[test]
    fn invalid_trap_specs_rejected() {
        assert!(TrapSpec::new(0, 52.9, 12180.0).is_err());
        assert!(TrapSpec::new(10, -1.0, 12180.0).is_err());
        assert!(TrapSpec::new(10, 52.9, 0.0).is_err());
    }

    #[test]
    fn thomas_fermi_unit_argument() {
        // N a / b = 1/15
        let s = TrapSpec::new(1, 1.0, 15.0).unwrap();
        assert_abs_diff_eq!(thomas_fermi_mu(&s).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn thomas_fermi_reference_values() {
        let a_b: f64 = 52.9 / 12180.0;
        let big = TrapSpec::rubidium(1_000_000).unwrap();
        let expect = 0.5 * (15.0 * 1e6 * a_b).powf(0.4);
        assert_abs_diff_eq!(thomas_fermi_mu(&big).unwrap(), expect, epsilon = 1e-12);
        assert!((1e6 * a_b - 4343.2).abs() < 0.1);
        let small = TrapSpec::rubidium(500).unwrap();
        let expect = 0.5 * (15.0 * 500.0 * a_b).powf(0.4);
        assert_abs_diff_eq!(thomas_fermi_mu(&small).unwrap(), expect, epsilon = 1e-12);
        assert!((500.0 * a_b - 2.1716).abs() < 1e-4);
    }

    #[test]
    fn thomas_fermi_rejects_ideal_gas() {
        assert!(thomas_fermi_mu(&TrapSpec::ideal(100).unwrap()).is_err());
    }

    #[test]
    fn ideal_gas_is_oscillator_ground_state() {
        let spec = TrapSpec::ideal(1).unwrap();
        let grid = spec.default_grid(2001).unwrap();
        let state = solve_ground_state(&spec, &grid, 1e-10).unwrap();
        assert_abs_diff_eq!(state.chemical_potential, 1.5, epsilon = 1e-4);
        assert_abs_diff_eq!(state.kinetic_energy, 0.75, epsilon = 1e-4);
        assert_abs_diff_eq!(state.mean_square_radius(), 1.5, epsilon = 1e-4);
        let max_dev = grid
            .nodes()
            .iter()
            .zip(state.psi.values())
            .map(|(r, p)| (p - PI.powf(-0.75) * (-0.5 * r * r).exp()).abs())
            .fold(0.0, f64::max);
        assert!(max_dev < 1e-5, "max deviation {max_dev}");
    }

    #[test]
    fn norm_and_sign() {
        let spec = TrapSpec::rubidium(3000).unwrap();
        let grid = spec.default_grid(1001).unwrap();
        let state = solve_ground_state(&spec, &grid, 1e-9).unwrap();
        let norm = integrate_radial(&state.psi.map(|_, p| p * p).unwrap()).unwrap();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-8);
        assert!(state.psi.values().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn energy_trace_is_non_increasing() {
        let spec = TrapSpec::rubidium(50_000).unwrap();
        let grid = spec.default_grid(1001).unwrap();
        let state = solve_ground_state(&spec, &grid, 1e-9).unwrap();
        assert!(state.energy_trace.len() > 2);
        for w in state.energy_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * w[0].abs(), "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn chemical_potential_near_thomas_fermi_at_large_n() {
        let spec = TrapSpec::rubidium(50_000).unwrap();
        let grid = spec.default_grid(2001).unwrap();
        let state = solve_ground_state(&spec, &grid, 1e-9).unwrap();
        let mu_tf = thomas_fermi_mu(&spec).unwrap();
        assert!((state.chemical_potential - mu_tf).abs() < 0.05 * mu_tf);
        assert!(state.virial_residual().abs() < 1e-4);
        assert!(state.mu_identity_residual().abs() < 1e-4);
    }

    #[test]
    fn small_box_is_reported() {
        let spec = TrapSpec::ideal(1).unwrap();
        let grid = RadialGrid::new(3.0, 301).unwrap();
        match solve_ground_state(&spec, &grid, 1e-9) {
            Err(Error::BoundaryClipping { .. }) => {}
            other => panic!("expected BoundaryClipping, got {other:?}"),
        }
    }

    #[test]
    fn iteration_budget_exhaustion() {
        let spec = TrapSpec::rubidium(10_000).unwrap();
        let grid = spec.default_grid(501).unwrap();
        let options = SolverOptions {
            max_iterations: 3,
            ..SolverOptions::default()
        };
        match solve_ground_state_with(&spec, &grid, &options) {
            Err(Error::NonConvergence { iterations, residual }) => {
                assert_eq!(iterations, 3);
                assert!(residual.is_finite());
            }
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_tolerance() {
        let spec = TrapSpec::ideal(1).unwrap();
        let grid = spec.default_grid(201).unwrap();
        assert!(solve_ground_state(&spec, &grid, 0.0).is_err());
    }

    #[test]
    fn tridiagonal_solver() {
        let mut t = Tridiagonal::new(3);
        t.diag.copy_from_slice(&[4.0, 4.0, 4.0]);
        t.off.copy_from_slice(&[1.0, 1.0, 1.0]);
        // A x = b with x = (1, 2, 3)
        let b = [4.0 + 2.0, 1.0 + 8.0 + 3.0, 2.0 + 12.0];
        let x = t.solve(&b);
        for (xi, e) in x.iter().zip([1.0, 2.0, 3.0]) {
            assert_abs_diff_eq!(*xi, e, epsilon = 1e-12);
        }
    }
}
