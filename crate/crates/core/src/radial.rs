//! Uniform radial meshes and quadrature for spherically symmetric integrands.
//!
//! Every 3D integral in the crate has the form `∫ f(r) 4π r² dr` on a uniform
//! mesh starting at the origin. The same mesh type backs both the position
//! grid and the momentum grid.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Smallest admissible number of mesh points.
pub const MIN_POINTS: usize = 64;

const UNIFORMITY_TOL: f64 = 1e-12;

/// Uniform mesh `x_i = i * spacing`, `i = 0..n_points`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformMesh {
    max: f64,
    spacing: f64,
    nodes: Arc<[f64]>,
}

impl UniformMesh {
    pub fn new(max: f64, n_points: usize) -> Result<Self> {
        if !(max.is_finite() && max > 0.0) {
            return Err(Error::InvalidGrid(format!("extent must be positive, got {max}")));
        }
        if n_points < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_POINTS} points, got {n_points}"
            )));
        }
        let spacing = max / (n_points - 1) as f64;
        let nodes: Arc<[f64]> = (0..n_points)
            .map(|i| if i == n_points - 1 { max } else { i as f64 * spacing })
            .collect();
        Ok(Self { max, spacing, nodes })
    }

    /// Builds a mesh from explicit coordinates, which must start at zero and
    /// be uniformly spaced to within a relative `1e-9`.
    pub fn from_nodes(coords: &[f64]) -> Result<Self> {
        if coords.len() < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_POINTS} points, got {}",
                coords.len()
            )));
        }
        let n = coords.len();
        let max = coords[n - 1];
        let spacing = max / (n - 1) as f64;
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidGrid("coordinates must increase".into()));
        }
        for (i, &x) in coords.iter().enumerate() {
            if (x - i as f64 * spacing).abs() > 1e-9 * spacing {
                return Err(Error::InvalidGrid(format!(
                    "coordinate {x} at index {i} breaks the uniform mesh starting at 0 (spacing {spacing})"
                )));
            }
        }
        Self::new(max, n)
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn n_points(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Checks strict monotonicity and uniform spacing.
    pub fn validate(&self) -> Result<()> {
        for (i, w) in self.nodes.windows(2).enumerate() {
            let d = w[1] - w[0];
            if !(d > 0.0) || (d - self.spacing).abs() > UNIFORMITY_TOL * self.max.max(1.0) {
                return Err(Error::InvalidGrid(format!("non-uniform step {d} at index {i}")));
            }
        }
        Ok(())
    }

    /// Spherical quadrature `∫ f(x) 4π x² dx` of sampled values.
    pub fn integrate_spherical(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n_points());
        let w = simpson_weights(self.n_points(), self.spacing);
        4.0 * PI
            * values
                .iter()
                .zip(self.nodes.iter())
                .zip(w.iter())
                .map(|((f, x), w)| f * x * x * w)
                .sum::<f64>()
    }
}

/// Composite Simpson weights on `n` uniformly spaced points.
///
/// An odd number of intervals is handled by closing the last three with the
/// 3/8 rule, which keeps fourth-order accuracy.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 4, "simpson_weights needs at least 4 points");
    let mut w = vec![0.0; n];
    let intervals = n - 1;
    let simpson_end = if intervals % 2 == 0 { intervals } else { intervals - 3 };
    for i in (0..simpson_end).step_by(2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if simpson_end < intervals {
        let s = simpson_end;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    w
}

/// Uniform position-space mesh in oscillator lengths, `r_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    mesh: UniformMesh,
}

impl RadialGrid {
    pub fn new(r_max: f64, n_points: usize) -> Result<Self> {
        Ok(Self {
            mesh: UniformMesh::new(r_max, n_points)?,
        })
    }

    pub fn from_nodes(coords: &[f64]) -> Result<Self> {
        Ok(Self {
            mesh: UniformMesh::from_nodes(coords)?,
        })
    }

    pub fn r_max(&self) -> f64 {
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

    /// Same number of points on a mesh stretched by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.r_max() * factor, self.n_points())
    }
}

/// Real samples `f(r_i)` on a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl RadialFunction {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::InvalidInput(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.n_points()
            )));
        }
        check_finite(&values)?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: &RadialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid.clone(), values)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = self
            .grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&r, &v)| f(r, v))
            .collect();
        Self::new(self.grid.clone(), values)
    }
}

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

/// `∫₀^{r_max} f(r) 4π r² dr` by composite Simpson quadrature.
pub fn integrate_radial(f: &RadialFunction) -> Result<f64> {
    check_finite(&f.values)?;
    Ok(f.grid.mesh.integrate_spherical(&f.values))
}

/// Second derivative by centered differences, second-order one-sided
/// stencils at both ends.
pub fn second_derivative(f: &RadialFunction) -> Result<RadialFunction> {
    let n = f.values.len();
    if n < 5 {
        return Err(Error::InvalidGrid(format!(
            "second derivative needs at least 5 points, got {n}"
        )));
    }
    let h2 = f.grid.spacing().powi(2);
    let v = &f.values;
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        out[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
    }
    out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
    out[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / h2;
    RadialFunction::new(f.grid.clone(), out)
}

/// First derivative, centered in the interior and second-order one-sided at
/// the ends.
pub fn first_derivative(f: &RadialFunction) -> Result<RadialFunction> {
    let n = f.values.len();
    let h = f.grid.spacing();
    let v = &f.values;
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        out[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    out[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    RadialFunction::new(f.grid.clone(), out)
}
