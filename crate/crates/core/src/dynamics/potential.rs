//! One-dimensional potential landscapes: V with f = -dV/dx, and the
//! stochastic potential phi(x) = ln(sigma)/2 - (1/sigma) int_0^x f.

use crate::error::{Error, Result};
use crate::model::NetworkModel;
use crate::numeric::quad;
use nalgebra::DVector;
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct Potential1D {
    pub grid: Vec<f64>,
    /// Deterministic potential, anchored to V(grid[0]) = 0.
    pub v: Vec<f64>,
    /// Stochastic potential when a noise intensity was supplied.
    pub phi: Option<Vec<f64>>,
    pub sigma: Option<f64>,
}

impl Potential1D {
    /// Second derivative by central differences on the grid (one-sided at the
    /// ends), for curvature queries at well bottoms and barrier tops.
    pub fn curvature_at(&self, x: f64) -> Result<f64> {
        let n = self.grid.len();
        if n < 3 {
            return Err(Error::Invalid("need at least 3 grid points".into()));
        }
        let mut k = self
            .grid
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - x).abs().partial_cmp(&(b.1 - x).abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        k = k.clamp(1, n - 2);
        let (h1, h2) = (self.grid[k] - self.grid[k - 1], self.grid[k + 1] - self.grid[k]);
        Ok(2.0 * (h1 * self.v[k + 1] - (h1 + h2) * self.v[k] + h2 * self.v[k - 1])
            / (h1 * h2 * (h1 + h2)))
    }

    pub fn value_at(&self, x: f64) -> f64 {
        // linear interpolation on the grid
        match self.grid.iter().position(|&g| g >= x) {
            Some(0) => self.v[0],
            None => *self.v.last().unwrap(),
            Some(i) => {
                let t = (x - self.grid[i - 1]) / (self.grid[i] - self.grid[i - 1]);
                self.v[i - 1] * (1.0 - t) + self.v[i] * t
            }
        }
    }
}

/// Integrate the potential of a scalar-state model on `grid` by adaptive
/// quadrature. `sigma` additionally requests the stochastic potential.
pub fn potential_1d(
    model: &NetworkModel,
    overrides: Option<&BTreeMap<String, f64>>,
    grid: &[f64],
    sigma: Option<f64>,
) -> Result<Potential1D> {
    if model.n_species() != 1 {
        return Err(Error::Invalid("potential requires a scalar-state model".into()));
    }
    if grid.len() < 2 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("grid must be sorted and have >= 2 points".into()));
    }
    if let Some(s) = sigma {
        if s <= 0.0 {
            return Err(Error::Invalid("sigma must be positive".into()));
        }
    }
    let f = |x: f64| {
        model
            .vector_field(&DVector::from_vec(vec![x]), overrides)
            .map(|v| v[0])
            .unwrap_or(f64::NAN)
    };
    let mut v = Vec::with_capacity(grid.len());
    v.push(0.0);
    for w in grid.windows(2) {
        let dv = -quad(&f, w[0], w[1], 1e-12);
        let last = *v.last().unwrap();
        v.push(last + dv);
    }
    let phi = match sigma {
        None => None,
        Some(s) => {
            // phi(x) = ln(s)/2 - (1/s) int_0^x f
            let base = quad(&f, 0.0, grid[0], 1e-12);
            let mut acc = base;
            let mut phi = Vec::with_capacity(grid.len());
            phi.push(0.5 * s.ln() - acc / s);
            for w in grid.windows(2) {
                acc += quad(&f, w[0], w[1], 1e-12);
                phi.push(0.5 * s.ln() - acc / s);
            }
            Some(phi)
        }
    };
    Ok(Potential1D { grid: grid.to_vec(), v, phi, sigma })
}
