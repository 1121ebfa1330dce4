//! Multistart equilibrium finding and the degree-theory index check.

use crate::error::{Error, Result};
use crate::model::NetworkModel;
use crate::numeric::{newton, Halton};
use nalgebra::{Complex, DVector};
use std::collections::BTreeMap;

/// Real-part band inside which an eigenvalue counts as marginal.
const MARGIN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone)]
pub struct Equilibrium {
    pub x: DVector<f64>,
    pub eigenvalues: Vec<Complex<f64>>,
    pub stability: Stability,
    /// Sign of det(-J) at the equilibrium: +1, -1, or 0 when degenerate.
    pub det_sign: i8,
    /// Jacobian (numerically) singular at the root.
    pub degenerate: bool,
    /// Max-norm residual of the vector field after polish.
    pub residual: f64,
}

/// Find and classify the equilibria of `model` inside `bounds` with damped
/// Newton iterations from `n_starts` quasi-random starting points.
///
/// Roots are polished to max-norm residual below `tol`, deduplicated at
/// relative radius 1e-6 of the box diameter, and classified through the
/// Jacobian eigenvalues (marginal band 1e-8). Degenerate roots are kept and
/// marked.
pub fn find_equilibria(
    model: &NetworkModel,
    overrides: Option<&BTreeMap<String, f64>>,
    bounds: &[(f64, f64)],
    n_starts: usize,
    tol: f64,
) -> Result<Vec<Equilibrium>> {
    let n = model.n_species();
    if bounds.len() != n {
        return Err(Error::Dimension(format!("expected {n} bounds, got {}", bounds.len())));
    }
    if bounds.iter().any(|&(lo, hi)| !(lo < hi) && !(lo == hi)) || n_starts == 0 {
        return Err(Error::Invalid("empty search box or zero starts".into()));
    }
    let diameter = bounds
        .iter()
        .map(|&(lo, hi)| hi - lo)
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let dedup_radius = 1e-6 * diameter;

    let mut halton = Halton::new(n);
    let mut roots: Vec<DVector<f64>> = Vec::new();
    for _ in 0..n_starts {
        let u = halton.next_point();
        let x0 = DVector::from_fn(n, |i, _| bounds[i].0 + u[i] * (bounds[i].1 - bounds[i].0));
        let sol = newton(
            &x0,
            |x| model.vector_field(x, overrides),
            |x| model.jacobian(x, overrides),
            tol.min(1e-12),
            120,
        );
        let Ok(x) = sol else { continue };
        // keep roots inside the box (tiny margin for polish drift)
        let margin = 1e-7 * diameter;
        let inside = (0..n).all(|i| x[i] >= bounds[i].0 - margin && x[i] <= bounds[i].1 + margin);
        if !inside {
            continue;
        }
        if roots.iter().all(|r| (r - &x).amax() > dedup_radius) {
            roots.push(x);
        }
    }
    let mut out = Vec::with_capacity(roots.len());
    for x in roots {
        let residual = model.vector_field(&x, overrides)?.amax();
        if residual >= tol {
            continue;
        }
        out.push(classify(model, overrides, x, residual)?);
    }
    out.sort_by(|a, b| a.x.as_slice().partial_cmp(b.x.as_slice()).unwrap());
    Ok(out)
}

fn classify(
    model: &NetworkModel,
    overrides: Option<&BTreeMap<String, f64>>,
    x: DVector<f64>,
    residual: f64,
) -> Result<Equilibrium> {
    let jac = model.jacobian(&x, overrides)?;
    let n = jac.nrows();
    let eigenvalues: Vec<Complex<f64>> = jac.complex_eigenvalues().iter().copied().collect();
    let max_re = eigenvalues.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
    let stability = if max_re < -MARGIN_TOL {
        Stability::Stable
    } else if max_re > MARGIN_TOL {
        Stability::Unstable
    } else {
        Stability::Marginal
    };
    let det = (-jac).determinant();
    let scale: f64 = eigenvalues
        .iter()
        .map(|e| e.norm())
        .fold(1.0f64, f64::max)
        .powi(n as i32);
    let degenerate = det.abs() < 1e-10 * scale.max(1.0);
    let det_sign = if degenerate {
        0
    } else if det > 0.0 {
        1
    } else {
        -1
    };
    Ok(Equilibrium { x, eigenvalues, stability, det_sign, degenerate, residual })
}

/// Degree-theory index: the signs of det(-J) over all non-degenerate
/// equilibria in a positively invariant region must sum to one; a different
/// sum signals an incomplete equilibrium set.
pub fn degree_index(equilibria: &[Equilibrium]) -> Result<(i64, bool)> {
    for (k, e) in equilibria.iter().enumerate() {
        if e.degenerate {
            return Err(Error::Refused(format!(
                "equilibrium #{k} at {:?} is degenerate; the index is undefined",
                e.x.as_slice()
            )));
        }
    }
    let sum: i64 = equilibria.iter().map(|e| e.det_sign as i64).sum();
    Ok((sum, sum == 1))
}
