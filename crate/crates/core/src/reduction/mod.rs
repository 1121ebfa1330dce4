//! Weighted dimension reduction of homogeneous networks to a scalar
//! effective system: for node dynamics `x_i' = F(x_i) + sum_j A_ij G(x_i, x_j)`
//! the effective state is the degree-weighted mean
//! `x_eff = 1^T A x / 1^T A 1` and the reduced dynamics is
//! `x_eff' = F(x_eff) + beta_eff G(x_eff, x_eff)` with
//! `beta_eff = 1^T A s_in / 1^T A 1`.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Degree-weighted average nearest-neighbour activity.
pub fn effective_state(adjacency: &DMatrix<f64>, x: &DVector<f64>) -> Result<f64> {
    let n = adjacency.nrows();
    if adjacency.ncols() != n || x.len() != n {
        return Err(Error::Dimension("adjacency and state sizes differ".into()));
    }
    if adjacency.iter().any(|&w| w < 0.0) {
        return Err(Error::Invalid("adjacency weights must be nonnegative".into()));
    }
    let total: f64 = adjacency.iter().sum();
    if total <= 0.0 {
        return Err(Error::Invalid("adjacency has no edges".into()));
    }
    // 1^T A x = sum_i sum_j A_ij x_j = sum_j s_in(j) x_j
    let ones = DVector::from_element(n, 1.0);
    let num = (ones.transpose() * adjacency * x)[(0, 0)];
    Ok(num / total)
}

/// Scalar reduction of a network with shared node dynamics F and coupling G.
pub struct ReducedSystem {
    pub beta_eff: f64,
    /// Coefficient of variation of the degree sequence; large values signal
    /// heterogeneity, where the scalar reduction loses validity.
    pub degree_cv: f64,
    pub heterogeneity_warning: bool,
    f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    g: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl ReducedSystem {
    /// Right-hand side of the reduced scalar equation.
    pub fn field(&self, x_eff: f64) -> f64 {
        (self.f)(x_eff) + self.beta_eff * (self.g)(x_eff, x_eff)
    }
}

impl std::fmt::Debug for ReducedSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReducedSystem")
            .field("beta_eff", &self.beta_eff)
            .field("degree_cv", &self.degree_cv)
            .field("heterogeneity_warning", &self.heterogeneity_warning)
            .finish()
    }
}

/// Build the scalar effective system for `x_i' = F(x_i) + sum_j A_ij G(x_i, x_j)`.
///
/// The reduction presumes matching in- and out-degree sequences; a
/// heterogeneity warning (coefficient of variation of the degrees, plus
/// in/out mismatch) is attached rather than silently ignored.
pub fn gao_reduce(
    adjacency: &DMatrix<f64>,
    f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
) -> Result<ReducedSystem> {
    let n = adjacency.nrows();
    if adjacency.ncols() != n {
        return Err(Error::Dimension("adjacency must be square".into()));
    }
    if adjacency.iter().any(|&w| w < 0.0) {
        return Err(Error::Invalid("adjacency weights must be nonnegative".into()));
    }
    let total: f64 = adjacency.iter().sum();
    if total <= 0.0 {
        return Err(Error::Invalid("adjacency has no edges".into()));
    }
    let ones = DVector::from_element(n, 1.0);
    let s_in: DVector<f64> = adjacency.transpose() * &ones; // s_in(j) = sum_i A_ij
    let s_out: DVector<f64> = adjacency * &ones;
    // beta_eff = 1^T A s_in / 1^T A 1 = <s_out s_in> / <s>
    let beta_eff = (ones.transpose() * adjacency * &s_in)[(0, 0)] / total;

    let mean_deg = s_in.sum() / n as f64;
    let var_deg = s_in.iter().map(|d| (d - mean_deg) * (d - mean_deg)).sum::<f64>() / n as f64;
    let degree_cv = var_deg.sqrt() / mean_deg.max(1e-300);
    let inout_mismatch = (&s_in - &s_out).amax() / mean_deg.max(1e-300);
    let heterogeneity_warning = degree_cv > 1e-9 || inout_mismatch > 1e-9;

    Ok(ReducedSystem { beta_eff, degree_cv, heterogeneity_warning, f: Box::new(f), g: Box::new(g) })
}

/// Circulant d-regular adjacency on n nodes (nearest d/2 neighbours on each
/// side), vertex-transitive by construction.
pub fn circulant_regular(n: usize, d: usize) -> Result<DMatrix<f64>> {
    if d % 2 != 0 || d == 0 || d >= n {
        return Err(Error::Invalid("need even 0 < d < n for a circulant graph".into()));
    }
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in 1..=(d / 2) {
            a[(i, (i + k) % n)] = 1.0;
            a[(i, (i + n - k) % n)] = 1.0;
        }
    }
    Ok(a)
}
