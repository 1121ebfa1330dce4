//! Semi-discretized Levin-Segel system and its Turing-pattern attractor.
//!
//! The deterministic pattern is computed by semi-implicit integration of the
//! semi-discretized system (linear diffusion part implicit, kinetics
//! explicit) followed by a Newton polish of the steady state.

use super::equilibria::{Equilibrium, Stability};
use crate::error::{Error, Result};
use crate::model::NetworkModel;
use crate::numeric::newton;
use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Pattern-formation inequality report: patterns require
/// `D_u/D_v < (sqrt(b/d) - sqrt(b/d - e/c))^2` and `b c > e d`.
#[derive(Debug, Clone, Copy)]
pub struct PatternCondition {
    pub holds: bool,
    pub diffusion_ratio: f64,
    pub diffusion_threshold: f64,
    pub bc: f64,
    pub ed: f64,
    /// Spatially homogeneous equilibrium (u, v) = (ad/(bc-de), ac/(bc-de)).
    pub homogeneous: (f64, f64),
}

/// Assemble the 2N-dimensional semi-discretization on a uniform grid with
/// zero-flux boundaries; the boundary rows carry the doubled neighbour
/// coupling. The pattern condition is checked and reported, and the model is
/// built either way.
#[allow(clippy::too_many_arguments)]
pub fn levin_segel_semidiscretize(
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    e: f64,
    du: f64,
    dv: f64,
    n_grid: usize,
    length: f64,
) -> Result<(NetworkModel, PatternCondition)> {
    let model = crate::model::levin_segel_model(a, b, c, d, e, du, dv, n_grid, length)?;
    let bc = b * c;
    let ed = e * d;
    let ratio = if dv > 0.0 { du / dv } else { f64::INFINITY };
    let threshold = if b > 0.0 && d > 0.0 && b / d >= e / c {
        let s = (b / d).sqrt() - (b / d - e / c).sqrt();
        s * s
    } else {
        f64::NAN
    };
    let denom = bc - d * e;
    let homogeneous = if denom > 0.0 { (a * d / denom, a * c / denom) } else { (f64::NAN, f64::NAN) };
    let holds = ratio < threshold && bc > ed;
    Ok((model, PatternCondition { holds, diffusion_ratio: ratio, diffusion_threshold: threshold, bc, ed, homogeneous }))
}

/// Deterministic seed state: homogeneous equilibrium plus a small smooth
/// perturbation (seeded, reproducible) spanning the admissible zero-flux
/// cosine modes cos(m pi x / L), m = 1..12, so that the unstable Turing band
/// is always excited.
pub fn pattern_seed(condition: &PatternCondition, n_grid: usize, amplitude: f64, seed: u64) -> DVector<f64> {
    let (u0, v0) = condition.homogeneous;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..12).map(|_| rng.random::<f64>() - 0.5).collect();
    let mut x = DVector::zeros(2 * n_grid);
    for j in 0..n_grid {
        let s = j as f64 / (n_grid - 1) as f64;
        let mut bump = 0.0;
        for (mi, w) in weights.iter().enumerate() {
            bump += w * (std::f64::consts::PI * (mi as f64 + 1.0) * s).cos();
        }
        x[2 * j] = (u0 * (1.0 + amplitude * bump)).max(1e-6);
        x[2 * j + 1] = (v0 * (1.0 - amplitude * bump)).max(1e-6);
    }
    x
}

/// Long-horizon semi-implicit integration followed by a Newton polish.
///
/// Returns the steady pattern as a classified equilibrium; errors out with
/// the last state attached when the integration diverges.
pub fn turing_pattern_equilibrium(
    model: &NetworkModel,
    init: &DVector<f64>,
    t_horizon: f64,
    dt: f64,
) -> Result<Equilibrium> {
    let n = model.n_species();
    if init.len() != n {
        return Err(Error::Dimension("initial state has wrong dimension".into()));
    }
    let x = integrate_semi_implicit(model, init, t_horizon, dt)?;
    // Newton polish on the steady state
    let polished = newton(
        &x,
        |x| model.vector_field(x, None),
        |x| model.jacobian(x, None),
        1e-11,
        80,
    )?;
    let jac = model.jacobian(&polished, None)?;
    let eigenvalues: Vec<nalgebra::Complex<f64>> =
        jac.complex_eigenvalues().iter().copied().collect();
    let max_re = eigenvalues.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
    let stability = if max_re < -1e-8 {
        Stability::Stable
    } else if max_re > 1e-8 {
        Stability::Unstable
    } else {
        Stability::Marginal
    };
    let residual = model.vector_field(&polished, None)?.amax();
    let det = (-&jac).determinant();
    Ok(Equilibrium {
        x: polished,
        eigenvalues,
        stability,
        det_sign: if det > 0.0 { 1 } else if det < 0.0 { -1 } else { 0 },
        degenerate: false,
        residual,
    })
}

/// Semi-implicit (IMEX) integrator: the linear part M of the vector field is
/// treated implicitly, the remainder explicitly:
/// `(I - dt M) x_{k+1} = x_k + dt (f(x_k) - M x_k)`.
pub fn integrate_semi_implicit(
    model: &NetworkModel,
    init: &DVector<f64>,
    t_horizon: f64,
    dt: f64,
) -> Result<DVector<f64>> {
    let n = model.n_species();
    let m = model.linear_part(None)?;
    let lhs = DMatrix::identity(n, n) - dt * &m;
    let lu = lhs.lu();
    let mut x = init.clone();
    let steps = (t_horizon / dt).round() as usize;
    for _ in 0..steps {
        let f = model.vector_field(&x, None)?;
        let rhs = &x + dt * (f - &m * &x);
        x = lu
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("singular IMEX factorization".into()))?;
        if !x.iter().all(|v| v.is_finite()) || x.amax() > 1e9 {
            return Err(Error::Numerical(format!(
                "integration diverged (max |x| = {:.3e})",
                x.amax()
            )));
        }
    }
    Ok(x)
}

/// Coefficient of spatial variation of the u-field of a 2N state.
pub fn spatial_cv_u(state: &DVector<f64>) -> f64 {
    let n = state.len() / 2;
    let us: Vec<f64> = (0..n).map(|j| state[2 * j]).collect();
    let mean = us.iter().sum::<f64>() / n as f64;
    let var = us.iter().map(|u| (u - mean) * (u - mean)).sum::<f64>() / n as f64;
    var.sqrt() / mean.abs().max(1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const PAPER: (f64, f64, f64, f64, f64, f64, f64) = (0.5, 1.0, 1.0, 0.5, 0.5, 1.4e-4, 5e-3);

    #[test]
    fn pattern_condition_holds_at_reference_parameters() {
        let (a, b, c, d, e, du, dv) = PAPER;
        let (_, cond) = levin_segel_semidiscretize(a, b, c, d, e, du, dv, 21, 1.0).unwrap();
        assert!(cond.holds);
        assert_relative_eq!(cond.diffusion_ratio, 0.028, epsilon = 1e-12);
        // threshold (sqrt(b/d) - sqrt(b/d - e/c))^2 = (sqrt2 - sqrt1.5)^2
        let expect = (2.0f64.sqrt() - 1.5f64.sqrt()).powi(2);
        assert_relative_eq!(cond.diffusion_threshold, expect, epsilon = 1e-12);
        assert!(cond.bc > cond.ed);
        assert_relative_eq!(cond.homogeneous.0, 1.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(cond.homogeneous.1, 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn condition_violated_still_builds_with_warning() {
        let (a, b, c, d, e, _du, dv) = PAPER;
        let (model, cond) = levin_segel_semidiscretize(a, b, c, d, e, 4e-3, dv, 11, 1.0).unwrap();
        assert!(!cond.holds); // ratio 0.8 exceeds the threshold
        assert_eq!(model.n_species(), 22);
    }

    #[test]
    fn zero_diffusion_recovers_homogeneous_equilibrium() {
        let (a, b, c, d, e, ..) = PAPER;
        let (model, cond) = levin_segel_semidiscretize(a, b, c, d, e, 0.0, 0.0, 7, 1.0).unwrap();
        let mut init = DVector::zeros(14);
        for j in 0..7 {
            init[2 * j] = cond.homogeneous.0 * (1.0 + 0.02 * (j as f64 * 0.7).sin());
            init[2 * j + 1] = cond.homogeneous.1 * (1.0 - 0.02 * (j as f64 * 0.9).cos());
        }
        let eq = turing_pattern_equilibrium(&model, &init, 400.0, 0.01).unwrap();
        for j in 0..7 {
            assert_relative_eq!(eq.x[2 * j], 1.0 / 3.0, epsilon = 1e-7);
            assert_relative_eq!(eq.x[2 * j + 1], 2.0 / 3.0, epsilon = 1e-7);
        }
        assert!(eq.residual < 1e-11);
    }

    #[test]
    fn pattern_attractor_is_nonhomogeneous_and_steady() {
        let (a, b, c, d, e, du, dv) = PAPER;
        let n = 41;
        let (model, cond) = levin_segel_semidiscretize(a, b, c, d, e, du, dv, n, 1.0).unwrap();
        let init = pattern_seed(&cond, n, 0.05, 2024);
        let eq = turing_pattern_equilibrium(&model, &init, 250.0, 0.01).unwrap();
        assert!(eq.residual < 1e-8, "residual {}", eq.residual);
        assert!(spatial_cv_u(&eq.x) > 0.1, "pattern is too flat: cv = {}", spatial_cv_u(&eq.x));
        assert_eq!(eq.stability, Stability::Stable);
    }

    #[test]
    fn grid_refinement_changes_pattern_by_under_two_percent() {
        let (a, b, c, d, e, du, dv) = PAPER;
        let n1 = 41;
        let (m1, cond) = levin_segel_semidiscretize(a, b, c, d, e, du, dv, n1, 1.0).unwrap();
        let init = pattern_seed(&cond, n1, 0.05, 2024);
        let eq1 = turing_pattern_equilibrium(&m1, &init, 250.0, 0.01).unwrap();

        // refine: interpolate the coarse pattern onto the doubled grid
        let n2 = 2 * n1 - 1;
        let (m2, _) = levin_segel_semidiscretize(a, b, c, d, e, du, dv, n2, 1.0).unwrap();
        let mut init2 = DVector::zeros(2 * n2);
        for j in (0..n2).step_by(2) {
            let cj = j / 2;
            init2[2 * j] = eq1.x[2 * cj];
            init2[2 * j + 1] = eq1.x[2 * cj + 1];
        }
        for j in (1..n2).step_by(2) {
            let (l, r) = ((j - 1) / 2, (j + 1) / 2);
            init2[2 * j] = 0.5 * (eq1.x[2 * l] + eq1.x[2 * r]);
            init2[2 * j + 1] = 0.5 * (eq1.x[2 * l + 1] + eq1.x[2 * r + 1]);
        }
        let eq2 = turing_pattern_equilibrium(&m2, &init2, 100.0, 0.01).unwrap();
        // compare the fine solution at the coarse points, sup norm
        let mut max_diff = 0.0f64;
        let mut max_val = 0.0f64;
        for cj in 0..n1 {
            let fj = 2 * cj;
            max_diff = max_diff.max((eq1.x[2 * cj] - eq2.x[2 * fj]).abs());
            max_diff = max_diff.max((eq1.x[2 * cj + 1] - eq2.x[2 * fj + 1]).abs());
            max_val = max_val.max(eq1.x[2 * cj].abs()).max(eq1.x[2 * cj + 1].abs());
        }
        assert!(
            max_diff / max_val < 0.02,
            "refinement changed the pattern by {:.2}%",
            100.0 * max_diff / max_val
        );
    }
}
