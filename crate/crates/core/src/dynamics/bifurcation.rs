//! Parameter sweeps with branch tracking and simultaneous fold-condition
//! solving f = 0, df/dx = 0.

use super::equilibria::{find_equilibria, Equilibrium, Stability};
use crate::error::{Error, Result};
use crate::model::NetworkModel;
use crate::numeric::{linspace, newton, Halton};
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct SweepSample {
    pub p: f64,
    pub equilibria: Vec<Equilibrium>,
}

#[derive(Debug, Clone)]
pub struct BifurcationDiagram {
    pub param: String,
    pub samples: Vec<SweepSample>,
    /// Parameter values (sample midpoints) where the branch count jumps by 2.
    pub detected_folds: Vec<f64>,
    /// Parameter values where a persisting branch flips stability.
    pub detected_transcritical: Vec<f64>,
}

/// Fixed-step parameter marching with nearest-point branch matching.
pub fn bifurcation_sweep(
    model: &NetworkModel,
    param: &str,
    range: (f64, f64),
    steps: usize,
    bounds: &[(f64, f64)],
    n_starts: usize,
) -> Result<BifurcationDiagram> {
    if model.params().get(param).is_none() {
        return Err(Error::UnknownParameter(param.into()));
    }
    if steps < 2 {
        return Err(Error::Invalid("sweep needs at least 2 steps".into()));
    }
    let grid = linspace(range.0, range.1, steps);
    let diameter = bounds.iter().map(|&(lo, hi)| hi - lo).fold(0.0f64, f64::max);
    let match_tol = 0.1 * diameter;

    let mut samples = Vec::with_capacity(steps);
    for &p in &grid {
        let m = model.with_param(param, p);
        let equilibria = find_equilibria(&m, None, bounds, n_starts, 1e-10)?;
        samples.push(SweepSample { p, equilibria });
    }

    let mut folds = Vec::new();
    let mut transcritical = Vec::new();
    for w in samples.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let diff = a.equilibria.len() as i64 - b.equilibria.len() as i64;
        let marginal_present = a.equilibria.iter().chain(&b.equilibria).any(|e| {
            matches!(e.stability, Stability::Marginal) || e.degenerate
        });
        if diff.abs() == 2 || (diff.abs() == 1 && marginal_present) {
            folds.push(0.5 * (a.p + b.p));
        }
        // nearest-continuation matching for stability exchanges
        for ea in &a.equilibria {
            let nearest = b
                .equilibria
                .iter()
                .min_by(|x, y| {
                    let dx = (&x.x - &ea.x).amax();
                    let dy = (&y.x - &ea.x).amax();
                    dx.partial_cmp(&dy).unwrap()
                });
            if let Some(eb) = nearest {
                if (&eb.x - &ea.x).amax() < match_tol
                    && matches!(
                        (ea.stability, eb.stability),
                        (Stability::Stable, Stability::Unstable)
                            | (Stability::Unstable, Stability::Stable)
                    )
                    && a.equilibria.len() == b.equilibria.len()
                {
                    transcritical.push(0.5 * (a.p + b.p));
                    break;
                }
            }
        }
    }
    Ok(BifurcationDiagram { param: param.into(), samples, detected_folds: folds, detected_transcritical: transcritical })
}

#[derive(Debug, Clone, Copy)]
pub struct FoldPoint {
    pub p: f64,
    pub x: f64,
    /// Residuals |f| and |df/dx| at the solution.
    pub residual_f: f64,
    pub residual_fx: f64,
}

/// Solve the tangency system f(x, p) = 0, df/dx(x, p) = 0 for a scalar-state
/// model by damped 2-D Newton iterations from quasi-random starts.
///
/// Returns the critical parameter values sorted ascending; an empty list is
/// the valid monostable outcome.
pub fn fold_condition_solve(
    model: &NetworkModel,
    param: &str,
    x_box: (f64, f64),
    p_box: (f64, f64),
    n_starts: usize,
) -> Result<Vec<FoldPoint>> {
    if model.n_species() != 1 {
        return Err(Error::Invalid("fold-condition solving needs a scalar-state model".into()));
    }
    if model.params().get(param).is_none() {
        return Err(Error::UnknownParameter(param.into()));
    }
    let f_of = |x: f64, p: f64| -> Result<f64> {
        let mut ov = BTreeMap::new();
        ov.insert(param.to_string(), p);
        Ok(model.vector_field(&DVector::from_vec(vec![x]), Some(&ov))?[0])
    };
    let fx_of = |x: f64, p: f64| -> Result<f64> {
        let mut ov = BTreeMap::new();
        ov.insert(param.to_string(), p);
        Ok(model.jacobian(&DVector::from_vec(vec![x]), Some(&ov))?[(0, 0)])
    };
    // residual G(x, p) = (f, f_x); Jacobian assembled with analytic f_x and
    // central differences in the remaining entries
    let g = |z: &DVector<f64>| -> Result<DVector<f64>> {
        Ok(DVector::from_vec(vec![f_of(z[0], z[1])?, fx_of(z[0], z[1])?]))
    };
    let jac = |z: &DVector<f64>| -> Result<DMatrix<f64>> {
        let (x, p) = (z[0], z[1]);
        let hx = 1e-6 * x.abs().max(1.0);
        let hp = 1e-6 * p.abs().max(1.0);
        let f_x = fx_of(x, p)?;
        let f_p = (f_of(x, p + hp)? - f_of(x, p - hp)?) / (2.0 * hp);
        let fx_x = (fx_of(x + hx, p)? - fx_of(x - hx, p)?) / (2.0 * hx);
        let fx_p = (fx_of(x, p + hp)? - fx_of(x, p - hp)?) / (2.0 * hp);
        Ok(DMatrix::from_row_slice(2, 2, &[f_x, f_p, fx_x, fx_p]))
    };

    let mut halton = Halton::new(2);
    let mut found: Vec<FoldPoint> = Vec::new();
    for _ in 0..n_starts {
        let u = halton.next_point();
        let z0 = DVector::from_vec(vec![
            x_box.0 + u[0] * (x_box.1 - x_box.0),
            p_box.0 + u[1] * (p_box.1 - p_box.0),
        ]);
        let Ok(z) = newton(&z0, g, jac, 1e-12, 100) else { continue };
        let (x, p) = (z[0], z[1]);
        if !(x >= x_box.0 - 1e-6 && x <= x_box.1 + 1e-6 && p >= p_box.0 - 1e-6 && p <= p_box.1 + 1e-6) {
            continue;
        }
        let rf = f_of(x, p)?.abs();
        let rfx = fx_of(x, p)?.abs();
        if rf >= 1e-9 || rfx >= 1e-9 {
            continue;
        }
        if found.iter().all(|fp| (fp.p - p).abs() > 1e-6 || (fp.x - x).abs() > 1e-6) {
            found.push(FoldPoint { p, x, residual_f: rf, residual_fx: rfx });
        }
    }
    found.sort_by(|a, b| a.p.partial_cmp(&b.p).unwrap());
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{normal_form, NormalFormKind};
    use crate::model::builtin;
    use approx::assert_relative_eq;

    /// Independent oracle for the gene-model fold points at h = 2: the
    /// tangency system reduces to x^3 - x + 2k = 0 with a = (1 + x^2)^2 / 2x,
    /// and the cusp where the two roots merge sits exactly at k = 1/(3 sqrt 3).
    fn gene_fold_oracle(k: f64) -> Vec<f64> {
        let mut out = Vec::new();
        // roots of x^3 - x + 2k in (0, 1) by bisection
        let p = |x: f64| x * x * x - x + 2.0 * k;
        let mut brackets = Vec::new();
        let grid: Vec<f64> = (1..1000).map(|i| i as f64 / 1000.0).collect();
        for w in grid.windows(2) {
            if p(w[0]) * p(w[1]) <= 0.0 {
                brackets.push((w[0], w[1]));
            }
        }
        for (mut lo, mut hi) in brackets {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if p(lo) * p(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let x = 0.5 * (lo + hi);
            out.push((1.0 + x * x).powi(2) / (2.0 * x));
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    #[test]
    fn gene_model_fold_points_match_tangency_oracle() {
        let m = builtin("gene_regulation", &BTreeMap::new()).unwrap();
        let folds = fold_condition_solve(&m, "a", (0.01, 3.0), (0.5, 4.0), 60).unwrap();
        assert_eq!(folds.len(), 2);
        let oracle = gene_fold_oracle(0.1);
        assert_eq!(oracle.len(), 2);
        assert_relative_eq!(folds[0].p, oracle[0], epsilon = 1e-6);
        assert_relative_eq!(folds[1].p, oracle[1], epsilon = 1e-6);
        for f in &folds {
            assert!(f.residual_f < 1e-9 && f.residual_fx < 1e-9);
        }
    }

    #[test]
    fn gene_model_cusp_point() {
        // at k = 1/(3 sqrt 3) the two folds coincide; above it, none remain
        let k_cusp = 1.0 / (3.0 * 3.0f64.sqrt());
        let mut p = BTreeMap::new();
        p.insert("k".to_string(), k_cusp);
        let m = builtin("gene_regulation", &p).unwrap();
        let folds = fold_condition_solve(&m, "a", (0.01, 3.0), (0.5, 4.0), 60).unwrap();
        assert!(!folds.is_empty());
        for w in folds.windows(2) {
            assert!((w[1].p - w[0].p).abs() < 1e-3, "folds did not merge at the cusp");
        }
        let mut p = BTreeMap::new();
        p.insert("k".to_string(), 0.25); // above the cusp: monostable for all a
        let m = builtin("gene_regulation", &p).unwrap();
        let folds = fold_condition_solve(&m, "a", (0.01, 3.0), (0.5, 4.0), 60).unwrap();
        assert!(folds.is_empty());
    }

    #[test]
    fn michaelis_menten_case_has_no_folds() {
        let mut p = BTreeMap::new();
        p.insert("h".to_string(), 1.0);
        let m = builtin("gene_regulation", &p).unwrap();
        let folds = fold_condition_solve(&m, "a", (0.0, 5.0), (0.0, 10.0), 80).unwrap();
        assert!(folds.is_empty());
    }

    #[test]
    fn gene_sweep_detects_two_folds() {
        let m = builtin("gene_regulation", &BTreeMap::new()).unwrap();
        let d = bifurcation_sweep(&m, "a", (1.5, 3.0), 150, &[(0.0, 3.5)], 25).unwrap();
        assert_eq!(d.detected_folds.len(), 2);
        let oracle = gene_fold_oracle(0.1);
        assert!((d.detected_folds[0] - oracle[0]).abs() < 0.02);
        assert!((d.detected_folds[1] - oracle[1]).abs() < 0.02);
    }

    #[test]
    fn transcritical_sweep_detects_stability_exchange() {
        let m = normal_form(NormalFormKind::Transcritical, &[0.0]).unwrap();
        let d = bifurcation_sweep(&m, "p", (-1.0, 1.0), 80, &[(-2.0, 2.0)], 25).unwrap();
        assert!(!d.detected_transcritical.is_empty());
        assert!(d.detected_transcritical.iter().any(|&p| p.abs() < 0.05));
    }

    #[test]
    fn fold_sweep_shows_branch_pair_vanishing() {
        let m = normal_form(NormalFormKind::Fold, &[0.0]).unwrap();
        let d = bifurcation_sweep(&m, "p", (-1.0, 1.0), 80, &[(-2.0, 2.0)], 25).unwrap();
        assert_eq!(d.detected_folds.len(), 1);
        assert!(d.detected_folds[0].abs() < 0.05);
        // branches +-sqrt(-p) for p < 0
        let s = &d.samples[0];
        assert_eq!(s.p, -1.0);
        assert_eq!(s.equilibria.len(), 2);
        assert_relative_eq!(s.equilibria[0].x[0], -1.0, epsilon = 1e-6);
        assert_relative_eq!(s.equilibria[1].x[0], 1.0, epsilon = 1e-6);
    }
}
