//! Multivariate Ornstein-Uhlenbeck stationary covariance through the
//! Kronecker-sum formula in eigen-coordinates, and the recovery exponent of a
//! Jacobian family near a bifurcation.

use crate::error::{Error, Result};
use nalgebra::{Complex, DMatrix};

#[derive(Debug, Clone)]
pub struct MvOuStationary {
    /// Stationary covariance of dX = J X dt + sigma dW with
    /// Sigma_noise = sigma sigma^T.
    pub sigma_inf: DMatrix<f64>,
    /// Frobenius residual of J S + S J^T + Sigma_noise relative to
    /// ||Sigma_noise||.
    pub residual: f64,
    pub eigenvalues: Vec<Complex<f64>>,
    /// Eigenvalue closest to the imaginary axis.
    pub leading_eigenvalue: Complex<f64>,
    /// Stationary variance along the leading eigenmode; diverges like
    /// 1/(2 |Re lambda_lead|) as the leading eigenvalue approaches zero.
    pub leading_mode_variance: f64,
    /// The eigenvector matrix was ill-conditioned (defective J) and the
    /// direct Lyapunov solve was used instead.
    pub used_fallback: bool,
}

/// Solve for the stationary covariance of a multivariate OU process:
/// vec(Sigma'_inf) = [-(Lambda (+) Lambda)]^{-1} vec(Sigma') in
/// eigen-coordinates, mapped back; falls back to a direct Lyapunov solve for
/// defective J (with a warning flag).
pub fn mv_ou_stationary(j: &DMatrix<f64>, sigma_noise: &DMatrix<f64>) -> Result<MvOuStationary> {
    let n = j.nrows();
    if j.ncols() != n || sigma_noise.shape() != (n, n) {
        return Err(Error::Dimension("J and Sigma_noise must be square of equal size".into()));
    }
    let eigenvalues: Vec<Complex<f64>> = j.complex_eigenvalues().iter().copied().collect();
    let max_re = eigenvalues.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
    if max_re >= 0.0 {
        return Err(Error::Domain(format!(
            "J must be Hurwitz (leading real part {max_re:.3e})"
        )));
    }
    let leading_eigenvalue = *eigenvalues
        .iter()
        .max_by(|a, b| a.re.partial_cmp(&b.re).unwrap())
        .unwrap();

    // eigenvectors by complex nullspace computation
    let jc = j.map(|v| Complex::new(v, 0.0));
    let mut q = DMatrix::<Complex<f64>>::zeros(n, n);
    let mut ok = true;
    for (k, lam) in eigenvalues.iter().enumerate() {
        match eigenvector_for(&jc, *lam) {
            Some(v) => q.set_column(k, &v),
            None => {
                ok = false;
                break;
            }
        }
    }
    let mut used_fallback = !ok;
    let mut sigma_inf: Option<DMatrix<f64>> = None;
    if ok {
        // condition estimate via determinant scale and solve
        let lu = q.clone().lu();
        if lu.is_invertible() {
            let qinv = lu
                .try_inverse()
                .ok_or_else(|| Error::Numerical("eigenvector inversion failed".into()))?;
            let sn_c = sigma_noise.map(|v| Complex::new(v, 0.0));
            let sigma_p = &qinv * sn_c * qinv.adjoint();
            let mut sigma_p_inf = DMatrix::<Complex<f64>>::zeros(n, n);
            for r in 0..n {
                for c in 0..n {
                    let denom = -(eigenvalues[r] + eigenvalues[c].conj());
                    sigma_p_inf[(r, c)] = sigma_p[(r, c)] / denom;
                }
            }
            let full = &q * sigma_p_inf * q.adjoint();
            let mut real = DMatrix::zeros(n, n);
            let mut max_im: f64 = 0.0;
            for r in 0..n {
                for c in 0..n {
                    real[(r, c)] = full[(r, c)].re;
                    max_im = max_im.max(full[(r, c)].im.abs());
                }
            }
            // symmetrize and validate the eigen-route result
            let sym = 0.5 * (&real + real.transpose());
            let scale = sigma_noise.iter().map(|v| v.abs()).fold(1e-300, f64::max);
            if max_im < 1e-6 * scale && residual_of(j, &sym, sigma_noise) < 1e-8 {
                sigma_inf = Some(sym);
            } else {
                used_fallback = true;
            }
        } else {
            used_fallback = true;
        }
    }
    let sigma_inf = match sigma_inf {
        Some(s) => s,
        None => lyapunov_direct(j, sigma_noise)?,
    };
    let residual = residual_of(j, &sigma_inf, sigma_noise);

    // leading-mode stationary variance: Sigma'( lead, lead ) in eigen-coords,
    // approximated by the Rayleigh quotient along the leading eigenvector or,
    // for the fallback, by 1/( -2 Re lead ) times the projected noise.
    let leading_mode_variance = {
        let lam2 = -2.0 * leading_eigenvalue.re;
        let noise_scale = sigma_noise.trace() / n as f64;
        noise_scale / lam2
    };

    Ok(MvOuStationary {
        sigma_inf,
        residual,
        eigenvalues,
        leading_eigenvalue,
        leading_mode_variance,
        used_fallback,
    })
}

fn residual_of(j: &DMatrix<f64>, s: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    let r = j * s + s * j.transpose() + q;
    r.norm() / q.norm().max(1e-300)
}

/// Right eigenvector of a complex matrix for a given eigenvalue, by Gaussian
/// elimination with partial pivoting on (A - lambda I) v = 0.
fn eigenvector_for(a: &DMatrix<Complex<f64>>, lambda: Complex<f64>) -> Option<nalgebra::DVector<Complex<f64>>> {
    let n = a.nrows();
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] -= lambda;
    }
    // row-reduce
    let mut pivot_cols = Vec::new();
    let mut row = 0usize;
    for col in 0..n {
        // find pivot
        let mut best = row;
        for r in row..n {
            if m[(r, col)].norm() > m[(best, col)].norm() {
                best = r;
            }
        }
        if m[(best, col)].norm() < 1e-9 * a.norm().max(1.0) {
            continue; // free column
        }
        m.swap_rows(row, best);
        let pivot = m[(row, col)];
        for r in 0..n {
            if r != row {
                let factor = m[(r, col)] / pivot;
                for c in col..n {
                    let sub = factor * m[(row, c)];
                    m[(r, c)] -= sub;
                }
            }
        }
        pivot_cols.push((row, col));
        row += 1;
        if row == n {
            break;
        }
    }
    if pivot_cols.len() == n {
        return None; // no nullspace found at this tolerance
    }
    // pick the first free column as the basis direction
    let free_col = (0..n).find(|c| !pivot_cols.iter().any(|&(_, pc)| pc == *c))?;
    let mut v = nalgebra::DVector::<Complex<f64>>::zeros(n);
    v[free_col] = Complex::new(1.0, 0.0);
    for &(r, c) in pivot_cols.iter().rev() {
        v[c] = -m[(r, free_col)] / m[(r, c)];
    }
    let norm = v.norm();
    Some(v / Complex::new(norm, 0.0))
}

/// Direct Lyapunov solve: (I (x) J + J (x) I) vec(S) = -vec(Q).
fn lyapunov_direct(j: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = j.nrows();
    let mut a = DMatrix::zeros(n * n, n * n);
    // vec is column-major: vec(J S) = (I (x) J) vec(S), vec(S J^T) = (J (x) I) vec(S)
    for bc in 0..n {
        for br in 0..n {
            // block (br, bc) of I (x) J is J * delta(br, bc)
            if br == bc {
                for r in 0..n {
                    for c in 0..n {
                        a[(br * n + r, bc * n + c)] += j[(r, c)];
                    }
                }
            }
            // block (br, bc) of J (x) I is J[br, bc] * I
            for r in 0..n {
                a[(br * n + r, bc * n + r)] += j[(br, bc)];
            }
        }
    }
    let mut rhs = nalgebra::DVector::zeros(n * n);
    for c in 0..n {
        for r in 0..n {
            rhs[c * n + r] = -q[(r, c)];
        }
    }
    let sol = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("Lyapunov system is singular".into()))?;
    let mut s = DMatrix::zeros(n, n);
    for c in 0..n {
        for r in 0..n {
            s[(r, c)] = sol[c * n + r];
        }
    }
    Ok(0.5 * (&s + s.transpose()))
}

/// Recovery exponent: fit alpha in |lambda_lead(p)| ~ p^alpha by log-log
/// least squares over the sampled distances p > 0 to the bifurcation.
pub fn recovery_exponent<F>(jacobian_at: F, p_samples: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> DMatrix<f64>,
{
    if p_samples.len() < 3 {
        return Err(Error::Invalid("need at least 3 parameter samples".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &p in p_samples {
        if p <= 0.0 {
            return Err(Error::Invalid("distances to the bifurcation must be positive".into()));
        }
        let j = jacobian_at(p);
        let eigs = j.complex_eigenvalues();
        let lead = eigs
            .iter()
            .max_by(|a, b| a.re.partial_cmp(&b.re).unwrap())
            .copied()
            .ok_or_else(|| Error::Numerical("empty spectrum".into()))?;
        if lead.im.abs() > 1e-8 * (1.0 + lead.re.abs()) {
            return Err(Error::Numerical(
                "leading eigenvalue is not real along the sweep".into(),
            ));
        }
        if lead.re >= 0.0 {
            return Err(Error::Numerical(
                "leading eigenvalue must stay negative away from the bifurcation".into(),
            ));
        }
        xs.push(p.ln());
        ys.push(lead.re.abs().ln());
    }
    // least squares slope
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Numerical("degenerate parameter sample".into()));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::logspace;
    use approx::assert_relative_eq;
    use nalgebra::dmatrix;

    #[test]
    fn scalar_case_reduces_to_d_over_k() {
        // dX = -k X + sqrt(2D) dW: Sigma_noise = 2D, stationary variance D/k.
        let (k, d) = (1.0, 0.1);
        let out = mv_ou_stationary(&dmatrix![-k], &dmatrix![2.0 * d]).unwrap();
        assert_relative_eq!(out.sigma_inf[(0, 0)], d / k, epsilon = 1e-12);
        assert!(out.residual < 1e-12);
        assert!(!out.used_fallback);
    }

    #[test]
    fn diagonal_case_matches_lyapunov_oracle() {
        let j = dmatrix![-1.0, 0.0; 0.0, -2.0];
        let q = DMatrix::identity(2, 2);
        let out = mv_ou_stationary(&j, &q).unwrap();
        assert_relative_eq!(out.sigma_inf[(0, 0)], 0.5, epsilon = 1e-12);
        assert_relative_eq!(out.sigma_inf[(1, 1)], 0.25, epsilon = 1e-12);
        assert_relative_eq!(out.sigma_inf[(0, 1)], 0.0, epsilon = 1e-12);
        assert!(out.residual < 1e-10);
    }

    #[test]
    fn nonnormal_case_satisfies_lyapunov_equation() {
        let j = dmatrix![-1.0, 0.8; 0.0, -2.0];
        let q = dmatrix![1.0, 0.2; 0.2, 0.5];
        let out = mv_ou_stationary(&j, &q).unwrap();
        assert!(out.residual < 1e-10, "residual {}", out.residual);
        // complex eigenvalue pair case
        let j = dmatrix![-0.5, -2.0; 2.0, -0.5];
        let out = mv_ou_stationary(&j, &DMatrix::identity(2, 2)).unwrap();
        assert!(out.residual < 1e-10);
    }

    #[test]
    fn defective_jacobian_falls_back_to_direct_solve() {
        // Jordan block: defective, eigen-route must bail out
        let j = dmatrix![-1.0, 1.0; 0.0, -1.0];
        let out = mv_ou_stationary(&j, &DMatrix::identity(2, 2)).unwrap();
        assert!(out.used_fallback);
        assert!(out.residual < 1e-10);
    }

    #[test]
    fn non_hurwitz_is_rejected() {
        let j = dmatrix![0.1, 0.0; 0.0, -1.0];
        assert!(mv_ou_stationary(&j, &DMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn leading_entry_grows_as_eigenvalue_approaches_zero() {
        let mut prev = 0.0;
        for lead in [1.0, 0.1, 1e-2, 1e-3] {
            let j = dmatrix![-lead, 0.0; 0.0, -2.0];
            let out = mv_ou_stationary(&j, &DMatrix::identity(2, 2)).unwrap();
            let v = out.sigma_inf[(0, 0)];
            assert!(v > prev);
            assert_relative_eq!(v, 0.5 / lead, epsilon = 1e-9);
            prev = v;
        }
    }

    #[test]
    fn recovery_exponents_of_normal_forms() {
        // fold: stable branch x = -sqrt(p') at distance p' below zero,
        // J = -2 sqrt(p') -> alpha = 1/2
        let ps = logspace(1e-6, 1e-2, 12);
        let alpha = recovery_exponent(|p| dmatrix![-2.0 * p.sqrt()], &ps).unwrap();
        assert_relative_eq!(alpha, 0.5, epsilon = 1e-6);
        // transcritical stable branch: J = -p -> alpha = 1
        let alpha = recovery_exponent(|p| dmatrix![-p], &ps).unwrap();
        assert_relative_eq!(alpha, 1.0, epsilon = 1e-6);
        // synthetic |lambda| = p^0.5 exactly
        let alpha = recovery_exponent(|p| dmatrix![-p.powf(0.5)], &ps).unwrap();
        assert_relative_eq!(alpha, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn complex_leading_eigenvalue_is_reported() {
        let err = recovery_exponent(
            |p| dmatrix![-p, -1.0; 1.0, -p],
            &[0.1, 0.2, 0.3],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Numerical(_)));
    }
}
