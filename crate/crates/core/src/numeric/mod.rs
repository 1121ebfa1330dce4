//! Shared numerical building blocks: quasi-random sequences, damped Newton,
//! fixed-step integrators, adaptive quadrature, exact integer rank, and a
//! Clopper-Pearson interval.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Halton low-discrepancy sequence in `dim` dimensions, index starts at 1.
pub struct Halton {
    bases: Vec<u64>,
    index: u64,
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

impl Halton {
    pub fn new(dim: usize) -> Self {
        let bases = (0..dim).map(|i| PRIMES[i % PRIMES.len()]).collect();
        Halton { bases, index: 0 }
    }

    /// Next point in the unit hypercube.
    pub fn next_point(&mut self) -> Vec<f64> {
        self.index += 1;
        self.bases
            .iter()
            .map(|&b| radical_inverse(self.index, b))
            .collect()
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 0.0;
    let mut f = 1.0 / base as f64;
    while i > 0 {
        inv += (i % base) as f64 * f;
        i /= base;
        f /= base as f64;
    }
    inv
}

/// Damped Newton iteration for `f(x) = 0` with analytic Jacobian.
///
/// Returns `Ok(x)` once `‖f‖_∞ < tol`; halves the step while the residual
/// does not decrease. Gives up after `max_iter` outer iterations.
pub fn newton<F, J>(
    x0: &DVector<f64>,
    mut f: F,
    mut jac: J,
    tol: f64,
    max_iter: usize,
) -> Result<DVector<f64>>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
    J: FnMut(&DVector<f64>) -> Result<DMatrix<f64>>,
{
    let mut x = x0.clone();
    let mut fx = f(&x)?;
    for _ in 0..max_iter {
        let r0 = fx.amax();
        if r0 < tol {
            return Ok(x);
        }
        let j = jac(&x)?;
        let lu = j.lu();
        let step = lu
            .solve(&fx)
            .ok_or_else(|| Error::Numerical("singular Jacobian in Newton".into()))?;
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cand = &x - alpha * &step;
            match f(&cand) {
                Ok(fc) if fc.amax() < r0 || fc.amax() < tol => {
                    x = cand;
                    fx = fc;
                    accepted = true;
                    break;
                }
                _ => alpha *= 0.5,
            }
        }
        if !accepted {
            return Err(Error::Numerical("Newton line search stalled".into()));
        }
    }
    if fx.amax() < tol {
        Ok(x)
    } else {
        Err(Error::Numerical("Newton did not converge".into()))
    }
}

/// Classical fixed-step fourth-order Runge-Kutta integration.
///
/// Calls `observer(t, x)` after every step (and once at t0).
pub fn rk4<F, O>(
    x0: &DVector<f64>,
    t0: f64,
    t1: f64,
    dt: f64,
    mut f: F,
    mut observer: O,
) -> Result<DVector<f64>>
where
    F: FnMut(f64, &DVector<f64>) -> Result<DVector<f64>>,
    O: FnMut(f64, &DVector<f64>),
{
    let mut x = x0.clone();
    let mut t = t0;
    observer(t, &x);
    let n = ((t1 - t0) / dt).round().max(1.0) as usize;
    let h = (t1 - t0) / n as f64;
    for _ in 0..n {
        let k1 = f(t, &x)?;
        let k2 = f(t + 0.5 * h, &(&x + 0.5 * h * &k1))?;
        let k3 = f(t + 0.5 * h, &(&x + 0.5 * h * &k2))?;
        let k4 = f(t + h, &(&x + h * &k3))?;
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
        observer(t, &x);
    }
    Ok(x)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
pub fn quad<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
                + rec(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, whole, m, fm, tol, 40)
}

/// Exact rank of an integer matrix by fraction-free Gaussian elimination.
pub fn integer_rank(m: &DMatrix<i64>) -> usize {
    let (rows, cols) = m.shape();
    let mut a: Vec<Vec<i128>> = (0..rows)
        .map(|i| (0..cols).map(|j| m[(i, j)] as i128).collect())
        .collect();
    let mut rank = 0;
    let mut prev_pivot: i128 = 1;
    for col in 0..cols {
        let pivot_row = (rank..rows).find(|&r| a[r][col] != 0);
        let Some(p) = pivot_row else { continue };
        a.swap(rank, p);
        let pivot = a[rank][col];
        for r in rank + 1..rows {
            for c in col + 1..cols {
                a[r][c] = (a[r][c] * pivot - a[r][col] * a[rank][c]) / prev_pivot;
            }
            a[r][col] = 0;
        }
        prev_pivot = pivot;
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Two-sided Clopper-Pearson confidence interval for a binomial proportion.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    use statrs::distribution::{Beta, ContinuousCDF};
    assert!(trials > 0 && successes <= trials);
    let alpha = 1.0 - confidence;
    let k = successes as f64;
    let n = trials as f64;
    let lo = if successes == 0 {
        0.0
    } else {
        Beta::new(k, n - k + 1.0)
            .unwrap()
            .inverse_cdf(alpha / 2.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        Beta::new(k + 1.0, n - k)
            .unwrap()
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    (lo, hi)
}

/// Linearly spaced grid with `n >= 2` points including both endpoints.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Logarithmically spaced grid between `a > 0` and `b > 0`.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quad_integrates_polynomial() {
        let v = quad(&|x: f64| x * x, 0.0, 3.0, 1e-12);
        assert_relative_eq!(v, 9.0, max_relative = 1e-10);
    }

    #[test]
    fn newton_finds_sqrt2() {
        let x = newton(
            &DVector::from_vec(vec![1.0]),
            |x| Ok(DVector::from_vec(vec![x[0] * x[0] - 2.0])),
            |x| Ok(DMatrix::from_vec(1, 1, vec![2.0 * x[0]])),
            1e-12,
            50,
        )
        .unwrap();
        assert_relative_eq!(x[0], 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn integer_rank_examples() {
        let m = DMatrix::from_row_slice(3, 3, &[1, 2, 3, 2, 4, 6, 1, 0, 1]);
        assert_eq!(integer_rank(&m), 2);
        let id = DMatrix::<i64>::identity(4, 4);
        assert_eq!(integer_rank(&id), 4);
        let z = DMatrix::<i64>::zeros(2, 5);
        assert_eq!(integer_rank(&z), 0);
    }

    #[test]
    fn clopper_pearson_brackets_point_estimate() {
        let (lo, hi) = clopper_pearson(80, 100, 0.95);
        assert!(lo < 0.8 && 0.8 < hi);
        let (lo, hi) = clopper_pearson(0, 50, 0.95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.15);
        let (lo, hi) = clopper_pearson(50, 50, 0.95);
        assert!(lo > 0.85 && hi == 1.0);
    }

    #[test]
    fn halton_fills_unit_square() {
        let mut h = Halton::new(2);
        let pts: Vec<_> = (0..100).map(|_| h.next_point()).collect();
        assert!(pts.iter().all(|p| p.iter().all(|&c| (0.0..1.0).contains(&c))));
        let mean_x: f64 = pts.iter().map(|p| p[0]).sum::<f64>() / 100.0;
        assert!((mean_x - 0.5).abs() < 0.05);
    }
}
