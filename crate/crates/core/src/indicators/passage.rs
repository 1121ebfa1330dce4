//! Kramers' escape rate and mean first passage times for scalar diffusions.

use crate::dynamics::Potential1D;
use crate::error::{Error, Result};

/// Kramers' escape rate over a potential barrier:
/// sqrt(V''(x1) |V''(x2)|) exp((V(x1) - V(x2)) / D) / (2 pi),
/// with x1 the well bottom (V'' > 0) and x2 the barrier top (V'' < 0).
/// Curvatures are taken by central differences on the potential grid.
pub fn kramers_rate(potential: &Potential1D, x1: f64, x2: f64, d: f64) -> Result<f64> {
    if d <= 0.0 {
        return Err(Error::Invalid("diffusion D must be positive".into()));
    }
    let c1 = potential.curvature_at(x1)?;
    let c2 = potential.curvature_at(x2)?;
    if c1 <= 0.0 {
        return Err(Error::Domain(format!(
            "V''(x1) = {c1:.3e} must be positive (x1 must be a well bottom)"
        )));
    }
    if c2 >= 0.0 {
        return Err(Error::Domain(format!(
            "V''(x2) = {c2:.3e} must be negative (x2 must be a barrier top)"
        )));
    }
    let v1 = potential.value_at(x1);
    let v2 = potential.value_at(x2);
    Ok((c1 * c2.abs()).sqrt() * ((v1 - v2) / d).exp() / (2.0 * std::f64::consts::PI))
}

/// Where to evaluate the diffusion coefficient in the MFPT integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MfptVariant {
    /// b evaluated at the outer integration variable (standard first-passage
    /// formula; the default).
    OuterVariable,
    /// b frozen at the starting point x1.
    StartPoint,
}

/// Mean first passage time from `x1` to `x2` for the scalar diffusion
/// `dx = a(x) dt + sqrt(b(x)) dW` (so `b` is the squared noise amplitude):
///
/// `T = 2 int_{x1}^{x2} [int_lo^y p(z) dz] / (b(y) p(y)) dy`
///
/// with p the stationary Fokker-Planck density normalized on the working
/// interval with reflecting boundaries. For `x1 > x2` the mirrored form
/// integrates the upper tail instead.
pub fn mfpt(
    drift: &dyn Fn(f64) -> f64,
    diffusion: &dyn Fn(f64) -> f64,
    x1: f64,
    x2: f64,
    interval: (f64, f64),
    variant: MfptVariant,
) -> Result<f64> {
    if x1 == x2 {
        return Ok(0.0);
    }
    let (lo, hi) = interval;
    if !(lo < hi) || x1 < lo || x1 > hi || x2 < lo || x2 > hi {
        return Err(Error::Invalid("passage points must lie in the working interval".into()));
    }
    // log of the unnormalized stationary density: ln psi = -ln b + 2 int a/b
    let n = 4001usize;
    let h = (hi - lo) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| lo + i as f64 * h).collect();
    let mut log_psi = vec![0.0f64; n];
    let mut acc = 0.0;
    let ratio = |x: f64| {
        let b = diffusion(x);
        if b <= 0.0 {
            f64::NAN
        } else {
            2.0 * drift(x) / b
        }
    };
    let mut prev = ratio(grid[0]);
    for i in 1..n {
        let cur = ratio(grid[i]);
        acc += 0.5 * (prev + cur) * h;
        log_psi[i] = acc;
        prev = cur;
    }
    for (i, lp) in log_psi.iter_mut().enumerate() {
        let b = diffusion(grid[i]);
        if b <= 0.0 || !lp.is_finite() {
            return Err(Error::Numerical(
                "stationary density undefined (nonpositive diffusion or divergent drift)".into(),
            ));
        }
        *lp -= b.ln();
    }
    // normalize in a numerically safe way
    let max_lp = log_psi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let psi: Vec<f64> = log_psi.iter().map(|lp| (lp - max_lp).exp()).collect();
    let mut cdf = vec![0.0f64; n];
    for i in 1..n {
        cdf[i] = cdf[i - 1] + 0.5 * (psi[i - 1] + psi[i]) * h;
    }
    let z = cdf[n - 1];
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::Numerical("stationary density is not normalizable".into()));
    }

    let p_at = |idx: usize| psi[idx] / z;
    let b_fixed = diffusion(x1);
    let idx_of = |x: f64| (((x - lo) / h).round() as usize).min(n - 1);
    let (ia, ib) = (idx_of(x1), idx_of(x2));
    let mut t = 0.0;
    if x1 < x2 {
        // inner mass from the lower (reflecting) end
        let mut prev_term: Option<f64> = None;
        for i in ia..=ib {
            let b = match variant {
                MfptVariant::OuterVariable => diffusion(grid[i]),
                MfptVariant::StartPoint => b_fixed,
            };
            let term = (cdf[i] / z) / (b * p_at(i));
            if let Some(pt) = prev_term {
                t += 0.5 * (pt + term) * h;
            }
            prev_term = Some(term);
        }
    } else {
        // mirrored: inner mass from the upper (reflecting) end
        for i in ib..=ia {
            let b = match variant {
                MfptVariant::OuterVariable => diffusion(grid[i]),
                MfptVariant::StartPoint => b_fixed,
            };
            let upper_mass = (z - cdf[i]) / z;
            let term = upper_mass / (b * p_at(i));
            if i > ib {
                let prev_b = match variant {
                    MfptVariant::OuterVariable => diffusion(grid[i - 1]),
                    MfptVariant::StartPoint => b_fixed,
                };
                let prev_term = ((z - cdf[i - 1]) / z) / (prev_b * p_at(i - 1));
                t += 0.5 * (prev_term + term) * h;
            }
        }
    }
    Ok(2.0 * t)
}
