//! Early-warning and resilience indicators: rolling statistics, Welch
//! spectra and spectral reddening, Gaussian entropy, Kendall's tau, Kramers'
//! escape rate, mean first passage times, the recovery exponent, the
//! multivariate Ornstein-Uhlenbeck stationary covariance, the Bayesian
//! transition posterior, and Hoeffding-sampled ISP classification.

mod mvou;
mod passage;
mod rolling;
mod spectral;

pub use mvou::{mv_ou_stationary, recovery_exponent, MvOuStationary};
pub use passage::{kramers_rate, mfpt, MfptVariant};
pub use rolling::{kendall_tau, rolling_stats, Detrend, IndicatorSeries, RollingSpec, RollingStats};
pub use spectral::{psd, reddening_ratio, Spectrum};

use crate::error::{Error, Result};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Shannon differential entropy of a Gaussian with the given variance:
/// H = (ln(2 pi Var) + 1) / 2.
pub fn shannon_entropy_gaussian(variance: f64) -> Result<f64> {
    if variance <= 0.0 {
        return Err(Error::Domain("entropy needs a positive variance".into()));
    }
    Ok(0.5 * ((2.0 * std::f64::consts::PI * variance).ln() + 1.0))
}

/// Posterior probability of a critical transition given an indication of
/// resilience loss: P(CT | IRL) = P(IRL | CT) P(CT) / P(IRL).
#[derive(Debug, Clone, Copy)]
pub struct BayesCt {
    pub posterior: f64,
    /// The raw ratio exceeded one (inconsistent inputs); the reported
    /// posterior was clipped.
    pub clipped: bool,
}

pub fn bayes_ct(p_irl_given_ct: f64, p_ct: f64, p_irl: f64) -> Result<BayesCt> {
    for (name, v) in [("P(IRL|CT)", p_irl_given_ct), ("P(CT)", p_ct), ("P(IRL)", p_irl)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Invalid(format!("{name} must lie in [0, 1], got {v}")));
        }
    }
    if p_irl == 0.0 {
        return Err(Error::Domain("P(IRL) must be positive".into()));
    }
    let raw = p_irl_given_ct * p_ct / p_irl;
    Ok(BayesCt { posterior: raw.min(1.0), clipped: raw > 1.0 })
}

/// Label of an integrated structural-probabilistic classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IspLabel {
    PracticallyStructural,
    PracticallyRobust,
    Indeterminate,
}

#[derive(Debug, Clone, Copy)]
pub struct IspResult {
    pub p_hat: f64,
    pub n_samples: usize,
    pub label: IspLabel,
    pub epsilon: f64,
    pub confidence_delta: f64,
}

/// Monte Carlo property classification over a parameter box with the
/// Hoeffding sample bound N = ceil(ln(2/delta) / (2 eps^2)): the estimate
/// deviates from the true measure by at most eps with probability at least
/// 1 - delta. `full_space` marks a box that stands for the whole parameter
/// space, upgrading the label from practically robust to practically
/// structural.
#[allow(clippy::too_many_arguments)]
pub fn isp_classify<F: FnMut(&[f64]) -> bool>(
    mut evaluator: F,
    bounds: &[(f64, f64)],
    epsilon: f64,
    confidence_delta: f64,
    gamma_star: f64,
    full_space: bool,
    seed: u64,
) -> Result<IspResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) || !(confidence_delta > 0.0 && confidence_delta < 1.0) {
        return Err(Error::Invalid("need 0 < eps < 1 and 0 < delta < 1".into()));
    }
    for &(lo, hi) in bounds {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Invalid("sampling bounds must be finite".into()));
        }
    }
    let n = ((2.0 / confidence_delta).ln() / (2.0 * epsilon * epsilon)).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    let mut point = vec![0.0; bounds.len()];
    for _ in 0..n {
        for (c, &(lo, hi)) in point.iter_mut().zip(bounds) {
            *c = lo + (hi - lo) * rng.random::<f64>();
        }
        if evaluator(&point) {
            hits += 1;
        }
    }
    let p_hat = hits as f64 / n as f64;
    let label = if p_hat >= gamma_star {
        if full_space {
            IspLabel::PracticallyStructural
        } else {
            IspLabel::PracticallyRobust
        }
    } else {
        IspLabel::Indeterminate
    };
    Ok(IspResult { p_hat, n_samples: n, label, epsilon, confidence_delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn entropy_closed_forms() {
        // H = 0 exactly at Var = 1/(2 pi e)
        let v0 = 1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::E);
        assert_relative_eq!(shannon_entropy_gaussian(v0).unwrap(), 0.0, epsilon = 1e-14);
        // scaling by e^2 raises the entropy by exactly 1
        let h1 = shannon_entropy_gaussian(0.3).unwrap();
        let h2 = shannon_entropy_gaussian(0.3 * std::f64::consts::E.powi(2)).unwrap();
        assert_relative_eq!(h2 - h1, 1.0, epsilon = 1e-12);
        // shift identity H(c^2 Var) = H(Var) + ln c
        let c: f64 = 3.7;
        let h3 = shannon_entropy_gaussian(0.3 * c * c).unwrap();
        assert_relative_eq!(h3 - h1, c.ln(), epsilon = 1e-12);
        // divergence as Var -> infinity along D/k with k -> 0
        let grid = [1.0, 0.5, 0.25, 0.1, 0.01];
        let hs: Vec<f64> =
            grid.iter().map(|k| shannon_entropy_gaussian(0.1 / k).unwrap()).collect();
        assert!(hs.windows(2).all(|w| w[1] > w[0]));
        assert!(shannon_entropy_gaussian(0.0).is_err());
        assert!(shannon_entropy_gaussian(-1.0).is_err());
    }

    #[test]
    fn bayes_posterior_cases() {
        assert_eq!(bayes_ct(0.9, 0.0, 0.5).unwrap().posterior, 0.0);
        // independence: P(IRL|CT) = P(IRL) gives the prior back
        let b = bayes_ct(0.2, 0.37, 0.2).unwrap();
        assert_relative_eq!(b.posterior, 0.37, epsilon = 1e-15);
        let b = bayes_ct(0.9, 0.1, 0.2).unwrap();
        assert_relative_eq!(b.posterior, 0.45, epsilon = 1e-15);
        assert!(!b.clipped);
        let b = bayes_ct(0.9, 0.9, 0.1).unwrap();
        assert!(b.clipped);
        assert_eq!(b.posterior, 1.0);
        assert!(bayes_ct(0.9, 0.1, 0.0).is_err());
        assert!(bayes_ct(1.2, 0.1, 0.5).is_err());
    }

    #[test]
    fn hoeffding_sample_size() {
        let r = isp_classify(|_| true, &[(0.0, 1.0)], 0.05, 0.05, 0.9, false, 1).unwrap();
        assert_eq!(r.n_samples, 738);
        assert_eq!(r.p_hat, 1.0);
        assert_eq!(r.label, IspLabel::PracticallyRobust);
    }

    #[test]
    fn isp_estimates_interval_measure() {
        // property: x in [0.2, 0.9] on the box [0, 1]: measure 0.7
        let r = isp_classify(
            |p| (0.2..=0.9).contains(&p[0]),
            &[(0.0, 1.0)],
            0.05,
            0.05,
            0.5,
            true,
            42,
        )
        .unwrap();
        assert!((r.p_hat - 0.7).abs() <= 0.05, "p_hat = {}", r.p_hat);
        assert_eq!(r.label, IspLabel::PracticallyStructural);
    }
}
