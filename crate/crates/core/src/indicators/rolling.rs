//! Rolling-window sample statistics with optional Gaussian-kernel detrending,
//! and Kendall's tau trend score.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Detrend {
    None,
    /// Subtract a Gaussian-kernel smooth with the given bandwidth (in
    /// samples) before computing window moments.
    GaussianKernel { bandwidth: f64 },
}

#[derive(Debug, Clone)]
pub struct RollingSpec {
    /// Window length in samples (>= 4).
    pub window: usize,
    pub stride: usize,
    pub detrend: Detrend,
}

impl RollingSpec {
    /// Default detrending bandwidth: window / 3.
    pub fn with_default_detrend(window: usize, stride: usize) -> Self {
        RollingSpec {
            window,
            stride,
            detrend: Detrend::GaussianKernel { bandwidth: window as f64 / 3.0 },
        }
    }
}

#[derive(Debug, Clone)]
pub struct IndicatorSeries {
    pub id: String,
    pub times: Vec<f64>,
    /// One value per window; None where the statistic is undefined.
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone)]
pub struct RollingStats {
    pub variance: IndicatorSeries,
    pub ac1: IndicatorSeries,
    pub skewness: IndicatorSeries,
    pub kurtosis: IndicatorSeries,
}

/// Rolling sample moments and lag-1 autocorrelation.
///
/// Windows are aligned to their last sample; `times` supplies the stamps.
pub fn rolling_stats(times: &[f64], values: &[f64], spec: &RollingSpec) -> Result<RollingStats> {
    if times.len() != values.len() {
        return Err(Error::Dimension("times and values must have equal length".into()));
    }
    if spec.window < 4 || spec.stride < 1 {
        return Err(Error::Invalid("need window >= 4 and stride >= 1".into()));
    }
    if values.len() < spec.window {
        return Err(Error::Invalid("series shorter than the window".into()));
    }
    let data: Vec<f64> = match spec.detrend {
        Detrend::None => values.to_vec(),
        Detrend::GaussianKernel { bandwidth } => {
            if bandwidth <= 0.0 {
                return Err(Error::Invalid("bandwidth must be positive".into()));
            }
            let smooth = gaussian_smooth(values, bandwidth);
            values.iter().zip(&smooth).map(|(v, s)| v - s).collect()
        }
    };

    let mut stamps = Vec::new();
    let mut var = Vec::new();
    let mut ac1 = Vec::new();
    let mut skew = Vec::new();
    let mut kurt = Vec::new();
    let mut start = 0usize;
    while start + spec.window <= data.len() {
        let w = &data[start..start + spec.window];
        stamps.push(times[start + spec.window - 1]);
        let m = moments(w);
        var.push(Some(m.variance));
        ac1.push(lag1_autocorrelation(w));
        if m.variance > 0.0 {
            skew.push(Some(m.m3 / m.variance.powf(1.5)));
            kurt.push(Some(m.m4 / (m.variance * m.variance) - 3.0));
        } else {
            skew.push(None);
            kurt.push(None);
        }
        start += spec.stride;
    }
    let series = |id: &str, values: Vec<Option<f64>>| IndicatorSeries {
        id: id.into(),
        times: stamps.clone(),
        values,
    };
    Ok(RollingStats {
        variance: series("variance", var),
        ac1: series("ac1", ac1),
        skewness: series("skewness", skew),
        kurtosis: series("excess_kurtosis", kurt),
    })
}

struct Moments {
    variance: f64,
    m3: f64,
    m4: f64,
}

fn moments(w: &[f64]) -> Moments {
    let n = w.len() as f64;
    let mean = w.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for &x in w {
        let d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    Moments { variance: m2 / n, m3: m3 / n, m4: m4 / n }
}

/// Lag-1 sample autocorrelation; None for (numerically) constant windows.
pub fn lag1_autocorrelation(w: &[f64]) -> Option<f64> {
    let n = w.len();
    let mean = w.iter().sum::<f64>() / n as f64;
    let denom: f64 = w.iter().map(|x| (x - mean) * (x - mean)).sum();
    let scale: f64 = w.iter().map(|x| x * x).sum::<f64>().max(1.0);
    if denom <= 1e-15 * scale {
        return None;
    }
    let num: f64 = w.windows(2).map(|p| (p[0] - mean) * (p[1] - mean)).sum();
    Some(num / denom)
}

fn gaussian_smooth(values: &[f64], bandwidth: f64) -> Vec<f64> {
    let n = values.len();
    let half = (3.0 * bandwidth).ceil() as i64;
    let weights: Vec<f64> = (-half..=half)
        .map(|k| (-(k as f64 * k as f64) / (2.0 * bandwidth * bandwidth)).exp())
        .collect();
    (0..n as i64)
        .map(|i| {
            let mut num = 0.0;
            let mut den = 0.0;
            for (idx, w) in weights.iter().enumerate() {
                let j = i + idx as i64 - half;
                if j >= 0 && j < n as i64 {
                    num += w * values[j as usize];
                    den += w;
                }
            }
            num / den
        })
        .collect()
}

/// Kendall's tau: (concordant - discordant) / (M (M-1) / 2) over the
/// time-ordered sequence; ties count in neither class.
pub fn kendall_tau(values: &[f64]) -> Result<f64> {
    let m = values.len();
    if m < 2 {
        return Err(Error::Invalid("Kendall's tau needs at least 2 points".into()));
    }
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    for i in 0..m {
        for j in i + 1..m {
            if values[j] > values[i] {
                concordant += 1;
            } else if values[j] < values[i] {
                discordant += 1;
            }
        }
    }
    let pairs = (m * (m - 1) / 2) as f64;
    Ok((concordant - discordant) as f64 / pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kendall_tau_endpoints() {
        let inc: Vec<f64> = (0..50).map(|i| i as f64).collect();
        assert_eq!(kendall_tau(&inc).unwrap(), 1.0);
        let dec: Vec<f64> = (0..50).map(|i| -(i as f64)).collect();
        assert_eq!(kendall_tau(&dec).unwrap(), -1.0);
        let constant = vec![1.0; 30];
        assert_eq!(kendall_tau(&constant).unwrap(), 0.0);
        assert!(kendall_tau(&[1.0]).is_err());
    }

    #[test]
    fn constant_window_has_zero_variance_and_missing_ac1() {
        let times: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let values = vec![2.5; 20];
        let spec = RollingSpec { window: 10, stride: 5, detrend: Detrend::None };
        let stats = rolling_stats(&times, &values, &spec).unwrap();
        assert!(stats.variance.values.iter().all(|v| v == &Some(0.0)));
        assert!(stats.ac1.values.iter().all(|v| v.is_none()));
    }

    #[test]
    fn ar1_window_statistics_match_theory() {
        // exact AR(1) sampling of an OU process at unit lag: phi = e^{-k}
        use rand::prelude::*;
        use rand_distr::StandardNormal;
        let (k, d) = (1.0f64, 0.1f64);
        let phi = (-k).exp();
        let stat_var = d / k;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let n = 200_000;
        let mut x = 0.0;
        let innovation = (stat_var * (1.0 - phi * phi)).sqrt();
        let mut xs = Vec::with_capacity(n);
        for _ in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            x = phi * x + innovation * z;
            xs.push(x);
        }
        let times: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let spec = RollingSpec { window: n, stride: 1, detrend: Detrend::None };
        let stats = rolling_stats(&times, &xs, &spec).unwrap();
        let var = stats.variance.values[0].unwrap();
        let ac1 = stats.ac1.values[0].unwrap();
        assert!((var - stat_var).abs() / stat_var < 0.05, "var {var}");
        assert!((ac1 - phi).abs() < 0.02, "ac1 {ac1} vs {phi}");
    }

    #[test]
    fn detrending_removes_slow_drift() {
        // slow ramp plus small wiggle: detrended variance reflects the wiggle
        let n = 600;
        let times: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let values: Vec<f64> = (0..n)
            .map(|i| 0.01 * i as f64 + 0.05 * (i as f64 * 1.3).sin())
            .collect();
        let raw = rolling_stats(
            &times,
            &values,
            &RollingSpec { window: 200, stride: 100, detrend: Detrend::None },
        )
        .unwrap();
        let det = rolling_stats(
            &times,
            &values,
            &RollingSpec { window: 200, stride: 100, detrend: Detrend::GaussianKernel { bandwidth: 20.0 } },
        )
        .unwrap();
        let raw_var = raw.variance.values[2].unwrap();
        let det_var = det.variance.values[2].unwrap();
        assert!(det_var < 0.1 * raw_var, "detrended {det_var} vs raw {raw_var}");
        // the wiggle variance is about 0.05^2/2
        assert_relative_eq!(det_var, 0.00125, max_relative = 0.25);
    }

    #[test]
    fn variance_and_ac1_stay_in_range() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let xs: Vec<f64> = (0..64).map(|_| rng.random::<f64>() * 10.0 - 5.0).collect();
            let times: Vec<f64> = (0..64).map(|i| i as f64).collect();
            let stats = rolling_stats(
                &times,
                &xs,
                &RollingSpec { window: 16, stride: 8, detrend: Detrend::None },
            )
            .unwrap();
            for v in stats.variance.values.iter().flatten() {
                assert!(*v >= 0.0);
            }
            for a in stats.ac1.values.iter().flatten() {
                assert!((-1.0..=1.0).contains(a), "ac1 out of range: {a}");
            }
        }
    }
}
