//! Welch power spectral density and the spectral reddening ratio.

use crate::error::{Error, Result};
use rustfft::{num_complex::Complex, FftPlanner};

/// Two-sided power spectral density in angular frequency, reported on the
/// nonnegative half-axis: integrating S over all omega recovers the series
/// variance (Parseval).
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub s: Vec<f64>,
    pub nyquist: f64,
    pub d_omega: f64,
}

impl Spectrum {
    /// Total power: integral of the two-sided density over all frequencies.
    pub fn total_power(&self) -> f64 {
        let mut acc = 0.0;
        for (k, s) in self.s.iter().enumerate() {
            // interior bins appear at +omega and -omega
            let weight = if k == 0 || k == self.s.len() - 1 { 1.0 } else { 2.0 };
            acc += weight * s * self.d_omega;
        }
        acc
    }
}

/// Welch periodogram: Hann-tapered segments of length `segment`, 50% overlap,
/// sampled at spacing `dt`. Averages an ensemble of series when several are
/// supplied.
pub fn psd(series: &[Vec<f64>], dt: f64, segment: usize) -> Result<Spectrum> {
    if series.is_empty() || series[0].len() < 64 {
        return Err(Error::Invalid("PSD needs at least one series of length >= 64".into()));
    }
    if dt <= 0.0 {
        return Err(Error::Invalid("dt must be positive".into()));
    }
    let seg = segment.min(series.iter().map(|s| s.len()).min().unwrap()).max(16);
    let hop = seg / 2;
    let window: Vec<f64> = (0..seg)
        .map(|j| {
            0.5 * (1.0
                - (2.0 * std::f64::consts::PI * j as f64 / (seg as f64 - 1.0)).cos())
        })
        .collect();
    let u: f64 = window.iter().map(|w| w * w).sum::<f64>() / seg as f64;

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(seg);
    let half = seg / 2;
    let mut acc = vec![0.0f64; half + 1];
    let mut count = 0usize;
    let mut buf: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); seg];
    for s in series {
        let mut start = 0;
        while start + seg <= s.len() {
            let chunk = &s[start..start + seg];
            let mean = chunk.iter().sum::<f64>() / seg as f64;
            for (j, b) in buf.iter_mut().enumerate() {
                *b = Complex::new((chunk[j] - mean) * window[j], 0.0);
            }
            fft.process(&mut buf);
            for (k, a) in acc.iter_mut().enumerate() {
                *a += buf[k].norm_sqr();
            }
            count += 1;
            start += hop;
        }
    }
    if count == 0 {
        return Err(Error::Invalid("series shorter than one segment".into()));
    }
    // two-sided density in angular frequency: S = dt |X|^2 / (2 pi L U)
    let norm = dt / (2.0 * std::f64::consts::PI * seg as f64 * u) / count as f64;
    let d_omega = 2.0 * std::f64::consts::PI / (seg as f64 * dt);
    let omega: Vec<f64> = (0..=half).map(|k| k as f64 * d_omega).collect();
    let s: Vec<f64> = acc.iter().map(|a| a * norm).collect();
    let nyquist = std::f64::consts::PI / dt;
    Ok(Spectrum { omega, s, nyquist, d_omega })
}

/// Low-band power divided by high-band power around `split` (rad/time).
pub fn reddening_ratio(spectrum: &Spectrum, split: f64) -> Result<f64> {
    if !(split > 0.0 && split < spectrum.nyquist) {
        return Err(Error::Invalid(format!(
            "split frequency must lie in (0, {}), got {split}",
            spectrum.nyquist
        )));
    }
    let mut low = 0.0;
    let mut high = 0.0;
    for (w, s) in spectrum.omega.iter().zip(&spectrum.s) {
        if *w <= split {
            low += s * spectrum.d_omega;
        } else {
            high += s * spectrum.d_omega;
        }
    }
    if high == 0.0 {
        return Err(Error::Numerical("no power above the split frequency".into()));
    }
    Ok(low / high)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sde::{ou_exact, simulate, NoiseSpec, DomainPolicy, Scheme};
    use nalgebra::DVector;

    fn simulate_ou(k: f64, d: f64, dt: f64, t: f64, subsample: usize, seed_stream: u64) -> Vec<f64> {
        let src = format!("X -> 0 @ k*X; k = {k}");
        let m = crate::model::parse_crn(&src).unwrap();
        let spec = NoiseSpec {
            lambda: (2.0 * d).sqrt(),
            gate: None,
            domain_policy: DomainPolicy::Allow,
        };
        let tr = simulate(
            &m,
            None,
            &spec,
            &DVector::from_vec(vec![0.0]),
            dt,
            t,
            Scheme::EulerMaruyama,
            2026,
            seed_stream,
            subsample,
        )
        .unwrap();
        tr.states.iter().map(|s| s[0]).collect()
    }

    #[test]
    fn pure_sinusoid_peaks_at_its_frequency() {
        let dt = 0.05;
        let omega0 = 3.0;
        let n = 8192;
        let xs: Vec<f64> = (0..n).map(|i| (omega0 * i as f64 * dt).sin()).collect();
        let sp = psd(&[xs], dt, 1024).unwrap();
        let peak = sp
            .s
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!((sp.omega[peak] - omega0).abs() < 2.0 * sp.d_omega);
    }

    #[test]
    fn parseval_total_power_matches_variance() {
        let xs = simulate_ou(1.0, 0.1, 0.01, 4000.0, 10, 0);
        let burn = 100;
        let data = xs[burn..].to_vec();
        let mean = data.iter().sum::<f64>() / data.len() as f64;
        let var = data.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / data.len() as f64;
        let sp = psd(&[data], 0.1, 2048).unwrap();
        let power = sp.total_power();
        assert!(
            (power - var).abs() / var < 0.02,
            "power {power} vs variance {var}"
        );
    }

    #[test]
    fn ou_spectrum_fits_lorentzian_after_averaging() {
        let (k, d) = (1.0, 0.1);
        let dt_sample = 0.1;
        let runs: Vec<Vec<f64>> = (0..50)
            .map(|r| {
                let xs = simulate_ou(k, d, 0.01, 450.0, 10, r as u64);
                xs[100..].to_vec()
            })
            .collect();
        let sp = psd(&runs, dt_sample, 1024).unwrap();
        let exact = ou_exact(k, d, 1.0, 0.0).unwrap();
        // relative L2 error below 10% on a band well inside Nyquist
        let mut num = 0.0;
        let mut den = 0.0;
        for (w, s) in sp.omega.iter().zip(&sp.s) {
            if *w > 0.0 && *w <= 6.0 {
                let t = exact.spectral_density(*w);
                num += (s - t) * (s - t);
                den += t * t;
            }
        }
        let rel = (num / den).sqrt();
        assert!(rel < 0.10, "relative L2 error {rel}");
    }

    #[test]
    fn reddening_increases_as_k_drops() {
        let mut prev = 0.0;
        for (i, k) in [1.0, 0.5, 0.25].into_iter().enumerate() {
            let xs = simulate_ou(k, 0.1, 0.01, 2000.0, 10, 100 + i as u64);
            let sp = psd(&[xs[100..].to_vec()], 0.1, 1024).unwrap();
            let ratio = reddening_ratio(&sp, 0.1 * sp.nyquist).unwrap();
            assert!(ratio > prev, "k = {k}: ratio {ratio} <= {prev}");
            prev = ratio;
        }
    }

    #[test]
    fn split_outside_nyquist_is_rejected() {
        let xs = simulate_ou(1.0, 0.1, 0.01, 200.0, 10, 7);
        let sp = psd(&[xs], 0.1, 256).unwrap();
        assert!(reddening_ratio(&sp, sp.nyquist * 1.1).is_err());
        assert!(reddening_ratio(&sp, 0.0).is_err());
    }
}
