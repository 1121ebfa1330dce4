//! Stochastic simulation: Euler-Maruyama and Milstein schemes driven by
//! per-trajectory counter-based random streams, the smooth noise-gating
//! function that switches the noise off on the attractor, and exact
//! Ornstein-Uhlenbeck reference moments.

use crate::error::{Error, Result};
use crate::model::NetworkModel;
use nalgebra::DVector;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::collections::BTreeMap;

/// Attractor reference for gating and distance queries.
#[derive(Debug, Clone)]
pub enum Attractor {
    Point(DVector<f64>),
    PointSet(Vec<DVector<f64>>),
}

impl Attractor {
    /// Sup-norm distance from `x` to the attractor.
    pub fn distance(&self, x: &DVector<f64>) -> f64 {
        match self {
            Attractor::Point(p) => (x - p).amax(),
            Attractor::PointSet(ps) => ps
                .iter()
                .map(|p| (x - p).amax())
                .fold(f64::INFINITY, f64::min),
        }
    }
}

/// Smooth bump piece: l(x) = theta(x) / (theta(x) + theta(1 - x)) with
/// theta(x) = exp(-1/x) for x > 0 and 0 otherwise. C-infinity, 0 for x <= 0,
/// 1 for x >= 1.
pub fn bump(x: f64) -> f64 {
    let t = theta(x);
    let t1 = theta(1.0 - x);
    if t == 0.0 {
        return 0.0;
    }
    if t1 == 0.0 {
        return 1.0;
    }
    t / (t + t1)
}

fn theta(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Derivative of [`bump`].
fn bump_deriv(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let t = theta(x);
    let t1 = theta(1.0 - x);
    let tp = t / (x * x);
    let t1p = -t1 / ((1.0 - x) * (1.0 - x));
    // d/dx [t / (t + t1)] = (t' t1 - t t1') / (t + t1)^2
    (tp * t1 - t * t1p) / ((t + t1) * (t + t1))
}

/// Scalar gate on a single coordinate: 0 within distance `phi` of the target
/// value, 1 beyond `2 phi`, smooth and monotone in between.
pub fn gate_1d(x: f64, target: f64, phi: f64) -> f64 {
    bump(((x - target).abs() - phi) / phi)
}

fn gate_1d_deriv(x: f64, target: f64, phi: f64) -> f64 {
    let d = x - target;
    bump_deriv((d.abs() - phi) / phi) * d.signum() / phi
}

/// Noise specification: intensity, optional smooth gate, and the policy for
/// states leaving the nonnegative domain.
#[derive(Debug, Clone)]
pub struct NoiseSpec {
    pub lambda: f64,
    pub gate: Option<Gate>,
    pub domain_policy: DomainPolicy,
}

#[derive(Debug, Clone)]
pub struct Gate {
    pub attractor: Attractor,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainPolicy {
    /// Clamp negative coordinates to zero and count the events.
    ClampToZero,
    /// Abort the trajectory, flagging it.
    AbortWithFlag,
    /// Leave the state untouched (for models defined on all of R^n).
    Allow,
}

impl NoiseSpec {
    pub fn deterministic() -> Self {
        NoiseSpec { lambda: 0.0, gate: None, domain_policy: DomainPolicy::Allow }
    }
    pub fn ungated(lambda: f64) -> Self {
        NoiseSpec { lambda, gate: None, domain_policy: DomainPolicy::ClampToZero }
    }
    pub fn gated(lambda: f64, attractor: Attractor, phi: f64) -> Result<Self> {
        if phi <= 0.0 {
            return Err(Error::Invalid("gate radius phi must be positive".into()));
        }
        Ok(NoiseSpec {
            lambda,
            gate: Some(Gate { attractor, phi }),
            domain_policy: DomainPolicy::ClampToZero,
        })
    }

    /// Multiplicative gate weight at `x`: the product of per-coordinate gates
    /// for point attractors (exactly 0 while any coordinate sits in its inner
    /// band, exactly 1 once all coordinates clear the outer band), or the
    /// scalar bump of the set distance for point sets.
    pub fn gate_weight(&self, x: &DVector<f64>) -> f64 {
        match &self.gate {
            None => 1.0,
            Some(g) => match &g.attractor {
                Attractor::Point(p) => {
                    let mut w = 1.0;
                    for i in 0..x.len() {
                        w *= gate_1d(x[i], p[i], g.phi);
                        if w == 0.0 {
                            return 0.0;
                        }
                    }
                    w
                }
                Attractor::PointSet(_) => bump((g.attractor.distance(x) - g.phi) / g.phi),
            },
        }
    }

    /// Partial derivative of the gate weight w.r.t. coordinate `i` (product
    /// form only; used by the Milstein correction).
    fn gate_weight_partial(&self, x: &DVector<f64>, i: usize, weight: f64) -> f64 {
        match &self.gate {
            None => 0.0,
            Some(g) => match &g.attractor {
                Attractor::Point(p) => {
                    let wi = gate_1d(x[i], p[i], g.phi);
                    if wi == 0.0 {
                        let mut rest = 1.0;
                        for k in 0..x.len() {
                            if k != i {
                                rest *= gate_1d(x[k], p[k], g.phi);
                            }
                        }
                        return gate_1d_deriv(x[i], p[i], g.phi) * rest;
                    }
                    weight / wi * gate_1d_deriv(x[i], p[i], g.phi)
                }
                Attractor::PointSet(_) => 0.0, // kept piecewise-constant for sets
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    EulerMaruyama,
    Milstein,
}

impl Scheme {
    pub fn from_name(s: &str) -> Result<Self> {
        Ok(match s {
            "euler_maruyama" | "em" => Scheme::EulerMaruyama,
            "milstein" => Scheme::Milstein,
            other => return Err(Error::Invalid(format!("unknown scheme `{other}`"))),
        })
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::EulerMaruyama => write!(f, "euler_maruyama"),
            Scheme::Milstein => write!(f, "milstein"),
        }
    }
}

/// A simulated path (recorded at `record_stride` steps).
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub seed: u64,
    pub stream: u64,
    pub scheme: Scheme,
    pub dt: f64,
    pub clamped_steps: u64,
    pub aborted: bool,
}

/// Per-trajectory random stream: one ChaCha8 generator per (master seed,
/// stream index) pair, so ensembles are reproducible path-by-path and
/// independent of worker count.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Simulate one trajectory, recording every `record_stride`-th step.
#[allow(clippy::too_many_arguments)]
pub fn simulate(
    model: &NetworkModel,
    overrides: Option<&BTreeMap<String, f64>>,
    noise: &NoiseSpec,
    x0: &DVector<f64>,
    dt: f64,
    t_final: f64,
    scheme: Scheme,
    master_seed: u64,
    stream: u64,
    record_stride: usize,
) -> Result<Trajectory> {
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        seed: master_seed,
        stream,
        scheme,
        dt,
        clamped_steps: 0,
        aborted: false,
    };
    let stride = record_stride.max(1);
    let total_steps = (t_final / dt).round() as usize;
    let mut recorder = |step: usize, t: f64, x: &DVector<f64>| {
        if step % stride == 0 || step == total_steps {
            traj.times.push(t);
            traj.states.push(x.clone());
        }
    };
    let (clamped, aborted) = simulate_with(
        model, overrides, noise, x0, dt, t_final, scheme, master_seed, stream, &mut recorder,
    )?;
    traj.clamped_steps = clamped;
    traj.aborted = aborted;
    Ok(traj)
}

/// Streaming core shared by [`simulate`] and the resilience estimators: the
/// observer sees every step including the initial state. Returns the number
/// of clamped steps and an abort flag.
#[allow(clippy::too_many_arguments)]
pub fn simulate_with<O: FnMut(usize, f64, &DVector<f64>)>(
    model: &NetworkModel,
    overrides: Option<&BTreeMap<String, f64>>,
    noise: &NoiseSpec,
    x0: &DVector<f64>,
    dt: f64,
    t_final: f64,
    scheme: Scheme,
    master_seed: u64,
    stream: u64,
    observer: &mut O,
) -> Result<(u64, bool)> {
    if dt <= 0.0 || t_final < dt {
        return Err(Error::Invalid("need dt > 0 and t_final >= dt".into()));
    }
    let n = model.n_species();
    if x0.len() != n {
        return Err(Error::Dimension("x0 has wrong dimension".into()));
    }
    let steps = (t_final / dt).round() as usize;
    let mut x = x0.clone();
    let mut clamped = 0u64;
    observer(0, 0.0, &x);

    let deterministic = noise.lambda == 0.0;
    let mut rng = stream_rng(master_seed, stream);
    let sqrt_dt = dt.sqrt();

    for step in 1..=steps {
        let drift = model.vector_field(&x, overrides)?;
        if deterministic {
            // bit-for-bit equal to fixed-step explicit Euler
            x += dt * drift;
        } else {
            let weight = noise.gate_weight(&x);
            let b = noise.lambda * weight;
            let mut next = &x + dt * drift;
            for i in 0..n {
                let z: f64 = rng.sample(StandardNormal);
                let dw = sqrt_dt * z;
                next[i] += b * dw;
                if scheme == Scheme::Milstein && b != 0.0 {
                    // diagonal Milstein correction with b_i(x) = lambda w(x)
                    let dbi = noise.lambda * noise.gate_weight_partial(&x, i, weight);
                    next[i] += 0.5 * b * dbi * (dw * dw - dt);
                }
            }
            x = next;
        }
        // domain policy for nonnegative-state semantics
        let mut negative = false;
        for i in 0..n {
            if x[i] < 0.0 {
                negative = true;
                if noise.domain_policy == DomainPolicy::ClampToZero {
                    x[i] = 0.0;
                }
            }
        }
        if negative {
            match noise.domain_policy {
                DomainPolicy::ClampToZero => clamped += 1,
                DomainPolicy::AbortWithFlag => {
                    observer(step, step as f64 * dt, &x);
                    return Ok((clamped, true));
                }
                DomainPolicy::Allow => {}
            }
        }
        observer(step, step as f64 * dt, &x);
    }
    Ok((clamped, false))
}

/// Closed-form Ornstein-Uhlenbeck moments for `dy = -k y dt + sqrt(2 D) dW`.
#[derive(Debug, Clone, Copy)]
pub struct OuMoments {
    pub mean: f64,
    pub variance: f64,
    pub stationary_variance: f64,
    k: f64,
    d: f64,
}

impl OuMoments {
    /// Stationary covariance at time lag `tau`: (D/k) e^{-k |tau|}.
    pub fn stationary_covariance(&self, tau: f64) -> f64 {
        self.stationary_variance * (-self.k * tau.abs()).exp()
    }
    /// Stationary power spectral density D / (pi (k^2 + w^2)).
    pub fn spectral_density(&self, omega: f64) -> f64 {
        self.d / (std::f64::consts::PI * (self.k * self.k + omega * omega))
    }
}

pub fn ou_exact(k: f64, d: f64, t: f64, y0: f64) -> Result<OuMoments> {
    if k <= 0.0 {
        return Err(Error::Invalid("OU drift rate k must be positive".into()));
    }
    if d < 0.0 {
        return Err(Error::Invalid("OU diffusion D must be nonnegative".into()));
    }
    Ok(OuMoments {
        mean: y0 * (-k * t).exp(),
        variance: d / k * (1.0 - (-2.0 * k * t).exp()),
        stationary_variance: d / k,
        k,
        d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin;
    use approx::assert_relative_eq;

    #[test]
    fn gate_support_is_exact() {
        let x3 = 1.4633;
        let phi = 1e-4;
        assert_eq!(gate_1d(x3, x3, phi), 0.0);
        assert_eq!(gate_1d(x3 + 0.9 * phi, x3, phi), 0.0);
        assert_eq!(gate_1d(x3 + 3.0 * phi, x3, phi), 1.0);
        assert_eq!(gate_1d(x3 - 2.0 * phi, x3, phi), 1.0);
        let mid = gate_1d(x3 + 1.5 * phi, x3, phi);
        assert!(mid > 0.0 && mid < 1.0);
        // monotone in the distance over the transition band
        let mut prev = -1.0;
        for k in 0..50 {
            let d = phi + (k as f64 / 49.0) * phi;
            let w = gate_1d(x3 + d, x3, phi);
            assert!(w >= prev);
            prev = w;
        }
        // midpoint of the band: l(1/2) = 1/2 by symmetry of the bump
        assert_relative_eq!(gate_1d(x3 + 1.5 * phi, x3, phi), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn multidim_gate_is_coordinate_product() {
        let p = DVector::from_vec(vec![1.0, 2.0]);
        let spec = NoiseSpec::gated(1.0, Attractor::Point(p), 0.1).unwrap();
        let x = DVector::from_vec(vec![1.15, 2.15]);
        let w = spec.gate_weight(&x);
        assert_relative_eq!(
            w,
            gate_1d(1.15, 1.0, 0.1) * gate_1d(2.15, 2.0, 0.1),
            epsilon = 1e-15
        );
        let x = DVector::from_vec(vec![1.05, 5.0]);
        assert_eq!(spec.gate_weight(&x), 0.0);
        let x = DVector::from_vec(vec![1.5, 2.5]);
        assert_eq!(spec.gate_weight(&x), 1.0);
    }

    #[test]
    fn lambda_zero_equals_deterministic_euler_bitwise() {
        let m = builtin("gene_regulation", &BTreeMap::new()).unwrap();
        let x0 = DVector::from_vec(vec![0.9]);
        let traj = simulate(
            &m,
            None,
            &NoiseSpec::deterministic(),
            &x0,
            1e-3,
            2.0,
            Scheme::EulerMaruyama,
            7,
            0,
            1,
        )
        .unwrap();
        let mut x = x0.clone();
        for _ in 0..2000usize {
            let f = m.vector_field(&x, None).unwrap();
            x += 1e-3 * f;
        }
        assert_eq!(traj.states.last().unwrap()[0].to_bits(), x[0].to_bits());
    }

    #[test]
    fn deterministic_gene_trajectories_converge_to_upper_equilibrium() {
        let m = builtin("gene_regulation", &BTreeMap::new()).unwrap();
        let x3 = 1.4633;
        for &x0 in &[x3 - 0.8, x3 - 0.3, x3 + 0.4, x3 + 0.8] {
            let traj = simulate(
                &m,
                None,
                &NoiseSpec::deterministic(),
                &DVector::from_vec(vec![x0]),
                1e-3,
                40.0,
                Scheme::EulerMaruyama,
                1,
                0,
                1000,
            )
            .unwrap();
            let last = traj.states.last().unwrap()[0];
            assert!((last - x3).abs() < 1e-3, "from {x0}: ended at {last}");
        }
    }

    #[test]
    fn seed_determinism_across_runs() {
        let m = builtin("gene_regulation", &BTreeMap::new()).unwrap();
        let x0 = DVector::from_vec(vec![1.2]);
        let spec = NoiseSpec::ungated(0.3);
        let run = || {
            simulate(&m, None, &spec, &x0, 1e-3, 1.0, Scheme::Milstein, 42, 5, 1)
                .unwrap()
                .states
                .last()
                .unwrap()[0]
        };
        assert_eq!(run().to_bits(), run().to_bits());
        let other = simulate(&m, None, &spec, &x0, 1e-3, 1.0, Scheme::Milstein, 42, 6, 1)
            .unwrap()
            .states
            .last()
            .unwrap()[0];
        assert_ne!(run().to_bits(), other.to_bits());
    }

    #[test]
    fn additive_noise_milstein_equals_euler_maruyama() {
        let m = builtin("gene_regulation", &BTreeMap::new()).unwrap();
        let x0 = DVector::from_vec(vec![1.2]);
        let spec = NoiseSpec::ungated(0.2); // constant diffusion: correction vanishes
        let a = simulate(&m, None, &spec, &x0, 1e-3, 1.0, Scheme::EulerMaruyama, 9, 3, 1).unwrap();
        let b = simulate(&m, None, &spec, &x0, 1e-3, 1.0, Scheme::Milstein, 9, 3, 1).unwrap();
        for (xa, xb) in a.states.iter().zip(&b.states) {
            assert_eq!(xa[0].to_bits(), xb[0].to_bits());
        }
    }

    #[test]
    fn ou_ensemble_mean_matches_exact_solution() {
        let m = crate::model::parse_crn("X -> 0 @ k*X; k = 1").unwrap();
        let (k, d, y0) = (1.0f64, 0.1f64, 2.0f64);
        let lambda = (2.0 * d).sqrt();
        let spec = NoiseSpec { lambda, gate: None, domain_policy: DomainPolicy::Allow };
        let n_paths = 400;
        let t = 1.0;
        let mut sum = 0.0;
        for s in 0..n_paths {
            let tr = simulate(
                &m,
                None,
                &spec,
                &DVector::from_vec(vec![y0]),
                1e-3,
                t,
                Scheme::EulerMaruyama,
                11,
                s as u64,
                1000,
            )
            .unwrap();
            sum += tr.states.last().unwrap()[0];
        }
        let mean = sum / n_paths as f64;
        let exact = ou_exact(k, d, t, y0).unwrap();
        let stderr = (exact.variance / n_paths as f64).sqrt();
        assert!(
            (mean - exact.mean).abs() < 3.0 * stderr,
            "mean {mean} vs {} (3se = {})",
            exact.mean,
            3.0 * stderr
        );
    }

    #[test]
    fn deterministic_convergence_order_under_dt_halving() {
        let m = builtin("gene_regulation", &BTreeMap::new()).unwrap();
        let x0 = DVector::from_vec(vec![0.9]);
        let run = |dt: f64| {
            simulate(
                &m,
                None,
                &NoiseSpec::deterministic(),
                &x0,
                dt,
                1.0,
                Scheme::EulerMaruyama,
                1,
                0,
                usize::MAX,
            )
            .unwrap()
            .states
            .last()
            .unwrap()[0]
        };
        let reference = run(1e-5);
        let e1 = (run(4e-3) - reference).abs();
        let e2 = (run(2e-3) - reference).abs();
        let ratio = e1 / e2;
        assert!((1.6..2.4).contains(&ratio), "Euler order-1 ratio was {ratio}");
    }

    #[test]
    fn ou_exact_closed_forms() {
        let m = ou_exact(1.0, 0.1, 0.0, 3.0).unwrap();
        assert_eq!(m.variance, 0.0);
        assert_eq!(m.mean, 3.0);
        let m = ou_exact(1.0, 0.1, 1e9, 3.0).unwrap();
        assert_relative_eq!(m.variance, 0.1, epsilon = 1e-12);
        assert_relative_eq!(m.stationary_covariance(1.0), 0.1 * (-1.0f64).exp(), epsilon = 1e-15);
        assert!(ou_exact(0.0, 0.1, 1.0, 0.0).is_err());
        assert!(ou_exact(-1.0, 0.1, 1.0, 0.0).is_err());
    }

    #[test]
    fn ou_empirical_stationary_variance() {
        for (k, d) in [(1.0f64, 0.1f64), (0.5, 0.2)] {
            let model_src = format!("X -> 0 @ k*X; k = {k}");
            let m = crate::model::parse_crn(&model_src).unwrap();
            let spec = NoiseSpec {
                lambda: (2.0 * d).sqrt(),
                gate: None,
                domain_policy: DomainPolicy::Allow,
            };
            let dt = 1e-2;
            let tr = simulate(
                &m,
                None,
                &spec,
                &DVector::from_vec(vec![0.0]),
                dt,
                1010.0,
                Scheme::EulerMaruyama,
                123,
                0,
                1,
            )
            .unwrap();
            let burn = (10.0 / dt) as usize;
            let xs: Vec<f64> = tr.states[burn..].iter().map(|s| s[0]).collect();
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / xs.len() as f64;
            let target = d / k;
            assert!(
                (var - target).abs() / target < 0.05,
                "k={k} D={d}: stationary variance {var} vs {target}"
            );
        }
    }

    #[test]
    fn abort_policy_flags_negative_states() {
        let m = crate::model::parse_crn("X -> 0 @ k*X; k = 1").unwrap();
        let spec = NoiseSpec { lambda: 1.0, gate: None, domain_policy: DomainPolicy::AbortWithFlag };
        let tr = simulate(
            &m,
            None,
            &spec,
            &DVector::from_vec(vec![0.01]),
            1e-3,
            5.0,
            Scheme::EulerMaruyama,
            3,
            0,
            1,
        )
        .unwrap();
        assert!(tr.aborted);
        let spec = NoiseSpec::ungated(1.0);
        let tr = simulate(
            &m,
            None,
            &spec,
            &DVector::from_vec(vec![0.01]),
            1e-3,
            5.0,
            Scheme::EulerMaruyama,
            3,
            0,
            1,
        )
        .unwrap();
        assert!(!tr.aborted);
        assert!(tr.clamped_steps > 0);
        assert!(tr.states.iter().all(|s| s[0] >= 0.0));
    }
}
