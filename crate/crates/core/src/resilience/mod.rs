//! Monte Carlo estimators for practical resilience, asymptotic practical
//! resilience, and the attraction time of an attractor under gated noise.
//!
//! All estimators report the worst case over sampled initial conditions: the
//! definitions quantify over a continuum of starting points, so a finite
//! sample under-approximates the worst case and no extrapolation is applied.

use crate::error::{Error, Result};
use crate::model::NetworkModel;
use crate::numeric::{clopper_pearson, Halton};
use crate::sde::{simulate_with, Attractor, NoiseSpec, Scheme};
use nalgebra::DVector;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Deterministic basin-membership test: integrate the noiseless system from
/// x0 and accept when the state ends within `tol` of the attractor.
#[derive(Debug, Clone, Copy)]
pub struct BasinTest {
    pub t_horizon: f64,
    pub dt: f64,
    pub tol: f64,
}

impl Default for BasinTest {
    fn default() -> Self {
        BasinTest { t_horizon: 200.0, dt: 1e-3, tol: 1e-2 }
    }
}

/// Simulation settings shared by the estimators.
#[derive(Debug, Clone)]
pub struct SimSettings {
    pub dt: f64,
    pub scheme: Scheme,
    pub seed: u64,
    /// Inner radius of the smooth noise gate around the attractor.
    pub gate_phi: f64,
    pub basin: BasinTest,
}

impl SimSettings {
    pub fn new(dt: f64, seed: u64) -> Self {
        SimSettings {
            dt,
            scheme: Scheme::Milstein,
            seed,
            gate_phi: 1e-4,
            basin: BasinTest::default(),
        }
    }

    fn noise(&self, lambda: f64, attractor: &Attractor) -> Result<NoiseSpec> {
        NoiseSpec::gated(lambda, attractor.clone(), self.gate_phi)
    }
}

#[derive(Debug, Clone)]
pub struct X0Breakdown {
    pub x0: DVector<f64>,
    pub successes: u64,
    pub n_real: u64,
    pub p: f64,
}

/// Worst-case-over-initial-conditions probability estimate.
#[derive(Debug, Clone)]
pub struct ResilienceEstimate {
    pub p_hat: f64,
    pub per_x0: Vec<X0Breakdown>,
    pub worst_x0: usize,
    /// Clopper-Pearson interval for the worst initial condition.
    pub ci: (f64, f64),
    pub ci_level: f64,
    pub n_ic: usize,
    pub n_real: usize,
    /// p_hat >= the requested confidence level.
    pub attained: bool,
}

fn make_estimate(per_x0: Vec<X0Breakdown>, requested: f64, ci_level: f64) -> ResilienceEstimate {
    let worst_x0 = per_x0
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.p.partial_cmp(&b.1.p).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let w = &per_x0[worst_x0];
    let ci = clopper_pearson(w.successes, w.n_real, ci_level);
    let p_hat = w.p;
    ResilienceEstimate {
        p_hat,
        worst_x0,
        ci,
        ci_level,
        n_ic: per_x0.len(),
        n_real: per_x0[0].n_real as usize,
        attained: p_hat >= requested,
        per_x0,
    }
}

/// Quasi-uniform initial conditions in the eps-ball around the attractor,
/// filtered by the deterministic basin test. Errors when the intersection
/// comes up empty.
pub fn sample_initial_conditions(
    model: &NetworkModel,
    overrides: Option<&BTreeMap<String, f64>>,
    attractor: &Attractor,
    eps: f64,
    n_ic: usize,
    settings: &SimSettings,
) -> Result<Vec<DVector<f64>>> {
    let n = model.n_species();
    let center = match attractor {
        Attractor::Point(p) => p.clone(),
        Attractor::PointSet(ps) => ps[0].clone(),
    };
    let candidates: Vec<DVector<f64>> = if n == 1 {
        // uniformly spaced across the interval, endpoints inset
        (0..n_ic)
            .map(|i| {
                let t = (i as f64 + 0.5) / n_ic as f64;
                DVector::from_vec(vec![center[0] - eps + 2.0 * eps * t])
            })
            .collect()
    } else {
        let mut halton = Halton::new(n);
        (0..n_ic)
            .map(|_| {
                let u = halton.next_point();
                DVector::from_fn(n, |i, _| center[i] - eps + 2.0 * eps * u[i])
            })
            .collect()
    };
    let deterministic = NoiseSpec::deterministic();
    let in_basin: Vec<DVector<f64>> = candidates
        .into_par_iter()
        .filter_map(|x0| {
            let mut last = x0.clone();
            let ok = simulate_with(
                model,
                overrides,
                &deterministic,
                &x0,
                settings.basin.dt,
                settings.basin.t_horizon,
                Scheme::EulerMaruyama,
                settings.seed,
                0,
                &mut |_, _, x| last.copy_from(x),
            )
            .is_ok();
            if ok && attractor.distance(&last) < settings.basin.tol {
                Some(x0)
            } else {
                None
            }
        })
        .collect();
    if in_basin.is_empty() {
        return Err(Error::Invalid(
            "no sampled initial condition lies in A_eps intersected with the basin".into(),
        ));
    }
    Ok(in_basin)
}

/// Per-path distance summaries used by all three estimators, simulated once
/// under common random numbers: stream index = x0_index * n_real + realization.
struct PathStats {
    /// Supremum of dist(x(t), A) over the whole horizon.
    sup_all: f64,
    /// Suffix suprema on the recorded time grid: suffix[k] = sup over t >= t_k.
    suffix_sup: Vec<f64>,
    /// Recorded time grid (shared across paths).
    grid: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
fn run_paths(
    model: &NetworkModel,
    overrides: Option<&BTreeMap<String, f64>>,
    attractor: &Attractor,
    lambda: f64,
    x0s: &[DVector<f64>],
    t_final: f64,
    n_real: usize,
    settings: &SimSettings,
    record_stride: usize,
) -> Result<Vec<Vec<PathStats>>> {
    let noise = settings.noise(lambda, attractor)?;
    let jobs: Vec<(usize, usize)> = (0..x0s.len())
        .flat_map(|a| (0..n_real).map(move |j| (a, j)))
        .collect();
    let stats: Result<Vec<PathStats>> = jobs
        .par_iter()
        .map(|&(a, j)| {
            let stream = (a * n_real + j) as u64;
            let mut dists: Vec<f64> = Vec::new();
            let mut grid: Vec<f64> = Vec::new();
            let mut sup_all = 0.0f64;
            simulate_with(
                model,
                overrides,
                &noise,
                &x0s[a],
                settings.dt,
                t_final,
                settings.scheme,
                settings.seed,
                stream,
                &mut |step, t, x| {
                    let d = attractor.distance(x);
                    sup_all = sup_all.max(d);
                    if step % record_stride == 0 {
                        dists.push(d);
                        grid.push(t);
                    }
                },
            )?;
            // suffix maxima over the recorded grid
            let mut suffix = dists.clone();
            for k in (0..suffix.len().saturating_sub(1)).rev() {
                suffix[k] = suffix[k].max(suffix[k + 1]);
            }
            Ok(PathStats { sup_all, suffix_sup: suffix, grid })
        })
        .collect();
    let stats = stats?;
    let mut out: Vec<Vec<PathStats>> = Vec::with_capacity(x0s.len());
    let mut it = stats.into_iter();
    for _ in 0..x0s.len() {
        out.push((&mut it).take(n_real).collect());
    }
    Ok(out)
}

/// Practical resilience: the probability that a path starting within eps of
/// the attractor stays within delta of it over [0, tau).
#[allow(clippy::too_many_arguments)]
pub fn estimate_practical_resilience(
    model: &NetworkModel,
    overrides: Option<&BTreeMap<String, f64>>,
    attractor: &Attractor,
    lambda: f64,
    tau: f64,
    gamma: f64,
    delta: f64,
    eps: f64,
    n_ic: usize,
    n_real: usize,
    settings: &SimSettings,
) -> Result<ResilienceEstimate> {
    if !(0.0..=delta).contains(&eps) {
        return Err(Error::Invalid("need 0 <= eps <= delta".into()));
    }
    let x0s = sample_initial_conditions(model, overrides, attractor, eps, n_ic, settings)?;
    let stride = usize::MAX; // only sup_all is needed
    let stats = run_paths(
        model, overrides, attractor, lambda, &x0s, tau, n_real, settings, stride,
    )?;
    let per_x0 = stats
        .iter()
        .zip(&x0s)
        .map(|(paths, x0)| {
            let successes = paths.iter().filter(|p| p.sup_all <= delta).count() as u64;
            X0Breakdown {
                x0: x0.clone(),
                successes,
                n_real: n_real as u64,
                p: successes as f64 / n_real as f64,
            }
        })
        .collect();
    Ok(make_estimate(per_x0, gamma, 0.95))
}

/// Asymptotic practical resilience with the limsup proxied by the supremum
/// over the tail window [T (1 - w), T].
#[allow(clippy::too_many_arguments)]
pub fn estimate_asymptotic_resilience(
    model: &NetworkModel,
    overrides: Option<&BTreeMap<String, f64>>,
    attractor: &Attractor,
    lambda: f64,
    delta: f64,
    horizon: f64,
    tail_fraction: f64,
    ic_radius: f64,
    n_ic: usize,
    n_real: usize,
    gamma: f64,
    settings: &SimSettings,
) -> Result<ResilienceEstimate> {
    if !(0.0 < tail_fraction && tail_fraction < 1.0) {
        return Err(Error::Invalid("tail fraction must lie in (0, 1)".into()));
    }
    let x0s = sample_initial_conditions(model, overrides, attractor, ic_radius, n_ic, settings)?;
    let steps = (horizon / settings.dt).round() as usize;
    let stride = (steps / 2000).max(1);
    let stats = run_paths(
        model, overrides, attractor, lambda, &x0s, horizon, n_real, settings, stride,
    )?;
    let t_tail = horizon * (1.0 - tail_fraction);
    let per_x0 = stats
        .iter()
        .zip(&x0s)
        .map(|(paths, x0)| {
            let successes = paths
                .iter()
                .filter(|p| {
                    let k = p.grid.partition_point(|&t| t < t_tail);
                    let k = k.min(p.suffix_sup.len() - 1);
                    p.suffix_sup[k] <= delta
                })
                .count() as u64;
            X0Breakdown {
                x0: x0.clone(),
                successes,
                n_real: n_real as u64,
                p: successes as f64 / n_real as f64,
            }
        })
        .collect();
    Ok(make_estimate(per_x0, gamma, 0.95))
}

/// Attraction time of one initial condition: smallest sampled tau with
/// P(sup_{t in [tau, T]} dist <= nu) >= mu, or None when not achieved.
#[derive(Debug, Clone)]
pub struct AttractionTime {
    pub x0: DVector<f64>,
    pub tau: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct AttractionTimeEstimate {
    pub per_x0: Vec<AttractionTime>,
    /// Largest attraction time over the sampled initial conditions; None when
    /// any initial condition failed to achieve it within the horizon.
    pub worst_case_tau: Option<f64>,
    pub achieved: bool,
    /// Result of the asymptotic-practical-resilience precondition run with
    /// confidence mu and distance nu on the same horizon.
    pub asymptotic_precondition: bool,
}

/// Estimate the attraction time for each supplied initial condition.
#[allow(clippy::too_many_arguments)]
pub fn estimate_attraction_time(
    model: &NetworkModel,
    overrides: Option<&BTreeMap<String, f64>>,
    attractor: &Attractor,
    lambda: f64,
    nu: f64,
    mu: f64,
    x0s: &[DVector<f64>],
    horizon: f64,
    n_real: usize,
    settings: &SimSettings,
) -> Result<AttractionTimeEstimate> {
    if !(0.0 < mu && mu <= 1.0) {
        return Err(Error::Invalid("mu must lie in (0, 1]".into()));
    }
    if x0s.is_empty() {
        return Err(Error::Invalid("need at least one initial condition".into()));
    }
    let steps = (horizon / settings.dt).round() as usize;
    let stride = (steps / 2500).max(1);
    let stats = run_paths(
        model, overrides, attractor, lambda, x0s, horizon, n_real, settings, stride,
    )?;
    // asymptotic precondition: tail-window sup within nu with prob >= mu
    let tail_k = |p: &PathStats| {
        let t_tail = horizon * 0.8;
        p.grid.partition_point(|&t| t < t_tail).min(p.suffix_sup.len() - 1)
    };
    let precondition = stats.iter().all(|paths| {
        let ok = paths.iter().filter(|p| p.suffix_sup[tail_k(p)] <= nu).count();
        ok as f64 / n_real as f64 >= mu
    });

    let need = (mu * n_real as f64).ceil() as usize;
    let mut per_x0 = Vec::with_capacity(x0s.len());
    for (paths, x0) in stats.iter().zip(x0s) {
        let grid = &paths[0].grid;
        let mut tau = None;
        for k in 0..grid.len() {
            let ok = paths.iter().filter(|p| p.suffix_sup[k] <= nu).count();
            if ok >= need {
                tau = Some(grid[k]);
                break;
            }
        }
        per_x0.push(AttractionTime { x0: x0.clone(), tau });
    }
    let achieved = per_x0.iter().all(|a| a.tau.is_some());
    let worst_case_tau = if achieved {
        per_x0.iter().map(|a| a.tau.unwrap()).fold(None, |acc: Option<f64>, t| {
            Some(acc.map_or(t, |a| a.max(t)))
        })
    } else {
        None
    };
    Ok(AttractionTimeEstimate { per_x0, worst_case_tau, achieved, asymptotic_precondition: precondition })
}

/// One cell of a (delta, lambda) resilience heatmap.
#[derive(Debug, Clone, Copy)]
pub struct GridCell {
    pub delta: f64,
    pub lambda: f64,
    pub p_hat: f64,
    /// Worst-case attraction time at nu = delta, mu = 1; None if not achieved.
    pub tau_worst: Option<f64>,
}

/// Heatmap over (delta, lambda) under common random numbers: one simulation
/// per (lambda, x0, realization), shared across all delta thresholds, so
/// p_hat is exactly nondecreasing in delta at fixed lambda.
#[allow(clippy::too_many_arguments)]
pub fn resilience_grid(
    model: &NetworkModel,
    overrides: Option<&BTreeMap<String, f64>>,
    attractor: &Attractor,
    deltas: &[f64],
    lambdas: &[f64],
    tau: f64,
    eps: f64,
    n_ic: usize,
    n_real: usize,
    settings: &SimSettings,
) -> Result<Vec<GridCell>> {
    let x0s = sample_initial_conditions(model, overrides, attractor, eps, n_ic, settings)?;
    let steps = (tau / settings.dt).round() as usize;
    let stride = (steps / 2000).max(1);
    let mut cells = Vec::with_capacity(deltas.len() * lambdas.len());
    for &lambda in lambdas {
        let stats = run_paths(
            model, overrides, attractor, lambda, &x0s, tau, n_real, settings, stride,
        )?;
        for &delta in deltas {
            let p_hat = stats
                .iter()
                .map(|paths| {
                    paths.iter().filter(|p| p.sup_all <= delta).count() as f64 / n_real as f64
                })
                .fold(f64::INFINITY, f64::min);
            // attraction time at nu = delta, mu = 1 on the same paths
            let mut worst: Option<f64> = Some(0.0);
            for paths in &stats {
                let grid = &paths[0].grid;
                let mut tau_x0 = None;
                for k in 0..grid.len() {
                    if paths.iter().all(|p| p.suffix_sup[k] <= delta) {
                        tau_x0 = Some(grid[k]);
                        break;
                    }
                }
                worst = match (worst, tau_x0) {
                    (Some(w), Some(t)) => Some(w.max(t)),
                    _ => None,
                };
            }
            cells.push(GridCell { delta, lambda, p_hat, tau_worst: worst });
        }
    }
    Ok(cells)
}
