//! Vertex-enumeration sign tests over the unit hypercube.
//!
//! `det(-B diag(Delta) C)` and the steady-state influence determinant are
//! multi-affine in the entries of Delta, so their extrema over the hypercube
//! are attained at the vertices: a sign over `(0, 1]^q` is certified from the
//! `2^q` vertex values plus strictness at the all-ones point; an exact zero
//! at a vertex only needs the weak inequality.

use super::bdc::BdcDecomposition;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Hard cap on the number of uncertain parameters for exhaustive vertex
/// enumeration (2^q blow-up); beyond it the sampling path applies.
pub const VERTEX_CAP: usize = 22;

/// Sign classification of det(-B Delta C) over Delta in (0,1]^q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetSign {
    Pos,
    Neg,
    Zero,
    Indeterminate,
}

/// Structural steady-state influence sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfluenceSign {
    Plus,
    Minus,
    Zero,
    Indeterminate,
}

impl fmt::Display for InfluenceSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            InfluenceSign::Plus => '+',
            InfluenceSign::Minus => '-',
            InfluenceSign::Zero => '0',
            InfluenceSign::Indeterminate => '?',
        };
        write!(f, "{c}")
    }
}

impl fmt::Display for DetSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DetSign::Pos => "pos",
            DetSign::Neg => "neg",
            DetSign::Zero => "zero",
            DetSign::Indeterminate => "indeterminate",
        };
        write!(f, "{s}")
    }
}

/// Outcome of scanning a multi-affine function over all hypercube vertices.
struct VertexScan {
    at_ones: f64,
    min: f64,
    max: f64,
    scale: f64,
}

/// Evaluate `value(delta)` at every vertex of {0,1}^q via Gray-code order.
fn scan_vertices<F: FnMut(&[f64]) -> f64>(q: usize, mut value: F) -> Result<VertexScan> {
    if q > VERTEX_CAP {
        return Err(Error::Refused(format!(
            "vertex enumeration needs 2^{q} evaluations (cap is q <= {VERTEX_CAP}); \
             use the sampling-based ISP path instead"
        )));
    }
    let mut delta = vec![0.0; q];
    let mut v = value(&delta);
    let mut scan = VertexScan { at_ones: f64::NAN, min: v, max: v, scale: v.abs().max(1.0) };
    if q == 0 {
        scan.at_ones = v;
        return Ok(scan);
    }
    let total: u64 = 1u64 << q;
    let mut prev_gray = 0u64;
    let mut ones = 0usize;
    for k in 1..total {
        let gray = k ^ (k >> 1);
        let flipped = (gray ^ prev_gray).trailing_zeros() as usize;
        prev_gray = gray;
        if delta[flipped] == 0.0 {
            delta[flipped] = 1.0;
            ones += 1;
        } else {
            delta[flipped] = 0.0;
            ones -= 1;
        }
        v = value(&delta);
        scan.min = scan.min.min(v);
        scan.max = scan.max.max(v);
        scan.scale = scan.scale.max(v.abs());
        if ones == q {
            scan.at_ones = v;
        }
    }
    Ok(scan)
}

fn classify(scan: &VertexScan) -> DetSign {
    let tol = 1e-9 * scan.scale;
    let pos = |v: f64| v > tol;
    let neg = |v: f64| v < -tol;
    if !pos(scan.max) && !neg(scan.min) {
        DetSign::Zero
    } else if pos(scan.at_ones) && !neg(scan.min) {
        DetSign::Pos
    } else if neg(scan.at_ones) && !pos(scan.max) {
        DetSign::Neg
    } else {
        DetSign::Indeterminate
    }
}

/// Classify the sign of det(-B Delta C) over Delta in (0,1]^q.
pub fn structural_det_sign(bdc: &BdcDecomposition) -> Result<DetSign> {
    let n = bdc.n();
    let scan = scan_vertices(bdc.q(), |delta| {
        let m = -bdc.assemble(delta);
        if n == 0 {
            1.0
        } else {
            m.determinant()
        }
    })?;
    Ok(classify(&scan))
}

/// Structural sign of the steady-state influence determinant
/// `I(Delta) = det [[-B Delta C, -E], [H, 0]]`.
///
/// Requires `structural_det_sign(bdc) == Pos` (the structural
/// non-singularity that makes the influence well defined); refuses otherwise.
pub fn steady_state_influence(
    bdc: &BdcDecomposition,
    e: &DVector<f64>,
    h: &DVector<f64>,
) -> Result<InfluenceSign> {
    match structural_det_sign(bdc)? {
        DetSign::Pos => {}
        other => {
            return Err(Error::Refused(format!(
                "steady-state influence is undefined unless det(-B Delta C) > 0 structurally \
                 (found {other:?})"
            )))
        }
    }
    influence_unchecked(bdc, e, h)
}

fn influence_unchecked(
    bdc: &BdcDecomposition,
    e: &DVector<f64>,
    h: &DVector<f64>,
) -> Result<InfluenceSign> {
    let n = bdc.n();
    if e.len() != n || h.len() != n {
        return Err(Error::Dimension("influence vectors must have length n".into()));
    }
    let scan = scan_vertices(bdc.q(), |delta| influence_det(bdc, delta, e, h))?;
    Ok(match classify(&scan) {
        DetSign::Pos => InfluenceSign::Plus,
        DetSign::Neg => InfluenceSign::Minus,
        DetSign::Zero => InfluenceSign::Zero,
        DetSign::Indeterminate => InfluenceSign::Indeterminate,
    })
}

fn influence_det(bdc: &BdcDecomposition, delta: &[f64], e: &DVector<f64>, h: &DVector<f64>) -> f64 {
    let n = bdc.n();
    let core = -bdc.assemble(delta);
    let mut m = DMatrix::zeros(n + 1, n + 1);
    m.view_mut((0, 0), (n, n)).copy_from(&core);
    for i in 0..n {
        m[(i, n)] = -e[i];
        m[(n, i)] = h[i];
    }
    m.determinant()
}

/// Structural steady-state influence matrix: entry (i, j) is the sign of the
/// steady-state response of variable i to a persistent positive input on the
/// equation of variable j, over all admissible parameter values.
pub fn ssim(bdc: &BdcDecomposition) -> Result<Vec<Vec<InfluenceSign>>> {
    match structural_det_sign(bdc)? {
        DetSign::Pos => {}
        other => {
            return Err(Error::Refused(format!(
                "SSIM is undefined unless det(-B Delta C) > 0 structurally (found {other:?})"
            )))
        }
    }
    let n = bdc.n();
    let mut out = vec![vec![InfluenceSign::Zero; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut e = DVector::zeros(n);
            e[j] = 1.0;
            let mut h = DVector::zeros(n);
            h[i] = 1.0;
            out[i][j] = influence_unchecked(bdc, &e, &h)?;
        }
    }
    Ok(out)
}

/// Dense-sampling oracle for the determinant sign: classify from `n_samples`
/// uniform draws of Delta in (0,1]^q plus all hypercube vertices.
pub fn sampled_det_sign(bdc: &BdcDecomposition, n_samples: usize, seed: u64) -> DetSign {
    sampled_sign(bdc.q(), n_samples, seed, |delta| {
        (-bdc.assemble(delta)).determinant()
    })
}

/// Dense-sampling oracle for the influence sign.
pub fn sampled_influence_sign(
    bdc: &BdcDecomposition,
    e: &DVector<f64>,
    h: &DVector<f64>,
    n_samples: usize,
    seed: u64,
) -> InfluenceSign {
    match sampled_sign(bdc.q(), n_samples, seed, |delta| influence_det(bdc, delta, e, h)) {
        DetSign::Pos => InfluenceSign::Plus,
        DetSign::Neg => InfluenceSign::Minus,
        DetSign::Zero => InfluenceSign::Zero,
        DetSign::Indeterminate => InfluenceSign::Indeterminate,
    }
}

fn sampled_sign<F: FnMut(&[f64]) -> f64>(
    q: usize,
    n_samples: usize,
    seed: u64,
    mut value: F,
) -> DetSign {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut scale: f64 = 1.0;
    let mut delta = vec![0.0; q];
    // interior samples
    for _ in 0..n_samples {
        for d in delta.iter_mut() {
            *d = rng.random::<f64>().max(f64::MIN_POSITIVE);
        }
        let v = value(&delta);
        min = min.min(v);
        max = max.max(v);
        scale = scale.max(v.abs());
    }
    let at_ones = value(&vec![1.0; q]);
    scale = scale.max(at_ones.abs());
    // vertices (extremes of a multi-affine function live here)
    let mut vmin = at_ones;
    let mut vmax = at_ones;
    if q <= 20 {
        for k in 0..(1u64 << q) {
            for (h, d) in delta.iter_mut().enumerate() {
                *d = ((k >> h) & 1) as f64;
            }
            let v = value(&delta);
            vmin = vmin.min(v);
            vmax = vmax.max(v);
            scale = scale.max(v.abs());
        }
    }
    let tol = 1e-9 * scale;
    let any_pos = max > tol || vmax > tol;
    let any_neg = min < -tol || vmin < -tol;
    if !any_pos && !any_neg {
        DetSign::Zero
    } else if at_ones > tol && !any_neg {
        DetSign::Pos
    } else if at_ones < -tol && !any_pos {
        DetSign::Neg
    } else {
        DetSign::Indeterminate
    }
}
