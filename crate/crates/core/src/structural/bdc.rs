//! BDC and EDF decompositions of the system Jacobian.
//!
//! For `x' = S g(x) + g0` with sign-definite partial derivatives, the
//! Jacobian factors as `J = B diag(Delta) C` with constant B, C: one column
//! `B_h = S_j` and one row `C_h = sign * e_i^T` per nonzero `dg_j/dx_i`,
//! and `Delta_h = |dg_j/dx_i| > 0` unknown. In reaction-rate coordinates the
//! Jacobian `(dg/dx) S` factors as `E diag(Delta) F` with `F` rows drawn from
//! the rows of S; `C B = F E` holds exactly.

use crate::error::{Error, Result};
use crate::model::{NetworkModel, Sign, SignEntry};
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;

/// Which partial derivative a diagonal entry stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaLabel {
    pub reaction: usize,
    pub species: usize,
    pub display: String,
}

/// Jacobian structure carrier `J = B diag(Delta) C`.
#[derive(Debug, Clone)]
pub struct BdcDecomposition {
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub labels: Vec<DeltaLabel>,
    /// Bounds for each Delta entry; defaults to (0, +inf).
    pub bounds: Vec<(f64, f64)>,
}

impl BdcDecomposition {
    pub fn q(&self) -> usize {
        self.labels.len()
    }
    pub fn n(&self) -> usize {
        self.b.nrows()
    }

    /// Assemble B diag(delta) C.
    pub fn assemble(&self, delta: &[f64]) -> DMatrix<f64> {
        assert_eq!(delta.len(), self.q());
        let mut scaled = self.b.clone();
        for (h, &d) in delta.iter().enumerate() {
            scaled.column_mut(h).scale_mut(d);
        }
        &scaled * &self.c
    }

    /// Construct directly from B and C (for hand-built structures).
    pub fn from_matrices(b: DMatrix<f64>, c: DMatrix<f64>) -> Result<Self> {
        if b.ncols() != c.nrows() {
            return Err(Error::Dimension("B columns must match C rows".into()));
        }
        let q = b.ncols();
        let labels = (0..q)
            .map(|h| DeltaLabel { reaction: h, species: h, display: format!("D{}", h + 1) })
            .collect();
        Ok(BdcDecomposition { b, c, labels, bounds: vec![(0.0, f64::INFINITY); q] })
    }
}

/// Jacobian structure in reaction-rate coordinates `J_r = E diag(Delta) F`.
#[derive(Debug, Clone)]
pub struct EdfDecomposition {
    pub e: DMatrix<f64>,
    pub f: DMatrix<f64>,
    pub labels: Vec<DeltaLabel>,
}

/// Signed dependency list per reaction, requiring sign-definiteness of the
/// rate scale coefficient over the parameter box.
fn signed_dependencies(model: &NetworkModel) -> Result<Vec<Vec<(usize, Sign)>>> {
    let env = model.env(None);
    let mut out = Vec::with_capacity(model.n_reactions());
    for (j, r) in model.reactions().iter().enumerate() {
        let coef = match &r.rate {
            crate::model::RateLaw::MassAction { kappa }
            | crate::model::RateLaw::Monomial { kappa, .. } => Some(kappa),
            crate::model::RateLaw::Hill { amplitude, .. }
            | crate::model::RateLaw::MichaelisMenten { amplitude, .. } => Some(amplitude),
            crate::model::RateLaw::OpaqueMonotone { .. } => None,
        };
        let flip = match coef {
            None => false,
            Some(c) => match c.sign(&env) {
                Some(SignEntry::Plus) => false,
                Some(SignEntry::Minus) => true,
                Some(SignEntry::Zero) | None => {
                    return Err(Error::NotSignDefinite {
                        reaction: r.name.clone().unwrap_or_else(|| format!("reaction {}", j + 1)),
                        species: "(rate coefficient)".into(),
                    })
                }
            },
        };
        let deps = model
            .rate_dependencies(j)
            .into_iter()
            .map(|(i, s)| (i, if flip { s.flip() } else { s }))
            .collect();
        out.push(deps);
    }
    Ok(out)
}

/// BDC decomposition with deterministic ordering: reaction-major,
/// species-minor.
pub fn bdc_decompose(model: &NetworkModel) -> Result<BdcDecomposition> {
    let deps = signed_dependencies(model)?;
    let s = model.stoichiometric_matrix();
    let n = model.n_species();
    let q: usize = deps.iter().map(|d| d.len()).sum();
    let mut b = DMatrix::zeros(n, q);
    let mut c = DMatrix::zeros(q, n);
    let mut labels = Vec::with_capacity(q);
    let mut h = 0;
    for (j, dj) in deps.iter().enumerate() {
        for &(i, sign) in dj {
            for row in 0..n {
                b[(row, h)] = s[(row, j)] as f64;
            }
            c[(h, i)] = sign.as_f64();
            let rname = model.reactions()[j]
                .name
                .clone()
                .unwrap_or_else(|| format!("g{}", j + 1));
            labels.push(DeltaLabel {
                reaction: j,
                species: i,
                display: format!("|d {rname} / d {}|", model.species()[i].id),
            });
            h += 1;
        }
    }
    Ok(BdcDecomposition { b, c, labels, bounds: vec![(0.0, f64::INFINITY); q] })
}

/// EDF decomposition with the same Delta ordering as [`bdc_decompose`].
///
/// The dependency sign is carried by the F row (the signed row of S); this
/// is the placement under which C B = F E holds exactly also for rates with
/// inhibiting dependencies. For reaction networks proper all partial
/// derivatives are positive and F rows are plain rows of S.
pub fn edf_decompose(model: &NetworkModel) -> Result<EdfDecomposition> {
    let deps = signed_dependencies(model)?;
    let s = model.stoichiometric_matrix();
    let m = model.n_reactions();
    let n = model.n_species();
    let q: usize = deps.iter().map(|d| d.len()).sum();
    let mut e = DMatrix::zeros(m, q);
    let mut f = DMatrix::zeros(q, n);
    let mut labels = Vec::with_capacity(q);
    let mut h = 0;
    for (j, dj) in deps.iter().enumerate() {
        for &(i, sign) in dj {
            e[(j, h)] = 1.0;
            for col in 0..n {
                f[(h, col)] = sign.as_f64() * s[(i, col)] as f64;
            }
            let rname = model.reactions()[j]
                .name
                .clone()
                .unwrap_or_else(|| format!("g{}", j + 1));
            labels.push(DeltaLabel {
                reaction: j,
                species: i,
                display: format!("|d {rname} / d {}|", model.species()[i].id),
            });
            h += 1;
        }
    }
    Ok(EdfDecomposition { e, f, labels })
}

/// Numeric Delta values `|dg_j/dx_i|` at a concrete state.
pub fn delta_at(
    model: &NetworkModel,
    bdc: &BdcDecomposition,
    x: &DVector<f64>,
    overrides: Option<&BTreeMap<String, f64>>,
) -> Result<Vec<f64>> {
    let env = model.env(overrides);
    bdc.labels
        .iter()
        .map(|l| Ok(model.rate_partial(l.reaction, l.species, x, &env)?.abs()))
        .collect()
}
