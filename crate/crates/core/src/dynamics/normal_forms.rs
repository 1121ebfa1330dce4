//! Canonical bifurcation normal forms as network models.
//!
//! Each right-hand-side monomial becomes a production pseudo-reaction with a
//! (possibly signed) generalized mass-action rate; these models are
//! bifurcation surrogates, not positive reaction networks, and the positivity
//! lint rejects them accordingly.

use crate::error::{Error, Result};
use crate::model::{Coef, NetworkModel, ParamValue, RateLaw, Reaction, Species};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalFormKind {
    /// x' = p + x^2 (saddle-node); params: [p]
    Fold,
    /// x' = p x - x^2; params: [p]
    Transcritical,
    /// x' = p x + x^3; params: [p]
    PitchforkSubcritical,
    /// x' = p x - x^3; params: [p]
    PitchforkSupercritical,
    /// x' = a + b x - x^3; params: [a, b]
    Cusp,
    /// x1' = p x1 - x2 + l x1 (x1^2 + x2^2), x2' = x1 + p x2 + l x2 (...);
    /// params: [p, l] with l the first Lyapunov coefficient
    Hopf,
}

impl NormalFormKind {
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "fold" | "saddle_node" => NormalFormKind::Fold,
            "transcritical" => NormalFormKind::Transcritical,
            "pitchfork_sub" => NormalFormKind::PitchforkSubcritical,
            "pitchfork_super" => NormalFormKind::PitchforkSupercritical,
            "cusp" => NormalFormKind::Cusp,
            "hopf" => NormalFormKind::Hopf,
            other => return Err(Error::UnknownModel(format!("normal form `{other}`"))),
        })
    }
}

/// One production pseudo-reaction per monomial: target gains the monomial
/// `kappa * prod x^powers` (kappa carries the sign).
fn monomial(target: usize, kappa: Coef, powers: Vec<(usize, u32)>, name: &str) -> Reaction {
    Reaction {
        name: Some(name.into()),
        reagents: vec![],
        products: vec![(target, 1)],
        rate: RateLaw::Monomial { kappa, powers },
    }
}

/// Build the exact canonical vector field of a bifurcation normal form.
pub fn normal_form(kind: NormalFormKind, params: &[f64]) -> Result<NetworkModel> {
    let need = |n: usize| -> Result<()> {
        if params.len() != n {
            Err(Error::Invalid(format!("normal form expects {n} parameter(s), got {}", params.len())))
        } else {
            Ok(())
        }
    };
    match kind {
        NormalFormKind::Fold => {
            need(1)?;
            let p = params[0];
            let species = vec![Species::new("x")];
            let reactions = vec![monomial(0, Coef::constant(1.0), vec![(0, 2)], "quadratic")];
            let mut table = BTreeMap::new();
            table.insert("p".to_string(), ParamValue::Value(p));
            NetworkModel::new(species, reactions, vec![(0, Coef::param("p"))], table)
        }
        NormalFormKind::Transcritical => {
            need(1)?;
            build_1d(&[(params[0], vec![(0, 1)], "linear"), (-1.0, vec![(0, 2)], "quadratic")], params[0])
        }
        NormalFormKind::PitchforkSubcritical => {
            need(1)?;
            build_1d(&[(params[0], vec![(0, 1)], "linear"), (1.0, vec![(0, 3)], "cubic")], params[0])
        }
        NormalFormKind::PitchforkSupercritical => {
            need(1)?;
            build_1d(&[(params[0], vec![(0, 1)], "linear"), (-1.0, vec![(0, 3)], "cubic")], params[0])
        }
        NormalFormKind::Cusp => {
            need(2)?;
            let (a, b) = (params[0], params[1]);
            let species = vec![Species::new("x")];
            let reactions = vec![
                monomial(0, Coef::constant(b), vec![(0, 1)], "linear"),
                monomial(0, Coef::constant(-1.0), vec![(0, 3)], "cubic"),
            ];
            let mut table = BTreeMap::new();
            table.insert("a".to_string(), ParamValue::Value(a));
            table.insert("b".to_string(), ParamValue::Value(b));
            NetworkModel::new(species, reactions, vec![(0, Coef::param("a"))], table)
        }
        NormalFormKind::Hopf => {
            need(2)?;
            let (p, l) = (params[0], params[1]);
            let species = vec![Species::new("x1"), Species::new("x2")];
            let reactions = vec![
                monomial(0, Coef::constant(p), vec![(0, 1)], "p_x1"),
                monomial(0, Coef::constant(-1.0), vec![(1, 1)], "rot_x1"),
                monomial(0, Coef::constant(l), vec![(0, 3)], "cubic_x1a"),
                monomial(0, Coef::constant(l), vec![(0, 1), (1, 2)], "cubic_x1b"),
                monomial(1, Coef::constant(1.0), vec![(0, 1)], "rot_x2"),
                monomial(1, Coef::constant(p), vec![(1, 1)], "p_x2"),
                monomial(1, Coef::constant(l), vec![(0, 2), (1, 1)], "cubic_x2a"),
                monomial(1, Coef::constant(l), vec![(1, 3)], "cubic_x2b"),
            ];
            let mut table = BTreeMap::new();
            table.insert("p".to_string(), ParamValue::Value(p));
            table.insert("l".to_string(), ParamValue::Value(l));
            NetworkModel::new(species, reactions, vec![], table)
        }
    }
}

fn build_1d(terms: &[(f64, Vec<(usize, u32)>, &str)], p: f64) -> Result<NetworkModel> {
    let species = vec![Species::new("x")];
    let reactions = terms
        .iter()
        .map(|(k, powers, name)| monomial(0, Coef::constant(*k), powers.clone(), name))
        .collect();
    let mut table = BTreeMap::new();
    table.insert("p".to_string(), ParamValue::Value(p));
    NetworkModel::new(species, reactions, vec![], table)
}
