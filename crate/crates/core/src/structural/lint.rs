//! Structural positivity lint.
//!
//! By Nagumo's condition, `x' = S g(x) + g0` is structurally positive when
//! g0 >= 0 and every reaction that consumes species i has a rate that depends
//! on x_i and vanishes at x_i = 0 (the species is one of its reagents).

use crate::error::Result;
use crate::model::{NetworkModel, SignEntry};

#[derive(Debug, Clone)]
pub struct PositivityFinding {
    pub reaction: usize,
    pub reaction_name: String,
    pub species: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct PositivityReport {
    pub passes: bool,
    pub influx_nonnegative: bool,
    pub findings: Vec<PositivityFinding>,
}

pub fn positivity_lint(model: &NetworkModel) -> Result<PositivityReport> {
    let env = model.env(None);
    let mut findings = Vec::new();

    let mut influx_nonnegative = true;
    for (i, coef) in model.influx() {
        match coef.sign(&env) {
            Some(SignEntry::Plus) | Some(SignEntry::Zero) => {}
            _ => {
                influx_nonnegative = false;
                findings.push(PositivityFinding {
                    reaction: usize::MAX,
                    reaction_name: "(influx)".into(),
                    species: model.species()[*i].id.clone(),
                    reason: "influx coefficient is not nonnegative over the parameter box".into(),
                });
            }
        }
    }

    for (j, r) in model.reactions().iter().enumerate() {
        let name = r.name.clone().unwrap_or_else(|| format!("reaction {}", j + 1));
        let deps: Vec<usize> = model.rate_dependencies(j).iter().map(|&(i, _)| i).collect();
        for (i, v) in r.net_stoich() {
            if v >= 0 {
                continue;
            }
            let species = model.species()[i].id.clone();
            if !deps.contains(&i) {
                findings.push(PositivityFinding {
                    reaction: j,
                    reaction_name: name.clone(),
                    species,
                    reason: "rate does not depend on the consumed species".into(),
                });
            } else if !model.rate_vanishes_at_zero(j, i) {
                findings.push(PositivityFinding {
                    reaction: j,
                    reaction_name: name.clone(),
                    species,
                    reason: "rate does not vanish when the consumed species is zero".into(),
                });
            }
        }
    }

    Ok(PositivityReport { passes: influx_nonnegative && findings.is_empty(), influx_nonnegative, findings })
}
