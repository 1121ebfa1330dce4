//! Cycle enumeration on the signed Jacobian graph, the candidate
//! oscillator / multistationary classification, and cooperativity checks.
//!
//! A system with sign-definite Jacobian is a strong candidate oscillator iff
//! every directed cycle in its signal graph is negative, and a strong
//! candidate multistationary system iff every cycle is positive. Self-loops
//! (diagonal entries) are excluded from the classification, matching the
//! signal-graph convention in which negative self-loops are not drawn.

use crate::error::{Error, Result};
use crate::model::{SignEntry, SignPattern};

/// Cap on the number of enumerated simple cycles.
const CYCLE_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleClass {
    StrongCandidateOscillator,
    StrongCandidateMultistationary,
    Mixed,
    Acyclic,
}

#[derive(Debug, Clone)]
pub struct CycleReport {
    pub class: CycleClass,
    pub n_positive: usize,
    pub n_negative: usize,
    /// Thomas necessary conditions: a positive cycle is necessary for
    /// multistationarity, a negative cycle for sustained oscillations.
    pub multistationarity_possible: bool,
    pub oscillations_possible: bool,
    /// Cycles as vertex lists (without the closing vertex), with their signs.
    pub cycles: Vec<(Vec<usize>, SignEntry)>,
}

/// Johnson-style enumeration of directed simple cycles (self-loops excluded).
///
/// Each cycle starts at its minimal vertex; refuses past `cap` cycles.
pub fn simple_cycles(adj: &[Vec<usize>], cap: usize) -> Result<Vec<Vec<usize>>> {
    let n = adj.len();
    let mut cycles = Vec::new();
    // Search from each start vertex s, restricted to vertices >= s: every
    // simple cycle is found exactly once, rooted at its minimal vertex.
    for s in 0..n {
        let mut path = vec![s];
        let mut on_path = vec![false; n];
        on_path[s] = true;
        // stack of iterators by index
        let mut iter_stack: Vec<usize> = vec![0];
        while !path.is_empty() {
            let v = *path.last().unwrap();
            let i = iter_stack.last_mut().unwrap();
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if w == s && path.len() >= 2 {
                    cycles.push(path.clone());
                    if cycles.len() > cap {
                        return Err(Error::Refused(format!(
                            "more than {cap} simple cycles"
                        )));
                    }
                } else if w > s && !on_path[w] {
                    path.push(w);
                    on_path[w] = true;
                    iter_stack.push(0);
                }
            } else {
                path.pop();
                on_path[v] = false;
                iter_stack.pop();
            }
        }
    }
    Ok(cycles)
}

/// Classify a sign pattern by the signs of its directed cycles.
pub fn cycle_classification(sigma: &SignPattern) -> Result<CycleReport> {
    let n = sigma.n;
    // edge j -> i whenever Sigma_ij != 0 (x_j influences x_i'), i != j
    let mut adj = vec![Vec::new(); n];
    for j in 0..n {
        for i in 0..n {
            if i != j && sigma.get(i, j) != SignEntry::Zero {
                adj[j].push(i);
            }
        }
    }
    let raw = simple_cycles(&adj, CYCLE_CAP)?;
    let mut cycles = Vec::with_capacity(raw.len());
    let (mut n_pos, mut n_neg) = (0usize, 0usize);
    for cyc in raw {
        let mut sign = SignEntry::Plus;
        for k in 0..cyc.len() {
            let from = cyc[k];
            let to = cyc[(k + 1) % cyc.len()];
            if sigma.get(to, from) == SignEntry::Minus {
                sign = sign.negate();
            }
        }
        match sign {
            SignEntry::Plus => n_pos += 1,
            SignEntry::Minus => n_neg += 1,
            SignEntry::Zero => unreachable!(),
        }
        cycles.push((cyc, sign));
    }
    let class = match (n_pos, n_neg) {
        (0, 0) => CycleClass::Acyclic,
        (0, _) => CycleClass::StrongCandidateOscillator,
        (_, 0) => CycleClass::StrongCandidateMultistationary,
        _ => CycleClass::Mixed,
    };
    Ok(CycleReport {
        class,
        n_positive: n_pos,
        n_negative: n_neg,
        multistationarity_possible: n_pos > 0,
        oscillations_possible: n_neg > 0,
        cycles,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CooperativityReport {
    /// All off-diagonal entries in {0, +}: the Jacobian is Metzler and the
    /// system is cooperative (monotone).
    pub is_metzler_offdiag: bool,
    /// Sign-pattern match against the strongly 2-cooperative tridiagonal
    /// pattern (positive sub/super diagonals, negative corner pair, free
    /// diagonal) plus irreducibility. Requires n >= 3; false otherwise.
    pub is_strongly_2_cooperative: bool,
}

pub fn cooperativity_checks(sigma: &SignPattern) -> CooperativityReport {
    let n = sigma.n;
    let mut metzler = true;
    for i in 0..n {
        for j in 0..n {
            if i != j && sigma.get(i, j) == SignEntry::Minus {
                metzler = false;
            }
        }
    }
    let is_strongly_2_cooperative = n >= 3 && matches_s2c(sigma) && irreducible(sigma);
    CooperativityReport { is_metzler_offdiag: metzler, is_strongly_2_cooperative }
}

fn matches_s2c(sigma: &SignPattern) -> bool {
    let n = sigma.n;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue; // diagonal free
            }
            let e = sigma.get(i, j);
            let super_or_sub = j == i + 1 || i == j + 1;
            let corner = (i == 0 && j == n - 1) || (i == n - 1 && j == 0);
            if super_or_sub {
                if e == SignEntry::Minus {
                    return false;
                }
            } else if corner {
                if e == SignEntry::Plus {
                    return false;
                }
            } else if e != SignEntry::Zero {
                return false;
            }
        }
    }
    true
}

/// Irreducibility = strong connectivity of the nonzero-entry digraph.
fn irreducible(sigma: &SignPattern) -> bool {
    let n = sigma.n;
    if n == 0 {
        return false;
    }
    let mut adj = vec![Vec::new(); n];
    let mut radj = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && sigma.get(i, j) != SignEntry::Zero {
                adj[j].push(i);
                radj[i].push(j);
            }
        }
    }
    let reach = |adj: &Vec<Vec<usize>>| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().all(|&b| b)
    };
    reach(&adj) && reach(&radj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin;
    use std::collections::BTreeMap;

    fn pattern_of(name: &str) -> SignPattern {
        builtin(name, &BTreeMap::new()).unwrap().jacobian_sign_pattern().unwrap()
    }

    #[test]
    fn repressilator_is_strong_candidate_oscillator() {
        let report = cycle_classification(&pattern_of("repressilator")).unwrap();
        assert_eq!(report.class, CycleClass::StrongCandidateOscillator);
        assert_eq!(report.n_negative, 1); // a single negative cycle
        assert_eq!(report.n_positive, 0);
        assert!(report.oscillations_possible);
        assert!(!report.multistationarity_possible);
    }

    #[test]
    fn promotilator_is_strong_candidate_multistationary() {
        let report = cycle_classification(&pattern_of("promotilator")).unwrap();
        assert_eq!(report.class, CycleClass::StrongCandidateMultistationary);
        assert_eq!(report.n_positive, 1); // a single positive cycle
        assert!(report.multistationarity_possible);
    }

    #[test]
    fn diagonal_pattern_is_acyclic() {
        use SignEntry::*;
        let sigma = SignPattern::from_rows(&[&[Minus, Zero], &[Zero, Minus]]);
        let report = cycle_classification(&sigma).unwrap();
        assert_eq!(report.class, CycleClass::Acyclic);
    }

    #[test]
    fn iffl_has_no_cycles_besides_self_loops() {
        let report = cycle_classification(&pattern_of("iffl")).unwrap();
        assert_eq!(report.class, CycleClass::Acyclic);
    }

    #[test]
    fn two_species_feedback_loops() {
        use SignEntry::*;
        // negative feedback: one negative 2-cycle
        let nf = SignPattern::from_rows(&[&[Minus, Minus], &[Plus, Minus]]);
        let r = cycle_classification(&nf).unwrap();
        assert_eq!(r.class, CycleClass::StrongCandidateOscillator);
        // mutual activation: one positive 2-cycle
        let ma = SignPattern::from_rows(&[&[Minus, Plus], &[Plus, Minus]]);
        let r = cycle_classification(&ma).unwrap();
        assert_eq!(r.class, CycleClass::StrongCandidateMultistationary);
    }

    #[test]
    fn simple_cycles_counts_complete_digraph() {
        // K3 directed both ways: cycles = 3 two-cycles + 2 three-cycles.
        let adj = vec![vec![1, 2], vec![0, 2], vec![0, 1]];
        let cycles = simple_cycles(&adj, 1000).unwrap();
        assert_eq!(cycles.len(), 5);
    }

    #[test]
    fn cycle_cap_refuses() {
        // complete digraph on 8 vertices has far more than 30 simple cycles
        let n = 8;
        let adj: Vec<Vec<usize>> =
            (0..n).map(|i| (0..n).filter(|&j| j != i).collect()).collect();
        assert!(matches!(simple_cycles(&adj, 30), Err(Error::Refused(_))));
    }

    #[test]
    fn promotilator_is_metzler_repressilator_is_not() {
        assert!(cooperativity_checks(&pattern_of("promotilator")).is_metzler_offdiag);
        assert!(!cooperativity_checks(&pattern_of("repressilator")).is_metzler_offdiag);
    }

    #[test]
    fn literal_s2c_pattern_is_strongly_2_cooperative() {
        use SignEntry::*;
        let sigma = SignPattern::from_rows(&[
            &[Minus, Plus, Zero, Minus],
            &[Plus, Minus, Plus, Zero],
            &[Zero, Plus, Minus, Plus],
            &[Minus, Zero, Plus, Minus],
        ]);
        let r = cooperativity_checks(&sigma);
        assert!(r.is_strongly_2_cooperative);
        // repressilator corners/subdiagonals are negative: not 2-cooperative
        assert!(!cooperativity_checks(&pattern_of("repressilator")).is_strongly_2_cooperative);
    }
}
