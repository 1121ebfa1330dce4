//! General compartmental epidemic model
//! `w' = G w - diag(C x) w + D x + a`, `x' = F x + b w^T C x`
//! cast into reaction-network form term by term.

use super::{Coef, NetworkModel, RateLaw, Reaction, Species};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;

/// Matrices of the general compartmental model; `w` collects the non-infected
/// compartments (n2 of them) and `x` the infected compartments (n1).
#[derive(Debug, Clone)]
pub struct CompartmentalSpec {
    pub g: DMatrix<f64>,
    pub f: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub a: DVector<f64>,
    pub b: DVector<f64>,
    pub w_names: Option<Vec<String>>,
    pub x_names: Option<Vec<String>>,
}

impl CompartmentalSpec {
    pub fn validate(&self) -> Result<(usize, usize)> {
        let n2 = self.g.nrows();
        let n1 = self.f.nrows();
        if self.g.ncols() != n2 || self.f.ncols() != n1 {
            return Err(Error::Dimension("G and F must be square".into()));
        }
        if self.c.shape() != (n2, n1) || self.d.shape() != (n2, n1) {
            return Err(Error::Dimension(format!(
                "C and D must be {n2}x{n1}, got {:?} and {:?}",
                self.c.shape(),
                self.d.shape()
            )));
        }
        if self.a.len() != n2 || self.b.len() != n1 {
            return Err(Error::Dimension("a must have length n2 and b length n1".into()));
        }
        for (m, name) in [(&self.g, "G"), (&self.f, "F")] {
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    if i != j && m[(i, j)] < 0.0 {
                        return Err(Error::Invalid(format!("{name} must be Metzler")));
                    }
                }
            }
        }
        if self.c.iter().any(|&v| v < 0.0) || self.d.iter().any(|&v| v < 0.0) {
            return Err(Error::Invalid("C and D must be nonnegative".into()));
        }
        if self.a.iter().any(|&v| v < 0.0) || self.b.iter().any(|&v| v < 0.0) {
            return Err(Error::Invalid("a and b must be nonnegative".into()));
        }
        Ok((n2, n1))
    }
}

/// Build the reaction-network form of a compartmental model. State order is
/// (w_1..w_n2, x_1..x_n1).
pub fn build_compartmental(spec: &CompartmentalSpec) -> Result<NetworkModel> {
    let (n2, n1) = spec.validate()?;
    let mut species = Vec::with_capacity(n2 + n1);
    for i in 0..n2 {
        let id = spec
            .w_names
            .as_ref()
            .map(|v| v[i].clone())
            .unwrap_or_else(|| format!("w{}", i + 1));
        species.push(Species::new(id));
    }
    for i in 0..n1 {
        let id = spec
            .x_names
            .as_ref()
            .map(|v| v[i].clone())
            .unwrap_or_else(|| format!("x{}", i + 1));
        species.push(Species::new(id));
    }
    let w = |i: usize| i;
    let x = |k: usize| n2 + k;

    let mut reactions = Vec::new();
    let push_linear = |m: &DMatrix<f64>, idx: &dyn Fn(usize) -> usize, tag: &str, reactions: &mut Vec<Reaction>| {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v == 0.0 {
                    continue;
                }
                if i == j {
                    let (reagents, products) = if v > 0.0 {
                        (vec![(idx(i), 1)], vec![(idx(i), 2)])
                    } else {
                        (vec![(idx(i), 1)], vec![])
                    };
                    reactions.push(Reaction {
                        name: Some(format!("{tag}_{i}{i}")),
                        reagents,
                        products,
                        rate: RateLaw::MassAction { kappa: Coef::constant(v.abs()) },
                    });
                } else {
                    // Metzler off-diagonal: catalytic production of i by j.
                    reactions.push(Reaction {
                        name: Some(format!("{tag}_{i}{j}")),
                        reagents: vec![(idx(j), 1)],
                        products: vec![(idx(j), 1), (idx(i), 1)],
                        rate: RateLaw::MassAction { kappa: Coef::constant(v) },
                    });
                }
            }
        }
    };
    push_linear(&spec.g, &w, "G", &mut reactions);
    push_linear(&spec.f, &x, "F", &mut reactions);

    // -diag(Cx) w: contagion depletes w_i at rate C_ik w_i x_k.
    for i in 0..n2 {
        for k in 0..n1 {
            let cik = spec.c[(i, k)];
            if cik == 0.0 {
                continue;
            }
            let mut reagents = vec![(w(i), 1), (x(k), 1)];
            reagents.sort_by_key(|&(s, _)| s);
            reactions.push(Reaction {
                name: Some(format!("C_{i}{k}")),
                reagents,
                products: vec![(x(k), 1)],
                rate: RateLaw::MassAction { kappa: Coef::constant(cik) },
            });
            // b_l w^T C x: new infections enter compartment l.
            for l in 0..n1 {
                let rate = spec.b[l] * cik;
                if rate == 0.0 {
                    continue;
                }
                let mut reagents = vec![(w(i), 1), (x(k), 1)];
                reagents.sort_by_key(|&(s, _)| s);
                let mut products: BTreeMap<usize, u32> = BTreeMap::new();
                *products.entry(w(i)).or_insert(0) += 1;
                *products.entry(x(k)).or_insert(0) += 1;
                *products.entry(x(l)).or_insert(0) += 1;
                reactions.push(Reaction {
                    name: Some(format!("infect_{i}{k}to{l}")),
                    reagents,
                    products: products.into_iter().collect(),
                    rate: RateLaw::MassAction { kappa: Coef::constant(rate) },
                });
            }
        }
    }

    // D x: recovery flows into non-infected compartments.
    for i in 0..n2 {
        for k in 0..n1 {
            let dik = spec.d[(i, k)];
            if dik == 0.0 {
                continue;
            }
            reactions.push(Reaction {
                name: Some(format!("D_{i}{k}")),
                reagents: vec![(x(k), 1)],
                products: vec![(x(k), 1), (w(i), 1)],
                rate: RateLaw::MassAction { kappa: Coef::constant(dik) },
            });
        }
    }

    let mut influx = Vec::new();
    for i in 0..n2 {
        if spec.a[i] != 0.0 {
            influx.push((w(i), Coef::constant(spec.a[i])));
        }
    }
    NetworkModel::new(species, reactions, influx, BTreeMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{dmatrix, dvector};

    fn field(spec: &CompartmentalSpec, state: &[f64]) -> DVector<f64> {
        let m = build_compartmental(spec).unwrap();
        m.vector_field(&DVector::from_row_slice(state), None).unwrap()
    }

    /// Reference implementation of the compartmental vector field.
    fn reference(spec: &CompartmentalSpec, state: &[f64]) -> DVector<f64> {
        let n2 = spec.g.nrows();
        let n1 = spec.f.nrows();
        let wv = DVector::from_row_slice(&state[..n2]);
        let xv = DVector::from_row_slice(&state[n2..]);
        let cx = &spec.c * &xv;
        let dw = &spec.g * &wv - cx.component_mul(&wv) + &spec.d * &xv + &spec.a;
        let dx = &spec.f * &xv + &spec.b * (wv.transpose() * &spec.c * &xv)[(0, 0)];
        let mut out = DVector::zeros(n2 + n1);
        out.rows_mut(0, n2).copy_from(&dw);
        out.rows_mut(n2, n1).copy_from(&dx);
        out
    }

    #[test]
    fn sis_special_case() {
        // w = S, x = I, G = 0, C = beta, D = gamma, a = 0, F = -gamma, b = 1.
        let (beta, gamma) = (0.7, 0.25);
        let spec = CompartmentalSpec {
            g: dmatrix![0.0],
            f: dmatrix![-gamma],
            c: dmatrix![beta],
            d: dmatrix![gamma],
            a: dvector![0.0],
            b: dvector![1.0],
            w_names: Some(vec!["S".into()]),
            x_names: Some(vec!["I".into()]),
        };
        let f = field(&spec, &[0.8, 0.2]);
        assert_relative_eq!(f[0], -beta * 0.8 * 0.2 + gamma * 0.2, epsilon = 1e-14);
        assert_relative_eq!(f[1], beta * 0.8 * 0.2 - gamma * 0.2, epsilon = 1e-14);
    }

    #[test]
    fn sirv_cast_matches_reference_field() {
        // Extended SIRV in compartmental form: x = I, w = [S R V].
        let (psi, u, chi1, chi2, beta, pi1, pi2, gamma) = (0.3, 0.2, 0.1, 0.05, 0.9, 0.4, 0.2, 0.5);
        let (mu_s, mu_i, mu_r, mu_v) = (0.01, 0.02, 0.03, 0.04);
        let spec = CompartmentalSpec {
            g: dmatrix![-u - mu_s, chi1, chi2; 0.0, -chi1 - mu_r, 0.0; u, 0.0, -chi2 - mu_v],
            f: dmatrix![-gamma - mu_i],
            c: dmatrix![beta; pi1 * beta; pi2 * beta],
            d: dmatrix![0.0; gamma; 0.0],
            a: dvector![psi, 0.0, 0.0],
            b: dvector![1.0],
            w_names: None,
            x_names: None,
        };
        let state = [0.55, 0.2, 0.1, 0.15];
        let got = field(&spec, &state);
        let want = reference(&spec, &state);
        for i in 0..4 {
            assert_relative_eq!(got[i], want[i], epsilon = 1e-13);
        }
        // and against the hand-written SIRV equations
        let (s, r, v, i) = (0.55, 0.2, 0.1, 0.15);
        assert_relative_eq!(
            got[0],
            psi - u * s + chi1 * r - beta * s * i + chi2 * v - mu_s * s,
            epsilon = 1e-13
        );
        assert_relative_eq!(
            got[3],
            beta * s * i - gamma * i + pi1 * beta * r * i + pi2 * beta * v * i - mu_i * i,
            epsilon = 1e-13
        );
    }

    #[test]
    fn zero_spec_has_null_dynamics() {
        let spec = CompartmentalSpec {
            g: DMatrix::zeros(2, 2),
            f: DMatrix::zeros(1, 1),
            c: DMatrix::zeros(2, 1),
            d: DMatrix::zeros(2, 1),
            a: DVector::zeros(2),
            b: DVector::zeros(1),
            w_names: None,
            x_names: None,
        };
        let f = field(&spec, &[0.3, 0.3, 0.4]);
        assert_eq!(f.amax(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let spec = CompartmentalSpec {
            g: DMatrix::zeros(2, 2),
            f: DMatrix::zeros(1, 1),
            c: DMatrix::zeros(1, 1), // wrong: must be 2x1
            d: DMatrix::zeros(2, 1),
            a: DVector::zeros(2),
            b: DVector::zeros(1),
            w_names: None,
            x_names: None,
        };
        assert!(matches!(build_compartmental(&spec), Err(Error::Dimension(_))));
    }

    #[test]
    fn seirv_cast_matches_reference_field() {
        let (psi, u, chi1, chi2, beta, pi1, pi2, rho, gamma) =
            (0.1, 0.2, 0.15, 0.05, 0.8, 0.3, 0.1, 0.6, 0.4);
        let (mu_s, mu_e, mu_i, mu_r, mu_v) = (0.01, 0.02, 0.03, 0.04, 0.05);
        let spec = CompartmentalSpec {
            g: dmatrix![-u - mu_s, chi1, chi2; 0.0, -chi1 - mu_r, 0.0; u, 0.0, -chi2 - mu_v],
            f: dmatrix![-rho - mu_e, 0.0; rho, -gamma - mu_i],
            c: dmatrix![0.0, beta; 0.0, pi1 * beta; 0.0, pi2 * beta],
            d: dmatrix![0.0, 0.0; 0.0, gamma; 0.0, 0.0],
            a: dvector![psi, 0.0, 0.0],
            b: dvector![1.0, 0.0],
            w_names: None,
            x_names: None,
        };
        let state = [0.5, 0.15, 0.1, 0.15, 0.1];
        let got = field(&spec, &state);
        let want = reference(&spec, &state);
        for i in 0..5 {
            assert_relative_eq!(got[i], want[i], epsilon = 1e-13);
        }
    }
}
