//! Built-in corpus of example systems.

use super::{Coef, HillSign, NetworkModel, ParamValue, RateLaw, Reaction, Species};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

pub fn builtin_names() -> &'static [&'static str] {
    &[
        "gene_regulation",
        "sis",
        "sir",
        "sir_demography",
        "sirv",
        "seirv",
        "sidarthe_v",
        "iffl",
        "repressilator",
        "promotilator",
        "lotka_volterra",
        "levin_segel",
    ]
}

/// Construct a built-in model. `params` overrides the documented defaults;
/// unknown parameter names are rejected.
///
/// Defaults: `gene_regulation(a=2, h=2, k=0.1)` (the bistable regime);
/// `levin_segel(a=d=e=0.5, b=c=1, D_u=1.4e-4, D_v=5e-3, N=21, L=1)`;
/// epidemic models use generic rates (beta=0.3, gamma=0.1, and unit-free
/// small defaults for vaccination/waning/mortality); the three-gene loops
/// use unit decay and Hill interactions (amp=5, h=2).
pub fn builtin(name: &str, params: &BTreeMap<String, f64>) -> Result<NetworkModel> {
    let builder: fn(&Params) -> Result<NetworkModel> = match name {
        "gene_regulation" => gene_regulation,
        "sis" => sis,
        "sir" => sir,
        "sir_demography" => sir_demography,
        "sirv" => sirv,
        "seirv" => seirv,
        "sidarthe_v" => sidarthe_v,
        "iffl" => iffl,
        "repressilator" => |p| ring_loop(p, HillSign::Inhibiting),
        "promotilator" => |p| ring_loop(p, HillSign::Activating),
        "lotka_volterra" => lotka_volterra,
        "levin_segel" => levin_segel,
        _ => return Err(Error::UnknownModel(name.into())),
    };
    let defaults = defaults_for(name);
    for k in params.keys() {
        if !defaults.contains_key(k.as_str()) {
            return Err(Error::UnknownParameter(format!("{k} (model `{name}`)")));
        }
    }
    let mut merged: BTreeMap<String, f64> = defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in params {
        merged.insert(k.clone(), *v);
    }
    builder(&Params(merged))
}

struct Params(BTreeMap<String, f64>);

impl Params {
    fn get(&self, k: &str) -> f64 {
        self.0[k]
    }
    fn table(&self) -> BTreeMap<String, ParamValue> {
        self.0.iter().map(|(k, v)| (k.clone(), ParamValue::Value(*v))).collect()
    }
}

fn defaults_for(name: &str) -> BTreeMap<&'static str, f64> {
    let mut d = BTreeMap::new();
    let mut put = |k: &'static str, v: f64| {
        d.insert(k, v);
    };
    match name {
        "gene_regulation" => {
            put("a", 2.0);
            put("h", 2.0);
            put("k", 0.1);
        }
        "sis" | "sir" => {
            put("beta", 0.3);
            put("gamma", 0.1);
        }
        "sir_demography" => {
            put("pi", 0.02);
            put("mu", 0.02);
            put("beta", 0.3);
            put("gamma", 0.1);
        }
        "sirv" => {
            for (k, v) in [
                ("psi", 0.01),
                ("u", 0.05),
                ("chi1", 0.02),
                ("chi2", 0.02),
                ("beta", 0.3),
                ("pi1", 0.1),
                ("pi2", 0.1),
                ("gamma", 0.1),
                ("mu_S", 0.01),
                ("mu_I", 0.01),
                ("mu_R", 0.01),
                ("mu_V", 0.01),
            ] {
                put(k, v);
            }
        }
        "seirv" => {
            for (k, v) in [
                ("psi", 0.01),
                ("u", 0.05),
                ("chi1", 0.02),
                ("chi2", 0.02),
                ("beta", 0.3),
                ("pi1", 0.1),
                ("pi2", 0.1),
                ("rho", 0.2),
                ("gamma", 0.1),
                ("mu_S", 0.01),
                ("mu_E", 0.01),
                ("mu_I", 0.01),
                ("mu_R", 0.01),
                ("mu_V", 0.01),
            ] {
                put(k, v);
            }
        }
        "sidarthe_v" => {
            for (k, v) in [
                ("psi", 0.01),
                ("alpha", 0.57),
                ("beta", 0.011),
                ("gamma", 0.456),
                ("delta", 0.011),
                ("epsilon", 0.171),
                ("zeta", 0.125),
                ("lambda", 0.034),
                ("eta", 0.125),
                ("rho", 0.034),
                ("theta", 0.371),
                ("mu", 0.017),
                ("kappa", 0.017),
                ("nu", 0.027),
                ("xi", 0.017),
                ("sigma", 0.017),
                ("tau1", 0.01),
                ("tau2", 0.01),
                ("u", 0.05),
                ("chi1", 0.02),
                ("chi2", 0.02),
                ("pi1", 0.1),
                ("pi2", 0.1),
                ("pi3", 0.1),
                ("pi4", 0.1),
                ("pi5", 0.1),
                ("pi6", 0.1),
                ("pi7", 0.1),
                ("pi8", 0.1),
                ("mu_S", 0.001),
                ("mu_I", 0.001),
                ("mu_D", 0.001),
                ("mu_A", 0.001),
                ("mu_R", 0.001),
                ("mu_T", 0.001),
                ("mu_H", 0.001),
                ("mu_V", 0.001),
            ] {
                put(k, v);
            }
        }
        "iffl" => {
            for (k, v) in [
                ("a21", 5.0),
                ("a23", 5.0),
                ("b31", 5.0),
                ("h", 2.0),
                ("mu1", 1.0),
                ("mu2", 1.0),
                ("mu3", 1.0),
                ("kappa1", 1.0),
            ] {
                put(k, v);
            }
        }
        "repressilator" | "promotilator" => {
            for (k, v) in [
                ("amp", 5.0),
                ("h", 2.0),
                ("mu1", 1.0),
                ("mu2", 1.0),
                ("mu3", 1.0),
            ] {
                put(k, v);
            }
        }
        "lotka_volterra" => {
            put("k_a", 1.0);
            put("k_ab", 1.0);
            put("k_b", 1.0);
        }
        "levin_segel" => {
            for (k, v) in [
                ("a", 0.5),
                ("b", 1.0),
                ("c", 1.0),
                ("d", 0.5),
                ("e", 0.5),
                ("D_u", 1.4e-4),
                ("D_v", 5e-3),
                ("N", 21.0),
                ("L", 1.0),
            ] {
                put(k, v);
            }
        }
        _ => {}
    }
    d
}

fn decay(species: usize, rate: &str) -> Reaction {
    Reaction {
        name: Some(format!("d_{rate}")),
        reagents: vec![(species, 1)],
        products: vec![],
        rate: RateLaw::MassAction { kappa: Coef::param(rate) },
    }
}

fn transfer(from: usize, to: usize, rate: Coef, name: &str) -> Reaction {
    Reaction {
        name: Some(name.into()),
        reagents: vec![(from, 1)],
        products: vec![(to, 1)],
        rate: RateLaw::MassAction { kappa: rate },
    }
}

/// Contagion-style reaction `A + B -> products` at mass-action rate.
fn bilinear(a: usize, b: usize, products: Vec<(usize, u32)>, rate: Coef, name: &str) -> Reaction {
    let mut reagents = vec![(a, 1), (b, 1)];
    reagents.sort_by_key(|&(i, _)| i);
    Reaction { name: Some(name.into()), reagents, products, rate: RateLaw::MassAction { kappa: rate } }
}

fn gene_regulation(p: &Params) -> Result<NetworkModel> {
    let species = vec![Species::new("X")];
    let reactions = vec![
        Reaction {
            name: Some("degradation".into()),
            reagents: vec![(0, 1)],
            products: vec![],
            rate: RateLaw::MassAction { kappa: Coef::constant(1.0) },
        },
        Reaction {
            name: Some("autoactivation".into()),
            reagents: vec![],
            products: vec![(0, 1)],
            rate: RateLaw::Hill {
                amplitude: Coef::param("a"),
                beta: Coef::constant(1.0),
                exponent: Coef::param("h"),
                sign: HillSign::Activating,
                species: 0,
            },
        },
    ];
    NetworkModel::new(species, reactions, vec![(0, Coef::param("k"))], p.table())
}

fn sis(p: &Params) -> Result<NetworkModel> {
    let species = vec![Species::new("S"), Species::new("I")];
    let reactions = vec![
        bilinear(0, 1, vec![(1, 2)], Coef::param("beta"), "infection"),
        transfer(1, 0, Coef::param("gamma"), "recovery"),
    ];
    NetworkModel::new(species, reactions, vec![], p.table())
}

fn sir(p: &Params) -> Result<NetworkModel> {
    let species = vec![Species::new("S"), Species::new("I"), Species::new("R")];
    let reactions = vec![
        bilinear(0, 1, vec![(1, 2)], Coef::param("beta"), "infection"),
        transfer(1, 2, Coef::param("gamma"), "recovery"),
    ];
    NetworkModel::new(species, reactions, vec![], p.table())
}

fn sir_demography(p: &Params) -> Result<NetworkModel> {
    let species = vec![Species::new("S"), Species::new("I"), Species::new("R")];
    let reactions = vec![
        bilinear(0, 1, vec![(1, 2)], Coef::param("beta"), "infection"),
        transfer(1, 2, Coef::param("gamma"), "recovery"),
        decay(0, "mu"),
        decay(1, "mu"),
        decay(2, "mu"),
    ];
    NetworkModel::new(species, reactions, vec![(0, Coef::param("pi"))], p.table())
}

fn sirv(p: &Params) -> Result<NetworkModel> {
    let (s, i, r, v) = (0, 1, 2, 3);
    let species = ["S", "I", "R", "V"].map(Species::new).to_vec();
    let reactions = vec![
        bilinear(s, i, vec![(i, 2)], Coef::param("beta"), "infection"),
        bilinear(r, i, vec![(i, 2)], Coef::product(&["pi1", "beta"]), "reinfection_R"),
        bilinear(v, i, vec![(i, 2)], Coef::product(&["pi2", "beta"]), "reinfection_V"),
        transfer(i, r, Coef::param("gamma"), "recovery"),
        transfer(s, v, Coef::param("u"), "vaccination"),
        transfer(r, s, Coef::param("chi1"), "waning_R"),
        transfer(v, s, Coef::param("chi2"), "waning_V"),
        decay(s, "mu_S"),
        decay(i, "mu_I"),
        decay(r, "mu_R"),
        decay(v, "mu_V"),
    ];
    NetworkModel::new(species, reactions, vec![(s, Coef::param("psi"))], p.table())
}

fn seirv(p: &Params) -> Result<NetworkModel> {
    let (s, e, i, r, v) = (0, 1, 2, 3, 4);
    let species = ["S", "E", "I", "R", "V"].map(Species::new).to_vec();
    let reactions = vec![
        bilinear(s, i, vec![(e, 1), (i, 1)], Coef::param("beta"), "infection"),
        bilinear(r, i, vec![(e, 1), (i, 1)], Coef::product(&["pi1", "beta"]), "reinfection_R"),
        bilinear(v, i, vec![(e, 1), (i, 1)], Coef::product(&["pi2", "beta"]), "reinfection_V"),
        transfer(e, i, Coef::param("rho"), "onset"),
        transfer(i, r, Coef::param("gamma"), "recovery"),
        transfer(s, v, Coef::param("u"), "vaccination"),
        transfer(r, s, Coef::param("chi1"), "waning_R"),
        transfer(v, s, Coef::param("chi2"), "waning_V"),
        decay(s, "mu_S"),
        decay(e, "mu_E"),
        decay(i, "mu_I"),
        decay(r, "mu_R"),
        decay(v, "mu_V"),
    ];
    NetworkModel::new(species, reactions, vec![(s, Coef::param("psi"))], p.table())
}

fn sidarthe_v(p: &Params) -> Result<NetworkModel> {
    // States: S, I, D, A, R, T, H (healed), E (extinct), V.
    let (s, i, d, a, r, t, h, e, v) = (0, 1, 2, 3, 4, 5, 6, 7, 8);
    let species = ["S", "I", "D", "A", "R", "T", "H", "E", "V"].map(Species::new).to_vec();
    let mut reactions = vec![
        bilinear(s, i, vec![(i, 2)], Coef::param("alpha"), "contagion_SI"),
        bilinear(s, d, vec![(i, 1), (d, 1)], Coef::param("beta"), "contagion_SD"),
        bilinear(s, a, vec![(i, 1), (a, 1)], Coef::param("gamma"), "contagion_SA"),
        bilinear(s, r, vec![(i, 1), (r, 1)], Coef::param("delta"), "contagion_SR"),
        bilinear(h, i, vec![(i, 2)], Coef::product(&["pi1", "alpha"]), "recontagion_HI"),
        bilinear(v, i, vec![(i, 2)], Coef::product(&["pi2", "alpha"]), "recontagion_VI"),
        bilinear(h, d, vec![(i, 1), (d, 1)], Coef::product(&["pi3", "beta"]), "recontagion_HD"),
        bilinear(v, d, vec![(i, 1), (d, 1)], Coef::product(&["pi4", "beta"]), "recontagion_VD"),
        bilinear(h, a, vec![(i, 1), (a, 1)], Coef::product(&["pi5", "gamma"]), "recontagion_HA"),
        bilinear(v, a, vec![(i, 1), (a, 1)], Coef::product(&["pi6", "gamma"]), "recontagion_VA"),
        bilinear(h, r, vec![(i, 1), (r, 1)], Coef::product(&["pi7", "delta"]), "recontagion_HR"),
        bilinear(v, r, vec![(i, 1), (r, 1)], Coef::product(&["pi8", "delta"]), "recontagion_VR"),
        transfer(i, d, Coef::param("epsilon"), "diagnosis_I"),
        transfer(i, a, Coef::param("zeta"), "symptoms_I"),
        transfer(i, h, Coef::param("lambda"), "healing_I"),
        transfer(d, r, Coef::param("eta"), "symptoms_D"),
        transfer(d, h, Coef::param("rho"), "healing_D"),
        transfer(a, r, Coef::param("theta"), "diagnosis_A"),
        transfer(a, t, Coef::param("mu"), "aggravation_A"),
        transfer(a, h, Coef::param("kappa"), "healing_A"),
        transfer(r, t, Coef::param("nu"), "aggravation_R"),
        transfer(r, e, Coef::param("tau1"), "death_R"),
        transfer(r, h, Coef::param("xi"), "healing_R"),
        transfer(t, e, Coef::param("tau2"), "death_T"),
        transfer(t, h, Coef::param("sigma"), "healing_T"),
        transfer(s, v, Coef::param("u"), "vaccination"),
        transfer(h, s, Coef::param("chi1"), "waning_H"),
        transfer(v, s, Coef::param("chi2"), "waning_V"),
    ];
    for (sp, m) in [(s, "mu_S"), (i, "mu_I"), (d, "mu_D"), (a, "mu_A"), (r, "mu_R"), (t, "mu_T"), (h, "mu_H"), (v, "mu_V")] {
        reactions.push(decay(sp, m));
    }
    NetworkModel::new(species, reactions, vec![(s, Coef::param("psi"))], p.table())
}

fn iffl(p: &Params) -> Result<NetworkModel> {
    let species = vec![Species::new("X1"), Species::new("X2"), Species::new("X3")];
    let hill = |amp: &str, sign, on: usize| RateLaw::Hill {
        amplitude: Coef::param(amp),
        beta: Coef::constant(1.0),
        exponent: Coef::param("h"),
        sign,
        species: on,
    };
    let reactions = vec![
        Reaction { name: Some("f21".into()), reagents: vec![], products: vec![(1, 1)], rate: hill("a21", HillSign::Activating, 0) },
        Reaction { name: Some("f23".into()), reagents: vec![], products: vec![(1, 1)], rate: hill("a23", HillSign::Activating, 2) },
        Reaction { name: Some("g31".into()), reagents: vec![], products: vec![(2, 1)], rate: hill("b31", HillSign::Inhibiting, 0) },
        decay(0, "mu1"),
        decay(1, "mu2"),
        decay(2, "mu3"),
    ];
    NetworkModel::new(species, reactions, vec![(0, Coef::param("kappa1"))], p.table())
}

/// Three-gene loop in which each node represses (repressilator) or promotes
/// (promotilator) the next.
fn ring_loop(p: &Params, sign: HillSign) -> Result<NetworkModel> {
    let species = vec![Species::new("X1"), Species::new("X2"), Species::new("X3")];
    // x1 <- x3, x2 <- x1, x3 <- x2
    let wiring = [(0usize, 2usize), (1, 0), (2, 1)];
    let mut reactions = Vec::new();
    for (k, &(target, source)) in wiring.iter().enumerate() {
        reactions.push(Reaction {
            name: Some(format!("g{}{}", target + 1, source + 1)),
            reagents: vec![],
            products: vec![(target, 1)],
            rate: RateLaw::Hill {
                amplitude: Coef::param("amp"),
                beta: Coef::constant(1.0),
                exponent: Coef::param("h"),
                sign,
                species: source,
            },
        });
        let _ = k;
    }
    reactions.push(decay(0, "mu1"));
    reactions.push(decay(1, "mu2"));
    reactions.push(decay(2, "mu3"));
    NetworkModel::new(species, reactions, vec![], p.table())
}

fn lotka_volterra(p: &Params) -> Result<NetworkModel> {
    let species = vec![Species::new("A"), Species::new("B")];
    let reactions = vec![
        Reaction {
            name: Some("reproduction".into()),
            reagents: vec![(0, 1)],
            products: vec![(0, 2)],
            rate: RateLaw::MassAction { kappa: Coef::param("k_a") },
        },
        Reaction {
            name: Some("predation".into()),
            reagents: vec![(0, 1), (1, 1)],
            products: vec![(1, 2)],
            rate: RateLaw::MassAction { kappa: Coef::param("k_ab") },
        },
        Reaction {
            name: Some("death".into()),
            reagents: vec![(1, 1)],
            products: vec![],
            rate: RateLaw::MassAction { kappa: Coef::param("k_b") },
        },
    ];
    NetworkModel::new(species, reactions, vec![], p.table())
}

fn levin_segel(p: &Params) -> Result<NetworkModel> {
    let n_grid = p.get("N");
    if n_grid.fract() != 0.0 || n_grid < 3.0 {
        return Err(Error::Invalid("levin_segel: N must be an integer >= 3".into()));
    }
    levin_segel_model(
        p.get("a"),
        p.get("b"),
        p.get("c"),
        p.get("d"),
        p.get("e"),
        p.get("D_u"),
        p.get("D_v"),
        n_grid as usize,
        p.get("L"),
    )
}

/// Semi-discretized Levin-Segel plankton-herbivore system on `n_grid`
/// uniformly spaced points with zero-flux boundaries, assembled as a
/// mass-action reaction network of dimension `2 * n_grid`.
///
/// State ordering: (u_1, v_1, u_2, v_2, ..., u_N, v_N).
pub(crate) fn levin_segel_model(
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    e: f64,
    du: f64,
    dv: f64,
    n_grid: usize,
    length: f64,
) -> Result<NetworkModel> {
    if n_grid < 3 {
        return Err(Error::Invalid("need at least 3 grid points".into()));
    }
    for (name, v) in [("a", a), ("b", b), ("c", c), ("d", d), ("e", e), ("D_u", du), ("D_v", dv), ("L", length)] {
        if v < 0.0 {
            return Err(Error::Invalid(format!("levin_segel: {name} must be nonnegative")));
        }
    }
    let h = length / (n_grid - 1) as f64;
    let cu = du / (h * h); // half-coupling for u
    let cv = dv / (h * h);
    let u = |j: usize| 2 * j; // species index of u_j
    let v = |j: usize| 2 * j + 1;

    let mut species = Vec::with_capacity(2 * n_grid);
    for j in 0..n_grid {
        species.push(Species::new(format!("u{}", j + 1)));
        species.push(Species::new(format!("v{}", j + 1)));
    }
    let mut reactions = Vec::new();
    let ma = |name: String, reagents: Vec<(usize, u32)>, products: Vec<(usize, u32)>, k: f64| Reaction {
        name: Some(name),
        reagents,
        products,
        rate: RateLaw::MassAction { kappa: Coef::constant(k) },
    };
    for j in 0..n_grid {
        // local kinetics: u' += a u + e u^2 - b u v ; v' += c u v - d v^2
        reactions.push(ma(format!("growth_u{j}"), vec![(u(j), 1)], vec![(u(j), 2)], a));
        if e > 0.0 {
            reactions.push(ma(format!("auto_u{j}"), vec![(u(j), 2)], vec![(u(j), 3)], e));
        }
        if b > 0.0 {
            reactions.push(ma(format!("grazing_{j}"), vec![(u(j), 1), (v(j), 1)], vec![(v(j), 1)], b));
        }
        if c > 0.0 {
            reactions.push(ma(
                format!("growth_v{j}"),
                vec![(u(j), 1), (v(j), 1)],
                vec![(u(j), 1), (v(j), 2)],
                c,
            ));
        }
        if d > 0.0 {
            reactions.push(ma(format!("crowding_v{j}"), vec![(v(j), 2)], vec![(v(j), 1)], d));
        }
        // diffusion row: interior rows couple at D/h^2 to both neighbours,
        // boundary rows couple at 2 D/h^2 to the single neighbour.
        let neighbours: Vec<(usize, f64)> = if j == 0 {
            vec![(1, 2.0)]
        } else if j == n_grid - 1 {
            vec![(n_grid - 2, 2.0)]
        } else {
            vec![(j - 1, 1.0), (j + 1, 1.0)]
        };
        // self-depletion -2 D/h^2 per field
        if cu > 0.0 {
            reactions.push(ma(format!("diffloss_u{j}"), vec![(u(j), 1)], vec![], 2.0 * cu));
            for &(k, w) in &neighbours {
                reactions.push(ma(
                    format!("diffgain_u{j}_{k}"),
                    vec![(u(k), 1)],
                    vec![(u(k), 1), (u(j), 1)],
                    w * cu,
                ));
            }
        }
        if cv > 0.0 {
            reactions.push(ma(format!("diffloss_v{j}"), vec![(v(j), 1)], vec![], 2.0 * cv));
            for &(k, w) in &neighbours {
                reactions.push(ma(
                    format!("diffgain_v{j}_{k}"),
                    vec![(v(k), 1)],
                    vec![(v(k), 1), (v(j), 1)],
                    w * cv,
                ));
            }
        }
    }
    NetworkModel::new(species, reactions, vec![], BTreeMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DVector;

    #[test]
    fn unknown_model_and_parameter_are_rejected() {
        assert!(matches!(builtin("nope", &BTreeMap::new()), Err(Error::UnknownModel(_))));
        let mut p = BTreeMap::new();
        p.insert("zzz".into(), 1.0);
        assert!(matches!(builtin("sis", &p), Err(Error::UnknownParameter(_))));
    }

    #[test]
    fn gene_regulation_matches_closed_form() {
        let mut p = BTreeMap::new();
        p.insert("a".into(), 2.0);
        p.insert("h".into(), 2.0);
        p.insert("k".into(), 0.1);
        let m = builtin("gene_regulation", &p).unwrap();
        for &x in &[0.05, 0.3, 0.5, 1.0, 1.7] {
            let f = m.vector_field(&DVector::from_vec(vec![x]), None).unwrap()[0];
            let expect = -x + 2.0 * x * x / (1.0 + x * x) + 0.1;
            assert_relative_eq!(f, expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn sir_demography_matches_equations() {
        let mut p = BTreeMap::new();
        for (k, v) in [("pi", 0.5), ("mu", 0.1), ("beta", 0.9), ("gamma", 0.2)] {
            p.insert(k.to_string(), v);
        }
        let m = builtin("sir_demography", &p).unwrap();
        let x = DVector::from_vec(vec![0.7, 0.2, 0.1]);
        let f = m.vector_field(&x, None).unwrap();
        let (s, i, r) = (0.7, 0.2, 0.1);
        assert_relative_eq!(f[0], 0.5 - 0.9 * s * i - 0.1 * s, epsilon = 1e-14);
        assert_relative_eq!(f[1], 0.9 * s * i - (0.1 + 0.2) * i, epsilon = 1e-14);
        assert_relative_eq!(f[2], 0.2 * i - 0.1 * r, epsilon = 1e-14);
    }

    #[test]
    fn sirv_matches_equations() {
        let m = builtin("sirv", &BTreeMap::new()).unwrap();
        let x = DVector::from_vec(vec![0.6, 0.1, 0.2, 0.1]);
        let f = m.vector_field(&x, None).unwrap();
        let (s, i, r, v) = (0.6, 0.1, 0.2, 0.1);
        let (psi, u, chi1, chi2, beta, pi1, pi2, gamma) = (0.01, 0.05, 0.02, 0.02, 0.3, 0.1, 0.1, 0.1);
        let (mu_s, mu_i, mu_r, mu_v) = (0.01, 0.01, 0.01, 0.01);
        assert_relative_eq!(
            f[0],
            psi - u * s + chi1 * r - beta * s * i + chi2 * v - mu_s * s,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            f[1],
            beta * s * i - gamma * i + pi1 * beta * r * i + pi2 * beta * v * i - mu_i * i,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            f[2],
            gamma * i - chi1 * r - pi1 * beta * r * i - mu_r * r,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            f[3],
            u * s - chi2 * v - pi2 * beta * v * i - mu_v * v,
            epsilon = 1e-14
        );
    }

    #[test]
    fn sidarthe_v_conserves_population_without_vital_dynamics() {
        let mut p = BTreeMap::new();
        p.insert("psi".into(), 0.0);
        for m in ["mu_S", "mu_I", "mu_D", "mu_A", "mu_R", "mu_T", "mu_H", "mu_V"] {
            p.insert(m.into(), 0.0);
        }
        let m = builtin("sidarthe_v", &p).unwrap();
        let x = DVector::from_vec(vec![0.5, 0.1, 0.05, 0.05, 0.05, 0.02, 0.13, 0.05, 0.05]);
        let f = m.vector_field(&x, None).unwrap();
        assert_relative_eq!(f.sum(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn levin_segel_homogeneous_equilibrium() {
        // (u, v) = (ad/(bc-de), ac/(bc-de)) = (1/3, 2/3) at the reference parameters.
        let m = builtin("levin_segel", &BTreeMap::new()).unwrap();
        let n = m.n_species() / 2;
        let mut x = DVector::zeros(2 * n);
        for j in 0..n {
            x[2 * j] = 1.0 / 3.0;
            x[2 * j + 1] = 2.0 / 3.0;
        }
        let f = m.vector_field(&x, None).unwrap();
        assert!(f.amax() < 1e-12, "residual {}", f.amax());
    }

    #[test]
    fn levin_segel_zero_diffusion_decouples() {
        let mut p = BTreeMap::new();
        p.insert("D_u".into(), 0.0);
        p.insert("D_v".into(), 0.0);
        p.insert("N".into(), 5.0);
        let m = builtin("levin_segel", &p).unwrap();
        // perturb one grid point; the field at other points must not react
        let mut x = DVector::zeros(10);
        for j in 0..5 {
            x[2 * j] = 1.0 / 3.0;
            x[2 * j + 1] = 2.0 / 3.0;
        }
        x[4] += 0.1; // u_3
        let f = m.vector_field(&x, None).unwrap();
        for j in [0usize, 1, 6, 7, 8, 9] {
            assert_relative_eq!(f[j], 0.0, epsilon = 1e-12);
        }
        assert!(f[4].abs() > 0.0 || f[5].abs() > 0.0);
    }
}
