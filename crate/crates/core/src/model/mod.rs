//! Network-model data types: species, rate laws, reactions, the
//! stoichiometric representation `x' = S g(x, theta) + g0(theta)`, numeric
//! evaluation with analytic Jacobians, and the Jacobian sign pattern.

mod builtins;
mod compartmental;
mod parser;
mod serialize;

pub use builtins::{builtin, builtin_names};
pub(crate) use builtins::levin_segel_model;
pub use compartmental::{build_compartmental, CompartmentalSpec};
pub use parser::parse_crn;
pub use serialize::{from_json, to_json};

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;
use std::fmt;

/// A chemical species / state variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Species {
    pub id: String,
    pub display_name: String,
}

impl Species {
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        Species { display_name: id.clone(), id }
    }
}

/// Monotone dependency sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Hill interaction direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HillSign {
    Activating,
    Inhibiting,
}

/// A numeric coefficient: constant factor times a product of named parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Coef {
    pub factor: f64,
    pub symbols: Vec<String>,
}

impl Coef {
    pub fn constant(v: f64) -> Self {
        Coef { factor: v, symbols: vec![] }
    }
    pub fn param(name: impl Into<String>) -> Self {
        Coef { factor: 1.0, symbols: vec![name.into()] }
    }
    pub fn scaled(name: impl Into<String>, factor: f64) -> Self {
        Coef { factor, symbols: vec![name.into()] }
    }
    pub fn product(names: &[&str]) -> Self {
        Coef { factor: 1.0, symbols: names.iter().map(|s| s.to_string()).collect() }
    }

    pub fn eval(&self, env: &ParamEnv) -> Result<f64> {
        let mut v = self.factor;
        for s in &self.symbols {
            v *= env.value(s)?;
        }
        Ok(v)
    }

    /// Sign of the coefficient over the parameter box; `None` if indefinite.
    pub fn sign(&self, env: &ParamEnv) -> Option<SignEntry> {
        let mut sign = match self.factor {
            f if f > 0.0 => SignEntry::Plus,
            f if f < 0.0 => SignEntry::Minus,
            _ => return Some(SignEntry::Zero),
        };
        for s in &self.symbols {
            match env.range(s) {
                (lo, _) if lo > 0.0 => {}
                (lo, hi) if lo >= 0.0 && hi == 0.0 => return Some(SignEntry::Zero),
                (_, hi) if hi < 0.0 => sign = sign.negate(),
                (lo, hi) if lo == 0.0 && hi > 0.0 => {} // treated as (0, hi]: nonneg, zero only on boundary
                _ => return None,
            }
        }
        Some(sign)
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.symbols.is_empty() {
            return write!(f, "{}", self.factor);
        }
        if self.factor != 1.0 {
            write!(f, "{}*", self.factor)?;
        }
        write!(f, "{}", self.symbols.join("*"))
    }
}

/// Reaction rate law. Concrete kinds are numerically evaluable; opaque
/// monotone rates only declare their dependency signs.
#[derive(Debug, Clone, PartialEq)]
pub enum RateLaw {
    /// kappa * prod x_i^(reagent multiplicity); dependencies are the reagents.
    MassAction { kappa: Coef },
    /// kappa * prod x_i^p_i with explicit powers, decoupled from the reagent
    /// complex (generalized mass action; used by normal forms).
    Monomial { kappa: Coef, powers: Vec<(usize, u32)> },
    /// Activating A (x/beta)^h / (1 + (x/beta)^h), inhibiting A / (1 + (x/beta)^h).
    Hill { amplitude: Coef, beta: Coef, exponent: Coef, sign: HillSign, species: usize },
    /// A (x/beta) / (1 + x/beta): the activating Hill family at h = 1.
    MichaelisMenten { amplitude: Coef, beta: Coef, species: usize },
    /// Unknown monotone function with declared dependency signs.
    OpaqueMonotone { name: String, deps: Vec<(usize, Sign)> },
}

/// One reaction: reagent complex -> product complex at some rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Reaction {
    pub name: Option<String>,
    /// (species index, multiplicity), sorted by species index.
    pub reagents: Vec<(usize, u32)>,
    pub products: Vec<(usize, u32)>,
    pub rate: RateLaw,
}

impl Reaction {
    /// Net stoichiometry (products minus reagents), sparse, sorted by species.
    pub fn net_stoich(&self) -> Vec<(usize, i64)> {
        let mut net: BTreeMap<usize, i64> = BTreeMap::new();
        for &(i, m) in &self.products {
            *net.entry(i).or_insert(0) += m as i64;
        }
        for &(i, m) in &self.reagents {
            *net.entry(i).or_insert(0) -= m as i64;
        }
        net.into_iter().filter(|&(_, v)| v != 0).collect()
    }
}

/// Parameter value or uncertainty box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamValue {
    Value(f64),
    /// Closed interval [lo, hi]; `(0, INFINITY)` is the structural default.
    Interval(f64, f64),
}

/// Resolves parameter symbols against a model table plus overrides.
pub struct ParamEnv<'a> {
    model: &'a NetworkModel,
    overrides: Option<&'a BTreeMap<String, f64>>,
}

impl<'a> ParamEnv<'a> {
    pub fn value(&self, sym: &str) -> Result<f64> {
        if let Some(ov) = self.overrides {
            if let Some(&v) = ov.get(sym) {
                return Ok(v);
            }
        }
        match self.model.params.get(sym) {
            Some(ParamValue::Value(v)) => Ok(*v),
            Some(ParamValue::Interval(_, _)) => Err(Error::UnknownSymbol(format!(
                "{sym} (interval-valued; supply a concrete value)"
            ))),
            None => Err(Error::UnknownSymbol(sym.into())),
        }
    }

    /// Range of the parameter over its declared box (point values collapse).
    pub fn range(&self, sym: &str) -> (f64, f64) {
        if let Some(ov) = self.overrides {
            if let Some(&v) = ov.get(sym) {
                return (v, v);
            }
        }
        match self.model.params.get(sym) {
            Some(ParamValue::Value(v)) => (*v, *v),
            Some(ParamValue::Interval(lo, hi)) => (*lo, *hi),
            None => (0.0, f64::INFINITY),
        }
    }
}

/// Sign pattern entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignEntry {
    Plus,
    Minus,
    Zero,
}

impl SignEntry {
    pub fn negate(self) -> SignEntry {
        match self {
            SignEntry::Plus => SignEntry::Minus,
            SignEntry::Minus => SignEntry::Plus,
            SignEntry::Zero => SignEntry::Zero,
        }
    }
    pub fn of(v: f64) -> SignEntry {
        if v > 0.0 {
            SignEntry::Plus
        } else if v < 0.0 {
            SignEntry::Minus
        } else {
            SignEntry::Zero
        }
    }
}

impl fmt::Display for SignEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            SignEntry::Plus => '+',
            SignEntry::Minus => '-',
            SignEntry::Zero => '0',
        };
        write!(f, "{c}")
    }
}

/// Jacobian sign pattern matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignPattern {
    pub n: usize,
    pub entries: Vec<SignEntry>, // row-major n x n
}

impl SignPattern {
    pub fn from_rows(rows: &[&[SignEntry]]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n));
        SignPattern { n, entries: rows.iter().flat_map(|r| r.iter().copied()).collect() }
    }
    pub fn get(&self, i: usize, j: usize) -> SignEntry {
        self.entries[i * self.n + j]
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            for j in 0..self.n {
                write!(f, "{} ", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A dynamical network model `x' = S g(x, theta) + g0(theta)`.
///
/// Immutable after construction; cheap to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel {
    species: Vec<Species>,
    reactions: Vec<Reaction>,
    /// Sparse influx vector g0: (species index, coefficient).
    influx: Vec<(usize, Coef)>,
    params: BTreeMap<String, ParamValue>,
}

impl NetworkModel {
    pub fn new(
        species: Vec<Species>,
        reactions: Vec<Reaction>,
        influx: Vec<(usize, Coef)>,
        params: BTreeMap<String, ParamValue>,
    ) -> Result<Self> {
        let n = species.len();
        let mut seen = std::collections::BTreeSet::new();
        for s in &species {
            if !seen.insert(s.id.clone()) {
                return Err(Error::Invalid(format!("duplicate species id `{}`", s.id)));
            }
        }
        for r in &reactions {
            for &(i, _) in r.reagents.iter().chain(r.products.iter()) {
                if i >= n {
                    return Err(Error::Dimension(format!(
                        "species index {i} out of range in reaction"
                    )));
                }
            }
            match &r.rate {
                RateLaw::Hill { species, .. } | RateLaw::MichaelisMenten { species, .. } => {
                    if *species >= n {
                        return Err(Error::Dimension("rate species out of range".into()));
                    }
                }
                RateLaw::Monomial { powers, .. } => {
                    if powers.iter().any(|&(i, _)| i >= n) {
                        return Err(Error::Dimension("rate species out of range".into()));
                    }
                }
                RateLaw::OpaqueMonotone { deps, .. } => {
                    if deps.iter().any(|&(i, _)| i >= n) {
                        return Err(Error::Dimension("rate species out of range".into()));
                    }
                }
                RateLaw::MassAction { .. } => {}
            }
        }
        for &(i, _) in &influx {
            if i >= n {
                return Err(Error::Dimension("influx species out of range".into()));
            }
        }
        Ok(NetworkModel { species, reactions, influx, params })
    }

    pub fn n_species(&self) -> usize {
        self.species.len()
    }
    pub fn n_reactions(&self) -> usize {
        self.reactions.len()
    }
    pub fn species(&self) -> &[Species] {
        &self.species
    }
    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }
    pub fn influx(&self) -> &[(usize, Coef)] {
        &self.influx
    }
    pub fn params(&self) -> &BTreeMap<String, ParamValue> {
        &self.params
    }

    pub fn species_index(&self, id: &str) -> Option<usize> {
        self.species.iter().position(|s| s.id == id)
    }

    /// Environment resolving symbols from the model table plus `overrides`.
    pub fn env<'a>(&'a self, overrides: Option<&'a BTreeMap<String, f64>>) -> ParamEnv<'a> {
        ParamEnv { model: self, overrides }
    }

    /// Rebind a parameter to a fixed value, returning the modified model.
    pub fn with_param(&self, name: &str, value: f64) -> NetworkModel {
        let mut m = self.clone();
        m.params.insert(name.to_string(), ParamValue::Value(value));
        m
    }

    /// The n x m integer stoichiometric matrix.
    pub fn stoichiometric_matrix(&self) -> DMatrix<i64> {
        let n = self.n_species();
        let m = self.n_reactions();
        let mut s = DMatrix::zeros(n, m);
        for (j, r) in self.reactions.iter().enumerate() {
            for (i, v) in r.net_stoich() {
                s[(i, j)] = v;
            }
        }
        s
    }

    /// Signed dependency list of rate `j`, sorted by species index.
    pub fn rate_dependencies(&self, j: usize) -> Vec<(usize, Sign)> {
        let r = &self.reactions[j];
        match &r.rate {
            RateLaw::MassAction { .. } => r.reagents.iter().map(|&(i, _)| (i, Sign::Plus)).collect(),
            RateLaw::Monomial { powers, .. } => {
                powers.iter().filter(|&&(_, p)| p > 0).map(|&(i, _)| (i, Sign::Plus)).collect()
            }
            RateLaw::Hill { sign, species, .. } => vec![(
                *species,
                match sign {
                    HillSign::Activating => Sign::Plus,
                    HillSign::Inhibiting => Sign::Minus,
                },
            )],
            RateLaw::MichaelisMenten { species, .. } => vec![(*species, Sign::Plus)],
            RateLaw::OpaqueMonotone { deps, .. } => {
                let mut d = deps.clone();
                d.sort_by_key(|&(i, _)| i);
                d
            }
        }
    }

    /// Whether the rate of reaction `j` vanishes when `x_i = 0`.
    ///
    /// For opaque rates this is answered structurally: a reaction-rate
    /// function vanishes when one of its reagent species is absent.
    pub fn rate_vanishes_at_zero(&self, j: usize, i: usize) -> bool {
        let r = &self.reactions[j];
        match &r.rate {
            RateLaw::MassAction { .. } => r.reagents.iter().any(|&(k, m)| k == i && m > 0),
            RateLaw::Monomial { powers, .. } => powers.iter().any(|&(k, p)| k == i && p > 0),
            RateLaw::Hill { sign, species, .. } => {
                *species == i && matches!(sign, HillSign::Activating)
            }
            RateLaw::MichaelisMenten { species, .. } => *species == i,
            RateLaw::OpaqueMonotone { .. } => r.reagents.iter().any(|&(k, m)| k == i && m > 0),
        }
    }

    /// Numeric value of rate `j` at state `x`.
    pub fn rate_value(&self, j: usize, x: &DVector<f64>, env: &ParamEnv) -> Result<f64> {
        let r = &self.reactions[j];
        match &r.rate {
            RateLaw::MassAction { kappa } => {
                let mut v = kappa.eval(env)?;
                for &(i, m) in &r.reagents {
                    v *= x[i].powi(m as i32);
                }
                Ok(v)
            }
            RateLaw::Monomial { kappa, powers } => {
                let mut v = kappa.eval(env)?;
                for &(i, p) in powers {
                    v *= x[i].powi(p as i32);
                }
                Ok(v)
            }
            RateLaw::Hill { amplitude, beta, exponent, sign, species } => {
                let a = amplitude.eval(env)?;
                let b = beta.eval(env)?;
                let h = exponent.eval(env)?;
                let xi = x[*species];
                if xi < 0.0 {
                    return Err(Error::Domain(format!(
                        "Hill rate evaluated at negative state x[{}] = {xi}",
                        species
                    )));
                }
                let z = (xi / b).powf(h);
                Ok(match sign {
                    HillSign::Activating => a * z / (1.0 + z),
                    HillSign::Inhibiting => a / (1.0 + z),
                })
            }
            RateLaw::MichaelisMenten { amplitude, beta, species } => {
                let a = amplitude.eval(env)?;
                let b = beta.eval(env)?;
                let xi = x[*species];
                if xi < 0.0 {
                    return Err(Error::Domain(format!(
                        "Michaelis-Menten rate at negative state x[{}] = {xi}",
                        species
                    )));
                }
                let z = xi / b;
                Ok(a * z / (1.0 + z))
            }
            RateLaw::OpaqueMonotone { name, .. } => Err(Error::UnknownSymbol(format!(
                "opaque rate `{name}` has no numeric form"
            ))),
        }
    }

    /// Analytic partial derivative of rate `j` with respect to `x_i`.
    pub fn rate_partial(&self, j: usize, i: usize, x: &DVector<f64>, env: &ParamEnv) -> Result<f64> {
        let r = &self.reactions[j];
        match &r.rate {
            RateLaw::MassAction { kappa } => {
                let Some(&(_, m)) = r.reagents.iter().find(|&&(k, _)| k == i) else {
                    return Ok(0.0);
                };
                let mut v = kappa.eval(env)? * m as f64 * x[i].powi(m as i32 - 1);
                for &(k, mk) in &r.reagents {
                    if k != i {
                        v *= x[k].powi(mk as i32);
                    }
                }
                Ok(v)
            }
            RateLaw::Monomial { kappa, powers } => {
                let Some(&(_, p)) = powers.iter().find(|&&(k, _)| k == i) else {
                    return Ok(0.0);
                };
                let mut v = kappa.eval(env)? * p as f64 * x[i].powi(p as i32 - 1);
                for &(k, pk) in powers {
                    if k != i {
                        v *= x[k].powi(pk as i32);
                    }
                }
                Ok(v)
            }
            RateLaw::Hill { amplitude, beta, exponent, sign, species } => {
                if *species != i {
                    return Ok(0.0);
                }
                let a = amplitude.eval(env)?;
                let b = beta.eval(env)?;
                let h = exponent.eval(env)?;
                let xi = x[i];
                if xi < 0.0 {
                    return Err(Error::Domain("Hill derivative at negative state".into()));
                }
                // d/dx [z/(1+z)] = z' / (1+z)^2 with z = (x/b)^h, z' = h x^(h-1)/b^h
                let zp = if xi == 0.0 {
                    if h > 1.0 {
                        0.0
                    } else if h == 1.0 {
                        1.0 / b
                    } else {
                        f64::INFINITY
                    }
                } else {
                    h * xi.powf(h - 1.0) / b.powf(h)
                };
                let z = if xi == 0.0 { 0.0 } else { (xi / b).powf(h) };
                let denom = (1.0 + z) * (1.0 + z);
                Ok(match sign {
                    HillSign::Activating => a * zp / denom,
                    HillSign::Inhibiting => -a * zp / denom,
                })
            }
            RateLaw::MichaelisMenten { amplitude, beta, species } => {
                if *species != i {
                    return Ok(0.0);
                }
                let a = amplitude.eval(env)?;
                let b = beta.eval(env)?;
                let z = x[i] / b;
                Ok(a / (b * (1.0 + z) * (1.0 + z)))
            }
            RateLaw::OpaqueMonotone { name, .. } => Err(Error::UnknownSymbol(format!(
                "opaque rate `{name}` has no numeric derivative"
            ))),
        }
    }

    /// Influx vector g0(theta).
    pub fn influx_vector(&self, env: &ParamEnv) -> Result<DVector<f64>> {
        let mut g0 = DVector::zeros(self.n_species());
        for (i, c) in &self.influx {
            g0[*i] += c.eval(env)?;
        }
        Ok(g0)
    }

    /// Vector field f(x, theta) = S g(x, theta) + g0(theta), evaluated
    /// reaction-wise (sparse in the stoichiometry).
    pub fn vector_field(
        &self,
        x: &DVector<f64>,
        overrides: Option<&BTreeMap<String, f64>>,
    ) -> Result<DVector<f64>> {
        let env = self.env(overrides);
        let mut f = self.influx_vector(&env)?;
        for (j, r) in self.reactions.iter().enumerate() {
            let g = self.rate_value(j, x, &env)?;
            for (i, v) in r.net_stoich() {
                f[i] += v as f64 * g;
            }
        }
        Ok(f)
    }

    /// Analytic Jacobian of the vector field at `x`.
    pub fn jacobian(
        &self,
        x: &DVector<f64>,
        overrides: Option<&BTreeMap<String, f64>>,
    ) -> Result<DMatrix<f64>> {
        let env = self.env(overrides);
        let n = self.n_species();
        let mut jac = DMatrix::zeros(n, n);
        for (j, r) in self.reactions.iter().enumerate() {
            let net = r.net_stoich();
            for (col, _) in self.rate_dependencies(j) {
                let d = self.rate_partial(j, col, x, &env)?;
                for &(row, v) in &net {
                    jac[(row, col)] += v as f64 * d;
                }
            }
        }
        Ok(jac)
    }

    /// Symbolic Jacobian sign pattern over the declared parameter box.
    ///
    /// Errors with the offending (i, j) pair when some entry is a mixed-sign
    /// sum of contributions.
    pub fn jacobian_sign_pattern(&self) -> Result<SignPattern> {
        let n = self.n_species();
        let env = self.env(None);
        let mut entries = vec![SignEntry::Zero; n * n];
        for (jr, r) in self.reactions.iter().enumerate() {
            let dep_sign_base = self.rate_coef_sign(jr, &env)?;
            let net = r.net_stoich();
            for (col, dsign) in self.rate_dependencies(jr) {
                let s_dep = match dep_sign_base {
                    SignEntry::Zero => SignEntry::Zero,
                    SignEntry::Plus => match dsign {
                        Sign::Plus => SignEntry::Plus,
                        Sign::Minus => SignEntry::Minus,
                    },
                    SignEntry::Minus => match dsign {
                        Sign::Plus => SignEntry::Minus,
                        Sign::Minus => SignEntry::Plus,
                    },
                };
                for &(row, v) in &net {
                    let contrib = if v > 0 { s_dep } else { s_dep.negate() };
                    let cur = &mut entries[row * n + col];
                    *cur = match (*cur, contrib) {
                        (SignEntry::Zero, c) => c,
                        (c, SignEntry::Zero) => c,
                        (a, b) if a == b => a,
                        _ => {
                            return Err(Error::NotSignDefinite {
                                reaction: format!("J({},{})", row + 1, col + 1),
                                species: self.species[col].id.clone(),
                            })
                        }
                    };
                }
            }
        }
        Ok(SignPattern { n, entries })
    }

    /// Sign of the rate's scale coefficient over the box (`None` -> error).
    fn rate_coef_sign(&self, j: usize, env: &ParamEnv) -> Result<SignEntry> {
        let coef = match &self.reactions[j].rate {
            RateLaw::MassAction { kappa } | RateLaw::Monomial { kappa, .. } => kappa,
            RateLaw::Hill { amplitude, .. } | RateLaw::MichaelisMenten { amplitude, .. } => {
                amplitude
            }
            RateLaw::OpaqueMonotone { .. } => return Ok(SignEntry::Plus),
        };
        coef.sign(env).ok_or_else(|| Error::NotSignDefinite {
            reaction: self.reactions[j]
                .name
                .clone()
                .unwrap_or_else(|| format!("reaction {}", j + 1)),
            species: "(rate coefficient)".into(),
        })
    }

    /// Linear part M of the vector field (contributions from rates that are
    /// linear in a single species), used by semi-implicit integrators.
    pub fn linear_part(&self, overrides: Option<&BTreeMap<String, f64>>) -> Result<DMatrix<f64>> {
        let env = self.env(overrides);
        let n = self.n_species();
        let mut m = DMatrix::zeros(n, n);
        for r in self.reactions.iter() {
            let lin = match &r.rate {
                RateLaw::MassAction { kappa } => {
                    if r.reagents.len() == 1 && r.reagents[0].1 == 1 {
                        Some((r.reagents[0].0, kappa.eval(&env)?))
                    } else {
                        None
                    }
                }
                RateLaw::Monomial { kappa, powers } => {
                    if powers.len() == 1 && powers[0].1 == 1 {
                        Some((powers[0].0, kappa.eval(&env)?))
                    } else {
                        None
                    }
                }
                _ => None,
            };
            if let Some((col, k)) = lin {
                for (row, v) in r.net_stoich() {
                    m[(row, col)] += v as f64 * k;
                }
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lv() -> NetworkModel {
        builtin("lotka_volterra", &BTreeMap::new()).unwrap()
    }

    #[test]
    fn lv_stoichiometry_matches_reaction_list() {
        let m = lv();
        let s = m.stoichiometric_matrix();
        assert_eq!(s, DMatrix::from_row_slice(2, 3, &[1, -1, 0, 0, 1, -1]));
    }

    #[test]
    fn lv_equilibrium_vector_field_is_zero() {
        // k_a = k_b = k_ab = 1 puts an equilibrium at (1, 1).
        let mut ov = BTreeMap::new();
        for k in ["k_a", "k_ab", "k_b"] {
            ov.insert(k.to_string(), 1.0);
        }
        let m = lv();
        let f = m.vector_field(&DVector::from_vec(vec![1.0, 1.0]), Some(&ov)).unwrap();
        assert_relative_eq!(f.amax(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn gene_model_vector_field_at_unstable_equilibrium() {
        let m = builtin("gene_regulation", &BTreeMap::new()).unwrap();
        // f(0.5) = -0.5 + 2 * 0.25/1.25 + 0.1 = 0 exactly.
        let f = m.vector_field(&DVector::from_vec(vec![0.5]), None).unwrap();
        assert_relative_eq!(f[0], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn sis_disease_free_state_is_stationary() {
        let mut p = BTreeMap::new();
        p.insert("beta".to_string(), 0.0);
        p.insert("gamma".to_string(), 0.0);
        let m = builtin("sis", &p).unwrap();
        let f = m.vector_field(&DVector::from_vec(vec![1.0, 0.3]), None).unwrap();
        assert_eq!(f.amax(), 0.0);
        let m = builtin("sis", &BTreeMap::new()).unwrap();
        let f = m.vector_field(&DVector::from_vec(vec![1.0, 0.0]), None).unwrap();
        assert_eq!(f.amax(), 0.0);
    }

    #[test]
    fn analytic_jacobian_matches_finite_differences() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for name in ["gene_regulation", "lotka_volterra", "sir", "repressilator", "iffl"] {
            let m = builtin(name, &BTreeMap::new()).unwrap();
            let n = m.n_species();
            for _ in 0..20 {
                let x = DVector::from_fn(n, |_, _| 0.1 + 2.0 * rng.random::<f64>());
                let jac = m.jacobian(&x, None).unwrap();
                let h = 1e-6;
                for j in 0..n {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[j] += h;
                    xm[j] -= h;
                    let fp = m.vector_field(&xp, None).unwrap();
                    let fm = m.vector_field(&xm, None).unwrap();
                    for i in 0..n {
                        let fd = (fp[i] - fm[i]) / (2.0 * h);
                        assert_relative_eq!(jac[(i, j)], fd, epsilon = 1e-5, max_relative = 1e-4);
                    }
                }
            }
        }
    }

    #[test]
    fn iffl_sign_pattern_matches_known_structure() {
        let m = builtin("iffl", &BTreeMap::new()).unwrap();
        let sp = m.jacobian_sign_pattern().unwrap();
        use SignEntry::*;
        let expected = SignPattern::from_rows(&[
            &[Minus, Zero, Zero],
            &[Plus, Minus, Plus],
            &[Minus, Zero, Minus],
        ]);
        assert_eq!(sp, expected);
    }

    #[test]
    fn repressilator_and_promotilator_sign_patterns() {
        use SignEntry::*;
        let r = builtin("repressilator", &BTreeMap::new()).unwrap();
        assert_eq!(
            r.jacobian_sign_pattern().unwrap(),
            SignPattern::from_rows(&[
                &[Minus, Zero, Minus],
                &[Minus, Minus, Zero],
                &[Zero, Minus, Minus],
            ])
        );
        let p = builtin("promotilator", &BTreeMap::new()).unwrap();
        assert_eq!(
            p.jacobian_sign_pattern().unwrap(),
            SignPattern::from_rows(&[
                &[Minus, Zero, Plus],
                &[Plus, Minus, Zero],
                &[Zero, Plus, Minus],
            ])
        );
    }

    #[test]
    fn pure_decay_sign_pattern_is_negative_diagonal() {
        let species = vec![Species::new("X1"), Species::new("X2")];
        let reactions = vec![
            Reaction {
                name: None,
                reagents: vec![(0, 1)],
                products: vec![],
                rate: RateLaw::MassAction { kappa: Coef::param("mu1") },
            },
            Reaction {
                name: None,
                reagents: vec![(1, 1)],
                products: vec![],
                rate: RateLaw::MassAction { kappa: Coef::param("mu2") },
            },
        ];
        let m = NetworkModel::new(species, reactions, vec![], BTreeMap::new()).unwrap();
        use SignEntry::*;
        assert_eq!(
            m.jacobian_sign_pattern().unwrap(),
            SignPattern::from_rows(&[&[Minus, Zero], &[Zero, Minus]])
        );
    }

    #[test]
    fn lv_sign_pattern_is_rejected_as_mixed() {
        // d f_a / d a = k_a - k_ab b changes sign over the box.
        let err = lv().jacobian_sign_pattern().unwrap_err();
        assert!(matches!(err, Error::NotSignDefinite { .. }));
    }

    #[test]
    fn mass_action_rhs_matches_reaction_expansion_on_random_states() {
        // S g(x) assembled reaction-wise equals the expanded polynomial RHS.
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let m = lv();
        let mut ov = BTreeMap::new();
        ov.insert("k_a".to_string(), 0.7);
        ov.insert("k_ab".to_string(), 1.3);
        ov.insert("k_b".to_string(), 0.4);
        for _ in 0..100 {
            let a = 3.0 * rng.random::<f64>();
            let b = 3.0 * rng.random::<f64>();
            let f = m.vector_field(&DVector::from_vec(vec![a, b]), Some(&ov)).unwrap();
            let fa = 0.7 * a - 1.3 * a * b;
            let fb = -0.4 * b + 1.3 * a * b;
            assert_relative_eq!(f[0], fa, max_relative = 1e-12, epsilon = 1e-14);
            assert_relative_eq!(f[1], fb, max_relative = 1e-12, epsilon = 1e-14);
        }
    }
}
