//! JSON schema `{species, reactions[], params{}, influx[]}` for network
//! models. Species are referenced by id; reaction order and species order are
//! preserved so that `from_json(to_json(m))` is structurally equal to `m`.

use super::{Coef, HillSign, NetworkModel, ParamValue, RateLaw, Reaction, Sign, Species};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    species: Vec<SpeciesDoc>,
    reactions: Vec<ReactionDoc>,
    params: BTreeMap<String, ParamDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    influx: Vec<InfluxDoc>,
}

#[derive(Serialize, Deserialize)]
struct SpeciesDoc {
    id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    display_name: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct ReactionDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    reagents: Vec<(String, u32)>,
    products: Vec<(String, u32)>,
    rate: RateDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RateDoc {
    MassAction { kappa: CoefDoc },
    Monomial { kappa: CoefDoc, powers: Vec<(String, u32)> },
    Hill { amplitude: CoefDoc, beta: CoefDoc, exponent: CoefDoc, activating: bool, species: String },
    MichaelisMenten { amplitude: CoefDoc, beta: CoefDoc, species: String },
    Opaque { name: String, deps: Vec<(String, String)> },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoefDoc {
    Const(f64),
    Product { factor: f64, symbols: Vec<String> },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ParamDoc {
    Value(f64),
    Interval { lo: f64, hi: f64 },
}

#[derive(Serialize, Deserialize)]
struct InfluxDoc {
    species: String,
    coef: CoefDoc,
}

impl From<&Coef> for CoefDoc {
    fn from(c: &Coef) -> Self {
        if c.symbols.is_empty() {
            CoefDoc::Const(c.factor)
        } else {
            CoefDoc::Product { factor: c.factor, symbols: c.symbols.clone() }
        }
    }
}

impl From<CoefDoc> for Coef {
    fn from(d: CoefDoc) -> Self {
        match d {
            CoefDoc::Const(v) => Coef::constant(v),
            CoefDoc::Product { factor, symbols } => Coef { factor, symbols },
        }
    }
}

/// Serialize a model to its JSON document (pretty-printed).
pub fn to_json(m: &NetworkModel) -> String {
    let id = |i: usize| m.species()[i].id.clone();
    let doc = ModelDoc {
        species: m
            .species()
            .iter()
            .map(|s| SpeciesDoc {
                id: s.id.clone(),
                display_name: if s.display_name == s.id { None } else { Some(s.display_name.clone()) },
            })
            .collect(),
        reactions: m
            .reactions()
            .iter()
            .map(|r| ReactionDoc {
                name: r.name.clone(),
                reagents: r.reagents.iter().map(|&(i, k)| (id(i), k)).collect(),
                products: r.products.iter().map(|&(i, k)| (id(i), k)).collect(),
                rate: match &r.rate {
                    RateLaw::MassAction { kappa } => RateDoc::MassAction { kappa: kappa.into() },
                    RateLaw::Monomial { kappa, powers } => RateDoc::Monomial {
                        kappa: kappa.into(),
                        powers: powers.iter().map(|&(i, p)| (id(i), p)).collect(),
                    },
                    RateLaw::Hill { amplitude, beta, exponent, sign, species } => RateDoc::Hill {
                        amplitude: amplitude.into(),
                        beta: beta.into(),
                        exponent: exponent.into(),
                        activating: matches!(sign, HillSign::Activating),
                        species: id(*species),
                    },
                    RateLaw::MichaelisMenten { amplitude, beta, species } => {
                        RateDoc::MichaelisMenten {
                            amplitude: amplitude.into(),
                            beta: beta.into(),
                            species: id(*species),
                        }
                    }
                    RateLaw::OpaqueMonotone { name, deps } => RateDoc::Opaque {
                        name: name.clone(),
                        deps: deps
                            .iter()
                            .map(|&(i, s)| {
                                (id(i), if s == Sign::Plus { "+".to_string() } else { "-".to_string() })
                            })
                            .collect(),
                    },
                },
            })
            .collect(),
        params: m
            .params()
            .iter()
            .map(|(k, v)| {
                let d = match v {
                    ParamValue::Value(x) => ParamDoc::Value(*x),
                    ParamValue::Interval(lo, hi) => ParamDoc::Interval { lo: *lo, hi: *hi },
                };
                (k.clone(), d)
            })
            .collect(),
        influx: m
            .influx()
            .iter()
            .map(|(i, c)| InfluxDoc { species: id(*i), coef: c.into() })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("model serialization cannot fail")
}

/// Deserialize a model from its JSON document.
pub fn from_json(text: &str) -> Result<NetworkModel> {
    let doc: ModelDoc =
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("model JSON: {e}")))?;
    let species: Vec<Species> = doc
        .species
        .iter()
        .map(|s| Species {
            id: s.id.clone(),
            display_name: s.display_name.clone().unwrap_or_else(|| s.id.clone()),
        })
        .collect();
    let index: BTreeMap<&str, usize> =
        species.iter().enumerate().map(|(i, s)| (s.id.as_str(), i)).collect();
    let look = |id: &str| -> Result<usize> {
        index.get(id).copied().ok_or_else(|| Error::UnknownSymbol(id.to_string()))
    };
    let mut reactions = Vec::new();
    for r in doc.reactions {
        let conv = |v: Vec<(String, u32)>| -> Result<Vec<(usize, u32)>> {
            let mut out = Vec::new();
            for (id, k) in v {
                out.push((look(&id)?, k));
            }
            out.sort_by_key(|&(i, _)| i);
            Ok(out)
        };
        let rate = match r.rate {
            RateDoc::MassAction { kappa } => RateLaw::MassAction { kappa: kappa.into() },
            RateDoc::Monomial { kappa, powers } => {
                let mut ps = Vec::new();
                for (id, p) in powers {
                    ps.push((look(&id)?, p));
                }
                RateLaw::Monomial { kappa: kappa.into(), powers: ps }
            }
            RateDoc::Hill { amplitude, beta, exponent, activating, species } => RateLaw::Hill {
                amplitude: amplitude.into(),
                beta: beta.into(),
                exponent: exponent.into(),
                sign: if activating { HillSign::Activating } else { HillSign::Inhibiting },
                species: look(&species)?,
            },
            RateDoc::MichaelisMenten { amplitude, beta, species } => RateLaw::MichaelisMenten {
                amplitude: amplitude.into(),
                beta: beta.into(),
                species: look(&species)?,
            },
            RateDoc::Opaque { name, deps } => {
                let mut ds = Vec::new();
                for (id, s) in deps {
                    let sign = match s.as_str() {
                        "+" => Sign::Plus,
                        "-" => Sign::Minus,
                        other => {
                            return Err(Error::Invalid(format!("bad dependency sign `{other}`")))
                        }
                    };
                    ds.push((look(&id)?, sign));
                }
                RateLaw::OpaqueMonotone { name, deps: ds }
            }
        };
        reactions.push(Reaction {
            name: r.name,
            reagents: conv(r.reagents)?,
            products: conv(r.products)?,
            rate,
        });
    }
    let params = doc
        .params
        .into_iter()
        .map(|(k, v)| {
            let pv = match v {
                ParamDoc::Value(x) => ParamValue::Value(x),
                ParamDoc::Interval { lo, hi } => ParamValue::Interval(lo, hi),
            };
            (k, pv)
        })
        .collect();
    let mut influx = Vec::new();
    for i in doc.influx {
        influx.push((look(&i.species)?, i.coef.into()));
    }
    NetworkModel::new(species, reactions, influx, params)
}
