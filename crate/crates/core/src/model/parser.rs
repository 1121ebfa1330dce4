//! Reaction DSL parser.
//!
//! One statement per line (or `;`-separated):
//!
//! ```text
//! # complexes are `+`-separated `coef*Species` terms, `0` for the empty complex
//! 0 -> A @ a0
//! A + C -> B + D @ g_ac(A, C)        # opaque monotone rate, signed deps
//! A -> 2A @ ka*A                     # mass action, explicit species powers
//! A + B -> 2B @ kab                  # mass action, implicit reagent powers
//! X -> 0 @ hill+(X, a, 1, h)         # Hill family: hill+/hill-(species, A, beta, h)
//! S <-> P @ kf*S, kr*P               # reversible sugar: forward, backward
//! k = 0.1                            # parameter value
//! a = [0.5, 4]                       # parameter box
//! ```
//!
//! Empty-reagent statements with a constant rate become influx (g0) entries
//! rather than reactions.

use super::{Coef, HillSign, NetworkModel, ParamValue, RateLaw, Reaction, Sign, Species};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

pub fn parse_crn(source: &str) -> Result<NetworkModel> {
    Parser::new(source)?.parse()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Arrow,     // ->
    RevArrow,  // <->
    Plus,
    Minus,
    Star,
    Caret,
    At,
    Comma,
    Equals,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Sep, // ; or newline
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();
    macro_rules! push {
        ($t:expr) => {
            out.push(Spanned { tok: $t, line, col })
        };
    }
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                push!(Tok::Sep);
                chars.next();
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                chars.next();
                col += 1;
            }
            '#' => {
                while let Some(&c2) = chars.peek() {
                    if c2 == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            ';' => {
                push!(Tok::Sep);
                chars.next();
                col += 1;
            }
            '+' => {
                push!(Tok::Plus);
                chars.next();
                col += 1;
            }
            '*' => {
                push!(Tok::Star);
                chars.next();
                col += 1;
            }
            '^' => {
                push!(Tok::Caret);
                chars.next();
                col += 1;
            }
            '@' => {
                push!(Tok::At);
                chars.next();
                col += 1;
            }
            ',' => {
                push!(Tok::Comma);
                chars.next();
                col += 1;
            }
            '=' => {
                push!(Tok::Equals);
                chars.next();
                col += 1;
            }
            '(' => {
                push!(Tok::LParen);
                chars.next();
                col += 1;
            }
            ')' => {
                push!(Tok::RParen);
                chars.next();
                col += 1;
            }
            '[' => {
                push!(Tok::LBracket);
                chars.next();
                col += 1;
            }
            ']' => {
                push!(Tok::RBracket);
                chars.next();
                col += 1;
            }
            '<' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'-') {
                    chars.next();
                    col += 1;
                    if chars.peek() == Some(&'>') {
                        chars.next();
                        col += 1;
                        push!(Tok::RevArrow);
                    } else {
                        return Err(Error::Parse { line, col, msg: "expected `<->`".into() });
                    }
                } else {
                    return Err(Error::Parse { line, col, msg: "unexpected `<`".into() });
                }
            }
            '-' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'>') {
                    chars.next();
                    col += 1;
                    push!(Tok::Arrow);
                } else {
                    push!(Tok::Minus);
                }
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start_col = col;
                let mut s = String::new();
                while let Some(&c2) = chars.peek() {
                    if c2.is_ascii_digit() || c2 == '.' {
                        s.push(c2);
                        chars.next();
                        col += 1;
                    } else if c2 == 'e' || c2 == 'E' {
                        // scientific notation: e[+-]?digits
                        let mut clone = chars.clone();
                        clone.next();
                        match clone.peek() {
                            Some(&d) if d.is_ascii_digit() || d == '+' || d == '-' => {
                                s.push(c2);
                                chars.next();
                                col += 1;
                                if let Some(&d2) = chars.peek() {
                                    if d2 == '+' || d2 == '-' {
                                        s.push(d2);
                                        chars.next();
                                        col += 1;
                                    }
                                }
                            }
                            _ => break,
                        }
                    } else {
                        break;
                    }
                }
                let v: f64 = s.parse().map_err(|_| Error::Parse {
                    line,
                    col: start_col,
                    msg: format!("bad number `{s}`"),
                })?;
                out.push(Spanned { tok: Tok::Number(v), line, col: start_col });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start_col = col;
                let mut s = String::new();
                while let Some(&c2) = chars.peek() {
                    if c2.is_ascii_alphanumeric() || c2 == '_' {
                        s.push(c2);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Ident(s), line, col: start_col });
            }
            other => {
                return Err(Error::Parse { line, col, msg: format!("unexpected `{other}`") });
            }
        }
    }
    Ok(out)
}

/// Raw complex: list of (multiplicity, species id).
type RawComplex = Vec<(u32, String)>;

#[derive(Debug)]
enum RawRate {
    /// Product of numeric/param/species-power factors.
    Product { coef_factor: f64, params: Vec<String>, species_powers: Vec<(String, u32)> },
    Hill { sign: HillSign, species: String, args: Vec<RawCoef> },
    Mm { species: String, args: Vec<RawCoef> },
    Opaque { name: String, deps: Vec<(String, Sign)> },
}

#[derive(Debug)]
enum RawCoef {
    Num(f64),
    Param(String),
}

#[derive(Debug)]
enum RawStatement {
    Reaction { reagents: RawComplex, products: RawComplex, rates: Vec<RawRate>, reversible: bool, line: usize, col: usize },
    Param { name: String, value: ParamValue },
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos.min(self.toks.len().saturating_sub(1)))
            .map(|s| (s.line, s.col))
            .unwrap_or((1, 1))
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self.here();
        Error::Parse { line, col, msg: msg.into() }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn skip_seps(&mut self) {
        while self.peek() == Some(&Tok::Sep) {
            self.pos += 1;
        }
    }

    fn parse(mut self) -> Result<NetworkModel> {
        let mut statements = Vec::new();
        loop {
            self.skip_seps();
            if self.peek().is_none() {
                break;
            }
            statements.push(self.statement()?);
        }
        assemble(statements)
    }

    fn statement(&mut self) -> Result<RawStatement> {
        // Parameter assignment: ident = ...
        if let Some(Tok::Ident(name)) = self.peek().cloned() {
            if self.toks.get(self.pos + 1).map(|s| &s.tok) == Some(&Tok::Equals) {
                self.pos += 2;
                let value = match self.bump() {
                    Some(Tok::Number(v)) => ParamValue::Value(v),
                    Some(Tok::LBracket) => {
                        let lo = self.number()?;
                        self.expect(Tok::Comma, "`,`")?;
                        let hi = self.number()?;
                        self.expect(Tok::RBracket, "`]`")?;
                        if !(lo <= hi) {
                            return Err(self.err("empty parameter interval"));
                        }
                        ParamValue::Interval(lo, hi)
                    }
                    _ => return Err(self.err("expected number or `[lo, hi]`")),
                };
                return Ok(RawStatement::Param { name, value });
            }
        }
        let (line, col) = self.here();
        let reagents = self.complex()?;
        let reversible = match self.bump() {
            Some(Tok::Arrow) => false,
            Some(Tok::RevArrow) => true,
            _ => return Err(self.err("expected `->` or `<->`")),
        };
        let products = self.complex()?;
        self.expect(Tok::At, "`@` before the rate expression")?;
        let mut rates = vec![self.rate()?];
        if self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            rates.push(self.rate()?);
        }
        if reversible && rates.len() != 2 {
            return Err(self.err("reversible reaction needs `@ forward_rate, backward_rate`"));
        }
        if !reversible && rates.len() != 1 {
            return Err(self.err("unexpected second rate on an irreversible reaction"));
        }
        Ok(RawStatement::Reaction { reagents, products, rates, reversible, line, col })
    }

    fn number(&mut self) -> Result<f64> {
        match self.bump() {
            Some(Tok::Number(v)) => Ok(v),
            _ => Err(self.err("expected number")),
        }
    }

    fn complex(&mut self) -> Result<RawComplex> {
        // `0` denotes the empty complex.
        if let Some(Tok::Number(v)) = self.peek() {
            if *v == 0.0 {
                self.pos += 1;
                return Ok(vec![]);
            }
        }
        let mut terms = vec![self.term()?];
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            terms.push(self.term()?);
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<(u32, String)> {
        let mult = if let Some(Tok::Number(v)) = self.peek() {
            let v = *v;
            if v.fract() != 0.0 || v < 1.0 {
                return Err(self.err("stoichiometric coefficient must be a positive integer"));
            }
            self.pos += 1;
            if self.peek() == Some(&Tok::Star) {
                self.pos += 1;
            }
            v as u32
        } else {
            1
        };
        match self.bump() {
            Some(Tok::Ident(id)) => Ok((mult, id)),
            _ => Err(self.err("expected species name")),
        }
    }

    fn rate(&mut self) -> Result<RawRate> {
        // hill+ / hill- / mm / opaque call / product
        if let Some(Tok::Ident(name)) = self.peek().cloned() {
            if name == "hill" {
                let sign_tok = self.toks.get(self.pos + 1).map(|s| s.tok.clone());
                if matches!(sign_tok, Some(Tok::Plus) | Some(Tok::Minus)) {
                    self.pos += 2;
                    let sign = if sign_tok == Some(Tok::Plus) {
                        HillSign::Activating
                    } else {
                        HillSign::Inhibiting
                    };
                    self.expect(Tok::LParen, "`(`")?;
                    let species = self.ident()?;
                    let mut args = Vec::new();
                    for _ in 0..3 {
                        self.expect(Tok::Comma, "`,`")?;
                        args.push(self.coef_arg()?);
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(RawRate::Hill { sign, species, args });
                }
            }
            if name == "mm" && self.toks.get(self.pos + 1).map(|s| &s.tok) == Some(&Tok::LParen) {
                self.pos += 2;
                let species = self.ident()?;
                let mut args = Vec::new();
                for _ in 0..2 {
                    self.expect(Tok::Comma, "`,`")?;
                    args.push(self.coef_arg()?);
                }
                self.expect(Tok::RParen, "`)`")?;
                return Ok(RawRate::Mm { species, args });
            }
            // opaque call: ident(...)
            if self.toks.get(self.pos + 1).map(|s| &s.tok) == Some(&Tok::LParen) {
                self.pos += 2;
                let mut deps = Vec::new();
                loop {
                    let sign = if self.peek() == Some(&Tok::Minus) {
                        self.pos += 1;
                        Sign::Minus
                    } else {
                        if self.peek() == Some(&Tok::Plus) {
                            self.pos += 1;
                        }
                        Sign::Plus
                    };
                    deps.push((self.ident()?, sign));
                    match self.bump() {
                        Some(Tok::Comma) => continue,
                        Some(Tok::RParen) => break,
                        _ => return Err(self.err("expected `,` or `)` in dependency list")),
                    }
                }
                return Ok(RawRate::Opaque { name, deps });
            }
        }
        // product of factors
        let mut coef_factor = 1.0;
        let mut params = Vec::new();
        let mut species_powers: Vec<(String, u32)> = Vec::new();
        loop {
            match self.bump() {
                Some(Tok::Number(v)) => coef_factor *= v,
                Some(Tok::Ident(id)) => {
                    let power = if self.peek() == Some(&Tok::Caret) {
                        self.pos += 1;
                        let p = self.number()?;
                        if p.fract() != 0.0 || p < 1.0 {
                            return Err(self.err("exponent must be a positive integer"));
                        }
                        p as u32
                    } else {
                        1
                    };
                    if power > 1 {
                        species_powers.push((id, power));
                    } else {
                        params.push(id); // species vs param resolved during assembly
                    }
                }
                _ => return Err(self.err("expected rate factor")),
            }
            if self.peek() == Some(&Tok::Star) {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(RawRate::Product { coef_factor, params, species_powers })
    }

    fn ident(&mut self) -> Result<String> {
        match self.bump() {
            Some(Tok::Ident(s)) => Ok(s),
            _ => Err(self.err("expected identifier")),
        }
    }

    fn coef_arg(&mut self) -> Result<RawCoef> {
        match self.bump() {
            Some(Tok::Number(v)) => Ok(RawCoef::Num(v)),
            Some(Tok::Ident(s)) => Ok(RawCoef::Param(s)),
            _ => Err(self.err("expected number or parameter name")),
        }
    }
}

fn assemble(statements: Vec<RawStatement>) -> Result<NetworkModel> {
    // Pass 1: species in order of first appearance in any complex.
    let mut species: Vec<Species> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    for st in &statements {
        if let RawStatement::Reaction { reagents, products, .. } = st {
            for (_, id) in reagents.iter().chain(products.iter()) {
                if !index.contains_key(id) {
                    index.insert(id.clone(), species.len());
                    species.push(Species::new(id.clone()));
                }
            }
        }
    }

    let mut params: BTreeMap<String, ParamValue> = BTreeMap::new();
    let mut reactions: Vec<Reaction> = Vec::new();
    let mut influx: Vec<(usize, Coef)> = Vec::new();
    let mut opaque_counter = 0usize;

    let note_param = |params: &mut BTreeMap<String, ParamValue>, name: &str| {
        params
            .entry(name.to_string())
            .or_insert(ParamValue::Interval(0.0, f64::INFINITY));
    };

    for st in statements {
        match st {
            RawStatement::Param { name, value } => {
                params.insert(name, value);
            }
            RawStatement::Reaction { reagents, products, mut rates, reversible, line, col } => {
                let to_sorted = |c: &RawComplex| -> Vec<(usize, u32)> {
                    let mut m: BTreeMap<usize, u32> = BTreeMap::new();
                    for (mult, id) in c {
                        *m.entry(index[id]).or_insert(0) += mult;
                    }
                    m.into_iter().collect()
                };
                let reag = to_sorted(&reagents);
                let prod = to_sorted(&products);
                let backward = if reversible { Some(rates.pop().unwrap()) } else { None };
                let forward = rates.pop().unwrap();

                let emit = |reag: &Vec<(usize, u32)>,
                                prod: &Vec<(usize, u32)>,
                                rate: RawRate,
                                params: &mut BTreeMap<String, ParamValue>,
                                reactions: &mut Vec<Reaction>,
                                influx: &mut Vec<(usize, Coef)>,
                                opaque_counter: &mut usize|
                 -> Result<()> {
                    let law = match rate {
                        RawRate::Product { coef_factor, params: raw_idents, species_powers } => {
                            // Split idents into species (by declaration) and parameters.
                            let mut powers: BTreeMap<usize, u32> = BTreeMap::new();
                            for (id, p) in &species_powers {
                                match index.get(id) {
                                    Some(&i) => *powers.entry(i).or_insert(0) += p,
                                    None => {
                                        return Err(Error::Parse {
                                            line,
                                            col,
                                            msg: format!(
                                                "`{id}^{p}`: `{id}` is not a declared species"
                                            ),
                                        })
                                    }
                                }
                            }
                            let mut symbols = Vec::new();
                            for id in raw_idents {
                                if let Some(&i) = index.get(&id) {
                                    *powers.entry(i).or_insert(0) += 1;
                                } else {
                                    note_param(params, &id);
                                    symbols.push(id);
                                }
                            }
                            let kappa = Coef { factor: coef_factor, symbols };
                            if kappa.factor < 0.0 {
                                return Err(Error::Parse {
                                    line,
                                    col,
                                    msg: "negative rate constant".into(),
                                });
                            }
                            let powers: Vec<(usize, u32)> = powers.into_iter().collect();
                            let reagent_powers: Vec<(usize, u32)> = reag.clone();
                            if powers.is_empty() {
                                if reag.is_empty() {
                                    // influx statement: 0 -> products @ const
                                    for &(i, mult) in prod.iter() {
                                        let mut c = kappa.clone();
                                        c.factor *= mult as f64;
                                        influx.push((i, c));
                                    }
                                    return Ok(());
                                }
                                // implicit mass action on the reagent complex
                                RateLaw::MassAction { kappa }
                            } else if powers == reagent_powers {
                                RateLaw::MassAction { kappa }
                            } else {
                                return Err(Error::Parse {
                                    line,
                                    col,
                                    msg: "mass-action rate must depend exactly on the reagent \
                                          species with the reagent multiplicities"
                                        .into(),
                                });
                            }
                        }
                        RawRate::Hill { sign, species: sp, mut args } => {
                            let sp_idx = *index.get(&sp).ok_or_else(|| Error::Parse {
                                line,
                                col,
                                msg: format!("undeclared rate symbol `{sp}`"),
                            })?;
                            let h = coef_of(args.pop().unwrap(), &mut params.clone());
                            // re-do with real param table updates
                            let mut mk = |rc: RawCoef| -> Coef {
                                match rc {
                                    RawCoef::Num(v) => Coef::constant(v),
                                    RawCoef::Param(p) => {
                                        note_param(params, &p);
                                        Coef::param(p)
                                    }
                                }
                            };
                            let beta = mk(args.pop().unwrap());
                            let amplitude = mk(args.pop().unwrap());
                            let exponent = match h {
                                Coef { factor, symbols } if symbols.is_empty() => {
                                    Coef::constant(factor)
                                }
                                c => {
                                    if let Some(s) = c.symbols.first() {
                                        note_param(params, s);
                                    }
                                    c
                                }
                            };
                            RateLaw::Hill { amplitude, beta, exponent, sign, species: sp_idx }
                        }
                        RawRate::Mm { species: sp, mut args } => {
                            let sp_idx = *index.get(&sp).ok_or_else(|| Error::Parse {
                                line,
                                col,
                                msg: format!("undeclared rate symbol `{sp}`"),
                            })?;
                            let mut mk = |rc: RawCoef| -> Coef {
                                match rc {
                                    RawCoef::Num(v) => Coef::constant(v),
                                    RawCoef::Param(p) => {
                                        note_param(params, &p);
                                        Coef::param(p)
                                    }
                                }
                            };
                            let beta = mk(args.pop().unwrap());
                            let amplitude = mk(args.pop().unwrap());
                            RateLaw::MichaelisMenten { amplitude, beta, species: sp_idx }
                        }
                        RawRate::Opaque { name, deps } => {
                            let mut resolved = Vec::new();
                            for (id, sign) in deps {
                                let i = *index.get(&id).ok_or_else(|| Error::Parse {
                                    line,
                                    col,
                                    msg: format!("undeclared rate symbol `{id}`"),
                                })?;
                                resolved.push((i, sign));
                            }
                            *opaque_counter += 1;
                            RateLaw::OpaqueMonotone { name, deps: resolved }
                        }
                    };
                    let name = match &law {
                        RateLaw::OpaqueMonotone { name, .. } => Some(name.clone()),
                        RateLaw::MassAction { kappa } if !kappa.symbols.is_empty() => {
                            Some(kappa.symbols.join("*"))
                        }
                        _ => None,
                    };
                    reactions.push(Reaction {
                        name,
                        reagents: reag.clone(),
                        products: prod.clone(),
                        rate: law,
                    });
                    Ok(())
                };

                emit(&reag, &prod, forward, &mut params, &mut reactions, &mut influx, &mut opaque_counter)?;
                if let Some(back) = backward {
                    emit(&prod, &reag, back, &mut params, &mut reactions, &mut influx, &mut opaque_counter)?;
                }
            }
        }
    }

    NetworkModel::new(species, reactions, influx, params)
}

fn coef_of(rc: RawCoef, _params: &mut BTreeMap<String, ParamValue>) -> Coef {
    match rc {
        RawCoef::Num(v) => Coef::constant(v),
        RawCoef::Param(p) => Coef::param(p),
    }
}
