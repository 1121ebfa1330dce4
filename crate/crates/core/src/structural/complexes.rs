//! Complexes, linkage classes, weak reversibility, and network deficiency.

use crate::error::{Error, Result};
use crate::model::NetworkModel;
use crate::numeric::integer_rank;
use nalgebra::DMatrix;

/// Decomposition S = N * M over the network's complexes.
#[derive(Debug, Clone)]
pub struct ComplexDecomposition {
    /// Each complex as a sorted (species, multiplicity) list; the empty
    /// complex is the empty list.
    pub complexes: Vec<Vec<(usize, u32)>>,
    /// n x c matrix of complex stoichiometric coefficients.
    pub n: DMatrix<i64>,
    /// c x m incidence matrix: -1 reagent, +1 product.
    pub m: DMatrix<i64>,
    /// Partition of complex indices into linkage classes.
    pub linkage_classes: Vec<Vec<usize>>,
    /// Every linkage class strongly connected in the directed complex graph.
    pub weakly_reversible: bool,
    /// Directed edges (reagent complex, product complex), one per reaction.
    pub edges: Vec<(usize, usize)>,
}

impl ComplexDecomposition {
    pub fn n_complexes(&self) -> usize {
        self.complexes.len()
    }

    /// Human-readable complex, e.g. `A + 2B` or `0`.
    pub fn complex_display(&self, model: &NetworkModel, idx: usize) -> String {
        let c = &self.complexes[idx];
        if c.is_empty() {
            return "0".into();
        }
        c.iter()
            .map(|&(i, k)| {
                if k == 1 {
                    model.species()[i].id.clone()
                } else {
                    format!("{k}{}", model.species()[i].id)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Enumerate complexes and linkage classes; verifies S = N * M exactly.
///
/// Reactions with an empty side contribute an explicit zero complex.
pub fn complexes_and_linkage(model: &NetworkModel) -> Result<ComplexDecomposition> {
    if model.n_reactions() == 0 {
        return Err(Error::Invalid("network has no reactions".into()));
    }
    let mut complexes: Vec<Vec<(usize, u32)>> = Vec::new();
    let find = |c: Vec<(usize, u32)>, complexes: &mut Vec<Vec<(usize, u32)>>| -> usize {
        if let Some(i) = complexes.iter().position(|k| *k == c) {
            i
        } else {
            complexes.push(c);
            complexes.len() - 1
        }
    };
    let mut edges = Vec::with_capacity(model.n_reactions());
    for r in model.reactions() {
        let reag = find(r.reagents.clone(), &mut complexes);
        let prod = find(r.products.clone(), &mut complexes);
        if reag == prod {
            return Err(Error::Invalid(
                "reaction with identical reagent and product complexes".into(),
            ));
        }
        edges.push((reag, prod));
    }
    let c = complexes.len();
    let n_species = model.n_species();
    let m_reactions = model.n_reactions();

    let mut n_mat = DMatrix::zeros(n_species, c);
    for (l, cx) in complexes.iter().enumerate() {
        for &(i, k) in cx {
            n_mat[(i, l)] = k as i64;
        }
    }
    let mut m_mat = DMatrix::zeros(c, m_reactions);
    for (j, &(reag, prod)) in edges.iter().enumerate() {
        m_mat[(reag, j)] = -1;
        m_mat[(prod, j)] = 1;
    }
    // S = N * M, exactly in integer arithmetic.
    let s = model.stoichiometric_matrix();
    if &n_mat * &m_mat != s {
        return Err(Error::Numerical("S != N*M (internal decomposition error)".into()));
    }

    // Linkage classes: connected components of the undirected complex graph.
    let mut parent: Vec<usize> = (0..c).collect();
    fn root(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for &(a, b) in &edges {
        let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of = vec![usize::MAX; c];
    for i in 0..c {
        let r = root(&mut parent, i);
        if class_of[r] == usize::MAX {
            class_of[r] = classes.len();
            classes.push(vec![]);
        }
        class_of[i] = class_of[r];
        classes[class_of[i]].push(i);
    }

    // Weak reversibility: every linkage class strongly connected.
    let sccs = tarjan_scc(c, &edges);
    let mut scc_of = vec![0usize; c];
    for (k, comp) in sccs.iter().enumerate() {
        for &v in comp {
            scc_of[v] = k;
        }
    }
    let weakly_reversible = classes
        .iter()
        .all(|cl| cl.iter().all(|&v| scc_of[v] == scc_of[cl[0]]));

    Ok(ComplexDecomposition {
        complexes,
        n: n_mat,
        m: m_mat,
        linkage_classes: classes,
        weakly_reversible,
        edges,
    })
}

fn tarjan_scc(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
    }
    struct State {
        index: usize,
        indices: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        out: Vec<Vec<usize>>,
    }
    fn strongconnect(v: usize, adj: &[Vec<usize>], st: &mut State) {
        st.indices[v] = Some(st.index);
        st.low[v] = st.index;
        st.index += 1;
        st.stack.push(v);
        st.on_stack[v] = true;
        for &w in &adj[v] {
            if st.indices[w].is_none() {
                strongconnect(w, adj, st);
                st.low[v] = st.low[v].min(st.low[w]);
            } else if st.on_stack[w] {
                st.low[v] = st.low[v].min(st.indices[w].unwrap());
            }
        }
        if st.low[v] == st.indices[v].unwrap() {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().unwrap();
                st.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            st.out.push(comp);
        }
    }
    let mut st = State {
        index: 0,
        indices: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: vec![],
        out: vec![],
    };
    for v in 0..n {
        if st.indices[v].is_none() {
            strongconnect(v, &adj, &mut st);
        }
    }
    st.out
}

/// Network deficiency, computed by two routes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Deficiency {
    /// dim(ker N intersect col M) = rank M - rank S, by exact integer rank
    /// arithmetic. Always valid.
    pub kernel: i64,
    /// c - l - rank S. Reported always; equals the theorem-backed deficiency
    /// when the network is weakly reversible.
    pub formula: i64,
    pub weakly_reversible: bool,
    pub n_complexes: usize,
    pub n_linkage_classes: usize,
    pub rank_s: usize,
}

pub fn deficiency(model: &NetworkModel) -> Result<Deficiency> {
    let dec = complexes_and_linkage(model)?;
    deficiency_of(model, &dec)
}

pub fn deficiency_of(model: &NetworkModel, dec: &ComplexDecomposition) -> Result<Deficiency> {
    let s = model.stoichiometric_matrix();
    let rank_s = integer_rank(&s);
    let rank_m = integer_rank(&dec.m);
    let kernel = rank_m as i64 - rank_s as i64;
    let formula =
        dec.n_complexes() as i64 - dec.linkage_classes.len() as i64 - rank_s as i64;
    if kernel < 0 {
        return Err(Error::Numerical("negative deficiency (rank computation bug)".into()));
    }
    Ok(Deficiency {
        kernel,
        formula,
        weakly_reversible: dec.weakly_reversible,
        n_complexes: dec.n_complexes(),
        n_linkage_classes: dec.linkage_classes.len(),
        rank_s,
    })
}
