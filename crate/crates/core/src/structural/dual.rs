//! Dual reaction network: the network whose stoichiometric matrix is S^T.
//!
//! The dual of an n-species, m-reaction network has m species and n
//! reactions; the k-th dual rate depends on every dual species i with
//! S^T(i, k) < 0.

use crate::error::Result;
use crate::model::{NetworkModel, RateLaw, Reaction, Sign, Species};
use std::collections::BTreeMap;

pub fn dual_network(model: &NetworkModel) -> Result<NetworkModel> {
    let s = model.stoichiometric_matrix();
    let st = s.transpose(); // m x n
    let m = st.nrows();
    let n = st.ncols();
    let species: Vec<Species> = (0..m).map(|i| Species::new(format!("Y{}", i + 1))).collect();
    let mut reactions = Vec::with_capacity(n);
    for k in 0..n {
        let mut reagents = Vec::new();
        let mut products = Vec::new();
        let mut deps = Vec::new();
        for i in 0..m {
            let v = st[(i, k)];
            if v < 0 {
                reagents.push((i, (-v) as u32));
                deps.push((i, Sign::Plus));
            } else if v > 0 {
                products.push((i, v as u32));
            }
        }
        reactions.push(Reaction {
            name: Some(format!("h{}", k + 1)),
            reagents,
            products,
            rate: RateLaw::OpaqueMonotone { name: format!("h{}", k + 1), deps },
        });
    }
    NetworkModel::new(species, reactions, vec![], BTreeMap::new())
}
