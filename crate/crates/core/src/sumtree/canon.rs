use std::fmt;

use super::{contract_trivial, trivial_endpoint, NodeId, RealizationTree, TreeError};
use crate::core2d::SphericalType;

/// Summand names and sum labels of an efficient realization, both sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub summands: Vec<String>,
    pub labels: Vec<SphericalType>,
}

impl CanonicalForm {
    /// The multisets of `t` as they stand, without any rewriting.
    pub fn of_tree(t: &RealizationTree) -> Self {
        let mut summands: Vec<String> = t
            .nodes()
            .iter()
            .map(|n| n.atom.name().to_string())
            .collect();
        summands.sort();
        let mut labels: Vec<SphericalType> = t.edges().iter().map(|e| e.sum_type).collect();
        labels.sort();
        CanonicalForm { summands, labels }
    }
}

/// `summands: A, B; labels: ordinary, cyclic(3)`
impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "summands: {}; labels:", self.summands.join(", "))?;
        for (i, l) in self.labels.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}{l}")?;
        }
        Ok(())
    }
}

/// An identity node incident to a sum of its own class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EfficiencyViolation {
    pub node: NodeId,
    pub edge: usize,
}

pub fn efficiency_violations(t: &RealizationTree) -> Result<Vec<EfficiencyViolation>, TreeError> {
    t.ensure_valid()?;
    let mut out = Vec::new();
    for (i, e) in t.edges().iter().enumerate() {
        for end in &e.ends {
            if let Some(id) = t.atom(end.node).identity_of() {
                if id.same_class(&e.sum_type) {
                    // A compatible attachment leaves no room for another order.
                    debug_assert_eq!(id, e.sum_type);
                    out.push(EfficiencyViolation {
                        node: end.node,
                        edge: i,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Contracts trivial sums, first edge first, until none is left.
pub fn reduce(t: &RealizationTree) -> Result<RealizationTree, TreeError> {
    t.ensure_valid()?;
    let mut cur = t.clone();
    while let Some(i) = (0..cur.edges().len()).find(|&i| trivial_endpoint(&cur, i).is_some()) {
        cur = contract_trivial(&cur, i)?;
    }
    Ok(cur)
}

pub fn canonicalize(t: &RealizationTree) -> Result<CanonicalForm, TreeError> {
    Ok(CanonicalForm::of_tree(&reduce(t)?))
}

pub fn equivalent(a: &RealizationTree, b: &RealizationTree) -> Result<bool, TreeError> {
    Ok(canonicalize(a)? == canonicalize(b)?)
}
