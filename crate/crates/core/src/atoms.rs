//! Irreducible summand descriptors.
//!
//! An [`Atom`] records only the combinatorial shadow of a 3-orbifold that the
//! connected-sum calculus reads: its singular components, their orders and
//! the triples at their trivalent vertices. Irreducibility of non-identity
//! atoms is a declaration, never checked.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::core2d::{ConeOrder, SphericalType, VertexTriple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtomError {
    #[error("graph component has no edges")]
    EmptyEdges,
    #[error("graph component has no vertices")]
    EmptyVertices,
    #[error("vertex {triple} uses order {order} which is not an edge order of its component")]
    TripleOrderMissing {
        triple: VertexTriple,
        order: ConeOrder,
    },
    #[error("`{0}` is a reserved identity name")]
    ReservedName(String),
    #[error("invalid atom name `{0}`")]
    InvalidName(String),
}

/// One connected component of the singular set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SingularComponent {
    /// Vertex-free circle.
    Circle(ConeOrder),
    /// Graph with at least one trivalent vertex. Only the multisets of edge
    /// orders and vertex triples are kept, both sorted.
    Graph {
        edge_orders: Vec<ConeOrder>,
        vertex_triples: Vec<VertexTriple>,
    },
}

impl SingularComponent {
    pub fn graph(
        mut edge_orders: Vec<ConeOrder>,
        vertex_triples: Vec<VertexTriple>,
    ) -> Result<Self, AtomError> {
        if edge_orders.is_empty() {
            return Err(AtomError::EmptyEdges);
        }
        if vertex_triples.is_empty() {
            return Err(AtomError::EmptyVertices);
        }
        for triple in &vertex_triples {
            for order in triple.orders() {
                if !edge_orders.contains(&order) {
                    return Err(AtomError::TripleOrderMissing {
                        triple: *triple,
                        order,
                    });
                }
            }
        }
        edge_orders.sort();
        Ok(SingularComponent::Graph {
            edge_orders,
            vertex_triples,
        })
    }

    pub fn has_order(&self, order: ConeOrder) -> bool {
        match self {
            SingularComponent::Circle(p) => *p == order,
            SingularComponent::Graph { edge_orders, .. } => edge_orders.contains(&order),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            SingularComponent::Circle(_) => 0,
            SingularComponent::Graph { vertex_triples, .. } => vertex_triples.len(),
        }
    }

    pub fn vertex(&self, index: usize) -> Option<VertexTriple> {
        match self {
            SingularComponent::Circle(_) => None,
            SingularComponent::Graph { vertex_triples, .. } => vertex_triples.get(index).copied(),
        }
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, SingularComponent::Circle(_))
    }
}

/// A summand: declared irreducible, or one of the built-in identities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    name: String,
    identity_of: Option<SphericalType>,
    components: Vec<SingularComponent>,
}

impl Atom {
    /// A user-declared (irreducible, non-identity) atom.
    pub fn new(
        name: impl Into<String>,
        components: Vec<SingularComponent>,
    ) -> Result<Self, AtomError> {
        let name = name.into();
        if is_reserved_name(&name) {
            return Err(AtomError::ReservedName(name));
        }
        if !is_identifier(&name) {
            return Err(AtomError::InvalidName(name));
        }
        Ok(Atom {
            name,
            identity_of: None,
            components,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn identity_of(&self) -> Option<SphericalType> {
        self.identity_of
    }

    pub fn components(&self) -> &[SingularComponent] {
        &self.components
    }

    pub fn component(&self, index: usize) -> Option<&SingularComponent> {
        self.components.get(index)
    }

    pub fn is_identity(&self) -> bool {
        self.identity_of.is_some()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Reserved name of the identity atom of the given type.
pub fn identity_name(t: SphericalType) -> String {
    match t {
        SphericalType::Ordinary => "S3o".to_string(),
        SphericalType::Cyclic(p) => format!("S3c({p})"),
        SphericalType::Vertex(v) => format!("S3v{v}"),
    }
}

/// Inverse of [`identity_name`].
pub fn identity_type_of_name(name: &str) -> Option<SphericalType> {
    if name == "S3o" {
        return Some(SphericalType::Ordinary);
    }
    let inner = |prefix: &str| {
        name.strip_prefix(prefix)?
            .strip_prefix('(')?
            .strip_suffix(')')
            .map(|s| {
                s.split(',')
                    .map(|n| n.trim().parse::<u32>().ok())
                    .collect::<Option<Vec<_>>>()
            })?
    };
    if let Some(v) = inner("S3c") {
        return match v.as_slice() {
            [p] => SphericalType::cyclic(*p).ok(),
            _ => None,
        };
    }
    if let Some(v) = inner("S3v") {
        return match v.as_slice() {
            [p, q, r] => SphericalType::vertex(*p, *q, *r).ok(),
            _ => None,
        };
    }
    None
}

pub fn is_reserved_name(name: &str) -> bool {
    name == "S3o" || name == "S3c" || name == "S3v"
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// The identity element of the connected sum of type `t`: the double of the
/// corresponding discal 3-orbifold.
pub fn builtin_identity(t: SphericalType) -> Atom {
    let components = match t {
        SphericalType::Ordinary => Vec::new(),
        SphericalType::Cyclic(p) => vec![SingularComponent::Circle(p)],
        // Doubling the Y-graph glues its three endpoints pairwise: a theta
        // graph with two vertices of the same triple.
        SphericalType::Vertex(v) => vec![SingularComponent::Graph {
            edge_orders: v.orders().to_vec(),
            vertex_triples: vec![v, v],
        }],
    };
    Atom {
        name: identity_name(t),
        identity_of: Some(t),
        components,
    }
}

/// Types of connected sum the atom can take part in.
pub fn puncture_capabilities(a: &Atom) -> BTreeSet<SphericalType> {
    let mut caps = BTreeSet::new();
    caps.insert(SphericalType::Ordinary);
    for component in &a.components {
        match component {
            SingularComponent::Circle(p) => {
                caps.insert(SphericalType::Cyclic(*p));
            }
            SingularComponent::Graph {
                edge_orders,
                vertex_triples,
            } => {
                caps.extend(edge_orders.iter().map(|p| SphericalType::Cyclic(*p)));
                caps.extend(vertex_triples.iter().map(|v| SphericalType::Vertex(*v)));
            }
        }
    }
    caps
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn o(v: u32) -> ConeOrder {
        ConeOrder::new(v).unwrap()
    }

    #[test]
    fn identity_shapes() {
        let s3o = builtin_identity(SphericalType::Ordinary);
        assert!(s3o.components().is_empty());
        assert_eq!(s3o.name(), "S3o");

        let c5 = SphericalType::cyclic(5).unwrap();
        let s3c = builtin_identity(c5);
        assert_eq!(s3c.components(), &[SingularComponent::Circle(o(5))]);
        assert_eq!(s3c.name(), "S3c(5)");

        let v = VertexTriple::new(2, 3, 4).unwrap();
        let s3v = builtin_identity(SphericalType::Vertex(v));
        assert_eq!(
            s3v.components(),
            &[SingularComponent::Graph {
                edge_orders: vec![o(2), o(3), o(4)],
                vertex_triples: vec![v, v],
            }]
        );
        assert_eq!(s3v.name(), "S3v(2,3,4)");
    }

    #[test]
    fn identity_names_round_trip() {
        for t in [
            SphericalType::Ordinary,
            SphericalType::cyclic(7).unwrap(),
            SphericalType::vertex(2, 3, 5).unwrap(),
        ] {
            assert_eq!(identity_type_of_name(&identity_name(t)), Some(t));
        }
        assert_eq!(identity_type_of_name("Kp"), None);
        assert_eq!(identity_type_of_name("S3c(1)"), None);
        assert_eq!(identity_type_of_name("S3v(3,3,3)"), None);
    }

    #[test]
    fn capability_examples() {
        let s3o = builtin_identity(SphericalType::Ordinary);
        assert_eq!(
            puncture_capabilities(&s3o),
            BTreeSet::from([SphericalType::Ordinary])
        );

        let kp = Atom::new("Kp", vec![SingularComponent::Circle(o(5))]).unwrap();
        assert_eq!(
            puncture_capabilities(&kp),
            BTreeSet::from([SphericalType::Ordinary, SphericalType::Cyclic(o(5))])
        );

        let v = VertexTriple::new(2, 3, 5).unwrap();
        let g = SingularComponent::graph(vec![o(2), o(3), o(5)], vec![v, v]).unwrap();
        let a = Atom::new("G", vec![g]).unwrap();
        assert_eq!(
            puncture_capabilities(&a),
            BTreeSet::from([
                SphericalType::Ordinary,
                SphericalType::Cyclic(o(2)),
                SphericalType::Cyclic(o(3)),
                SphericalType::Cyclic(o(5)),
                SphericalType::Vertex(v),
            ])
        );
    }

    #[test]
    fn graph_validation() {
        let v = VertexTriple::new(2, 2, 3).unwrap();
        assert_eq!(
            SingularComponent::graph(vec![o(2), o(2)], vec![v]),
            Err(AtomError::TripleOrderMissing {
                triple: v,
                order: o(3)
            })
        );
        assert_eq!(
            SingularComponent::graph(vec![], vec![v]),
            Err(AtomError::EmptyEdges)
        );
        assert_eq!(
            SingularComponent::graph(vec![o(2)], vec![]),
            Err(AtomError::EmptyVertices)
        );
    }

    #[test]
    fn reserved_names_are_refused() {
        assert!(matches!(
            Atom::new("S3o", vec![]),
            Err(AtomError::ReservedName(_))
        ));
        assert!(matches!(
            Atom::new("9lives", vec![]),
            Err(AtomError::InvalidName(_))
        ));
    }

    fn component() -> impl Strategy<Value = SingularComponent> {
        prop_oneof![
            (2u32..8).prop_map(|p| SingularComponent::Circle(o(p))),
            (2u32..8, 1usize..3).prop_map(|(p, n)| {
                let v = VertexTriple::new(2, 2, p).unwrap();
                SingularComponent::graph(vec![o(2), o(2), o(p)], vec![v; n]).unwrap()
            }),
        ]
    }

    fn spherical_type() -> impl Strategy<Value = SphericalType> {
        prop_oneof![
            Just(SphericalType::Ordinary),
            (2u32..8).prop_map(|p| SphericalType::cyclic(p).unwrap()),
            (2u32..8).prop_map(|p| SphericalType::vertex(2, 2, p).unwrap()),
            (3u32..6).prop_map(|p| SphericalType::vertex(2, 3, p).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn identity_can_be_punctured_by_its_own_type(t in spherical_type()) {
            prop_assert!(puncture_capabilities(&builtin_identity(t)).contains(&t));
        }

        #[test]
        fn capabilities_are_monotone(
            base in prop::collection::vec(component(), 0..4),
            extra in component(),
        ) {
            let small = Atom::new("A", base.clone()).unwrap();
            let mut more = base;
            more.push(extra);
            let big = Atom::new("A", more).unwrap();
            prop_assert!(puncture_capabilities(&small).is_subset(&puncture_capabilities(&big)));
        }
    }
}
