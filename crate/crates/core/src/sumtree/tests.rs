use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::atoms::builtin_identity;
use crate::core2d::{ConeOrder, VertexTriple};
use crate::scenarios::{knot_atom, knot_reordering, theta_component};

fn ord(p: u32) -> ConeOrder {
    ConeOrder::new(p).unwrap()
}

fn id(t: SphericalType) -> Arc<Atom> {
    Arc::new(builtin_identity(t))
}

fn plain(name: &str) -> Arc<Atom> {
    Arc::new(Atom::new(name, vec![]).unwrap())
}

#[test]
fn knot_example_is_valid() {
    let (a, b) = knot_reordering(3, 2);
    assert_eq!(a.validate(), vec![]);
    assert_eq!(b.validate(), vec![]);
}

#[test]
fn edge_count_violation() {
    let t = RealizationTree::from_parts(
        vec![
            Node {
                label: "a".into(),
                atom: plain("M"),
            },
            Node {
                label: "b".into(),
                atom: plain("N"),
            },
        ],
        vec![],
        NodeId(0),
    );
    assert!(t
        .validate()
        .contains(&Violation::EdgeCount { nodes: 2, edges: 0 }));
    assert!(matches!(t.ensure_valid(), Err(TreeError::Invalid(_))));
}

#[test]
fn growth_order_violation() {
    // Second edge attaches `c` onto `b`, which is not yet present.
    let mut tb = TreeBuilder::new();
    let a = tb.node("a", plain("M"));
    let b = tb.node("b", plain("N"));
    let c = tb.node("c", plain("P"));
    tb.sum(c, b, SphericalType::Ordinary, None, None);
    tb.sum(b, a, SphericalType::Ordinary, None, None);
    let t = tb.build();
    assert!(t
        .validate()
        .contains(&Violation::NotGrowthOrder { edge: 0 }));
}

#[test]
fn attachment_violations() {
    let k = knot_atom("K", ord(3));
    let mut tb = TreeBuilder::new();
    let a = tb.node("a", k.clone());
    let b = tb.node("b", k);
    tb.sum(
        b,
        a,
        SphericalType::cyclic(5).unwrap(),
        Some(Attachment::component(0)),
        Some(Attachment::component(0)),
    );
    let v = tb.build().validate();
    assert!(v.contains(&Violation::OrderMismatch {
        edge: 0,
        node: NodeId(1)
    }));

    let mut tb = TreeBuilder::new();
    let a = tb.node("a", plain("M"));
    let b = tb.node("b", plain("N"));
    tb.sum(
        b,
        a,
        SphericalType::Ordinary,
        Some(Attachment::component(0)),
        None,
    );
    assert!(tb
        .build()
        .validate()
        .contains(&Violation::UnexpectedAttachment {
            edge: 0,
            node: NodeId(1)
        }));
}

#[test]
fn vertex_reuse_is_rejected() {
    let t3 = VertexTriple::new(2, 2, 3).unwrap();
    let g = Arc::new(Atom::new("G", vec![theta_component(t3)]).unwrap());
    let vt = SphericalType::Vertex(t3);
    let mut tb = TreeBuilder::new();
    let a = tb.node("a", g.clone());
    let b = tb.node("b", g.clone());
    let c = tb.node("c", g);
    let v0 = Some(Attachment::vertex(0, 0));
    tb.sum(b, a, vt, v0, v0);
    tb.sum(c, a, vt, v0, v0);
    assert!(tb.build().validate().contains(&Violation::VertexReused {
        edge: 1,
        node: NodeId(0)
    }));
}

#[test]
fn efficiency_of_knot_example() {
    let (a, b) = knot_reordering(3, 2);
    let va = efficiency_violations(&a).unwrap();
    assert_eq!(
        va,
        vec![EfficiencyViolation {
            node: a.find_node("sp").unwrap(),
            edge: 1
        }]
    );
    assert!(efficiency_violations(&b).unwrap().is_empty());
}

#[test]
fn contraction_reaches_efficient_form() {
    let (a, b) = knot_reordering(3, 2);
    let c = contract_trivial(&a, 1).unwrap();
    assert!(c.is_valid());
    assert_eq!(CanonicalForm::of_tree(&c), CanonicalForm::of_tree(&b));
    // Neither end of the ordinary sum is `S3o`.
    assert_eq!(contract_trivial(&a, 0), Err(TreeError::NotTrivial(0)));
    assert_eq!(contract_trivial(&a, 9), Err(TreeError::EdgeOutOfRange(9)));
}

#[test]
fn double_identity_contracts_to_one_node() {
    let o = SphericalType::Ordinary;
    let mut tb = TreeBuilder::new();
    let a = tb.node("a", id(o));
    let b = tb.node("b", id(o));
    tb.sum(b, a, o, None, None);
    let c = contract_trivial(&tb.build(), 0).unwrap();
    assert_eq!(c.nodes().len(), 1);
    assert_eq!(c.atom(c.root()).name(), "S3o");
}

#[test]
fn canonical_form_display() {
    let (a, _) = knot_reordering(3, 2);
    assert_eq!(
        canonicalize(&a).unwrap().to_string(),
        "summands: Kp, S3c(2); labels: ordinary"
    );
    let single = RealizationTree::single("x", plain("M"));
    assert_eq!(
        canonicalize(&single).unwrap().to_string(),
        "summands: M; labels:"
    );
}

#[test]
fn identity_chain_collapses() {
    let c5 = SphericalType::cyclic(5).unwrap();
    let k = knot_atom("A", ord(5));
    let at = Some(Attachment::component(0));
    let mut tb = TreeBuilder::new();
    let s1 = tb.node("s1", id(c5));
    let s2 = tb.node("s2", id(c5));
    let x = tb.node("x", k);
    tb.sum(s2, s1, c5, at, at);
    tb.sum(x, s2, c5, at, at);
    let form = canonicalize(&tb.build()).unwrap();
    assert_eq!(form.summands, vec!["A".to_string()]);
    assert!(form.labels.is_empty());
}

#[test]
fn knot_reorderings_are_equivalent() {
    let (a, b) = knot_reordering(3, 2);
    assert!(equivalent(&a, &b).unwrap());
    let (c, _) = knot_reordering(3, 5);
    assert!(!equivalent(&a, &c).unwrap());
}

#[test]
fn slides() {
    let (a, _) = knot_reordering(3, 2);
    let sp = a.find_node("sp").unwrap();
    // The ordinary edge slides from `sp` across the cyclic edge onto `k`.
    let s = slide(&a, 0, sp, 1).unwrap();
    assert!(s.is_valid());
    assert!(s
        .edges()
        .iter()
        .any(|e| e.sum_type == SphericalType::Ordinary && e.touches(s.find_node("k").unwrap())));
    assert_eq!(canonicalize(&s).unwrap(), canonicalize(&a).unwrap());
    // A cyclic edge cannot slide across an ordinary one.
    assert!(matches!(
        slide(&a, 1, sp, 0),
        Err(TreeError::IllegalSlide(_))
    ));
}

#[test]
fn vertex_sums_never_slide() {
    let t3 = VertexTriple::new(2, 2, 3).unwrap();
    let vt = SphericalType::Vertex(t3);
    let g = Arc::new(Atom::new("G", vec![theta_component(t3)]).unwrap());
    let mut tb = TreeBuilder::new();
    let a = tb.node("a", g.clone());
    let b = tb.node("b", g.clone());
    let c = tb.node("c", g);
    tb.sum(
        b,
        a,
        vt,
        Some(Attachment::vertex(0, 0)),
        Some(Attachment::vertex(0, 0)),
    );
    tb.sum(
        c,
        a,
        vt,
        Some(Attachment::vertex(0, 0)),
        Some(Attachment::vertex(0, 1)),
    );
    let t = tb.build();
    assert!(t.is_valid());
    assert!(matches!(
        slide(&t, 0, a, 1),
        Err(TreeError::IllegalSlide(_))
    ));
}

#[test]
fn cyclic_slide_needs_same_strand() {
    let c3 = SphericalType::cyclic(3).unwrap();
    let two = Arc::new(
        Atom::new(
            "KK",
            vec![
                crate::atoms::SingularComponent::Circle(ord(3)),
                crate::atoms::SingularComponent::Circle(ord(3)),
            ],
        )
        .unwrap(),
    );
    let k = knot_atom("K", ord(3));
    let mut tb = TreeBuilder::new();
    let h = tb.node("h", two);
    let x = tb.node("x", k.clone());
    let y = tb.node("y", k);
    tb.sum(
        x,
        h,
        c3,
        Some(Attachment::component(0)),
        Some(Attachment::component(0)),
    );
    tb.sum(
        y,
        h,
        c3,
        Some(Attachment::component(0)),
        Some(Attachment::component(1)),
    );
    let t = tb.build();
    assert!(t.is_valid());
    assert!(matches!(
        slide(&t, 1, h, 0),
        Err(TreeError::IllegalSlide(_))
    ));
}

fn order_strategy() -> impl Strategy<Value = (u32, u32)> {
    (2u32..8, 2u32..8)
}

proptest! {
    #[test]
    fn reduction_is_efficient_and_idempotent((p, q) in order_strategy()) {
        let (a, b) = knot_reordering(p, q);
        let r = reduce(&a).unwrap();
        prop_assert!(r.is_valid());
        prop_assert!(efficiency_violations(&r).unwrap().is_empty());
        prop_assert_eq!(reduce(&r).unwrap(), r.clone());
        prop_assert_eq!(canonicalize(&a).unwrap(), canonicalize(&b).unwrap());
    }

    #[test]
    fn build_order_does_not_change_canonical_form(seed in 0u64..500, edges in 0usize..6) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let alphabet = crate::enumerate::Alphabet::standard();
        let t = crate::enumerate::random_realization(&mut rng, &alphabet, edges, true);
        let form = canonicalize(&t).unwrap();
        for u in crate::enumerate::all_build_orders(&t).into_iter().take(24) {
            prop_assert!(u.is_valid());
            prop_assert_eq!(canonicalize(&u).unwrap(), form.clone());
        }
    }
}
