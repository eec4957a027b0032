//! Named realizations used by the test suites, the verifier and the docs.

use std::sync::Arc;

use crate::atoms::{builtin_identity, Atom, SingularComponent};
use crate::core2d::{ConeOrder, SphericalType, VertexTriple};
use crate::sumtree::{Attachment, RealizationTree, TreeBuilder};

/// A knotted circle of order `p`: `(S^3, K_p)` for a non-trivial knot `K`.
pub fn knot_atom(name: &str, p: ConeOrder) -> Arc<Atom> {
    Arc::new(Atom::new(name, vec![SingularComponent::Circle(p)]).expect("valid atom name"))
}

fn identity(t: SphericalType) -> Arc<Atom> {
    Arc::new(builtin_identity(t))
}

/// The two realizations of `S3c(p) #o S3c(q) #c(p) (S^3, K_p)`:
///
/// * `A`: ordinary sum of `S3c(p)` and `S3c(q)`, then the `p`-cyclic sum
///   of `Kp` onto the circle of `S3c(p)`. Both sums look non-trivial but the
///   cyclic one is a sum with its own identity.
/// * `B`: `Kp` ordinarily summed with `S3c(q)`, the efficient form.
pub fn knot_reordering(p: u32, q: u32) -> (RealizationTree, RealizationTree) {
    let cp = SphericalType::cyclic(p).expect("p >= 2");
    let cq = SphericalType::cyclic(q).expect("q >= 2");
    let SphericalType::Cyclic(order) = cp else {
        unreachable!()
    };
    let kp = knot_atom("Kp", order);

    let mut a = TreeBuilder::new();
    let sp = a.node("sp", identity(cp));
    let sq = a.node("sq", identity(cq));
    let k = a.node("k", kp.clone());
    a.sum(sq, sp, SphericalType::Ordinary, None, None);
    a.sum(
        k,
        sp,
        cp,
        Some(Attachment::component(0)),
        Some(Attachment::component(0)),
    );

    let mut b = TreeBuilder::new();
    let k = b.node("k", kp);
    let sq = b.node("sq", identity(cq));
    b.sum(sq, k, SphericalType::Ordinary, None, None);

    (a.build(), b.build())
}

/// A theta graph with both vertices of type `t`.
pub fn theta_component(t: VertexTriple) -> SingularComponent {
    SingularComponent::graph(t.orders().to_vec(), vec![t, t]).expect("theta graph")
}

/// A graph component with a single vertex, the shadow of a component whose
/// other vertices have already been used by sums.
pub fn single_vertex_component(t: VertexTriple) -> SingularComponent {
    SingularComponent::graph(t.orders().to_vec(), vec![t]).expect("one-vertex graph")
}

/// Two orderings of the same sums for which replaying the `p`-cyclic count
/// gives different answers once a vertex sum is allowed.
///
/// Atoms `A` and `B` each carry one vertex of type `(2,2,p)`; `D` is a theta
/// graph with an order-`p` edge. The sums are `A -v- B` and `D -c(p)- A`.
/// Performing the vertex sum first uses up the only vertices of the merged
/// component, so the later cyclic sum involves a vertex-free component.
pub fn vertex_sum_reordering(p: u32) -> (RealizationTree, RealizationTree) {
    let t = VertexTriple::new(2, 2, p).expect("(2,2,p) is admissible");
    let vt = SphericalType::Vertex(t);
    let cp = SphericalType::cyclic(p).expect("p >= 2");
    let a_atom = Arc::new(Atom::new("A", vec![single_vertex_component(t)]).unwrap());
    let b_atom = Arc::new(Atom::new("B", vec![single_vertex_component(t)]).unwrap());
    let d_atom = Arc::new(Atom::new("D", vec![theta_component(t)]).unwrap());

    let build = |vertex_first: bool| {
        let mut tb = TreeBuilder::new();
        let a = tb.node("a", a_atom.clone());
        let b = tb.node("b", b_atom.clone());
        let d = tb.node("d", d_atom.clone());
        let vertex = |tb: &mut TreeBuilder| {
            tb.sum(
                b,
                a,
                vt,
                Some(Attachment::vertex(0, 0)),
                Some(Attachment::vertex(0, 0)),
            );
        };
        let cyclic = |tb: &mut TreeBuilder| {
            tb.sum(
                d,
                a,
                cp,
                Some(Attachment::component(0)),
                Some(Attachment::component(0)),
            );
        };
        if vertex_first {
            vertex(&mut tb);
            cyclic(&mut tb);
        } else {
            cyclic(&mut tb);
            vertex(&mut tb);
        }
        tb.build()
    };
    (build(true), build(false))
}
