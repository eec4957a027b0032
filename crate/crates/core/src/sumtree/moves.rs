//! Moves between realizations of the same orbifold: sliding a sum across
//! another one, and contracting a sum with an identity summand.

use super::{Attachment, NodeId, RealizationTree, SumEdge, SumEnd, TreeError};
use crate::core2d::SphericalType;

/// The endpoint of edge `index` that is the identity of the edge's own type,
/// if any. When both endpoints qualify (they then carry the same identity)
/// the newly attached end `ends[0]` is chosen.
pub fn trivial_endpoint(t: &RealizationTree, index: usize) -> Option<NodeId> {
    let e = t.edges.get(index)?;
    e.ends
        .iter()
        .map(|end| end.node)
        .find(|&n| t.atom(n).identity_of() == Some(e.sum_type))
}

/// Attachment at the survivor for an edge `f_type` that used to end on the
/// removed identity, when the contracted sum was `contracted` with survivor
/// attachment `at_survivor`.
fn reattachment(
    f_type: SphericalType,
    contracted: SphericalType,
    at_survivor: Option<Attachment>,
) -> Option<Option<Attachment>> {
    match (f_type, contracted) {
        (SphericalType::Ordinary, _) => Some(None),
        // The identity's only strand is merged with the survivor's strand.
        (SphericalType::Cyclic(q), SphericalType::Cyclic(p)) if q == p => Some(at_survivor),
        (SphericalType::Cyclic(q), SphericalType::Vertex(v)) if v.contains(q) => {
            Some(at_survivor.map(|a| Attachment::component(a.component)))
        }
        // The identity's remaining vertex takes the place of the punctured one.
        (SphericalType::Vertex(w), SphericalType::Vertex(v)) if w == v => Some(at_survivor),
        _ => None,
    }
}

/// Deletes the identity endpoint of a trivial sum and moves its other sums
/// onto the surviving endpoint.
pub fn contract_trivial(t: &RealizationTree, index: usize) -> Result<RealizationTree, TreeError> {
    let e = *t.edge(index)?;
    let removed = trivial_endpoint(t, index).ok_or(TreeError::NotTrivial(index))?;
    let survivor_end: SumEnd = if e.ends[0].node == removed {
        e.ends[1]
    } else {
        e.ends[0]
    };
    let survivor = survivor_end.node;

    let mut edges: Vec<SumEdge> = Vec::with_capacity(t.edges.len() - 1);
    for (i, f) in t.edges.iter().enumerate() {
        if i == index {
            continue;
        }
        let mut f = *f;
        let f_type = f.sum_type;
        for end in &mut f.ends {
            if end.node == removed {
                end.node = survivor;
                end.attachment = reattachment(f_type, e.sum_type, survivor_end.attachment)
                    .ok_or(TreeError::ReattachmentImpossible { edge: i })?;
            }
        }
        edges.push(f);
    }

    let shift = |n: NodeId| {
        if n.0 > removed.0 {
            NodeId(n.0 - 1)
        } else {
            n
        }
    };
    for f in &mut edges {
        for end in &mut f.ends {
            end.node = shift(end.node);
        }
    }
    let mut nodes = t.nodes.clone();
    nodes.remove(removed.0);
    let root = if t.root == removed { survivor } else { t.root };
    let out = RealizationTree::normalized(nodes, edges, shift(root));
    debug_assert!(
        out.is_valid(),
        "contraction broke the tree: {:?}",
        out.validate()
    );
    Ok(out)
}

/// Slides the end of edge `edge` at `moved_end` across edge `across` to the
/// far endpoint of `across`.
///
/// Ordinary sums always slide. A cyclic sum slides across a cyclic sum of
/// the same order whose attachment at `moved_end` is on the same singular
/// component. Vertex sums never slide.
pub fn slide(
    t: &RealizationTree,
    edge: usize,
    moved_end: NodeId,
    across: usize,
) -> Result<RealizationTree, TreeError> {
    if edge == across {
        return Err(TreeError::IllegalSlide(
            "an edge cannot slide across itself",
        ));
    }
    let e = *t.edge(edge)?;
    let f = *t.edge(across)?;
    let (Some(e_at), Some(f_at)) = (e.end_at(moved_end), f.end_at(moved_end)) else {
        return Err(TreeError::IllegalSlide(
            "edges do not share the moved endpoint",
        ));
    };
    let target = f.other(moved_end).expect("shared endpoint");
    let attachment = match e.sum_type {
        SphericalType::Ordinary => None,
        SphericalType::Cyclic(_) => {
            if f.sum_type != e.sum_type {
                return Err(TreeError::IllegalSlide(
                    "a cyclic sum slides only across a cyclic sum of the same order",
                ));
            }
            let same_strand = matches!(
                (e_at.attachment, f_at.attachment),
                (Some(a), Some(b)) if a.component == b.component
            );
            if !same_strand {
                return Err(TreeError::IllegalSlide(
                    "the two cyclic sums puncture different singular components",
                ));
            }
            f.end_at(target).and_then(|end| end.attachment)
        }
        SphericalType::Vertex(_) => {
            return Err(TreeError::IllegalSlide("vertex sums do not slide"));
        }
    };

    let mut edges = t.edges.clone();
    for end in &mut edges[edge].ends {
        if end.node == moved_end {
            *end = SumEnd {
                node: target,
                attachment,
            };
        }
    }
    let out = RealizationTree::normalized(t.nodes.clone(), edges, t.root);
    debug_assert!(out.is_valid(), "slide broke the tree: {:?}", out.validate());
    Ok(out)
}
