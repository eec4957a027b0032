//! Realization trees of connected sums.
//!
//! A realization `X0 # X1 # ... # Xn` is a tree whose nodes are summands and
//! whose edges are typed sums. The edge sequence is the build order: edge `k`
//! attaches a node that is not yet present to the part grown from the root by
//! the earlier edges. `ends[0]` of every edge is the newly attached node and
//! `ends[1]` the node it is glued to.

mod canon;
mod moves;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::atoms::{Atom, SingularComponent};
use crate::core2d::SphericalType;

pub use canon::{
    canonicalize, efficiency_violations, equivalent, reduce, CanonicalForm, EfficiencyViolation,
};
pub use moves::{contract_trivial, slide, trivial_endpoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub label: Arc<str>,
    pub atom: Arc<Atom>,
}

/// Where a cyclic or vertex sum punctures a summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Attachment {
    pub component: usize,
    pub vertex: Option<usize>,
}

impl Attachment {
    pub fn component(component: usize) -> Self {
        Attachment {
            component,
            vertex: None,
        }
    }

    pub fn vertex(component: usize, vertex: usize) -> Self {
        Attachment {
            component,
            vertex: Some(vertex),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SumEnd {
    pub node: NodeId,
    pub attachment: Option<Attachment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SumEdge {
    pub sum_type: SphericalType,
    pub ends: [SumEnd; 2],
}

impl SumEdge {
    pub fn touches(&self, node: NodeId) -> bool {
        self.ends[0].node == node || self.ends[1].node == node
    }

    /// The end at `node`, if the edge touches it.
    pub fn end_at(&self, node: NodeId) -> Option<&SumEnd> {
        self.ends.iter().find(|e| e.node == node)
    }

    pub fn other(&self, node: NodeId) -> Option<NodeId> {
        if self.ends[0].node == node {
            Some(self.ends[1].node)
        } else if self.ends[1].node == node {
            Some(self.ends[0].node)
        } else {
            None
        }
    }
}

/// A violated invariant of a [`RealizationTree`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    RootOutOfRange,
    EdgeCount { nodes: usize, edges: usize },
    NodeOutOfRange { edge: usize },
    SelfLoop { edge: usize },
    NotGrowthOrder { edge: usize },
    UnexpectedAttachment { edge: usize, node: NodeId },
    MissingAttachment { edge: usize, node: NodeId },
    ComponentOutOfRange { edge: usize, node: NodeId },
    OrderMismatch { edge: usize, node: NodeId },
    NotAGraph { edge: usize, node: NodeId },
    VertexMismatch { edge: usize, node: NodeId },
    VertexReused { edge: usize, node: NodeId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            RootOutOfRange => write!(f, "root out of range"),
            EdgeCount { nodes, edges } => {
                write!(f, "edge count: {edges} edges for {nodes} nodes")
            }
            NodeOutOfRange { edge } => write!(f, "edge {edge}: node out of range"),
            SelfLoop { edge } => write!(f, "edge {edge}: endpoints coincide"),
            NotGrowthOrder { edge } => write!(f, "edge {edge}: not a growth order"),
            UnexpectedAttachment { edge, node } => {
                write!(f, "edge {edge}: unexpected attachment at {node}")
            }
            MissingAttachment { edge, node } => {
                write!(f, "edge {edge}: missing attachment at {node}")
            }
            ComponentOutOfRange { edge, node } => {
                write!(f, "edge {edge}: component out of range at {node}")
            }
            OrderMismatch { edge, node } => write!(f, "edge {edge}: order mismatch at {node}"),
            NotAGraph { edge, node } => {
                write!(f, "edge {edge}: vertex sum on a circle at {node}")
            }
            VertexMismatch { edge, node } => {
                write!(f, "edge {edge}: vertex triple mismatch at {node}")
            }
            VertexReused { edge, node } => write!(f, "edge {edge}: vertex reused at {node}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("invalid realization ({} violations, first: {})", .0.len(), .0[0])]
    Invalid(Vec<Violation>),
    #[error("edge {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("edge {0} is not a trivial sum")]
    NotTrivial(usize),
    #[error("edge {edge} cannot be re-attached after contraction")]
    ReattachmentImpossible { edge: usize },
    #[error("illegal slide: {0}")]
    IllegalSlide(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RealizationTree {
    nodes: Vec<Node>,
    edges: Vec<SumEdge>,
    root: NodeId,
}

impl RealizationTree {
    /// Assembles a tree without checking it; see [`RealizationTree::validate`].
    pub fn from_parts(nodes: Vec<Node>, edges: Vec<SumEdge>, root: NodeId) -> Self {
        RealizationTree { nodes, edges, root }
    }

    /// A single summand with no sums.
    pub fn single(label: &str, atom: Arc<Atom>) -> Self {
        RealizationTree {
            nodes: vec![Node {
                label: label.into(),
                atom,
            }],
            edges: Vec::new(),
            root: NodeId(0),
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[SumEdge] {
        &self.edges
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn atom(&self, id: NodeId) -> &Atom {
        &self.nodes[id.0].atom
    }

    pub fn edge(&self, index: usize) -> Result<&SumEdge, TreeError> {
        self.edges
            .get(index)
            .ok_or(TreeError::EdgeOutOfRange(index))
    }

    pub fn find_node(&self, label: &str) -> Option<NodeId> {
        self.nodes
            .iter()
            .position(|n| &*n.label == label)
            .map(NodeId)
    }

    pub fn has_vertex_sums(&self) -> bool {
        self.edges
            .iter()
            .any(|e| matches!(e.sum_type, SphericalType::Vertex(_)))
    }

    /// Every violated invariant; empty means the tree is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.nodes.len();
        if self.root.0 >= n {
            out.push(Violation::RootOutOfRange);
            return out;
        }
        if self.edges.len() + 1 != n {
            out.push(Violation::EdgeCount {
                nodes: n,
                edges: self.edges.len(),
            });
        }
        let mut present = vec![false; n];
        present[self.root.0] = true;
        let mut used_vertices: Vec<(NodeId, usize, usize)> = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let [a, b] = [e.ends[0].node, e.ends[1].node];
            if a.0 >= n || b.0 >= n {
                out.push(Violation::NodeOutOfRange { edge: i });
                continue;
            }
            if a == b {
                out.push(Violation::SelfLoop { edge: i });
                continue;
            }
            match (present[a.0], present[b.0]) {
                (false, true) => present[a.0] = true,
                (true, false) => present[b.0] = true,
                _ => out.push(Violation::NotGrowthOrder { edge: i }),
            }
            for end in &e.ends {
                self.check_end(i, e.sum_type, end, &mut used_vertices, &mut out);
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn ensure_valid(&self) -> Result<(), TreeError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(TreeError::Invalid(v))
        }
    }

    fn check_end(
        &self,
        edge: usize,
        sum_type: SphericalType,
        end: &SumEnd,
        used_vertices: &mut Vec<(NodeId, usize, usize)>,
        out: &mut Vec<Violation>,
    ) {
        let node = end.node;
        let atom = self.atom(node);
        let att = match (sum_type, end.attachment) {
            (SphericalType::Ordinary, None) => return,
            (SphericalType::Ordinary, Some(_)) => {
                out.push(Violation::UnexpectedAttachment { edge, node });
                return;
            }
            (_, None) => {
                out.push(Violation::MissingAttachment { edge, node });
                return;
            }
            (_, Some(att)) => att,
        };
        let Some(component) = atom.component(att.component) else {
            out.push(Violation::ComponentOutOfRange { edge, node });
            return;
        };
        match sum_type {
            SphericalType::Ordinary => unreachable!(),
            SphericalType::Cyclic(p) => {
                if att.vertex.is_some() {
                    out.push(Violation::UnexpectedAttachment { edge, node });
                } else if !component.has_order(p) {
                    out.push(Violation::OrderMismatch { edge, node });
                }
            }
            SphericalType::Vertex(t) => {
                let SingularComponent::Graph { .. } = component else {
                    out.push(Violation::NotAGraph { edge, node });
                    return;
                };
                let Some(v) = att.vertex else {
                    out.push(Violation::MissingAttachment { edge, node });
                    return;
                };
                if component.vertex(v) != Some(t) {
                    out.push(Violation::VertexMismatch { edge, node });
                    return;
                }
                let key = (node, att.component, v);
                if used_vertices.contains(&key) {
                    out.push(Violation::VertexReused { edge, node });
                } else {
                    used_vertices.push(key);
                }
            }
        }
    }

    /// Rebuilds the tree with the lexicographically least valid build order
    /// that follows the given preference order of edges. Every edge is
    /// re-oriented so that `ends[0]` is the newly attached node.
    pub(crate) fn normalized(nodes: Vec<Node>, preferred: Vec<SumEdge>, root: NodeId) -> Self {
        let mut present = vec![false; nodes.len()];
        if root.0 < nodes.len() {
            present[root.0] = true;
        }
        let mut remaining = preferred;
        let mut edges = Vec::with_capacity(remaining.len());
        loop {
            let next = remaining.iter().position(|e| {
                let (a, b) = (e.ends[0].node.0, e.ends[1].node.0);
                a < present.len() && b < present.len() && present[a] != present[b]
            });
            let Some(i) = next else { break };
            let mut e = remaining.remove(i);
            if present[e.ends[0].node.0] {
                e.ends.swap(0, 1);
            }
            present[e.ends[0].node.0] = true;
            edges.push(e);
        }
        // Whatever could not be placed is kept so that validation reports it.
        edges.extend(remaining);
        RealizationTree { nodes, edges, root }
    }

    /// Keeps the nodes flagged in `keep` and every edge between two kept
    /// nodes, re-indexed, rooted at `root` (which must be kept).
    pub(crate) fn induced(&self, keep: &[bool], root: NodeId) -> Self {
        let mut map = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if keep[i] {
                map[i] = nodes.len();
                nodes.push(node.clone());
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e.ends[0].node.0] && keep[e.ends[1].node.0])
            .map(|e| {
                let mut e = *e;
                for end in &mut e.ends {
                    end.node = NodeId(map[end.node.0]);
                }
                e
            })
            .collect();
        RealizationTree::normalized(nodes, edges, NodeId(map[root.0]))
    }

    /// Cuts the tree along edge `index`: returns the side holding the root
    /// and the far side rooted at its endpoint of the cut edge.
    pub fn cut(&self, index: usize) -> Result<(RealizationTree, RealizationTree), TreeError> {
        let e = *self.edge(index)?;
        let side = self.side_of(index, self.root);
        let far_root = if side[e.ends[0].node.0] {
            e.ends[1].node
        } else {
            e.ends[0].node
        };
        let far: Vec<bool> = side.iter().map(|s| !s).collect();
        Ok((self.induced(&side, self.root), self.induced(&far, far_root)))
    }

    /// Nodes reachable from `from` without crossing edge `index`.
    pub(crate) fn side_of(&self, index: usize, from: NodeId) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        seen[from.0] = true;
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            for (i, e) in self.edges.iter().enumerate() {
                if i == index {
                    continue;
                }
                if let Some(w) = e.other(v) {
                    if !seen[w.0] {
                        seen[w.0] = true;
                        stack.push(w);
                    }
                }
            }
        }
        seen
    }

    /// Same tree and edge set, built in another order and from another root.
    /// `order` lists edge indices; the result is not validated.
    pub fn reordered(&self, root: NodeId, order: &[usize]) -> Self {
        let edges = order.iter().map(|&i| self.edges[i]).collect();
        RealizationTree::normalized(self.nodes.clone(), edges, root)
    }
}

/// Incremental construction in build order.
#[derive(Debug, Clone)]
pub struct TreeBuilder {
    nodes: Vec<Node>,
    edges: Vec<SumEdge>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        TreeBuilder {
            nodes: Vec::new(),
            edges: Vec::new(),
        }
    }

    /// Adds a node; the first node added is the root.
    pub fn node(&mut self, label: &str, atom: Arc<Atom>) -> NodeId {
        self.nodes.push(Node {
            label: label.into(),
            atom,
        });
        NodeId(self.nodes.len() - 1)
    }

    /// Records the sum attaching `new` to `onto`.
    pub fn sum(
        &mut self,
        new: NodeId,
        onto: NodeId,
        sum_type: SphericalType,
        at_new: Option<Attachment>,
        at_onto: Option<Attachment>,
    ) -> &mut Self {
        self.edges.push(SumEdge {
            sum_type,
            ends: [
                SumEnd {
                    node: new,
                    attachment: at_new,
                },
                SumEnd {
                    node: onto,
                    attachment: at_onto,
                },
            ],
        });
        self
    }

    pub fn build(&self) -> RealizationTree {
        RealizationTree {
            nodes: self.nodes.clone(),
            edges: self.edges.clone(),
            root: NodeId(0),
        }
    }
}

impl Default for TreeBuilder {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests;
