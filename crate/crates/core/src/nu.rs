//! The number of `p`-cyclic sums that involve a vertex-free singular
//! component, and the graph statements behind its independence from the
//! realization.
//!
//! Two routes compute it. [`build_tp`] plus [`alpha_sum`] works on the
//! cyclicity graph `T_p`, whose nodes are the order-`p` circles of each
//! summand (set `C`) and, per summand with a vertex-bearing component, one
//! node for all of them together (set `N`). [`replay_count`] instead replays
//! the sums in build order on the actual singular components.

use thiserror::Error;

use crate::atoms::SingularComponent;
use crate::core2d::{ConeOrder, SphericalType};
use crate::sumtree::{efficiency_violations, NodeId, RealizationTree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NuError {
    #[error(transparent)]
    InvalidTree(#[from] TreeError),
    #[error("realization contains vertex sums")]
    HasVertexSums,
    #[error("realization is not efficient ({0} violations)")]
    Inefficient(usize),
    #[error("graph is not a tree")]
    NotATree,
    #[error("external node set is empty")]
    EmptyExternalSet,
    #[error("node {0} cannot be blown up")]
    NotBlowable(usize),
    #[error("cyclicity graph gives {tp} but replay gives {replay}")]
    RouteMismatch { tp: usize, replay: usize },
}

/// Union-find whose classes carry a flag that is or-ed on union.
#[derive(Debug, Clone)]
pub(crate) struct FlaggedDsu {
    parent: Vec<usize>,
    flag: Vec<bool>,
}

impl FlaggedDsu {
    pub(crate) fn new(flags: Vec<bool>) -> Self {
        FlaggedDsu {
            parent: (0..flags.len()).collect(),
            flag: flags,
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn flagged(&mut self, x: usize) -> bool {
        let r = self.find(x);
        self.flag[r]
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[rb] = ra;
            self.flag[ra] |= self.flag[rb];
        }
    }
}

/// Scores each edge of `order` with 1 when both ends already reach a flagged
/// node through earlier edges, else 0. With `invert`, the score is flipped.
fn prefix_scores(
    flags: Vec<bool>,
    edges: &[(usize, usize)],
    order: &[usize],
    invert: bool,
) -> Vec<u8> {
    assert!(
        is_permutation(order, edges.len()),
        "ordering is not a permutation of the edges"
    );
    let mut dsu = FlaggedDsu::new(flags);
    order
        .iter()
        .map(|&i| {
            let (a, b) = edges[i];
            let both = dsu.flagged(a) && dsu.flagged(b);
            dsu.union(a, b);
            u8::from(both != invert)
        })
        .collect()
}

pub(crate) fn is_permutation(order: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    order.len() == n
        && order
            .iter()
            .all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}

/// Plain undirected graph on nodes `0..node_count`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlainGraph {
    pub node_count: usize,
    pub edges: Vec<(usize, usize)>,
}

impl PlainGraph {
    pub fn new(node_count: usize, edges: Vec<(usize, usize)>) -> Self {
        PlainGraph { node_count, edges }
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.node_count];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    /// Valence-1 nodes.
    pub fn leaves(&self) -> Vec<bool> {
        self.degrees().into_iter().map(|d| d == 1).collect()
    }

    fn component_count(&self) -> usize {
        let mut dsu = FlaggedDsu::new(vec![false; self.node_count]);
        let mut count = self.node_count;
        for &(a, b) in &self.edges {
            if dsu.find(a) != dsu.find(b) {
                dsu.union(a, b);
                count -= 1;
            }
        }
        count
    }

    pub fn is_forest(&self) -> bool {
        self.edges
            .iter()
            .all(|&(a, b)| a != b && a < self.node_count && b < self.node_count)
            && self.component_count() + self.edges.len() == self.node_count
    }

    pub fn is_tree(&self) -> bool {
        self.node_count > 0 && self.is_forest() && self.edges.len() + 1 == self.node_count
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TpKind {
    /// A vertex-free circle.
    Cyclic,
    /// All vertex-bearing components of one summand.
    NonCyclic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TpNode {
    pub kind: TpKind,
    pub summand: Option<NodeId>,
    pub component: Option<usize>,
}

impl TpNode {
    pub fn bare(kind: TpKind) -> Self {
        TpNode {
            kind,
            summand: None,
            component: None,
        }
    }
}

/// The graph `T_p`: a forest on `C ⊔ N` with one edge per `p`-cyclic sum.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclicityGraph {
    nodes: Vec<TpNode>,
    edges: Vec<(usize, usize)>,
}

impl CyclicityGraph {
    pub fn new(nodes: Vec<TpNode>, edges: Vec<(usize, usize)>) -> Result<Self, NuError> {
        let g = CyclicityGraph { nodes, edges };
        if !g.plain().is_forest() {
            return Err(NuError::NotATree);
        }
        Ok(g)
    }

    /// Forest with the given node kinds and no provenance.
    pub fn from_kinds(kinds: &[TpKind], edges: Vec<(usize, usize)>) -> Result<Self, NuError> {
        Self::new(kinds.iter().map(|&k| TpNode::bare(k)).collect(), edges)
    }

    pub fn nodes(&self) -> &[TpNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn plain(&self) -> PlainGraph {
        PlainGraph::new(self.nodes.len(), self.edges.clone())
    }

    pub fn count(&self, kind: TpKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    fn n_flags(&self) -> Vec<bool> {
        self.nodes
            .iter()
            .map(|n| n.kind == TpKind::NonCyclic)
            .collect()
    }
}

fn check_realization(t: &RealizationTree) -> Result<(), NuError> {
    t.ensure_valid()?;
    if t.has_vertex_sums() {
        return Err(NuError::HasVertexSums);
    }
    let v = efficiency_violations(t)?;
    if !v.is_empty() {
        return Err(NuError::Inefficient(v.len()));
    }
    Ok(())
}

/// Builds `T_p` and the ordering of its edges induced by the build order.
pub fn build_tp(
    t: &RealizationTree,
    p: ConeOrder,
) -> Result<(CyclicityGraph, Vec<usize>), NuError> {
    check_realization(t)?;
    let mut nodes = Vec::new();
    let mut circle_node = Vec::with_capacity(t.nodes().len());
    let mut n_node = Vec::with_capacity(t.nodes().len());
    for (i, node) in t.nodes().iter().enumerate() {
        let summand = Some(NodeId(i));
        let mut circles = vec![None; node.atom.components().len()];
        let mut has_graph = false;
        for (j, c) in node.atom.components().iter().enumerate() {
            match c {
                SingularComponent::Circle(q) if *q == p => {
                    circles[j] = Some(nodes.len());
                    nodes.push(TpNode {
                        kind: TpKind::Cyclic,
                        summand,
                        component: Some(j),
                    });
                }
                SingularComponent::Circle(_) => {}
                SingularComponent::Graph { .. } => has_graph = true,
            }
        }
        circle_node.push(circles);
        n_node.push(has_graph.then(|| {
            nodes.push(TpNode {
                kind: TpKind::NonCyclic,
                summand,
                component: None,
            });
            nodes.len() - 1
        }));
    }
    let mut edges = Vec::new();
    for e in t.edges() {
        if e.sum_type != SphericalType::Cyclic(p) {
            continue;
        }
        let end_node = |k: usize| {
            let end = e.ends[k];
            let comp = end.attachment.expect("validated").component;
            circle_node[end.node.0][comp]
                .or(n_node[end.node.0])
                .expect("validated attachment carries order p")
        };
        edges.push((end_node(0), end_node(1)));
    }
    let order = (0..edges.len()).collect();
    Ok((CyclicityGraph::new(nodes, edges)?, order))
}

/// Per-edge values of α along `order`: 0 when both ends already reach `N`
/// through earlier edges, 1 otherwise.
pub fn alpha_values(g: &CyclicityGraph, order: &[usize]) -> Vec<u8> {
    prefix_scores(g.n_flags(), &g.edges, order, true)
}

/// Σα along `order`. Panics if `order` is not a permutation of the edges.
pub fn alpha_sum(g: &CyclicityGraph, order: &[usize]) -> usize {
    alpha_values(g, order).into_iter().map(usize::from).sum()
}

/// Replays the sums of a valid realization in build order on the singular
/// components and counts `p`-cyclic sums at which one of the two punctured
/// components has no vertex left.
///
/// Cyclic sums merge components; a vertex sum merges them and uses up one
/// vertex on each side. Vertex sums are accepted here, unlike in [`nu`].
pub fn replay_count(t: &RealizationTree, p: ConeOrder) -> Result<usize, NuError> {
    t.ensure_valid()?;
    let mut offset = Vec::with_capacity(t.nodes().len());
    let mut vertices: Vec<i64> = Vec::new();
    for node in t.nodes() {
        offset.push(vertices.len());
        vertices.extend(
            node.atom
                .components()
                .iter()
                .map(|c| c.vertex_count() as i64),
        );
    }
    let mut parent: Vec<usize> = (0..vertices.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut count = 0;
    for e in t.edges() {
        let comp = |k: usize| {
            let end = e.ends[k];
            end.attachment.map(|a| offset[end.node.0] + a.component)
        };
        let (Some(a), Some(b)) = (comp(0), comp(1)) else {
            continue;
        };
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        let merged = vertices[ra] + vertices[rb];
        match e.sum_type {
            SphericalType::Ordinary => continue,
            SphericalType::Cyclic(q) => {
                if q == p && (vertices[ra] == 0 || vertices[rb] == 0) {
                    count += 1;
                }
                parent[rb] = ra;
                vertices[ra] = merged;
            }
            SphericalType::Vertex(_) => {
                parent[rb] = ra;
                vertices[ra] = merged - 2;
            }
        }
    }
    Ok(count)
}

/// ν(p) of an efficient realization without vertex sums. Both routes are
/// evaluated and must agree.
pub fn nu(t: &RealizationTree, p: ConeOrder) -> Result<usize, NuError> {
    let (g, order) = build_tp(t, p)?;
    let tp = alpha_sum(&g, &order);
    let replay = replay_count(t, p)?;
    if tp != replay {
        return Err(NuError::RouteMismatch { tp, replay });
    }
    Ok(tp)
}

/// Per-edge values of β along `order`: 1 when both ends already reach the
/// external set through earlier edges.
pub fn beta_values(
    tree: &PlainGraph,
    external: &[bool],
    order: &[usize],
) -> Result<Vec<u8>, NuError> {
    if !tree.is_tree() {
        return Err(NuError::NotATree);
    }
    Ok(prefix_scores(external.to_vec(), &tree.edges, order, false))
}

pub fn beta_sum(tree: &PlainGraph, external: &[bool], order: &[usize]) -> Result<usize, NuError> {
    Ok(beta_values(tree, external, order)?
        .into_iter()
        .map(usize::from)
        .sum())
}

/// Euler characteristics of the circle-attached complex along an ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EulerRecord {
    pub chi_start: i64,
    pub chi_end: i64,
    pub beta_total: usize,
    /// Whether χ drops by exactly β(k) at every step.
    pub stepwise: bool,
}

/// Glues the external nodes of `tree` to a circle and tracks χ = V − E of the
/// component containing the circle as the edges of `order` are added.
pub fn euler_check(
    tree: &PlainGraph,
    external: &[bool],
    order: &[usize],
) -> Result<EulerRecord, NuError> {
    let betas = beta_values(tree, external, order)?;
    let ext: Vec<usize> = (0..tree.node_count).filter(|&v| external[v]).collect();
    if ext.is_empty() {
        return Err(NuError::EmptyExternalSet);
    }
    // The circle is subdivided at the external nodes: one arc between
    // consecutive ones, a single loop when there is only one.
    let arcs: Vec<(usize, usize)> = (0..ext.len())
        .map(|i| (ext[i], ext[(i + 1) % ext.len()]))
        .collect();

    let chi_after = |k: usize| -> i64 {
        let prefix: Vec<(usize, usize)> = order[..k].iter().map(|&i| tree.edges[i]).collect();
        let mut inside = vec![false; tree.node_count];
        let mut stack = ext.clone();
        for &v in &ext {
            inside[v] = true;
        }
        while let Some(v) = stack.pop() {
            for &(a, b) in prefix.iter().chain(arcs.iter()) {
                let w = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !inside[w] {
                    inside[w] = true;
                    stack.push(w);
                }
            }
        }
        let v = inside.iter().filter(|&&x| x).count() as i64;
        let e = arcs.len() as i64 + prefix.iter().filter(|(a, _)| inside[*a]).count() as i64;
        v - e
    };

    let chis: Vec<i64> = (0..=order.len()).map(chi_after).collect();
    let stepwise = betas
        .iter()
        .enumerate()
        .all(|(k, &b)| chis[k + 1] == chis[k] - i64::from(b));
    Ok(EulerRecord {
        chi_start: chis[0],
        chi_end: chis[order.len()],
        beta_total: betas.iter().map(|&b| usize::from(b)).sum(),
        stepwise,
    })
}

/// Replaces an `N` node of valence `v >= 2` by `v` valence-one `N` nodes.
/// Edge indices are unchanged, so orderings carry over.
pub fn blow_up(g: &CyclicityGraph, n: usize) -> Result<CyclicityGraph, NuError> {
    let node = g.nodes.get(n).ok_or(NuError::NotBlowable(n))?;
    let valence = g.edges.iter().filter(|&&(a, b)| a == n || b == n).count();
    if node.kind != TpKind::NonCyclic || valence < 2 {
        return Err(NuError::NotBlowable(n));
    }
    let mut nodes = g.nodes.clone();
    let mut edges = g.edges.clone();
    let mut first = true;
    for (a, b) in &mut edges {
        for end in [a, b] {
            if *end == n {
                if first {
                    first = false;
                } else {
                    *end = nodes.len();
                    nodes.push(*node);
                }
            }
        }
    }
    CyclicityGraph::new(nodes, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use TpKind::{Cyclic as C, NonCyclic as N};

    fn graph(kinds: &[TpKind], edges: &[(usize, usize)]) -> CyclicityGraph {
        CyclicityGraph::from_kinds(kinds, edges.to_vec()).unwrap()
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_sum(&graph(&[C, C], &[(0, 1)]), &[0]), 1);
        assert_eq!(alpha_sum(&graph(&[C, N], &[(0, 1)]), &[0]), 1);
        let path = graph(&[C, N, C], &[(0, 1), (1, 2)]);
        assert_eq!(alpha_sum(&path, &[0, 1]), 2);
        assert_eq!(alpha_sum(&path, &[1, 0]), 2);
        // Two N nodes joined directly: both ends are already in N.
        assert_eq!(alpha_sum(&graph(&[N, N], &[(0, 1)]), &[0]), 0);
    }

    #[test]
    fn beta_examples() {
        let edge = PlainGraph::new(2, vec![(0, 1)]);
        assert_eq!(beta_sum(&edge, &edge.leaves(), &[0]), Ok(1));

        let path = PlainGraph::new(4, vec![(0, 1), (1, 2), (2, 3)]);
        for order in (0..3).permutations(3) {
            assert_eq!(beta_sum(&path, &path.leaves(), &order), Ok(1));
        }

        for k in 2..=5usize {
            let star = PlainGraph::new(k + 1, (1..=k).map(|i| (0, i)).collect());
            for order in (0..k).permutations(k) {
                assert_eq!(beta_sum(&star, &star.leaves(), &order), Ok(k - 1));
            }
        }
    }

    #[test]
    fn beta_refuses_non_trees() {
        let cycle = PlainGraph::new(3, vec![(0, 1), (1, 2), (2, 0)]);
        assert_eq!(
            beta_sum(&cycle, &[true, true, true], &[0, 1, 2]),
            Err(NuError::NotATree)
        );
        let split = PlainGraph::new(4, vec![(0, 1), (2, 3)]);
        assert_eq!(
            beta_sum(&split, &split.leaves(), &[0, 1]),
            Err(NuError::NotATree)
        );
    }

    #[test]
    fn euler_examples() {
        let edge = PlainGraph::new(2, vec![(0, 1)]);
        let r = euler_check(&edge, &edge.leaves(), &[0]).unwrap();
        assert_eq!((r.chi_start, r.chi_end, r.beta_total), (0, -1, 1));
        assert!(r.stepwise);

        let star = PlainGraph::new(5, vec![(0, 1), (0, 2), (0, 3), (0, 4)]);
        let r = euler_check(&star, &star.leaves(), &[2, 0, 3, 1]).unwrap();
        assert_eq!((r.chi_start, r.chi_end, r.beta_total), (0, -3, 3));
        assert!(r.stepwise);

        let path = PlainGraph::new(3, vec![(0, 1), (1, 2)]);
        let r = euler_check(&path, &path.leaves(), &[1, 0]).unwrap();
        assert_eq!(r.beta_total, 1);
        assert_eq!(
            euler_check(&path, &[false; 3], &[0, 1]),
            Err(NuError::EmptyExternalSet)
        );
    }

    #[test]
    fn blow_up_examples() {
        let star = graph(&[N, C, C, C], &[(0, 1), (0, 2), (0, 3)]);
        let blown = blow_up(&star, 0).unwrap();
        assert_eq!(blown.count(N), 3);
        assert!(blown.plain().degrees().iter().all(|&d| d == 1));
        for order in (0..3).permutations(3) {
            assert_eq!(alpha_sum(&star, &order), alpha_sum(&blown, &order));
        }
        assert_eq!(blow_up(&star, 1), Err(NuError::NotBlowable(1)));
        let edge = graph(&[N, C], &[(0, 1)]);
        assert_eq!(blow_up(&edge, 0), Err(NuError::NotBlowable(0)));
    }

    #[test]
    fn cyclicity_graph_must_be_a_forest() {
        assert_eq!(
            CyclicityGraph::from_kinds(&[C, C, C], vec![(0, 1), (1, 2), (2, 0)]),
            Err(NuError::NotATree)
        );
    }
}
