//! Instance generators for the verification suites: unlabeled trees and
//! forests, build orders, and realizations over a small atom alphabet.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::atoms::{builtin_identity, Atom, SingularComponent};
use crate::core2d::{ConeOrder, SphericalType, VertexTriple};
use crate::nu::PlainGraph;
use crate::scenarios::theta_component;
use crate::sumtree::{Attachment, Node, NodeId, RealizationTree, SumEdge, SumEnd};

/// AHU code of `t` rooted at `root`.
fn rooted_code(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut children: Vec<String> = adj[v]
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| rooted_code(adj, w, v))
        .collect();
    children.sort();
    format!("({})", children.concat())
}

fn adjacency(g: &PlainGraph) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); g.node_count];
    for &(a, b) in &g.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

/// Canonical code of a free tree: the least rooted code over its centers.
pub fn tree_code(g: &PlainGraph) -> String {
    let adj = adjacency(g);
    let n = g.node_count;
    if n <= 2 {
        return rooted_code(&adj, 0, usize::MAX);
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut left = n;
    while left > 2 {
        left -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &w in &adj[v] {
                degree[w] -= 1;
                if degree[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    layer
        .iter()
        .map(|&c| rooted_code(&adj, c, usize::MAX))
        .min()
        .expect("a tree has a center")
}

/// All unlabeled trees on `n >= 1` nodes, one per isomorphism class. Node 0
/// is the first node and every edge `(child, parent)` has `parent < child`.
pub fn free_trees(n: usize) -> Vec<PlainGraph> {
    assert!(n >= 1);
    let mut level = vec![PlainGraph::new(1, Vec::new())];
    for size in 2..=n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for t in &level {
            for v in 0..t.node_count {
                let mut edges = t.edges.clone();
                edges.push((size - 1, v));
                let g = PlainGraph::new(size, edges);
                if seen.insert(tree_code(&g)) {
                    next.push(g);
                }
            }
        }
        level = next;
    }
    level
}

/// Forests without isolated nodes having between 1 and `max_edges` edges,
/// one per isomorphism class.
pub fn forests(max_edges: usize) -> Vec<PlainGraph> {
    let trees_by_edges: Vec<Vec<PlainGraph>> = (0..=max_edges).map(|e| free_trees(e + 1)).collect();
    let mut out = Vec::new();
    // Parts are (edge count, tree index) pairs in non-increasing order so
    // that each multiset of trees is produced once.
    fn rec(
        remaining: usize,
        max_part: (usize, usize),
        parts: &mut Vec<(usize, usize)>,
        trees: &[Vec<PlainGraph>],
        out: &mut Vec<PlainGraph>,
    ) {
        if remaining == 0 {
            if !parts.is_empty() {
                let mut g = PlainGraph::new(0, Vec::new());
                for &(e, i) in parts.iter() {
                    let t = &trees[e][i];
                    let off = g.node_count;
                    g.edges
                        .extend(t.edges.iter().map(|&(a, b)| (a + off, b + off)));
                    g.node_count += t.node_count;
                }
                out.push(g);
            }
            return;
        }
        for e in (1..=remaining.min(max_part.0)).rev() {
            let top = if e == max_part.0 {
                max_part.1
            } else {
                trees[e].len() - 1
            };
            for i in (0..=top).rev() {
                parts.push((e, i));
                rec(remaining - e, (e, i), parts, trees, out);
                parts.pop();
            }
        }
    }
    for total in 1..=max_edges {
        rec(
            total,
            (total, trees_by_edges[total].len() - 1),
            &mut Vec::new(),
            &trees_by_edges,
            &mut out,
        );
    }
    out
}

/// Every valid build order of the edges of a tree from `root`, as sequences
/// of edge indices.
pub fn growth_orders(node_count: usize, edges: &[(usize, usize)], root: usize) -> Vec<Vec<usize>> {
    fn rec(
        edges: &[(usize, usize)],
        present: &mut Vec<bool>,
        used: &mut Vec<bool>,
        seq: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if seq.len() == edges.len() {
            out.push(seq.clone());
            return;
        }
        for (i, &(a, b)) in edges.iter().enumerate() {
            if used[i] || present[a] == present[b] {
                continue;
            }
            let new = if present[a] { b } else { a };
            used[i] = true;
            present[new] = true;
            seq.push(i);
            rec(edges, present, used, seq, out);
            seq.pop();
            present[new] = false;
            used[i] = false;
        }
    }
    let mut present = vec![false; node_count];
    present[root] = true;
    let mut out = Vec::new();
    rec(
        edges,
        &mut present,
        &mut vec![false; edges.len()],
        &mut Vec::new(),
        &mut out,
    );
    out
}

/// Every (root, build order) of a realization, as re-built trees.
pub fn all_build_orders(t: &RealizationTree) -> Vec<RealizationTree> {
    let pairs: Vec<(usize, usize)> = t
        .edges()
        .iter()
        .map(|e| (e.ends[0].node.0, e.ends[1].node.0))
        .collect();
    let mut out = Vec::new();
    for root in 0..t.nodes().len() {
        for order in growth_orders(t.nodes().len(), &pairs, root) {
            out.push(t.reordered(NodeId(root), &order));
        }
    }
    out
}

/// Atoms instances are drawn from.
#[derive(Debug, Clone)]
pub struct Alphabet {
    pub atoms: Vec<Arc<Atom>>,
}

fn order(p: u32) -> ConeOrder {
    ConeOrder::new(p).expect("order >= 2")
}

impl Alphabet {
    pub fn new(atoms: Vec<Arc<Atom>>) -> Self {
        Alphabet { atoms }
    }

    /// Four declared atoms over order 2 plus the identities they can meet:
    /// `M` (no singular set), `K` (a circle), `G` (a theta graph with two
    /// `(2,2,2)` vertices), `KG` (a circle and a theta graph), and `S3o`,
    /// `S3c(2)`, `S3v(2,2,2)`.
    pub fn standard() -> Self {
        let t = VertexTriple::new(2, 2, 2).expect("admissible");
        let atom = |name: &str, comps: Vec<SingularComponent>| {
            Arc::new(Atom::new(name, comps).expect("valid atom"))
        };
        Alphabet::new(vec![
            atom("M", vec![]),
            atom("K", vec![SingularComponent::Circle(order(2))]),
            atom("G", vec![theta_component(t)]),
            atom(
                "KG",
                vec![SingularComponent::Circle(order(2)), theta_component(t)],
            ),
            Arc::new(builtin_identity(SphericalType::Ordinary)),
            Arc::new(builtin_identity(SphericalType::Cyclic(order(2)))),
            Arc::new(builtin_identity(SphericalType::Vertex(t))),
        ])
    }

    /// A leaner alphabet for exhaustive runs: `M` and `N` (no singular set),
    /// `K` (a circle of order 2), `G` (a theta graph with two `(2,2,2)`
    /// vertices), and `S3o`, `S3c(2)`, `S3v(2,2,2)`.
    pub fn confluence() -> Self {
        let t = VertexTriple::new(2, 2, 2).expect("admissible");
        let atom = |name: &str, comps: Vec<SingularComponent>| {
            Arc::new(Atom::new(name, comps).expect("valid atom"))
        };
        Alphabet::new(vec![
            atom("M", vec![]),
            atom("N", vec![]),
            atom("K", vec![SingularComponent::Circle(order(2))]),
            atom("G", vec![theta_component(t)]),
            Arc::new(builtin_identity(SphericalType::Ordinary)),
            Arc::new(builtin_identity(SphericalType::Cyclic(order(2)))),
            Arc::new(builtin_identity(SphericalType::Vertex(t))),
        ])
    }

    /// Atoms for the cyclic-sum invariant: circles and vertex-bearing graphs
    /// carrying order `p`, with identities `S3o`, `S3c(p)`, `S3v(2,2,p)`.
    pub fn cyclic(p: u32) -> Self {
        let t = VertexTriple::new(2, 2, p).expect("admissible");
        let c = SingularComponent::Circle(order(p));
        let atom = |name: &str, comps: Vec<SingularComponent>| {
            Arc::new(Atom::new(name, comps).expect("valid atom"))
        };
        Alphabet::new(vec![
            atom("M", vec![]),
            atom("K", vec![c.clone()]),
            atom("KK", vec![c.clone(), c.clone()]),
            atom("G", vec![theta_component(t)]),
            atom("KG", vec![c, theta_component(t)]),
            Arc::new(builtin_identity(SphericalType::Ordinary)),
            Arc::new(builtin_identity(SphericalType::Cyclic(order(p)))),
            Arc::new(builtin_identity(SphericalType::Vertex(t))),
        ])
    }
}

/// One way of summing two given atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SumOption {
    pub sum_type: SphericalType,
    pub at_new: Option<Attachment>,
    pub at_onto: Option<Attachment>,
}

fn attachments_for(atom: &Atom, t: SphericalType) -> Vec<Attachment> {
    let mut out = Vec::new();
    for (i, c) in atom.components().iter().enumerate() {
        match t {
            SphericalType::Ordinary => {}
            SphericalType::Cyclic(p) => {
                if c.has_order(p) {
                    out.push(Attachment::component(i));
                }
            }
            SphericalType::Vertex(v) => {
                for j in 0..c.vertex_count() {
                    if c.vertex(j) == Some(v) {
                        out.push(Attachment::vertex(i, j));
                    }
                }
            }
        }
    }
    out
}

/// Every sum type and attachment pair available between `new` and `onto`,
/// ordinary first. With `allow_vertex` false, vertex sums are left out.
pub fn sum_options(new: &Atom, onto: &Atom, allow_vertex: bool) -> Vec<SumOption> {
    let caps_new = crate::atoms::puncture_capabilities(new);
    let caps_onto = crate::atoms::puncture_capabilities(onto);
    let mut out = Vec::new();
    for &t in caps_new.intersection(&caps_onto) {
        match t {
            SphericalType::Ordinary => out.push(SumOption {
                sum_type: t,
                at_new: None,
                at_onto: None,
            }),
            SphericalType::Vertex(_) if !allow_vertex => {}
            _ => {
                for a in attachments_for(new, t) {
                    for b in attachments_for(onto, t) {
                        out.push(SumOption {
                            sum_type: t,
                            at_new: Some(a),
                            at_onto: Some(b),
                        });
                    }
                }
            }
        }
    }
    out
}

fn uses_vertex(used: &[(usize, Attachment)], node: usize, att: Option<Attachment>) -> bool {
    matches!(att, Some(a) if a.vertex.is_some() && used.contains(&(node, a)))
}

/// Calls `visit` on every valid realization whose shape is a tree from
/// [`free_trees`] with a number of edges in `edges`, whose nodes are labelled
/// from `alphabet` and whose sums range over [`sum_options`]. The build
/// order follows the shape's edge list, from node 0.
///
/// Shapes are distinct up to isomorphism; labelings of a symmetric shape
/// may repeat up to isomorphism.
pub fn for_each_realization<F>(
    alphabet: &Alphabet,
    edges: RangeInclusive<usize>,
    allow_vertex: bool,
    mut visit: F,
) where
    F: FnMut(&RealizationTree),
{
    let max_edges = *edges.end();
    let labels: Vec<Arc<str>> = (0..=max_edges)
        .map(|i| Arc::from(format!("n{i}")))
        .collect();
    let k = alphabet.atoms.len();
    let options: Vec<Vec<Vec<SumOption>>> = alphabet
        .atoms
        .iter()
        .map(|a| {
            alphabet
                .atoms
                .iter()
                .map(|b| sum_options(a, b, allow_vertex))
                .collect()
        })
        .collect();

    struct Ctx<'a, F> {
        shape: &'a PlainGraph,
        atoms: &'a [Arc<Atom>],
        options: &'a [Vec<Vec<SumOption>>],
        labels: &'a [Arc<str>],
        visit: &'a mut F,
    }

    fn edges_rec<F: FnMut(&RealizationTree)>(
        ctx: &mut Ctx<'_, F>,
        choice: &[usize],
        edges: &mut Vec<SumEdge>,
        used: &mut Vec<(usize, Attachment)>,
    ) {
        let i = edges.len();
        if i == ctx.shape.edges.len() {
            let nodes = choice
                .iter()
                .enumerate()
                .map(|(n, &a)| Node {
                    label: ctx.labels[n].clone(),
                    atom: ctx.atoms[a].clone(),
                })
                .collect();
            let t = RealizationTree::from_parts(nodes, edges.clone(), NodeId(0));
            (ctx.visit)(&t);
            return;
        }
        let (new, onto) = ctx.shape.edges[i];
        for opt in &ctx.options[choice[new]][choice[onto]] {
            if uses_vertex(used, new, opt.at_new) || uses_vertex(used, onto, opt.at_onto) {
                continue;
            }
            let mark = used.len();
            for (node, att) in [(new, opt.at_new), (onto, opt.at_onto)] {
                if let Some(a) = att.filter(|a| a.vertex.is_some()) {
                    used.push((node, a));
                }
            }
            edges.push(SumEdge {
                sum_type: opt.sum_type,
                ends: [
                    SumEnd {
                        node: NodeId(new),
                        attachment: opt.at_new,
                    },
                    SumEnd {
                        node: NodeId(onto),
                        attachment: opt.at_onto,
                    },
                ],
            });
            edges_rec(ctx, choice, edges, used);
            edges.pop();
            used.truncate(mark);
        }
    }

    for n in edges.map(|e| e + 1) {
        for shape in free_trees(n) {
            let mut choice = vec![0usize; n];
            loop {
                let mut ctx = Ctx {
                    shape: &shape,
                    atoms: &alphabet.atoms,
                    options: &options,
                    labels: &labels,
                    visit: &mut visit,
                };
                edges_rec(&mut ctx, &choice, &mut Vec::new(), &mut Vec::new());
                // Next labeling in mixed radix.
                let mut pos = 0;
                loop {
                    if pos == n {
                        break;
                    }
                    choice[pos] += 1;
                    if choice[pos] < k {
                        break;
                    }
                    choice[pos] = 0;
                    pos += 1;
                }
                if pos == n {
                    break;
                }
            }
        }
    }
}

/// A random valid realization with `edges` sums: each new node is a random
/// atom glued to a random existing node by a random available sum.
pub fn random_realization<R: Rng>(
    rng: &mut R,
    alphabet: &Alphabet,
    edges: usize,
    allow_vertex: bool,
) -> RealizationTree {
    let pick = |rng: &mut R| {
        alphabet
            .atoms
            .choose(rng)
            .expect("non-empty alphabet")
            .clone()
    };
    let mut nodes = vec![Node {
        label: Arc::from("n0"),
        atom: pick(rng),
    }];
    let mut sums = Vec::new();
    let mut used: Vec<(usize, Attachment)> = Vec::new();
    for i in 1..=edges {
        let atom = pick(rng);
        let onto = rng.gen_range(0..nodes.len());
        let opts: Vec<SumOption> = sum_options(&atom, &nodes[onto].atom, allow_vertex)
            .into_iter()
            .filter(|o| !uses_vertex(&used, onto, o.at_onto))
            .collect();
        let opt = *opts
            .choose(rng)
            .expect("ordinary sums are always available");
        for (node, att) in [(i, opt.at_new), (onto, opt.at_onto)] {
            if let Some(a) = att.filter(|a| a.vertex.is_some()) {
                used.push((node, a));
            }
        }
        nodes.push(Node {
            label: Arc::from(format!("n{i}")),
            atom,
        });
        sums.push(SumEdge {
            sum_type: opt.sum_type,
            ends: [
                SumEnd {
                    node: NodeId(i),
                    attachment: opt.at_new,
                },
                SumEnd {
                    node: NodeId(onto),
                    attachment: opt.at_onto,
                },
            ],
        });
    }
    RealizationTree::from_parts(nodes, sums, NodeId(0))
}
