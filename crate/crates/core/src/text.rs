//! Text format for atoms and realizations.
//!
//! ```text
//! # a knotted circle of order 3
//! atom Kp { circle 3 }
//!
//! realization A {
//!   node sp = S3c(3);
//!   node sq = S3c(2);
//!   node k = Kp;
//!   sum sq -> sp : ordinary;
//!   sum k -> sp : cyclic(3) at k.c0, sp.c0;
//! }
//! ```
//!
//! Nodes are declared before the sums; the first node is the root and the
//! sums are listed in build order, `sum A -> B` attaching the new node `A`
//! to `B`. Attachments name a component by its index in the atom (`cN` for
//! a circle, `gN` for a graph, `gN.vM` for a vertex of it) and may be left
//! out when only one choice fits.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use thiserror::Error;

use crate::atoms::{builtin_identity, is_reserved_name, Atom, SingularComponent};
use crate::core2d::{ConeOrder, SphericalType, VertexTriple};
use crate::sumtree::{Attachment, Node, NodeId, RealizationTree, SumEdge, SumEnd};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    pub name: String,
    pub tree: RealizationTree,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub atoms: Vec<Arc<Atom>>,
    pub realizations: Vec<Realization>,
}

impl Document {
    pub fn realization(&self, name: &str) -> Option<&RealizationTree> {
        self.realizations
            .iter()
            .find(|r| r.name == name)
            .map(|r| &r.tree)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

fn err_at(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

const PUNCTS: [&str; 10] = ["->", "{", "}", "(", ")", ",", ";", ":", "=", "."];

fn lex(input: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            i += 1;
            col += 1;
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let s: String = chars[start..i].iter().collect();
            let n = s
                .parse()
                .map_err(|_| err_at(pos, format!("integer `{s}` is too large")))?;
            out.push((Tok::Int(n), pos));
        } else if let Some(p) = PUNCTS.iter().find(|p| {
            p.chars()
                .enumerate()
                .all(|(k, pc)| chars.get(i + k) == Some(&pc))
        }) {
            i += p.len();
            col += p.len();
            out.push((Tok::Punct(p), pos));
        } else {
            return Err(err_at(pos, format!("unexpected character `{c}`")));
        }
    }
    out.push((Tok::Eof, Pos { line, column: col }));
    Ok(out)
}

/// A component reference as written, before it is checked against the atom.
#[derive(Debug, Clone, Copy)]
struct CompRef {
    graph: bool,
    component: usize,
    vertex: Option<usize>,
    pos: Pos,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    atoms: HashMap<String, Arc<Atom>>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        Err(err_at(
            self.pos(),
            format!("expected {wanted}, found {}", self.peek()),
        ))
    }

    fn punct(&mut self, p: &'static str) -> Result<Pos, ParseError> {
        if *self.peek() == Tok::Punct(p) {
            Ok(self.next().1)
        } else {
            self.unexpected(&format!("`{p}`"))
        }
    }

    fn eat_punct(&mut self, p: &'static str) -> bool {
        let hit = *self.peek() == Tok::Punct(p);
        if hit {
            self.next();
        }
        hit
    }

    fn keyword(&mut self, k: &str) -> Result<Pos, ParseError> {
        if matches!(self.peek(), Tok::Ident(s) if s == k) {
            Ok(self.next().1)
        } else {
            self.unexpected(&format!("`{k}`"))
        }
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.next() {
            (Tok::Ident(s), pos) => Ok((s, pos)),
            (t, pos) => Err(err_at(pos, format!("expected a name, found {t}"))),
        }
    }

    fn int(&mut self) -> Result<(u64, Pos), ParseError> {
        match self.next() {
            (Tok::Int(n), pos) => Ok((n, pos)),
            (t, pos) => Err(err_at(pos, format!("expected an integer, found {t}"))),
        }
    }

    fn order(&mut self) -> Result<ConeOrder, ParseError> {
        let (n, pos) = self.int()?;
        u32::try_from(n)
            .ok()
            .and_then(|n| ConeOrder::new(n).ok())
            .ok_or_else(|| err_at(pos, format!("order {n} is not at least 2")))
    }

    fn triple(&mut self) -> Result<VertexTriple, ParseError> {
        let pos = self.punct("(")?;
        let p = self.order()?;
        self.punct(",")?;
        let q = self.order()?;
        self.punct(",")?;
        let r = self.order()?;
        self.punct(")")?;
        VertexTriple::new(p.get(), q.get(), r.get()).map_err(|_| {
            err_at(
                pos,
                format!("vertex triple ({p},{q},{r}) is not admissible"),
            )
        })
    }

    fn document(&mut self) -> Result<Document, ParseError> {
        let mut doc = Document::default();
        let mut real_names = HashSet::new();
        loop {
            match self.peek() {
                Tok::Eof => return Ok(doc),
                Tok::Ident(k) if k == "atom" => {
                    let atom = self.atom_decl()?;
                    doc.atoms.push(atom);
                }
                Tok::Ident(k) if k == "realization" => {
                    self.next();
                    let (name, pos) = self.ident()?;
                    if !real_names.insert(name.clone()) {
                        return Err(err_at(pos, format!("realization `{name}` declared twice")));
                    }
                    let tree = self.realization_body(pos)?;
                    doc.realizations.push(Realization { name, tree });
                }
                _ => return self.unexpected("`atom` or `realization`"),
            }
        }
    }

    fn atom_decl(&mut self) -> Result<Arc<Atom>, ParseError> {
        self.keyword("atom")?;
        let (name, pos) = self.ident()?;
        if is_reserved_name(&name) {
            return Err(err_at(pos, format!("`{name}` is a reserved name")));
        }
        if self.atoms.contains_key(&name) {
            return Err(err_at(pos, format!("atom `{name}` declared twice")));
        }
        self.punct("{")?;
        let mut comps = Vec::new();
        while !self.eat_punct("}") {
            if self.is_keyword("circle") {
                self.next();
                comps.push(SingularComponent::Circle(self.order()?));
            } else if self.is_keyword("graph") {
                let gpos = self.next().1;
                self.punct("{")?;
                self.keyword("edges")?;
                let mut edges = vec![self.order()?];
                while matches!(self.peek(), Tok::Int(_)) {
                    edges.push(self.order()?);
                }
                self.punct(";")?;
                self.keyword("vertices")?;
                let mut vertices = vec![self.triple()?];
                while *self.peek() == Tok::Punct("(") {
                    vertices.push(self.triple()?);
                }
                self.punct("}")?;
                comps.push(
                    SingularComponent::graph(edges, vertices)
                        .map_err(|e| err_at(gpos, e.to_string()))?,
                );
            } else {
                return self.unexpected("`circle`, `graph` or `}`");
            }
        }
        let atom = Arc::new(Atom::new(&name, comps).map_err(|e| err_at(pos, e.to_string()))?);
        self.atoms.insert(name, atom.clone());
        Ok(atom)
    }

    fn atomref(&mut self) -> Result<Arc<Atom>, ParseError> {
        let (name, pos) = self.ident()?;
        let t = match name.as_str() {
            "S3o" => SphericalType::Ordinary,
            "S3c" => {
                self.punct("(")?;
                let p = self.order()?;
                self.punct(")")?;
                SphericalType::Cyclic(p)
            }
            "S3v" => SphericalType::Vertex(self.triple()?),
            _ => {
                return self
                    .atoms
                    .get(&name)
                    .cloned()
                    .ok_or_else(|| err_at(pos, format!("unknown atom `{name}`")))
            }
        };
        Ok(Arc::new(builtin_identity(t)))
    }

    fn sumtype(&mut self) -> Result<SphericalType, ParseError> {
        let (k, pos) = self.ident()?;
        match k.as_str() {
            "ordinary" => Ok(SphericalType::Ordinary),
            "cyclic" => {
                self.punct("(")?;
                let p = self.order()?;
                self.punct(")")?;
                Ok(SphericalType::Cyclic(p))
            }
            "vertex" => Ok(SphericalType::Vertex(self.triple()?)),
            _ => Err(err_at(pos, format!("unknown sum type `{k}`"))),
        }
    }

    fn compref(&mut self) -> Result<(String, CompRef), ParseError> {
        let (node, _) = self.ident()?;
        self.punct(".")?;
        let (c, pos) = self.ident()?;
        let parse_index = |s: &str, prefix: char| -> Option<usize> {
            s.strip_prefix(prefix)
                .filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
                .and_then(|d| d.parse().ok())
        };
        let (graph, component) = if let Some(i) = parse_index(&c, 'c') {
            (false, i)
        } else if let Some(i) = parse_index(&c, 'g') {
            (true, i)
        } else {
            return Err(err_at(pos, format!("expected `cN` or `gN`, found `{c}`")));
        };
        let mut vertex = None;
        if graph && self.eat_punct(".") {
            let (v, vpos) = self.ident()?;
            vertex = Some(
                parse_index(&v, 'v')
                    .ok_or_else(|| err_at(vpos, format!("expected `vN`, found `{v}`")))?,
            );
        }
        Ok((
            node,
            CompRef {
                graph,
                component,
                vertex,
                pos,
            },
        ))
    }

    fn realization_body(&mut self, name_pos: Pos) -> Result<RealizationTree, ParseError> {
        self.punct("{")?;
        let mut nodes: Vec<Node> = Vec::new();
        let mut ids: HashMap<String, usize> = HashMap::new();
        let mut edges: Vec<SumEdge> = Vec::new();
        let mut edge_pos: Vec<Pos> = Vec::new();
        let mut used_vertices: HashSet<(usize, Attachment)> = HashSet::new();
        while self.is_keyword("node") {
            self.next();
            let (id, pos) = self.ident()?;
            if ids.contains_key(&id) {
                return Err(err_at(pos, format!("node `{id}` declared twice")));
            }
            self.punct("=")?;
            let atom = self.atomref()?;
            self.eat_punct(";");
            ids.insert(id.clone(), nodes.len());
            nodes.push(Node {
                label: Arc::from(id),
                atom,
            });
        }
        if nodes.is_empty() {
            return self.unexpected("`node`");
        }
        while self.is_keyword("sum") {
            let sum_pos = self.next().1;
            let node_ref = |p: &mut Parser| -> Result<usize, ParseError> {
                let (id, pos) = p.ident()?;
                ids.get(&id)
                    .copied()
                    .ok_or_else(|| err_at(pos, format!("unknown node `{id}`")))
            };
            let new = node_ref(self)?;
            self.punct("->")?;
            let onto = node_ref(self)?;
            if new == onto {
                return Err(err_at(sum_pos, "a node cannot be summed with itself"));
            }
            self.punct(":")?;
            let sum_type = self.sumtype()?;
            let mut given: [Option<CompRef>; 2] = [None, None];
            if self.is_keyword("at") {
                self.next();
                loop {
                    let (id, c) = self.compref()?;
                    let slot = match ids.get(&id) {
                        Some(&n) if n == new => 0,
                        Some(&n) if n == onto => 1,
                        _ => {
                            return Err(err_at(c.pos, format!("`{id}` is not an end of this sum")))
                        }
                    };
                    if given[slot].replace(c).is_some() {
                        return Err(err_at(c.pos, format!("attachment at `{id}` given twice")));
                    }
                    if !self.eat_punct(",") {
                        break;
                    }
                }
            }
            self.eat_punct(";");
            let mut ends = [new, onto].map(|n| SumEnd {
                node: NodeId(n),
                attachment: None,
            });
            for (k, end) in ends.iter_mut().enumerate() {
                let atom = &nodes[end.node.0].atom;
                end.attachment = resolve_attachment(
                    atom,
                    end.node.0,
                    sum_type,
                    given[k],
                    &used_vertices,
                    sum_pos,
                    &nodes[end.node.0].label,
                )?;
                if let Some(a) = end.attachment.filter(|a| a.vertex.is_some()) {
                    used_vertices.insert((end.node.0, a));
                }
            }
            edges.push(SumEdge { sum_type, ends });
            edge_pos.push(sum_pos);
        }
        self.punct("}")?;
        let tree = RealizationTree::from_parts(nodes, edges, NodeId(0));
        if let Some(v) = tree.validate().first() {
            let pos = violation_edge(v)
                .and_then(|e| edge_pos.get(e).copied())
                .unwrap_or(name_pos);
            return Err(err_at(pos, v.to_string()));
        }
        Ok(tree)
    }
}

fn violation_edge(v: &crate::sumtree::Violation) -> Option<usize> {
    use crate::sumtree::Violation::*;
    match *v {
        RootOutOfRange | EdgeCount { .. } => None,
        NodeOutOfRange { edge }
        | SelfLoop { edge }
        | NotGrowthOrder { edge }
        | UnexpectedAttachment { edge, .. }
        | MissingAttachment { edge, .. }
        | ComponentOutOfRange { edge, .. }
        | OrderMismatch { edge, .. }
        | NotAGraph { edge, .. }
        | VertexMismatch { edge, .. }
        | VertexReused { edge, .. } => Some(edge),
    }
}

/// Checks an explicit attachment against the atom, or infers it when only
/// one choice fits.
fn resolve_attachment(
    atom: &Atom,
    node: usize,
    t: SphericalType,
    given: Option<CompRef>,
    used: &HashSet<(usize, Attachment)>,
    sum_pos: Pos,
    label: &str,
) -> Result<Option<Attachment>, ParseError> {
    if let Some(c) = given {
        let comp = atom
            .component(c.component)
            .ok_or_else(|| err_at(c.pos, format!("`{label}` has no component {}", c.component)))?;
        if comp.is_circle() == c.graph {
            let kind = if comp.is_circle() { "circle" } else { "graph" };
            return Err(err_at(
                c.pos,
                format!("component {} of `{label}` is a {kind}", c.component),
            ));
        }
        return Ok(Some(match c.vertex {
            Some(v) => Attachment::vertex(c.component, v),
            None => Attachment::component(c.component),
        }));
    }
    let options: Vec<Attachment> = match t {
        SphericalType::Ordinary => return Ok(None),
        SphericalType::Cyclic(p) => atom
            .components()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.has_order(p))
            .map(|(i, _)| Attachment::component(i))
            .collect(),
        SphericalType::Vertex(v) => atom
            .components()
            .iter()
            .enumerate()
            .flat_map(|(i, c)| {
                (0..c.vertex_count())
                    .filter(move |&j| c.vertex(j) == Some(v))
                    .map(move |j| Attachment::vertex(i, j))
            })
            .filter(|a| !used.contains(&(node, *a)))
            .collect(),
    };
    match options.as_slice() {
        [only] => Ok(Some(*only)),
        [] => Err(err_at(
            sum_pos,
            format!("`{label}` has nowhere to take a {t} sum"),
        )),
        _ => Err(err_at(
            sum_pos,
            format!("attachment at `{label}` is ambiguous; give it with `at`"),
        )),
    }
}

pub fn parse(input: &str) -> Result<Document, ParseError> {
    let mut p = Parser {
        toks: lex(input)?,
        at: 0,
        atoms: HashMap::new(),
    };
    p.document()
}

fn write_component(out: &mut String, c: &SingularComponent) {
    match c {
        SingularComponent::Circle(p) => {
            let _ = write!(out, "circle {p}");
        }
        SingularComponent::Graph {
            edge_orders,
            vertex_triples,
        } => {
            out.push_str("graph { edges");
            for o in edge_orders {
                let _ = write!(out, " {o}");
            }
            out.push_str("; vertices");
            for v in vertex_triples {
                let _ = write!(out, " {v}");
            }
            out.push_str(" }");
        }
    }
}

pub fn serialize_atom(a: &Atom) -> String {
    let mut out = format!("atom {} {{", a.name());
    for c in a.components() {
        out.push(' ');
        write_component(&mut out, c);
    }
    out.push_str(" }\n");
    out
}

fn sumtype_text(t: SphericalType) -> String {
    // The display form of a type is its text form.
    t.to_string()
}

/// Text of one realization. The root is written first; other nodes keep
/// their relative order.
pub fn serialize_realization(name: &str, t: &RealizationTree) -> String {
    let root = t.root().0;
    let order: Vec<usize> = std::iter::once(root)
        .chain((0..t.nodes().len()).filter(|&i| i != root))
        .collect();
    let mut out = format!("realization {name} {{\n");
    for &i in &order {
        let n = &t.nodes()[i];
        let _ = writeln!(out, "  node {} = {};", n.label, n.atom.name());
    }
    for e in t.edges() {
        let label = |k: usize| &t.node(e.ends[k].node).label;
        let _ = write!(
            out,
            "  sum {} -> {} : {}",
            label(0),
            label(1),
            sumtype_text(e.sum_type)
        );
        if e.ends.iter().any(|s| s.attachment.is_some()) {
            let refs: Vec<String> = e
                .ends
                .iter()
                .filter_map(|s| {
                    let a = s.attachment?;
                    let comp = t.atom(s.node).component(a.component)?;
                    let kind = if comp.is_circle() { 'c' } else { 'g' };
                    let mut r = format!("{}.{kind}{}", t.node(s.node).label, a.component);
                    if let Some(v) = a.vertex {
                        let _ = write!(r, ".v{v}");
                    }
                    Some(r)
                })
                .collect();
            let _ = write!(out, " at {}", refs.join(", "));
        }
        out.push_str(";\n");
    }
    out.push_str("}\n");
    out
}

pub fn serialize(doc: &Document) -> String {
    let mut parts: Vec<String> = doc.atoms.iter().map(|a| serialize_atom(a)).collect();
    parts.extend(
        doc.realizations
            .iter()
            .map(|r| serialize_realization(&r.name, &r.tree)),
    );
    parts.join("\n")
}
