//! Finite directed graphs with named vertices and edges, paths, cycles,
//! and the combinatorial layer under the algebra: disjoint-cycles tests,
//! hereditary saturated restrictions, and the path family P_c of a cycle.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use thiserror::Error;

/// Errors from graph parsing, validation, and path construction.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate {kind} identifier `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("edge `{edge}` references undeclared vertex `{vertex}`")]
    UndeclaredVertex { edge: String, vertex: String },
    #[error("graph has no vertices")]
    Empty,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("vertex set is not hereditary: edge `{edge}` leaves it")]
    NotHereditary { edge: String },
    #[error("vertex set is not saturated: vertex `{vertex}` is forced into it")]
    NotSaturated { vertex: String },
    #[error("`{0}` is not a cycle of this graph")]
    NotACycle(String),
    #[error("graph does not have disjoint cycles")]
    NotDisjointCycles,
    #[error("paths are not composable at `{0}`")]
    NotComposable(String),
    #[error("path word `{word}` is ambiguous: {detail}")]
    AmbiguousWord { word: String, detail: String },
    #[error("path word `{0}` does not spell a path")]
    BadWord(String),
}

/// Index of a vertex in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(u32);

/// Index of an edge in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct EdgeRec {
    name: String,
    src: VertexId,
    dst: VertexId,
}

/// A finite directed graph. Vertices and edges keep their declaration
/// order, which fixes every enumeration the library produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<EdgeRec>,
    out: Vec<Vec<EdgeId>>,
    into: Vec<Vec<EdgeId>>,
}

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Graph {
    /// Parses the line format: `v <id>`, `e <id> <src> <dst>`, `#` comments.
    pub fn parse(text: &str) -> Result<Graph, GraphError> {
        let mut vertices: Vec<String> = Vec::new();
        let mut edges: Vec<(String, String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            match fields.as_slice() {
                ["v", id] => vertices.push((*id).to_string()),
                ["e", id, src, dst] => {
                    edges.push(((*id).to_string(), (*src).to_string(), (*dst).to_string()))
                }
                _ => {
                    return Err(GraphError::Parse {
                        line,
                        message: format!("expected `v <id>` or `e <id> <src> <dst>`, got `{body}`"),
                    })
                }
            }
        }
        let edge_refs: Vec<(&str, &str, &str)> =
            edges.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
        let vertex_refs: Vec<&str> = vertices.iter().map(String::as_str).collect();
        Graph::build(&vertex_refs, &edge_refs)
    }

    /// Builds a graph from vertex names and (edge, src, dst) triples.
    pub fn build(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<Graph, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut g = Graph {
            vertices: Vec::new(),
            edges: Vec::new(),
            out: Vec::new(),
            into: Vec::new(),
        };
        let mut seen_v = BTreeSet::new();
        for &name in vertices {
            if !valid_ident(name) {
                return Err(GraphError::Parse {
                    line: 0,
                    message: format!("bad vertex identifier `{name}`"),
                });
            }
            if !seen_v.insert(name.to_string()) {
                return Err(GraphError::Duplicate { kind: "vertex", name: name.to_string() });
            }
            g.vertices.push(name.to_string());
            g.out.push(Vec::new());
            g.into.push(Vec::new());
        }
        let mut seen_e = BTreeSet::new();
        for &(name, src, dst) in edges {
            if !valid_ident(name) {
                return Err(GraphError::Parse {
                    line: 0,
                    message: format!("bad edge identifier `{name}`"),
                });
            }
            if !seen_e.insert(name.to_string()) {
                return Err(GraphError::Duplicate { kind: "edge", name: name.to_string() });
            }
            let find = |v: &str| -> Result<VertexId, GraphError> {
                g.vertex_id(v).map_err(|_| GraphError::UndeclaredVertex {
                    edge: name.to_string(),
                    vertex: v.to_string(),
                })
            };
            let (src, dst) = (find(src)?, find(dst)?);
            let id = EdgeId(g.edges.len() as u32);
            g.edges.push(EdgeRec { name: name.to_string(), src, dst });
            g.out[src.index()].push(id);
            g.into[dst.index()].push(id);
        }
        Ok(g)
    }

    /// Serializes back to the line format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            let _ = writeln!(s, "v {v}");
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "e {} {} {}",
                e.name,
                self.vertex_name(e.src),
                self.vertex_name(e.dst)
            );
        }
        s
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len() as u32).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.index()]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e.index()].name
    }

    pub fn vertex_id(&self, name: &str) -> Result<VertexId, GraphError> {
        self.vertices
            .iter()
            .position(|v| v == name)
            .map(|i| VertexId(i as u32))
            .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn edge_id(&self, name: &str) -> Result<EdgeId, GraphError> {
        self.edges
            .iter()
            .position(|e| e.name == name)
            .map(|i| EdgeId(i as u32))
            .ok_or_else(|| GraphError::UnknownEdge(name.to_string()))
    }

    /// Source vertex s(e).
    pub fn source(&self, e: EdgeId) -> VertexId {
        self.edges[e.index()].src
    }

    /// Range vertex r(e).
    pub fn range(&self, e: EdgeId) -> VertexId {
        self.edges[e.index()].dst
    }

    /// Edges emitted by v, in declaration order.
    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out[v.index()]
    }

    /// Edges received by v, in declaration order.
    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.into[v.index()]
    }

    pub fn is_sink(&self, v: VertexId) -> bool {
        self.out[v.index()].is_empty()
    }

    pub fn is_source(&self, v: VertexId) -> bool {
        self.into[v.index()].is_empty()
    }

    pub fn sinks(&self) -> Vec<VertexId> {
        self.vertex_ids().filter(|&v| self.is_sink(v)).collect()
    }

    pub fn sources(&self) -> Vec<VertexId> {
        self.vertex_ids().filter(|&v| self.is_source(v)).collect()
    }

    /// The first-declared edge out of v, if any.
    pub fn special_edge(&self, v: VertexId) -> Option<EdgeId> {
        self.out[v.index()].first().copied()
    }

    /// Resolves a list of vertex names to a set.
    pub fn vertex_set(&self, names: &[&str]) -> Result<BTreeSet<VertexId>, GraphError> {
        names.iter().map(|n| self.vertex_id(n)).collect()
    }

    /// Reflexive-transitive reachability matrix: reach[u][v] iff a path
    /// (possibly trivial) runs from u to v.
    #[allow(clippy::needless_range_loop)]
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        let n = self.vertices.len();
        let mut reach = vec![vec![false; n]; n];
        for (u, row) in reach.iter_mut().enumerate() {
            row[u] = true;
        }
        for e in &self.edges {
            reach[e.src.index()][e.dst.index()] = true;
        }
        for k in 0..n {
            for u in 0..n {
                if reach[u][k] {
                    for v in 0..n {
                        if reach[k][v] {
                            reach[u][v] = true;
                        }
                    }
                }
            }
        }
        reach
    }
}

/// A finite path: a source vertex and a composable edge sequence, possibly
/// empty. Ordered by (length, edge indices, source index) so that maps over
/// paths iterate shortest-first deterministically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    source: VertexId,
    edges: Vec<EdgeId>,
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Path {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.edges.len(), &self.edges, self.source).cmp(&(
            other.edges.len(),
            &other.edges,
            other.source,
        ))
    }
}

impl Path {
    /// The trivial path at a vertex.
    pub fn trivial(v: VertexId) -> Path {
        Path { source: v, edges: Vec::new() }
    }

    /// A path from a composable edge sequence.
    pub fn from_edges(g: &Graph, edges: Vec<EdgeId>) -> Result<Path, GraphError> {
        let first = match edges.first() {
            None => return Err(GraphError::BadWord("(empty)".into())),
            Some(&e) => e,
        };
        for pair in edges.windows(2) {
            if g.range(pair[0]) != g.source(pair[1]) {
                return Err(GraphError::NotComposable(g.edge_name(pair[1]).to_string()));
            }
        }
        Ok(Path { source: g.source(first), edges })
    }

    /// A path from edge names, for tests and parsers.
    pub fn from_edge_names(g: &Graph, names: &[&str]) -> Result<Path, GraphError> {
        let edges = names.iter().map(|n| g.edge_id(n)).collect::<Result<Vec<_>, _>>()?;
        Path::from_edges(g, edges)
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    /// The range vertex: target of the last edge, or the source if trivial.
    pub fn range(&self, g: &Graph) -> VertexId {
        match self.edges.last() {
            Some(&e) => g.range(e),
            None => self.source,
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn first_edge(&self) -> Option<EdgeId> {
        self.edges.first().copied()
    }

    /// Prepends an edge; r(e) must equal the current source.
    pub fn prepend(&self, g: &Graph, e: EdgeId) -> Result<Path, GraphError> {
        if g.range(e) != self.source {
            return Err(GraphError::NotComposable(g.edge_name(e).to_string()));
        }
        let mut edges = Vec::with_capacity(self.edges.len() + 1);
        edges.push(e);
        edges.extend_from_slice(&self.edges);
        Ok(Path { source: g.source(e), edges })
    }

    /// Appends an edge; s(e) must equal the current range.
    pub fn append(&self, g: &Graph, e: EdgeId) -> Result<Path, GraphError> {
        if g.source(e) != self.range(g) {
            return Err(GraphError::NotComposable(g.edge_name(e).to_string()));
        }
        let mut edges = self.edges.clone();
        edges.push(e);
        Ok(Path { source: self.source, edges })
    }

    /// Splits off the last edge, or None when trivial.
    pub fn without_last(&self) -> Option<(Path, EdgeId)> {
        let (&last, rest) = self.edges.split_last()?;
        Some((Path { source: self.source, edges: rest.to_vec() }, last))
    }

    /// Concatenation self then other; r(self) must equal s(other).
    pub fn concat(&self, g: &Graph, other: &Path) -> Result<Path, GraphError> {
        if self.range(g) != other.source {
            return Err(GraphError::NotComposable(g.vertex_name(other.source).to_string()));
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Ok(Path { source: self.source, edges })
    }

    /// The remainder after removing `prefix` from the front, if it is one.
    pub fn strip_prefix(&self, g: &Graph, prefix: &Path) -> Option<Path> {
        if prefix.source != self.source || !self.edges.starts_with(&prefix.edges) {
            return None;
        }
        let edges = self.edges[prefix.edges.len()..].to_vec();
        Some(Path { source: prefix.range(g), edges })
    }

    /// True when the path ends with the given edge sequence.
    pub fn ends_with(&self, suffix: &[EdgeId]) -> bool {
        self.edges.ends_with(suffix)
    }

    /// Sort key by (length, edge names, source name), the printed order.
    pub fn display_key<'g>(&self, g: &'g Graph) -> (usize, Vec<&'g str>, &'g str) {
        (
            self.edges.len(),
            self.edges.iter().map(|&e| g.edge_name(e)).collect(),
            g.vertex_name(self.source),
        )
    }
}

/// A cycle: either a vertex-disjoint closed path in its canonical rotation,
/// or a sink standing in for the degenerate case.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cycle {
    Sink(VertexId),
    Proper(Path),
}

impl Cycle {
    /// The base vertex: s(c) for a proper cycle, the sink itself otherwise.
    pub fn base_vertex(&self) -> VertexId {
        match self {
            Cycle::Sink(v) => *v,
            Cycle::Proper(p) => p.source(),
        }
    }

    /// Cycle length; 0 for a sink.
    pub fn len(&self) -> usize {
        match self {
            Cycle::Sink(_) => 0,
            Cycle::Proper(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The edges of a proper cycle; empty for a sink.
    pub fn edge_seq(&self) -> &[EdgeId] {
        match self {
            Cycle::Sink(_) => &[],
            Cycle::Proper(p) => p.edges(),
        }
    }

    /// The first edge e_1 of a proper cycle.
    pub fn first_edge(&self) -> Option<EdgeId> {
        self.edge_seq().first().copied()
    }

    pub fn display(&self, g: &Graph) -> String {
        match self {
            Cycle::Sink(v) => g.vertex_name(*v).to_string(),
            Cycle::Proper(p) => g.format_path(p),
        }
    }
}

impl Graph {
    /// Rotates a closed vertex-disjoint path so its source is the vertex
    /// with the lexicographically least name.
    fn canonical_rotation(&self, edges: &[EdgeId]) -> Path {
        let n = edges.len();
        let mut best = 0;
        for i in 1..n {
            if self.vertex_name(self.source(edges[i])) < self.vertex_name(self.source(edges[best]))
            {
                best = i;
            }
        }
        let mut rot = Vec::with_capacity(n);
        rot.extend_from_slice(&edges[best..]);
        rot.extend_from_slice(&edges[..best]);
        Path { source: self.source(rot[0]), edges: rot }
    }

    /// All cycles: proper cycles ordered by the declaration index of their
    /// earliest vertex, then sinks in declaration order.
    pub fn cycles(&self) -> Vec<Cycle> {
        let mut found: Vec<Cycle> = Vec::new();
        let n = self.vertices.len();
        for anchor in 0..n {
            // depth-first simple cycles whose least-index vertex is anchor
            let mut stack: Vec<(VertexId, usize)> = vec![(VertexId(anchor as u32), 0)];
            let mut path: Vec<EdgeId> = Vec::new();
            let mut on_path: BTreeSet<VertexId> = BTreeSet::new();
            on_path.insert(VertexId(anchor as u32));
            while let Some((v, next)) = stack.pop() {
                if next >= self.out[v.index()].len() {
                    on_path.remove(&v);
                    path.pop();
                    continue;
                }
                stack.push((v, next + 1));
                let e = self.out[v.index()][next];
                let w = self.range(e);
                if w.index() == anchor {
                    path.push(e);
                    found.push(Cycle::Proper(self.canonical_rotation(&path)));
                    path.pop();
                } else if w.index() > anchor && !on_path.contains(&w) {
                    path.push(e);
                    on_path.insert(w);
                    stack.push((w, 0));
                }
            }
        }
        for v in self.sinks() {
            found.push(Cycle::Sink(v));
        }
        found
    }

    /// Validates that c is one of this graph's cycles.
    pub fn check_cycle(&self, c: &Cycle) -> Result<(), GraphError> {
        if self.cycles().contains(c) {
            Ok(())
        } else {
            let shown = match c {
                Cycle::Sink(v) if v.index() < self.vertices.len() => {
                    self.vertex_name(*v).to_string()
                }
                Cycle::Proper(p)
                    if p.edges().iter().all(|e| e.index() < self.edges.len()) =>
                {
                    self.format_path(p)
                }
                _ => "(foreign cycle)".to_string(),
            };
            Err(GraphError::NotACycle(shown))
        }
    }

    /// Looks a cycle up by name: a sink vertex, or a word spelling a proper
    /// cycle in any rotation.
    pub fn cycle_by_name(&self, name: &str) -> Result<Cycle, GraphError> {
        if let Ok(v) = self.vertex_id(name) {
            if self.is_sink(v) {
                return Ok(Cycle::Sink(v));
            }
        }
        let path = self.parse_path_word(name)?;
        if path.is_trivial() || path.range(self) != path.source() {
            return Err(GraphError::NotACycle(name.to_string()));
        }
        let c = Cycle::Proper(self.canonical_rotation(path.edges()));
        self.check_cycle(&c)?;
        Ok(c)
    }

    /// True when distinct cycles share no vertex.
    pub fn has_disjoint_cycles(&self) -> bool {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        for c in self.cycles() {
            if let Cycle::Proper(p) = c {
                for &e in p.edges() {
                    if !seen.insert(self.source(e)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Independent route to the same property: every closed path of length
    /// at most maxlen is a power of a vertex-disjoint cycle.
    pub fn closed_paths_are_cycle_powers(&self, maxlen: usize) -> bool {
        let reach = self.reachability();
        let n = self.vertices.len();
        let same_scc =
            |a: VertexId, b: VertexId| reach[a.index()][b.index()] && reach[b.index()][a.index()];
        for base in 0..n {
            let base = VertexId(base as u32);
            // closed walks from base stay inside its strong component
            let mut walk: Vec<EdgeId> = Vec::new();
            let mut stack: Vec<(VertexId, usize)> = vec![(base, 0)];
            while let Some((v, next)) = stack.pop() {
                if walk.len() >= maxlen || next >= self.out[v.index()].len() {
                    walk.pop();
                    continue;
                }
                stack.push((v, next + 1));
                let e = self.out[v.index()][next];
                let w = self.range(e);
                if !same_scc(w, base) {
                    continue;
                }
                walk.push(e);
                if w == base && !self.is_cycle_power(&walk) {
                    return false;
                }
                stack.push((w, 0));
            }
        }
        true
    }

    /// True when the closed edge sequence is a power of a vertex-disjoint
    /// cycle: its primitive period must visit distinct vertices.
    fn is_cycle_power(&self, seq: &[EdgeId]) -> bool {
        let n = seq.len();
        let mut d = 1;
        let period = loop {
            if n.is_multiple_of(d) && (d..n).all(|i| seq[i] == seq[i % d]) {
                break d;
            }
            d += 1;
            if d > n {
                unreachable!("n is always a period of itself");
            }
        };
        let mut verts = BTreeSet::new();
        seq[..period].iter().all(|&e| verts.insert(self.source(e)))
    }

    /// True when no edge leads from H outside of H.
    pub fn is_hereditary(&self, h: &BTreeSet<VertexId>) -> bool {
        self.hereditary_violation(h).is_none()
    }

    fn hereditary_violation(&self, h: &BTreeSet<VertexId>) -> Option<EdgeId> {
        self.edge_ids().find(|&e| h.contains(&self.source(e)) && !h.contains(&self.range(e)))
    }

    /// True when every non-sink whose out-edges all land in H is in H.
    pub fn is_saturated(&self, h: &BTreeSet<VertexId>) -> bool {
        self.saturation_violation(h).is_none()
    }

    fn saturation_violation(&self, h: &BTreeSet<VertexId>) -> Option<VertexId> {
        self.vertex_ids().find(|&v| {
            !h.contains(&v)
                && !self.is_sink(v)
                && self.out_edges(v).iter().all(|&e| h.contains(&self.range(e)))
        })
    }

    /// The restriction to a hereditary saturated vertex set, keeping
    /// declaration order.
    pub fn restrict(&self, h: &BTreeSet<VertexId>) -> Result<Graph, GraphError> {
        if let Some(e) = self.hereditary_violation(h) {
            return Err(GraphError::NotHereditary { edge: self.edge_name(e).to_string() });
        }
        if let Some(v) = self.saturation_violation(h) {
            return Err(GraphError::NotSaturated { vertex: self.vertex_name(v).to_string() });
        }
        self.restrict_unchecked(h)
    }

    /// Restriction that only requires heredity (used when a source vertex
    /// is removed, where saturation fails by design).
    pub(crate) fn restrict_hereditary(&self, h: &BTreeSet<VertexId>) -> Result<Graph, GraphError> {
        if let Some(e) = self.hereditary_violation(h) {
            return Err(GraphError::NotHereditary { edge: self.edge_name(e).to_string() });
        }
        self.restrict_unchecked(h)
    }

    fn restrict_unchecked(&self, h: &BTreeSet<VertexId>) -> Result<Graph, GraphError> {
        let vertices: Vec<&str> = self
            .vertex_ids()
            .filter(|v| h.contains(v))
            .map(|v| self.vertices[v.index()].as_str())
            .collect();
        let edges: Vec<(&str, &str, &str)> = self
            .edges
            .iter()
            .filter(|e| h.contains(&e.src))
            .map(|e| {
                (e.name.as_str(), self.vertex_name(e.src), self.vertex_name(e.dst))
            })
            .collect();
        Graph::build(&vertices, &edges)
    }
}

/// The preorder v <= u (u flows to v) on vertices, grouped into classes of
/// mutually reachable vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexClasses {
    classes: Vec<Vec<VertexId>>,
    class_of: Vec<usize>,
    class_reaches: Vec<Vec<bool>>,
}

impl VertexClasses {
    /// The classes, ordered by their earliest vertex.
    pub fn classes(&self) -> &[Vec<VertexId>] {
        &self.classes
    }

    pub fn class_of(&self, v: VertexId) -> usize {
        self.class_of[v.index()]
    }

    /// Class a <= class b: some (equivalently every) vertex of b reaches a.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.class_reaches[b][a]
    }

    /// Maximal classes: nothing strictly above them in the preorder.
    pub fn is_maximal(&self, i: usize) -> bool {
        (0..self.classes.len()).all(|j| j == i || !self.class_reaches[j][i])
    }
}

impl Graph {
    /// Groups vertices by mutual reachability and records the order.
    pub fn vertex_equivalence_classes(&self) -> VertexClasses {
        let reach = self.reachability();
        let n = self.vertices.len();
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<VertexId>> = Vec::new();
        for u in 0..n {
            if class_of[u] != usize::MAX {
                continue;
            }
            let idx = classes.len();
            let mut members = Vec::new();
            for v in u..n {
                if reach[u][v] && reach[v][u] {
                    class_of[v] = idx;
                    members.push(VertexId(v as u32));
                }
            }
            classes.push(members);
        }
        let k = classes.len();
        let mut class_reaches = vec![vec![false; k]; k];
        for (i, row) in class_reaches.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let a = classes[i][0];
                let b = classes[j][0];
                *cell = reach[a.index()][b.index()];
            }
        }
        VertexClasses { classes, class_of, class_reaches }
    }
}

impl Graph {
    /// The path family of a cycle: paths that end at the base vertex and,
    /// for a proper cycle, do not end with a full traverse of it. Listed by
    /// (length, edge names) up to maxlen.
    pub fn enumerate_pc(&self, c: &Cycle, maxlen: usize) -> Result<Vec<Path>, GraphError> {
        self.check_cycle(c)?;
        if !self.has_disjoint_cycles() {
            return Err(GraphError::NotDisjointCycles);
        }
        let base = c.base_vertex();
        let mut out: Vec<Path> = Vec::new();
        let mut frontier = vec![Path::trivial(base)];
        for _len in 0..=maxlen {
            let mut batch = frontier.clone();
            batch.sort_by(|a, b| a.display_key(self).cmp(&b.display_key(self)));
            out.extend(batch);
            let mut next = Vec::new();
            for p in frontier {
                for &e in self.in_edges(p.source()) {
                    let grown = p.prepend(self, e).expect("in-edge is composable");
                    // drop the subtree rooted at the cycle itself: every
                    // excluded path ends with a full traverse
                    if let Cycle::Proper(cp) = c {
                        if grown.edges() == cp.edges() {
                            continue;
                        }
                    }
                    next.push(grown);
                }
            }
            frontier = next;
        }
        Ok(out)
    }

    /// Whether the path family of c is finite: no other proper cycle may
    /// reach the base vertex.
    pub fn is_pc_finite(&self, c: &Cycle) -> Result<bool, GraphError> {
        self.check_cycle(c)?;
        if !self.has_disjoint_cycles() {
            return Err(GraphError::NotDisjointCycles);
        }
        let base = c.base_vertex();
        let reach = self.reachability();
        for other in self.cycles() {
            if other == *c {
                continue;
            }
            if let Cycle::Proper(p) = other {
                let reaches =
                    p.edges().iter().any(|&e| reach[self.source(e).index()][base.index()]);
                if reaches {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl Graph {
    /// Splits a word into edges, tracking composability. Returns all
    /// splittings (as edge sequences) to let callers detect ambiguity.
    fn word_splits(&self, word: &str) -> Vec<Vec<EdgeId>> {
        // ways[i] = complete splits of word[..i] that compose left to right
        let mut ways: Vec<Vec<Vec<EdgeId>>> = vec![Vec::new(); word.len() + 1];
        ways[0].push(Vec::new());
        for i in 0..word.len() {
            if ways[i].is_empty() {
                continue;
            }
            for e in self.edge_ids() {
                let name = self.edge_name(e);
                if !word[i..].starts_with(name) {
                    continue;
                }
                let j = i + name.len();
                let extended: Vec<Vec<EdgeId>> = ways[i]
                    .iter()
                    .filter(|split| match split.last() {
                        Some(&last) => self.range(last) == self.source(e),
                        None => true,
                    })
                    .map(|split| {
                        let mut s = split.clone();
                        s.push(e);
                        s
                    })
                    .collect();
                ways[j].extend(extended);
            }
        }
        ways.pop().unwrap_or_default()
    }

    /// Parses a path word: a vertex name (trivial path), a concatenation of
    /// edge names, or a dot-separated edge list. Ambiguous words error.
    pub fn parse_path_word(&self, word: &str) -> Result<Path, GraphError> {
        if word.contains('.') {
            let names: Vec<&str> = word.split('.').collect();
            return Path::from_edge_names(self, &names);
        }
        let vertex = self.vertex_id(word).ok();
        let splits = self.word_splits(word);
        match (vertex, splits.len()) {
            (Some(v), 0) => Ok(Path::trivial(v)),
            (None, 1) => Path::from_edges(self, splits.into_iter().next().unwrap()),
            (None, 0) => Err(GraphError::BadWord(word.to_string())),
            (Some(_), _) => Err(GraphError::AmbiguousWord {
                word: word.to_string(),
                detail: "names both a vertex and an edge word".to_string(),
            }),
            (None, n) => Err(GraphError::AmbiguousWord {
                word: word.to_string(),
                detail: format!("{n} distinct edge splittings; write it dot-separated"),
            }),
        }
    }

    /// Prints a path: the vertex name when trivial, the concatenated edge
    /// names when that reads back uniquely, a dotted list otherwise.
    pub fn format_path(&self, p: &Path) -> String {
        if p.is_trivial() {
            return self.vertex_name(p.source()).to_string();
        }
        let names: Vec<&str> = p.edges().iter().map(|&e| self.edge_name(e)).collect();
        let glued = names.concat();
        if self.vertex_id(&glued).is_err() && self.word_splits(&glued).len() == 1 {
            glued
        } else {
            names.join(".")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toeplitz() -> Graph {
        Graph::build(&["u", "w"], &[("a", "u", "u"), ("b", "u", "w")]).unwrap()
    }

    #[test]
    fn parse_and_lookup() {
        let g = Graph::parse("# demo\nv u\nv w\ne a u u\ne b u w\n").unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.vertex_name(g.source(g.edge_id("b").unwrap())), "u");
        assert!(g.vertex_id("missing").is_err());
        assert!(Graph::parse("v u\nv u\n").is_err());
        assert!(Graph::parse("e a u u\n").is_err());
        assert!(Graph::parse("x nonsense\n").is_err());
    }

    #[test]
    fn round_trip_text() {
        let g = toeplitz();
        let again = Graph::parse(&g.to_text()).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn cycles_of_toeplitz() {
        let g = toeplitz();
        let cs = g.cycles();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0], Cycle::Proper(Path::from_edge_names(&g, &["a"]).unwrap()));
        assert_eq!(cs[1], Cycle::Sink(g.vertex_id("w").unwrap()));
        assert!(g.has_disjoint_cycles());
        assert!(g.closed_paths_are_cycle_powers(8));
    }

    #[test]
    fn rose_is_not_disjoint() {
        let g = Graph::build(&["u"], &[("a", "u", "u"), ("b", "u", "u")]).unwrap();
        assert_eq!(g.cycles().len(), 2);
        assert!(!g.has_disjoint_cycles());
        assert!(!g.closed_paths_are_cycle_powers(4));
    }

    #[test]
    fn pc_of_toeplitz() {
        let g = toeplitz();
        let cs = g.cycles();
        // the loop: only the trivial path avoids a full traverse
        let ps = g.enumerate_pc(&cs[0], 6).unwrap();
        assert_eq!(ps, vec![Path::trivial(g.vertex_id("u").unwrap())]);
        assert_eq!(g.is_pc_finite(&cs[0]), Ok(true));
        // the sink: u^k b and w itself
        let ps = g.enumerate_pc(&cs[1], 3).unwrap();
        let words: Vec<String> = ps.iter().map(|p| g.format_path(p)).collect();
        assert_eq!(words, vec!["w", "b", "ab", "aab"]);
        assert_eq!(g.is_pc_finite(&cs[1]), Ok(false));
    }

    #[test]
    fn hereditary_saturated_restrict() {
        let g = toeplitz();
        let h = g.vertex_set(&["w"]).unwrap();
        assert!(g.is_hereditary(&h));
        assert!(g.is_saturated(&h));
        let r = g.restrict(&h).unwrap();
        assert_eq!(r.vertex_count(), 1);
        assert_eq!(r.edge_count(), 0);
        let bad = g.vertex_set(&["u"]).unwrap();
        assert!(!g.is_hereditary(&bad));
        assert!(g.restrict(&bad).is_err());
    }

    #[test]
    fn classes_of_chain() {
        let g =
            Graph::build(&["u", "v", "w"], &[("a", "u", "v"), ("b", "v", "w")]).unwrap();
        let cl = g.vertex_equivalence_classes();
        assert_eq!(cl.classes().len(), 3);
        assert!(cl.is_maximal(0));
        assert!(!cl.is_maximal(1));
        assert!(!cl.is_maximal(2));
        // w <= u: u flows to w
        assert!(cl.leq(2, 0));
        assert!(!cl.leq(0, 2));
    }

    #[test]
    fn word_parsing() {
        let g = toeplitz();
        let p = g.parse_path_word("aab").unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(g.format_path(&p), "aab");
        assert_eq!(g.parse_path_word("a.a.b").unwrap(), p);
        assert_eq!(g.parse_path_word("w").unwrap(), Path::trivial(g.vertex_id("w").unwrap()));
        assert!(g.parse_path_word("ba").is_err());
        // ambiguous: edge names overlap in spelling
        let g2 = Graph::build(
            &["u"],
            &[("a", "u", "u"), ("aa", "u", "u")],
        )
        .unwrap();
        assert!(matches!(
            g2.parse_path_word("aaa"),
            Err(GraphError::AmbiguousWord { .. })
        ));
        let p2 = Path::from_edge_names(&g2, &["aa", "a"]).unwrap();
        assert_eq!(g2.format_path(&p2), "aa.a");
        assert_eq!(g2.parse_path_word("aa.a").unwrap(), p2);
    }

    #[test]
    fn cycle_lookup_by_name() {
        let g = toeplitz();
        assert_eq!(g.cycle_by_name("a").unwrap(), g.cycles()[0]);
        assert_eq!(g.cycle_by_name("w").unwrap(), g.cycles()[1]);
        assert!(g.cycle_by_name("b").is_err());
        assert!(g.cycle_by_name("u").is_err());
    }
}
