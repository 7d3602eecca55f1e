//! Graph reductions and the transport of series data across them:
//! splitting into weakly connected components, eliminating a source vertex,
//! and collapsing a source cycle to a loop.

use crate::algebra::{AlgebraElement, AlgebraError};
use crate::chenmod::{act, BasisVector, ModuleElement, ModuleError, ModuleSpace};
use crate::envelope::{EnvelopeError, SeriesElement};
use crate::graph::{Cycle, EdgeId, Graph, GraphError, Path, VertexId};
use crate::scalar::{BaseField, Field, Polynomial, Scalar, ScalarError};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Errors from reductions and transports.
#[derive(Debug, Error)]
pub enum ReduceError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    #[error("`{0}` is not a source vertex")]
    NotASource(String),
    #[error("`{word}` is not a collapsible source cycle: {reason}")]
    NotASourceCycle { word: String, reason: String },
    #[error("the cycle does not survive into the other graph")]
    CycleMissing,
    #[error("path `{0}` does not start in the corner")]
    NotInCorner(String),
    #[error("tag not applicable to this transport: {0}")]
    BadTag(String),
    #[error("element belongs to a different module space")]
    SpaceMismatch,
    #[error("graph is not in normal form: {0}")]
    NotNormalForm(String),
    #[error("collapse map failed its relation check at {0}")]
    ThetaCheck(String),
}

/// Rebuilds a path from one graph in another that shares the names.
fn relabel_path(src: &Graph, dst: &Graph, p: &Path) -> Result<Path, GraphError> {
    if p.is_trivial() {
        return Ok(Path::trivial(dst.vertex_id(src.vertex_name(p.source()))?));
    }
    let names: Vec<&str> = p.edges().iter().map(|&e| src.edge_name(e)).collect();
    Path::from_edge_names(dst, &names)
}

fn relabel_cycle(src: &Graph, dst: &Graph, c: &Cycle) -> Result<Cycle, GraphError> {
    match c {
        Cycle::Sink(v) => Ok(Cycle::Sink(dst.vertex_id(src.vertex_name(*v))?)),
        Cycle::Proper(p) => Ok(Cycle::Proper(relabel_path(src, dst, p)?)),
    }
}

/// One weakly connected component, as its own graph plus the original
/// vertices it came from.
#[derive(Debug, Clone)]
pub struct Component {
    original: Arc<Graph>,
    graph: Arc<Graph>,
    vertices: Vec<VertexId>,
}

impl Component {
    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    /// The member vertices, as ids of the original graph.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    /// The idempotent of the component: the sum of its vertices in the
    /// algebra of the original graph.
    pub fn idempotent(&self, field: &Field) -> AlgebraElement {
        let mut out = AlgebraElement::zero(&self.original, field);
        for &v in &self.vertices {
            let term = AlgebraElement::vertex(&self.original, field, v);
            out = out.add(&term).expect("vertex terms share graph and field");
        }
        out
    }
}

/// Splits a graph into weakly connected components, ordered by their
/// earliest vertex.
pub fn split_components(g: &Arc<Graph>) -> Vec<Component> {
    let mut seen = vec![false; g.vertex_count()];
    let mut out = Vec::new();
    for v in g.vertex_ids() {
        if seen[v.index()] {
            continue;
        }
        let mut members = Vec::new();
        let mut queue = VecDeque::from([v]);
        seen[v.index()] = true;
        while let Some(u) = queue.pop_front() {
            members.push(u);
            let step = |w: VertexId, seen: &mut Vec<bool>, queue: &mut VecDeque<VertexId>| {
                if !seen[w.index()] {
                    seen[w.index()] = true;
                    queue.push_back(w);
                }
            };
            for &e in g.out_edges(u) {
                step(g.range(e), &mut seen, &mut queue);
            }
            for &e in g.in_edges(u) {
                step(g.source(e), &mut seen, &mut queue);
            }
        }
        members.sort();
        let set: BTreeSet<VertexId> = members.iter().copied().collect();
        let graph = g.restrict(&set).expect("a component is hereditary and saturated");
        out.push(Component { original: g.clone(), graph: Arc::new(graph), vertices: members });
    }
    out
}

/// The removal of one source vertex, keeping both graphs.
#[derive(Debug, Clone)]
pub struct SourceElimination {
    original: Arc<Graph>,
    reduced: Arc<Graph>,
    removed: VertexId,
}

impl SourceElimination {
    pub fn original(&self) -> &Arc<Graph> {
        &self.original
    }

    pub fn reduced(&self) -> &Arc<Graph> {
        &self.reduced
    }

    /// The removed vertex, as an id of the original graph.
    pub fn removed(&self) -> VertexId {
        self.removed
    }

    /// The corner idempotent: the sum of all surviving vertices, in the
    /// algebra of the original graph.
    pub fn epsilon(&self, field: &Field) -> AlgebraElement {
        let mut out = AlgebraElement::zero(&self.original, field);
        for v in self.original.vertex_ids().filter(|&v| v != self.removed) {
            let term = AlgebraElement::vertex(&self.original, field, v);
            out = out.add(&term).expect("vertex terms share graph and field");
        }
        out
    }
}

/// Removes a source vertex and its out-edges. The remaining vertex set is
/// hereditary, so the restriction is a graph again.
pub fn eliminate_source(g: &Arc<Graph>, v: VertexId) -> Result<SourceElimination, ReduceError> {
    if !g.is_source(v) {
        return Err(ReduceError::NotASource(g.vertex_name(v).to_string()));
    }
    let keep: BTreeSet<VertexId> = g.vertex_ids().filter(|&u| u != v).collect();
    let reduced = Arc::new(g.restrict_hereditary(&keep)?);
    Ok(SourceElimination { original: g.clone(), reduced, removed: v })
}

/// Explains why the proper cycle is not a source cycle, if it is not:
/// every cycle vertex may be entered only by its cycle predecessor.
fn source_cycle_violation(g: &Graph, p: &Path) -> Option<String> {
    let edges = p.edges();
    let r = edges.len();
    for (i, &e) in edges.iter().enumerate() {
        let v = g.source(e);
        let prev = edges[(i + r - 1) % r];
        let ins = g.in_edges(v);
        if ins.len() != 1 || ins[0] != prev {
            return Some(format!(
                "vertex `{}` has entrances besides the cycle",
                g.vertex_name(v)
            ));
        }
    }
    None
}

/// The collapse of a source cycle d to a loop: the cycle contracts to a
/// fresh vertex carrying a fresh loop, and each exit edge f acquires a
/// rerouted copy sourced there.
#[derive(Debug, Clone)]
pub struct CycleCollapse {
    original: Arc<Graph>,
    collapsed: Arc<Graph>,
    d: Path,
    vbar: VertexId,
    dprime: EdgeId,
    phi: BTreeMap<EdgeId, EdgeId>,
    entry_index: BTreeMap<EdgeId, usize>,
    positions: BTreeMap<VertexId, usize>,
}

fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('_');
    }
    name
}

/// Collapses the source cycle d, of length at least two, and validates the
/// resulting edge map against the Cuntz-Krieger relations over Q.
pub fn collapse_cycle(g: &Arc<Graph>, c: &Cycle) -> Result<CycleCollapse, ReduceError> {
    g.check_cycle(c)?;
    let d = match c {
        Cycle::Sink(v) => {
            return Err(ReduceError::NotASourceCycle {
                word: g.vertex_name(*v).to_string(),
                reason: "a sink has no edges to collapse".to_string(),
            })
        }
        Cycle::Proper(p) if p.len() < 2 => {
            return Err(ReduceError::NotASourceCycle {
                word: g.format_path(p),
                reason: "the cycle is already a loop".to_string(),
            })
        }
        Cycle::Proper(p) => p.clone(),
    };
    if let Some(reason) = source_cycle_violation(g, &d) {
        return Err(ReduceError::NotASourceCycle { word: g.format_path(&d), reason });
    }

    let dset: BTreeSet<EdgeId> = d.edges().iter().copied().collect();
    let mut positions = BTreeMap::new();
    for (i, &e) in d.edges().iter().enumerate() {
        positions.insert(g.source(e), i + 1);
    }
    let exits: Vec<EdgeId> = g
        .edge_ids()
        .filter(|e| positions.contains_key(&g.source(*e)) && !dset.contains(e))
        .collect();
    let kept_vertices: Vec<VertexId> =
        g.vertex_ids().filter(|v| !positions.contains_key(v)).collect();
    let kept_edges: Vec<EdgeId> =
        g.edge_ids().filter(|e| !positions.contains_key(&g.source(*e))).collect();

    let vertex_names: BTreeSet<String> =
        kept_vertices.iter().map(|&v| g.vertex_name(v).to_string()).collect();
    let vbar_name = fresh_name("vbar", &vertex_names);
    let mut vnames: Vec<&str> = vec![&vbar_name];
    vnames.extend(kept_vertices.iter().map(|&v| g.vertex_name(v)));

    let mut edge_names: BTreeSet<String> =
        kept_edges.iter().map(|&e| g.edge_name(e).to_string()).collect();
    let dprime_name = fresh_name("dprime", &edge_names);
    edge_names.insert(dprime_name.clone());
    let phi_names: Vec<String> = exits
        .iter()
        .map(|&f| {
            let name = fresh_name(&format!("phi_{}", g.edge_name(f)), &edge_names);
            edge_names.insert(name.clone());
            name
        })
        .collect();

    let mut etriples: Vec<(&str, &str, &str)> = vec![(&dprime_name, &vbar_name, &vbar_name)];
    for (f, name) in exits.iter().zip(&phi_names) {
        etriples.push((name, &vbar_name, g.vertex_name(g.range(*f))));
    }
    for &e in &kept_edges {
        etriples.push((g.edge_name(e), g.vertex_name(g.source(e)), g.vertex_name(g.range(e))));
    }
    let collapsed = Arc::new(Graph::build(&vnames, &etriples)?);

    let vbar = collapsed.vertex_id(&vbar_name)?;
    let dprime = collapsed.edge_id(&dprime_name)?;
    let mut phi = BTreeMap::new();
    let mut entry_index = BTreeMap::new();
    for (f, name) in exits.iter().zip(&phi_names) {
        phi.insert(*f, collapsed.edge_id(name)?);
        entry_index.insert(*f, positions[&g.source(*f)]);
    }

    let cc = CycleCollapse {
        original: g.clone(),
        collapsed,
        d,
        vbar,
        dprime,
        phi,
        entry_index,
        positions,
    };
    cc.check_relations()?;
    Ok(cc)
}

impl CycleCollapse {
    pub fn original(&self) -> &Arc<Graph> {
        &self.original
    }

    pub fn collapsed(&self) -> &Arc<Graph> {
        &self.collapsed
    }

    /// The collapsed cycle, as a path of the original graph.
    pub fn cycle(&self) -> &Path {
        &self.d
    }

    /// The fresh loop vertex of the collapsed graph.
    pub fn vbar(&self) -> VertexId {
        self.vbar
    }

    /// The fresh loop edge of the collapsed graph.
    pub fn dprime(&self) -> EdgeId {
        self.dprime
    }

    /// The rerouted copy of an exit edge of the original graph.
    pub fn phi_edge(&self, f: EdgeId) -> Option<EdgeId> {
        self.phi.get(&f).copied()
    }

    /// The corner idempotent: the base of the cycle plus all vertices off
    /// the cycle, in the algebra of the original graph.
    pub fn omega(&self, field: &Field) -> AlgebraElement {
        let g = &self.original;
        let mut out = AlgebraElement::vertex(g, field, self.d.source());
        for v in g.vertex_ids().filter(|v| !self.positions.contains_key(v)) {
            let term = AlgebraElement::vertex(g, field, v);
            out = out.add(&term).expect("vertex terms share graph and field");
        }
        out
    }

    /// The image of a path of the collapsed graph in the original graph:
    /// the loop expands to the full cycle, a rerouted exit expands to the
    /// cycle prefix reaching its entry, and everything else is renamed.
    pub fn theta_path(&self, p: &Path) -> Result<Path, ReduceError> {
        let g = &self.original;
        let f = &self.collapsed;
        if p.is_trivial() {
            if p.source() == self.vbar {
                return Ok(Path::trivial(self.d.source()));
            }
            return Ok(Path::trivial(g.vertex_id(f.vertex_name(p.source()))?));
        }
        let mut edges: Vec<EdgeId> = Vec::new();
        for &e in p.edges() {
            if e == self.dprime {
                edges.extend_from_slice(self.d.edges());
            } else if let Some((&orig, _)) = self.phi.iter().find(|(_, &img)| img == e) {
                let i = self.entry_index[&orig];
                edges.extend_from_slice(&self.d.edges()[..i - 1]);
                edges.push(orig);
            } else {
                edges.push(g.edge_id(f.edge_name(e))?);
            }
        }
        Ok(Path::from_edges(g, edges)?)
    }

    /// The algebra map induced by the edge expansion, applied term by term.
    pub fn theta(&self, a: &AlgebraElement) -> Result<AlgebraElement, ReduceError> {
        if **a.graph() != *self.collapsed {
            return Err(AlgebraError::GraphMismatch.into());
        }
        let mut out = AlgebraElement::zero(&self.original, a.field());
        for (mono, k) in a.terms() {
            let lam = self.theta_path(mono.lambda())?;
            let mu = self.theta_path(mono.mu())?;
            let term =
                AlgebraElement::monomial(&self.original, a.field(), lam, mu, k.clone())?;
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Decodes a path of the original graph that starts in the corner: runs
    /// along the cycle regroup into loops and rerouted exits, everything
    /// else is renamed. Paths entering the cycle midway have no preimage.
    pub fn theta_inverse_path(&self, p: &Path) -> Result<Path, ReduceError> {
        let g = &self.original;
        let fgraph = &self.collapsed;
        if p.is_trivial() {
            if p.source() == self.d.source() {
                return Ok(Path::trivial(self.vbar));
            }
            if self.positions.contains_key(&p.source()) {
                return Err(ReduceError::NotInCorner(g.format_path(p)));
            }
            return Ok(Path::trivial(fgraph.vertex_id(g.vertex_name(p.source()))?));
        }
        let edges = p.edges();
        let r = self.d.len();
        let mut out: Vec<EdgeId> = Vec::new();
        let mut i = 0;
        while i < edges.len() {
            if !self.positions.contains_key(&g.source(edges[i])) {
                out.push(fgraph.edge_id(g.edge_name(edges[i]))?);
                i += 1;
                continue;
            }
            // a run over the cycle: it must begin at the base
            let mut k = 0;
            loop {
                if i >= edges.len() {
                    return Err(ReduceError::NotInCorner(g.format_path(p)));
                }
                let e = edges[i];
                if e == self.d.edges()[k] {
                    i += 1;
                    k += 1;
                    if k == r {
                        out.push(self.dprime);
                        k = 0;
                        if i >= edges.len() || !self.positions.contains_key(&g.source(edges[i]))
                        {
                            break;
                        }
                    }
                } else if let Some(&img) = self.phi.get(&e) {
                    if self.entry_index[&e] != k + 1 {
                        return Err(ReduceError::NotInCorner(g.format_path(p)));
                    }
                    out.push(img);
                    i += 1;
                    break;
                } else {
                    return Err(ReduceError::NotInCorner(g.format_path(p)));
                }
            }
        }
        Ok(Path::from_edges(fgraph, out)?)
    }

    /// Verifies the Cuntz-Krieger relations on the expanded edges over Q.
    /// Relations not involving a fresh edge are inherited verbatim.
    fn check_relations(&self) -> Result<(), ReduceError> {
        let g = &self.original;
        let fgraph = &self.collapsed;
        let field = Field::base(BaseField::rational());
        let theta_edge = |e: EdgeId| -> Result<Path, ReduceError> {
            self.theta_path(&Path::trivial(fgraph.source(e)).append(fgraph, e)?)
        };
        let fresh: Vec<EdgeId> = std::iter::once(self.dprime)
            .chain(self.phi.values().copied())
            .collect();
        // e* f = 0 for distinct edges, e* e = r(e)
        for &a in &fresh {
            for b in fgraph.edge_ids() {
                let pa = theta_edge(a)?;
                let pb = theta_edge(b)?;
                let lhs = AlgebraElement::ghost_path(g, &field, &pa)
                    .mul(&AlgebraElement::path(g, &field, &pb))?;
                let rhs = if a == b {
                    AlgebraElement::vertex(g, &field, pb.range(g))
                } else {
                    AlgebraElement::zero(g, &field)
                };
                if !lhs.sub(&rhs)?.is_zero() {
                    return Err(ReduceError::ThetaCheck(format!(
                        "`{}* {}`",
                        fgraph.edge_name(a),
                        fgraph.edge_name(b)
                    )));
                }
            }
        }
        // the vertex relation at the fresh loop vertex
        let mut sum = AlgebraElement::zero(g, &field);
        for &e in fgraph.out_edges(self.vbar) {
            let pe = theta_edge(e)?;
            let term = AlgebraElement::path(g, &field, &pe)
                .mul(&AlgebraElement::ghost_path(g, &field, &pe))?;
            sum = sum.add(&term)?;
        }
        let base = AlgebraElement::vertex(g, &field, self.d.source());
        if !sum.sub(&base)?.is_zero() {
            return Err(ReduceError::ThetaCheck("the vertex relation at the loop".into()));
        }
        Ok(())
    }
}

/// How one summand of a transported element re-enters the larger graph:
/// unchanged from the corner, behind a real prefix, or behind a ghost
/// prefix of cycle edges.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum TransportTag {
    Corner,
    Prefix(Path),
    GhostPrefix(Path),
}

/// A decomposed series: tagged summands over the reduced-side space.
#[derive(Debug, Clone)]
pub struct TaggedSeries {
    parts: Vec<(TransportTag, SeriesElement)>,
}

impl TaggedSeries {
    pub fn new(mut parts: Vec<(TransportTag, SeriesElement)>) -> TaggedSeries {
        parts.sort_by(|a, b| a.0.cmp(&b.0));
        TaggedSeries { parts }
    }

    pub fn parts(&self) -> &[(TransportTag, SeriesElement)] {
        &self.parts
    }
}

fn merge_term(
    terms: &mut BTreeMap<BasisVector, Scalar>,
    key: BasisVector,
    k: Scalar,
) -> Result<(), ScalarError> {
    let total = match terms.remove(&key) {
        Some(old) => old.add(&k)?,
        None => k,
    };
    if !total.is_zero() {
        terms.insert(key, total);
    }
    Ok(())
}

/// The transport of tower series across a source elimination: basis paths
/// either avoid the removed source or carry exactly one of its out-edges
/// as a first step.
#[derive(Debug, Clone)]
pub struct SourceTransport {
    elim: SourceElimination,
    space_e: Arc<ModuleSpace>,
    space_h: Arc<ModuleSpace>,
}

/// Builds the transport for one cycle and modulus; the cycle never meets
/// the removed source, which lies on no cycle at all.
pub fn source_transport(
    elim: &SourceElimination,
    cycle: &Cycle,
    f: &Polynomial,
) -> Result<SourceTransport, ReduceError> {
    let space_e = ModuleSpace::tower(elim.original(), cycle, f)?;
    let cycle_h = relabel_cycle(elim.original(), elim.reduced(), cycle)
        .map_err(|_| ReduceError::CycleMissing)?;
    let space_h = ModuleSpace::tower(elim.reduced(), &cycle_h, f)?;
    Ok(SourceTransport { elim: elim.clone(), space_e, space_h })
}

impl SourceTransport {
    pub fn space_over_original(&self) -> &Arc<ModuleSpace> {
        &self.space_e
    }

    pub fn space_over_reduced(&self) -> &Arc<ModuleSpace> {
        &self.space_h
    }

    /// Splits a series over the original graph into the corner part and
    /// one part per out-edge of the removed source.
    pub fn decompose(&self, z: &SeriesElement) -> Result<TaggedSeries, ReduceError> {
        if z.space() != &self.space_e {
            return Err(ReduceError::SpaceMismatch);
        }
        let g = self.elim.original();
        let h = self.elim.reduced();
        let ubar = self.elim.removed();
        let mut corner: BTreeMap<BasisVector, Scalar> = BTreeMap::new();
        let mut stems: BTreeMap<EdgeId, BTreeMap<BasisVector, Scalar>> = BTreeMap::new();
        for (bv, k) in z.terms() {
            let gamma = bv.gamma();
            if gamma.source() == ubar {
                let e = gamma.first_edge().expect("the base vertex is not the source");
                let stem = Path::from_edges(g, vec![e])?;
                let tail = gamma.strip_prefix(g, &stem).expect("own first edge");
                let tail = relabel_path(g, h, &tail)?;
                merge_term(
                    stems.entry(e).or_default(),
                    BasisVector::new(tail, bv.fiber(), bv.level()),
                    k.clone(),
                )?;
            } else {
                let gamma = relabel_path(g, h, gamma)?;
                merge_term(
                    &mut corner,
                    BasisVector::new(gamma, bv.fiber(), bv.level()),
                    k.clone(),
                )?;
            }
        }
        let mut parts = Vec::new();
        let body = ModuleElement::from_terms(&self.space_h, corner);
        parts.push((
            TransportTag::Corner,
            SeriesElement::from_parts(body, z.horizon(), z.is_exact()),
        ));
        for (e, terms) in stems {
            let body = ModuleElement::from_terms(&self.space_h, terms);
            let l = if z.is_exact() { 0 } else { z.horizon().saturating_sub(1) };
            let stem = Path::from_edges(g, vec![e])?;
            parts.push((
                TransportTag::Prefix(stem),
                SeriesElement::from_parts(body, l, z.is_exact()),
            ));
        }
        Ok(TaggedSeries::new(parts))
    }

    /// Reassembles tagged parts into a series over the original graph.
    pub fn reassemble(&self, tagged: &TaggedSeries) -> Result<SeriesElement, ReduceError> {
        let g = self.elim.original();
        let h = self.elim.reduced();
        let ubar = self.elim.removed();
        let mut merged: BTreeMap<BasisVector, Scalar> = BTreeMap::new();
        let mut exact = true;
        let mut horizon = usize::MAX;
        for (tag, part) in tagged.parts() {
            if part.space() != &self.space_h {
                return Err(ReduceError::SpaceMismatch);
            }
            let contributed = match tag {
                TransportTag::Corner => part.horizon(),
                TransportTag::Prefix(stem) => {
                    if stem.len() != 1 || stem.source() != ubar {
                        return Err(ReduceError::BadTag(
                            "a prefix must be a single edge leaving the removed source".into(),
                        ));
                    }
                    part.horizon() + 1
                }
                TransportTag::GhostPrefix(_) => {
                    return Err(ReduceError::BadTag(
                        "ghost prefixes arise only from cycle collapse".into(),
                    ))
                }
            };
            for (bv, k) in part.terms() {
                let tail = relabel_path(h, g, bv.gamma())?;
                let gamma = match tag {
                    TransportTag::Corner => tail,
                    TransportTag::Prefix(stem) => stem.concat(g, &tail)?,
                    TransportTag::GhostPrefix(_) => unreachable!("rejected above"),
                };
                merge_term(
                    &mut merged,
                    BasisVector::new(gamma, bv.fiber(), bv.level()),
                    k.clone(),
                )?;
            }
            if !part.is_exact() {
                exact = false;
                horizon = horizon.min(contributed);
            }
        }
        let body = ModuleElement::from_terms(&self.space_e, merged);
        let horizon = if exact { 0 } else { horizon };
        Ok(SeriesElement::from_parts(body, horizon, exact))
    }

    /// Includes a series over the reduced graph into the original one, as
    /// the corner part of an otherwise empty decomposition.
    pub fn lift(&self, z: &SeriesElement) -> Result<SeriesElement, ReduceError> {
        self.reassemble(&TaggedSeries::new(vec![(TransportTag::Corner, z.clone())]))
    }
}

/// The transport of tower series across a cycle collapse: basis paths
/// starting at the base or off the cycle decode directly, while paths
/// starting at the i-th cycle vertex are completed by the cycle prefix
/// and re-enter behind its ghost.
#[derive(Debug, Clone)]
pub struct CollapseTransport {
    cc: CycleCollapse,
    space_e: Arc<ModuleSpace>,
    space_f: Arc<ModuleSpace>,
    weights: BTreeMap<EdgeId, usize>,
}

/// Builds the transport for one cycle and modulus. The collapsed cycle
/// itself maps to the fresh loop; all other cycles keep their names.
pub fn collapse_transport(
    cc: &CycleCollapse,
    cycle: &Cycle,
    f: &Polynomial,
) -> Result<CollapseTransport, ReduceError> {
    let g = cc.original();
    let fgraph = cc.collapsed();
    let space_e = ModuleSpace::tower(g, cycle, f)?;
    let cycle_f = match cycle {
        Cycle::Proper(p) if p.edges() == cc.cycle().edges() => {
            Cycle::Proper(Path::from_edges(fgraph, vec![cc.dprime()])?)
        }
        other => relabel_cycle(g, fgraph, other).map_err(|_| ReduceError::CycleMissing)?,
    };
    let space_f = ModuleSpace::tower(fgraph, &cycle_f, f)?;
    let mut weights = BTreeMap::new();
    for e in fgraph.edge_ids() {
        weights.insert(e, 1);
    }
    weights.insert(cc.dprime(), cc.cycle().len());
    for (orig, img) in &cc.phi {
        weights.insert(*img, cc.entry_index[orig]);
    }
    Ok(CollapseTransport { cc: cc.clone(), space_e, space_f, weights })
}

impl CollapseTransport {
    pub fn space_over_original(&self) -> &Arc<ModuleSpace> {
        &self.space_e
    }

    pub fn space_over_collapsed(&self) -> &Arc<ModuleSpace> {
        &self.space_f
    }

    /// The largest horizon certifiable over the collapsed graph: every
    /// basis path within it must expand to length at most `avail`.
    fn horizon_to_collapsed(&self, avail: usize) -> usize {
        let fgraph = self.cc.collapsed();
        let base = self.space_f.base_vertex();
        let n = fgraph.vertex_count();
        let mut reach: Vec<Option<usize>> = vec![None; n];
        reach[base.index()] = Some(0);
        for l in 1..=avail {
            let mut next: Vec<Option<usize>> = vec![None; n];
            for v in fgraph.vertex_ids() {
                for &e in fgraph.out_edges(v) {
                    if let Some(w) = reach[fgraph.range(e).index()] {
                        let cand = w + self.weights[&e];
                        let slot = &mut next[v.index()];
                        *slot = Some(slot.map_or(cand, |c| c.max(cand)));
                    }
                }
            }
            let worst = next.iter().flatten().copied().max().unwrap_or(0);
            if worst > avail {
                return l - 1;
            }
            reach = next;
        }
        avail
    }

    /// Decoding cost of one original edge: interior cycle edges are free,
    /// while segment-closing edges emit one collapsed edge each.
    fn decode_cost(&self, e: EdgeId) -> usize {
        let d = self.cc.cycle().edges();
        match d.iter().position(|&x| x == e) {
            Some(k) if k + 1 == d.len() => 1,
            Some(_) => 0,
            None => 1,
        }
    }

    /// The largest horizon certifiable back over the original graph for a
    /// part whose basis paths start at one of `starts`: every walk from
    /// there to the base within it must decode to length at most `lf`.
    fn horizon_from_collapsed(&self, starts: &[VertexId], lf: usize) -> usize {
        let g = self.cc.original();
        let base = self.space_e.base_vertex();
        let r = self.cc.cycle().len();
        // walks longer than this decode past lf regardless of route
        let cap = r * (lf + 2);
        let n = g.vertex_count();
        let mut reach: Vec<Option<usize>> = vec![None; n];
        reach[base.index()] = Some(0);
        for l in 1..=cap {
            let mut next: Vec<Option<usize>> = vec![None; n];
            for v in g.vertex_ids() {
                for &e in g.out_edges(v) {
                    if let Some(w) = reach[g.range(e).index()] {
                        let cand = w + self.decode_cost(e);
                        let slot = &mut next[v.index()];
                        *slot = Some(slot.map_or(cand, |c| c.max(cand)));
                    }
                }
            }
            let worst = starts.iter().filter_map(|s| next[s.index()]).max().unwrap_or(0);
            if worst > lf {
                return l - 1;
            }
            reach = next;
        }
        cap
    }

    /// The start vertices whose basis paths a tag covers.
    fn tag_starts(&self, tag: &TransportTag) -> Vec<VertexId> {
        let g = self.cc.original();
        match tag {
            TransportTag::GhostPrefix(stem) => {
                vec![g.range(*stem.edges().last().expect("nonempty stem"))]
            }
            _ => {
                let base = self.cc.cycle().source();
                g.vertex_ids()
                    .filter(|v| *v == base || !self.cc.positions.contains_key(v))
                    .collect()
            }
        }
    }

    /// Splits a series over the original graph into a corner part and one
    /// ghost-prefix part per positive entry depth.
    pub fn decompose(&self, z: &SeriesElement) -> Result<TaggedSeries, ReduceError> {
        if z.space() != &self.space_e {
            return Err(ReduceError::SpaceMismatch);
        }
        let g = self.cc.original();
        let clen = self.space_e.cycle().len();
        if !z.is_exact() && z.horizon() < clen + 1 {
            return Err(EnvelopeError::HorizonTooSmall {
                required: clen + 1,
                available: z.horizon(),
            }
            .into());
        }
        let mut buckets: BTreeMap<usize, BTreeMap<BasisVector, Scalar>> = BTreeMap::new();
        for (bv, k) in z.terms() {
            let depth = self.cc.positions.get(&bv.gamma().source()).copied().unwrap_or(1);
            merge_term(buckets.entry(depth).or_default(), bv.clone(), k.clone())?;
        }
        let mut parts = Vec::new();
        for (depth, terms) in buckets {
            let (tag, completed) = if depth == 1 {
                (TransportTag::Corner, ModuleElement::from_terms(&self.space_e, terms))
            } else {
                let stem =
                    Path::from_edges(g, self.cc.cycle().edges()[..depth - 1].to_vec())?;
                let body = ModuleElement::from_terms(&self.space_e, terms);
                let a = AlgebraElement::path(g, self.space_e.base(), &stem);
                (TransportTag::GhostPrefix(stem), act(&a, &body)?)
            };
            let mut decoded: BTreeMap<BasisVector, Scalar> = BTreeMap::new();
            for (bv, k) in completed.terms() {
                let sigma = self.cc.theta_inverse_path(bv.gamma())?;
                merge_term(
                    &mut decoded,
                    BasisVector::new(sigma, bv.fiber(), bv.level()),
                    k.clone(),
                )?;
            }
            let body = ModuleElement::from_terms(&self.space_f, decoded);
            let lf = if z.is_exact() {
                0
            } else {
                self.horizon_to_collapsed(z.horizon() + depth - 1)
            };
            parts.push((tag, SeriesElement::from_parts(body, lf, z.is_exact())));
        }
        if parts.is_empty() {
            let lf = if z.is_exact() { 0 } else { self.horizon_to_collapsed(z.horizon()) };
            parts.push((
                TransportTag::Corner,
                SeriesElement::from_parts(ModuleElement::zero(&self.space_f), lf, z.is_exact()),
            ));
        }
        Ok(TaggedSeries::new(parts))
    }

    /// Reassembles tagged parts into a series over the original graph: each
    /// part is expanded term by term, ghost prefixes strip their completion
    /// back off, and horizons are recomputed from the decoding weights. The
    /// result is the sum of the given parts; an absent tag is a zero part.
    pub fn reassemble(&self, tagged: &TaggedSeries) -> Result<SeriesElement, ReduceError> {
        let g = self.cc.original();
        let mut acc = SeriesElement::zero(&self.space_e);
        for (tag, part) in tagged.parts() {
            if part.space() != &self.space_f {
                return Err(ReduceError::SpaceMismatch);
            }
            match tag {
                TransportTag::Prefix(_) => {
                    return Err(ReduceError::BadTag(
                        "real prefixes arise only from source elimination".into(),
                    ))
                }
                TransportTag::GhostPrefix(stem)
                    if stem.is_trivial()
                        || stem.len() >= self.cc.cycle().len()
                        || !self.cc.cycle().edges().starts_with(stem.edges()) =>
                {
                    return Err(ReduceError::BadTag(
                        "a ghost prefix must be a proper prefix of the cycle".into(),
                    ));
                }
                _ => {}
            }
            let mut expanded: BTreeMap<BasisVector, Scalar> = BTreeMap::new();
            for (bv, k) in part.terms() {
                let gamma = self.cc.theta_path(bv.gamma())?;
                merge_term(
                    &mut expanded,
                    BasisVector::new(gamma, bv.fiber(), bv.level()),
                    k.clone(),
                )?;
            }
            let mut body = ModuleElement::from_terms(&self.space_e, expanded);
            if let TransportTag::GhostPrefix(stem) = tag {
                let a = AlgebraElement::ghost_path(g, self.space_e.base(), stem);
                body = act(&a, &body)?;
            }
            let horizon = if part.is_exact() {
                0
            } else {
                self.horizon_from_collapsed(&self.tag_starts(tag), part.horizon())
            };
            acc = acc.add(&SeriesElement::from_parts(body, horizon, part.is_exact()))?;
        }
        Ok(acc)
    }

    /// Includes a series over the collapsed graph into the original one.
    pub fn lift(&self, z: &SeriesElement) -> Result<SeriesElement, ReduceError> {
        self.reassemble(&TaggedSeries::new(vec![(TransportTag::Corner, z.clone())]))
    }
}

/// One normalization move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReduceStep {
    Split { count: usize },
    EliminateSource { vertex: String },
    CollapseCycle { cycle: String },
}

impl fmt::Display for ReduceStep {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReduceStep::Split { count } => write!(out, "split into {count} components"),
            ReduceStep::EliminateSource { vertex } => {
                write!(out, "eliminate source `{vertex}`")
            }
            ReduceStep::CollapseCycle { cycle } => write!(out, "collapse cycle `{cycle}`"),
        }
    }
}

/// The result of running reductions to exhaustion: the moves taken and the
/// terminal graphs, one per final component.
#[derive(Debug, Clone)]
pub struct Normalization {
    pub steps: Vec<ReduceStep>,
    pub graphs: Vec<Arc<Graph>>,
}

/// Reduces until no move applies: split off components, eliminate the
/// source with the least name, collapse source cycles, repeat. Terminates
/// because every move lowers the vertex count or splits the graph.
pub fn normalize(g: &Arc<Graph>) -> Result<Normalization, ReduceError> {
    let mut steps = Vec::new();
    let mut done = Vec::new();
    let mut queue: VecDeque<Arc<Graph>> = VecDeque::new();
    let enqueue_split = |g: &Arc<Graph>, steps: &mut Vec<ReduceStep>,
                         queue: &mut VecDeque<Arc<Graph>>| {
        let comps = split_components(g);
        if comps.len() > 1 {
            steps.push(ReduceStep::Split { count: comps.len() });
        }
        for c in comps {
            queue.push_back(c.graph().clone());
        }
    };
    enqueue_split(g, &mut steps, &mut queue);
    while let Some(cur) = queue.pop_front() {
        if cur.vertex_count() == 1 && cur.edge_count() == 0 {
            done.push(cur);
            continue;
        }
        let source = cur
            .sources()
            .into_iter()
            .min_by_key(|&v| cur.vertex_name(v).to_string());
        if let Some(v) = source {
            let elim = eliminate_source(&cur, v)?;
            steps.push(ReduceStep::EliminateSource { vertex: cur.vertex_name(v).to_string() });
            enqueue_split(elim.reduced(), &mut steps, &mut queue);
            continue;
        }
        let collapsible = cur.cycles().into_iter().find(|c| match c {
            Cycle::Proper(p) => p.len() >= 2 && source_cycle_violation(&cur, p).is_none(),
            Cycle::Sink(_) => false,
        });
        if let Some(c) = collapsible {
            let word = c.display(&cur);
            let cc = collapse_cycle(&cur, &c)?;
            steps.push(ReduceStep::CollapseCycle { cycle: word });
            queue.push_back(cc.collapsed().clone());
            continue;
        }
        assert_normal_form(&cur)?;
        done.push(cur);
    }
    Ok(Normalization { steps, graphs: done })
}

/// Checks the terminal shape: connected, no sources, and every source
/// cycle already a loop. A single vertex without edges also qualifies, as
/// the remnant of a fully reduced component.
pub fn assert_normal_form(g: &Arc<Graph>) -> Result<(), ReduceError> {
    if g.vertex_count() == 1 && g.edge_count() == 0 {
        return Ok(());
    }
    if split_components(g).len() > 1 {
        return Err(ReduceError::NotNormalForm("the graph is disconnected".into()));
    }
    if let Some(&v) = g.sources().first() {
        return Err(ReduceError::NotNormalForm(format!(
            "vertex `{}` is a source",
            g.vertex_name(v)
        )));
    }
    for c in g.cycles() {
        if let Cycle::Proper(p) = &c {
            if p.len() >= 2 && source_cycle_violation(g, p).is_none() {
                return Err(ReduceError::NotNormalForm(format!(
                    "source cycle `{}` is not a loop",
                    g.format_path(p)
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{series_eq, SeriesEq};

    fn load(text: &str) -> Arc<Graph> {
        Arc::new(Graph::parse(text).expect("fixture parses"))
    }

    fn reference() -> Arc<Graph> {
        load(include_str!("../../../graphs/reference.graph"))
    }

    fn pre_collapse() -> Arc<Graph> {
        load(include_str!("../../../graphs/pre_collapse.graph"))
    }

    fn collapsed() -> Arc<Graph> {
        load(include_str!("../../../graphs/collapsed.graph"))
    }

    fn four_cycle(g: &Arc<Graph>) -> Cycle {
        g.cycles().into_iter().find(|c| c.len() == 4).expect("the 4-cycle exists")
    }

    fn modulus(coeffs: &[i64]) -> Polynomial {
        Polynomial::from_i64_coeffs(&BaseField::rational(), coeffs)
    }

    #[test]
    fn components_split_in_declaration_order() {
        let g = Arc::new(
            Graph::build(&["a", "b", "c"], &[("e1", "a", "b")]).expect("builds"),
        );
        let comps = split_components(&g);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].graph().vertex_count(), 2);
        assert_eq!(comps[1].graph().vertex_count(), 1);
        let field = Field::base(BaseField::rational());
        assert_eq!(comps[0].idempotent(&field).term_count(), 2);
        assert_eq!(comps[1].idempotent(&field).term_count(), 1);
    }

    #[test]
    fn source_elimination_matches_the_frozen_graph() {
        let g = reference();
        let ubar = g.vertex_id("ubar").expect("ubar exists");
        let elim = eliminate_source(&g, ubar).expect("ubar is a source");
        assert_eq!(**elim.reduced(), *pre_collapse());
        let field = Field::base(BaseField::rational());
        assert_eq!(elim.epsilon(&field).term_count(), g.vertex_count() - 1);
        let s1 = g.vertex_id("s1").expect("s1 exists");
        assert!(matches!(eliminate_source(&g, s1), Err(ReduceError::NotASource(_))));
    }

    #[test]
    fn collapse_matches_the_frozen_graph() {
        let g = pre_collapse();
        let cc = collapse_cycle(&g, &four_cycle(&g)).expect("collapsible");
        assert_eq!(**cc.collapsed(), *collapsed());
        let f = cc.collapsed();
        let image = |word: &[&str]| {
            let p = Path::from_edge_names(f, word).expect("path over the collapse");
            cc.theta_path(&p).expect("maps")
        };
        let expect = |word: &[&str]| Path::from_edge_names(&g, word).expect("path");
        assert_eq!(image(&["dprime"]), expect(&["d1", "d2", "d3", "d4"]));
        assert_eq!(image(&["phi_b"]), expect(&["d1", "b"]));
        assert_eq!(image(&["phi_m"]), expect(&["d1", "d2", "m"]));
    }

    #[test]
    fn collapse_rejects_bad_cycles() {
        let g = pre_collapse();
        let loop_l = g.cycle_by_name("l").expect("the loop l");
        assert!(matches!(
            collapse_cycle(&g, &loop_l),
            Err(ReduceError::NotASourceCycle { .. })
        ));
        let g3 = g.cycle_by_name("g1g2g3").expect("the 3-cycle");
        assert!(matches!(
            collapse_cycle(&g, &g3),
            Err(ReduceError::NotASourceCycle { .. })
        ));
    }

    #[test]
    fn fresh_names_step_around_collisions() {
        let g = Arc::new(
            Graph::build(
                &["x", "y", "vbar"],
                &[("c1", "x", "y"), ("c2", "y", "x"), ("f", "x", "vbar")],
            )
            .expect("builds"),
        );
        let c = g.cycle_by_name("c1c2").expect("the 2-cycle");
        let cc = collapse_cycle(&g, &c).expect("collapsible");
        let fg = cc.collapsed();
        assert_eq!(fg.vertex_name(cc.vbar()), "vbar_");
        assert!(fg.edge_id("phi_f").is_ok());
        let phi_f = Path::from_edge_names(fg, &["phi_f"]).expect("edge path");
        assert_eq!(g.format_path(&cc.theta_path(&phi_f).expect("maps")), "f");
    }

    #[test]
    fn theta_is_multiplicative_on_samples() {
        let g = pre_collapse();
        let cc = collapse_cycle(&g, &four_cycle(&g)).expect("collapsible");
        let fg = cc.collapsed().clone();
        let field = Field::base(BaseField::rational());
        let dprime = AlgebraElement::path(
            &fg,
            &field,
            &Path::from_edge_names(&fg, &["dprime"]).expect("path"),
        );
        let phi_b = AlgebraElement::path(
            &fg,
            &field,
            &Path::from_edge_names(&fg, &["phi_b"]).expect("path"),
        );
        for (x, y) in [
            (dprime.clone(), dprime.clone()),
            (phi_b.star(), dprime.clone()),
            (dprime.star(), phi_b.clone()),
            (phi_b.star(), phi_b.clone()),
        ] {
            let lhs = cc.theta(&x.mul(&y).expect("product")).expect("maps");
            let rhs = cc
                .theta(&x)
                .expect("maps")
                .mul(&cc.theta(&y).expect("maps"))
                .expect("product");
            assert!(lhs.sub(&rhs).expect("same algebra").is_zero());
        }
    }

    #[test]
    fn theta_inverse_decodes_corner_paths() {
        let g = pre_collapse();
        let cc = collapse_cycle(&g, &four_cycle(&g)).expect("collapsible");
        let fg = cc.collapsed();
        let decode = |word: &[&str]| {
            cc.theta_inverse_path(&Path::from_edge_names(&g, word).expect("path"))
        };
        let expect = |word: &[&str]| Path::from_edge_names(fg, word).expect("path");
        assert_eq!(decode(&["d1", "d2", "d3", "d4"]).expect("decodes"), expect(&["dprime"]));
        assert_eq!(decode(&["d1", "b"]).expect("decodes"), expect(&["phi_b"]));
        assert_eq!(
            decode(&["d1", "d2", "d3", "d4", "d1", "d2", "m"]).expect("decodes"),
            expect(&["dprime", "phi_m"])
        );
        assert!(matches!(decode(&["d2", "d3"]), Err(ReduceError::NotInCorner(_))));
        assert!(matches!(decode(&["d1", "d2"]), Err(ReduceError::NotInCorner(_))));
        let s1 = Path::trivial(g.vertex_id("s1").expect("s1"));
        let at_base = cc.theta_inverse_path(&s1).expect("decodes");
        assert_eq!(at_base.source(), cc.vbar());
    }

    #[test]
    fn source_transport_round_trips() {
        let g = reference();
        let ubar = g.vertex_id("ubar").expect("ubar");
        let elim = eliminate_source(&g, ubar).expect("source");
        let tr = source_transport(&elim, &four_cycle(&g), &modulus(&[-1, 1])).expect("builds");
        let space = tr.space_over_original().clone();
        let one = space.base().one();
        let two = space.base().from_i64(2);
        let pd4 = Path::from_edge_names(&g, &["p", "d4"]).expect("path");
        let d234 = Path::from_edge_names(&g, &["d2", "d3", "d4"]).expect("path");
        let hook = ModuleElement::basis(&space, &pd4, 0, 1, &one).expect("term");
        let deep = ModuleElement::basis(&space, &d234, 0, 2, &two).expect("term");
        let m = hook.add(&deep).expect("same space");
        let z = SeriesElement::embed(&m);
        let tagged = tr.decompose(&z).expect("decomposes");
        assert_eq!(tagged.parts().len(), 2);
        assert!(matches!(tagged.parts()[0].0, TransportTag::Corner));
        assert!(matches!(tagged.parts()[1].0, TransportTag::Prefix(_)));
        let back = tr.reassemble(&tagged).expect("reassembles");
        assert_eq!(series_eq(&back, &z).expect("comparable"), SeriesEq::Equal);
        let lifted = tr.lift(&tagged.parts()[0].1).expect("lifts");
        let d234_coeff = lifted.coefficient(&d234, 0, 2).expect("inside horizon");
        assert_eq!(d234_coeff, two);
        assert!(lifted.coefficient(&pd4, 0, 1).expect("inside horizon").is_zero());
    }

    #[test]
    fn collapse_transport_round_trips() {
        let g = pre_collapse();
        let cc = collapse_cycle(&g, &four_cycle(&g)).expect("collapsible");
        let tr = collapse_transport(&cc, &four_cycle(&g), &modulus(&[-1, 1, 1])).expect("builds");
        let space = tr.space_over_original().clone();
        let one = space.base().one();
        let s1 = Path::trivial(g.vertex_id("s1").expect("s1"));
        let d4 = Path::from_edge_names(&g, &["d4"]).expect("path");
        let d234 = Path::from_edge_names(&g, &["d2", "d3", "d4"]).expect("path");
        let m = ModuleElement::basis(&space, &s1, 0, 1, &one)
            .expect("term")
            .add(&ModuleElement::basis(&space, &d4, 1, 1, &one).expect("term"))
            .expect("same space")
            .add(&ModuleElement::basis(&space, &d234, 0, 2, &one).expect("term"))
            .expect("same space");
        let z = SeriesElement::embed(&m);
        let tagged = tr.decompose(&z).expect("decomposes");
        assert_eq!(tagged.parts().len(), 3);
        let back = tr.reassemble(&tagged).expect("reassembles");
        assert_eq!(series_eq(&back, &z).expect("comparable"), SeriesEq::Equal);
    }

    #[test]
    fn inexact_collapse_transport_caps_the_horizon() {
        let g = pre_collapse();
        let cc = collapse_cycle(&g, &four_cycle(&g)).expect("collapsible");
        let tr = collapse_transport(&cc, &four_cycle(&g), &modulus(&[-1, 1])).expect("builds");
        let space = tr.space_over_original().clone();
        let gen = ModuleElement::generator(&space, 1).expect("generator");
        let z = SeriesElement::embed(&gen).truncate_to_inexact(6);
        let tagged = tr.decompose(&z).expect("decomposes");
        assert_eq!(tagged.parts().len(), 1);
        let part = &tagged.parts()[0].1;
        assert!(!part.is_exact());
        assert_eq!(part.horizon(), 1);
        let back = tr.reassemble(&tagged).expect("reassembles");
        assert!(!back.is_exact());
        assert_eq!(back.horizon(), 7);
        assert_eq!(series_eq(&back, &z).expect("comparable"), SeriesEq::EqualToHorizon(6));
        let too_small = SeriesElement::embed(&gen).truncate_to_inexact(3);
        assert!(matches!(
            tr.decompose(&too_small),
            Err(ReduceError::Envelope(EnvelopeError::HorizonTooSmall { required: 5, .. }))
        ));
    }

    #[test]
    fn ghost_parts_keep_their_reach_through_the_round_trip() {
        let g = pre_collapse();
        let cc = collapse_cycle(&g, &four_cycle(&g)).expect("collapsible");
        let gcycle = g.cycle_by_name("g1g2g3").expect("the 3-cycle exists");
        let tr = collapse_transport(&cc, &gcycle, &modulus(&[-1, 1])).expect("builds");
        let space = tr.space_over_original().clone();
        let one = space.base().one();
        let gamma = Path::from_edge_names(&g, &["d4", "d1", "b", "g3"]).expect("path");
        let m = ModuleElement::basis(&space, &gamma, 0, 1, &one).expect("term");
        let z = SeriesElement::embed(&m).truncate_to_inexact(6);
        let tagged = tr.decompose(&z).expect("decomposes");
        assert_eq!(tagged.parts().len(), 1);
        let (tag, part) = &tagged.parts()[0];
        let stem = Path::from_edge_names(&g, &["d1", "d2", "d3"]).expect("path");
        assert_eq!(tag, &TransportTag::GhostPrefix(stem));
        assert_eq!(part.horizon(), 3);
        let fgraph = cc.collapsed();
        let sigma = Path::from_edge_names(fgraph, &["dprime", "phi_b", "g3"]).expect("path");
        assert_eq!(part.coefficient(&sigma, 0, 1).expect("inside horizon"), one);
        let back = tr.reassemble(&tagged).expect("reassembles");
        assert!(!back.is_exact());
        assert_eq!(back.horizon(), 6);
        assert_eq!(back.coefficient(&gamma, 0, 1).expect("inside horizon"), one);
        assert_eq!(series_eq(&back, &z).expect("comparable"), SeriesEq::EqualToHorizon(6));
    }

    #[test]
    fn chains_normalize_to_a_point() {
        let g = load(include_str!("../../../graphs/chain.graph"));
        let norm = normalize(&g).expect("normalizes");
        assert_eq!(
            norm.steps,
            vec![
                ReduceStep::EliminateSource { vertex: "u".into() },
                ReduceStep::EliminateSource { vertex: "v".into() },
            ]
        );
        assert_eq!(norm.graphs.len(), 1);
        assert_eq!(norm.graphs[0].vertex_count(), 1);
        assert_eq!(norm.graphs[0].edge_count(), 0);
    }

    #[test]
    fn the_reference_graph_normalizes_to_the_collapsed_graph() {
        let norm = normalize(&reference()).expect("normalizes");
        assert_eq!(
            norm.steps,
            vec![
                ReduceStep::EliminateSource { vertex: "ubar".into() },
                ReduceStep::CollapseCycle { cycle: "d1d2d3d4".into() },
            ]
        );
        assert_eq!(norm.graphs.len(), 1);
        assert_eq!(*norm.graphs[0], *collapsed());
        assert!(assert_normal_form(&norm.graphs[0]).is_ok());
        assert!(matches!(
            assert_normal_form(&reference()),
            Err(ReduceError::NotNormalForm(_))
        ));
    }
}
