//! The path algebra with ghost edges: elements in normal form, products,
//! the star involution, gauge twists, and principal ideal membership
//! witnesses at a source loop.

use crate::graph::{Cycle, EdgeId, Graph, GraphError, Path, VertexId};
use crate::scalar::{Field, Polynomial, Scalar, ScalarError};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Errors from algebra construction and evaluation.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("elements live over different graphs")]
    GraphMismatch,
    #[error("monomial halves must share a range vertex")]
    RangeMismatch,
    #[error("parse error at position {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("`{0}` is not a source loop: {1}")]
    NotSourceLoop(String, String),
    #[error("entrance index {got} out of range 1..={max}")]
    BadEntranceIndex { got: usize, max: usize },
    #[error("polynomial must have constant term 1")]
    BadConstantTerm,
    #[error("internal witness verification failed: {0}")]
    WitnessCheckFailed(String),
}

fn perr(pos: usize, message: impl Into<String>) -> AlgebraError {
    AlgebraError::Parse { pos, message: message.into() }
}

/// A normal-form monomial: a real path and a ghost path with common range.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    lambda: Path,
    mu: Path,
}

impl Monomial {
    /// The real half.
    pub fn lambda(&self) -> &Path {
        &self.lambda
    }

    /// The ghost half (starred in print order).
    pub fn mu(&self) -> &Path {
        &self.mu
    }
}

/// An element of the algebra: a scalar combination of monomials, kept in
/// the canonical basis at all times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    graph: Arc<Graph>,
    field: Field,
    terms: BTreeMap<Monomial, Scalar>,
}

/// True when the monomial is outside the canonical basis: both halves end
/// with the first-declared edge of some common vertex.
fn reducible(g: &Graph, m: &Monomial) -> Option<(Path, Path, VertexId, EdgeId)> {
    let (lam, le) = m.lambda.without_last()?;
    let (mu, me) = m.mu.without_last()?;
    if le != me {
        return None;
    }
    let v = g.source(le);
    if g.special_edge(v) != Some(le) {
        return None;
    }
    Some((lam, mu, v, le))
}

fn add_term(terms: &mut BTreeMap<Monomial, Scalar>, m: Monomial, k: Scalar) {
    match terms.entry(m) {
        std::collections::btree_map::Entry::Vacant(slot) => {
            if !k.is_zero() {
                slot.insert(k);
            }
        }
        std::collections::btree_map::Entry::Occupied(mut slot) => {
            let sum = slot.get().add(&k).expect("same field by construction");
            if sum.is_zero() {
                slot.remove();
            } else {
                slot.insert(sum);
            }
        }
    }
}

/// Rewrites a monomial into the canonical basis and accumulates it: a
/// terminal pair gamma_v gamma_v* expands through the vertex relation.
fn insert_normalized(g: &Graph, terms: &mut BTreeMap<Monomial, Scalar>, m: Monomial, k: Scalar) {
    let mut work = vec![(m, k)];
    while let Some((m, k)) = work.pop() {
        if k.is_zero() {
            continue;
        }
        match reducible(g, &m) {
            None => add_term(terms, m, k),
            Some((lam, mu, v, f)) => {
                work.push((Monomial { lambda: lam.clone(), mu: mu.clone() }, k.clone()));
                for &e in g.out_edges(v) {
                    if e == f {
                        continue;
                    }
                    let lambda = lam.append(g, e).expect("out-edge composes");
                    let mu = mu.append(g, e).expect("out-edge composes");
                    work.push((Monomial { lambda, mu }, k.neg()));
                }
            }
        }
    }
}

impl AlgebraElement {
    /// The zero element.
    pub fn zero(graph: &Arc<Graph>, field: &Field) -> AlgebraElement {
        AlgebraElement { graph: graph.clone(), field: field.clone(), terms: BTreeMap::new() }
    }

    /// The identity: the sum of all vertices.
    pub fn one(graph: &Arc<Graph>, field: &Field) -> AlgebraElement {
        let mut out = AlgebraElement::zero(graph, field);
        for v in graph.vertex_ids() {
            let t = Path::trivial(v);
            add_term(&mut out.terms, Monomial { lambda: t.clone(), mu: t }, field.one());
        }
        out
    }

    /// A vertex idempotent.
    pub fn vertex(graph: &Arc<Graph>, field: &Field, v: VertexId) -> AlgebraElement {
        let t = Path::trivial(v);
        AlgebraElement::monomial(graph, field, t.clone(), t, field.one())
            .expect("trivial halves share a range")
    }

    /// A real edge.
    pub fn edge(graph: &Arc<Graph>, field: &Field, e: EdgeId) -> AlgebraElement {
        let lam = Path::trivial(graph.source(e)).append(graph, e).expect("edge composes");
        let mu = Path::trivial(graph.range(e));
        AlgebraElement::monomial(graph, field, lam, mu, field.one()).expect("shared range")
    }

    /// A ghost edge e*.
    pub fn ghost(graph: &Arc<Graph>, field: &Field, e: EdgeId) -> AlgebraElement {
        AlgebraElement::edge(graph, field, e).star()
    }

    /// A real path as an element; trivial paths give the vertex.
    pub fn path(graph: &Arc<Graph>, field: &Field, p: &Path) -> AlgebraElement {
        let mu = Path::trivial(p.range(graph));
        AlgebraElement::monomial(graph, field, p.clone(), mu, field.one()).expect("shared range")
    }

    /// A ghost path p* as an element.
    pub fn ghost_path(graph: &Arc<Graph>, field: &Field, p: &Path) -> AlgebraElement {
        AlgebraElement::path(graph, field, p).star()
    }

    /// A scalar multiple of the identity.
    pub fn scalar(graph: &Arc<Graph>, field: &Field, k: &Scalar) -> AlgebraElement {
        AlgebraElement::one(graph, field).scale(k).expect("field matches")
    }

    /// The single monomial k lambda mu*; the halves must share a range.
    pub fn monomial(
        graph: &Arc<Graph>,
        field: &Field,
        lambda: Path,
        mu: Path,
        k: Scalar,
    ) -> Result<AlgebraElement, AlgebraError> {
        if lambda.range(graph) != mu.range(graph) {
            return Err(AlgebraError::RangeMismatch);
        }
        if k.field() != field {
            return Err(ScalarError::FieldMismatch.into());
        }
        let mut out = AlgebraElement::zero(graph, field);
        insert_normalized(graph, &mut out.terms, Monomial { lambda, mu }, k);
        Ok(out)
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Normal-form terms in deterministic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn check(&self, other: &AlgebraElement) -> Result<(), AlgebraError> {
        if !Arc::ptr_eq(&self.graph, &other.graph) && *self.graph != *other.graph {
            return Err(AlgebraError::GraphMismatch);
        }
        if self.field != other.field {
            return Err(ScalarError::FieldMismatch.into());
        }
        Ok(())
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, k) in &other.terms {
            add_term(&mut out.terms, m.clone(), k.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> AlgebraElement {
        let mut out = self.clone();
        for k in out.terms.values_mut() {
            *k = k.neg();
        }
        out
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Scalar) -> Result<AlgebraElement, AlgebraError> {
        if k.field() != &self.field {
            return Err(ScalarError::FieldMismatch.into());
        }
        let mut out = AlgebraElement::zero(&self.graph, &self.field);
        for (m, c) in &self.terms {
            add_term(&mut out.terms, m.clone(), c.mul(k)?);
        }
        Ok(out)
    }

    /// Product in the algebra; non-composable monomial pairs vanish.
    pub fn mul(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.check(other)?;
        let g = self.graph.as_ref();
        let mut out = AlgebraElement::zero(&self.graph, &self.field);
        for (m1, k1) in &self.terms {
            for (m2, k2) in &other.terms {
                if let Some(m) = combine(g, m1, m2) {
                    insert_normalized(g, &mut out.terms, m, k1.mul(k2)?);
                }
            }
        }
        Ok(out)
    }

    /// The star involution: swaps real and ghost halves, fixing scalars.
    pub fn star(&self) -> AlgebraElement {
        let mut out = AlgebraElement::zero(&self.graph, &self.field);
        for (m, k) in &self.terms {
            // the canonical-basis condition is symmetric in the halves
            add_term(
                &mut out.terms,
                Monomial { lambda: m.mu.clone(), mu: m.lambda.clone() },
                k.clone(),
            );
        }
        out
    }

    pub fn pow(&self, n: u32) -> Result<AlgebraElement, AlgebraError> {
        let mut acc = AlgebraElement::one(&self.graph, &self.field);
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// The gauge twist along a cycle: each occurrence of the cycle's first
    /// edge in the real half scales by s, in the ghost half by 1/s.
    pub fn gauge(&self, c: &Cycle, s: &Scalar) -> Result<AlgebraElement, AlgebraError> {
        if s.is_zero() {
            return Err(ScalarError::DivisionByZero.into());
        }
        if s.field() != &self.field {
            return Err(ScalarError::FieldMismatch.into());
        }
        let e1 = match c.first_edge() {
            Some(e) => e,
            None => return Ok(self.clone()),
        };
        let count = |p: &Path| p.edges().iter().filter(|&&e| e == e1).count() as i64;
        let mut out = AlgebraElement::zero(&self.graph, &self.field);
        for (m, k) in &self.terms {
            let exp = count(&m.lambda) - count(&m.mu);
            add_term(&mut out.terms, m.clone(), k.mul(&s.pow(exp)?)?);
        }
        Ok(out)
    }
}

fn combine(g: &Graph, m1: &Monomial, m2: &Monomial) -> Option<Monomial> {
    if let Some(delta) = m2.lambda.strip_prefix(g, &m1.mu) {
        let lambda = m1.lambda.concat(g, &delta).expect("ranges align");
        return Some(Monomial { lambda, mu: m2.mu.clone() });
    }
    if let Some(delta) = m1.mu.strip_prefix(g, &m2.lambda) {
        let mu = m2.mu.concat(g, &delta).expect("ranges align");
        return Some(Monomial { lambda: m1.lambda.clone(), mu });
    }
    None
}

/// Data at a source loop tau: the loop vertex, its entrances into the rest
/// of the graph, the corner idempotent rho, and the hereditary saturated
/// complement supporting the two-sided ideal it generates.
#[derive(Debug, Clone)]
pub struct CornerData {
    pub t: VertexId,
    pub loop_edge: EdgeId,
    pub entrances: Vec<EdgeId>,
    pub rho: AlgebraElement,
    pub ideal_support: BTreeSet<VertexId>,
}

impl CornerData {
    /// Membership in the ideal generated by the complement of t: every
    /// normal-form monomial must range inside the support.
    pub fn ideal_contains(&self, a: &AlgebraElement) -> bool {
        a.terms().all(|(m, _)| {
            self.ideal_support.contains(&m.lambda().range(a.graph()))
        })
    }
}

/// Validates a source loop and assembles its corner data.
pub fn corner_idempotents(
    graph: &Arc<Graph>,
    field: &Field,
    tau: EdgeId,
) -> Result<CornerData, AlgebraError> {
    let name = graph.edge_name(tau).to_string();
    let t = graph.source(tau);
    if graph.range(tau) != t {
        return Err(AlgebraError::NotSourceLoop(name, "not a loop".into()));
    }
    if graph.in_edges(t) != [tau] {
        return Err(AlgebraError::NotSourceLoop(
            name,
            "its vertex has entrances besides the loop".into(),
        ));
    }
    let entrances: Vec<EdgeId> =
        graph.out_edges(t).iter().copied().filter(|&e| e != tau).collect();
    let mut rho = AlgebraElement::zero(graph, field);
    let mut ideal_support = BTreeSet::new();
    for v in graph.vertex_ids() {
        if v != t {
            rho = rho.add(&AlgebraElement::vertex(graph, field, v))?;
            ideal_support.insert(v);
        }
    }
    Ok(CornerData { t, loop_edge: tau, entrances, rho, ideal_support })
}

/// A witness lambda with lambda * p(tau) = eps_j* (tau*)^ell, computed by
/// the recursion lambda_n = eps_j*(tau*)^n - sum a_i lambda_{n-i} and
/// verified by normal-form multiplication before returning.
pub fn principal_membership(
    graph: &Arc<Graph>,
    field: &Field,
    tau: EdgeId,
    p: &Polynomial,
    j: usize,
    ell: usize,
) -> Result<AlgebraElement, AlgebraError> {
    let corner = corner_idempotents(graph, field, tau)?;
    if p.base() != field.base_field() || field.degree() != 1 {
        return Err(ScalarError::FieldMismatch.into());
    }
    if p.coeff_in(0, field)? != field.one() {
        return Err(AlgebraError::BadConstantTerm);
    }
    if j == 0 || j > corner.entrances.len() {
        return Err(AlgebraError::BadEntranceIndex { got: j, max: corner.entrances.len() });
    }
    let eps = corner.entrances[j - 1];
    let m = p.degree().unwrap_or(0);

    let tau_pow = |n: usize| -> Path {
        let mut path = Path::trivial(corner.t);
        for _ in 0..n {
            path = path.append(graph, tau).expect("loop composes");
        }
        path
    };
    // eps_j* (tau*)^n = (tau^n eps_j)*
    let ghost_seed = |n: usize| -> Result<AlgebraElement, AlgebraError> {
        let real = tau_pow(n).append(graph, eps).expect("entrance composes");
        Ok(AlgebraElement::ghost_path(graph, field, &real))
    };

    let mut lambdas: Vec<AlgebraElement> = vec![ghost_seed(0)?];
    for n in 1..=ell {
        let mut acc = ghost_seed(n)?;
        for i in 1..=m.min(n) {
            let a_i = p.coeff_in(i, field)?;
            acc = acc.sub(&lambdas[n - i].scale(&a_i)?)?;
        }
        lambdas.push(acc);
    }

    // p(tau) has the full identity in degree zero
    let mut p_of_tau = AlgebraElement::one(graph, field);
    for i in 1..=m {
        let coeff = p.coeff_in(i, field)?;
        let power = AlgebraElement::path(graph, field, &tau_pow(i));
        p_of_tau = p_of_tau.add(&power.scale(&coeff)?)?;
    }
    let witness = lambdas.pop().expect("ell + 1 entries");
    let check = witness.mul(&p_of_tau)?;
    if check != ghost_seed(ell)? {
        return Err(AlgebraError::WitnessCheckFailed(format!(
            "j={j} ell={ell} p={p}: product differs from the ghost seed"
        )));
    }
    Ok(witness)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Plus,
    Minus,
    Star { glued: bool },
    Prime,
    CaretStar,
    CaretInt(u32),
    LParen,
    RParen,
    Ident(String),
    Int(u64),
    Slash,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, AlgebraError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let mut after_space = true;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            after_space = true;
            i += 1;
            continue;
        }
        let pos = i;
        let tok = match c {
            '+' => {
                i += 1;
                Tok::Plus
            }
            '-' => {
                i += 1;
                Tok::Minus
            }
            '*' => {
                i += 1;
                Tok::Star { glued: !after_space }
            }
            '\'' => {
                i += 1;
                Tok::Prime
            }
            '/' => {
                i += 1;
                Tok::Slash
            }
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            '^' => {
                i += 1;
                if i < chars.len() && chars[i] == '*' {
                    i += 1;
                    Tok::CaretStar
                } else {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    if i == start {
                        return Err(perr(pos, "expected * or digits after ^"));
                    }
                    let n: u32 = chars[start..i]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| perr(pos, "exponent too large"))?;
                    Tok::CaretInt(n)
                }
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let n: u64 = chars[start..i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| perr(pos, "number too large"))?;
                Tok::Int(n)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                Tok::Ident(chars[start..i].iter().collect())
            }
            other => return Err(perr(pos, format!("unexpected character `{other}`"))),
        };
        toks.push((pos, tok));
        after_space = false;
    }
    Ok(toks)
}

struct ElementParser<'a> {
    graph: &'a Arc<Graph>,
    field: &'a Field,
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl<'a> ElementParser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(usize::MAX, |(p, _)| *p)
    }

    fn advance(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<AlgebraElement, AlgebraError> {
        let mut negate = false;
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.advance();
            negate = true;
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.advance();
                    acc = acc.add(&self.term()?)?;
                }
                Some(Tok::Minus) => {
                    self.advance();
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    /// A term is a product of factors, juxtaposed or joined by a spaced *.
    fn term(&mut self) -> Result<AlgebraElement, AlgebraError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star { glued: false }) => {
                    self.advance();
                    acc = acc.mul(&self.factor()?)?;
                }
                Some(Tok::Ident(_) | Tok::Int(_) | Tok::LParen) => {
                    acc = acc.mul(&self.factor()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<AlgebraElement, AlgebraError> {
        let mut acc = self.primary()?;
        loop {
            match self.peek() {
                Some(Tok::Prime) | Some(Tok::CaretStar) | Some(Tok::Star { glued: true }) => {
                    self.advance();
                    acc = acc.star();
                }
                Some(Tok::CaretInt(n)) => {
                    let n = *n;
                    self.advance();
                    acc = acc.pow(n)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn primary(&mut self) -> Result<AlgebraElement, AlgebraError> {
        let pos = self.pos();
        match self.advance() {
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.advance() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(perr(pos, "unclosed parenthesis")),
                }
            }
            Some(Tok::Int(n)) => {
                let n = i64::try_from(n).map_err(|_| perr(pos, "number too large"))?;
                let k = if matches!(self.peek(), Some(Tok::Slash)) {
                    self.advance();
                    match self.advance() {
                        Some(Tok::Int(d)) => {
                            let d = i64::try_from(d).map_err(|_| perr(pos, "number too large"))?;
                            self.field.from_ratio(n, d).map_err(AlgebraError::from)?
                        }
                        _ => return Err(perr(pos, "expected denominator")),
                    }
                } else {
                    self.field.from_i64(n)
                };
                Ok(AlgebraElement::scalar(self.graph, self.field, &k))
            }
            Some(Tok::Ident(name)) => self.resolve(pos, &name),
            Some(t) => Err(perr(pos, format!("unexpected token {t:?}"))),
            None => Err(perr(pos, "unexpected end of input")),
        }
    }

    fn resolve(&self, pos: usize, name: &str) -> Result<AlgebraElement, AlgebraError> {
        let vertex = self.graph.vertex_id(name).ok();
        let edge = self.graph.edge_id(name).ok();
        match (vertex, edge) {
            (Some(_), Some(_)) => {
                Err(perr(pos, format!("`{name}` names both a vertex and an edge")))
            }
            (Some(v), None) => Ok(AlgebraElement::vertex(self.graph, self.field, v)),
            (None, Some(e)) => Ok(AlgebraElement::edge(self.graph, self.field, e)),
            (None, None) if name == "x" => {
                let x = self.field.x_bar().map_err(AlgebraError::from)?;
                Ok(AlgebraElement::scalar(self.graph, self.field, &x))
            }
            (None, None) => match self.graph.parse_path_word(name) {
                Ok(path) => Ok(AlgebraElement::path(self.graph, self.field, &path)),
                Err(GraphError::AmbiguousWord { word, detail }) => {
                    Err(GraphError::AmbiguousWord { word, detail }.into())
                }
                Err(_) => Err(perr(pos, format!("unknown identifier `{name}`"))),
            },
        }
    }
}

/// Parses an algebra expression over a graph: identifiers name vertices and
/// edges, a glued `*`, `'`, or `^*` stars the atom before it, a spaced `*`
/// or juxtaposition multiplies, and `x` is the extension generator unless
/// the graph shadows it.
pub fn parse_element(
    text: &str,
    graph: &Arc<Graph>,
    field: &Field,
) -> Result<AlgebraElement, AlgebraError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(perr(0, "empty expression"));
    }
    let mut p = ElementParser { graph, field, toks, at: 0 };
    let out = p.expr()?;
    if p.at != p.toks.len() {
        return Err(perr(p.pos(), "trailing input"));
    }
    Ok(out)
}

/// Prints a real path for element output: glued when unambiguous, space
/// separated edge names otherwise.
fn format_real(g: &Graph, p: &Path) -> String {
    let formatted = g.format_path(p);
    if formatted.contains('.') {
        formatted.replace('.', " ")
    } else {
        formatted
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(out, "0");
        }
        let g = self.graph.as_ref();
        let mut first = true;
        for (m, k) in &self.terms {
            if !first {
                write!(out, " + ")?;
            }
            first = false;
            let lam = m.lambda();
            let mu = m.mu();
            let mut body = String::new();
            if !lam.is_trivial() {
                body.push_str(&format_real(g, lam));
            }
            if !mu.is_trivial() {
                if !body.is_empty() {
                    body.push(' ');
                }
                for (i, &e) in mu.edges().iter().rev().enumerate() {
                    if i > 0 {
                        body.push(' ');
                    }
                    body.push_str(g.edge_name(e));
                    body.push('\'');
                }
            }
            if body.is_empty() {
                body = g.vertex_name(lam.source()).to_string();
            }
            let ks = k.to_string();
            if k.is_one() {
                write!(out, "{body}")?;
            } else if ks.chars().all(|c| c.is_ascii_digit() || c == '/') {
                write!(out, "{ks} {body}")?;
            } else {
                write!(out, "({ks}) {body}")?;
            }
        }
        Ok(())
    }
}
