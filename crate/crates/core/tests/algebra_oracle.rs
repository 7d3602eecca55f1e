//! Ring-level properties of the normal form: axioms on random triples,
//! star, gauge, parsing, and frozen rewrites of the special edge.

use std::sync::Arc;

use proptest::prelude::*;

use lpa_core::algebra::{parse_element, AlgebraElement};
use lpa_core::corpus;
use lpa_core::graph::{Graph, Path, VertexId};
use lpa_core::scalar::Field;

fn walk_to(g: &Graph, end: VertexId, picks: &[u8]) -> Path {
    let mut edges = Vec::new();
    let mut v = end;
    for &p in picks {
        let ins = g.in_edges(v);
        if ins.is_empty() {
            break;
        }
        let e = ins[p as usize % ins.len()];
        edges.push(e);
        v = g.source(e);
    }
    if edges.is_empty() {
        return Path::trivial(end);
    }
    edges.reverse();
    Path::from_edges(g, edges).expect("backward walk composes")
}

type TermSpec = (usize, Vec<u8>, Vec<u8>, i8);

fn element(g: &Arc<Graph>, field: &Field, spec: &[TermSpec]) -> AlgebraElement {
    let vs: Vec<VertexId> = g.vertex_ids().collect();
    let mut out = AlgebraElement::zero(g, field);
    for (v, l, m, k) in spec {
        let end = vs[v % vs.len()];
        let lambda = walk_to(g, end, l);
        let mu = walk_to(g, end, m);
        let k = field.from_i64(*k as i64);
        if k.is_zero() {
            continue;
        }
        let term = AlgebraElement::monomial(g, field, lambda, mu, k).expect("ranges match");
        out = out.add(&term).expect("same graph");
    }
    out
}

fn term_spec() -> impl Strategy<Value = Vec<TermSpec>> {
    prop::collection::vec(
        (
            0..16usize,
            prop::collection::vec(any::<u8>(), 0..3),
            prop::collection::vec(any::<u8>(), 0..3),
            -9..=9i8,
        ),
        1..=3,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(a in term_spec(), b in term_spec(), c in term_spec()) {
        let g = corpus::reference();
        let field = Field::rational();
        let (a, b, c) = (element(&g, &field, &a), element(&g, &field, &b), element(&g, &field, &c));
        let lhs = a.mul(&b).unwrap().mul(&c).unwrap();
        let rhs = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().is_zero(), "({a})({b})({c})");
    }

    #[test]
    fn star_reverses_products(a in term_spec(), b in term_spec()) {
        let g = corpus::reference();
        let field = Field::rational();
        let (a, b) = (element(&g, &field, &a), element(&g, &field, &b));
        let lhs = a.mul(&b).unwrap().star();
        let rhs = b.star().mul(&a.star()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().is_zero());
        prop_assert!(a.star().star().sub(&a).unwrap().is_zero());
    }

    #[test]
    fn gauge_twist_is_multiplicative(a in term_spec(), b in term_spec(), num in 1..=9i64) {
        let g = corpus::reference();
        let field = Field::rational();
        let cycle = g.cycle_by_name("d1d2d3d4").expect("corpus cycle");
        let s = field.from_i64(num);
        let (a, b) = (element(&g, &field, &a), element(&g, &field, &b));
        let lhs = a.mul(&b).unwrap().gauge(&cycle, &s).unwrap();
        let rhs = a.gauge(&cycle, &s).unwrap().mul(&b.gauge(&cycle, &s).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().is_zero());
    }

    #[test]
    fn printed_elements_parse_back(a in term_spec()) {
        let g = corpus::reference();
        let field = Field::rational();
        let a = element(&g, &field, &a);
        let back = parse_element(&a.to_string(), &g, &field).expect("own output parses");
        prop_assert!(back.sub(&a).unwrap().is_zero(), "round trip of {a}");
    }
}

#[test]
fn special_edge_pairs_rewrite_to_vertex_expansions() {
    let g = corpus::reference();
    let field = Field::rational();
    let one = field.one();
    let d1 = Path::from_edge_names(&g, &["d1"]).expect("edge path");
    let only_out = AlgebraElement::monomial(&g, &field, d1.clone(), d1, one.clone())
        .expect("ranges match");
    let s1 = AlgebraElement::vertex(&g, &field, g.vertex_id("s1").expect("vertex"));
    assert!(
        only_out.sub(&s1).unwrap().is_zero(),
        "a lone out-edge pair should rewrite to its source vertex"
    );

    let d2 = Path::from_edge_names(&g, &["d2"]).expect("edge path");
    let b = Path::from_edge_names(&g, &["b"]).expect("edge path");
    let special = AlgebraElement::monomial(&g, &field, d2.clone(), d2, one.clone())
        .expect("ranges match");
    let s2 = AlgebraElement::vertex(&g, &field, g.vertex_id("s2").expect("vertex"));
    let bb = AlgebraElement::monomial(&g, &field, b.clone(), b, one).expect("ranges match");
    let expansion = s2.sub(&bb).unwrap();
    assert!(
        special.sub(&expansion).unwrap().is_zero(),
        "the special pair should rewrite to the complement expansion"
    );
}

#[test]
fn rebuilding_from_terms_is_stable() {
    let g = corpus::reference();
    let field = Field::rational();
    let a = element(
        &g,
        &field,
        &[(3, vec![0, 1], vec![1], 2), (7, vec![2], vec![0, 0], -5), (0, vec![], vec![], 1)],
    );
    let mut rebuilt = AlgebraElement::zero(&g, &field);
    for (m, k) in a.terms() {
        let term =
            AlgebraElement::monomial(&g, &field, m.lambda().clone(), m.mu().clone(), k.clone())
                .expect("stored term is well-formed");
        rebuilt = rebuilt.add(&term).expect("same graph");
    }
    assert!(rebuilt.sub(&a).unwrap().is_zero(), "stored terms are already canonical");
}
