//! Reduction-pipeline properties: the normal form's structural
//! postcondition, the collapse embedding, and order-independence of
//! source elimination.

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;

use lpa_core::algebra::AlgebraElement;
use lpa_core::corpus;
use lpa_core::graph::{Cycle, Graph, Path, VertexId};
use lpa_core::reduce::{collapse_cycle, eliminate_source, normalize};
use lpa_core::scalar::Field;

fn cycle_vertices(g: &Graph, c: &Cycle) -> BTreeSet<VertexId> {
    match c {
        Cycle::Sink(v) => [*v].into_iter().collect(),
        Cycle::Proper(p) => {
            let mut vs: BTreeSet<VertexId> = p.edges().iter().map(|&e| g.source(e)).collect();
            vs.insert(p.range(g));
            vs
        }
    }
}

#[test]
fn normalization_reaches_the_reduced_shape() {
    for (name, g) in corpus::all() {
        if !g.has_disjoint_cycles() {
            continue;
        }
        let norm = normalize(&g).expect("normalization terminates");
        assert!(!norm.graphs.is_empty(), "graph {name}: nothing survived");
        for out in &norm.graphs {
            if out.vertex_count() == 1 && out.edge_count() == 0 {
                continue;
            }
            assert!(
                out.sources().is_empty(),
                "graph {name}: a source survived normalization"
            );
            for cycle in out.cycles() {
                let on_cycle = cycle_vertices(out, &cycle);
                let entered = out.edge_ids().any(|e| {
                    !on_cycle.contains(&out.source(e)) && on_cycle.contains(&out.range(e))
                });
                if !entered {
                    assert!(
                        cycle.len() <= 1,
                        "graph {name}: source cycle {} is not a loop",
                        cycle.display(out)
                    );
                }
            }
        }
    }
}

#[test]
fn collapse_preserves_the_remaining_cycle_census() {
    let g = corpus::pre_collapse();
    let d = g.cycle_by_name("d1d2d3d4").expect("corpus cycle");
    let cc = collapse_cycle(&g, &d).expect("collapsible");
    let f = cc.collapsed();
    assert_eq!(
        f.vertex_count(),
        g.vertex_count() - d.len() + 1,
        "the cycle contracts to one vertex"
    );
    let mut before: Vec<String> = g
        .cycles()
        .iter()
        .filter(|c| c.display(&g) != "d1d2d3d4")
        .map(|c| c.display(&g))
        .collect();
    let mut after: Vec<String> = f
        .cycles()
        .iter()
        .filter(|c| c.display(f) != "dprime")
        .map(|c| c.display(f))
        .collect();
    before.sort();
    after.sort();
    assert_eq!(before, after, "every other cycle survives the collapse by name");
}

#[test]
fn collapse_embedding_is_unital() {
    let g = corpus::pre_collapse();
    let d = g.cycle_by_name("d1d2d3d4").expect("corpus cycle");
    let cc = collapse_cycle(&g, &d).expect("collapsible");
    let field = Field::rational();
    let one = AlgebraElement::one(&cc.collapsed().clone(), &field);
    let image = cc.theta(&one).expect("embeds");
    let omega = cc.omega(&field);
    assert!(image.sub(&omega).unwrap().is_zero(), "the identity lands on the corner unit");
}

#[test]
fn source_elimination_is_confluent() {
    let text = "\
v a
v b
v c
v d
e ea a c
e eb b c
e cd c d
e dc d c
";
    let g = Arc::new(Graph::parse(text).expect("test graph parses"));
    let eliminate = |g: &Arc<Graph>, name: &str| -> Arc<Graph> {
        let v = g.vertex_id(name).expect("vertex exists");
        eliminate_source(g, v).expect("eliminates").reduced().clone()
    };
    let ab = eliminate(&eliminate(&g, "a"), "b");
    let ba = eliminate(&eliminate(&g, "b"), "a");
    assert_eq!(*ab, *ba, "the elimination fixpoint does not depend on the order");
}

fn monomial_spec() -> impl Strategy<Value = (usize, Vec<u8>, Vec<u8>, i8)> {
    (
        0..16usize,
        prop::collection::vec(any::<u8>(), 0..4),
        prop::collection::vec(any::<u8>(), 0..4),
        (-9..=9i8).prop_filter("nonzero", |k| *k != 0),
    )
}

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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn collapse_embedding_is_multiplicative(a in monomial_spec(), b in monomial_spec()) {
        let g = corpus::pre_collapse();
        let d = g.cycle_by_name("d1d2d3d4").expect("corpus cycle");
        let cc = collapse_cycle(&g, &d).expect("collapsible");
        let f = cc.collapsed().clone();
        let field = Field::rational();
        let vs: Vec<VertexId> = f.vertex_ids().collect();
        let build = |(v, l, m, k): &(usize, Vec<u8>, Vec<u8>, i8)| {
            let end = vs[v % vs.len()];
            let lambda = walk_to(&f, end, l);
            let mu = walk_to(&f, end, m);
            AlgebraElement::monomial(&f, &field, lambda, mu, field.from_i64(*k as i64))
                .expect("ranges match")
        };
        let (a, b) = (build(&a), build(&b));
        let lhs = cc.theta(&a.mul(&b).unwrap()).expect("embeds");
        let rhs = cc.theta(&a).expect("embeds").mul(&cc.theta(&b).expect("embeds")).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().is_zero(), "a = {}, b = {}", a, b);
    }
}
