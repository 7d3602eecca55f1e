//! The bundled graph fixtures, parsed on demand and shared as handles.

use crate::graph::Graph;
use std::sync::Arc;

macro_rules! fixture {
    ($name:ident, $file:literal, $doc:literal) => {
        #[doc = $doc]
        pub fn $name() -> Arc<Graph> {
            let text = include_str!(concat!("../../../graphs/", $file));
            Arc::new(Graph::parse(text).expect("bundled fixture parses"))
        }
    };
}

fixture!(
    reference,
    "reference.graph",
    "The flagship graph: a 4-cycle feeding a 3-cycle, a loop, and a sink, \
     with a single source on top."
);
fixture!(
    reference_h,
    "reference_h.graph",
    "The restriction of the flagship graph to the hereditary saturated set \
     below the 4-cycle."
);
fixture!(
    source_loop,
    "source_loop.graph",
    "A source loop with two exits into the lower part of the flagship graph."
);
fixture!(
    pre_collapse,
    "pre_collapse.graph",
    "The flagship graph with its source eliminated, leaving a collapsible \
     source cycle."
);
fixture!(
    collapsed,
    "collapsed.graph",
    "The frozen result of collapsing the 4-cycle of `pre_collapse`."
);
fixture!(toeplitz, "toeplitz.graph", "A loop with one exit to a sink.");
fixture!(single_vertex, "single_vertex.graph", "One vertex, no edges.");
fixture!(single_loop, "single_loop.graph", "One vertex with a loop.");
fixture!(
    two_loop_rose,
    "two_loop_rose.graph",
    "Two loops at one vertex: the smallest graph without disjoint cycles."
);
fixture!(chain, "chain.graph", "An acyclic three-vertex chain.");

/// Every fixture with its name, in a fixed order.
pub fn all() -> Vec<(&'static str, Arc<Graph>)> {
    vec![
        ("reference", reference()),
        ("reference_h", reference_h()),
        ("source_loop", source_loop()),
        ("pre_collapse", pre_collapse()),
        ("collapsed", collapsed()),
        ("toeplitz", toeplitz()),
        ("single_vertex", single_vertex()),
        ("single_loop", single_loop()),
        ("two_loop_rose", two_loop_rose()),
        ("chain", chain()),
    ]
}
