//! Exact computation in Leavitt path algebras of row-finite graphs whose
//! cycles are pairwise disjoint: normal forms, cycle modules and their
//! towers, truncated series envelopes, and graph reductions, all over
//! exact scalar fields.

pub mod algebra;
pub mod chenmod;
pub mod corpus;
pub mod envelope;
pub mod graph;
pub mod reduce;
pub mod scalar;
pub mod verify;

pub use algebra::{AlgebraElement, AlgebraError, CornerData, Monomial};
pub use chenmod::{act, BasisVector, ModuleElement, ModuleError, ModuleSpace};
pub use envelope::{
    act_series, series_eq, EnvelopeError, SeriesElement, SeriesEq, SeriesGenerator,
};
pub use graph::{Cycle, EdgeId, Graph, GraphError, Path, VertexId};
pub use reduce::{
    collapse_cycle, collapse_transport, eliminate_source, normalize, source_transport,
    split_components, CollapseTransport, CycleCollapse, Normalization, ReduceError,
    ReduceStep, SourceElimination, SourceTransport, TaggedSeries, TransportTag,
};
pub use scalar::{BaseField, Field, Polynomial, Scalar, ScalarError};
pub use verify::{check_names, run_suite, CheckReport, Report, Sabotage, Status, SuiteConfig};
