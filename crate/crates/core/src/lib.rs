//! Conjunctive queries in which every relation name occurs at most twice (2CQs):
//! parsing, evaluation, homomorphism-based containment, cores, the four restriction
//! operators, maximal containment, the maximal-containment graph, and the semantic
//! distance defined as shortest-path length in that graph. Oriented path queries get
//! their own module with checkers for their equivalences and the unbounded chain
//! between two consecutive path queries.

pub mod canon;
pub mod error;
pub mod eval;
pub mod falsify;
pub mod hom;
pub mod instance;
pub mod metric;
pub mod opq;
pub mod query;
pub mod restrict;
pub mod schema;
mod solver;
pub mod syntax;

pub use canon::{canonical_form, canonicalize};
pub use error::{Error, Result};
pub use eval::{evaluate, freeze, Tuple};
pub use falsify::{find_counterexample, random_instance, Counterexample};
pub use hom::{contains, core, equivalent, find_homomorphism, is_minimal, VarMapping};
pub use instance::{Constant, Fact, FrozenQuery, Instance};
pub use metric::{
    bottom_query, build_mc_graph, build_mc_graph_with, distance, distance_path, load_graph,
    save_graph, to_dot, top_queries, BuildOptions, McGraph,
};
pub use opq::{
    check_chain, opq_query, pumped_query, reverse_opq, verify_opq_table, Bits, ChainReport,
    TableReport,
};
pub use query::{
    query_size, validate, validate_rule, Atom, ConjunctiveQuery, ValidationReport, Variable,
    Violation,
};
pub use restrict::{
    generate_restrictions, is_maximally_contained, reduced_restrictions, RestrictionKind,
    RestrictionResult, RestrictionType,
};
pub use schema::Schema;
pub use syntax::{
    parse_instance, parse_queries, parse_query, parse_query_with_schema, parse_schema,
};
