//! Constructs and verifies 1-factorizations (proper d-edge-colorings) of
//! d-regular graphs.
//!
//! The pipeline splits a regular graph into a few balanced bipartite
//! pieces, extracts a large regular factor from each, and absorbs the
//! remaining edges into perfect matchings until every piece is a regular
//! bipartite graph, which is then 1-factorized by repeated perfect
//! matchings. Supporting modules provide max-flow, bipartite matching,
//! Vizing edge coloring, 2-factorizations, spectral estimates and test
//! instance generators.

pub mod cli;
pub mod coloring;
pub mod completion;
pub mod flow;
pub mod generators;
pub mod graph;
pub mod matching;
pub mod partition;
pub mod pipeline;
pub mod seed;
pub mod spectral;

pub use graph::{EdgeId, Graph, Matching, OneFactorization, Vertex};
