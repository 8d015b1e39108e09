//! Total graphs of a root graph, their adjacency spectra, and continuous-time
//! quantum-walk spatial search on vertices *and* edges.
//!
//! The walker lives on `V(G) ∪ E(G)`; its generator is the adjacency matrix of
//! the total graph `T(G)`. The crate provides
//!
//! * graph construction ([`graph`]): root families, line/total/Q/R/subdivision
//!   graphs, incidence matrices and an edge-list text format;
//! * spectra ([`spectral`]): a dense symmetric eigensolver used as the ground
//!   truth, plus closed-form spectra and eigenvectors of total graphs of
//!   regular roots;
//! * search analysis ([`search`]): projector weights, the `S1`/`S2` sums, the
//!   secular equation for the perturbed eigenvalues, overlaps, running times
//!   and exact unitary evolution;
//! * the complete-bipartite and complete-graph specializations ([`knn`]);
//! * sweeps, log-log fits and hypothesis checks backing the CLI
//!   ([`experiments`]).

pub mod error;
pub mod experiments;
pub mod format;
pub mod graph;
pub mod knn;
pub mod matrix;
pub mod par;
pub mod search;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{ElementLabel, Graph, IncidenceMatrix, TotalGraph};
pub use matrix::Matrix;
pub use par::Execution;
pub use search::{SearchReport, SearchSetup};
pub use spectral::{EigenSystem, Spectrum};
