//! Multi-scale characteristic function embeddings of attributed graphs.
//!
//! Node features are summarised by the characteristic function of their
//! distribution over random-walk neighbourhoods: for a source node `u`, a
//! feature vector `x` and an evaluation point `θ`, the embedding holds
//! `Σ_w P_r(u → w) · cos(θ x_w)` and the matching sine term, where `P_r` is
//! the `r`-step transition probability. The crate provides
//!
//! * [`graph`]: CSR graph storage, normalization and structural features,
//! * [`charfunc`]: the embedding itself plus dense verification oracles,
//! * [`pooling`]: permutation-invariant whole-graph descriptors,
//! * [`models`]: softmax and one-hidden-layer classifiers trained jointly
//!   with their evaluation points,
//! * [`io`]: text and binary file formats,
//! * [`bench`]: the runtime sweep harness.

pub mod bench;
pub mod charfunc;
pub mod error;
pub mod graph;
pub mod io;
pub mod models;
pub mod pooling;

pub use charfunc::{EmbeddingMatrix, EvaluationGrid, GridLayout};
pub use error::{FeatherError, Result};
pub use graph::{FeatureSet, Graph, RowStochasticMatrix};
pub use pooling::{PoolMode, PooledDescriptor};
