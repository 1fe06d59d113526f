//! Clustering with a high-order similarity extracted from a sparse
//! fourth-order tensor of pair-to-pair affinities, fused with the classical
//! Gaussian pairwise similarity.
//!
//! The pipeline for one dataset:
//!
//! 1. Euclidean distances and the Gaussian similarity `S` ([`pairwise`]).
//! 2. The distance-ratio tensor on symmetrized kNN pairs, unfolded to a
//!    sparse `m^2 x m^2` matrix ([`tensorsim`]).
//! 3. Top eigenvectors of its normalized affinity ([`spectral`]), folded back
//!    to `m x m` and averaged into `V` ([`highorder`]).
//! 4. `U = (S + V) / 2`, spectral embedding and k-means ([`cluster`]).
//!
//! [`metrics`] scores labelings against ground truth and [`synthgen`]
//! generates the synthetic benchmark data.

pub mod cluster;
pub mod dataset;
pub mod error;
pub mod highorder;
pub mod metrics;
pub mod pairwise;
pub mod sparse;
pub mod spectral;
pub mod synthgen;
pub mod tensorsim;

pub use cluster::{run_ips2, run_method, run_ppc, run_sc, ClusterConfig, ClusteringResult, EmbedMode, Method};
pub use dataset::Dataset;
pub use error::{Error, Result};
pub use metrics::MetricSet;
pub use pairwise::{DistanceMatrix, SimilarityMatrix};
pub use sparse::SparseSymMatrix;
