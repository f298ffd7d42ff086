//! Semi-supervised network alignment by joint optimal transport and
//! embedding learning.
//!
//! Given two graphs and a handful of known node correspondences (anchors),
//! the toolkit learns a soft alignment matrix between the node sets by
//! alternating two stages under a single fused Gromov-Wasserstein objective:
//!
//! 1. an entropy-regularized optimal-transport solve (proximal point method
//!    with log-domain Sinkhorn inner loops) over transport costs built from
//!    node embeddings, and
//! 2. gradient training of a small shared encoder whose outputs define those
//!    costs, supervised by the transport plan itself through a signed
//!    sampling transform `S - lambda`.
//!
//! The crate is organized around the pipeline stages:
//!
//! - [`graph`]: graph data model, dataset loading, anchor splits, noise
//!   injection for robustness experiments;
//! - [`rwr`]: random-walk-with-restart positional features;
//! - [`ot`]: Sinkhorn, the Gromov-Wasserstein linearization, the unified
//!   objective and the proximal solver;
//! - [`encoder`]: the shared two-layer residual perceptron, learnable cost
//!   matrices and exact gradients;
//! - [`trainer`]: the alternating optimization loop, closed-form threshold
//!   updates and one-pass inference;
//! - [`metrics`]: Hits@K / MRR ranking evaluation;
//! - [`checkpoint`]: flat binary serialization of plans and encoder weights.

pub mod checkpoint;
pub mod encoder;
mod error;
pub mod graph;
pub mod metrics;
pub mod ot;
pub mod rwr;
pub mod seed;
pub mod sparse;
pub mod trainer;

pub use error::{Error, Result};
pub use graph::{AnchorRole, AnchorSet, Graph, WalkMatrix};
pub use ot::{CostSet, SamplingShift, TransportPlan};
