//! Structural polarization measurement over social-interaction event streams.
//!
//! The crate is organized along the measurement pipeline:
//!
//! * [`ingest`] parses events, matches topics and buckets events into time windows.
//! * [`graphs`] builds endorsement (retweet) graphs and bipartite user/news graphs.
//! * [`groups`] infers assortative partitions with penalized-likelihood model selection.
//! * [`polarization`] computes AEI, reduced mutual information and alignment matrices.
//! * [`newsflow`] scores news sharing: virality, centrality, outlet tables, sentiment splits.
//! * [`synth`] generates deterministic synthetic streams and brute-force oracles.

pub mod error;
pub mod graphs;
pub mod groups;
pub mod ingest;
pub mod newsflow;
pub mod polarization;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
