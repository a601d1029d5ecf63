//! Fixed classifiers built from regular polytope vertex sets, plus the small
//! training and experiment machinery needed to study them.
//!
//! The crate is organized around the lifecycle of a fixed-classifier
//! experiment:
//!
//! * [`geometry`] constructs polytope vertex sets as unit-norm weight
//!   matrices and checks their angular structure (adjacency, bisectors,
//!   duality of decision boundaries).
//! * [`classifier`] wraps a weight matrix into a classification head with a
//!   real/virtual class split, softmax cross-entropy loss and prediction.
//! * [`network`] is a from-scratch feed-forward network (manual
//!   backpropagation, SGD) terminating in either a fixed head or a
//!   weight-normalized trainable baseline.
//! * [`data`] loads IDX image files and generates synthetic datasets.
//! * [`experiments`] scripts the end-to-end runs: stationarity tracking,
//!   label-permutation sweeps, virtual-class margins and the Hadamard
//!   comparison.
//! * [`svg`] renders deterministic SVG charts from run directories.

pub mod classifier;
pub mod data;
pub mod experiments;
pub mod geometry;
pub mod metrics;
pub mod network;
pub mod rng;
pub mod svg;
