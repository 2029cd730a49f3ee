//! Image classification by feature dimension reduction and graph-based
//! ranking.
//!
//! The pipeline has four stages:
//!
//! 1. [`imaging`]: decode a directory-per-class corpus and turn every image
//!    into a 167-dimensional nonnegative descriptor (HSV colour histogram,
//!    uniform LBP texture histogram, Sobel edge-orientation histogram).
//! 2. [`dimred`]: reduce the descriptor with NMF and PCA and combine the
//!    two codes into one representation.
//! 3. [`graphrank`]: build a Gaussian kNN affinity graph and score nodes by
//!    manifold ranking, `f = (I - αS)^-1 y`.
//! 4. [`classify`]: 1-NN classification, either by ranking score or by plain
//!    Euclidean distance.
//!
//! [`eval`] wraps the stages in stratified k-fold cross-validation over the
//! five-method comparison (NMF, PCA, NMF+PCA, Graph ranking,
//! NMF+PCA+Graph ranking), and [`cli`] provides the `synth`, `extract` and
//! `eval` commands used by the `imgrank` binary.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory, one per
//! stage.

pub mod classify;
pub mod cli;
pub mod dimred;
pub mod error;
pub mod eval;
pub mod fmt;
pub mod graphrank;
pub mod imaging;

pub use error::{Error, Result};
