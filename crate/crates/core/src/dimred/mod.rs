//! The two reducers (NMF and PCA) and the block combiner that joins their
//! codes into one representation.

mod combine;
pub mod matio;
mod nmf;
mod pca;

pub use combine::{combine, combine_rows, normalize_block};
pub use nmf::{nmf_fit, NmfModel, EPSILON};
pub use pca::{pca_fit, PcaModel};
