//! Similarity maps with exact scalars, the strict and Hochman distances, and
//! dimension bounds.

mod dims;
mod map;
pub mod perm;

pub use dims::{dim_upper_bounds, dist_hochman, similarity_dimension};
pub use map::{compose, compose_indices, compose_word, dist_strict, sup_norm, IFSInstance, SimilarityMap, StrictDistance};
pub use perm::SignedPermutation;

/// A word over the labels of an IFS.
pub type Word = Vec<String>;
