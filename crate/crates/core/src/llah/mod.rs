//! Locally likely arrangement hashing: affine-invariant descriptors of
//! feature-point neighbourhoods, a hash index over electronic pages, and
//! retrieval of the page a capture shows by descriptor voting.

mod descriptor;
mod features;
mod invariant;
mod params;
mod retrieve;
mod store;

pub use descriptor::{
    binomial, discretize, fit_bin_edges, hash_index, point_descriptors, raw_invariants,
    Descriptor, DescriptorMode, DescriptorVec,
};
pub use features::extract_feature_points;
pub use invariant::{affine_invariant, triangle_area};
pub use params::{LlahParams, DEFAULT_BIN_EDGES, DEFAULT_HASH_SIZE};
pub use retrieve::{retrieve, retrieve_points, RetrievalResult};
pub use store::{HashEntry, LlahStore, StoreBuilder, StoreStats, STORE_MAGIC, STORE_VERSION};

/// Document identifier within a store.
pub type DocId = u32;
