//! k-interval cospeciation (k-IC) between unrooted binary trees, together
//! with the tree-space machinery needed to check its combinatorics by brute
//! force: Newick I/O, exhaustive enumeration, uniform sampling, NNI moves,
//! Robinson-Foulds and path-difference comparisons, and exact counts of the
//! maximal interval neighborhood.

pub mod error;
pub mod families;
pub mod metrics;
pub mod neighborhood;
pub mod tree;
pub mod verify;

pub use error::{Error, ErrorKind, Result};
pub use tree::{
    count_trees, enumerate_trees, parse_newick, random_tree, write_newick, CanonicalForm,
    PathLengthMatrix, Split, Tree,
};
