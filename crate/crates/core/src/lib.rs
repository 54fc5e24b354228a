//! Growing binary trees: exact enumeration by internal nodes, anchors and
//! height, the meta-Fibonacci sequences bounding their support, leaf-profile
//! counting, and uniform sampling of binary trees with a given profile.
//!
//! The counting code is generic over the coefficient ring; the aliases below
//! fix it to arbitrary-precision integers.

pub mod bits;
pub mod enumeration;
pub mod error;
pub mod oracle;
pub mod profiles;
pub mod sampler;
pub mod scalar;
pub mod sequences;
pub mod series;
pub mod tree;

use num_bigint::BigUint;

pub use bits::{draw_below, draw_below_u64, BitSource};
pub use error::{Error, Result};
pub use profiles::{count_trees, internal_profile, kraft_sum, truncate_profile, InternalProfile, Profile};
pub use sampler::{uniform_tree, uniform_tree_traced, MergePattern, SampleRecord, SampleTrace};
pub use scalar::Coeff;
pub use sequences::{CellSet, Sequence};
pub use tree::{BinNode, BinaryTree, GrowNode, GrowingTree, GrowthChoice, NodeKind, TreeStats};

/// `t_{n,2k}` with exact integer entries.
pub type CountTable = enumeration::CountTable<BigUint>;
/// `t_{n,2k,h}` for one height, exact.
pub type HeightTable = enumeration::HeightTable<BigUint>;
/// Truncated power series with exact integer coefficients.
pub type Series = series::PolySeries<BigUint>;

pub fn t_table(n_max: usize) -> CountTable {
    enumeration::t_table(n_max)
}

pub fn t_height_table(h: u32) -> HeightTable {
    enumeration::t_height_table(h)
}
