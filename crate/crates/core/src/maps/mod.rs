//! Dart-level map and tree primitives.

mod graph;
mod perm;
mod rotation;
mod tree;

pub use graph::RootedGraph;
pub use perm::Permutation;
pub use rotation::{alpha, RotationMap};
pub use tree::{enumerate_plane_trees, sample_plane_tree, PlaneTree};

use num_bigint::BigUint;
use num_traits::One;

/// The `n`th Catalan number `(2n)! / (n! (n+1)!)`, the number of plane trees with `n` edges.
pub fn catalan(n: usize) -> BigUint {
    // C(k+1) = C(k) * 2(2k+1) / (k+2), exact at every step
    let mut c = BigUint::one();
    for k in 0..n {
        c = c * BigUint::from(2 * (2 * k + 1)) / BigUint::from(k + 2);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(0), BigUint::from(1u32));
        assert_eq!(catalan(3), BigUint::from(5u32));
        assert_eq!(catalan(4), BigUint::from(14u32));
        assert_eq!(catalan(10), BigUint::from(16796u32));
    }
}
