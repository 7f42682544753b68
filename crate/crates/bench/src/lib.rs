//! Shared setup for the benchmark targets.

use treeval::puiseux::PuiseuxMatrix;
use treeval::tree::{parse_newick, UltrametricTree};
use treeval::verifier::{build_matrix, sample_coefficients};

/// The ten-leaf, 9-equidistant workhorse fixture.
pub fn ten_leaf_tree() -> UltrametricTree {
    UltrametricTree::validate(parse_newick(treeval::fixtures::EQUIDISTANT_10).unwrap()).unwrap()
}

/// Its verification matrix under a fixed coefficient seed.
pub fn ten_leaf_matrix(seed: u64) -> PuiseuxMatrix {
    let tree = ten_leaf_tree();
    build_matrix(&tree, &sample_coefficients(&tree, seed)).unwrap()
}
