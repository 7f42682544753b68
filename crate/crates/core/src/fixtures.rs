//! Canonical example trees shared by tests, docs and benchmarks.

/// Balanced 2-equidistant tree on four leaves, total weight 6.
pub const BALANCED_4: &str = "((1:1,2:1):1,(3:1,4:1):1);";

/// A 9-equidistant tree on ten leaves with total weight 35.
///
/// Its internal node heights are (1,1,1,1,2,3,4,4,9); the tree is the
/// standard worked example across the test suite because its reduced matrix
/// exercises every valuation pattern the verifier checks.
pub const EQUIDISTANT_10: &str =
    "(((1:1,2:1):3,(3:2,(4:1,5:1):1):2):5,(((6:1,7:1):2,(8:1,9:1):2):1,10:4):5);";
