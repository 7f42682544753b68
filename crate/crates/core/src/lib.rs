//! Exact computations on phylogenetic trees: m-dissimilarity vectors,
//! valuations of determinants of tree-derived Puiseux matrices, and min-plus
//! Plucker prevariety checks.

pub mod assignment;
pub mod dissimilarity;
pub mod fixtures;
pub mod puiseux;
pub mod rational;
pub mod subsets;
pub mod tree;
pub mod tropical;
pub mod verifier;

pub use dissimilarity::{DissimilarityVector, DistanceMatrix};
pub use puiseux::{ColumnReduction, PuiseuxMatrix, PuiseuxPoly};
pub use rational::ExtRational;
pub use tree::{NewickError, Tree, TreeError, UltrametricError, UltrametricTree};
pub use tropical::{Sign, TropicalPoint};
pub use verifier::{LeafAssignment, VerificationReport};
