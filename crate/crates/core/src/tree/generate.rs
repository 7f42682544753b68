//! Seeded random tree generation.

use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{NodeId, Tree, TreeBuilder, TreeError, UltrametricTree};

/// Number of height levels used by the generators. Heights land on the grid
/// `depth * k / HEIGHT_GRID`, so for integer depths every edge weight has
/// denominator at most `HEIGHT_GRID`.
const HEIGHT_GRID: i64 = 8;

/// Generates a random d-equidistant binary tree on `n` leaves,
/// deterministically in `seed`.
///
/// Internal heights are multiples of `depth / 8`, which keeps weights on a
/// coarse exact grid and occasionally produces zero-weight internal edges.
pub fn random_ultrametric(
    n: usize,
    depth: &BigRational,
    seed: u64,
) -> Result<UltrametricTree, TreeError> {
    if n < 2 {
        return Err(TreeError::TooFewLeaves { min: 2, got: n });
    }
    if *depth <= BigRational::zero() {
        return Err(TreeError::NonPositiveWeight(
            crate::rational::format_rational(depth),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<u32> = (1..=n as u32).collect();
    labels.shuffle(&mut rng);

    let mut builder = TreeBuilder::new();
    let unit = depth / BigRational::from_integer(HEIGHT_GRID.into());
    let root = grow_equidistant(&mut builder, &mut rng, &labels, HEIGHT_GRID, &unit);
    let tree = builder.finish(root)?;
    Ok(UltrametricTree::validate(tree).expect("generated tree is d-equidistant"))
}

/// Builds the subtree over `labels` rooted at height `level * unit`.
fn grow_equidistant(
    builder: &mut TreeBuilder,
    rng: &mut ChaCha8Rng,
    labels: &[u32],
    level: i64,
    unit: &BigRational,
) -> NodeId {
    if labels.len() == 1 {
        return builder.add_leaf(labels[0]);
    }
    let split = rng.gen_range(1..labels.len());
    let height = unit * BigRational::from_integer(level.into());
    let mut children = Vec::with_capacity(2);
    for part in [&labels[..split], &labels[split..]] {
        let child_level = if part.len() == 1 {
            0
        } else {
            rng.gen_range(1..=level)
        };
        let child = grow_equidistant(builder, rng, part, child_level, unit);
        let child_height = unit * BigRational::from_integer(child_level.into());
        children.push((child, &height - child_height));
    }
    builder
        .add_internal(children)
        .expect("two children per node")
}

/// Generates a random binary phylogenetic tree on `n` leaves with strictly
/// positive edge weights (quarter-integer grid), deterministically in `seed`.
pub fn random_phylogenetic(n: usize, seed: u64) -> Result<Tree, TreeError> {
    if n < 2 {
        return Err(TreeError::TooFewLeaves { min: 2, got: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<u32> = (1..=n as u32).collect();
    labels.shuffle(&mut rng);
    let mut builder = TreeBuilder::new();
    let root = grow_phylogenetic(&mut builder, &mut rng, &labels);
    builder.finish(root)
}

fn grow_phylogenetic(builder: &mut TreeBuilder, rng: &mut ChaCha8Rng, labels: &[u32]) -> NodeId {
    if labels.len() == 1 {
        return builder.add_leaf(labels[0]);
    }
    let split = rng.gen_range(1..labels.len());
    let mut children = Vec::with_capacity(2);
    for part in [&labels[..split], &labels[split..]] {
        let child = grow_phylogenetic(builder, rng, part);
        let weight = BigRational::new(rng.gen_range(1i64..=16).into(), 4.into());
        children.push((child, weight));
    }
    builder
        .add_internal(children)
        .expect("two children per node")
}
