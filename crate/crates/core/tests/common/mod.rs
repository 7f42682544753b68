//! Independent oracles and random generators shared by the integration
//! suites. Everything here deliberately recomputes results by a different
//! route than the library code it checks.
#![allow(dead_code)] // each test target compiles its own view of this module

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

use treeval::puiseux::{ColumnReduction, PuiseuxMatrix, PuiseuxPoly};
use treeval::tree::Tree;

/// Steiner weight as the total weight of the union of all pairwise leaf
/// paths inside `sigma` (the library uses the edge-cut characterization).
pub fn union_of_paths_weight(tree: &Tree, sigma: &[u32]) -> BigRational {
    let mut in_union = vec![false; tree.node_count()];
    for (i, &a) in sigma.iter().enumerate() {
        for &b in &sigma[i + 1..] {
            let u = tree.leaf_node(a).unwrap();
            let w = tree.leaf_node(b).unwrap();
            let lca = tree.lca(u, w);
            for mut cur in [u, w] {
                while cur != lca {
                    in_union[cur] = true;
                    cur = tree.parent(cur).unwrap();
                }
            }
        }
    }
    (0..tree.node_count())
        .filter(|&id| in_union[id])
        .map(|id| tree.edge_weight(id).unwrap().clone())
        .fold(BigRational::zero(), |acc, w| acc + w)
}

/// Determinant as the signed sum over all permutations, independent of the
/// memoized Laplace expansion.
pub fn permutation_sum_determinant(m: &PuiseuxMatrix) -> PuiseuxPoly {
    let n = m.n_rows();
    assert_eq!(n, m.n_cols());
    let mut det = PuiseuxPoly::zero();
    for perm in (0..n).permutations(n) {
        let mut product = PuiseuxPoly::one();
        for (row, &col) in perm.iter().enumerate() {
            product = &product * m.entry(row, col);
        }
        let inversions = perm
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| perm[i + 1..].iter().map(move |&b| (a, b)))
            .filter(|(a, b)| a > b)
            .count();
        det = if inversions % 2 == 0 {
            &det + &product
        } else {
            &det - &product
        };
    }
    det
}

/// Random sparse polynomial with small rational exponents; sometimes zero.
pub fn random_poly(rng: &mut impl Rng) -> PuiseuxPoly {
    let n_terms = rng.gen_range(0..4);
    PuiseuxPoly::from_terms((0..n_terms).map(|_| {
        (
            BigRational::new(
                BigInt::from(rng.gen_range(-6i64..=6)),
                BigInt::from(rng.gen_range(1i64..=3)),
            ),
            BigInt::from(rng.gen_range(-9i64..=9)),
        )
    }))
}

pub fn random_matrix(rng: &mut impl Rng, n: usize) -> PuiseuxMatrix {
    PuiseuxMatrix::from_rows(
        (0..n)
            .map(|_| (0..n).map(|_| random_poly(rng)).collect())
            .collect(),
    )
}

/// Random sequence satisfying the validity conditions: distinct targets, and
/// each source outside the targets seen so far.
pub fn random_valid_reduction(rng: &mut impl Rng, n_cols: usize) -> ColumnReduction {
    let length = rng.gen_range(0..n_cols);
    let mut columns: Vec<usize> = (1..=n_cols).collect();
    for i in (1..columns.len()).rev() {
        columns.swap(i, rng.gen_range(0..=i));
    }
    let targets = &columns[..length];
    let mut steps = Vec::with_capacity(length);
    for (k, &a) in targets.iter().enumerate() {
        let allowed: Vec<usize> = (1..=n_cols)
            .filter(|c| !targets[..=k].contains(c))
            .collect();
        let b = allowed[rng.gen_range(0..allowed.len())];
        steps.push((a, b));
    }
    let reduction = ColumnReduction::new(steps);
    assert!(reduction.validate(n_cols).is_ok());
    reduction
}
