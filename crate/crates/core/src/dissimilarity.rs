//! m-dissimilarity vectors, Steiner subtree weights, and exact ultrametric
//! spaces: the strong-triangle check and realization by an equidistant tree.

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{format_rational, parse_rational};
use crate::subsets;
use crate::tree::{NodeId, Tree, TreeBuilder, UltrametricTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DissimilarityError {
    #[error("subset must contain at least 2 leaves, got {0}")]
    SubsetTooSmall(usize),
    #[error("unknown leaf label {0}")]
    UnknownLabel(u32),
    #[error("label {0} listed twice in the subset")]
    RepeatedLabel(u32),
    #[error("subset size m={m} out of range 2..={n}")]
    SubsetSizeOutOfRange { m: usize, n: usize },
    #[error("matrix is not symmetric at ({row},{col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("diagonal entry ({0},{0}) is not zero")]
    NonZeroDiagonal(usize),
    #[error("negative distance at ({row},{col})")]
    NegativeDistance { row: usize, col: usize },
    #[error("matrix rows do not match n={n}")]
    ShapeMismatch { n: usize },
    #[error("not an ultrametric: d({x},{z}) > max(d({x},{y}), d({y},{z}))")]
    NotUltrametric { x: u32, y: u32, z: u32 },
    #[error("distance between {a} and {b} is zero; realization needs positive distances")]
    ZeroDistance { a: u32, b: u32 },
    #[error("need at least 2 points to realize a tree, got {0}")]
    TooFewPoints(usize),
    #[error("invalid distance entry: {0}")]
    BadEntry(#[from] crate::rational::ParseRationalError),
    #[error("invalid matrix JSON: {0}")]
    BadJson(String),
}

/// Total weight of the smallest subtree containing the leaves in `sigma`.
///
/// Uses the edge-cut characterization: an edge belongs to the Steiner tree
/// of `sigma` exactly when both sides of the cut contain a leaf of `sigma`.
pub fn steiner_weight(tree: &Tree, sigma: &[u32]) -> Result<BigRational, DissimilarityError> {
    let marks = leaf_marks(tree, sigma)?;
    Ok(steiner_weight_marked(tree, &marks, sigma.len()))
}

fn leaf_marks(tree: &Tree, sigma: &[u32]) -> Result<Vec<bool>, DissimilarityError> {
    if sigma.len() < 2 {
        return Err(DissimilarityError::SubsetTooSmall(sigma.len()));
    }
    let mut marks = vec![false; tree.node_count()];
    for &label in sigma {
        let node = tree
            .leaf_node(label)
            .ok_or(DissimilarityError::UnknownLabel(label))?;
        if marks[node] {
            return Err(DissimilarityError::RepeatedLabel(label));
        }
        marks[node] = true;
    }
    Ok(marks)
}

fn steiner_weight_marked(tree: &Tree, marks: &[bool], subset_size: usize) -> BigRational {
    let mut below = vec![0usize; tree.node_count()];
    let mut total = BigRational::zero();
    for id in tree.postorder() {
        below[id] = if tree.is_leaf(id) {
            usize::from(marks[id])
        } else {
            tree.children(id).iter().map(|&c| below[c]).sum()
        };
        if id != tree.root() && below[id] > 0 && below[id] < subset_size {
            total += tree.edge_weight(id).expect("non-root edge");
        }
    }
    total
}

/// The m-dissimilarity vector of a tree: one exact entry per m-subset of
/// leaf labels, in lexicographic subset order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DissimilarityVector {
    n: usize,
    m: usize,
    values: Vec<BigRational>,
}

impl DissimilarityVector {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Entry values in lexicographic subset order.
    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// `(subset, value)` pairs in lexicographic subset order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<u32>, &BigRational)> {
        subsets::enumerate(self.n, self.m)
            .into_iter()
            .zip(self.values.iter())
    }

    pub fn value_at(&self, sigma: &[u32]) -> Option<&BigRational> {
        if sigma.len() != self.m || sigma.windows(2).any(|w| w[0] >= w[1]) {
            return None;
        }
        self.values.get(subsets::lex_rank(sigma, self.n))
    }
}

/// Computes the m-dissimilarity vector via per-subset Steiner weights.
pub fn dissimilarity_vector(
    tree: &Tree,
    m: usize,
) -> Result<DissimilarityVector, DissimilarityError> {
    let n = tree.n_leaves();
    if m < 2 || m > n {
        return Err(DissimilarityError::SubsetSizeOutOfRange { m, n });
    }
    let mut values = Vec::with_capacity(subsets::binomial(n, m));
    for sigma in subsets::enumerate(n, m) {
        let marks = leaf_marks(tree, &sigma)?;
        values.push(steiner_weight_marked(tree, &marks, m));
    }
    Ok(DissimilarityVector { n, m, values })
}

/// A symmetric matrix of exact distances with zero diagonal, indexed by
/// 1-based point labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<BigRational>,
}

#[derive(Serialize, Deserialize)]
struct DistanceMatrixJson {
    n: usize,
    d: Vec<Vec<String>>,
}

impl DistanceMatrix {
    pub fn new(rows: Vec<Vec<BigRational>>) -> Result<Self, DissimilarityError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(DissimilarityError::ShapeMismatch { n });
        }
        for (i, row) in rows.iter().enumerate() {
            if !row[i].is_zero() {
                return Err(DissimilarityError::NonZeroDiagonal(i + 1));
            }
            for (j, value) in row.iter().enumerate() {
                if *value < BigRational::zero() {
                    return Err(DissimilarityError::NegativeDistance {
                        row: i + 1,
                        col: j + 1,
                    });
                }
                if rows[j][i] != *value {
                    return Err(DissimilarityError::NotSymmetric {
                        row: i + 1,
                        col: j + 1,
                    });
                }
            }
        }
        Ok(DistanceMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Distance between 1-based labels.
    pub fn distance(&self, a: u32, b: u32) -> &BigRational {
        &self.data[(a as usize - 1) * self.n + (b as usize - 1)]
    }

    /// First triple violating the strong triangle inequality
    /// `d(x,z) <= max(d(x,y), d(y,z))`, if any.
    pub fn ultrametric_violation(&self) -> Option<[u32; 3]> {
        let n = self.n as u32;
        for x in 1..=n {
            for y in 1..=n {
                for z in 1..=n {
                    let xz = self.distance(x, z);
                    if xz > self.distance(x, y).max(self.distance(y, z)) {
                        return Some([x, y, z]);
                    }
                }
            }
        }
        None
    }

    pub fn is_ultrametric(&self) -> bool {
        self.ultrametric_violation().is_none()
    }

    pub fn from_json_str(text: &str) -> Result<Self, DissimilarityError> {
        let raw: DistanceMatrixJson =
            serde_json::from_str(text).map_err(|e| DissimilarityError::BadJson(e.to_string()))?;
        if raw.d.len() != raw.n {
            return Err(DissimilarityError::ShapeMismatch { n: raw.n });
        }
        let rows = raw
            .d
            .iter()
            .map(|row| row.iter().map(|s| Ok(parse_rational(s)?)).collect())
            .collect::<Result<Vec<Vec<BigRational>>, DissimilarityError>>()?;
        DistanceMatrix::new(rows)
    }

    pub fn to_json_string(&self) -> String {
        let d = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| format_rational(&self.data[i * self.n + j]))
                    .collect()
            })
            .collect();
        serde_json::to_string(&DistanceMatrixJson { n: self.n, d }).expect("serializable")
    }
}

/// Pairwise leaf path weights of a tree.
pub fn pairwise_distances(tree: &Tree) -> DistanceMatrix {
    let n = tree.n_leaves();
    let depths = tree.depths();
    let mut rows = vec![vec![BigRational::zero(); n]; n];
    for a in 1..=n as u32 {
        for b in a + 1..=n as u32 {
            let u = tree.leaf_node(a).expect("valid label");
            let w = tree.leaf_node(b).expect("valid label");
            let lca = tree.lca(u, w);
            let two = BigRational::from_integer(2.into());
            let dist = &depths[u] + &depths[w] - two * &depths[lca];
            rows[a as usize - 1][b as usize - 1] = dist.clone();
            rows[b as usize - 1][a as usize - 1] = dist;
        }
    }
    DistanceMatrix::new(rows).expect("path weights form a metric matrix")
}

/// Builds a d-equidistant binary tree whose leaf distances equal `dm`
/// exactly, by closest-pair agglomeration. Merge nodes sit at half the merge
/// distance; a merge against an equal-height cluster produces a zero-weight
/// edge, which keeps the tree binary.
pub fn realize_ultrametric(dm: &DistanceMatrix) -> Result<UltrametricTree, DissimilarityError> {
    if dm.n() < 2 {
        return Err(DissimilarityError::TooFewPoints(dm.n()));
    }
    if let Some([x, y, z]) = dm.ultrametric_violation() {
        return Err(DissimilarityError::NotUltrametric { x, y, z });
    }
    for a in 1..=dm.n() as u32 {
        for b in a + 1..=dm.n() as u32 {
            if dm.distance(a, b).is_zero() {
                return Err(DissimilarityError::ZeroDistance { a, b });
            }
        }
    }

    struct Cluster {
        root: NodeId,
        height: BigRational,
        min_label: u32,
    }

    let mut builder = TreeBuilder::new();
    let mut clusters: Vec<Cluster> = (1..=dm.n() as u32)
        .map(|label| Cluster {
            root: builder.add_leaf(label),
            height: BigRational::zero(),
            min_label: label,
        })
        .collect();
    // distances between live clusters, by representative (consistent for
    // ultrametric input, asserted at every merge below)
    let mut dist: Vec<Vec<BigRational>> = (1..=dm.n() as u32)
        .map(|a| (1..=dm.n() as u32).map(|b| dm.distance(a, b).clone()).collect())
        .collect();

    while clusters.len() > 1 {
        let label_pair = |clusters: &[Cluster], i: usize, j: usize| {
            let (a, b) = (clusters[i].min_label, clusters[j].min_label);
            (a.min(b), a.max(b))
        };
        let mut best: Option<(usize, usize)> = None;
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let better = match best {
                    None => true,
                    Some((bi, bj)) => {
                        let key = (&dist[i][j], label_pair(&clusters, i, j));
                        let best_key = (&dist[bi][bj], label_pair(&clusters, bi, bj));
                        key < best_key
                    }
                };
                if better {
                    best = Some((i, j));
                }
            }
        }
        let (i, j) = best.expect("at least two clusters");
        let merge_height = &dist[i][j] / BigRational::from_integer(2.into());
        let weight_i = &merge_height - &clusters[i].height;
        let weight_j = &merge_height - &clusters[j].height;
        assert!(
            weight_i >= BigRational::zero() && weight_j >= BigRational::zero(),
            "merge heights are nondecreasing for ultrametric input"
        );
        let root = builder
            .add_internal(vec![(clusters[i].root, weight_i), (clusters[j].root, weight_j)])
            .expect("binary merge");

        for k in 0..clusters.len() {
            if k != i && k != j {
                assert_eq!(
                    dist[i][k], dist[j][k],
                    "cross distances agree for ultrametric input"
                );
            }
        }
        let merged = Cluster {
            root,
            height: merge_height,
            min_label: clusters[i].min_label.min(clusters[j].min_label),
        };
        // remove j first (j > i), then replace i
        clusters.remove(j);
        dist.remove(j);
        for row in &mut dist {
            row.remove(j);
        }
        clusters[i] = merged;
    }

    let tree = builder
        .finish(clusters[0].root)
        .expect("labels are exactly 1..n");
    Ok(UltrametricTree::validate(tree).expect("agglomeration yields an equidistant tree"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{BALANCED_4, EQUIDISTANT_10};
    use crate::tree::parse_newick;
    use num_bigint::BigInt;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    /// Test oracle: Steiner weight as the total weight of the union of all
    /// pairwise leaf paths inside `sigma`.
    fn union_of_paths_weight(tree: &Tree, sigma: &[u32]) -> BigRational {
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

    #[test]
    fn steiner_weight_examples() {
        let bal4 = parse_newick(BALANCED_4).unwrap();
        assert_eq!(steiner_weight(&bal4, &[1, 2]).unwrap(), rat(2));
        assert_eq!(steiner_weight(&bal4, &[1, 2, 3, 4]).unwrap(), rat(6));
        let big = parse_newick(EQUIDISTANT_10).unwrap();
        assert_eq!(steiner_weight(&big, &[1, 2]).unwrap(), rat(2));
    }

    #[test]
    fn steiner_weight_rejects_bad_subsets() {
        let bal4 = parse_newick(BALANCED_4).unwrap();
        assert!(matches!(
            steiner_weight(&bal4, &[1]),
            Err(DissimilarityError::SubsetTooSmall(1))
        ));
        assert!(matches!(
            steiner_weight(&bal4, &[1, 9]),
            Err(DissimilarityError::UnknownLabel(9))
        ));
        assert!(matches!(
            steiner_weight(&bal4, &[1, 1]),
            Err(DissimilarityError::RepeatedLabel(1))
        ));
    }

    #[test]
    fn steiner_weight_matches_union_of_paths_oracle() {
        for (text, max_m) in [(BALANCED_4, 4), (EQUIDISTANT_10, 4)] {
            let tree = parse_newick(text).unwrap();
            for m in 2..=max_m {
                for sigma in subsets::enumerate(tree.n_leaves(), m) {
                    assert_eq!(
                        steiner_weight(&tree, &sigma).unwrap(),
                        union_of_paths_weight(&tree, &sigma),
                        "sigma {sigma:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn balanced_four_dissimilarity_vectors() {
        let bal4 = parse_newick(BALANCED_4).unwrap();
        let d2 = dissimilarity_vector(&bal4, 2).unwrap();
        let expected: Vec<BigRational> = [2, 4, 4, 4, 4, 2].iter().map(|&v| rat(v)).collect();
        assert_eq!(d2.values(), &expected[..]);

        let d3 = dissimilarity_vector(&bal4, 3).unwrap();
        assert_eq!(d3.values(), &[rat(5), rat(5), rat(5), rat(5)][..]);

        let d4 = dissimilarity_vector(&bal4, 4).unwrap();
        assert_eq!(d4.values(), &[rat(6)][..]);
        assert_eq!(d4.values()[0], bal4.total_weight());

        assert!(matches!(
            dissimilarity_vector(&bal4, 5),
            Err(DissimilarityError::SubsetSizeOutOfRange { m: 5, n: 4 })
        ));
        assert!(matches!(
            dissimilarity_vector(&bal4, 1),
            Err(DissimilarityError::SubsetSizeOutOfRange { m: 1, n: 4 })
        ));
    }

    #[test]
    fn value_lookup_by_subset() {
        let bal4 = parse_newick(BALANCED_4).unwrap();
        let d2 = dissimilarity_vector(&bal4, 2).unwrap();
        assert_eq!(d2.value_at(&[1, 2]), Some(&rat(2)));
        assert_eq!(d2.value_at(&[2, 4]), Some(&rat(4)));
        assert_eq!(d2.value_at(&[2, 1]), None);
    }

    #[test]
    fn relabeling_permutes_entries() {
        let tree = parse_newick(EQUIDISTANT_10).unwrap();
        let perm: Vec<u32> = vec![3, 7, 1, 10, 4, 2, 9, 5, 8, 6];
        let relabeled = tree.relabeled(&perm).unwrap();
        let before = dissimilarity_vector(&tree, 3).unwrap();
        let after = dissimilarity_vector(&relabeled, 3).unwrap();
        for (sigma, value) in before.entries() {
            let mut image: Vec<u32> = sigma.iter().map(|&l| perm[l as usize - 1]).collect();
            image.sort_unstable();
            assert_eq!(after.value_at(&image), Some(value));
        }
    }

    #[test]
    fn ultrametric_check_finds_witnesses() {
        // pairs (1,2)=1, (2,3)=2, (1,3)=4: 4 > max(1,2)
        let m = DistanceMatrix::new(vec![
            vec![rat(0), rat(1), rat(4)],
            vec![rat(1), rat(0), rat(2)],
            vec![rat(4), rat(2), rat(0)],
        ])
        .unwrap();
        assert_eq!(m.ultrametric_violation(), Some([1, 2, 3]));

        let all_equal = DistanceMatrix::new(vec![
            vec![rat(0), rat(2), rat(2)],
            vec![rat(2), rat(0), rat(2)],
            vec![rat(2), rat(2), rat(0)],
        ])
        .unwrap();
        assert!(all_equal.is_ultrametric());
    }

    #[test]
    fn tree_distances_are_ultrametric_for_equidistant_trees() {
        let t = UltrametricTree::validate(parse_newick(EQUIDISTANT_10).unwrap()).unwrap();
        let dm = pairwise_distances(t.tree());
        assert!(dm.is_ultrametric());
        // d(i,j) = 2 * height(lca(i,j))
        for a in 1..=10u32 {
            for b in a + 1..=10u32 {
                let u = t.tree().leaf_node(a).unwrap();
                let w = t.tree().leaf_node(b).unwrap();
                let lca = t.tree().lca(u, w);
                assert_eq!(
                    dm.distance(a, b),
                    &(t.height(lca) * BigRational::from_integer(2.into()))
                );
            }
        }
    }

    #[test]
    fn realization_round_trips_fixture_distances() {
        for text in [BALANCED_4, EQUIDISTANT_10] {
            let tree = parse_newick(text).unwrap();
            let dm = pairwise_distances(&tree);
            let realized = realize_ultrametric(&dm).unwrap();
            assert_eq!(pairwise_distances(realized.tree()), dm);
        }
    }

    #[test]
    fn realization_resolves_ties_with_zero_weight_edges() {
        let dm = DistanceMatrix::new(vec![
            vec![rat(0), rat(2), rat(2)],
            vec![rat(2), rat(0), rat(2)],
            vec![rat(2), rat(2), rat(0)],
        ])
        .unwrap();
        let t = realize_ultrametric(&dm).unwrap();
        assert_eq!(*t.depth(), rat(1));
        assert_eq!(pairwise_distances(t.tree()), dm);
        let zero_edges = t
            .tree()
            .edge_children()
            .filter(|&id| t.tree().edge_weight(id).unwrap().is_zero())
            .count();
        assert_eq!(zero_edges, 1);
    }

    #[test]
    fn realization_rejects_non_ultrametric_and_zero_distances() {
        let bad = DistanceMatrix::new(vec![
            vec![rat(0), rat(1), rat(4)],
            vec![rat(1), rat(0), rat(2)],
            vec![rat(4), rat(2), rat(0)],
        ])
        .unwrap();
        assert!(matches!(
            realize_ultrametric(&bad),
            Err(DissimilarityError::NotUltrametric { x: 1, y: 2, z: 3 })
        ));

        let zero = DistanceMatrix::new(vec![vec![rat(0), rat(0)], vec![rat(0), rat(0)]]).unwrap();
        assert!(matches!(
            realize_ultrametric(&zero),
            Err(DissimilarityError::ZeroDistance { a: 1, b: 2 })
        ));
    }

    #[test]
    fn distance_matrix_json_round_trip() {
        let dm = DistanceMatrix::new(vec![
            vec![rat(0), BigRational::new(7.into(), 2.into())],
            vec![BigRational::new(7.into(), 2.into()), rat(0)],
        ])
        .unwrap();
        let json = dm.to_json_string();
        assert_eq!(json, r#"{"n":2,"d":[["0","7/2"],["7/2","0"]]}"#);
        assert_eq!(DistanceMatrix::from_json_str(&json).unwrap(), dm);
        assert!(DistanceMatrix::from_json_str("{\"n\":1}").is_err());
    }

    #[test]
    fn distance_matrix_validation() {
        assert!(matches!(
            DistanceMatrix::new(vec![vec![rat(0), rat(1)], vec![rat(2), rat(0)]]),
            Err(DissimilarityError::NotSymmetric { .. })
        ));
        assert!(matches!(
            DistanceMatrix::new(vec![vec![rat(1), rat(1)], vec![rat(1), rat(0)]]),
            Err(DissimilarityError::NonZeroDiagonal(1))
        ));
        assert!(matches!(
            DistanceMatrix::new(vec![vec![rat(0), rat(-1)], vec![rat(-1), rat(0)]]),
            Err(DissimilarityError::NegativeDistance { .. })
        ));
    }
}
