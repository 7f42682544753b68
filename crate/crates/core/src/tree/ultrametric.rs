//! Equidistant (ultrametric) trees: validation, node heights, and the
//! descendant-first internal node order.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use super::{NodeId, Tree};
use crate::rational::format_rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UltrametricError {
    #[error("edge to node {node} has negative weight {weight}")]
    NegativeWeight { node: NodeId, weight: String },
    #[error("tree is not binary: node {node} has {arity} children")]
    NotBinary { node: NodeId, arity: usize },
    #[error(
        "tree is not equidistant: leaf {leaf_a} sits at depth {depth_a}, leaf {leaf_b} at {depth_b}"
    )]
    NotEquidistant {
        leaf_a: u32,
        depth_a: String,
        leaf_b: u32,
        depth_b: String,
    },
    #[error("leaves {leaf_a} and {leaf_b} are at path weight zero")]
    ZeroLeafDistance { leaf_a: u32, leaf_b: u32 },
}

/// A validated d-equidistant binary tree.
///
/// Wraps a [`Tree`] together with its depth `d` and the height of every node
/// (total weight from the node down to any descendant leaf, well defined by
/// equidistance). The internal node order `v_1..v_{n-1}` is fixed at
/// validation time: nodes are listed by increasing height, descendants
/// always before their ancestors, ties broken by the smallest leaf label
/// below. The root is always last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UltrametricTree {
    tree: Tree,
    depth: BigRational,
    heights: Vec<BigRational>,
    internal_order: Vec<NodeId>,
}

impl UltrametricTree {
    /// Checks the three equidistance invariants and computes node heights.
    ///
    /// Fails with [`UltrametricError::NotBinary`] when the root does not have
    /// exactly two children or some other internal node does not have exactly
    /// two (degree three counting its parent), `NotEquidistant` when two
    /// leaves sit at different depths, and `ZeroLeafDistance` when two
    /// distinct leaves are at path weight zero.
    pub fn validate(tree: Tree) -> Result<Self, UltrametricError> {
        for id in tree.edge_children() {
            let w = tree.edge_weight(id).expect("non-root edge");
            if *w < BigRational::zero() {
                return Err(UltrametricError::NegativeWeight {
                    node: id,
                    weight: format_rational(w),
                });
            }
        }
        for id in 0..tree.node_count() {
            let arity = tree.children(id).len();
            if arity != 0 && arity != 2 {
                return Err(UltrametricError::NotBinary { node: id, arity });
            }
        }
        if tree.is_leaf(tree.root()) {
            return Err(UltrametricError::NotBinary {
                node: tree.root(),
                arity: 0,
            });
        }

        let depths = tree.depths();
        let first_leaf = tree.leaf_node(1).expect("labels start at 1");
        let depth = depths[first_leaf].clone();
        for label in 2..=tree.n_leaves() as u32 {
            let leaf = tree.leaf_node(label).expect("labels are contiguous");
            if depths[leaf] != depth {
                return Err(UltrametricError::NotEquidistant {
                    leaf_a: 1,
                    depth_a: format_rational(&depth),
                    leaf_b: label,
                    depth_b: format_rational(&depths[leaf]),
                });
            }
        }

        let heights: Vec<BigRational> = depths.iter().map(|d| &depth - d).collect();
        for id in 0..tree.node_count() {
            if !tree.is_leaf(id) && heights[id].is_zero() {
                let below = tree.leaves_below(id);
                return Err(UltrametricError::ZeroLeafDistance {
                    leaf_a: below[0],
                    leaf_b: below[1],
                });
            }
        }

        let internal_order = internal_order(&tree, &heights);
        Ok(UltrametricTree {
            tree,
            depth,
            heights,
            internal_order,
        })
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn into_tree(self) -> Tree {
        self.tree
    }

    /// The common root-to-leaf path weight d.
    pub fn depth(&self) -> &BigRational {
        &self.depth
    }

    pub fn n_leaves(&self) -> usize {
        self.tree.n_leaves()
    }

    /// Weight from `id` down to any descendant leaf; 0 for leaves, d for the
    /// root.
    pub fn height(&self, id: NodeId) -> &BigRational {
        &self.heights[id]
    }

    pub fn total_weight(&self) -> BigRational {
        self.tree.total_weight()
    }

    /// The internal nodes `v_1..v_{n-1}`, ordered so that whenever `v_i` lies
    /// on the root-to-`v_j` path, `j <= i`. The last entry is the root.
    pub fn internal_node_order(&self) -> &[NodeId] {
        &self.internal_order
    }
}

/// Orders internal nodes by increasing height; inside a height class (which
/// can contain ancestor chains linked by zero-weight edges) descendants are
/// emitted before ancestors, smallest leaf label first among the available
/// nodes.
fn internal_order(tree: &Tree, heights: &[BigRational]) -> Vec<NodeId> {
    let min_leaf = tree.min_leaf_below();
    let mut internals: Vec<NodeId> = (0..tree.node_count())
        .filter(|&id| !tree.is_leaf(id))
        .collect();
    internals.sort_by(|&a, &b| heights[a].cmp(&heights[b]));

    let mut order = Vec::with_capacity(internals.len());
    let mut group_start = 0;
    while group_start < internals.len() {
        let mut group_end = group_start + 1;
        while group_end < internals.len()
            && heights[internals[group_end]] == heights[internals[group_start]]
        {
            group_end += 1;
        }
        let group = &internals[group_start..group_end];

        // Kahn's algorithm on the zero-weight parent links inside the group.
        let mut pending_children = vec![0usize; tree.node_count()];
        for &id in group {
            for &child in tree.children(id) {
                if !tree.is_leaf(child) && heights[child] == heights[id] {
                    pending_children[id] += 1;
                }
            }
        }
        let mut ready: BinaryHeap<Reverse<(u32, NodeId)>> = group
            .iter()
            .filter(|&&id| pending_children[id] == 0)
            .map(|&id| Reverse((min_leaf[id], id)))
            .collect();
        while let Some(Reverse((_, id))) = ready.pop() {
            order.push(id);
            if let Some(parent) = tree.parent(id) {
                if !tree.is_leaf(parent) && heights[parent] == heights[id] {
                    pending_children[parent] -= 1;
                    if pending_children[parent] == 0 {
                        ready.push(Reverse((min_leaf[parent], parent)));
                    }
                }
            }
        }
        group_start = group_end;
    }
    debug_assert_eq!(order.len(), internals.len());
    order
}
