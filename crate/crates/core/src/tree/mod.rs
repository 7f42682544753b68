//! Rooted edge-weighted leaf-labeled trees.
//!
//! A [`Tree`] is stored as an arena of nodes; each non-root node carries the
//! exact rational weight of the edge to its parent. Leaves are labeled
//! bijectively with {1..n}. Trees are immutable once built, so every
//! operation here is a pure function and safe to call from multiple threads.

mod generate;
mod newick;
mod ultrametric;

pub use generate::{random_phylogenetic, random_ultrametric};
pub use newick::{parse_newick, serialize_newick, NewickError};
pub use ultrametric::{UltrametricError, UltrametricTree};

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

/// Index of a node in the tree arena.
pub type NodeId = usize;

/// Structural errors raised while assembling a tree.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("leaf label {0} appears more than once")]
    DuplicateLabel(u32),
    #[error("leaf labels must be exactly 1..{n_leaves}, found label {label}")]
    LabelOutOfRange { label: u32, n_leaves: usize },
    #[error("internal node with a single child is not allowed")]
    UnaryNode,
    #[error("node {0} is attached to two parents")]
    Reattached(NodeId),
    #[error("edge weight must be positive, found {0}")]
    NonPositiveWeight(String),
    #[error("need at least {min} leaves, got {got}")]
    TooFewLeaves { min: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    parent: Option<NodeId>,
    /// Weight of the edge to the parent; `None` exactly for the root.
    edge_weight: Option<BigRational>,
    children: Vec<NodeId>,
    label: Option<u32>,
}

/// A rooted tree with exact rational edge weights and leaves labeled 1..n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    nodes: Vec<Node>,
    root: NodeId,
    /// `leaf_nodes[l - 1]` is the node carrying label `l`.
    leaf_nodes: Vec<NodeId>,
}

/// Incremental bottom-up construction of a [`Tree`].
#[derive(Debug, Default)]
pub struct TreeBuilder {
    nodes: Vec<Node>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        TreeBuilder::default()
    }

    pub fn add_leaf(&mut self, label: u32) -> NodeId {
        self.nodes.push(Node {
            parent: None,
            edge_weight: None,
            children: Vec::new(),
            label: Some(label),
        });
        self.nodes.len() - 1
    }

    /// Adds an internal node whose children are existing roots of subtrees,
    /// each attached with the given edge weight.
    pub fn add_internal(
        &mut self,
        children: Vec<(NodeId, BigRational)>,
    ) -> Result<NodeId, TreeError> {
        if children.len() < 2 {
            return Err(TreeError::UnaryNode);
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            parent: None,
            edge_weight: None,
            children: Vec::new(),
            label: None,
        });
        for (child, weight) in children {
            if self.nodes[child].parent.is_some() {
                return Err(TreeError::Reattached(child));
            }
            self.nodes[child].parent = Some(id);
            self.nodes[child].edge_weight = Some(weight);
            self.nodes[id].children.push(child);
        }
        Ok(id)
    }

    /// Finalizes the tree, checking that leaf labels are exactly {1..n}.
    pub fn finish(self, root: NodeId) -> Result<Tree, TreeError> {
        let n_leaves = self.nodes.iter().filter(|n| n.children.is_empty()).count();
        let mut leaf_nodes = vec![usize::MAX; n_leaves];
        for (id, node) in self.nodes.iter().enumerate() {
            if !node.children.is_empty() {
                continue;
            }
            let label = node.label.expect("leaves are created with labels");
            if label == 0 || label as usize > n_leaves {
                return Err(TreeError::LabelOutOfRange { label, n_leaves });
            }
            if leaf_nodes[label as usize - 1] != usize::MAX {
                return Err(TreeError::DuplicateLabel(label));
            }
            leaf_nodes[label as usize - 1] = id;
        }
        Ok(Tree {
            nodes: self.nodes,
            root,
            leaf_nodes,
        })
    }
}

impl Tree {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_leaves(&self) -> usize {
        self.leaf_nodes.len()
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id].children.is_empty()
    }

    pub fn label(&self, id: NodeId) -> Option<u32> {
        self.nodes[id].label
    }

    /// Node carrying the given 1-based leaf label.
    pub fn leaf_node(&self, label: u32) -> Option<NodeId> {
        self.leaf_nodes.get(label.checked_sub(1)? as usize).copied()
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id].children
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id].parent
    }

    /// Weight of the edge from `id` to its parent; `None` for the root.
    pub fn edge_weight(&self, id: NodeId) -> Option<&BigRational> {
        self.nodes[id].edge_weight.as_ref()
    }

    /// Every non-root node identifies the edge to its parent.
    pub fn edge_children(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(move |&id| id != self.root)
    }

    /// Sum of all edge weights.
    pub fn total_weight(&self) -> BigRational {
        self.edge_children()
            .map(|id| self.edge_weight(id).expect("non-root node has an edge"))
            .fold(BigRational::zero(), |acc, w| acc + w)
    }

    /// Tree order with respect to the root: true iff `u` lies on the path
    /// from the root to `w` (equivalently, `u` is a weak ancestor of `w`).
    pub fn tree_order_leq(&self, u: NodeId, w: NodeId) -> bool {
        let mut cur = Some(w);
        while let Some(id) = cur {
            if id == u {
                return true;
            }
            cur = self.parent(id);
        }
        false
    }

    /// Nodes in postorder (children before parents), deterministic.
    pub fn postorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if expanded || self.is_leaf(id) {
                out.push(id);
            } else {
                stack.push((id, true));
                for &child in self.children(id).iter().rev() {
                    stack.push((child, false));
                }
            }
        }
        out
    }

    /// Total edge weight from the root down to each node.
    pub fn depths(&self) -> Vec<BigRational> {
        let mut depths = vec![BigRational::zero(); self.nodes.len()];
        let mut order = self.postorder();
        order.reverse();
        for id in order {
            if let Some(parent) = self.parent(id) {
                depths[id] = &depths[parent] + self.edge_weight(id).expect("non-root edge");
            }
        }
        depths
    }

    /// Lowest common ancestor of two nodes.
    pub fn lca(&self, u: NodeId, w: NodeId) -> NodeId {
        let mut ancestors = vec![false; self.nodes.len()];
        let mut cur = Some(u);
        while let Some(id) = cur {
            ancestors[id] = true;
            cur = self.parent(id);
        }
        let mut cur = w;
        loop {
            if ancestors[cur] {
                return cur;
            }
            cur = self.parent(cur).expect("root is a common ancestor");
        }
    }

    /// Sorted leaf labels in the subtree below `id` (inclusive).
    pub fn leaves_below(&self, id: NodeId) -> Vec<u32> {
        let mut labels = Vec::new();
        let mut stack = vec![id];
        while let Some(cur) = stack.pop() {
            if let Some(label) = self.label(cur) {
                labels.push(label);
            }
            stack.extend_from_slice(self.children(cur));
        }
        labels.sort_unstable();
        labels
    }

    /// Smallest leaf label below each node, computed in one pass.
    pub fn min_leaf_below(&self) -> Vec<u32> {
        let mut min_leaf = vec![u32::MAX; self.nodes.len()];
        for id in self.postorder() {
            min_leaf[id] = match self.label(id) {
                Some(label) => label,
                None => self
                    .children(id)
                    .iter()
                    .map(|&c| min_leaf[c])
                    .min()
                    .expect("internal node has children"),
            };
        }
        min_leaf
    }

    /// Same topology and weights with leaf `l` relabeled to `perm[l - 1]`.
    pub fn relabeled(&self, perm: &[u32]) -> Result<Tree, TreeError> {
        assert_eq!(perm.len(), self.n_leaves(), "permutation length mismatch");
        let mut tree = self.clone();
        let mut leaf_nodes = vec![usize::MAX; self.n_leaves()];
        for (id, node) in tree.nodes.iter_mut().enumerate() {
            if let Some(label) = node.label {
                let new = perm[label as usize - 1];
                if new == 0 || new as usize > perm.len() {
                    return Err(TreeError::LabelOutOfRange {
                        label: new,
                        n_leaves: perm.len(),
                    });
                }
                if leaf_nodes[new as usize - 1] != usize::MAX {
                    return Err(TreeError::DuplicateLabel(new));
                }
                leaf_nodes[new as usize - 1] = id;
                node.label = Some(new);
            }
        }
        tree.leaf_nodes = leaf_nodes;
        Ok(tree)
    }

    /// Checks the phylogenetic-tree invariant: every edge weight is
    /// strictly positive.
    pub fn validate_phylogenetic(&self) -> Result<(), TreeError> {
        for id in self.edge_children() {
            let w = self.edge_weight(id).expect("non-root edge");
            if *w <= BigRational::zero() {
                return Err(TreeError::NonPositiveWeight(
                    crate::rational::format_rational(w),
                ));
            }
        }
        Ok(())
    }
}
