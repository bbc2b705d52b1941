//! Hierarchical decomposition: recursive maximal PFDs down to single blocks,
//! and the binary-tree view of a single multi-component split.

use std::collections::BTreeSet;
use std::fmt;

use crate::decompose::{max_pfd_within_metrics, topological_order, Ccg, CycleFound, Metrics};
use crate::model::{BlockId, Connection, DirIndex, ModelGraph};

/// Rooted ordered decomposition tree: the root is the whole model, leaves are
/// single blocks, and every internal node records the direction and edge set
/// of the maximal PFD that split it. Children appear in topological order of
/// the split's CCG (first detachable first).
///
/// A multi-block component that no direction can split becomes a [`Stuck`]
/// node: childless but not a true leaf. Such a model cannot be taken apart
/// under the rigid-connection assumptions.
///
/// [`Stuck`]: PfdNodeKind::Stuck
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PfdTree {
    node: BTreeSet<BlockId>,
    kind: PfdNodeKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PfdNodeKind {
    /// Single block.
    Leaf,
    /// Multi-block component with no feasible split along any direction.
    Stuck,
    /// Component split by a maximal PFD along `dir`.
    Split {
        dir: DirIndex,
        removed: BTreeSet<Connection>,
        children: Vec<PfdTree>,
    },
}

impl PfdTree {
    pub fn node(&self) -> &BTreeSet<BlockId> {
        &self.node
    }

    pub fn kind(&self) -> &PfdNodeKind {
        &self.kind
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, PfdNodeKind::Leaf)
    }

    pub fn is_stuck(&self) -> bool {
        matches!(self.kind, PfdNodeKind::Stuck)
    }

    pub fn children(&self) -> &[PfdTree] {
        match &self.kind {
            PfdNodeKind::Split { children, .. } => children,
            _ => &[],
        }
    }

    pub fn split_dir(&self) -> Option<DirIndex> {
        match &self.kind {
            PfdNodeKind::Split { dir, .. } => Some(*dir),
            _ => None,
        }
    }

    pub fn removed(&self) -> Option<&BTreeSet<Connection>> {
        match &self.kind {
            PfdNodeKind::Split { removed, .. } => Some(removed),
            _ => None,
        }
    }

    /// Every stuck component in the tree, depth-first.
    pub fn stuck_components(&self) -> Vec<&BTreeSet<BlockId>> {
        let mut out = Vec::new();
        self.collect_stuck(&mut out);
        out
    }

    fn collect_stuck<'a>(&'a self, out: &mut Vec<&'a BTreeSet<BlockId>>) {
        if self.is_stuck() {
            out.push(&self.node);
        }
        for child in self.children() {
            child.collect_stuck(out);
        }
    }
}

/// Builds the hierarchical decomposition of the whole model.
///
/// At each component, directions are tried in ascending index order and the
/// first one whose maximal PFD yields two or more components wins; the
/// recursion bottoms out at single blocks. Deterministic: identical models
/// give identical trees.
pub fn h_max_pfd(g: &ModelGraph) -> PfdTree {
    h_max_pfd_with_metrics(g).0
}

/// [`h_max_pfd`] plus counters of the SCC work done, for complexity checks.
pub fn h_max_pfd_with_metrics(g: &ModelGraph) -> (PfdTree, Metrics) {
    let mut metrics = Metrics::default();
    let tree = decompose_component(g, g.block_set(), &mut metrics);
    (tree, metrics)
}

fn decompose_component(g: &ModelGraph, scope: BTreeSet<BlockId>, metrics: &mut Metrics) -> PfdTree {
    if scope.len() == 1 {
        return PfdTree {
            node: scope,
            kind: PfdNodeKind::Leaf,
        };
    }
    for dir in g.dir_indices() {
        let result = max_pfd_within_metrics(g, &scope, dir, metrics);
        if result.components.len() < 2 {
            continue;
        }
        let children = result
            .components
            .iter()
            .map(|c| decompose_component(g, c.clone(), metrics))
            .collect();
        return PfdTree {
            node: scope,
            kind: PfdNodeKind::Split {
                dir,
                removed: result.removed,
                children,
            },
        };
    }
    PfdTree {
        node: scope,
        kind: PfdNodeKind::Stuck,
    }
}

/// Full ordered binary tree over the component sets of a CCG.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryPfdTree {
    node: BTreeSet<BlockId>,
    children: Option<Box<(BinaryPfdTree, BinaryPfdTree)>>,
}

impl BinaryPfdTree {
    fn leaf(node: BTreeSet<BlockId>) -> Self {
        BinaryPfdTree {
            node,
            children: None,
        }
    }

    pub fn node(&self) -> &BTreeSet<BlockId> {
        &self.node
    }

    pub fn left(&self) -> Option<&BinaryPfdTree> {
        self.children.as_ref().map(|c| &c.0)
    }

    pub fn right(&self) -> Option<&BinaryPfdTree> {
        self.children.as_ref().map(|c| &c.1)
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    /// Leaf component sets from left to right.
    pub fn leaves(&self) -> Vec<&BTreeSet<BlockId>> {
        match &self.children {
            None => vec![&self.node],
            Some(c) => {
                let mut out = c.0.leaves();
                out.extend(c.1.leaves());
                out
            }
        }
    }
}

/// The CCG has a directed cycle, so no peel-off order exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotADag(pub CycleFound);

impl fmt::Display for NotADag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NotADag: {}", self.0)
    }
}

impl std::error::Error for NotADag {}

/// Realizes a multi-component feasible decomposition as a sequence of
/// two-way splits: a left-deep full binary tree peeling off the first
/// component in topological order at each level. Edges originate in the
/// left child and terminate in the right child, and the leaves read
/// left-to-right are a topological ordering of the CCG. A one-component
/// CCG degenerates to a single leaf.
pub fn kpfd_binary_tree(c: &Ccg) -> Result<BinaryPfdTree, NotADag> {
    let order = topological_order(&c.index_digraph()).map_err(NotADag)?;
    assert!(!order.is_empty(), "CCG with no components");

    let mut rev = order.into_iter().rev();
    let last = rev.next().unwrap();
    let mut tree = BinaryPfdTree::leaf(c.nodes.get(last).clone());
    for idx in rev {
        let left = BinaryPfdTree::leaf(c.nodes.get(idx).clone());
        let node: BTreeSet<BlockId> = left.node.union(&tree.node).copied().collect();
        tree = BinaryPfdTree {
            node,
            children: Some(Box::new((left, tree))),
        };
    }
    Ok(tree)
}

/// Shape summary of a decomposition tree. Childless nodes (single blocks,
/// and stuck components if any) count as leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeStats {
    pub height: usize,
    pub internal_count: usize,
    pub leaf_count: usize,
}

pub fn tree_stats(t: &PfdTree) -> TreeStats {
    let children = t.children();
    if children.is_empty() {
        return TreeStats {
            height: 0,
            internal_count: 0,
            leaf_count: 1,
        };
    }
    let mut height = 0;
    let mut internal_count = 1;
    let mut leaf_count = 0;
    for child in children {
        let s = tree_stats(child);
        height = height.max(s.height + 1);
        internal_count += s.internal_count;
        leaf_count += s.leaf_count;
    }
    TreeStats {
        height,
        internal_count,
        leaf_count,
    }
}
