//! Decomposition of direction-labeled assembly graphs into physically
//! feasible build steps.
//!
//! A model is a set of rigid blocks joined by snap connections, each
//! connection aligned to one of finitely many spatial directions. The model
//! is represented as a directed multigraph: one vertex per block, one edge
//! per connection, oriented so that the physical vector from `from` to `to`
//! agrees with the edge's direction axis. Pulling two sub-assemblies apart
//! along an axis is only possible when nothing traps them, which makes some
//! cuts of the graph infeasible even though they disconnect it.
//!
//! The crate answers three questions about such a model:
//!
//! - which edge removals along a single axis are *physically feasible
//!   decompositions* (PFDs), characterized by acyclicity of the induced
//!   component connectivity graph ([`decompose::build_ccg`],
//!   [`decompose::is_pfd`]);
//! - what the *maximal* PFD along an axis is, computed in linear time from
//!   the strongly connected components of a projection digraph
//!   ([`decompose::max_pfd`]);
//! - how the whole model decomposes hierarchically into a tree of
//!   sub-assemblies ([`hierarchy::h_max_pfd`]), from which an ordered
//!   assembly plan is recovered by postorder traversal
//!   ([`instructions::emit_plan`]).
//!
//! The [`oracle`] module re-implements the feasibility definitions by
//! brute-force subset enumeration. It is exponential and size-guarded, and
//! exists to cross-check the fast path on small instances.
//!
//! ```
//! use blockplan_core::model::{validate_model, RawBlock, RawConnection, RawModel};
//! use blockplan_core::hierarchy::h_max_pfd;
//! use blockplan_core::instructions::emit_plan;
//!
//! let raw = RawModel {
//!     directions: vec![[1, 0, 0]],
//!     blocks: vec![RawBlock::new(1), RawBlock::new(2)],
//!     connections: vec![RawConnection::new(1, 2, 0)],
//! };
//! let graph = validate_model(&raw).expect("valid model");
//! let tree = h_max_pfd(&graph);
//! let plan = emit_plan(&tree).expect("no stuck components");
//! assert_eq!(plan.steps.len(), 1);
//! ```

pub mod decompose;
pub mod hierarchy;
pub mod instructions;
pub mod model;
pub mod oracle;
mod union_find;

pub use decompose::{
    build_ccg, build_ccg_within, condense, is_2pfd, is_pfd, max_pfd, max_pfd_within,
    physically_removable_edges, project_along, project_along_within, strongly_connected_components,
    topological_order, Ccg, CcgError, CycleFound, Digraph, IndexDigraph, MaxPfdResult, Metrics,
};
pub use hierarchy::{
    h_max_pfd, h_max_pfd_with_metrics, kpfd_binary_tree, tree_stats, BinaryPfdTree, NotADag,
    PfdNodeKind, PfdTree, TreeStats,
};
pub use instructions::{
    emit_plan, postorder, render_plan, AssemblyStep, IncompleteTree, InstructionPlan,
};
pub use model::{
    partition_edges, validate_model, weak_components, Block, BlockId, ComponentSet, Connection,
    DirIndex, Direction, ModelError, ModelGraph, RawBlock, RawConnection, RawModel,
};
pub use oracle::{
    enumerate_candidates, feasibility_equivalence, is_kpfd_recursive, maximal_removals,
    EquivalenceReport, InstanceTooLarge, OracleLimits, RemovalCandidate,
};
