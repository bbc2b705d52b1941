//! Assembly plan generation: postorder traversal of the decomposition tree
//! and rendering of the ordered step list.
//!
//! Reversing a decomposition gives an assembly procedure. Postorder visits
//! children before parents, so every sub-assembly is built before the step
//! that uses it; leaves are single blocks and need no step of their own.

use std::collections::BTreeSet;
use std::fmt;

use crate::hierarchy::PfdTree;
use crate::model::{BlockId, Connection, DirIndex, ModelGraph};

/// One assembly step: join `parts` (in sibling order) into `target` along
/// the `dir` axis, re-attaching exactly the `joins` connections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssemblyStep {
    /// 1-based position in the plan.
    pub step_number: usize,
    pub target: BTreeSet<BlockId>,
    pub parts: Vec<BTreeSet<BlockId>>,
    pub dir: DirIndex,
    pub joins: BTreeSet<Connection>,
}

/// Ordered assembly steps; every part of every step is either a single block
/// or the target of an earlier step, and the last target is the whole model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstructionPlan {
    pub steps: Vec<AssemblyStep>,
}

/// The tree contains a stuck component, so no complete plan exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncompleteTree {
    pub component: BTreeSet<BlockId>,
}

impl fmt::Display for IncompleteTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.component.iter().map(BlockId::to_string).collect();
        write!(f, "IncompleteTree: stuck component [{}]", ids.join(","))
    }
}

impl std::error::Error for IncompleteTree {}

/// Node sets of the tree in postorder: every parent appears after all of its
/// descendants; leaves included.
pub fn postorder(t: &PfdTree) -> Vec<BTreeSet<BlockId>> {
    let mut out = Vec::new();
    walk(t, &mut |node| out.push(node.node().clone()));
    out
}

fn walk<'a>(t: &'a PfdTree, visit: &mut impl FnMut(&'a PfdTree)) {
    for child in t.children() {
        walk(child, visit);
    }
    visit(t);
}

/// Turns a complete decomposition tree into an assembly plan: one step per
/// internal node, in postorder; leaves are omitted.
pub fn emit_plan(t: &PfdTree) -> Result<InstructionPlan, IncompleteTree> {
    if let Some(&stuck) = t.stuck_components().first() {
        return Err(IncompleteTree {
            component: stuck.clone(),
        });
    }
    let mut steps = Vec::new();
    walk(t, &mut |node| {
        let crate::hierarchy::PfdNodeKind::Split {
            dir,
            removed,
            children,
        } = node.kind()
        else {
            return;
        };
        steps.push(AssemblyStep {
            step_number: steps.len() + 1,
            target: node.node().clone(),
            parts: children.iter().map(|c| c.node().clone()).collect(),
            dir: *dir,
            joins: removed.clone(),
        });
    });
    Ok(InstructionPlan { steps })
}

/// Renders a plan as stable, human-readable text. Blocks appear under their
/// source ids; per-connection metadata from the input is carried through to
/// the join lines.
pub fn render_plan(plan: &InstructionPlan, g: &ModelGraph) -> String {
    if plan.steps.is_empty() {
        return "Model is a single block; no assembly required.\n".to_string();
    }
    let mut out = format!(
        "Assembly plan: {} {}, {} blocks.\n",
        plan.steps.len(),
        if plan.steps.len() == 1 {
            "step"
        } else {
            "steps"
        },
        g.block_count()
    );
    for step in &plan.steps {
        let parts: Vec<String> = step.parts.iter().map(|p| g.format_block_set(p)).collect();
        out.push_str(&format!(
            "\nStep {}: assemble {} from {} along {} {}.\n",
            step.step_number,
            g.format_block_set(&step.target),
            parts.join(" + "),
            step.dir,
            g.direction(step.dir),
        ));
        let joins: Vec<String> = step
            .joins
            .iter()
            .map(|&j| {
                let metas = g.connection_meta(j);
                if metas.is_empty() {
                    g.format_connection(j)
                } else {
                    format!("{} ({})", g.format_connection(j), metas.join("; "))
                }
            })
            .collect();
        out.push_str(&format!("  joins: {}\n", joins.join(", ")));
    }
    out
}
