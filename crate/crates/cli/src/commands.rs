//! Subcommand implementations. Each returns the text to print on stdout or
//! a [`CliError`] carrying the exit code.

use std::fmt::Write;
use std::path::Path;

use blockplan_core::decompose::{max_pfd, MaxPfdResult};
use blockplan_core::hierarchy::h_max_pfd;
use blockplan_core::instructions::{emit_plan, render_plan, InstructionPlan};
use blockplan_core::model::{DirIndex, ModelGraph};
use blockplan_core::oracle::{
    enumerate_candidates, feasibility_equivalence, maximal_removals, OracleLimits,
};
use serde::Serialize;

use crate::dot;
use crate::modelfile::load_model;
use crate::CliError;

pub fn cmd_validate(path: &Path) -> Result<String, CliError> {
    let g = load_model(path)?;
    Ok(format!(
        "valid: {} blocks, {} connections, {} directions\n",
        g.block_count(),
        g.edge_count(),
        g.direction_count()
    ))
}

/// Direction selection for `decompose`: one index or every direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirSelection {
    One(usize),
    All,
}

pub fn cmd_decompose(path: &Path, selection: DirSelection) -> Result<String, CliError> {
    let g = load_model(path)?;
    match selection {
        DirSelection::One(index) => {
            let dir = check_dir(&g, index)?;
            Ok(format!("{}\n", decompose_line(&g, &max_pfd(&g, dir))))
        }
        DirSelection::All => {
            if g.direction_count() == 0 {
                return Ok("1 component\n".to_string());
            }
            let mut out = String::new();
            for dir in g.dir_indices() {
                let _ = writeln!(
                    out,
                    "{} {}: {}",
                    dir,
                    g.direction(dir),
                    decompose_line(&g, &max_pfd(&g, dir))
                );
            }
            Ok(out)
        }
    }
}

fn check_dir(g: &ModelGraph, index: usize) -> Result<DirIndex, CliError> {
    if index >= g.direction_count() {
        return Err(CliError::Domain(format!(
            "UnknownDirection: index {index} (model has {} directions)",
            g.direction_count()
        )));
    }
    Ok(DirIndex(index))
}

fn decompose_line(g: &ModelGraph, r: &MaxPfdResult) -> String {
    if r.components.len() == 1 {
        return "1 component (no PFD along this direction)".to_string();
    }
    let comps: Vec<String> = r.components.iter().map(|c| g.format_block_set(c)).collect();
    let removed: Vec<String> = r.removed.iter().map(|&e| g.format_connection(e)).collect();
    format!(
        "{} components: {}; removed: {}",
        r.components.len(),
        comps.join(" | "),
        removed.join(", ")
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanFormat {
    Text,
    Structured,
}

pub fn cmd_instructions(path: &Path, format: PlanFormat) -> Result<String, CliError> {
    let g = load_model(path)?;
    let tree = h_max_pfd(&g);
    if let Some(&stuck) = tree.stuck_components().first() {
        return Err(CliError::Domain(format!(
            "StuckComponent: {}",
            g.format_block_set(stuck)
        )));
    }
    let plan = emit_plan(&tree).expect("tree has no stuck components");
    match format {
        PlanFormat::Text => Ok(render_plan(&plan, &g)),
        PlanFormat::Structured => Ok(structured_plan(&plan, &g)),
    }
}

#[derive(Serialize)]
struct PlanDoc {
    schema: u32,
    blocks: usize,
    steps: Vec<StepDoc>,
}

#[derive(Serialize)]
struct StepDoc {
    step: usize,
    target: Vec<u64>,
    parts: Vec<Vec<u64>>,
    direction: DirectionDoc,
    joins: Vec<JoinDoc>,
}

#[derive(Serialize)]
struct DirectionDoc {
    index: usize,
    vector: [i64; 3],
}

#[derive(Serialize)]
struct JoinDoc {
    from: u64,
    to: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    meta: Option<String>,
}

/// Machine-readable mirror of the plan; join entries expand parallel
/// duplicate connections, one entry per stored edge.
fn structured_plan(plan: &InstructionPlan, g: &ModelGraph) -> String {
    let sources = |set: &std::collections::BTreeSet<blockplan_core::model::BlockId>| -> Vec<u64> {
        set.iter().map(|&b| g.block(b).source_id).collect()
    };
    let doc = PlanDoc {
        schema: crate::modelfile::SCHEMA_VERSION,
        blocks: g.block_count(),
        steps: plan
            .steps
            .iter()
            .map(|s| StepDoc {
                step: s.step_number,
                target: sources(&s.target),
                parts: s.parts.iter().map(&sources).collect(),
                direction: DirectionDoc {
                    index: s.dir.0,
                    vector: g.direction(s.dir).components(),
                },
                joins: g
                    .edges()
                    .iter()
                    .zip(g.edge_metas())
                    .filter(|(e, _)| s.joins.contains(e))
                    .map(|(e, m)| JoinDoc {
                        from: g.block(e.from).source_id,
                        to: g.block(e.to).source_id,
                        meta: m.clone(),
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("plan serializes");
    text.push('\n');
    text
}

pub fn cmd_export_dot(path: &Path, what: &str) -> Result<String, CliError> {
    let g = load_model(path)?;
    match parse_target(what)? {
        DotTarget::Model => Ok(dot::model_dot(&g)),
        DotTarget::Projection(i) => Ok(dot::projection_dot(&g, check_dir(&g, i)?)),
        DotTarget::Ccg(i) => Ok(dot::ccg_dot(&g, check_dir(&g, i)?)),
        DotTarget::Tree => Ok(dot::tree_dot(&g)),
    }
}

enum DotTarget {
    Model,
    Projection(usize),
    Ccg(usize),
    Tree,
}

fn parse_target(what: &str) -> Result<DotTarget, CliError> {
    let unknown = || {
        CliError::Domain(format!(
            "UnknownTarget: {what} (expected model, projection:<i>, ccg:<i>, or tree)"
        ))
    };
    match what {
        "model" => Ok(DotTarget::Model),
        "tree" => Ok(DotTarget::Tree),
        _ => {
            let (kind, index) = what.split_once(':').ok_or_else(unknown)?;
            let index: usize = index.parse().map_err(|_| unknown())?;
            match kind {
                "projection" => Ok(DotTarget::Projection(index)),
                "ccg" => Ok(DotTarget::Ccg(index)),
                _ => Err(unknown()),
            }
        }
    }
}

pub fn cmd_oracle_check(path: &Path, max_blocks: usize) -> Result<String, CliError> {
    let g = load_model(path)?;
    let limits = OracleLimits {
        max_blocks,
        ..OracleLimits::default()
    };
    let mut out = String::new();
    let mut total = 0usize;
    for dir in g.dir_indices() {
        let candidates =
            enumerate_candidates(&g, dir, &limits).map_err(|e| CliError::Domain(e.to_string()))?;
        for cand in &candidates {
            let report = feasibility_equivalence(&g, cand, &limits)
                .map_err(|e| CliError::Domain(e.to_string()))?;
            if !report.agree() {
                return Err(CliError::Domain(format!(
                    "oracle disagreement along {dir} on removal of {} edges",
                    cand.removed.len()
                )));
            }
        }
        total += candidates.len();

        let maximal =
            maximal_removals(&g, dir, &limits).map_err(|e| CliError::Domain(e.to_string()))?;
        let fast = max_pfd(&g, dir);
        if maximal.is_empty() {
            if fast.components.len() != 1 {
                return Err(CliError::Domain(format!(
                    "maximality mismatch along {dir}: fast path split but oracle found no feasible removal"
                )));
            }
            let _ = writeln!(
                out,
                "{dir}: {} candidates, all agree; no feasible decomposition",
                candidates.len()
            );
        } else {
            let mut fast_sorted: Vec<_> = fast.components.iter().cloned().collect();
            fast_sorted.sort();
            for cand in &maximal {
                let ccg = blockplan_core::decompose::build_ccg(&g, &cand.removed, dir)
                    .expect("maximal candidate is a valid removal");
                let mut oracle_sorted: Vec<_> = ccg.nodes.iter().cloned().collect();
                oracle_sorted.sort();
                if oracle_sorted != fast_sorted {
                    return Err(CliError::Domain(format!(
                        "maximality mismatch along {dir}: partitions differ"
                    )));
                }
            }
            let _ = writeln!(
                out,
                "{dir}: {} candidates, all agree; maximal partition matches ({} components, {} maximal removals)",
                candidates.len(),
                fast.components.len(),
                maximal.len()
            );
        }
    }
    let _ = writeln!(out, "all candidates agree ({total} checked)");
    Ok(out)
}
