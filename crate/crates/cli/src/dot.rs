//! Graphviz dot renderings of the model, its projections, single-direction
//! CCGs, and the decomposition tree. All output is deterministic: blocks in
//! source-id order, arcs in sorted order, tree nodes in preorder.

use std::fmt::Write;

use blockplan_core::decompose::{max_pfd, project_along};
use blockplan_core::hierarchy::{h_max_pfd, PfdTree};
use blockplan_core::model::{DirIndex, ModelGraph};

fn block_label(g: &ModelGraph, id: blockplan_core::model::BlockId) -> String {
    let block = g.block(id);
    match &block.label {
        Some(label) => format!("{}: {}", block.source_id, label),
        None => block.source_id.to_string(),
    }
}

fn block_nodes(g: &ModelGraph, out: &mut String) {
    for id in g.block_ids() {
        let _ = writeln!(
            out,
            "  b{} [label=\"{}\"];",
            g.block(id).source_id,
            block_label(g, id)
        );
    }
}

/// The model multigraph with direction-labeled edges.
pub fn model_dot(g: &ModelGraph) -> String {
    let mut out = String::from("digraph model {\n");
    if g.direction_count() > 0 {
        let legend: Vec<String> = g
            .dir_indices()
            .map(|d| format!("{}={}", d, g.direction(d)))
            .collect();
        let _ = writeln!(out, "  // directions: {}", legend.join(" "));
    }
    block_nodes(g, &mut out);
    for e in g.edges() {
        let _ = writeln!(
            out,
            "  b{} -> b{} [label=\"{}\"];",
            g.block(e.from).source_id,
            g.block(e.to).source_id,
            e.dir
        );
    }
    out.push_str("}\n");
    out
}

/// The projection digraph along one direction.
pub fn projection_dot(g: &ModelGraph, dir: DirIndex) -> String {
    let mut out = format!("digraph projection_{dir} {{\n");
    block_nodes(g, &mut out);
    let projection = project_along(g, dir);
    for &(u, v) in projection.arcs() {
        let _ = writeln!(
            out,
            "  b{} -> b{};",
            g.block(u).source_id,
            g.block(v).source_id
        );
    }
    out.push_str("}\n");
    out
}

/// The CCG of the maximal PFD along one direction.
pub fn ccg_dot(g: &ModelGraph, dir: DirIndex) -> String {
    let result = max_pfd(g, dir);
    let mut out = format!("digraph ccg_{dir} {{\n");
    for (i, comp) in result.ccg.nodes.iter().enumerate() {
        let _ = writeln!(out, "  c{i} [label=\"{}\"];", g.format_block_set(comp));
    }
    for &(i, j) in &result.ccg.arcs {
        let _ = writeln!(out, "  c{i} -> c{j};");
    }
    out.push_str("}\n");
    out
}

/// The hierarchical decomposition tree; internal nodes show their split
/// direction.
pub fn tree_dot(g: &ModelGraph) -> String {
    let tree = h_max_pfd(g);
    let mut out = String::from("digraph tree {\n");
    let mut edges = Vec::new();
    let mut counter = 0usize;
    walk(g, &tree, &mut counter, &mut out, &mut edges);
    edges.sort_unstable();
    for (parent, child) in edges {
        let _ = writeln!(out, "  n{parent} -> n{child};");
    }
    out.push_str("}\n");
    out
}

fn walk(
    g: &ModelGraph,
    t: &PfdTree,
    counter: &mut usize,
    nodes: &mut String,
    edges: &mut Vec<(usize, usize)>,
) -> usize {
    let id = *counter;
    *counter += 1;
    let label = match (t.split_dir(), t.is_stuck()) {
        (Some(dir), _) => format!("{} / {dir}", g.format_block_set(t.node())),
        (None, true) => format!("{} stuck", g.format_block_set(t.node())),
        (None, false) => g.format_block_set(t.node()),
    };
    let _ = writeln!(nodes, "  n{id} [label=\"{label}\"];");
    for child in t.children() {
        let child_id = walk(g, child, counter, nodes, edges);
        edges.push((id, child_id));
    }
    id
}
