//! Single-direction decomposition machinery: projection digraphs, strongly
//! connected components, condensation, component connectivity graphs, PFD
//! tests, and the maximal PFD along a direction.
//!
//! The pipeline for one direction is: project the model (add reverse arcs
//! for every edge not on the chosen axis), take strongly connected
//! components, and read the condensation as the component connectivity
//! graph of the finest feasible split. Edges of the axis whose endpoints
//! land in distinct components are exactly the physically removable ones.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::model::{BlockId, ComponentSet, Connection, DirIndex, ModelGraph};

/// A loop-free directed graph over block ids (arcs deduplicated).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    vertices: Vec<BlockId>,
    arcs: BTreeSet<(BlockId, BlockId)>,
}

impl Digraph {
    /// Every arc endpoint must lie in `vertices`; loops are not allowed.
    pub fn new(vertices: BTreeSet<BlockId>, arcs: BTreeSet<(BlockId, BlockId)>) -> Self {
        for &(u, v) in &arcs {
            assert!(u != v, "loop arc on {u}");
            assert!(
                vertices.contains(&u) && vertices.contains(&v),
                "arc endpoint outside the vertex set"
            );
        }
        Digraph {
            vertices: vertices.into_iter().collect(),
            arcs,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Vertices in ascending order.
    pub fn vertices(&self) -> &[BlockId] {
        &self.vertices
    }

    pub fn arcs(&self) -> &BTreeSet<(BlockId, BlockId)> {
        &self.arcs
    }

    pub fn contains_arc(&self, from: BlockId, to: BlockId) -> bool {
        self.arcs.contains(&(from, to))
    }

    /// Vertex ordering with every arc pointing forward, or the witness cycle.
    pub fn topological_order(&self) -> Result<Vec<BlockId>, CycleFound<BlockId>> {
        let index: BTreeMap<BlockId, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let arcs = self
            .arcs
            .iter()
            .map(|&(u, v)| (index[&u], index[&v]))
            .collect();
        match kahn(self.vertices.len(), &arcs) {
            Ok(order) => Ok(order.into_iter().map(|i| self.vertices[i]).collect()),
            Err(cycle) => Err(CycleFound(
                cycle.0.into_iter().map(|i| self.vertices[i]).collect(),
            )),
        }
    }
}

/// A loop-free directed graph over dense indices `0..node_count`, used for
/// condensations and CCG arc structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexDigraph {
    node_count: usize,
    arcs: BTreeSet<(usize, usize)>,
}

impl IndexDigraph {
    pub fn new(node_count: usize, arcs: BTreeSet<(usize, usize)>) -> Self {
        for &(u, v) in &arcs {
            assert!(u != v, "loop arc on {u}");
            assert!(u < node_count && v < node_count, "arc index out of range");
        }
        IndexDigraph { node_count, arcs }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arcs(&self) -> &BTreeSet<(usize, usize)> {
        &self.arcs
    }
}

/// Witness of a directed cycle: a vertex sequence whose consecutive pairs
/// are arcs and whose first and last entries coincide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleFound<T = usize>(pub Vec<T>);

impl<T: fmt::Display> fmt::Display for CycleFound<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.0.iter().map(T::to_string).collect();
        write!(f, "cycle: {}", path.join(" -> "))
    }
}

/// Topological order of an index digraph, smallest index first among ties,
/// or a deterministic witness cycle.
pub fn topological_order(d: &IndexDigraph) -> Result<Vec<usize>, CycleFound> {
    kahn(d.node_count, &d.arcs)
}

fn kahn(n: usize, arcs: &BTreeSet<(usize, usize)>) -> Result<Vec<usize>, CycleFound> {
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for &(u, v) in arcs {
        succ[u].push(v);
        indeg[v] += 1;
    }

    let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(&v) = ready.first() {
        ready.remove(&v);
        order.push(v);
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.insert(w);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }

    // Every leftover node keeps a leftover predecessor, so walking
    // predecessors from the smallest leftover node must revisit one.
    let leftover: BTreeSet<usize> = {
        let placed: BTreeSet<usize> = order.iter().copied().collect();
        (0..n).filter(|v| !placed.contains(v)).collect()
    };
    let pred_of = |v: usize| -> usize {
        arcs.iter()
            .filter(|&&(a, b)| b == v && leftover.contains(&a))
            .map(|&(a, _)| a)
            .next()
            .expect("leftover node with no leftover predecessor")
    };
    let start = *leftover.first().expect("non-empty leftover set");
    let mut back = vec![start];
    let repeated = loop {
        let next = pred_of(*back.last().unwrap());
        if let Some(pos) = back.iter().position(|&x| x == next) {
            break pos;
        }
        back.push(next);
    };
    // back[repeated..] walked backwards is the cycle; flip it forward.
    let mut cycle: Vec<usize> = back[repeated..].to_vec();
    cycle.reverse();
    let min_pos = cycle
        .iter()
        .enumerate()
        .min_by_key(|&(_, v)| v)
        .map(|(i, _)| i)
        .unwrap();
    cycle.rotate_left(min_pos);
    cycle.push(cycle[0]);
    Err(CycleFound(cycle))
}

/// Counts of the work done by strongly-connected-component runs: each run
/// touches every vertex and arc of its input exactly once.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Metrics {
    pub scc_runs: u64,
    pub node_visits: u64,
    pub edge_visits: u64,
}

impl Metrics {
    pub fn work(&self) -> u64 {
        self.node_visits + self.edge_visits
    }
}

/// Projection of the whole model along `dir`: all original arcs plus the
/// reverse of every arc not on `dir`, duplicates collapsed.
pub fn project_along(g: &ModelGraph, dir: DirIndex) -> Digraph {
    project_along_within(g, &g.block_set(), dir)
}

/// Projection of the sub-model induced by `scope` along `dir`.
pub fn project_along_within(g: &ModelGraph, scope: &BTreeSet<BlockId>, dir: DirIndex) -> Digraph {
    let mut arcs = BTreeSet::new();
    for e in g.edges() {
        if !(scope.contains(&e.from) && scope.contains(&e.to)) {
            continue;
        }
        arcs.insert((e.from, e.to));
        if e.dir != dir {
            arcs.insert((e.to, e.from));
        }
    }
    Digraph::new(scope.clone(), arcs)
}

/// Strongly connected components in reverse topological order: every arc
/// between distinct components runs from a later-listed component to an
/// earlier-listed one. Linear in vertices plus arcs.
pub fn strongly_connected_components(d: &Digraph) -> ComponentSet {
    scc_with_metrics(d, &mut Metrics::default())
}

pub(crate) fn scc_with_metrics(d: &Digraph, metrics: &mut Metrics) -> ComponentSet {
    metrics.scc_runs += 1;
    metrics.node_visits += d.vertex_count() as u64;
    metrics.edge_visits += d.arc_count() as u64;

    let n = d.vertex_count();
    let index: BTreeMap<BlockId, usize> = d
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in d.arcs() {
        adj[index[&u]].push(index[&v]);
    }

    let mut state = Tarjan {
        adj: &adj,
        next_index: 0,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        components: Vec::new(),
    };
    for v in 0..n {
        if state.index[v].is_none() {
            state.visit(v);
        }
    }

    let components = state
        .components
        .into_iter()
        .map(|c| c.into_iter().map(|i| d.vertices()[i]).collect())
        .collect();
    ComponentSet::new(components)
}

struct Tarjan<'a> {
    adj: &'a [Vec<usize>],
    next_index: usize,
    index: Vec<Option<usize>>,
    low: Vec<usize>,
    on_stack: Vec<bool>,
    stack: Vec<usize>,
    components: Vec<BTreeSet<usize>>,
}

impl Tarjan<'_> {
    fn visit(&mut self, v: usize) {
        self.index[v] = Some(self.next_index);
        self.low[v] = self.next_index;
        self.next_index += 1;
        self.stack.push(v);
        self.on_stack[v] = true;

        for i in 0..self.adj[v].len() {
            let w = self.adj[v][i];
            if self.index[w].is_none() {
                self.visit(w);
                self.low[v] = self.low[v].min(self.low[w]);
            } else if self.on_stack[w] {
                self.low[v] = self.low[v].min(self.index[w].unwrap());
            }
        }

        if self.low[v] == self.index[v].unwrap() {
            let mut component = BTreeSet::new();
            loop {
                let w = self.stack.pop().expect("scc stack underflow");
                self.on_stack[w] = false;
                component.insert(w);
                if w == v {
                    break;
                }
            }
            self.components.push(component);
        }
    }
}

/// Condensation of `d` given its SCC partition: one node per component,
/// an arc `(i, j)` for every arc of `d` crossing from component `i` to `j`.
/// Always a DAG.
pub fn condense(d: &Digraph, sccs: &ComponentSet) -> IndexDigraph {
    let comp_of: BTreeMap<BlockId, usize> = sccs
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.iter().map(move |&v| (v, i)))
        .collect();
    let arcs = d
        .arcs()
        .iter()
        .map(|&(u, v)| (comp_of[&u], comp_of[&v]))
        .filter(|&(cu, cv)| cu != cv)
        .collect();
    IndexDigraph::new(sccs.len(), arcs)
}

/// Component connectivity graph implied by removing an edge set: the weakly
/// connected components left behind, with an arc `(i, j)` whenever some
/// removed edge starts in component `i` and ends in component `j`. Simple by
/// construction (no loops, no parallel arcs).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ccg {
    pub nodes: ComponentSet,
    pub arcs: BTreeSet<(usize, usize)>,
    pub removed: BTreeSet<Connection>,
    pub dir: DirIndex,
}

impl Ccg {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn index_digraph(&self) -> IndexDigraph {
        IndexDigraph::new(self.nodes.len(), self.arcs.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CcgError {
    EmptyRemoval,
    EdgeNotInDirection(Connection),
}

impl fmt::Display for CcgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CcgError::EmptyRemoval => write!(f, "EmptyRemoval: the removed edge set is empty"),
            CcgError::EdgeNotInDirection(c) => write!(
                f,
                "EdgeNotInDirection: {:?}->{:?} is not an edge of the chosen direction class",
                c.from, c.to
            ),
        }
    }
}

impl std::error::Error for CcgError {}

/// Builds the CCG implied by removing `removed` (a non-empty subset of the
/// model's `dir` edge class). Parallel duplicates of a removed connection are
/// removed with it.
pub fn build_ccg(
    g: &ModelGraph,
    removed: &BTreeSet<Connection>,
    dir: DirIndex,
) -> Result<Ccg, CcgError> {
    build_ccg_within(g, &g.block_set(), removed, dir)
}

/// CCG of the sub-model induced by `scope`; see [`build_ccg`].
pub fn build_ccg_within(
    g: &ModelGraph,
    scope: &BTreeSet<BlockId>,
    removed: &BTreeSet<Connection>,
    dir: DirIndex,
) -> Result<Ccg, CcgError> {
    if removed.is_empty() {
        return Err(CcgError::EmptyRemoval);
    }
    let scoped: BTreeSet<Connection> = g
        .edges()
        .iter()
        .copied()
        .filter(|e| scope.contains(&e.from) && scope.contains(&e.to))
        .collect();
    for &r in removed {
        if r.dir != dir || !scoped.contains(&r) {
            return Err(CcgError::EdgeNotInDirection(r));
        }
    }

    let remaining: Vec<Connection> = scoped
        .iter()
        .copied()
        .filter(|e| !removed.contains(e))
        .collect();
    let nodes = crate::model::weak_components(scope, &remaining);
    let arcs = crossing_arcs(&nodes, removed);
    Ok(Ccg {
        nodes,
        arcs,
        removed: removed.clone(),
        dir,
    })
}

fn crossing_arcs(nodes: &ComponentSet, removed: &BTreeSet<Connection>) -> BTreeSet<(usize, usize)> {
    let comp_of: BTreeMap<BlockId, usize> = nodes
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.iter().map(move |&v| (v, i)))
        .collect();
    removed
        .iter()
        .filter_map(|e| {
            let (cu, cv) = (comp_of[&e.from], comp_of[&e.to]);
            (cu != cv).then_some((cu, cv))
        })
        .collect()
}

/// True when the CCG describes a feasible decomposition: at least two
/// components and no directed cycle.
pub fn is_pfd(c: &Ccg) -> bool {
    c.node_count() >= 2 && topological_order(&c.index_digraph()).is_ok()
}

/// True for the two-component base case: exactly two nodes joined by exactly
/// one arc, i.e. the components separate along a single pull direction.
pub fn is_2pfd(c: &Ccg) -> bool {
    c.node_count() == 2 && c.arcs.len() == 1
}

/// Result of the finest feasible decomposition along one direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxPfdResult {
    /// Components in topological order of the CCG: first listed detaches first.
    pub components: ComponentSet,
    /// The physically removable edges: members of the direction class whose
    /// endpoints fall in distinct components. Empty iff one component.
    pub removed: BTreeSet<Connection>,
    /// CCG over `components` (node order matches).
    pub ccg: Ccg,
}

/// Maximal PFD of the whole model along `dir`.
pub fn max_pfd(g: &ModelGraph, dir: DirIndex) -> MaxPfdResult {
    max_pfd_within(g, &g.block_set(), dir)
}

/// Maximal PFD of the sub-model induced by `scope` along `dir`. The scope
/// must be weakly connected: the whole model, or one component of a parent
/// split.
///
/// The components are the strongly connected components of the scoped
/// projection, reversed into topological order. A single-vertex scope (or
/// any scope that does not separate) yields one component and an empty
/// removal set.
pub fn max_pfd_within(g: &ModelGraph, scope: &BTreeSet<BlockId>, dir: DirIndex) -> MaxPfdResult {
    max_pfd_within_metrics(g, scope, dir, &mut Metrics::default())
}

pub(crate) fn max_pfd_within_metrics(
    g: &ModelGraph,
    scope: &BTreeSet<BlockId>,
    dir: DirIndex,
    metrics: &mut Metrics,
) -> MaxPfdResult {
    let projection = project_along_within(g, scope, dir);
    let sccs = scc_with_metrics(&projection, metrics);

    let mut ordered: Vec<BTreeSet<BlockId>> = sccs.iter().cloned().collect();
    ordered.reverse();
    let components = ComponentSet::new(ordered);

    let comp_of: BTreeMap<BlockId, usize> = components
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.iter().map(move |&v| (v, i)))
        .collect();
    let removed: BTreeSet<Connection> = g
        .edges()
        .iter()
        .copied()
        .filter(|e| {
            e.dir == dir
                && scope.contains(&e.from)
                && scope.contains(&e.to)
                && comp_of[&e.from] != comp_of[&e.to]
        })
        .collect();

    let arcs = crossing_arcs(&components, &removed);
    MaxPfdResult {
        components: components.clone(),
        removed: removed.clone(),
        ccg: Ccg {
            nodes: components,
            arcs,
            removed,
            dir,
        },
    }
}

/// The edges of the direction class that actively separate components in the
/// maximal PFD along `dir`.
pub fn physically_removable_edges(g: &ModelGraph, dir: DirIndex) -> BTreeSet<Connection> {
    max_pfd(g, dir).removed
}
