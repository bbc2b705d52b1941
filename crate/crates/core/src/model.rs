//! The model graph: blocks, canonical directions, direction-labeled
//! connections, ingestion validation, and basic connectivity queries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::union_find::UnionFind;

/// Dense internal block index, `0..n-1` after ingestion normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockId(pub usize);

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Index into a model's direction list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DirIndex(pub usize);

impl fmt::Display for DirIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d{}", self.0)
    }
}

/// A spatial axis, stored as a canonical integer 3-vector: components divided
/// by their gcd, first nonzero component positive. Two antiparallel input
/// vectors canonicalize to the same `Direction`; the sign is absorbed into
/// the orientation of the edges that reference it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Direction([i64; 3]);

impl Direction {
    /// Canonicalizes a raw integer vector. Returns the canonical direction
    /// plus `true` when the input pointed opposite to it (edges referencing
    /// the raw vector must then be reversed). `None` for the zero vector,
    /// or if the canonical form is unrepresentable (a component of
    /// `i64::MIN` whose negation overflows).
    pub fn canonical(v: [i64; 3]) -> Option<(Direction, bool)> {
        if v == [0, 0, 0] {
            return None;
        }
        let g = v.iter().map(|&c| c.unsigned_abs()).fold(0u64, gcd) as i128;
        let mut wide = v.map(|c| c as i128 / g);
        let flipped = wide.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0);
        if flipped {
            for c in &mut wide {
                *c = -*c;
            }
        }
        let mut out = [0i64; 3];
        for (o, c) in out.iter_mut().zip(wide) {
            *o = i64::try_from(c).ok()?;
        }
        Some((Direction(out), flipped))
    }

    pub fn components(&self) -> [i64; 3] {
        self.0
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A single block-to-block connection, oriented so that the physical vector
/// from `from` to `to` equals the direction it references.
///
/// This is a pure key: parallel duplicate connections share one `Connection`
/// value. Per-connection metadata stays on the owning [`ModelGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Connection {
    pub from: BlockId,
    pub to: BlockId,
    pub dir: DirIndex,
}

impl Connection {
    pub fn new(from: BlockId, to: BlockId, dir: DirIndex) -> Self {
        Connection { from, to, dir }
    }
}

/// A block of the normalized model. The dense [`BlockId`] is its position in
/// the model's block list; `source_id` is the identifier it had in the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub source_id: u64,
    pub label: Option<String>,
    pub meta: Option<String>,
}

/// Pre-validation model description, as parsed from an external source.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawModel {
    pub directions: Vec<[i64; 3]>,
    pub blocks: Vec<RawBlock>,
    pub connections: Vec<RawConnection>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawBlock {
    pub id: u64,
    pub label: Option<String>,
    pub meta: Option<String>,
}

impl RawBlock {
    pub fn new(id: u64) -> Self {
        RawBlock {
            id,
            label: None,
            meta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawConnection {
    pub from: u64,
    pub to: u64,
    pub direction: usize,
    pub meta: Option<String>,
}

impl RawConnection {
    pub fn new(from: u64, to: u64, direction: usize) -> Self {
        RawConnection {
            from,
            to,
            direction,
            meta: None,
        }
    }
}

/// Ingestion diagnostics produced by [`validate_model`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    EmptyModel,
    DuplicateBlockId { id: u64 },
    ZeroDirection { index: usize },
    DirectionOutOfRange { index: usize },
    LoopEdge { block: u64 },
    UnknownBlockRef { connection: usize, id: u64 },
    UnknownDirectionRef { connection: usize, index: usize },
    DisconnectedModel { pieces: usize },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::EmptyModel => write!(f, "EmptyModel: model has no blocks"),
            ModelError::DuplicateBlockId { id } => {
                write!(f, "DuplicateBlockId: block {id} declared more than once")
            }
            ModelError::ZeroDirection { index } => {
                write!(f, "ZeroDirection: direction {index} is the zero vector")
            }
            ModelError::DirectionOutOfRange { index } => {
                write!(
                    f,
                    "DirectionOutOfRange: direction {index} has a component out of range"
                )
            }
            ModelError::LoopEdge { block } => write!(f, "LoopEdge: block {block}"),
            ModelError::UnknownBlockRef { connection, id } => {
                write!(
                    f,
                    "UnknownBlockRef: connection {connection} references block {id}"
                )
            }
            ModelError::UnknownDirectionRef { connection, index } => write!(
                f,
                "UnknownDirectionRef: connection {connection} references direction {index}"
            ),
            ModelError::DisconnectedModel { pieces } => write!(
                f,
                "DisconnectedModel: model splits into {pieces} disconnected pieces"
            ),
        }
    }
}

impl std::error::Error for ModelError {}

/// Largest direction component magnitude accepted by validation. Keeps
/// canonicalization overflow-free on any accepted input.
pub const MAX_DIRECTION_COMPONENT: i64 = i32::MAX as i64;

/// The normalized model graph: vertices are blocks, edges are connections
/// partitioned by direction axis.
///
/// Normalization guarantees: blocks sorted by `source_id` and indexed
/// densely; directions canonical and pairwise distinct; every stored edge
/// oriented to agree with its direction (`+Direction` convention); edges
/// sorted by `(dir, from, to)`; underlying undirected graph weakly connected.
/// Parallel duplicate edges are kept (multigraph) but count as a single
/// adjacency for every connectivity question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelGraph {
    blocks: Vec<Block>,
    directions: Vec<Direction>,
    edges: Vec<Connection>,
    edge_meta: Vec<Option<String>>,
}

impl ModelGraph {
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn direction_count(&self) -> usize {
        self.directions.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, id: BlockId) -> &Block {
        &self.blocks[id.0]
    }

    pub fn block_ids(&self) -> impl Iterator<Item = BlockId> + '_ {
        (0..self.blocks.len()).map(BlockId)
    }

    pub fn block_set(&self) -> BTreeSet<BlockId> {
        self.block_ids().collect()
    }

    pub fn block_by_source(&self, source_id: u64) -> Option<BlockId> {
        self.blocks
            .binary_search_by_key(&source_id, |b| b.source_id)
            .ok()
            .map(BlockId)
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn direction(&self, dir: DirIndex) -> Direction {
        self.directions[dir.0]
    }

    pub fn dir_indices(&self) -> impl Iterator<Item = DirIndex> + '_ {
        (0..self.directions.len()).map(DirIndex)
    }

    /// All stored connections, duplicates included, sorted by `(dir, from, to)`.
    pub fn edges(&self) -> &[Connection] {
        &self.edges
    }

    /// Metadata of every stored edge equal to `key` (one entry per duplicate).
    pub fn connection_meta(&self, key: Connection) -> Vec<&str> {
        self.edges
            .iter()
            .zip(&self.edge_meta)
            .filter(|(e, _)| **e == key)
            .filter_map(|(_, m)| m.as_deref())
            .collect()
    }

    pub fn edge_metas(&self) -> &[Option<String>] {
        &self.edge_meta
    }

    /// Renders a block for user-facing output by its source id.
    pub fn block_name(&self, id: BlockId) -> String {
        self.block(id).source_id.to_string()
    }

    /// Renders a block set as `[a,b,c]` using source ids, ascending.
    pub fn format_block_set(&self, set: &BTreeSet<BlockId>) -> String {
        let names: Vec<String> = set.iter().map(|&b| self.block_name(b)).collect();
        format!("[{}]", names.join(","))
    }

    /// Renders a connection as `from->to` using source ids.
    pub fn format_connection(&self, c: Connection) -> String {
        format!("{}->{}", self.block_name(c.from), self.block_name(c.to))
    }

    /// Inverse of ingestion: a raw description that validates back to `self`.
    pub fn to_raw(&self) -> RawModel {
        RawModel {
            directions: self.directions.iter().map(|d| d.components()).collect(),
            blocks: self
                .blocks
                .iter()
                .map(|b| RawBlock {
                    id: b.source_id,
                    label: b.label.clone(),
                    meta: b.meta.clone(),
                })
                .collect(),
            connections: self
                .edges
                .iter()
                .zip(&self.edge_meta)
                .map(|(e, m)| RawConnection {
                    from: self.block(e.from).source_id,
                    to: self.block(e.to).source_id,
                    direction: e.dir.0,
                    meta: m.clone(),
                })
                .collect(),
        }
    }
}

/// Validates and normalizes a raw model description.
///
/// Normalization compacts block ids to `0..n-1` (sorted by source id),
/// canonicalizes and deduplicates directions, and reorients every connection
/// to the `+Direction` convention. Models whose underlying undirected graph
/// is not weakly connected are rejected. On failure returns every diagnostic
/// found, not just the first.
pub fn validate_model(raw: &RawModel) -> Result<ModelGraph, Vec<ModelError>> {
    let mut errors = Vec::new();

    if raw.blocks.is_empty() {
        return Err(vec![ModelError::EmptyModel]);
    }

    // Blocks: unique source ids, dense index by ascending source id.
    let mut sorted: Vec<&RawBlock> = raw.blocks.iter().collect();
    sorted.sort_by_key(|b| b.id);
    for pair in sorted.windows(2) {
        if pair[0].id == pair[1].id {
            errors.push(ModelError::DuplicateBlockId { id: pair[0].id });
        }
    }
    let index_of: BTreeMap<u64, usize> =
        sorted.iter().enumerate().map(|(i, b)| (b.id, i)).collect();

    // Directions: canonicalize, record per-raw-index flip, merge duplicates.
    let mut directions: Vec<Direction> = Vec::new();
    let mut dir_map: Vec<Option<(DirIndex, bool)>> = Vec::with_capacity(raw.directions.len());
    for (i, &v) in raw.directions.iter().enumerate() {
        if v.iter().any(|&c| c.abs() > MAX_DIRECTION_COMPONENT) {
            errors.push(ModelError::DirectionOutOfRange { index: i });
            dir_map.push(None);
            continue;
        }
        match Direction::canonical(v) {
            Some((canon, flipped)) => {
                let idx = directions
                    .iter()
                    .position(|&d| d == canon)
                    .unwrap_or_else(|| {
                        directions.push(canon);
                        directions.len() - 1
                    });
                dir_map.push(Some((DirIndex(idx), flipped)));
            }
            None => {
                errors.push(ModelError::ZeroDirection { index: i });
                dir_map.push(None);
            }
        }
    }

    // Connections: resolve endpoints and directions, reorient flipped axes.
    let mut edges: Vec<(Connection, Option<String>)> = Vec::with_capacity(raw.connections.len());
    for (ci, c) in raw.connections.iter().enumerate() {
        let mut ok = true;
        for endpoint in [c.from, c.to] {
            if !index_of.contains_key(&endpoint) {
                errors.push(ModelError::UnknownBlockRef {
                    connection: ci,
                    id: endpoint,
                });
                ok = false;
            }
        }
        if c.from == c.to {
            errors.push(ModelError::LoopEdge { block: c.from });
            ok = false;
        }
        let dir = match dir_map.get(c.direction) {
            Some(&Some(mapped)) => Some(mapped),
            Some(&None) => None, // already diagnosed on the direction itself
            None => {
                errors.push(ModelError::UnknownDirectionRef {
                    connection: ci,
                    index: c.direction,
                });
                None
            }
        };
        let (Some((dir, flipped)), true) = (dir, ok) else {
            continue;
        };
        let from = BlockId(index_of[&c.from]);
        let to = BlockId(index_of[&c.to]);
        let conn = if flipped {
            Connection::new(to, from, dir)
        } else {
            Connection::new(from, to, dir)
        };
        edges.push((conn, c.meta.clone()));
    }

    // Weak connectivity over the whole model; only meaningful once every
    // reference resolved.
    if errors.is_empty() {
        let n = sorted.len();
        let mut uf = UnionFind::new(n);
        let mut pieces = n;
        for (e, _) in &edges {
            if uf.union(e.from.0, e.to.0) {
                pieces -= 1;
            }
        }
        if pieces > 1 {
            errors.push(ModelError::DisconnectedModel { pieces });
        }
    }

    if !errors.is_empty() {
        return Err(errors);
    }

    edges.sort_by(|a, b| (a.0.dir, a.0.from, a.0.to, &a.1).cmp(&(b.0.dir, b.0.from, b.0.to, &b.1)));
    let (edges, edge_meta) = edges.into_iter().unzip();

    Ok(ModelGraph {
        blocks: sorted
            .into_iter()
            .map(|b| Block {
                source_id: b.id,
                label: b.label.clone(),
                meta: b.meta.clone(),
            })
            .collect(),
        directions,
        edges,
        edge_meta,
    })
}

/// Groups a model's edges by direction index. Every direction gets a key,
/// including directions with no edges; duplicates are preserved.
pub fn partition_edges(g: &ModelGraph) -> BTreeMap<DirIndex, Vec<Connection>> {
    let mut map: BTreeMap<DirIndex, Vec<Connection>> =
        g.dir_indices().map(|d| (d, Vec::new())).collect();
    for &e in g.edges() {
        map.get_mut(&e.dir).expect("edge dir within bounds").push(e);
    }
    map
}

/// A list of disjoint non-empty block sets covering some vertex set.
///
/// The component order carries meaning and is part of equality: producers
/// document whether it is smallest-member order ([`weak_components`]) or a
/// topological order ([`crate::decompose::max_pfd`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSet {
    components: Vec<BTreeSet<BlockId>>,
}

impl ComponentSet {
    pub fn new(components: Vec<BTreeSet<BlockId>>) -> Self {
        ComponentSet { components }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn get(&self, i: usize) -> &BTreeSet<BlockId> {
        &self.components[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &BTreeSet<BlockId>> {
        self.components.iter()
    }

    pub fn as_slice(&self) -> &[BTreeSet<BlockId>] {
        &self.components
    }

    /// Index of the component containing `v`, if any.
    pub fn find(&self, v: BlockId) -> Option<usize> {
        self.components.iter().position(|c| c.contains(&v))
    }

    /// True when the components are pairwise disjoint, non-empty, and their
    /// union equals `vertices`.
    pub fn is_partition_of(&self, vertices: &BTreeSet<BlockId>) -> bool {
        let mut seen = BTreeSet::new();
        for c in &self.components {
            if c.is_empty() {
                return false;
            }
            for &v in c {
                if !seen.insert(v) {
                    return false;
                }
            }
        }
        seen == *vertices
    }
}

impl<'a> IntoIterator for &'a ComponentSet {
    type Item = &'a BTreeSet<BlockId>;
    type IntoIter = std::slice::Iter<'a, BTreeSet<BlockId>>;

    fn into_iter(self) -> Self::IntoIter {
        self.components.iter()
    }
}

/// Partitions `vertices` into maximal sets mutually reachable by undirected
/// paths over `edges`. Components are ordered by their smallest member.
///
/// Every edge endpoint must lie in `vertices`.
pub fn weak_components(vertices: &BTreeSet<BlockId>, edges: &[Connection]) -> ComponentSet {
    let verts: Vec<BlockId> = vertices.iter().copied().collect();
    let local: BTreeMap<BlockId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(verts.len());
    for e in edges {
        let (Some(&a), Some(&b)) = (local.get(&e.from), local.get(&e.to)) else {
            panic!("edge endpoint outside the vertex set");
        };
        uf.union(a, b);
    }
    let mut groups: BTreeMap<usize, BTreeSet<BlockId>> = BTreeMap::new();
    for (i, &v) in verts.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().insert(v);
    }
    let mut components: Vec<BTreeSet<BlockId>> = groups.into_values().collect();
    // BTreeSet iteration starts at the minimum, so first() is the key.
    components.sort_by_key(|c| *c.first().expect("non-empty component"));
    ComponentSet::new(components)
}
