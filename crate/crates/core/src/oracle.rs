//! Brute-force feasibility oracle.
//!
//! Re-implements the recursive definition of a k-way feasible decomposition
//! literally: search for a subset of the removed edges whose removal is a
//! two-way split with all connections on one side (the exactly-one-arc
//! condition), then recurse on the halves. Exponential in the removed edge
//! count and guarded by hard size limits; this is a test instrument for the
//! linear-time path in [`crate::decompose`], not a production code path.
//!
//! Throughout, parallel duplicate connections collapse to one key: removing
//! a connection removes the whole adjacency, matching the fast path.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::decompose::{build_ccg, is_pfd, topological_order, IndexDigraph};
use crate::model::{weak_components, BlockId, Connection, DirIndex, ModelGraph};

/// Hard size limits for the exponential search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_blocks: usize,
    pub max_dir_edges: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_blocks: 12,
            max_dir_edges: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceTooLarge {
    pub blocks: usize,
    pub dir_edges: usize,
    pub limits: OracleLimits,
}

impl fmt::Display for InstanceTooLarge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "InstanceTooLarge: {} blocks, {} edges on the direction (guard: {} blocks, {} edges)",
            self.blocks, self.dir_edges, self.limits.max_blocks, self.limits.max_dir_edges
        )
    }
}

impl std::error::Error for InstanceTooLarge {}

/// A proposed removal: a non-empty set of connection keys from one
/// direction class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovalCandidate {
    pub dir: DirIndex,
    pub removed: BTreeSet<Connection>,
}

fn dir_keys(g: &ModelGraph, dir: DirIndex) -> Vec<Connection> {
    let keys: BTreeSet<Connection> = g.edges().iter().copied().filter(|e| e.dir == dir).collect();
    keys.into_iter().collect()
}

fn guard(g: &ModelGraph, dir: DirIndex, limits: &OracleLimits) -> Result<(), InstanceTooLarge> {
    let dir_edges = dir_keys(g, dir).len();
    if g.block_count() > limits.max_blocks || dir_edges > limits.max_dir_edges {
        return Err(InstanceTooLarge {
            blocks: g.block_count(),
            dir_edges,
            limits: *limits,
        });
    }
    Ok(())
}

/// Every non-empty removal candidate along `dir`, smallest sets first.
pub fn enumerate_candidates(
    g: &ModelGraph,
    dir: DirIndex,
    limits: &OracleLimits,
) -> Result<Vec<RemovalCandidate>, InstanceTooLarge> {
    guard(g, dir, limits)?;
    let keys = dir_keys(g, dir);
    let mut out = Vec::with_capacity((1usize << keys.len()) - 1);
    for mask in 1u32..(1u32 << keys.len()) {
        out.push(RemovalCandidate {
            dir,
            removed: subset(&keys, mask),
        });
    }
    out.sort_by_key(|c| (c.removed.len(), c.removed.clone()));
    Ok(out)
}

fn subset(keys: &[Connection], mask: u32) -> BTreeSet<Connection> {
    keys.iter()
        .enumerate()
        .filter(|&(i, _)| mask & (1 << i) != 0)
        .map(|(_, &k)| k)
        .collect()
}

/// Decides by exhaustive recursion whether the candidate removal is a
/// physically feasible decomposition into as many components as it creates.
///
/// Removed edges whose endpoints end up inside one final component are
/// unused but harmless, like an axis edge trapped inside a sub-assembly.
pub fn is_kpfd_recursive(
    g: &ModelGraph,
    cand: &RemovalCandidate,
    limits: &OracleLimits,
) -> Result<bool, InstanceTooLarge> {
    guard(g, cand.dir, limits)?;
    let all_keys: BTreeSet<Connection> = dir_keys(g, cand.dir).into_iter().collect();
    assert!(!cand.removed.is_empty(), "empty removal candidate");
    assert!(
        cand.removed.is_subset(&all_keys),
        "candidate edges outside the direction class"
    );

    let edge_keys: BTreeSet<Connection> = g.edges().iter().copied().collect();
    let mut search = KpfdSearch {
        edge_keys,
        memo: HashMap::new(),
    };
    Ok(search.is_kpfd(&g.block_set(), &cand.removed))
}

struct KpfdSearch {
    edge_keys: BTreeSet<Connection>,
    memo: HashMap<(Vec<BlockId>, Vec<Connection>), bool>,
}

impl KpfdSearch {
    fn induced(&self, scope: &BTreeSet<BlockId>) -> Vec<Connection> {
        self.edge_keys
            .iter()
            .copied()
            .filter(|e| scope.contains(&e.from) && scope.contains(&e.to))
            .collect()
    }

    fn components_without(
        &self,
        scope: &BTreeSet<BlockId>,
        removed: &BTreeSet<Connection>,
    ) -> Vec<BTreeSet<BlockId>> {
        let remaining: Vec<Connection> = self
            .induced(scope)
            .into_iter()
            .filter(|e| !removed.contains(e))
            .collect();
        weak_components(scope, &remaining).as_slice().to_vec()
    }

    fn is_kpfd(&mut self, scope: &BTreeSet<BlockId>, removed: &BTreeSet<Connection>) -> bool {
        let key = (
            scope.iter().copied().collect::<Vec<_>>(),
            removed.iter().copied().collect::<Vec<_>>(),
        );
        if let Some(&hit) = self.memo.get(&key) {
            return hit;
        }
        let finals = self.components_without(scope, removed);
        let k = finals.len();
        let result = k >= 2 && self.search_split(scope, removed, &finals, k);
        self.memo.insert(key, result);
        result
    }

    /// Searches for a sub-removal realizing the first two-way split of the
    /// recursive definition, then checks one of its four continuation cases.
    fn search_split(
        &mut self,
        scope: &BTreeSet<BlockId>,
        removed: &BTreeSet<Connection>,
        finals: &[BTreeSet<BlockId>],
        k: usize,
    ) -> bool {
        let removed_list: Vec<Connection> = removed.iter().copied().collect();
        for mask in 1u32..(1u32 << removed_list.len()) {
            let sub = subset(&removed_list, mask);
            let halves = self.components_without(scope, &sub);
            if halves.len() != 2 {
                continue;
            }
            let (c1, c2) = (&halves[0], &halves[1]);
            // Exactly-one-arc condition for a feasible two-way split: all
            // severed connections must point from one side to the other.
            let mut forward = false;
            let mut backward = false;
            for e in &sub {
                match (c1.contains(&e.from), c1.contains(&e.to)) {
                    (true, false) => forward = true,
                    (false, true) => backward = true,
                    _ => {}
                }
            }
            if forward == backward {
                continue;
            }

            let rest: BTreeSet<Connection> = removed.difference(&sub).copied().collect();
            let rest1: BTreeSet<Connection> = rest
                .iter()
                .copied()
                .filter(|e| c1.contains(&e.from))
                .collect();
            let rest2: BTreeSet<Connection> = rest
                .iter()
                .copied()
                .filter(|e| c2.contains(&e.from))
                .collect();

            let c1_final = finals.contains(c1);
            let c2_final = finals.contains(c2);
            let ok = match (c1_final, c2_final) {
                (true, true) => k == 2,
                (true, false) => self.continues_as(c2, &rest2, k - 1),
                (false, true) => self.continues_as(c1, &rest1, k - 1),
                (false, false) => {
                    let k1 = self.components_without(c1, &rest1).len();
                    let k2 = self.components_without(c2, &rest2).len();
                    k1 >= 2
                        && k2 >= 2
                        && k1 + k2 == k
                        && self.is_kpfd(c1, &rest1)
                        && self.is_kpfd(c2, &rest2)
                }
            };
            if ok {
                return true;
            }
        }
        false
    }

    fn continues_as(
        &mut self,
        side: &BTreeSet<BlockId>,
        rest: &BTreeSet<Connection>,
        k_needed: usize,
    ) -> bool {
        if rest.is_empty() || k_needed < 2 {
            return false;
        }
        self.components_without(side, rest).len() == k_needed && self.is_kpfd(side, rest)
    }
}

/// Side-by-side verdicts of the recursive definition and the acyclicity
/// test on the candidate's CCG. The two characterizations always agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub recursive: bool,
    pub dag: bool,
}

impl EquivalenceReport {
    pub fn agree(&self) -> bool {
        self.recursive == self.dag
    }
}

pub fn feasibility_equivalence(
    g: &ModelGraph,
    cand: &RemovalCandidate,
    limits: &OracleLimits,
) -> Result<EquivalenceReport, InstanceTooLarge> {
    let recursive = is_kpfd_recursive(g, cand, limits)?;
    let ccg = build_ccg(g, &cand.removed, cand.dir).expect("candidate is a valid removal");
    Ok(EquivalenceReport {
        recursive,
        dag: is_pfd(&ccg),
    })
}

/// Enumerates every feasible removal along `dir` whose component partition
/// no other feasible removal strictly refines.
///
/// Maximality must compare against all feasible removals, not only
/// supersets of the candidate: a removal that includes an antiparallel edge
/// pair can be unrefinable by supersets (separating that pair ever after
/// yields a cyclic CCG) while a finer feasible partition still exists via a
/// different removal. All returned candidates share one partition, the
/// unique finest feasible one, which the fast path computes directly.
pub fn maximal_removals(
    g: &ModelGraph,
    dir: DirIndex,
    limits: &OracleLimits,
) -> Result<Vec<RemovalCandidate>, InstanceTooLarge> {
    guard(g, dir, limits)?;
    let keys = dir_keys(g, dir);
    let e = keys.len();
    if e == 0 {
        return Ok(Vec::new());
    }

    let scope = g.block_set();
    let edge_keys: BTreeSet<Connection> = g.edges().iter().copied().collect();
    let n_masks = 1usize << e;

    // Partition and feasibility per removal subset, with partitions
    // interned so the refinement scan below is over distinct values only.
    type Partition = Vec<BTreeSet<BlockId>>;
    let mut intern: HashMap<Partition, u32> = HashMap::new();
    let mut partitions: Vec<Partition> = Vec::new();
    let mut part_id = vec![0u32; n_masks];
    let mut feasible = vec![false; n_masks];
    for mask in 0..n_masks {
        let removed = subset(&keys, mask as u32);
        let remaining: Vec<Connection> = edge_keys
            .iter()
            .copied()
            .filter(|k| (k.dir != dir) || !removed.contains(k))
            .collect();
        let comps = weak_components(&scope, &remaining);
        let mut arcs: BTreeSet<(usize, usize)> = BTreeSet::new();
        for r in &removed {
            let (cu, cv) = (
                comps.find(r.from).expect("endpoint in scope"),
                comps.find(r.to).expect("endpoint in scope"),
            );
            if cu != cv {
                arcs.insert((cu, cv));
            }
        }
        let dag = topological_order(&IndexDigraph::new(comps.len(), arcs)).is_ok();
        feasible[mask] = comps.len() >= 2 && dag;
        let partition: Partition = comps.as_slice().to_vec();
        part_id[mask] = *intern.entry(partition.clone()).or_insert_with(|| {
            partitions.push(partition);
            (partitions.len() - 1) as u32
        });
    }

    fn refines(fine: &[BTreeSet<BlockId>], coarse: &[BTreeSet<BlockId>]) -> bool {
        fine.iter().all(|c| coarse.iter().any(|d| c.is_subset(d)))
    }

    let feasible_ids: BTreeSet<u32> = (1..n_masks)
        .filter(|&m| feasible[m])
        .map(|m| part_id[m])
        .collect();
    let maximal_ids: BTreeSet<u32> = feasible_ids
        .iter()
        .copied()
        .filter(|&id| {
            feasible_ids.iter().all(|&other| {
                other == id
                    || !refines(&partitions[other as usize], &partitions[id as usize])
                    || refines(&partitions[id as usize], &partitions[other as usize])
            })
        })
        .collect();

    let out = (1..n_masks)
        .filter(|&m| feasible[m] && maximal_ids.contains(&part_id[m]))
        .map(|m| RemovalCandidate {
            dir,
            removed: subset(&keys, m as u32),
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::max_pfd;
    use crate::fixtures;

    fn all_dir_edges(g: &ModelGraph, dir: usize) -> RemovalCandidate {
        RemovalCandidate {
            dir: DirIndex(dir),
            removed: g
                .edges()
                .iter()
                .copied()
                .filter(|e| e.dir == DirIndex(dir))
                .collect(),
        }
    }

    #[test]
    fn full_axis_removals_of_five_block_model() {
        let g = fixtures::five_block();
        let limits = OracleLimits::default();

        let horizontal = all_dir_edges(&g, 0);
        assert_eq!(is_kpfd_recursive(&g, &horizontal, &limits), Ok(true));

        let vertical = all_dir_edges(&g, 1);
        assert_eq!(is_kpfd_recursive(&g, &vertical, &limits), Ok(false));
    }

    #[test]
    fn two_block_base_case() {
        let g = fixtures::two_block();
        let cand = all_dir_edges(&g, 0);
        assert_eq!(
            is_kpfd_recursive(&g, &cand, &OracleLimits::default()),
            Ok(true)
        );
    }

    #[test]
    fn equivalence_reports_agree_on_the_five_block_model() {
        let g = fixtures::five_block();
        let limits = OracleLimits::default();

        let report = feasibility_equivalence(&g, &all_dir_edges(&g, 0), &limits).unwrap();
        assert_eq!((report.recursive, report.dag), (true, true));

        let report = feasibility_equivalence(&g, &all_dir_edges(&g, 1), &limits).unwrap();
        assert_eq!((report.recursive, report.dag), (false, false));
        assert!(report.agree());
    }

    #[test]
    fn equivalence_agreement_is_exhaustive_on_the_five_block_model() {
        let g = fixtures::five_block();
        let limits = OracleLimits::default();
        for dir in g.dir_indices() {
            for cand in enumerate_candidates(&g, dir, &limits).unwrap() {
                let report = feasibility_equivalence(&g, &cand, &limits).unwrap();
                assert!(report.agree(), "disagreement on {cand:?}");
            }
        }
    }

    #[test]
    fn maximal_removals_of_five_block_model() {
        let g = fixtures::five_block();
        let limits = OracleLimits::default();

        let maximal = maximal_removals(&g, DirIndex(0), &limits).unwrap();
        let fast = max_pfd(&g, DirIndex(0));
        assert!(!maximal.is_empty());
        for cand in &maximal {
            assert!(cand.removed.is_superset(&fast.removed));
            let ccg = build_ccg(&g, &cand.removed, DirIndex(0)).unwrap();
            assert_eq!(ccg.nodes.as_slice(), fast.components.as_slice());
        }
        // The physically removable set itself and its extension by the
        // trapped axis edge are both maximal; nothing else is.
        assert_eq!(maximal.len(), 2);

        assert_eq!(maximal_removals(&g, DirIndex(1), &limits).unwrap(), vec![]);
    }

    #[test]
    fn maximal_removal_of_two_block_model() {
        let g = fixtures::two_block();
        let maximal = maximal_removals(&g, DirIndex(0), &OracleLimits::default()).unwrap();
        assert_eq!(maximal.len(), 1);
        assert_eq!(maximal[0].removed.len(), 1);
    }

    #[test]
    fn guard_rejects_large_instances() {
        let g = fixtures::five_block();
        let tight = OracleLimits {
            max_blocks: 4,
            max_dir_edges: 16,
        };
        let cand = all_dir_edges(&g, 0);
        assert!(is_kpfd_recursive(&g, &cand, &tight).is_err());
        assert!(maximal_removals(&g, DirIndex(0), &tight).is_err());
        assert!(enumerate_candidates(&g, DirIndex(0), &tight).is_err());
    }
}
