//! Property tests: partition invariants, SCC agreement with a brute-force
//! reachability oracle, condensation acyclicity, maximal-PFD structure, tree
//! and plan soundness, and ingestion round-trips.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use blockplan_core::decompose::{
    build_ccg, build_ccg_within, condense, is_2pfd, is_pfd, max_pfd, project_along,
    strongly_connected_components, topological_order, Digraph,
};
use blockplan_core::hierarchy::{h_max_pfd, kpfd_binary_tree, tree_stats, PfdTree};
use blockplan_core::instructions::{emit_plan, postorder};
use blockplan_core::model::{
    validate_model, weak_components, BlockId, Connection, Direction, ModelGraph,
};
use common::{random_model, Rng};
use proptest::prelude::*;

fn seeded_model(seed: u64) -> ModelGraph {
    random_model(&mut Rng::new(seed), 8, 3, 12)
}

/// Arbitrary loop-free digraph on 1..=8 vertices, as an adjacency matrix.
fn arb_digraph() -> impl Strategy<Value = Digraph> {
    (1usize..=8).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * n).prop_map(move |cells| {
            let vertices: BTreeSet<BlockId> = (0..n).map(BlockId).collect();
            let arcs = cells
                .iter()
                .enumerate()
                .filter(|&(i, &on)| on && i / n != i % n)
                .map(|(i, _)| (BlockId(i / n), BlockId(i % n)))
                .collect();
            Digraph::new(vertices, arcs)
        })
    })
}

/// Reachability closure by repeated relaxation; the independent oracle for
/// the SCC implementation.
fn reachable(d: &Digraph) -> BTreeMap<(BlockId, BlockId), bool> {
    let vs = d.vertices();
    let mut reach: BTreeMap<(BlockId, BlockId), bool> = BTreeMap::new();
    for &u in vs {
        for &v in vs {
            reach.insert((u, v), u == v || d.contains_arc(u, v));
        }
    }
    let mut changed = true;
    while changed {
        changed = false;
        for &u in vs {
            for &mid in vs {
                if !reach[&(u, mid)] {
                    continue;
                }
                for &v in vs {
                    if reach[&(mid, v)] && !reach[&(u, v)] {
                        reach.insert((u, v), true);
                        changed = true;
                    }
                }
            }
        }
    }
    reach
}

fn assert_tree_invariants(g: &ModelGraph, t: &PfdTree) {
    if !t.children().is_empty() {
        let union: BTreeSet<BlockId> = t
            .children()
            .iter()
            .flat_map(|c| c.node().iter().copied())
            .collect();
        let total: usize = t.children().iter().map(|c| c.node().len()).sum();
        assert_eq!(&union, t.node(), "children must cover the parent");
        assert_eq!(total, t.node().len(), "children must be disjoint");
        assert!(t.children().len() >= 2);

        let dir = t.split_dir().unwrap();
        let removed = t.removed().unwrap();
        let ccg = build_ccg_within(g, t.node(), removed, dir).expect("rebuildable split");
        assert!(is_pfd(&ccg), "every split must be feasible");
        assert_eq!(ccg.nodes.len(), t.children().len());

        for child in t.children() {
            assert_tree_invariants(g, child);
        }
    } else {
        assert!(t.is_leaf() || t.is_stuck());
        assert_eq!(t.is_leaf(), t.node().len() == 1);
    }
}

proptest! {
    #[test]
    fn canonicalization_is_idempotent(v in prop::array::uniform3(-1000i64..=1000)) {
        prop_assume!(v != [0, 0, 0]);
        let (c, _) = Direction::canonical(v).unwrap();
        let (c2, flipped) = Direction::canonical(c.components()).unwrap();
        prop_assert_eq!(c, c2);
        prop_assert!(!flipped);
    }

    #[test]
    fn weak_components_partition(seed in any::<u64>(), keep in 0u8..=100) {
        let g = seeded_model(seed);
        // Random sub-multiset of the edges.
        let mut rng = Rng::new(seed ^ 0xABCD);
        let edges: Vec<Connection> = g
            .edges()
            .iter()
            .copied()
            .filter(|_| rng.below(100) < keep as usize)
            .collect();
        let comps = weak_components(&g.block_set(), &edges);
        prop_assert!(comps.is_partition_of(&g.block_set()));
        // Deterministic order: ascending smallest member.
        let mins: Vec<BlockId> = comps.iter().map(|c| *c.first().unwrap()).collect();
        prop_assert!(mins.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn scc_matches_reachability_equivalence(d in arb_digraph()) {
        let sccs = strongly_connected_components(&d);
        let vertex_set: BTreeSet<BlockId> = d.vertices().iter().copied().collect();
        prop_assert!(sccs.is_partition_of(&vertex_set));

        let reach = reachable(&d);
        for &u in d.vertices() {
            for &v in d.vertices() {
                let together = sccs.find(u) == sccs.find(v);
                let mutual = reach[&(u, v)] && reach[&(v, u)];
                prop_assert_eq!(together, mutual, "scc vs reachability on {:?},{:?}", u, v);
            }
        }
    }

    #[test]
    fn scc_order_is_reverse_topological(d in arb_digraph()) {
        let sccs = strongly_connected_components(&d);
        for &(u, v) in d.arcs() {
            let (cu, cv) = (sccs.find(u).unwrap(), sccs.find(v).unwrap());
            if cu != cv {
                prop_assert!(cu > cv, "arc must go from later to earlier listed component");
            }
        }
    }

    #[test]
    fn condensation_is_acyclic(d in arb_digraph()) {
        let sccs = strongly_connected_components(&d);
        let cond = condense(&d, &sccs);
        prop_assert!(topological_order(&cond).is_ok());
    }

    #[test]
    fn max_pfd_structure(seed in any::<u64>()) {
        let g = seeded_model(seed);
        for dir in g.dir_indices() {
            let r = max_pfd(&g, dir);
            prop_assert!(r.components.is_partition_of(&g.block_set()));

            // Removed edges come from the chosen class only and the result
            // is maximal: every retained class edge is internal to a
            // component.
            for e in &r.removed {
                prop_assert_eq!(e.dir, dir);
            }
            for e in g.edges().iter().filter(|e| e.dir == dir) {
                let crossing = r.components.find(e.from) != r.components.find(e.to);
                prop_assert_eq!(crossing, r.removed.contains(e));
            }

            // Component order is topological for the CCG.
            for &(i, j) in &r.ccg.arcs {
                prop_assert!(i < j);
            }

            if r.removed.is_empty() {
                prop_assert_eq!(r.components.len(), 1);
            } else {
                // Rebuilding the CCG from the removal set reproduces the
                // component partition (build_ccg lists nodes by smallest
                // member, max_pfd topologically) and the result is feasible.
                let ccg = build_ccg(&g, &r.removed, dir).unwrap();
                let mut a: Vec<_> = ccg.nodes.iter().cloned().collect();
                let mut b: Vec<_> = r.components.iter().cloned().collect();
                a.sort();
                b.sort();
                prop_assert_eq!(a, b);
                prop_assert!(is_pfd(&ccg));
                // Same arcs once indices are remapped between the orders.
                let remapped: BTreeSet<(usize, usize)> = ccg
                    .arcs
                    .iter()
                    .map(|&(i, j)| {
                        let fi = r.components.find(*ccg.nodes.get(i).first().unwrap()).unwrap();
                        let fj = r.components.find(*ccg.nodes.get(j).first().unwrap()).unwrap();
                        (fi, fj)
                    })
                    .collect();
                prop_assert_eq!(&remapped, &r.ccg.arcs);
            }

            // The condensation of the projection is the same partition.
            let proj = project_along(&g, dir);
            let sccs = strongly_connected_components(&proj);
            let mut expected: Vec<BTreeSet<BlockId>> = sccs.iter().cloned().collect();
            expected.reverse();
            prop_assert_eq!(r.components.as_slice(), expected.as_slice());
        }
    }

    #[test]
    fn two_pfd_implies_pfd(seed in any::<u64>(), mask in any::<u16>()) {
        let g = seeded_model(seed);
        let mut rng = Rng::new(seed ^ 0x5EED);
        let dir = blockplan_core::model::DirIndex(rng.below(g.direction_count().max(1)));
        let keys: BTreeSet<Connection> = g
            .edges()
            .iter()
            .copied()
            .filter(|e| e.dir == dir)
            .collect();
        let removed: BTreeSet<Connection> = keys
            .iter()
            .enumerate()
            .filter(|&(i, _)| i < 16 && mask & (1 << i) != 0)
            .map(|(_, &k)| k)
            .collect();
        prop_assume!(!removed.is_empty());

        let ccg = build_ccg(&g, &removed, dir).unwrap();
        if is_2pfd(&ccg) {
            prop_assert!(is_pfd(&ccg));
        }
        if ccg.node_count() == 2 {
            prop_assert_eq!(is_pfd(&ccg), is_2pfd(&ccg));
        }
    }

    #[test]
    fn hierarchy_tree_invariants(seed in any::<u64>()) {
        let g = seeded_model(seed);
        let t = h_max_pfd(&g);
        prop_assert_eq!(t.node(), &g.block_set());
        assert_tree_invariants(&g, &t);

        // Leaf multiset equals the block set (no stuck nodes possible with
        // these generated physical models? they are possible; count both).
        let stats = tree_stats(&t);
        let leaves: usize = postorder(&t)
            .iter()
            .filter(|s| s.len() == 1)
            .count();
        prop_assert!(stats.leaf_count >= leaves);

        // Determinism.
        prop_assert_eq!(&t, &h_max_pfd(&g));
    }

    #[test]
    fn plan_replay_is_sound(seed in any::<u64>()) {
        let g = seeded_model(seed);
        let t = h_max_pfd(&g);
        prop_assume!(t.stuck_components().is_empty());
        let plan = emit_plan(&t).unwrap();
        prop_assert_eq!(plan.steps.len(), tree_stats(&t).internal_count);

        let mut assembled: Vec<BTreeSet<BlockId>> =
            g.block_ids().map(|b| [b].into_iter().collect()).collect();
        for (i, step) in plan.steps.iter().enumerate() {
            prop_assert_eq!(step.step_number, i + 1);
            prop_assert!(!step.joins.is_empty());
            prop_assert!(step.joins.iter().all(|j| j.dir == step.dir));
            for part in &step.parts {
                let at = assembled.iter().position(|a| a == part);
                prop_assert!(at.is_some(), "part not assembled before use");
                assembled.remove(at.unwrap());
            }
            assembled.push(step.target.clone());
        }
        prop_assert_eq!(assembled, vec![g.block_set()]);

        // Reversed, every step is a feasible split of its target.
        for step in plan.steps.iter().rev() {
            let ccg = build_ccg_within(&g, &step.target, &step.joins, step.dir).unwrap();
            prop_assert!(is_pfd(&ccg));
        }
    }

    #[test]
    fn binary_tree_realizes_the_split(seed in any::<u64>()) {
        let g = seeded_model(seed);
        for dir in g.dir_indices() {
            let r = max_pfd(&g, dir);
            if r.components.len() < 2 {
                continue;
            }
            let bt = kpfd_binary_tree(&r.ccg).unwrap();
            // Full, ordered, leaves in topological order.
            let leaves = bt.leaves();
            prop_assert_eq!(leaves.len(), r.components.len());
            for (leaf, comp) in leaves.iter().zip(r.components.iter()) {
                prop_assert_eq!(*leaf, comp);
            }
            // Left child holds the origin side of every crossing arc.
            fn check(node: &blockplan_core::hierarchy::BinaryPfdTree, ccg: &blockplan_core::decompose::Ccg) {
                let Some((l, r)) = node.left().zip(node.right()) else {
                    return;
                };
                for &(i, j) in &ccg.arcs {
                    let from_left = ccg.nodes.get(i).is_subset(l.node());
                    let to_right = ccg.nodes.get(j).is_subset(r.node());
                    let from_right = ccg.nodes.get(i).is_subset(r.node());
                    let to_left = ccg.nodes.get(j).is_subset(l.node());
                    if from_left || to_right {
                        assert!(!(from_right && to_left), "arc into the left child");
                    }
                }
                check(l, ccg);
                check(r, ccg);
            }
            check(&bt, &r.ccg);
        }
    }

    #[test]
    fn nested_feasible_removals_refine(seed in any::<u64>(), mask_b in 1u16.., submask in any::<u16>()) {
        // Removing more edges can only refine the partition; when both
        // nested removals are feasible, the larger one's components sit
        // inside the smaller one's.
        let g = seeded_model(seed);
        let mut rng = Rng::new(seed ^ 0xCAFE);
        let dir = blockplan_core::model::DirIndex(rng.below(g.direction_count().max(1)));
        let keys: Vec<Connection> = g
            .edges()
            .iter()
            .copied()
            .filter(|e| e.dir == dir)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        prop_assume!(!keys.is_empty() && keys.len() <= 16);
        let pick = |mask: u16| -> BTreeSet<Connection> {
            keys.iter()
                .enumerate()
                .filter(|&(i, _)| i < 16 && mask & (1 << i) != 0)
                .map(|(_, &k)| k)
                .collect()
        };
        let b = pick(mask_b);
        let a = pick(mask_b & submask);
        prop_assume!(!a.is_empty() && !b.is_empty());

        let ccg_a = build_ccg(&g, &a, dir).unwrap();
        let ccg_b = build_ccg(&g, &b, dir).unwrap();
        if is_pfd(&ccg_a) && is_pfd(&ccg_b) {
            for fine in ccg_b.nodes.iter() {
                prop_assert!(
                    ccg_a.nodes.iter().any(|coarse| fine.is_subset(coarse)),
                    "larger removal must refine the smaller one's partition"
                );
            }
        }
    }

    #[test]
    fn ingestion_round_trip(seed in any::<u64>()) {
        let g = seeded_model(seed);
        let again = validate_model(&g.to_raw()).unwrap();
        prop_assert_eq!(g, again);
    }

    #[test]
    fn reversed_direction_round_trip(seed in any::<u64>()) {
        // Negating direction vectors and flipping their edges describes the
        // same physical model, so it must normalize identically.
        let g = seeded_model(seed);
        let mut raw = g.to_raw();
        for d in &mut raw.directions {
            for c in d.iter_mut() {
                *c = -*c;
            }
        }
        for c in &mut raw.connections {
            std::mem::swap(&mut c.from, &mut c.to);
        }
        let again = validate_model(&raw).unwrap();
        prop_assert_eq!(g, again);
    }
}
