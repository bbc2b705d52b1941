//! Shared helpers for the integration test suites: a seeded RNG, the
//! five-block reference model, random connected model generation, and the
//! worst-case chain family.

// Each test binary uses its own subset of these helpers.
#![allow(dead_code)]

use std::collections::BTreeSet;

use blockplan_core::model::{
    validate_model, BlockId, Connection, DirIndex, ModelGraph, RawBlock, RawConnection, RawModel,
};

/// SplitMix64: tiny, deterministic, no dependencies.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish in `0..n`; bias is irrelevant at these sizes.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    pub fn bool(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }
}

const AXES: [[i64; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

/// The five-block reference model: 2-3, 1-5, 4-5 joined along the first
/// axis and 2-1, 4-2, 3-1, 4-3 along the second; blocks 2 and 3 are trapped
/// between 1 and 4.
pub fn five_block_raw() -> RawModel {
    RawModel {
        directions: vec![AXES[0], AXES[1]],
        blocks: (1..=5).map(RawBlock::new).collect(),
        connections: vec![
            RawConnection::new(2, 3, 0),
            RawConnection::new(1, 5, 0),
            RawConnection::new(4, 5, 0),
            RawConnection::new(2, 1, 1),
            RawConnection::new(4, 2, 1),
            RawConnection::new(3, 1, 1),
            RawConnection::new(4, 3, 1),
        ],
    }
}

pub fn five_block() -> ModelGraph {
    validate_model(&five_block_raw()).expect("five-block model is valid")
}

/// Random weakly connected model: a random spanning tree plus random extra
/// edges (duplicates allowed), every edge on a random axis with random
/// orientation.
pub fn random_raw_model(
    rng: &mut Rng,
    max_blocks: usize,
    max_dirs: usize,
    max_edges: usize,
) -> RawModel {
    let n = 1 + rng.below(max_blocks);
    let p = 1 + rng.below(max_dirs.min(AXES.len()));
    let mut connections = Vec::new();
    for i in 1..n {
        let parent = rng.below(i);
        let (a, b) = ((parent + 1) as u64, (i + 1) as u64);
        let (from, to) = if rng.bool() { (a, b) } else { (b, a) };
        connections.push(RawConnection::new(from, to, rng.below(p)));
    }
    if n >= 2 {
        let extras = rng.below(max_edges.saturating_sub(n - 1) + 1);
        for _ in 0..extras {
            let a = rng.below(n);
            let mut b = rng.below(n);
            while b == a {
                b = rng.below(n);
            }
            connections.push(RawConnection::new(
                (a + 1) as u64,
                (b + 1) as u64,
                rng.below(p),
            ));
        }
    }
    RawModel {
        directions: AXES[..p].to_vec(),
        blocks: (1..=n as u64).map(RawBlock::new).collect(),
        connections,
    }
}

pub fn random_model(
    rng: &mut Rng,
    max_blocks: usize,
    max_dirs: usize,
    max_edges: usize,
) -> ModelGraph {
    validate_model(&random_raw_model(rng, max_blocks, max_dirs, max_edges))
        .expect("generated model is valid")
}

/// Worst-case family: block i (for i >= 3) wraps the previous assembly via
/// two connections to blocks i-1 and i-2 on an axis alternating with i.
/// Exactly one block peels off per level, so the decomposition tree is a
/// left-deep chain of height n-1.
pub fn chain_model(n: usize) -> ModelGraph {
    assert!(n >= 2);
    let mut connections = vec![RawConnection::new(1, 2, 0)];
    for i in 3..=n {
        let dir = if i % 2 == 1 { 1 } else { 0 };
        connections.push(RawConnection::new((i - 2) as u64, i as u64, dir));
        connections.push(RawConnection::new((i - 1) as u64, i as u64, dir));
    }
    let raw = RawModel {
        directions: vec![AXES[0], AXES[1]],
        blocks: (1..=n as u64).map(RawBlock::new).collect(),
        connections,
    };
    validate_model(&raw).expect("chain model is valid")
}

pub fn ids(g: &ModelGraph, sources: &[u64]) -> BTreeSet<BlockId> {
    sources
        .iter()
        .map(|&s| g.block_by_source(s).expect("known source id"))
        .collect()
}

pub fn conn(g: &ModelGraph, from: u64, to: u64, dir: usize) -> Connection {
    Connection::new(
        g.block_by_source(from).unwrap(),
        g.block_by_source(to).unwrap(),
        DirIndex(dir),
    )
}
