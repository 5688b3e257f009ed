use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coloring::PartialColoring;
use crate::graph::{EdgeId, Graph, VertexId};

pub fn gnm(n: usize, m: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let u: VertexId = rng.gen_range(0..n as u32);
        let v: VertexId = rng.gen_range(0..n as u32);
        if u != v && seen.insert((u.min(v), u.max(v))) {
            edges.push((u, v));
        }
    }
    Graph::new(n, &edges).unwrap()
}

/// Greedy random partial coloring: each edge, in random order, is colored
/// with probability `density` by a random color free at both ends.
pub fn random_partial(g: &Graph, palette: u32, density: f64, seed: u64) -> PartialColoring<'_> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut c = PartialColoring::new(g, palette);
    let mut order: Vec<EdgeId> = (0..g.m() as EdgeId).collect();
    order.shuffle(&mut rng);
    for e in order {
        if !rng.gen_bool(density) {
            continue;
        }
        let (u, v) = g.endpoints(e);
        let free: Vec<_> = (1..=palette)
            .filter(|&y| c.is_missing(u, y) && c.is_missing(v, y))
            .collect();
        if let Some(&y) = free.choose(&mut rng) {
            c.assign(e, y).unwrap();
        }
    }
    c.clear_journal();
    c
}
