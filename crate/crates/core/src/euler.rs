//! Eulerian degree splitting and slack coloring on top of it.

use crate::coloring::{Color, PartialColoring, UNCOLORED};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::vizing::{color_all_vizing, extend_all, EdgeOrder};

/// Two-way split of the edge set; `side[e]` is `0` or `1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub side: Vec<u8>,
}

impl Partition {
    /// Per-vertex degrees inside each side.
    pub fn degrees(&self, g: &Graph) -> [Vec<usize>; 2] {
        let mut deg = [vec![0usize; g.n()], vec![0usize; g.n()]];
        for (e, (u, v)) in g.edges().enumerate() {
            let s = self.side[e] as usize;
            deg[s][u as usize] += 1;
            deg[s][v as usize] += 1;
        }
        deg
    }

    /// Builds both sides as graphs on the same vertex set, each with the map
    /// from its edge ids back to `g`.
    pub fn split(&self, g: &Graph) -> [(Graph, Vec<EdgeId>); 2] {
        let mut ids = [Vec::new(), Vec::new()];
        for e in 0..g.m() {
            ids[self.side[e] as usize].push(e as EdgeId);
        }
        let [a, b] = ids;
        [(g.edge_subgraph(&a), a), (g.edge_subgraph(&b), b)]
    }
}

/// Splits `g` by walking closed trails and alternating sides along each.
///
/// Odd-degree vertices are joined to an extra vertex so every trail closes.
/// Trails through the extra vertex are walked first; the remaining
/// components start at their lowest-degree vertex. Each vertex then has
/// `|deg_0 − deg_1| ≤ 1`, except the start vertex of a component with
/// only even degrees and an odd number of edges, which is off by two.
pub fn euler_partition(g: &Graph) -> Partition {
    let n = g.n();
    let m = g.m();
    let hub = n as VertexId;
    let odd: Vec<VertexId> = (0..n as VertexId).filter(|&v| g.degree(v) % 2 == 1).collect();

    // Auxiliary adjacency with the extra vertex; ids >= m are extra edges.
    let mut offsets = Vec::with_capacity(n + 2);
    offsets.push(0usize);
    for v in 0..n as VertexId {
        let extra = g.degree(v) % 2;
        offsets.push(offsets[v as usize] + g.degree(v) + extra);
    }
    offsets.push(offsets[n] + odd.len());
    let mut adj: Vec<(VertexId, u32)> = Vec::with_capacity(offsets[n + 1]);
    for v in 0..n as VertexId {
        adj.extend(g.neighbors(v).iter().map(|nb| (nb.vertex, nb.edge)));
        if g.degree(v) % 2 == 1 {
            let k = odd.binary_search(&v).unwrap();
            adj.push((hub, (m + k) as u32));
        }
    }
    adj.extend(odd.iter().enumerate().map(|(k, &v)| (v, (m + k) as u32)));

    let mut used = vec![false; m + odd.len()];
    let mut next = offsets[..n + 1].to_vec();
    let mut side = vec![0u8; m];

    let mut starts = Vec::with_capacity(n + 1);
    starts.push(hub);
    let mut by_degree: Vec<VertexId> = (0..n as VertexId).collect();
    by_degree.sort_by_key(|&v| (g.degree(v), v));
    starts.extend(by_degree);

    let mut stack: Vec<(VertexId, u32)> = Vec::new();
    let mut circuit: Vec<u32> = Vec::new();
    for s in starts {
        if next[s as usize] == offsets[s as usize + 1] {
            continue;
        }
        stack.clear();
        circuit.clear();
        stack.push((s, u32::MAX));
        while let Some(&(v, via)) = stack.last() {
            let vi = v as usize;
            while next[vi] < offsets[vi + 1] && used[adj[next[vi]].1 as usize] {
                next[vi] += 1;
            }
            if next[vi] < offsets[vi + 1] {
                let (w, e) = adj[next[vi]];
                used[e as usize] = true;
                stack.push((w, e));
            } else {
                stack.pop();
                if via != u32::MAX {
                    circuit.push(via);
                }
            }
        }
        for (i, &e) in circuit.iter().enumerate() {
            if (e as usize) < m {
                side[e as usize] = (i % 2) as u8;
            }
        }
    }
    Partition { side }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SlackStats {
    pub depth: usize,
    pub leaves: usize,
    /// Colors available across all leaves before any cleanup.
    pub merged_palette: u32,
    /// Edges recolored by the cleanup pass.
    pub cleanup_edges: usize,
}

/// Colors `g` with at most `Δ + d − 1` colors (`Δ + 1` when `d = 1`).
pub fn slack_color(g: &Graph, d: usize) -> Result<PartialColoring<'_>> {
    slack_color_traced(g, d).map(|(c, _)| c)
}

pub fn slack_color_traced(g: &Graph, d: usize) -> Result<(PartialColoring<'_>, SlackStats)> {
    let delta = g.max_degree();
    if d == 0 || d >= delta {
        return Err(Error::InvalidArgument(format!(
            "slack {d} must lie in 1..{delta}"
        )));
    }
    let level = usize::BITS - 1 - d.leading_zeros();
    let mut run = SlackRun {
        delta,
        level,
        colors: vec![UNCOLORED; g.m()],
        next_color: 0,
        cost: 0,
        stats: SlackStats::default(),
    };
    let ids: Vec<EdgeId> = (0..g.m() as EdgeId).collect();
    run.recurse(g, &ids, 0);
    run.stats.merged_palette = run.next_color;

    let target = (delta + d - 1).max(delta + 1) as u32;
    let (mut c, freed) = reduce_palette(g, run.colors, run.next_color, target);
    run.stats.cleanup_edges = freed;
    c.add_cost(run.cost);
    Ok((c, run.stats))
}

struct SlackRun {
    delta: usize,
    level: u32,
    colors: Vec<Color>,
    next_color: u32,
    cost: u64,
    stats: SlackStats,
}

impl SlackRun {
    /// Leaf test: `Δ0 < Δ / 2^(l−3) + 1`, evaluated in integers.
    fn is_leaf(&self, sub_delta: usize) -> bool {
        if self.level < 3 {
            return true;
        }
        let scale = 1usize << (self.level - 3);
        sub_delta * scale < self.delta + scale
    }

    fn recurse(&mut self, sub: &Graph, ids: &[EdgeId], depth: usize) {
        if sub.m() == 0 {
            return;
        }
        self.stats.depth = self.stats.depth.max(depth);
        if self.is_leaf(sub.max_degree()) {
            let c = color_all_vizing(sub, EdgeOrder::Input, 0);
            self.cost += c.recolor_cost();
            for (i, &e) in ids.iter().enumerate() {
                self.colors[e as usize] = self.next_color + c.color(i as EdgeId);
            }
            self.next_color += sub.max_degree() as u32 + 1;
            self.stats.leaves += 1;
            return;
        }
        let parts = euler_partition(sub).split(sub);
        for (child, local) in &parts {
            let global: Vec<EdgeId> = local.iter().map(|&e| ids[e as usize]).collect();
            self.recurse(child, &global, depth + 1);
        }
    }
}

/// Shrinks a proper coloring with colors in `1..=palette` to `1..=target`:
/// the `palette − target` least used colors (ties to the smaller color) are
/// removed, survivors are renamed in increasing order, and the freed edges
/// are recolored by fan extension. Needs `target ≥ Δ(g) + 1`.
///
/// Returns the coloring, whose cost counter holds the uncolorings plus the
/// extension work, and the number of freed edges.
pub fn reduce_palette(
    g: &Graph,
    mut colors: Vec<Color>,
    palette: u32,
    target: u32,
) -> (PartialColoring<'_>, usize) {
    assert!(target as usize > g.max_degree(), "target palette below Δ+1");
    let mut freed = Vec::new();
    if palette > target {
        let mut count = vec![0usize; palette as usize + 1];
        for &c in &colors {
            count[c as usize] += 1;
        }
        let mut order: Vec<Color> = (1..=palette).collect();
        order.sort_by_key(|&c| (count[c as usize], c));
        let mut keep: Vec<Color> = order[(palette - target) as usize..].to_vec();
        keep.sort_unstable();
        let mut rename = vec![UNCOLORED; palette as usize + 1];
        for (i, &c) in keep.iter().enumerate() {
            rename[c as usize] = i as Color + 1;
        }
        for (e, c) in colors.iter_mut().enumerate() {
            if *c != UNCOLORED {
                *c = rename[*c as usize];
                if *c == UNCOLORED {
                    freed.push(e as EdgeId);
                }
            }
        }
    }
    let mut c = PartialColoring::from_colors(g, target, &colors)
        .expect("renamed coloring stays proper");
    c.add_cost(freed.len() as u64);
    extend_all(&mut c, &freed);
    (c, freed.len())
}
