//! Single-edge extension by fan rotation and alternating-path flipping, and
//! the driver that colors a whole graph with it.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::altpath::{trace_from, AltPath};
use crate::coloring::{Color, PartialColoring, UNCOLORED};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FanTerminal {
    /// The last fan vertex and the center both miss this color.
    Shared(Color),
    /// `ψ(u, v_index)` is missing at the last fan vertex.
    FoldBack { index: usize, color: Color },
}

/// A fan `v_0, …, v_k` around `center`; `edges[i]` joins the center to
/// `sequence[i]` and `colors[i]` is its color when the fan was built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    pub center: VertexId,
    pub sequence: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub colors: Vec<Color>,
    /// Color each `v_i` used to reach `v_{i+1}`.
    pub links: Vec<Color>,
    pub terminal: FanTerminal,
}

impl Fan {
    /// Index `k` of the last fan vertex.
    pub fn last(&self) -> usize {
        self.sequence.len() - 1
    }
}

/// Builds the fan of the uncolored edge `(u, v)` following designated colors.
pub fn build_fan(c: &PartialColoring, u: VertexId, v: VertexId) -> Result<Fan> {
    build_fan_with(c, u, v, None, None)
}

/// Like [`build_fan`], but `v_0` follows `first_color` when given, and a
/// shared color equal to `prefer` wins over other shared colors.
pub fn build_fan_with(
    c: &PartialColoring,
    u: VertexId,
    v: VertexId,
    first_color: Option<Color>,
    prefer: Option<Color>,
) -> Result<Fan> {
    let g = c.graph();
    let e0 = g.find_edge(u, v).ok_or(Error::NoSuchEdge(u, v))?;
    if c.color(e0) != UNCOLORED {
        return Err(Error::AlreadyColored(e0));
    }
    if let Some(y) = first_color {
        if !c.is_missing(v, y) {
            return Err(Error::NotMissing { vertex: v, color: y });
        }
    }
    let mut fan = Fan {
        center: u,
        sequence: vec![v],
        edges: vec![e0],
        colors: vec![UNCOLORED],
        links: Vec::new(),
        terminal: FanTerminal::Shared(0),
    };
    loop {
        let k = fan.last();
        let vk = fan.sequence[k];
        let shared = match prefer {
            Some(x) if c.is_missing(u, x) && c.is_missing(vk, x) => Some(x),
            _ => c.first_common_missing(u, vk),
        };
        if let Some(x) = shared {
            fan.terminal = FanTerminal::Shared(x);
            return Ok(fan);
        }
        let col = match (k, first_color) {
            (0, Some(y)) => y,
            _ => c.designated(vk),
        };
        if !c.is_missing(vk, col) {
            return Err(Error::Internal(format!(
                "designated color {col} of {vk} is not missing"
            )));
        }
        let t = c
            .edge_via(u, col)
            .ok_or_else(|| Error::Internal("fan color missing at center without shared color".into()))?;
        let w = g.opposite(t, u);
        fan.links.push(col);
        if let Some(j) = fan.sequence.iter().position(|&s| s == w) {
            fan.terminal = FanTerminal::FoldBack { index: j, color: col };
            return Ok(fan);
        }
        fan.sequence.push(w);
        fan.edges.push(t);
        fan.colors.push(col);
    }
}

fn check_fan(c: &PartialColoring, fan: &Fan) -> Result<()> {
    for (&e, &col) in fan.edges.iter().zip(&fan.colors) {
        if c.color(e) != col {
            return Err(Error::StaleFan);
        }
    }
    Ok(())
}

/// Recolorings that shift colors down the fan up to `upto`, leaving
/// `(u, v_upto)` uncolored. `colors` overrides the fan's recorded colors.
fn rotation_batch(fan: &Fan, upto: usize, colors: &[Color]) -> Vec<(EdgeId, Color)> {
    let mut batch: Vec<_> = (0..upto).map(|i| (fan.edges[i], colors[i + 1])).collect();
    batch.push((fan.edges[upto], UNCOLORED));
    batch
}

/// Shifts colors down the fan: `ψ(u, v_i) ← ψ(u, v_{i+1})` for `i < upto`,
/// then uncolors `(u, v_upto)`.
pub fn rotate_fan(c: &mut PartialColoring, fan: &Fan, upto: usize) -> Result<()> {
    if upto > fan.last() {
        return Err(Error::InvalidArgument(format!("rotation index {upto} past fan end")));
    }
    check_fan(c, fan)?;
    if upto == 0 {
        return Ok(());
    }
    c.apply(&rotation_batch(fan, upto, &fan.colors))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    Extended { path_len: usize },
    TruncatedRolledBack,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VizingParams {
    /// Longest alternating path the extension may flip.
    pub cap: Option<usize>,
    /// Color followed out of `v_0` instead of its designated color.
    pub first_color: Option<Color>,
    /// Free color of the center to use, if it is missing there.
    pub free_color: Option<Color>,
}

/// Colors the uncolored edge `(u, v)`. With a finite cap, a path longer
/// than the cap leaves the state untouched.
pub fn extend_edge_vizing(
    c: &mut PartialColoring,
    u: VertexId,
    v: VertexId,
    cap: Option<usize>,
) -> Result<Extension> {
    extend_edge_with(c, u, v, VizingParams { cap, ..Default::default() })
}

pub fn extend_edge_with(
    c: &mut PartialColoring,
    u: VertexId,
    v: VertexId,
    params: VizingParams,
) -> Result<Extension> {
    let fan = build_fan_with(c, u, v, params.first_color, params.free_color)?;
    let k = fan.last();
    match fan.terminal {
        FanTerminal::Shared(x) => {
            let mut batch = rotation_batch(&fan, k, &fan.colors);
            batch.last_mut().unwrap().1 = x;
            c.apply(&batch).map_err(internal)?;
            Ok(Extension::Extended { path_len: 0 })
        }
        FanTerminal::FoldBack { index: j, color: y } => {
            let x = match params.free_color {
                Some(x) if c.is_missing(u, x) => x,
                _ => c.designated(u),
            };
            let path = trace_from(c, u, y, x, params.cap)?;
            if path.truncated {
                return Ok(Extension::TruncatedRolledBack);
            }
            let batch = fold_back_batch(&fan, j, x, y, &path);
            c.apply(&batch).map_err(internal)?;
            Ok(Extension::Extended { path_len: path.len() })
        }
    }
}

fn fold_back_batch(fan: &Fan, j: usize, x: Color, y: Color, path: &AltPath) -> Vec<(EdgeId, Color)> {
    let k = fan.last();
    let swap = |col: Color| if col == x { y } else { x };
    let flips = path.edges[1..]
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, swap(path.expected_color(i + 1))));
    if path.end() != fan.sequence[j - 1] {
        let mut batch = rotation_batch(fan, j, &fan.colors);
        batch.last_mut().unwrap().1 = x;
        batch.extend(flips);
        batch
    } else {
        // The flip turns (u, v_j) from y to x before the full rotation.
        let mut colors = fan.colors.clone();
        colors[j] = x;
        let mut batch = rotation_batch(fan, k, &colors);
        batch.last_mut().unwrap().1 = y;
        batch.extend(flips);
        batch
    }
}

fn internal(err: Error) -> Error {
    Error::Internal(format!("fan extension produced an improper coloring: {err}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeOrder {
    #[default]
    Input,
    Random,
}

/// Colors every edge of `g` with at most `Δ+1` colors.
pub fn color_all_vizing(g: &Graph, order: EdgeOrder, seed: u64) -> PartialColoring<'_> {
    let mut c = PartialColoring::new(g, g.max_degree() as u32 + 1);
    let mut edges: Vec<EdgeId> = (0..g.m() as EdgeId).collect();
    if order == EdgeOrder::Random {
        edges.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    extend_all(&mut c, &edges);
    c
}

/// Extends every still-uncolored edge of `edges` with an unbounded cap.
pub fn extend_all(c: &mut PartialColoring, edges: &[EdgeId]) {
    for &e in edges {
        if c.color(e) != UNCOLORED {
            continue;
        }
        let (u, v) = c.graph().endpoints(e);
        extend_edge_vizing(c, u, v, None).expect("unbounded extension always succeeds");
        c.clear_journal();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{gnm, random_partial};
    use rand::Rng;

    fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, (i + 2) % 5 + 5));
        }
        Graph::new(10, &edges).unwrap()
    }

    fn complete(n: u32) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::new(n as usize, &edges).unwrap()
    }

    /// Checks the fan invariants directly against the coloring.
    fn assert_fan_valid(c: &PartialColoring, fan: &Fan) {
        let u = fan.center;
        let mut seen = fan.sequence.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), fan.sequence.len());
        for i in 1..fan.sequence.len() {
            let col = c.color(fan.edges[i]);
            assert_eq!(c.graph().opposite(fan.edges[i], u), fan.sequence[i]);
            assert!(c.is_missing(fan.sequence[i - 1], col));
        }
        let vk = fan.sequence[fan.last()];
        match fan.terminal {
            FanTerminal::Shared(x) => assert!(c.is_missing(u, x) && c.is_missing(vk, x)),
            FanTerminal::FoldBack { index, color } => {
                assert!(index >= 1 && index < fan.last() + 1);
                assert_eq!(c.color(fan.edges[index]), color);
                assert!(c.is_missing(vk, color));
                assert!(c.first_common_missing(u, vk).is_none());
            }
        }
    }

    #[test]
    fn triangle_shared_color() {
        let g = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let mut c = PartialColoring::new(&g, 3);
        c.assign(0, 1).unwrap();
        c.assign(1, 2).unwrap();
        let fan = build_fan(&c, 0, 2).unwrap();
        assert_eq!(fan.sequence, [2]);
        assert_eq!(fan.terminal, FanTerminal::Shared(3));
        extend_edge_vizing(&mut c, 0, 2, None).unwrap();
        assert_eq!(c.colors(), &[1, 2, 3]);
    }

    #[test]
    fn bare_star_edge_has_trivial_fan() {
        let g = Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let c = PartialColoring::new(&g, 4);
        let fan = build_fan(&c, 0, 2).unwrap();
        assert_eq!(fan.last(), 0);
        assert!(matches!(fan.terminal, FanTerminal::Shared(_)));
    }

    #[test]
    fn rotation_moves_uncolored_edge() {
        // u=0 with neighbors 1, 2; (0,2) colored 2 and 1 misses 2.
        let g = Graph::new(4, &[(0, 1), (0, 2), (1, 3)]).unwrap();
        let mut c = PartialColoring::new(&g, 3);
        c.assign(1, 2).unwrap();
        c.assign(2, 1).unwrap();
        let fan = Fan {
            center: 0,
            sequence: vec![1, 2],
            edges: vec![0, 1],
            colors: vec![UNCOLORED, 2],
            links: vec![2],
            terminal: FanTerminal::Shared(3),
        };
        let before = c.snapshot();
        rotate_fan(&mut c, &fan, 0).unwrap();
        assert_eq!(c.snapshot(), before);
        rotate_fan(&mut c, &fan, 1).unwrap();
        assert_eq!(c.color(0), 2);
        assert_eq!(c.color(1), UNCOLORED);
        assert!(matches!(rotate_fan(&mut c, &fan, 1), Err(Error::StaleFan)));
    }

    /// Every proper 3-coloring of C5 extending the fixed 4 edges.
    #[test]
    fn c5_extension_is_an_enumerated_coloring() {
        let g = Graph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let mut c = PartialColoring::new(&g, 3);
        for (e, y) in [(0, 1), (1, 2), (2, 1), (3, 2)] {
            c.assign(e, y).unwrap();
        }
        extend_edge_vizing(&mut c, 4, 0, None).unwrap();
        let mut all = Vec::new();
        for code in 0..3u32.pow(5) {
            let cols: Vec<Color> = (0..5).map(|i| code / 3u32.pow(i) % 3 + 1).collect();
            if is_proper_cycle(&cols) {
                all.push(cols);
            }
        }
        assert!(all.contains(&c.colors().to_vec()));
    }

    fn is_proper_cycle(cols: &[Color]) -> bool {
        (0..cols.len()).all(|i| cols[i] != cols[(i + 1) % cols.len()])
    }

    #[test]
    fn zero_cap_rolls_back_when_a_flip_is_needed() {
        let mut truncations = 0;
        for seed in 0..100 {
            let g = gnm(12, 40, seed);
            let mut c = random_partial(&g, g.max_degree() as u32 + 1, 0.95, seed);
            let open: Vec<EdgeId> = (0..g.m() as EdgeId).filter(|&e| c.color(e) == UNCOLORED).collect();
            for e in open {
                let (u, v) = g.endpoints(e);
                let before = c.snapshot();
                let len = c.journal_len();
                match extend_edge_vizing(&mut c, u, v, Some(0)).unwrap() {
                    Extension::TruncatedRolledBack => {
                        truncations += 1;
                        assert_eq!(c.snapshot(), before);
                        assert_eq!(c.journal_len(), len);
                        let out = extend_edge_vizing(&mut c, u, v, None).unwrap();
                        assert!(matches!(out, Extension::Extended { path_len } if path_len > 0));
                    }
                    Extension::Extended { path_len } => assert_eq!(path_len, 0),
                }
            }
            assert!(c.is_proper());
        }
        assert!(truncations > 0);
    }

    #[test]
    fn random_fans_satisfy_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for seed in 0..200 {
            let g = gnm(8, rng.gen_range(6..20), seed);
            let mut c = random_partial(&g, g.max_degree() as u32 + 1, 0.9, seed);
            let open: Vec<EdgeId> = (0..g.m() as EdgeId).filter(|&e| c.color(e) == UNCOLORED).collect();
            for e in open {
                let (u, v) = g.endpoints(e);
                let (u, v) = if rng.gen_bool(0.5) { (u, v) } else { (v, u) };
                let fan = build_fan(&c, u, v).unwrap();
                assert_fan_valid(&c, &fan);
                let before = c.uncolored();
                extend_edge_vizing(&mut c, u, v, None).unwrap();
                assert_eq!(c.uncolored(), before - 1);
                assert!(c.is_proper());
                c.audit().unwrap();
            }
        }
    }

    #[test]
    fn small_complete_and_petersen() {
        for g in [complete(4), petersen(), complete(7)] {
            let c = color_all_vizing(&g, EdgeOrder::Input, 0);
            assert!(c.is_proper());
            assert_eq!(c.count_uncolored(), 0);
            assert!(c.uses_at_most(g.max_degree() + 1));
        }
    }

    #[test]
    fn random_graphs_random_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for seed in 0..100 {
            let n = rng.gen_range(5..=200);
            let g = gnm(n, 2 * n, seed);
            let c = color_all_vizing(&g, EdgeOrder::Random, seed);
            assert!(c.is_proper());
            assert_eq!(c.count_uncolored(), 0);
            assert!(c.uses_at_most(g.max_degree() + 1));
        }
    }

    #[test]
    fn bounded_cap_failure_is_exact() {
        for seed in 0..50 {
            let g = gnm(30, 90, seed);
            let mut c = random_partial(&g, g.max_degree() as u32 + 1, 0.95, seed);
            let open: Vec<EdgeId> = (0..g.m() as EdgeId).filter(|&e| c.color(e) == UNCOLORED).collect();
            for e in open {
                let (u, v) = g.endpoints(e);
                let before = c.snapshot();
                let uncolored = c.uncolored();
                match extend_edge_vizing(&mut c, u, v, Some(1)).unwrap() {
                    Extension::TruncatedRolledBack => assert_eq!(c.snapshot(), before),
                    Extension::Extended { path_len } => {
                        assert!(path_len <= 1);
                        assert_eq!(c.uncolored(), uncolored - 1);
                    }
                }
            }
            assert!(c.is_proper());
        }
    }
}
