//! Two-colored alternating paths: tracing with a length cap, flipping, and
//! the per-color length census.

use crate::coloring::{Color, PartialColoring};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, VertexId};

/// A traced alternating path. `colors.0` is the color of the first edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AltPath {
    pub colors: (Color, Color),
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub truncated: bool,
}

impl AltPath {
    #[inline]
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }

    /// The same path with its first edge dropped.
    pub fn without_first(&self) -> AltPath {
        AltPath {
            colors: (self.colors.1, self.colors.0),
            vertices: self.vertices[1.min(self.vertices.len() - 1)..].to_vec(),
            edges: self.edges.get(1..).unwrap_or_default().to_vec(),
            truncated: self.truncated,
        }
    }

    /// Color the `i`-th edge should carry.
    #[inline]
    pub fn expected_color(&self, i: usize) -> Color {
        if i.is_multiple_of(2) {
            self.colors.0
        } else {
            self.colors.1
        }
    }
}

/// Traces the maximal `{x, y}` path from `start`, stopping once it exceeds
/// `cap` edges; a stopped path holds `cap + 1` edges and is marked truncated.
pub fn trace_path(
    c: &PartialColoring,
    start: VertexId,
    x: Color,
    y: Color,
    cap: Option<usize>,
) -> Result<AltPath> {
    if x == y {
        return Err(Error::InvalidArgument("path colors must differ".into()));
    }
    let has_x = c.edge_via(start, x).is_some();
    let has_y = c.edge_via(start, y).is_some();
    let first = match (has_x, has_y) {
        (true, true) => return Err(Error::AmbiguousStart(start)),
        (true, false) => x,
        (false, true) => y,
        (false, false) => x,
    };
    let second = if first == x { y } else { x };
    trace_from(c, start, first, second, cap)
}

/// Traces starting along `first` at `start`, whatever `start` misses.
/// Callers use this when the first edge is forced, e.g. from a fan center.
pub fn trace_from(
    c: &PartialColoring,
    start: VertexId,
    first: Color,
    second: Color,
    cap: Option<usize>,
) -> Result<AltPath> {
    if first == second {
        return Err(Error::InvalidArgument("path colors must differ".into()));
    }
    let limit = cap.unwrap_or(usize::MAX);
    let mut path = AltPath {
        colors: (first, second),
        vertices: vec![start],
        edges: Vec::new(),
        truncated: false,
    };
    let (mut cur, mut col) = (start, first);
    while let Some(e) = c.edge_via(cur, col) {
        cur = c.graph().opposite(e, cur);
        path.edges.push(e);
        path.vertices.push(cur);
        if path.edges.len() > limit {
            path.truncated = true;
            break;
        }
        if cur == start {
            // Only reachable from a start that misses neither color.
            return Err(Error::AmbiguousStart(start));
        }
        col = if col == first { second } else { first };
    }
    Ok(path)
}

/// Swaps the two colors along `p`. Fails without change if `p` is stale
/// or truncated.
pub fn flip_path(c: &mut PartialColoring, p: &AltPath) -> Result<()> {
    if p.truncated {
        return Err(Error::InvalidArgument("cannot flip a truncated path".into()));
    }
    let batch = flip_batch(c, p)?;
    c.apply(&batch)
}

/// The recolorings that flip `p`, after checking it still matches `c`.
pub fn flip_batch(c: &PartialColoring, p: &AltPath) -> Result<Vec<(EdgeId, Color)>> {
    let mut batch = Vec::with_capacity(p.len());
    for (i, &e) in p.edges.iter().enumerate() {
        let want = p.expected_color(i);
        if c.color(e) != want {
            return Err(Error::StalePath);
        }
        let other = if want == p.colors.0 { p.colors.1 } else { p.colors.0 };
        batch.push((e, other));
    }
    Ok(batch)
}

/// For each color `y != x`, the summed length of all maximal `{x, y}` paths
/// with at least two edges. Index `y` of the result; entries `0` and `x`
/// stay zero.
pub fn path_length_census(c: &PartialColoring, x: Color) -> Vec<u64> {
    let palette = c.palette();
    let mut totals = vec![0u64; palette as usize + 1];
    let n = c.graph().n() as VertexId;
    for y in 1..=palette {
        if y == x {
            continue;
        }
        for v in 0..n {
            let has_x = c.edge_via(v, x).is_some();
            let has_y = c.edge_via(v, y).is_some();
            if has_x == has_y {
                continue;
            }
            let p = trace_path(c, v, x, y, None).expect("endpoint misses one color");
            if p.len() >= 2 && v < p.end() {
                totals[y as usize] += p.len() as u64;
            }
        }
    }
    totals
}
