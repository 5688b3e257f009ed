//! Mutable partial edge colorings with per-vertex color indices.
//!
//! Colors are `1..=palette`; `0` marks an uncolored edge. Each vertex keeps a
//! color-to-edge table, a bitset of missing colors and a designated missing
//! color. Every mutation is journaled so a caller can roll back to any mark.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};

pub type Color = u32;
pub const UNCOLORED: Color = 0;

const NO_EDGE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JournalEntry {
    Recolor { edge: EdgeId, old: Color, new: Color },
    Designated { vertex: VertexId, old: Color },
}

/// Ordered log of color changes since the last clear.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RecolorJournal {
    entries: Vec<JournalEntry>,
}

impl RecolorJournal {
    pub fn entries(&self) -> &[JournalEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Applies the recolor entries in order to a plain per-edge color vector.
    pub fn replay(&self, colors: &mut [Color]) {
        for entry in &self.entries {
            if let JournalEntry::Recolor { edge, new, .. } = *entry {
                colors[edge as usize] = new;
            }
        }
    }

    /// Inverse of [`replay`](Self::replay).
    pub fn undo(&self, colors: &mut [Color]) {
        for entry in self.entries.iter().rev() {
            if let JournalEntry::Recolor { edge, old, .. } = *entry {
                colors[edge as usize] = old;
            }
        }
    }
}

/// Comparable copy of everything a coloring tracks apart from the journal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub colors: Vec<Color>,
    pub slots: Vec<u32>,
    pub miss: Vec<u64>,
    pub designated: Vec<Color>,
    pub uncolored_degree: Vec<u32>,
    pub uncolored: usize,
}

#[derive(Debug, Clone)]
pub struct PartialColoring<'g> {
    graph: &'g Graph,
    palette: u32,
    stride: usize,
    words: usize,
    colors: Vec<Color>,
    slots: Vec<u32>,
    miss: Vec<u64>,
    designated: Vec<Color>,
    uncolored_degree: Vec<u32>,
    uncolored: usize,
    journal: RecolorJournal,
    cost: u64,
}

impl<'g> PartialColoring<'g> {
    /// All edges uncolored. Panics if `palette` is zero.
    pub fn new(graph: &'g Graph, palette: u32) -> Self {
        assert!(palette >= 1, "palette must hold at least one color");
        let n = graph.n();
        let stride = palette as usize + 1;
        let words = stride.div_ceil(64);
        let mut row = vec![0u64; words];
        for c in 1..=palette as usize {
            row[c / 64] |= 1 << (c % 64);
        }
        let mut miss = Vec::with_capacity(n * words);
        for _ in 0..n {
            miss.extend_from_slice(&row);
        }
        PartialColoring {
            graph,
            palette,
            stride,
            words,
            colors: vec![UNCOLORED; graph.m()],
            slots: vec![NO_EDGE; n * stride],
            miss,
            designated: vec![1; n],
            uncolored_degree: (0..n as VertexId).map(|v| graph.degree(v) as u32).collect(),
            uncolored: graph.m(),
            journal: RecolorJournal::default(),
            cost: 0,
        }
    }

    /// Builds a coloring from a per-edge vector; zero entries stay uncolored.
    pub fn from_colors(graph: &'g Graph, palette: u32, colors: &[Color]) -> Result<Self> {
        if colors.len() != graph.m() {
            return Err(Error::InvalidArgument(format!(
                "{} colors given for {} edges",
                colors.len(),
                graph.m()
            )));
        }
        let mut c = PartialColoring::new(graph, palette);
        for (e, &y) in colors.iter().enumerate() {
            if y != UNCOLORED {
                c.assign(e as EdgeId, y)?;
            }
        }
        c.journal.entries.clear();
        c.cost = 0;
        Ok(c)
    }

    #[inline]
    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    #[inline]
    pub fn palette(&self) -> u32 {
        self.palette
    }

    #[inline]
    pub fn color(&self, e: EdgeId) -> Color {
        self.colors[e as usize]
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn into_colors(self) -> Vec<Color> {
        self.colors
    }

    /// Number of uncolored edges, from the incremental counter.
    #[inline]
    pub fn uncolored(&self) -> usize {
        self.uncolored
    }

    #[inline]
    pub fn uncolored_degree(&self, v: VertexId) -> usize {
        self.uncolored_degree[v as usize] as usize
    }

    #[inline]
    pub fn edge_via(&self, v: VertexId, y: Color) -> Option<EdgeId> {
        if y == UNCOLORED || y > self.palette {
            return None;
        }
        let e = self.slots[v as usize * self.stride + y as usize];
        (e != NO_EDGE).then_some(e)
    }

    #[inline]
    pub fn colored_neighbor_via(&self, v: VertexId, y: Color) -> Option<VertexId> {
        self.edge_via(v, y).map(|e| self.graph.opposite(e, v))
    }

    #[inline]
    fn miss_row(&self, v: VertexId) -> &[u64] {
        let start = v as usize * self.words;
        &self.miss[start..start + self.words]
    }

    /// Missing-color bitset of `v`; bit `y` of the concatenated words is
    /// set iff `y` is missing. Bit 0 is never set.
    #[inline]
    pub fn miss_words(&self, v: VertexId) -> &[u64] {
        self.miss_row(v)
    }

    #[inline]
    pub fn is_missing(&self, v: VertexId, y: Color) -> bool {
        y != UNCOLORED && y <= self.palette && {
            let row = self.miss_row(v);
            row[y as usize / 64] >> (y % 64) & 1 == 1
        }
    }

    pub fn missing_colors(&self, v: VertexId) -> Vec<Color> {
        let mut out = Vec::new();
        for (i, &word) in self.miss_row(v).iter().enumerate() {
            let mut w = word;
            while w != 0 {
                out.push((i * 64) as Color + w.trailing_zeros());
                w &= w - 1;
            }
        }
        out
    }

    /// Smallest missing color at `v`.
    pub fn first_missing(&self, v: VertexId) -> Option<Color> {
        first_bit(self.miss_row(v).iter().copied())
    }

    /// Smallest color missing at both `u` and `v`.
    pub fn first_common_missing(&self, u: VertexId, v: VertexId) -> Option<Color> {
        let (a, b) = (self.miss_row(u), self.miss_row(v));
        first_bit(a.iter().zip(b).map(|(x, y)| x & y))
    }

    /// Smallest color missing at `v` for which `keep` holds.
    pub fn first_missing_where(&self, v: VertexId, mut keep: impl FnMut(Color) -> bool) -> Option<Color> {
        for (i, &word) in self.miss_row(v).iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let c = (i * 64) as Color + w.trailing_zeros();
                if keep(c) {
                    return Some(c);
                }
                w &= w - 1;
            }
        }
        None
    }

    #[inline]
    pub fn designated(&self, v: VertexId) -> Color {
        self.designated[v as usize]
    }

    /// Overrides the designated color of `v` with another missing color.
    pub fn set_designated(&mut self, v: VertexId, y: Color) -> Result<()> {
        if !self.is_missing(v, y) {
            return Err(Error::NotMissing { vertex: v, color: y });
        }
        let old = self.designated[v as usize];
        if old != y {
            self.journal.entries.push(JournalEntry::Designated { vertex: v, old });
            self.designated[v as usize] = y;
        }
        Ok(())
    }

    pub fn journal(&self) -> &RecolorJournal {
        &self.journal
    }

    #[inline]
    pub fn journal_len(&self) -> usize {
        self.journal.entries.len()
    }

    pub fn clear_journal(&mut self) {
        self.journal.entries.clear();
    }

    /// Total number of edge color changes ever made, including rolled-back ones.
    #[inline]
    pub fn recolor_cost(&self) -> u64 {
        self.cost
    }

    pub fn add_cost(&mut self, amount: u64) {
        self.cost += amount;
    }

    pub fn check_palette(&self, y: Color) -> Result<()> {
        if y == UNCOLORED || y > self.palette {
            return Err(Error::ColorOutOfRange {
                color: y,
                palette: self.palette,
            });
        }
        Ok(())
    }

    pub fn assign(&mut self, e: EdgeId, y: Color) -> Result<()> {
        if self.colors[e as usize] != UNCOLORED {
            return Err(Error::AlreadyColored(e));
        }
        self.check_palette(y)?;
        self.check_free(e, y)?;
        self.put(e, y);
        self.record(e, UNCOLORED, y);
        self.refresh_designated_of_edge(e);
        Ok(())
    }

    pub fn unassign(&mut self, e: EdgeId) -> Result<()> {
        let old = self.colors[e as usize];
        if old == UNCOLORED {
            return Err(Error::Uncolored(e));
        }
        self.take(e);
        self.record(e, old, UNCOLORED);
        Ok(())
    }

    pub fn recolor(&mut self, e: EdgeId, y: Color) -> Result<()> {
        let old = self.colors[e as usize];
        if old == UNCOLORED {
            return Err(Error::Uncolored(e));
        }
        self.check_palette(y)?;
        if old == y {
            return Ok(());
        }
        self.check_free(e, y)?;
        self.take(e);
        self.put(e, y);
        self.record(e, old, y);
        self.refresh_designated_of_edge(e);
        Ok(())
    }

    /// Sets several edges at once; `UNCOLORED` entries uncolor. The batch is
    /// checked against the state with all listed edges removed, so colors may
    /// move between listed edges. On error nothing changes.
    pub fn apply(&mut self, batch: &[(EdgeId, Color)]) -> Result<()> {
        for &(e, y) in batch {
            if y != UNCOLORED {
                self.check_palette(y)?;
            }
            if e as usize >= self.colors.len() {
                return Err(Error::InvalidArgument(format!("edge {e} out of range")));
            }
        }
        let mut listed: Vec<EdgeId> = batch.iter().map(|&(e, _)| e).collect();
        listed.sort_unstable();
        if let Some(w) = listed.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!("edge {} listed twice", w[0])));
        }
        let olds: Vec<Color> = batch.iter().map(|&(e, _)| self.colors[e as usize]).collect();
        for &(e, _) in batch {
            if self.colors[e as usize] != UNCOLORED {
                self.take(e);
            }
        }
        let mut failure = None;
        let mut placed = 0;
        for &(e, y) in batch {
            if y != UNCOLORED {
                if let Err(err) = self.check_free(e, y) {
                    failure = Some(err);
                    break;
                }
                self.put(e, y);
            }
            placed += 1;
        }
        if let Some(err) = failure {
            for &(e, y) in &batch[..placed] {
                if y != UNCOLORED {
                    self.take(e);
                }
            }
            for (&(e, _), &old) in batch.iter().zip(&olds) {
                if old != UNCOLORED && self.colors[e as usize] == UNCOLORED {
                    self.put(e, old);
                }
            }
            return Err(err);
        }
        for (&(e, y), &old) in batch.iter().zip(&olds) {
            if old != y {
                self.record(e, old, y);
            }
        }
        for &(e, _) in batch {
            self.refresh_designated_of_edge(e);
        }
        Ok(())
    }

    /// Restores the exact state at journal position `mark` and truncates the
    /// journal there.
    pub fn rollback(&mut self, mark: usize) {
        assert!(mark <= self.journal.entries.len(), "rollback mark past journal end");
        let suffix = self.journal.entries.split_off(mark);
        if suffix.is_empty() {
            return;
        }
        // Earliest old value per edge and per vertex wins.
        let mut edges: Vec<(EdgeId, usize, Color)> = Vec::new();
        let mut verts: Vec<(VertexId, usize, Color)> = Vec::new();
        for (i, entry) in suffix.iter().enumerate() {
            match *entry {
                JournalEntry::Recolor { edge, old, .. } => edges.push((edge, i, old)),
                JournalEntry::Designated { vertex, old } => verts.push((vertex, i, old)),
            }
        }
        edges.sort_unstable();
        edges.dedup_by_key(|t| t.0);
        verts.sort_unstable();
        verts.dedup_by_key(|t| t.0);
        for &(e, _, _) in &edges {
            if self.colors[e as usize] != UNCOLORED {
                self.take(e);
            }
        }
        for &(e, _, old) in &edges {
            if old != UNCOLORED {
                self.put(e, old);
            }
        }
        for &(v, _, old) in &verts {
            self.designated[v as usize] = old;
        }
    }

    /// Vertices touched by journal entries after `mark`, sorted and deduplicated.
    pub fn touched_since(&self, mark: usize) -> Vec<VertexId> {
        let mut out = Vec::new();
        for entry in &self.journal.entries[mark..] {
            match *entry {
                JournalEntry::Recolor { edge, .. } => {
                    let (u, v) = self.graph.endpoints(edge);
                    out.push(u);
                    out.push(v);
                }
                JournalEntry::Designated { vertex, .. } => out.push(vertex),
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn check_free(&self, e: EdgeId, y: Color) -> Result<()> {
        let (u, v) = self.graph.endpoints(e);
        for w in [u, v] {
            if let Some(f) = self.edge_via(w, y) {
                if f != e {
                    return Err(Error::ColorConflict {
                        edge: e,
                        color: y,
                        vertex: w,
                    });
                }
            }
        }
        Ok(())
    }

    #[inline]
    fn put(&mut self, e: EdgeId, y: Color) {
        let (u, v) = self.graph.endpoints(e);
        self.colors[e as usize] = y;
        for w in [u, v] {
            let w = w as usize;
            self.slots[w * self.stride + y as usize] = e;
            self.miss[w * self.words + y as usize / 64] &= !(1u64 << (y % 64));
            self.uncolored_degree[w] -= 1;
        }
        self.uncolored -= 1;
    }

    #[inline]
    fn take(&mut self, e: EdgeId) {
        let (u, v) = self.graph.endpoints(e);
        let y = self.colors[e as usize];
        self.colors[e as usize] = UNCOLORED;
        for w in [u, v] {
            let w = w as usize;
            self.slots[w * self.stride + y as usize] = NO_EDGE;
            self.miss[w * self.words + y as usize / 64] |= 1u64 << (y % 64);
            self.uncolored_degree[w] += 1;
        }
        self.uncolored += 1;
    }

    #[inline]
    fn record(&mut self, edge: EdgeId, old: Color, new: Color) {
        self.journal.entries.push(JournalEntry::Recolor { edge, old, new });
        self.cost += 1;
    }

    fn refresh_designated_of_edge(&mut self, e: EdgeId) {
        let (u, v) = self.graph.endpoints(e);
        self.refresh_designated(u);
        self.refresh_designated(v);
    }

    /// Moves the designated color of `v` to its smallest missing color if
    /// the current one is no longer missing.
    fn refresh_designated(&mut self, v: VertexId) {
        let cur = self.designated[v as usize];
        if self.is_missing(v, cur) {
            return;
        }
        // A vertex of degree palette may miss nothing once fully colored;
        // keep the stale value then, it is never read as a fan color.
        if let Some(first) = self.first_missing(v) {
            self.journal.entries.push(JournalEntry::Designated { vertex: v, old: cur });
            self.designated[v as usize] = first;
        }
    }

    /// Full recount of uncolored edges from the color vector.
    pub fn count_uncolored(&self) -> usize {
        self.colors.iter().filter(|&&c| c == UNCOLORED).count()
    }

    /// Independent check that no two adjacent edges share a color.
    pub fn is_proper(&self) -> bool {
        is_proper_coloring(self.graph, &self.colors)
    }

    pub fn colors_used(&self) -> usize {
        colors_used(&self.colors)
    }

    pub fn uses_at_most(&self, k: usize) -> bool {
        self.colors_used() <= k
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            colors: self.colors.clone(),
            slots: self.slots.clone(),
            miss: self.miss.clone(),
            designated: self.designated.clone(),
            uncolored_degree: self.uncolored_degree.clone(),
            uncolored: self.uncolored,
        }
    }

    /// Recomputes every index from the color vector and compares.
    pub fn audit(&self) -> Result<(), String> {
        let mut fresh = PartialColoring::new(self.graph, self.palette);
        for (e, &y) in self.colors.iter().enumerate() {
            if y != UNCOLORED {
                if y > self.palette {
                    return Err(format!("edge {e} has color {y} outside palette"));
                }
                fresh
                    .check_free(e as EdgeId, y)
                    .map_err(|err| format!("improper: {err}"))?;
                fresh.put(e as EdgeId, y);
            }
        }
        if fresh.slots != self.slots {
            return Err("color index out of sync".into());
        }
        if fresh.miss != self.miss {
            return Err("missing-color sets out of sync".into());
        }
        if fresh.uncolored_degree != self.uncolored_degree || fresh.uncolored != self.uncolored {
            return Err("uncolored counters out of sync".into());
        }
        for v in 0..self.graph.n() as VertexId {
            let d = self.designated(v);
            if !self.is_missing(v, d) && self.first_missing(v).is_some() {
                return Err(format!("designated color {d} of vertex {v} is not missing"));
            }
        }
        Ok(())
    }
}

fn first_bit(words: impl Iterator<Item = u64>) -> Option<Color> {
    for (i, w) in words.enumerate() {
        if w != 0 {
            return Some((i * 64) as Color + w.trailing_zeros());
        }
    }
    None
}

/// `true` iff no vertex sees the same nonzero color twice.
pub fn is_proper_coloring(g: &Graph, colors: &[Color]) -> bool {
    if colors.len() != g.m() {
        return false;
    }
    let top = colors.iter().copied().max().unwrap_or(0) as usize;
    let mut stamp = vec![u32::MAX; top + 1];
    for v in 0..g.n() as VertexId {
        for nb in g.neighbors(v) {
            let c = colors[nb.edge as usize];
            if c == UNCOLORED {
                continue;
            }
            if stamp[c as usize] == v {
                return false;
            }
            stamp[c as usize] = v;
        }
    }
    true
}

/// Number of distinct nonzero colors.
pub fn colors_used(colors: &[Color]) -> usize {
    let mut used: Vec<Color> = colors.iter().copied().filter(|&c| c != UNCOLORED).collect();
    used.sort_unstable();
    used.dedup();
    used.len()
}

/// Writes `<u> <v> <color>` per edge in id order.
pub fn write_coloring<W: Write>(g: &Graph, colors: &[Color], mut out: W) -> Result<()> {
    for ((u, v), c) in g.edges().zip(colors) {
        writeln!(out, "{u} {v} {c}")?;
    }
    Ok(())
}

/// Reads a coloring file against `g`; lines may come in any order.
pub fn read_coloring<R: BufRead>(g: &Graph, reader: R) -> Result<Vec<Color>> {
    let mut colors = vec![UNCOLORED; g.m()];
    let mut seen = vec![false; g.m()];
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: lineno, msg };
        let fields: Vec<u64> = line
            .split_ascii_whitespace()
            .map(|f| f.parse().map_err(|_| err(format!("bad number `{f}`"))))
            .collect::<Result<_>>()?;
        let [u, v, c] = fields[..] else {
            return Err(err("expected `<u> <v> <color>`".into()));
        };
        let (u, v, c) = (u as VertexId, v as VertexId, c as Color);
        let e = g.find_edge(u, v).ok_or_else(|| err(format!("no edge ({u}, {v})")))?;
        if seen[e as usize] {
            return Err(err(format!("edge ({u}, {v}) listed twice")));
        }
        seen[e as usize] = true;
        colors[e as usize] = c;
    }
    if let Some(e) = seen.iter().position(|&s| !s) {
        let (u, v) = g.endpoints(e as EdgeId);
        return Err(Error::Parse {
            line: 0,
            msg: format!("edge ({u}, {v}) missing from coloring"),
        });
    }
    Ok(colors)
}
