//! Running sums that pick each round's degree class and color.

use super::plan::CenterKind;
use super::state::StarIndex;
use crate::coloring::{Color, PartialColoring};
use crate::graph::VertexId;

/// Degree class of a positive star degree: `⌊log2 deg⌋`.
pub fn degree_class(deg: usize) -> u32 {
    debug_assert!(deg > 0);
    usize::BITS - 1 - deg.leading_zeros()
}

/// For every center kind, degree class and color, the summed star degree
/// of centers in that class that miss the color, plus per-class totals.
/// Updates are diffs against a per-center snapshot.
#[derive(Debug, Clone)]
pub struct RoundSelector {
    stride: usize,
    classes: usize,
    words: usize,
    sums: Vec<u64>,
    totals: Vec<u64>,
    snap_miss: Vec<u64>,
    snap_deg: Vec<u32>,
}

impl RoundSelector {
    pub fn new(c: &PartialColoring, stars: &StarIndex) -> RoundSelector {
        let g = c.graph();
        let stride = c.palette() as usize + 1;
        let classes = degree_class(g.max_degree().max(1)) as usize + 1;
        let words = stride.div_ceil(64);
        let mut sel = RoundSelector {
            stride,
            classes,
            words,
            sums: vec![0; 2 * classes * stride],
            totals: vec![0; 2 * classes],
            snap_miss: vec![0; g.n() * words],
            snap_deg: vec![0; g.n()],
        };
        for kind in [CenterKind::High, CenterKind::Low] {
            for &u in stars.centers(kind) {
                sel.refresh(c, stars, u);
            }
        }
        sel
    }

    fn slot(&self, kind: CenterKind, class: usize) -> usize {
        kind.index() * self.classes + class
    }

    /// Summed star degree of `kind` centers in `class` missing `z`.
    pub fn sum(&self, kind: CenterKind, class: u32, z: Color) -> u64 {
        self.sums[self.slot(kind, class as usize) * self.stride + z as usize]
    }

    /// Summed star degree of `kind` centers in `class`.
    pub fn total(&self, kind: CenterKind, class: u32) -> u64 {
        self.totals[self.slot(kind, class as usize)]
    }

    fn add_word(&mut self, base: usize, index: usize, word: u64, delta: i64) {
        let mut w = word;
        while w != 0 {
            let z = index * 64 + w.trailing_zeros() as usize;
            let s = &mut self.sums[base + z];
            *s = s.wrapping_add_signed(delta);
            w &= w - 1;
        }
    }

    fn add_bits(&mut self, base: usize, words: &[u64], delta: i64) {
        for (i, &word) in words.iter().enumerate() {
            self.add_word(base, i, word, delta);
        }
    }

    /// Brings the sums up to date for vertex `v`; a no-op for non-centers.
    pub fn refresh(&mut self, c: &PartialColoring, stars: &StarIndex, v: VertexId) {
        let Some(kind) = stars.kind(v) else {
            return;
        };
        let new_deg = stars.deg(v) as u32;
        let old_deg = self.snap_deg[v as usize];
        let range = v as usize * self.words..(v as usize + 1) * self.words;
        let new_miss = c.miss_words(v);
        if old_deg == new_deg {
            if new_deg == 0 {
                self.snap_miss[range].copy_from_slice(new_miss);
                return;
            }
            let base = self.slot(kind, degree_class(new_deg as usize) as usize) * self.stride;
            for (i, &new) in new_miss.iter().enumerate().take(self.words) {
                let old = self.snap_miss[range.start + i];
                if old != new {
                    self.add_word(base, i, old & !new, -(new_deg as i64));
                    self.add_word(base, i, new & !old, new_deg as i64);
                    self.snap_miss[range.start + i] = new;
                }
            }
            return;
        }
        if old_deg > 0 {
            let slot = self.slot(kind, degree_class(old_deg as usize) as usize);
            let old: Vec<u64> = self.snap_miss[range.clone()].to_vec();
            self.add_bits(slot * self.stride, &old, -(old_deg as i64));
            self.totals[slot] -= old_deg as u64;
        }
        if new_deg > 0 {
            let slot = self.slot(kind, degree_class(new_deg as usize) as usize);
            self.add_bits(slot * self.stride, new_miss, new_deg as i64);
            self.totals[slot] += new_deg as u64;
        }
        self.snap_miss[range].copy_from_slice(new_miss);
        self.snap_deg[v as usize] = new_deg;
    }

    /// The class with the largest total, then the color with the largest
    /// sum inside it; ties go to the smaller index.
    pub fn select(&self, kind: CenterKind) -> Option<(u32, Color)> {
        let mut best: Option<(u32, u64)> = None;
        for class in 0..self.classes as u32 {
            let t = self.total(kind, class);
            if t > 0 && best.is_none_or(|(_, b)| t > b) {
                best = Some((class, t));
            }
        }
        let (class, _) = best?;
        let mut pick: Option<(Color, u64)> = None;
        for z in 1..self.stride as Color {
            let s = self.sum(kind, class, z);
            if s > 0 && pick.is_none_or(|(_, b)| s > b) {
                pick = Some((z, s));
            }
        }
        pick.map(|(z, _)| (class, z))
    }

    /// Centers of `kind` in `class` that miss `x`, ascending.
    pub fn members(
        &self,
        c: &PartialColoring,
        stars: &StarIndex,
        kind: CenterKind,
        class: u32,
        x: Color,
    ) -> Vec<VertexId> {
        stars
            .centers(kind)
            .iter()
            .copied()
            .filter(|&u| {
                let d = stars.deg(u);
                d > 0 && degree_class(d) == class && c.is_missing(u, x)
            })
            .collect()
    }
}
