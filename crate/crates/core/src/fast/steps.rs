//! The four ways one round tries to color a star edge of a center `u` that
//! misses the round color `x`. Each attempt either commits one atomic batch
//! that colors exactly one more edge at `u`, or changes nothing.

use rand::Rng;

use super::forest::FanForest;
use super::state::ExtensionState;
use crate::altpath::{flip_batch, trace_from, trace_path, AltPath};
use crate::coloring::{Color, PartialColoring};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, VertexId};
use crate::vizing::{extend_edge_with, Extension, VizingParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    /// `colored` went from uncolored to colored; `path_len` is the length
    /// of the alternating path that was flipped.
    Success { colored: EdgeId, path_len: usize },
    Fail { truncated: bool },
}

impl StepOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, StepOutcome::Success { .. })
    }

    const FAIL: StepOutcome = StepOutcome::Fail { truncated: false };
    const TRUNCATED: StepOutcome = StepOutcome::Fail { truncated: true };
}

/// A branching node and its edge color, drawn by the third step and reused
/// by the fourth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchPick {
    pub node: usize,
    pub scale: u32,
    pub color: Color,
}

fn commit(c: &mut PartialColoring, batch: &[(EdgeId, Color)], colored: EdgeId, path_len: usize) -> Result<StepOutcome> {
    c.apply(batch)
        .map_err(|err| Error::Internal(format!("extension step produced a conflict: {err}")))?;
    Ok(StepOutcome::Success { colored, path_len })
}

fn flips_after_first(p: &AltPath) -> impl Iterator<Item = (EdgeId, Color)> + '_ {
    p.edges.iter().enumerate().skip(1).map(|(i, &e)| {
        let want = p.expected_color(i);
        let other = if want == p.colors.0 { p.colors.1 } else { p.colors.0 };
        (e, other)
    })
}

/// Gives the uncolored edge of the client of singleton `from` the color
/// of `from`, and shifts colors up the tree so that each node on the way
/// to `to` takes its parent's color. `(u, to)` is left for the caller.
fn chain_shift(forest: &FanForest, from: usize, to: usize) -> Result<Vec<(EdgeId, Color)>> {
    let y = forest.colors[from];
    let client_edge = forest
        .lst_edge(y)
        .ok_or_else(|| Error::Internal(format!("node color {y} is not a singleton")))?;
    let chain = forest.chain(from, to);
    let mut batch = vec![(client_edge, y)];
    for w in chain.windows(2) {
        batch.push((forest.edges[w[0]], forest.colors[w[1]]));
    }
    Ok(batch)
}

/// Colors `e = (u, v)` with its tentative color if `u` misses it, or flips
/// the `{x, y}` path from `v` and colors `e` with `x`.
pub fn step1_try(c: &mut PartialColoring, st: &ExtensionState, u: VertexId, e: EdgeId) -> Result<StepOutcome> {
    let v = c.graph().opposite(e, u);
    let x = st.x;
    let y = st.clr(e).ok_or_else(|| Error::Internal(format!("edge {e} is not tracked")))?;
    if c.is_missing(u, y) {
        return commit(c, &[(e, y)], e, 0);
    }
    let p = trace_path(c, v, x, y, Some(st.cap))?;
    if p.truncated {
        return Ok(StepOutcome::TRUNCATED);
    }
    if !p.is_empty() && p.end() == u {
        return Ok(StepOutcome::FAIL);
    }
    let mut batch = flip_batch(c, &p)?;
    batch.push((e, x));
    commit(c, &batch, e, p.len())
}

/// Requires the tentative color `y` of `e` to be reserved by `v` alone.
/// If the node `w` behind `y` is the only singleton of its tree, runs a
/// capped fan extension of `e`. Otherwise, with a singleton `w'` strictly
/// below `w`, traces the path from `u` through `w`; when it ends at `v` the
/// client of `w'` is colored via a tree shift, else the path is flipped and
/// `e` takes `y`.
pub fn step2_try(
    c: &mut PartialColoring,
    st: &ExtensionState,
    forest: &FanForest,
    u: VertexId,
    e: EdgeId,
) -> Result<StepOutcome> {
    let v = c.graph().opposite(e, u);
    let x = st.x;
    let y = st.clr(e).ok_or_else(|| Error::Internal(format!("edge {e} is not tracked")))?;
    if forest.lst_count(y) != 1 {
        return Ok(StepOutcome::FAIL);
    }
    let Some(w) = forest.node_of_color(y) else {
        return Ok(StepOutcome::FAIL);
    };
    if forest.component_singletons[forest.component[w]] == 1 {
        let params = VizingParams {
            cap: Some(st.cap),
            first_color: Some(y),
            free_color: Some(x),
        };
        return Ok(match extend_edge_with(c, u, v, params)? {
            Extension::Extended { path_len } => StepOutcome::Success { colored: e, path_len },
            Extension::TruncatedRolledBack => StepOutcome::TRUNCATED,
        });
    }
    let Some(below) = forest.best_strict(w) else {
        return Ok(StepOutcome::FAIL);
    };
    let q = trace_from(c, u, y, x, Some(st.cap))?;
    if q.truncated {
        return Ok(StepOutcome::TRUNCATED);
    }
    if q.end() == v {
        let mut batch = chain_shift(forest, below, w)?;
        batch.push((forest.edges[w], x));
        batch.extend(flips_after_first(&q));
        let colored = batch[0].0;
        commit(c, &batch, colored, q.len())
    } else {
        let mut batch = flip_batch(c, &q)?;
        batch.push((e, y));
        commit(c, &batch, e, q.len())
    }
}

/// Draws a scale `h`, a node whose branch number lies in `[2^h, 2^{h+1})`
/// and one of its active children `c'`; flips the `{x, z}` path from `c'`
/// (`z` the branching node's color) and colors the client of the best
/// singleton below `c'` via a tree shift ending with `(u, c') = x`.
pub fn step3_try<R: Rng>(
    c: &mut PartialColoring,
    st: &ExtensionState,
    forest: &FanForest,
    u: VertexId,
    rng: &mut R,
) -> Result<(StepOutcome, Option<BranchPick>)> {
    let delta = c.graph().max_degree().max(2);
    let top = usize::BITS - (delta - 1).leading_zeros();
    let scale = rng.gen_range(1..=top);
    let lo = 1u64 << scale;
    let hi = lo << 1;
    let candidates: Vec<usize> = (0..forest.len())
        .filter(|&i| (lo..hi).contains(&(forest.branch[i] as u64)))
        .collect();
    if candidates.is_empty() {
        return Ok((StepOutcome::FAIL, None));
    }
    let b = candidates[rng.gen_range(0..candidates.len())];
    let kids: Vec<usize> = forest.active_children(b).collect();
    let child = kids[rng.gen_range(0..kids.len())];
    let z = forest.colors[b];
    let pick = BranchPick { node: b, scale, color: z };
    let s = forest.best[child].expect("active child has a singleton below");
    let r = trace_path(c, forest.nodes[child], st.x, z, Some(st.cap))?;
    if r.truncated {
        return Ok((StepOutcome::TRUNCATED, Some(pick)));
    }
    if !r.is_empty() && r.end() == u {
        return Ok((StepOutcome::FAIL, Some(pick)));
    }
    let mut batch = chain_shift(forest, s, child)?;
    batch.push((forest.edges[child], st.x));
    batch.extend(flip_batch(c, &r)?);
    let colored = batch[0].0;
    Ok((commit(c, &batch, colored, r.len())?, Some(pick)))
}

/// With the same branching node `b` of color `z`: traces the `{z, x}` path
/// from `u` through `b`, picks the smallest active child `c1` of `b` that
/// is not its far end, shifts the tree below `c1` so that `(u, c1) = z`,
/// gives `(u, b)` the color `x` and flips the rest of the path.
pub fn step4_try(
    c: &mut PartialColoring,
    st: &ExtensionState,
    forest: &FanForest,
    u: VertexId,
    pick: BranchPick,
) -> Result<StepOutcome> {
    let b = pick.node;
    let z = pick.color;
    if c.edge_via(u, z) != Some(forest.edges[b]) {
        return Err(Error::StaleFan);
    }
    let s = trace_from(c, u, z, st.x, Some(st.cap))?;
    if s.truncated {
        return Ok(StepOutcome::TRUNCATED);
    }
    let end = s.end();
    let Some(c1) = forest.active_children(b).find(|&ch| forest.nodes[ch] != end) else {
        return Ok(StepOutcome::FAIL);
    };
    let t = forest.best[c1].expect("active child has a singleton below");
    let mut batch = chain_shift(forest, t, c1)?;
    batch.push((forest.edges[c1], z));
    batch.push((forest.edges[b], st.x));
    batch.extend(flips_after_first(&s));
    let colored = batch[0].0;
    commit(c, &batch, colored, s.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::UNCOLORED;
    use crate::fast::forest::tests::single_center_state;
    use crate::graph::Graph;
    use crate::test_support::{gnm, random_partial};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn colored<'g>(g: &'g Graph, palette: u32, assignment: &[((u32, u32), Color)]) -> PartialColoring<'g> {
        let mut c = PartialColoring::new(g, palette);
        for &((a, b), y) in assignment {
            c.assign(g.find_edge(a, b).unwrap(), y).unwrap();
        }
        c.clear_journal();
        c
    }

    fn designate(c: &mut PartialColoring, pairs: &[(u32, Color)]) {
        for &(v, y) in pairs {
            c.set_designated(v, y).unwrap();
        }
        c.clear_journal();
    }

    fn check_success(c: &PartialColoring, before_uncolored: usize, out: StepOutcome, expect: EdgeId) {
        let StepOutcome::Success { colored, .. } = out else {
            panic!("expected success, got {out:?}");
        };
        assert_eq!(colored, expect);
        assert!(c.is_proper());
        assert_eq!(c.count_uncolored(), before_uncolored - 1);
        assert_ne!(c.color(expect), UNCOLORED);
        c.audit().unwrap();
    }

    #[test]
    fn step1_direct_assignment() {
        let g = Graph::new(3, &[(0, 1), (0, 2)]).unwrap();
        let mut c = colored(&g, 3, &[((0, 2), 1)]);
        designate(&mut c, &[(1, 2)]);
        let (_, st) = single_center_state(&c, 0, 3);
        let e = g.find_edge(0, 1).unwrap();
        assert_eq!(st.clr(e), Some(2));
        let cost = c.recolor_cost();
        let out = step1_try(&mut c, &st, 0, e).unwrap();
        assert_eq!(out, StepOutcome::Success { colored: e, path_len: 0 });
        assert_eq!(c.color(e), 2);
        assert_eq!(c.recolor_cost(), cost + 1);
    }

    #[test]
    fn step1_path_back_to_center_fails_cleanly() {
        // u = 0 misses x = 3, v = 1 reserves y = 1 (held at u by (0, 2)).
        // Path from v: 1 -3- 2 -1- 0 ends at u.
        let g = Graph::new(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let mut c = colored(&g, 3, &[((0, 2), 1), ((1, 2), 3)]);
        designate(&mut c, &[(1, 1)]);
        let (_, st) = single_center_state(&c, 0, 3);
        let e = g.find_edge(0, 1).unwrap();
        let before = c.snapshot();
        assert_eq!(step1_try(&mut c, &st, 0, e).unwrap(), StepOutcome::FAIL);
        assert_eq!(c.snapshot(), before);
        assert_eq!(c.journal_len(), 0);
    }

    #[test]
    fn step1_flips_path_and_uses_round_color() {
        // u = 0 misses x = 3; v = 1 reserves y = 1, held at u by (0, 2).
        // Path from v: 1 -3- 3 -1- 4, ends away from u.
        let g = Graph::new(5, &[(0, 1), (0, 2), (1, 3), (3, 4)]).unwrap();
        let mut c = colored(&g, 3, &[((0, 2), 1), ((1, 3), 3), ((3, 4), 1)]);
        designate(&mut c, &[(1, 1)]);
        let (_, st) = single_center_state(&c, 0, 3);
        let e = g.find_edge(0, 1).unwrap();
        let before = c.count_uncolored();
        let out = step1_try(&mut c, &st, 0, e).unwrap();
        check_success(&c, before, out, e);
        assert_eq!(c.color(e), 3);
        assert_eq!(c.color(g.find_edge(1, 3).unwrap()), 1);
    }

    #[test]
    fn step2_rotation_then_flip_colors_other_client() {
        // Center u = 0, round color x = 5.
        // Colored neighbors: w = 1 (color 1), w' = 2 (color 2).
        // Tree: w' designates 1, so w' hangs below w.
        // Clients: v = 3 reserves 1 (= ψ(u, w)), v' = 4 reserves 2 (= ψ(u, w')).
        // Q from u: 0 -1- 1 -5- 5 -1- 6 -5- 3, ends at v.
        let g = Graph::new(
            7,
            &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 5), (5, 6), (6, 3)],
        )
        .unwrap();
        let mut c = colored(
            &g,
            5,
            &[((0, 1), 1), ((0, 2), 2), ((1, 5), 5), ((5, 6), 1), ((6, 3), 5)],
        );
        designate(&mut c, &[(1, 2), (2, 1), (3, 1), (4, 2)]);
        let (stars, st) = single_center_state(&c, 0, 5);
        let forest = FanForest::build(&c, &st, &stars, 0);
        let e = g.find_edge(0, 3).unwrap();
        // w and w' designate each other's colors; the cycle is cut at 2
        assert_eq!(forest.parent, vec![None, Some(0)]);
        assert_eq!(step1_try(&mut c, &st, 0, e).unwrap(), StepOutcome::FAIL);
        let before = c.count_uncolored();
        let out = step2_try(&mut c, &st, &forest, 0, e).unwrap();
        let e2 = g.find_edge(0, 4).unwrap();
        check_success(&c, before, out, e2);
        assert_eq!(c.color(e2), 2);
        assert_eq!(c.color(g.find_edge(0, 2).unwrap()), 1);
        assert_eq!(c.color(g.find_edge(0, 1).unwrap()), 5);
        assert_eq!(c.color(e), UNCOLORED);
    }

    #[test]
    fn step2_flip_then_assign_reserved_color() {
        // As above, but the path from u ends at 6 instead of v.
        let g = Graph::new(7, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 5), (5, 6)]).unwrap();
        let mut c = colored(&g, 5, &[((0, 1), 1), ((0, 2), 2), ((1, 5), 5), ((5, 6), 1)]);
        designate(&mut c, &[(1, 2), (2, 1), (3, 1), (4, 2)]);
        let (stars, st) = single_center_state(&c, 0, 5);
        let forest = FanForest::build(&c, &st, &stars, 0);
        let e = g.find_edge(0, 3).unwrap();
        let before = c.count_uncolored();
        let out = step2_try(&mut c, &st, &forest, 0, e).unwrap();
        check_success(&c, before, out, e);
        assert_eq!(c.color(e), 1);
        assert_eq!(c.color(g.find_edge(0, 1).unwrap()), 5);
    }

    #[test]
    fn step2_truncation_leaves_state_untouched() {
        let g = Graph::new(7, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 5), (5, 6)]).unwrap();
        let mut c = colored(&g, 5, &[((0, 1), 1), ((0, 2), 2), ((1, 5), 5), ((5, 6), 1)]);
        designate(&mut c, &[(1, 2), (2, 1), (3, 1), (4, 2)]);
        let (stars, mut st) = single_center_state(&c, 0, 5);
        st.cap = 1;
        let forest = FanForest::build(&c, &st, &stars, 0);
        let e = g.find_edge(0, 3).unwrap();
        let before = c.snapshot();
        assert_eq!(step2_try(&mut c, &st, &forest, 0, e).unwrap(), StepOutcome::TRUNCATED);
        assert_eq!(c.snapshot(), before);
    }

    /// Center 0 with round color x = 6 and a branching node b = 1 of color
    /// z = 1 whose children 2 and 3 (colors 2 and 3) are singletons of
    /// clients 4 and 5.
    fn branching(extra: &[(u32, u32)]) -> Graph {
        let mut edges = vec![(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)];
        edges.extend_from_slice(extra);
        Graph::new(10, &edges).unwrap()
    }

    fn branching_coloring<'g>(g: &'g Graph, extra_colors: &[((u32, u32), Color)]) -> PartialColoring<'g> {
        let mut assignment = vec![((0, 1), 1), ((0, 2), 2), ((0, 3), 3)];
        assignment.extend_from_slice(extra_colors);
        let mut c = colored(g, 6, &assignment);
        designate(&mut c, &[(1, 4), (2, 1), (3, 1), (4, 2), (5, 3)]);
        c
    }

    #[test]
    fn step3_shifts_child_and_flips_its_path() {
        // From child 2 the {6, 1} path is 2 -6- 6 -1- 7, away from u.
        let extra = [(2, 6), (6, 7)];
        let colors = [((2, 6), 6), ((6, 7), 1)];
        let g = branching(&extra);
        let mut c = branching_coloring(&g, &colors);
        let (stars, st) = single_center_state(&c, 0, 6);
        let forest = FanForest::build(&c, &st, &stars, 0);
        assert_eq!(forest.branch[0], 2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let before = c.count_uncolored();
        // with Δ = 5 scales run over 1..=3; only scale 1 has a candidate
        let mut seen_success = false;
        for _ in 0..20 {
            let snap = c.snapshot();
            let (out, pick) = step3_try(&mut c, &st, &forest, 0, &mut rng).unwrap();
            if let StepOutcome::Success { colored, .. } = out {
                assert_eq!(pick.unwrap().scale, 1);
                assert!(colored == g.find_edge(0, 4).unwrap() || colored == g.find_edge(0, 5).unwrap());
                check_success(&c, before, out, colored);
                seen_success = true;
                break;
            }
            assert_eq!(c.snapshot(), snap);
        }
        assert!(seen_success);
    }

    #[test]
    fn step3_without_branching_fails() {
        let g = Graph::new(3, &[(0, 1), (0, 2)]).unwrap();
        let mut c = colored(&g, 3, &[((0, 1), 1)]);
        designate(&mut c, &[(2, 1)]);
        let (stars, st) = single_center_state(&c, 0, 3);
        let forest = FanForest::build(&c, &st, &stars, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10 {
            assert_eq!(step3_try(&mut c, &st, &forest, 0, &mut rng).unwrap(), (StepOutcome::FAIL, None));
        }
    }

    #[test]
    fn step4_rotates_around_branching_node() {
        // b continues the {1, 6} path from u: 0 -1- 1 -6- 8 -1- 9.
        let extra = [(1, 8), (8, 9)];
        let colors = [((1, 8), 6), ((8, 9), 1)];
        let g = branching(&extra);
        let mut c = branching_coloring(&g, &colors);
        let (stars, st) = single_center_state(&c, 0, 6);
        let forest = FanForest::build(&c, &st, &stars, 0);
        let pick = BranchPick { node: 0, scale: 1, color: 1 };
        let before = c.count_uncolored();
        let out = step4_try(&mut c, &st, &forest, 0, pick).unwrap();
        // S = 0 -1- 1 -6- 8 -1- 9 ends at 9, so child 2 is used
        let e2 = g.find_edge(0, 4).unwrap();
        check_success(&c, before, out, e2);
        assert_eq!(c.color(g.find_edge(0, 1).unwrap()), 6);
        assert_eq!(c.color(g.find_edge(0, 2).unwrap()), 1);
        assert_eq!(c.color(e2), 2);
    }

    #[test]
    fn step4_skips_child_at_path_end() {
        // S = 0 -1- 1 -6- 2 ends at child 2, so child 3 is rotated instead.
        let g = branching(&[(1, 2)]);
        let mut c = branching_coloring(&g, &[((1, 2), 6)]);
        let (stars, st) = single_center_state(&c, 0, 6);
        let forest = FanForest::build(&c, &st, &stars, 0);
        let pick = BranchPick { node: 0, scale: 1, color: 1 };
        let before = c.count_uncolored();
        let out = step4_try(&mut c, &st, &forest, 0, pick).unwrap();
        let e2 = g.find_edge(0, 5).unwrap();
        check_success(&c, before, out, e2);
        assert_eq!(c.color(g.find_edge(0, 3).unwrap()), 1);
        assert_eq!(c.color(g.find_edge(1, 2).unwrap()), 1);
    }

    #[test]
    fn step4_truncation_is_clean() {
        let extra = [(1, 8), (8, 9)];
        let colors = [((1, 8), 6), ((8, 9), 1)];
        let g = branching(&extra);
        let mut c = branching_coloring(&g, &colors);
        let (stars, mut st) = single_center_state(&c, 0, 6);
        st.cap = 2;
        let forest = FanForest::build(&c, &st, &stars, 0);
        let before = c.snapshot();
        let pick = BranchPick { node: 0, scale: 1, color: 1 };
        assert_eq!(step4_try(&mut c, &st, &forest, 0, pick).unwrap(), StepOutcome::TRUNCATED);
        assert_eq!(c.snapshot(), before);
    }

    #[test]
    fn random_attempts_either_extend_or_leave_no_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut successes = [0usize; 4];
        for seed in 0..60 {
            let g = gnm(30, 110, seed);
            let c0 = random_partial(&g, g.max_degree() as u32 + 1, 0.7, seed);
            for u in 0..g.n() as VertexId {
                let mut c = c0.clone();
                let Some(x) = c.first_missing(u) else { continue };
                let (stars, mut st) = single_center_state(&c, u, x);
                st.cap = rng.gen_range(1..6);
                let edges: Vec<EdgeId> = st.tracked_edges(&stars, u).collect();
                let Some(&e) = edges.first() else { continue };
                let forest = FanForest::build(&c, &st, &stars, u);
                let before = c.snapshot();
                let uncolored = c.count_uncolored();
                let mut outs = vec![step1_try(&mut c, &st, u, e).unwrap()];
                if !outs[0].is_success() {
                    outs.push(step2_try(&mut c, &st, &forest, u, e).unwrap());
                }
                let mut pick = None;
                if !outs.last().unwrap().is_success() {
                    let (out, p) = step3_try(&mut c, &st, &forest, u, &mut rng).unwrap();
                    outs.push(out);
                    pick = p;
                }
                if !outs.last().unwrap().is_success() {
                    if let Some(p) = pick {
                        outs.push(step4_try(&mut c, &st, &forest, u, p).unwrap());
                    }
                }
                let last = *outs.last().unwrap();
                if let StepOutcome::Success { colored, .. } = last {
                    successes[outs.len() - 1] += 1;
                    assert!(c.is_proper());
                    assert_eq!(c.count_uncolored(), uncolored - 1);
                    assert_eq!(before.colors[colored as usize], UNCOLORED);
                    let (a, b) = g.endpoints(colored);
                    assert!(a == u || b == u);
                    c.audit().unwrap();
                } else {
                    assert_eq!(c.snapshot(), before);
                    assert_eq!(c.journal_len(), 0);
                }
            }
        }
        assert!(successes[0] > 0 && successes[1] + successes[2] + successes[3] > 0, "{successes:?}");
    }
}
