//! Phases and rounds over the star edges left by the initial coloring.

use rand::Rng;

use super::forest::FanForest;
use super::plan::{cbrt_n, log2n, CenterKind, SamplePlan};
use super::selector::RoundSelector;
use super::state::{congestion_threshold, length_cap, ExtensionState, StarIndex};
use super::steps::{step1_try, step2_try, step3_try, step4_try, StepOutcome};
use super::{FastConfig, FastStats, RoundRecord};
use crate::coloring::PartialColoring;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, VertexId};
use crate::vizing::extend_edge_vizing;

/// Everything the rounds mutate besides the coloring.
pub struct Engine {
    pub stars: StarIndex,
    pub selector: RoundSelector,
    pub state: ExtensionState,
}

impl Engine {
    pub fn new(c: &PartialColoring, plan: &SamplePlan) -> Engine {
        let stars = StarIndex::new(c, plan);
        Engine::from_stars(c, stars)
    }

    pub fn from_stars(c: &PartialColoring, stars: StarIndex) -> Engine {
        Engine {
            selector: RoundSelector::new(c, &stars),
            state: ExtensionState::new(c.graph()),
            stars,
        }
    }

    /// Folds the journal into the star counts and selector, then clears it.
    fn absorb(&mut self, c: &mut PartialColoring) {
        for v in c.touched_since(0) {
            self.selector.refresh(c, &self.stars, v);
        }
        c.clear_journal();
    }

    /// Colors one star edge by unbounded fan extension.
    fn extend_plain(&mut self, c: &mut PartialColoring, e: EdgeId) -> Result<()> {
        let u = self.stars.center_of(e).expect("star edge");
        let v = c.graph().opposite(e, u);
        extend_edge_vizing(c, u, v, None)?;
        self.stars.mark_colored(e);
        self.absorb(c);
        Ok(())
    }

    /// Colors every remaining star edge of `kind` directly.
    pub fn finish_kind(&mut self, c: &mut PartialColoring, kind: CenterKind) -> Result<usize> {
        let mut count = 0;
        let centers = self.stars.centers(kind).to_vec();
        for u in centers {
            while let Some(&e) = self.stars.star_edges(u).first() {
                self.extend_plain(c, e)?;
                count += 1;
            }
        }
        Ok(count)
    }

    /// Updates the round state after `u` colored `colored`.
    pub fn settle(&mut self, c: &mut PartialColoring, u: VertexId, colored: EdgeId) {
        let g = c.graph();
        let touched = c.touched_since(0);
        self.state.untrack(g, &self.stars, colored);
        self.stars.mark_colored(colored);
        self.state.remove_member(g, &self.stars, u);
        let x = self.state.x;
        for &w in &touched {
            if self.state.contains(w) && !c.is_missing(w, x) {
                self.state.remove_member(g, &self.stars, w);
            }
        }
        for &w in &touched {
            self.state.repair_client(c, w);
            self.selector.refresh(c, &self.stars, w);
        }
        c.clear_journal();
    }

    /// One attempt from a random member on a random tracked edge of it.
    /// Returns the id (1 to 4) of the step that succeeded.
    pub fn iterate<R: Rng>(
        &mut self,
        c: &mut PartialColoring,
        rng: &mut R,
        stats: &mut FastStats,
        record: &mut RoundRecord,
    ) -> Result<Option<usize>> {
        debug_assert_eq!(c.journal_len(), 0);
        let st = &self.state;
        let u = st.sample_member(rng);
        let edges: Vec<EdgeId> = st.tracked_edges(&self.stars, u).collect();
        if edges.is_empty() {
            return Err(Error::Internal(format!("member {u} has no tracked edge")));
        }
        let e = edges[rng.gen_range(0..edges.len())];
        let mut outcome = step1_try(c, st, u, e)?;
        let mut step = 0;
        stats.step_attempts[0] += 1;
        if !outcome.is_success() {
            note_failure(outcome, stats);
            let forest = FanForest::build(c, st, &self.stars, u);
            let y = st.clr(e).unwrap();
            if forest.lst_count(y) == 1 {
                step = 1;
                stats.step_attempts[1] += 1;
                outcome = step2_try(c, st, &forest, u, e)?;
                if !outcome.is_success() {
                    note_failure(outcome, stats);
                }
            }
            if !outcome.is_success() {
                step = 2;
                stats.step_attempts[2] += 1;
                let (out, pick) = step3_try(c, st, &forest, u, rng)?;
                outcome = out;
                if !outcome.is_success() {
                    note_failure(outcome, stats);
                    if let Some(pick) = pick {
                        step = 3;
                        stats.step_attempts[3] += 1;
                        outcome = step4_try(c, st, &forest, u, pick)?;
                        if !outcome.is_success() {
                            note_failure(outcome, stats);
                        }
                    }
                }
            }
        }
        match outcome {
            StepOutcome::Success { colored, path_len } => {
                stats.step_successes[step] += 1;
                record.successes[step] += 1;
                stats.record_path(path_len);
                self.settle(c, u, colored);
                Ok(Some(step + 1))
            }
            StepOutcome::Fail { .. } => {
                debug_assert_eq!(c.journal_len(), 0);
                Ok(None)
            }
        }
    }

    /// Runs one round for the dominating kind and returns its record.
    pub fn round<R: Rng>(
        &mut self,
        c: &mut PartialColoring,
        config: &FastConfig,
        rng: &mut R,
        stats: &mut FastStats,
    ) -> Result<RoundRecord> {
        let g = c.graph();
        let (n, m) = (g.n(), g.m());
        let m0 = self.stars.remaining(CenterKind::High);
        let m1 = self.stars.remaining(CenterKind::Low);
        let kind = if m0 >= m1 { CenterKind::High } else { CenterKind::Low };
        let (class, x) = self
            .selector
            .select(kind)
            .ok_or_else(|| Error::Internal("no center left to select".into()))?;
        let members = self.selector.members(c, &self.stars, kind, class, x);
        check_round_bounds(c, &self.stars, kind, &members, m0, m1);
        let cap = length_cap(n, m, m0, m1, config.log_exp_l);
        let tau = congestion_threshold(n, m, m0, m1);
        self.state.begin_round(c, &self.stars, kind, class, x, cap, tau, members);
        let x0 = self.state.x0_size;
        let log = log2n(n).ceil();
        let limit = (config.safety_cap_c * x0 as f64 * log * log).ceil().max(1.0) as u64;
        let mut record = RoundRecord {
            kind,
            d: self.state.d(),
            x,
            x0,
            cap,
            tau,
            iterations: 0,
            successes: [0; 4],
            aborted: false,
        };
        while 2 * self.state.len() > x0 {
            if record.iterations >= limit {
                record.aborted = true;
                stats.safety_cap_aborts += 1;
                let leftovers: Vec<EdgeId> = self
                    .state
                    .members()
                    .iter()
                    .flat_map(|&u| self.state.tracked_edges(&self.stars, u).collect::<Vec<_>>())
                    .collect();
                self.state.end_round();
                for e in leftovers {
                    self.extend_plain(c, e)?;
                }
                break;
            }
            record.iterations += 1;
            self.iterate(c, rng, stats, &mut record)?;
        }
        self.state.end_round();
        Ok(record)
    }
}

fn note_failure(outcome: StepOutcome, stats: &mut FastStats) {
    if let StepOutcome::Fail { truncated: true } = outcome {
        stats.truncations += 1;
    }
}

/// Lower bounds on the selected round, asserted in debug builds where the
/// degree is small enough for them to follow from the selection rule.
fn check_round_bounds(
    c: &PartialColoring,
    stars: &StarIndex,
    kind: CenterKind,
    members: &[VertexId],
    m0: usize,
    m1: usize,
) {
    if !cfg!(debug_assertions) {
        return;
    }
    let g = c.graph();
    let (n, delta) = (g.n(), g.max_degree());
    if delta < 3 || 2 * delta > n {
        return;
    }
    let log = log2n(n);
    let sum: usize = members.iter().map(|&u| stars.deg(u)).sum();
    let needed = m0.max(m1) as f64 / (4.0 * delta as f64 * log);
    debug_assert!(members.len() as f64 >= needed, "{} members, need {needed}", members.len());
    match kind {
        CenterKind::Low => {
            let needed = m1 as f64 / (2.0 * log);
            debug_assert!(sum as f64 >= needed, "member degree {sum}, need {needed}");
        }
        CenterKind::High => {
            let hubs = stars.centers(CenterKind::High).len().max(1) as f64;
            let needed = (m0 as f64).powi(2) / (2.0 * delta as f64 * hubs * log * log);
            debug_assert!(sum as f64 >= needed, "member degree {sum}, need {needed}");
        }
    }
}

/// Colors all star edges: direct extension once a kind's residue is small,
/// rounds otherwise, with phases ending when a quarter of the edges left at
/// the phase start are done.
pub fn run_phases<R: Rng>(
    c: &mut PartialColoring,
    engine: &mut Engine,
    config: &FastConfig,
    rng: &mut R,
    stats: &mut FastStats,
) -> Result<()> {
    let g = c.graph();
    let (n, m) = (g.n() as f64, g.m() as f64);
    let high_limit = config.prep_threshold_c * m / cbrt_n(g.n()).powi(2);
    let low_limit = config.prep_threshold_c * m / n;
    let mut phase_start = 0;
    loop {
        let m0 = engine.stars.remaining(CenterKind::High);
        let m1 = engine.stars.remaining(CenterKind::Low);
        if m0 + m1 == 0 {
            break;
        }
        if m0 > 0 && m0 as f64 <= high_limit {
            stats.prep_edges += engine.finish_kind(c, CenterKind::High)?;
            continue;
        }
        if m1 > 0 && m1 as f64 <= low_limit {
            stats.prep_edges += engine.finish_kind(c, CenterKind::Low)?;
            continue;
        }
        if phase_start == 0 || 4 * (m0 + m1) < 3 * phase_start {
            stats.phases += 1;
            phase_start = m0 + m1;
        }
        let record = engine.round(c, config, rng, stats)?;
        stats.rounds.push(record);
    }
    Ok(())
}
