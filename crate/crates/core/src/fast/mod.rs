//! Hub-sampling edge coloring: split vertices by degree, sample hubs, color
//! everything outside the hubs' stars with slack, then color the stars in
//! rounds that share one missing color across many centers.
//!
//! Graphs with small maximum degree go straight to fan extension. Graphs
//! with large maximum degree are split by Eulerian partition until the
//! pieces are small enough, and the pieces are merged back by dropping the
//! least used colors.

mod forest;
mod phase;
mod plan;
mod selector;
mod state;
mod steps;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use forest::FanForest;
pub use phase::{run_phases, Engine};
pub use plan::{
    color_g0, is_low, rest_slack, sample_probability, split_and_sample, CenterKind, HitsetReport, SamplePlan,
};
pub use selector::{degree_class, RoundSelector};
pub use state::{congestion_threshold, length_cap, length_cap_raw, ExtensionState, StarIndex};
pub use steps::{step1_try, step2_try, step3_try, step4_try, BranchPick, StepOutcome};

use crate::baseline::{color_divide_conquer, divide_and_combine};
use crate::coloring::{Color, PartialColoring};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::vizing::{color_all_vizing, EdgeOrder};

/// Tunable constants. The defaults are the conservative asymptotic ones;
/// at practical sizes they make the sampling probability clamp to 1, and
/// benchmarks should lower `const_sample`, `const_slack` and `log_exp_l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FastConfig {
    /// Hubs are sampled with probability `const_sample · log n / n^{1/3}`.
    pub const_sample: f64,
    /// Slack for the rest graph is `const_slack · Δ / n^{1/3}`.
    pub const_slack: f64,
    /// Exponent of `log n` in the path-length cap.
    pub log_exp_l: f64,
    /// Residues below this multiple of `m/n^{2/3}` (high hubs) or `m/n`
    /// (low hubs) are colored directly.
    pub prep_threshold_c: f64,
    /// A round gives up after `safety_cap_c · |X0| · ⌈log n⌉²` attempts.
    pub safety_cap_c: f64,
    /// Below `low_degree_c · n^{1/3}` the graph is colored by fan extension.
    pub low_degree_c: f64,
    /// Sampling attempts before falling back to the baseline.
    pub resample_budget: usize,
}

impl Default for FastConfig {
    fn default() -> Self {
        FastConfig {
            const_sample: 100.0,
            const_slack: 10.0,
            log_exp_l: 10.0,
            prep_threshold_c: 1.0,
            safety_cap_c: 64.0,
            low_degree_c: 1.0,
            resample_budget: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum DispatchPath {
    /// Small maximum degree: fan extension only.
    #[default]
    Vizing,
    /// Sampling and rounds.
    Main,
    /// Eulerian splitting around the main path.
    Split,
}

/// One round of star extensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub kind: CenterKind,
    pub d: usize,
    pub x: Color,
    pub x0: usize,
    pub cap: usize,
    pub tau: f64,
    pub iterations: u64,
    /// Successes per step.
    pub successes: [u64; 4],
    pub aborted: bool,
}

impl Default for RoundRecord {
    fn default() -> Self {
        RoundRecord {
            kind: CenterKind::High,
            d: 0,
            x: 0,
            x0: 0,
            cap: 0,
            tau: 0.0,
            iterations: 0,
            successes: [0; 4],
            aborted: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FastStats {
    pub path: DispatchPath,
    /// Sampling never met its bounds and the baseline colored the graph.
    pub fell_back: bool,
    pub resamples: usize,
    pub phases: usize,
    pub rounds: Vec<RoundRecord>,
    pub step_attempts: [u64; 4],
    pub step_successes: [u64; 4],
    /// Entry `i` counts flipped paths of length in `[2^{i-1}, 2^i)`;
    /// entry 0 counts steps without a path.
    pub path_histogram: Vec<u64>,
    pub truncations: u64,
    pub safety_cap_aborts: u64,
    /// Star edges colored directly once a residue was small.
    pub prep_edges: usize,
    /// Subgraphs colored by the main path under splitting.
    pub leaves: usize,
}

impl FastStats {
    pub fn record_path(&mut self, len: usize) {
        let bucket = (usize::BITS - len.leading_zeros()) as usize;
        if self.path_histogram.len() <= bucket {
            self.path_histogram.resize(bucket + 1, 0);
        }
        self.path_histogram[bucket] += 1;
    }

    fn absorb(&mut self, other: FastStats) {
        self.fell_back |= other.fell_back;
        self.resamples += other.resamples;
        self.phases += other.phases;
        self.rounds.extend(other.rounds);
        for i in 0..4 {
            self.step_attempts[i] += other.step_attempts[i];
            self.step_successes[i] += other.step_successes[i];
        }
        if self.path_histogram.len() < other.path_histogram.len() {
            self.path_histogram.resize(other.path_histogram.len(), 0);
        }
        for (a, b) in self.path_histogram.iter_mut().zip(other.path_histogram) {
            *a += b;
        }
        self.truncations += other.truncations;
        self.safety_cap_aborts += other.safety_cap_aborts;
        self.prep_edges += other.prep_edges;
    }
}

/// Colors `g` with at most `Δ+1` colors.
pub fn color_fast<'g>(g: &'g Graph, config: &FastConfig, seed: u64) -> Result<PartialColoring<'g>> {
    color_fast_traced(g, config, seed).map(|(c, _)| c)
}

pub fn color_fast_traced<'g>(
    g: &'g Graph,
    config: &FastConfig,
    seed: u64,
) -> Result<(PartialColoring<'g>, FastStats)> {
    let mut stats = FastStats::default();
    let n = g.n() as f64;
    let delta = g.max_degree();
    let palette = delta as u32 + 1;
    if (delta as f64) > n.powf(2.0 / 3.0) && delta >= 2 {
        stats.path = DispatchPath::Split;
        let split_at = n.powf(2.0 / 3.0);
        let is_leaf = |sub: &Graph| sub.max_degree() as f64 <= split_at;
        let mut failure = None;
        let mut leaf = |sub: &Graph, s: u64| match color_unsplit(sub, config, s) {
            Ok((c, sub_stats)) => {
                stats.leaves += 1;
                stats.absorb(sub_stats);
                let cost = c.recolor_cost();
                (c.into_colors(), cost)
            }
            Err(err) => {
                failure.get_or_insert(err);
                let c = color_all_vizing(sub, EdgeOrder::Input, s);
                (c.into_colors(), 0)
            }
        };
        let (colors, cost, _) = divide_and_combine(g, &is_leaf, &mut leaf, seed);
        if let Some(err) = failure {
            return Err(err);
        }
        let mut c = PartialColoring::from_colors(g, palette, &colors)?;
        c.add_cost(cost);
        return Ok((c, stats));
    }
    let (c, sub_stats) = color_unsplit(g, config, seed)?;
    let path = sub_stats.path;
    stats.absorb(sub_stats);
    stats.path = path;
    Ok((c, stats))
}

/// Fan extension for small degree, otherwise sampling and rounds.
fn color_unsplit<'g>(g: &'g Graph, config: &FastConfig, seed: u64) -> Result<(PartialColoring<'g>, FastStats)> {
    let mut stats = FastStats::default();
    let delta = g.max_degree() as f64;
    if g.m() == 0 || delta < config.low_degree_c * (g.n() as f64).cbrt() || delta < 3.0 {
        return Ok((color_all_vizing(g, EdgeOrder::Input, seed), stats));
    }
    stats.path = DispatchPath::Main;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plan = match split_and_sample(g, config, &mut rng) {
        Ok(plan) => plan,
        Err(Error::SamplingFailed(attempts)) => {
            stats.fell_back = true;
            stats.resamples = attempts;
            return Ok((color_divide_conquer(g, None, seed)?, stats));
        }
        Err(err) => return Err(err),
    };
    stats.resamples = plan.attempts - 1;
    let mut c = color_g0(g, &plan, config)?;
    let mut engine = Engine::new(&c, &plan);
    run_phases(&mut c, &mut engine, config, &mut rng, &mut stats)?;
    debug_assert_eq!(c.count_uncolored(), 0);
    Ok((c, stats))
}
