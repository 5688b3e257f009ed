use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baseline::color_divide_conquer;
use crate::coloring::{colors_used, is_proper_coloring, Color, UNCOLORED};
use crate::error::{Error, Result};
use crate::euler::slack_color;
use crate::fast::{color_fast_traced, FastConfig, FastStats};
use crate::graph::Graph;
use crate::vizing::{color_all_vizing, EdgeOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    /// Fan extension of every edge in input order.
    Vizing,
    /// Random edge sampling under Eulerian divide-and-combine.
    Msqrtn,
    /// Hub sampling and star extension rounds.
    Fast,
    /// Eulerian splitting with `slack_d` extra colors.
    Slack,
}

impl Algo {
    pub const ALL: [Algo; 4] = [Algo::Vizing, Algo::Msqrtn, Algo::Fast, Algo::Slack];
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vizing" => Ok(Algo::Vizing),
            "msqrtn" => Ok(Algo::Msqrtn),
            "fast" => Ok(Algo::Fast),
            "slack" => Ok(Algo::Slack),
            _ => Err(Error::InvalidArgument(format!("unknown algorithm `{s}`"))),
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Vizing => "vizing",
            Algo::Msqrtn => "msqrtn",
            Algo::Fast => "fast",
            Algo::Slack => "slack",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub fast: FastConfig,
    /// Extra colors for `slack`; values of at least Δ fall back to fan
    /// extension.
    pub slack_d: usize,
    /// Leaf degree for `msqrtn`; `None` means `⌈√n⌉`.
    pub truncate_at: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            fast: FastConfig::default(),
            slack_d: 1,
            truncate_at: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub algo: Algo,
    pub n: usize,
    pub m: usize,
    pub delta: usize,
    pub seed: u64,
    pub wall_time_s: f64,
    /// Color assignments, changes and removals made by the algorithm.
    pub recolor_cost: u64,
    pub colors_used: usize,
    /// Largest number of colors the run may use.
    pub palette_bound: usize,
    pub uncolored: usize,
    pub proper: bool,
    /// Proper, complete, and within `palette_bound`.
    pub verified: bool,
    pub step_attempts: [u64; 4],
    pub step_successes: [u64; 4],
    pub path_histogram: Vec<u64>,
    pub truncations: u64,
    pub safety_cap_aborts: u64,
    pub fell_back: bool,
}

/// Independent post-hoc check: proper, complete, at most `bound` colors.
pub fn verify(g: &Graph, colors: &[Color], bound: usize) -> bool {
    is_proper_coloring(g, colors) && !colors.contains(&UNCOLORED) && colors_used(colors) <= bound
}

/// Runs `algo` on `g` and verifies the result. The bound is `Δ+1`, or
/// `Δ+d` for slack coloring with `d ≥ 2`.
pub fn run(algo: Algo, g: &Graph, config: &RunConfig, seed: u64) -> Result<(Vec<Color>, RunMetrics)> {
    let delta = g.max_degree();
    let mut bound = delta + 1;
    let start = Instant::now();
    let mut stats = FastStats::default();
    let (colors, cost) = match algo {
        Algo::Vizing => {
            let c = color_all_vizing(g, EdgeOrder::Input, seed);
            (c.colors().to_vec(), c.recolor_cost())
        }
        Algo::Msqrtn => {
            let c = color_divide_conquer(g, config.truncate_at, seed)?;
            (c.colors().to_vec(), c.recolor_cost())
        }
        Algo::Fast => {
            let (c, s) = color_fast_traced(g, &config.fast, seed)?;
            stats = s;
            (c.colors().to_vec(), c.recolor_cost())
        }
        Algo::Slack => {
            let d = config.slack_d.max(1);
            let c = if d < delta {
                bound = delta + d;
                slack_color(g, d)?
            } else {
                color_all_vizing(g, EdgeOrder::Input, seed)
            };
            (c.colors().to_vec(), c.recolor_cost())
        }
    };
    let wall_time_s = start.elapsed().as_secs_f64();
    let proper = is_proper_coloring(g, &colors);
    let metrics = RunMetrics {
        algo,
        n: g.n(),
        m: g.m(),
        delta,
        seed,
        wall_time_s,
        recolor_cost: cost,
        colors_used: colors_used(&colors),
        palette_bound: bound,
        uncolored: colors.iter().filter(|&&c| c == UNCOLORED).count(),
        proper,
        verified: verify(g, &colors, bound),
        step_attempts: stats.step_attempts,
        step_successes: stats.step_successes,
        path_histogram: stats.path_histogram,
        truncations: stats.truncations,
        safety_cap_aborts: stats.safety_cap_aborts,
        fell_back: stats.fell_back,
    };
    Ok((colors, metrics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::write_coloring;
    use crate::harness::generate::regular;

    fn k4() -> Graph {
        Graph::new(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn every_algo_verifies_k4() {
        let g = k4();
        for algo in Algo::ALL {
            let (colors, metrics) = run(algo, &g, &RunConfig::default(), 0).unwrap();
            assert!(metrics.verified, "{algo}");
            assert!(metrics.colors_used <= 4);
            assert_eq!(colors.len(), 6);
        }
    }

    #[test]
    fn checker_rejects_bad_colorings() {
        let g = k4();
        assert!(verify(&g, &[1, 2, 3, 3, 2, 1], 3));
        assert!(!verify(&g, &[1, 2, 3, 3, 2, 0], 3));
        assert!(!verify(&g, &[1, 1, 3, 3, 2, 1], 3));
        assert!(!verify(&g, &[1, 2, 3, 3, 2, 1], 2));
    }

    #[test]
    fn fast_on_sqrt_regular() {
        let g = regular(4096, 64, 0).unwrap();
        let config = RunConfig {
            fast: FastConfig {
                const_sample: 0.5,
                const_slack: 0.5,
                log_exp_l: 1.0,
                ..FastConfig::default()
            },
            ..RunConfig::default()
        };
        let (_, metrics) = run(Algo::Fast, &g, &config, 0).unwrap();
        assert!(metrics.verified);
        assert_eq!(metrics.uncolored, 0);
    }

    #[test]
    fn repeated_runs_write_identical_bytes() {
        let g = regular(256, 16, 4).unwrap();
        for algo in Algo::ALL {
            let mut outs = Vec::new();
            for _ in 0..2 {
                let (colors, metrics) = run(algo, &g, &RunConfig::default(), 9).unwrap();
                let mut buf = Vec::new();
                write_coloring(&g, &colors, &mut buf).unwrap();
                outs.push((buf, metrics.recolor_cost));
            }
            assert_eq!(outs[0], outs[1], "{algo}");
        }
    }

    #[test]
    fn slack_bound_follows_d() {
        let g = regular(256, 16, 1).unwrap();
        let config = RunConfig {
            slack_d: 4,
            ..RunConfig::default()
        };
        let (_, metrics) = run(Algo::Slack, &g, &config, 0).unwrap();
        assert_eq!(metrics.palette_bound, 20);
        assert!(metrics.verified);
        assert!("greedy".parse::<Algo>().is_err());
    }
}
