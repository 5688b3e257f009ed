//! Hub sampling and the initial coloring of everything outside the stars.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::FastConfig;
use crate::coloring::{PartialColoring, UNCOLORED};
use crate::error::{Error, Result};
use crate::euler::slack_color;
use crate::graph::{EdgeId, Graph, VertexId};
use crate::vizing::{color_all_vizing, EdgeOrder};

/// Which sampled set a star center belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CenterKind {
    /// Sampled high-degree vertices.
    High,
    /// Sampled low-degree vertices.
    Low,
}

impl CenterKind {
    pub fn index(self) -> usize {
        match self {
            CenterKind::High => 0,
            CenterKind::Low => 1,
        }
    }
}

/// Degree split and sampled hub sets.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    /// `low[v]` iff `3·deg(v) ≤ Δ`.
    pub low: Vec<bool>,
    /// Sampled high-degree hubs.
    pub high_hubs: Vec<VertexId>,
    /// Sampled low-degree hubs.
    pub low_hubs: Vec<VertexId>,
    pub p_sample: f64,
    /// Number of high-degree vertices.
    pub n_high: usize,
    /// Samples drawn before acceptance.
    pub attempts: usize,
    /// The degree and size bounds were checked and hold.
    pub verified: bool,
}

/// Measured quantities behind plan acceptance, next to their limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitsetReport {
    pub rest_max_degree: usize,
    pub rest_degree_limit: f64,
    pub high_hubs: usize,
    pub high_hub_limit: f64,
    pub low_hub_degree_sum: usize,
    pub low_hub_degree_limit: f64,
}

impl HitsetReport {
    pub fn holds(&self) -> bool {
        self.rest_max_degree as f64 <= self.rest_degree_limit
            && self.high_hubs as f64 <= self.high_hub_limit
            && self.low_hub_degree_sum as f64 <= self.low_hub_degree_limit
    }
}

pub(crate) fn log2n(n: usize) -> f64 {
    (n.max(2) as f64).log2()
}

pub(crate) fn cbrt_n(n: usize) -> f64 {
    (n as f64).cbrt()
}

pub fn is_low(g: &Graph, v: VertexId) -> bool {
    3 * g.degree(v) <= g.max_degree()
}

/// Per-vertex membership: 0 none, 1 high hub, 2 low hub.
fn membership(n: usize, high: &[VertexId], low: &[VertexId]) -> Vec<u8> {
    let mut mark = vec![0u8; n];
    for &v in high {
        mark[v as usize] = 1;
    }
    for &v in low {
        mark[v as usize] = 2;
    }
    mark
}

impl SamplePlan {
    /// A plan from explicit hub sets, left unverified.
    pub fn from_sets(g: &Graph, high_hubs: &[VertexId], low_hubs: &[VertexId]) -> Result<SamplePlan> {
        let low: Vec<bool> = (0..g.n() as VertexId).map(|v| is_low(g, v)).collect();
        let mut seen = vec![false; g.n()];
        for (&v, want_low) in high_hubs.iter().map(|v| (v, false)).chain(low_hubs.iter().map(|v| (v, true))) {
            if v as usize >= g.n() {
                return Err(Error::VertexOutOfRange { vertex: v as u64, n: g.n() });
            }
            if low[v as usize] != want_low {
                return Err(Error::InvalidArgument(format!(
                    "hub {v} is on the wrong side of the degree split"
                )));
            }
            if std::mem::replace(&mut seen[v as usize], true) {
                return Err(Error::OverlappingSets(v));
            }
        }
        let mut high_hubs = high_hubs.to_vec();
        let mut low_hubs = low_hubs.to_vec();
        high_hubs.sort_unstable();
        low_hubs.sort_unstable();
        Ok(SamplePlan {
            n_high: low.iter().filter(|&&l| !l).count(),
            low,
            high_hubs,
            low_hubs,
            p_sample: 0.0,
            attempts: 0,
            verified: false,
        })
    }

    /// For every edge, the hub it hangs from, or `None` for edges of the
    /// rest graph. Edges between a high hub and a non-hub high vertex hang
    /// from the high hub; edges between a low hub and a high vertex hang
    /// from the low hub.
    pub fn star_centers(&self, g: &Graph) -> Vec<Option<VertexId>> {
        let mark = membership(g.n(), &self.high_hubs, &self.low_hubs);
        g.edges()
            .map(|(a, b)| {
                for (p, q) in [(a, b), (b, a)] {
                    let (mp, mq) = (mark[p as usize], mark[q as usize]);
                    if mp == 1 && mq == 0 && !self.low[q as usize] {
                        return Some(p);
                    }
                    if mp == 2 && !self.low[q as usize] {
                        return Some(p);
                    }
                }
                None
            })
            .collect()
    }

    /// Edges of the rest graph, in id order.
    pub fn rest_edges(&self, g: &Graph) -> Vec<EdgeId> {
        self.star_centers(g)
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_none())
            .map(|(e, _)| e as EdgeId)
            .collect()
    }

    pub fn hitset_report(&self, g: &Graph, config: &FastConfig) -> HitsetReport {
        let n = g.n();
        let delta = g.max_degree() as f64;
        let (log, cbrt) = (log2n(n), cbrt_n(n));
        let centers = self.star_centers(g);
        let mut deg = vec![0usize; n];
        for (e, (a, b)) in g.edges().enumerate() {
            if centers[e].is_none() {
                deg[a as usize] += 1;
                deg[b as usize] += 1;
            }
        }
        HitsetReport {
            rest_max_degree: deg.into_iter().max().unwrap_or(0),
            rest_degree_limit: delta - config.const_slack * delta / cbrt,
            high_hubs: self.high_hubs.len(),
            high_hub_limit: 2.0 * config.const_sample * self.n_high as f64 * log / cbrt,
            low_hub_degree_sum: self.low_hubs.iter().map(|&v| g.degree(v)).sum(),
            low_hub_degree_limit: 2.0 * config.const_sample * g.m() as f64 * log / cbrt,
        }
    }
}

/// Sampling probability `min(1, const_sample · log n / n^{1/3})`.
pub fn sample_probability(n: usize, config: &FastConfig) -> f64 {
    (config.const_sample * log2n(n) / cbrt_n(n)).min(1.0)
}

/// Splits vertices by degree and samples hubs from each side until the
/// degree and size bounds hold, up to the configured number of attempts.
pub fn split_and_sample<R: Rng>(g: &Graph, config: &FastConfig, rng: &mut R) -> Result<SamplePlan> {
    let n = g.n();
    let p = sample_probability(n, config);
    let low: Vec<bool> = (0..n as VertexId).map(|v| is_low(g, v)).collect();
    let n_high = low.iter().filter(|&&l| !l).count();
    let skip_high = (n_high as f64) < cbrt_n(n);
    for attempt in 1..=config.resample_budget.max(1) {
        let mut high_hubs = Vec::new();
        let mut low_hubs = Vec::new();
        for v in 0..n as VertexId {
            // Draw for every vertex so the stream does not depend on the split.
            let hit = rng.gen_bool(p);
            if !hit {
                continue;
            }
            if low[v as usize] {
                low_hubs.push(v);
            } else if !skip_high {
                high_hubs.push(v);
            }
        }
        let plan = SamplePlan {
            low: low.clone(),
            high_hubs,
            low_hubs,
            p_sample: p,
            n_high,
            attempts: attempt,
            verified: true,
        };
        if plan.hitset_report(g, config).holds() {
            return Ok(plan);
        }
    }
    Err(Error::SamplingFailed(config.resample_budget.max(1)))
}

/// Slack used for the rest graph: `⌊const_slack · Δ / n^{1/3}⌋`, at least 1.
pub fn rest_slack(g: &Graph, config: &FastConfig) -> usize {
    ((config.const_slack * g.max_degree() as f64 / cbrt_n(g.n())).floor() as usize).max(1)
}

/// Colors every edge outside the stars with colors in `1..=Δ+1`, leaving
/// star edges uncolored.
///
/// When the rest graph has room for `d` extra colors below `Δ` it is slack
/// colored; otherwise fan extension colors it with its own `Δ+1` colors.
pub fn color_g0<'g>(g: &'g Graph, plan: &SamplePlan, config: &FastConfig) -> Result<PartialColoring<'g>> {
    let rest = plan.rest_edges(g);
    let sub = g.edge_subgraph(&rest);
    let delta = g.max_degree();
    let d = rest_slack(g, config);
    let sub_delta = sub.max_degree();
    if plan.verified {
        let report = plan.hitset_report(g, config);
        if report.rest_max_degree as f64 > report.rest_degree_limit {
            return Err(Error::Internal(format!(
                "accepted plan leaves rest degree {sub_delta} above {}",
                report.rest_degree_limit
            )));
        }
    }
    let colored = if plan.verified && sub_delta + d <= delta && d < sub_delta {
        slack_color(&sub, d)?
    } else {
        color_all_vizing(&sub, EdgeOrder::Input, 0)
    };
    let mut colors = vec![UNCOLORED; g.m()];
    for (i, &e) in rest.iter().enumerate() {
        colors[e as usize] = colored.color(i as EdgeId);
    }
    let mut c = PartialColoring::from_colors(g, delta as u32 + 1, &colors)?;
    c.add_cost(colored.recolor_cost());
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::generate::{regular, star_heavy};
    use crate::test_support::gnm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tuned() -> FastConfig {
        FastConfig {
            const_sample: 0.5,
            const_slack: 0.5,
            ..FastConfig::default()
        }
    }

    #[test]
    fn few_high_vertices_means_no_high_hubs() {
        // One hub of degree 30 over a sparse base: n_high = 1 < n^{1/3}.
        let mut edges: Vec<(u32, u32)> = (1..31).map(|v| (0, v)).collect();
        edges.extend((31..99).map(|v| (v, v + 1)));
        let g = Graph::new(100, &edges).unwrap();
        let config = FastConfig { resample_budget: 1, ..tuned() };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        match split_and_sample(&g, &config, &mut rng) {
            Ok(plan) => assert!(plan.high_hubs.is_empty()),
            Err(Error::SamplingFailed(_)) => {}
            Err(e) => panic!("{e}"),
        }
        // Same rule checked without the acceptance test.
        let low: usize = (0..100).filter(|&v| is_low(&g, v)).count();
        assert_eq!(100 - low, 1);
    }

    #[test]
    fn regular_graph_has_no_low_side() {
        let g = regular(64, 8, 1).unwrap();
        assert!((0..64).all(|v| !is_low(&g, v)));
        let plan = SamplePlan::from_sets(&g, &[0, 5], &[]).unwrap();
        assert!(plan.low_hubs.is_empty());
        assert!(SamplePlan::from_sets(&g, &[], &[3]).is_err());
    }

    #[test]
    fn accepted_samples_meet_bounds() {
        let config = tuned();
        for seed in 0..20 {
            let g = regular(4096, 64, seed).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let plan = split_and_sample(&g, &config, &mut rng).unwrap();
            let report = plan.hitset_report(&g, &config);
            assert!(report.holds(), "{report:?}");
            // independent recount of the rest degree
            let mut in_high = vec![false; g.n()];
            for &v in &plan.high_hubs {
                in_high[v as usize] = true;
            }
            let mut deg = vec![0usize; g.n()];
            for (a, b) in g.edges() {
                let star = in_high[a as usize] != in_high[b as usize];
                if !star {
                    deg[a as usize] += 1;
                    deg[b as usize] += 1;
                }
            }
            assert_eq!(deg.iter().copied().max().unwrap(), report.rest_max_degree);
        }
    }

    #[test]
    fn empty_hubs_color_everything() {
        let g = gnm(200, 600, 3);
        let plan = SamplePlan::from_sets(&g, &[], &[]).unwrap();
        let c = color_g0(&g, &plan, &FastConfig::default()).unwrap();
        assert_eq!(c.count_uncolored(), 0);
        assert!(c.is_proper());
        assert!(c.uses_at_most(g.max_degree() + 1));
    }

    #[test]
    fn star_heavy_leaves_exactly_star_edges() {
        let g = star_heavy(300, 4, 7).unwrap();
        let hubs: Vec<VertexId> = (0..300).filter(|&v| !is_low(&g, v)).collect();
        assert!(!hubs.is_empty());
        // all high vertices as high hubs: stars are edges between two
        // different high statuses, none here, so everything is rest
        let plan = SamplePlan::from_sets(&g, &[], &[]).unwrap();
        assert!(plan.rest_edges(&g).len() == g.m());
        // low hubs: every low vertex adjacent to a high vertex
        let lows: Vec<VertexId> = (0..300).filter(|&v| is_low(&g, v)).collect();
        let plan = SamplePlan::from_sets(&g, &[], &lows).unwrap();
        let c = color_g0(&g, &plan, &FastConfig::default()).unwrap();
        let expect: Vec<EdgeId> = (0..g.m() as EdgeId)
            .filter(|&e| {
                let (a, b) = g.endpoints(e);
                is_low(&g, a) != is_low(&g, b)
            })
            .collect();
        let open: Vec<EdgeId> = (0..g.m() as EdgeId).filter(|&e| c.color(e) == UNCOLORED).collect();
        assert_eq!(open, expect);
        assert!(c.is_proper());
    }

    #[test]
    fn sampled_plan_colors_rest_within_palette() {
        let g = gnm(1000, 8000, 4);
        let config = tuned();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let plan = match split_and_sample(&g, &config, &mut rng) {
            Ok(plan) => plan,
            Err(_) => SamplePlan::from_sets(&g, &[], &[]).unwrap(),
        };
        let c = color_g0(&g, &plan, &config).unwrap();
        assert!(c.is_proper());
        assert!(c.uses_at_most(g.max_degree() + 1));
        let centers = plan.star_centers(&g);
        for (e, center) in centers.iter().enumerate() {
            assert_eq!(c.color(e as EdgeId) == UNCOLORED, center.is_some());
        }
    }
}
