//! Seeded random graph families.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    /// `param`-regular.
    Regular,
    /// `param · n` uniformly random edges.
    Gnm,
    /// Two halves; each left vertex gets `param` random right neighbors.
    Bipartite,
    /// `param` hubs, each joined to a quarter of the vertices, over a
    /// sparse random base with average degree 4.
    StarHeavy,
}

impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regular" => Ok(GraphKind::Regular),
            "gnm" => Ok(GraphKind::Gnm),
            "bipartite" => Ok(GraphKind::Bipartite),
            "star-heavy" => Ok(GraphKind::StarHeavy),
            _ => Err(Error::InvalidArgument(format!("unknown graph kind `{s}`"))),
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphKind::Regular => "regular",
            GraphKind::Gnm => "gnm",
            GraphKind::Bipartite => "bipartite",
            GraphKind::StarHeavy => "star-heavy",
        })
    }
}

/// Generator parameter: a number, or a rule evaluated against `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Value(f64),
    Rule(ParamRule),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamRule {
    /// `round(√n)`
    Sqrt,
    /// `round(n^{1/3})`
    Cbrt,
}

impl Param {
    pub fn resolve(&self, n: usize) -> f64 {
        match *self {
            Param::Value(v) => v,
            Param::Rule(ParamRule::Sqrt) => (n as f64).sqrt().round(),
            Param::Rule(ParamRule::Cbrt) => (n as f64).cbrt().round(),
        }
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqrt" => Ok(Param::Rule(ParamRule::Sqrt)),
            "cbrt" => Ok(Param::Rule(ParamRule::Cbrt)),
            _ => s
                .parse()
                .map(Param::Value)
                .map_err(|_| Error::InvalidArgument(format!("bad generator parameter `{s}`"))),
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Value(v) => write!(f, "{v}"),
            Param::Rule(ParamRule::Sqrt) => f.write_str("sqrt"),
            Param::Rule(ParamRule::Cbrt) => f.write_str("cbrt"),
        }
    }
}

/// `kind,n,param`, e.g. `regular,1024,32` or `regular,4096,sqrt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphSpec {
    pub kind: GraphKind,
    pub n: usize,
    pub param: Param,
}

impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [kind, n, param] = parts[..] else {
            return Err(Error::InvalidArgument(format!("expected `kind,n,param`, got `{s}`")));
        };
        Ok(GraphSpec {
            kind: kind.parse()?,
            n: n.parse().map_err(|_| Error::InvalidArgument(format!("bad vertex count `{n}`")))?,
            param: param.parse()?,
        })
    }
}

impl GraphSpec {
    pub fn generate(&self, seed: u64) -> Result<Graph> {
        generate(self.kind, self.n, self.param.resolve(self.n), seed)
    }
}

pub fn generate(kind: GraphKind, n: usize, param: f64, seed: u64) -> Result<Graph> {
    let whole = |what: &str| -> Result<usize> {
        if param < 0.0 || param.fract() != 0.0 {
            return Err(Error::Infeasible(format!("{what} must be a non-negative integer, got {param}")));
        }
        Ok(param as usize)
    };
    match kind {
        GraphKind::Regular => regular(n, whole("degree")?, seed),
        GraphKind::Gnm => gnm(n, (param * n as f64).round() as usize, seed),
        GraphKind::Bipartite => bipartite(n, whole("degree")?, seed),
        GraphKind::StarHeavy => star_heavy(n, whole("hub count")?, seed),
    }
}

fn key(u: VertexId, v: VertexId) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    (a as u64) << 32 | b as u64
}

fn finish(n: usize, mut edges: Vec<(VertexId, VertexId)>) -> Result<Graph> {
    for e in edges.iter_mut() {
        if e.0 > e.1 {
            *e = (e.1, e.0);
        }
    }
    edges.sort_unstable();
    Graph::new(n, &edges)
}

/// Random `d`-regular graph: points are paired at random, pairs that would
/// form a loop or a repeated edge are rejected and redrawn, and points left
/// over at the end are placed by switching them into a random existing edge.
pub fn regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d >= n.max(1) || (n * d) % 2 == 1 {
        return Err(Error::Infeasible(format!("no simple {d}-regular graph on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<VertexId> = (0..n as VertexId).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    points.shuffle(&mut rng);
    let mut edges: Vec<(VertexId, VertexId)> = Vec::with_capacity(n * d / 2);
    let mut present: HashSet<u64> = HashSet::with_capacity(n * d / 2);
    const TRIES: usize = 64;
    'pairing: while points.len() >= 2 {
        for _ in 0..TRIES {
            let i = rng.gen_range(0..points.len());
            let j = rng.gen_range(0..points.len());
            let (u, v) = (points[i], points[j]);
            if i != j && u != v && !present.contains(&key(u, v)) {
                present.insert(key(u, v));
                edges.push((u, v));
                points.swap_remove(i.max(j));
                points.swap_remove(i.min(j));
                continue 'pairing;
            }
        }
        break;
    }
    // Each leftover pair (u, v) replaces a random edge (a, b) by (u, a), (v, b).
    let budget = 1000 * (points.len() + 1);
    let mut spent = 0;
    while let (Some(u), Some(v)) = (points.pop(), points.pop()) {
        if u != v && !present.contains(&key(u, v)) {
            present.insert(key(u, v));
            edges.push((u, v));
            continue;
        }
        loop {
            spent += 1;
            if spent > budget {
                return Err(Error::Infeasible("regular graph pairing did not converge".into()));
            }
            let k = rng.gen_range(0..edges.len());
            let (mut a, mut b) = edges[k];
            if rng.gen_bool(0.5) {
                std::mem::swap(&mut a, &mut b);
            }
            if [a, b].iter().any(|&w| w == u || w == v)
                || present.contains(&key(u, a))
                || present.contains(&key(v, b))
            {
                continue;
            }
            present.remove(&key(a, b));
            edges.swap_remove(k);
            for (p, q) in [(u, a), (v, b)] {
                present.insert(key(p, q));
                edges.push((p, q));
            }
            break;
        }
    }
    finish(n, edges)
}

/// `m` distinct edges drawn uniformly.
pub fn gnm(n: usize, m: usize, seed: u64) -> Result<Graph> {
    let max = n * n.saturating_sub(1) / 2;
    if m > max {
        return Err(Error::Infeasible(format!("{m} edges do not fit on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if 2 * m > max {
        // dense: sample the complement instead
        let mut all: Vec<(VertexId, VertexId)> = Vec::with_capacity(max);
        for u in 0..n as VertexId {
            for v in u + 1..n as VertexId {
                all.push((u, v));
            }
        }
        all.shuffle(&mut rng);
        all.truncate(m);
        return finish(n, all);
    }
    let mut present = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let u = rng.gen_range(0..n as VertexId);
        let v = rng.gen_range(0..n as VertexId);
        if u != v && present.insert(key(u, v)) {
            edges.push((u, v));
        }
    }
    finish(n, edges)
}

/// Left half `0..⌈n/2⌉`, right half the rest.
pub fn bipartite(n: usize, d: usize, seed: u64) -> Result<Graph> {
    let left = n.div_ceil(2);
    let right = n - left;
    if d > right {
        return Err(Error::Infeasible(format!("degree {d} exceeds the right side of size {right}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(left * d);
    for u in 0..left {
        for w in rand::seq::index::sample(&mut rng, right, d) {
            edges.push((u as VertexId, (left + w) as VertexId));
        }
    }
    finish(n, edges)
}

/// Hubs are vertices `0..hubs`; each is joined to `⌊n/4⌋` random others,
/// and a random base graph with `2n` edges covers everything.
pub fn star_heavy(n: usize, hubs: usize, seed: u64) -> Result<Graph> {
    if n < 8 || hubs > n / 8 {
        return Err(Error::Infeasible(format!("{hubs} hubs do not fit on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut present = HashSet::new();
    let mut edges = Vec::new();
    for h in 0..hubs {
        for w in rand::seq::index::sample(&mut rng, n - 1, n / 4) {
            let v = if w >= h { w + 1 } else { w };
            if present.insert(key(h as VertexId, v as VertexId)) {
                edges.push((h as VertexId, v as VertexId));
            }
        }
    }
    let base = (2 * n).min(n * (n - 1) / 2 - edges.len());
    let mut added = 0;
    while added < base {
        let u = rng.gen_range(0..n as VertexId);
        let v = rng.gen_range(0..n as VertexId);
        if u != v && present.insert(key(u, v)) {
            edges.push((u, v));
            added += 1;
        }
    }
    finish(n, edges)
}
