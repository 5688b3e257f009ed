//! Immutable simple undirected graphs in compressed adjacency form.
//!
//! Vertices and edges are dense `u32` ids. Every vertex owns a slice of
//! [`Neighbor`] records sorted by neighbor id, and each record carries the id
//! of the connecting edge, so both endpoints see the same [`EdgeId`].

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub type VertexId = u32;
pub type EdgeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Neighbor {
    pub vertex: VertexId,
    pub edge: EdgeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    adjacency: Vec<Neighbor>,
    endpoints: Vec<[VertexId; 2]>,
    max_degree: usize,
}

impl Graph {
    /// Builds a graph on `n` vertices. Edge `i` of the input becomes `EdgeId` `i`.
    pub fn new(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        if n > u32::MAX as usize || edges.len() > u32::MAX as usize {
            return Err(Error::InvalidArgument("graph too large for 32-bit ids".into()));
        }
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            for w in [u, v] {
                if w as usize >= n {
                    return Err(Error::VertexOutOfRange { vertex: w as u64, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }

        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut adjacency = vec![Neighbor { vertex: 0, edge: 0 }; 2 * edges.len()];
        for (i, &(u, v)) in edges.iter().enumerate() {
            let e = i as EdgeId;
            adjacency[fill[u as usize]] = Neighbor { vertex: v, edge: e };
            fill[u as usize] += 1;
            adjacency[fill[v as usize]] = Neighbor { vertex: u, edge: e };
            fill[v as usize] += 1;
        }
        for v in 0..n {
            let row = &mut adjacency[offsets[v]..offsets[v + 1]];
            row.sort_unstable();
            if let Some(w) = row.windows(2).find(|w| w[0].vertex == w[1].vertex) {
                return Err(Error::DuplicateEdge(v as VertexId, w[0].vertex));
            }
        }

        Ok(Graph {
            offsets,
            adjacency,
            endpoints: edges.iter().map(|&(u, v)| [u, v]).collect(),
            max_degree: degree.into_iter().max().unwrap_or(0),
        })
    }

    /// The graph with no edges.
    pub fn empty(n: usize) -> Self {
        Graph::new(n, &[]).expect("edgeless graph is always valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.endpoints.len()
    }

    #[inline]
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[Neighbor] {
        let v = v as usize;
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        let [u, v] = self.endpoints[e as usize];
        (u, v)
    }

    /// The endpoint of `e` that is not `v`.
    #[inline]
    pub fn opposite(&self, e: EdgeId, v: VertexId) -> VertexId {
        let [a, b] = self.endpoints[e as usize];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = (VertexId, VertexId)> + '_ {
        self.endpoints.iter().map(|&[u, v]| (u, v))
    }

    pub fn edge_list(&self) -> Vec<(VertexId, VertexId)> {
        self.edges().collect()
    }

    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        if u as usize >= self.n() {
            return None;
        }
        let row = self.neighbors(u);
        row.binary_search_by_key(&v, |nb| nb.vertex)
            .ok()
            .map(|i| row[i].edge)
    }

    /// `E[S]` when `t` is `None`, otherwise `E[S, T]`. Edges come back in id order.
    pub fn induced_edges(&self, s: &[VertexId], t: Option<&[VertexId]>) -> Result<Vec<EdgeId>> {
        let n = self.n();
        let mut side = vec![0u8; n];
        for &v in s {
            if v as usize >= n {
                return Err(Error::VertexOutOfRange { vertex: v as u64, n });
            }
            side[v as usize] = 1;
        }
        if let Some(t) = t {
            for &v in t {
                if v as usize >= n {
                    return Err(Error::VertexOutOfRange { vertex: v as u64, n });
                }
                if side[v as usize] == 1 {
                    return Err(Error::OverlappingSets(v));
                }
                side[v as usize] = 2;
            }
        }
        let wanted = |a: u8, b: u8| match t {
            None => a == 1 && b == 1,
            Some(_) => (a == 1 && b == 2) || (a == 2 && b == 1),
        };
        Ok(self
            .endpoints
            .iter()
            .enumerate()
            .filter(|(_, &[u, v])| wanted(side[u as usize], side[v as usize]))
            .map(|(e, _)| e as EdgeId)
            .collect())
    }

    /// Subgraph on the same vertex set holding exactly `edges`, in the given
    /// order: edge `i` of the result is `edges[i]` of `self`.
    pub fn edge_subgraph(&self, edges: &[EdgeId]) -> Graph {
        let pairs: Vec<_> = edges.iter().map(|&e| self.endpoints(e)).collect();
        Graph::new(self.n(), &pairs).expect("subgraph of a simple graph is simple")
    }

    /// Parses the `p edge <n> <m>` / `e <u> <v>` text format (0-based ids).
    pub fn read_text<R: BufRead>(reader: R) -> Result<Graph> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            let parse_err = |msg: &str| Error::Parse {
                line: lineno,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = trimmed.split_ascii_whitespace().collect();
            match fields[0] {
                "p" => {
                    if header.is_some() {
                        return Err(parse_err("duplicate problem line"));
                    }
                    if fields.len() != 4 || fields[1] != "edge" {
                        return Err(parse_err("expected `p edge <n> <m>`"));
                    }
                    let n = fields[2].parse().map_err(|_| parse_err("bad vertex count"))?;
                    let m = fields[3].parse().map_err(|_| parse_err("bad edge count"))?;
                    header = Some((n, m));
                    edges.reserve(m);
                }
                "e" => {
                    if header.is_none() {
                        return Err(parse_err("edge line before problem line"));
                    }
                    if fields.len() != 3 {
                        return Err(parse_err("expected `e <u> <v>`"));
                    }
                    let u = fields[1].parse().map_err(|_| parse_err("bad endpoint"))?;
                    let v = fields[2].parse().map_err(|_| parse_err("bad endpoint"))?;
                    edges.push((u, v));
                }
                _ => return Err(parse_err("unknown line type")),
            }
        }
        let (n, m) = header.ok_or(Error::Parse {
            line: 0,
            msg: "missing problem line".into(),
        })?;
        if edges.len() != m {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header announces {m} edges, found {}", edges.len()),
            });
        }
        Graph::new(n, &edges)
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "p edge {} {}", self.n(), self.m())?;
        for (u, v) in self.edges() {
            writeln!(out, "e {u} {v}")?;
        }
        Ok(())
    }
}
