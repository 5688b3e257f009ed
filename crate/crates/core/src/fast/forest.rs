//! The forest on a center's colored neighbors: `s` hangs below `t` when the
//! designated color of `s` is the color of the edge `(u, t)`.

use super::state::{ExtensionState, StarIndex};
use crate::coloring::{Color, PartialColoring, UNCOLORED};
use crate::graph::{EdgeId, VertexId};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanForest {
    pub center: VertexId,
    /// Colored neighbors of the center, ascending.
    pub nodes: Vec<VertexId>,
    /// Edge from the center to each node.
    pub edges: Vec<EdgeId>,
    /// Color of that edge.
    pub colors: Vec<Color>,
    pub parent: Vec<Option<usize>>,
    /// `(child, parent)` links dropped to break cycles.
    pub removed_cycle_edges: Vec<(usize, usize)>,
    /// Node whose edge color is reserved by exactly one client.
    pub singleton: Vec<bool>,
    /// Some non-strict descendant is a singleton.
    pub active: Vec<bool>,
    /// Number of active children.
    pub branch: Vec<u32>,
    /// Singleton descendant with the smallest vertex id, self included.
    pub best: Vec<Option<usize>>,
    /// Root of the node's tree.
    pub component: Vec<usize>,
    /// Singletons per tree, indexed by root.
    pub component_singletons: Vec<u32>,
    child_offsets: Vec<usize>,
    child_list: Vec<usize>,
    by_color: Vec<u32>,
    lst_count: Vec<u32>,
    lst_edge: Vec<EdgeId>,
}

impl FanForest {
    pub fn build(c: &PartialColoring, state: &ExtensionState, stars: &StarIndex, u: VertexId) -> FanForest {
        let g = c.graph();
        let stride = c.palette() as usize + 1;
        let mut lst_count = vec![0u32; stride];
        let mut lst_edge = vec![NONE; stride];
        for e in state.tracked_edges(stars, u) {
            let y = state.clr(e).unwrap();
            lst_count[y as usize] += 1;
            lst_edge[y as usize] = e;
        }
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        let mut colors = Vec::new();
        let mut by_color = vec![NONE; stride];
        for nb in g.neighbors(u) {
            let y = c.color(nb.edge);
            if y != UNCOLORED {
                by_color[y as usize] = nodes.len() as u32;
                nodes.push(nb.vertex);
                edges.push(nb.edge);
                colors.push(y);
            }
        }
        let k = nodes.len();
        let mut parent: Vec<Option<usize>> = nodes
            .iter()
            .map(|&w| {
                let p = by_color[c.designated(w) as usize];
                (p != NONE).then_some(p as usize)
            })
            .collect();

        // Each weak component of a functional graph holds at most one cycle.
        let mut removed_cycle_edges = Vec::new();
        let mut state_of = vec![0u8; k];
        for start in 0..k {
            if state_of[start] != 0 {
                continue;
            }
            let mut walk = Vec::new();
            let mut cur = Some(start);
            while let Some(i) = cur {
                if state_of[i] == 2 {
                    break;
                }
                if state_of[i] == 1 {
                    let from = walk.iter().position(|&j| j == i).unwrap();
                    let cycle = &walk[from..];
                    let top = *cycle.iter().max_by_key(|&&j| nodes[j]).unwrap();
                    let pred = *cycle.iter().find(|&&j| parent[j] == Some(top)).unwrap();
                    parent[pred] = None;
                    removed_cycle_edges.push((pred, top));
                    break;
                }
                state_of[i] = 1;
                walk.push(i);
                cur = parent[i];
            }
            for j in walk {
                state_of[j] = 2;
            }
        }

        let mut child_offsets = vec![0usize; k + 1];
        for p in parent.iter().flatten() {
            child_offsets[p + 1] += 1;
        }
        for i in 0..k {
            child_offsets[i + 1] += child_offsets[i];
        }
        let mut fill = child_offsets.clone();
        let mut child_list = vec![0usize; child_offsets[k]];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                child_list[fill[p]] = i;
                fill[p] += 1;
            }
        }

        // Top-down order from the roots; reversed it visits children first.
        let mut order: Vec<usize> = (0..k).filter(|&i| parent[i].is_none()).collect();
        let mut component = vec![0usize; k];
        for &r in &order {
            component[r] = r;
        }
        let mut head = 0;
        while head < order.len() {
            let i = order[head];
            head += 1;
            for &ch in &child_list[child_offsets[i]..child_offsets[i + 1]] {
                component[ch] = component[i];
                order.push(ch);
            }
        }
        debug_assert_eq!(order.len(), k);

        let singleton: Vec<bool> = colors.iter().map(|&y| lst_count[y as usize] == 1).collect();
        let mut best: Vec<Option<usize>> = vec![None; k];
        let mut branch = vec![0u32; k];
        let mut component_singletons = vec![0u32; k];
        for &i in order.iter().rev() {
            let mut b = singleton[i].then_some(i);
            for &ch in &child_list[child_offsets[i]..child_offsets[i + 1]] {
                if let Some(s) = best[ch] {
                    branch[i] += 1;
                    if b.is_none_or(|cur| nodes[s] < nodes[cur]) {
                        b = Some(s);
                    }
                }
            }
            best[i] = b;
            if singleton[i] {
                component_singletons[component[i]] += 1;
            }
        }
        let active = best.iter().map(Option::is_some).collect();
        FanForest {
            center: u,
            nodes,
            edges,
            colors,
            parent,
            removed_cycle_edges,
            singleton,
            active,
            branch,
            best,
            component,
            component_singletons,
            child_offsets,
            child_list,
            by_color,
            lst_count,
            lst_edge,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.child_list[self.child_offsets[i]..self.child_offsets[i + 1]]
    }

    pub fn active_children(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.children(i).iter().copied().filter(|&ch| self.active[ch])
    }

    /// Node whose edge to the center has color `y`.
    pub fn node_of_color(&self, y: Color) -> Option<usize> {
        let i = *self.by_color.get(y as usize)?;
        (i != NONE).then_some(i as usize)
    }

    /// Number of tracked center edges whose client reserved `y`.
    pub fn lst_count(&self, y: Color) -> u32 {
        self.lst_count.get(y as usize).copied().unwrap_or(0)
    }

    /// The uncolored edge whose client reserved `y`, when there is exactly one.
    pub fn lst_edge(&self, y: Color) -> Option<EdgeId> {
        (self.lst_count(y) == 1).then(|| self.lst_edge[y as usize])
    }

    /// Smallest-id singleton strictly below `i`.
    pub fn best_strict(&self, i: usize) -> Option<usize> {
        self.children(i)
            .iter()
            .filter_map(|&ch| self.best[ch])
            .min_by_key(|&s| self.nodes[s])
    }

    /// Nodes from `from` up the tree to its ancestor `to`, both included.
    pub fn chain(&self, from: usize, to: usize) -> Vec<usize> {
        let mut out = vec![from];
        let mut cur = from;
        while cur != to {
            cur = self.parent[cur].expect("`to` is an ancestor of `from`");
            out.push(cur);
        }
        out
    }
}
