//! Small directed-graph helpers shared by the value computations.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::ext::ExtNat;

/// Directed graph over `0..n` with non-negative integer edge weights.
#[derive(Debug, Clone, Default)]
pub(crate) struct Digraph {
    n: usize,
    edges: Vec<(usize, usize, u64)>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph {
            n,
            edges: Vec::new(),
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, weight: u64) {
        debug_assert!(from < self.n && to < self.n);
        self.edges.push((from, to, weight));
    }

    /// Strongly connected components in topological order (sources first),
    /// plus the component index of every node.
    pub fn components(&self) -> (Vec<Vec<usize>>, Vec<usize>) {
        let mut g: DiGraph<(), ()> = DiGraph::with_capacity(self.n, self.edges.len());
        for _ in 0..self.n {
            g.add_node(());
        }
        for &(a, b, _) in &self.edges {
            g.add_edge(NodeIndex::new(a), NodeIndex::new(b), ());
        }
        let mut sccs: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| c.into_iter().map(|v| v.index()).collect())
            .collect();
        sccs.reverse();
        let mut comp = vec![0; self.n];
        for (i, c) in sccs.iter().enumerate() {
            for &v in c {
                comp[v] = i;
            }
        }
        (sccs, comp)
    }

    /// Supremum over all walks ending in each node of `base(start) + Σ weights`.
    ///
    /// A node gets `Inf` iff some walk reaching it passes through a cycle of
    /// positive weight.
    pub fn sup_walk_values(&self, base: &[ExtNat]) -> Vec<ExtNat> {
        assert_eq!(base.len(), self.n);
        let (sccs, comp) = self.components();
        let mut incoming: Vec<Vec<(usize, u64)>> = vec![Vec::new(); sccs.len()];
        let mut pumping = vec![false; sccs.len()];
        for &(a, b, w) in &self.edges {
            if comp[a] == comp[b] {
                if w > 0 {
                    pumping[comp[a]] = true;
                }
            } else {
                incoming[comp[b]].push((a, w));
            }
        }
        let mut value = vec![ExtNat::ZERO; self.n];
        for (ci, members) in sccs.iter().enumerate() {
            let mut v = if pumping[ci] {
                ExtNat::Inf
            } else {
                members.iter().map(|&m| base[m]).max().unwrap_or(ExtNat::ZERO)
            };
            if !pumping[ci] {
                for &(src, w) in &incoming[ci] {
                    v = v.max(value[src] + w);
                }
            }
            for &m in members {
                value[m] = v;
            }
        }
        value
    }

    /// Nodes that lie on some cycle using only nodes accepted by `allowed`.
    pub fn cyclic_nodes(&self, allowed: impl Fn(usize) -> bool) -> Vec<bool> {
        let mut sub = Digraph::new(self.n);
        let mut self_loop = vec![false; self.n];
        for &(a, b, w) in &self.edges {
            if allowed(a) && allowed(b) {
                sub.add_edge(a, b, w);
                if a == b {
                    self_loop[a] = true;
                }
            }
        }
        let (sccs, _) = sub.components();
        let mut out = vec![false; self.n];
        for c in sccs {
            if c.len() > 1 {
                for v in c {
                    out[v] = allowed(v);
                }
            } else if self_loop[c[0]] {
                out[c[0]] = true;
            }
        }
        out
    }

    /// A shortest nonempty cycle through `target` using only allowed nodes,
    /// as the list of nodes after `target` (ending with `target`).
    pub fn cycle_through(&self, target: usize, allowed: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for &(a, b, _) in &self.edges {
            if allowed(a) && allowed(b) {
                succ[a].push(b);
            }
        }
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        let mut prev = vec![usize::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        for &s in &succ[target] {
            if s == target {
                return Some(vec![target]);
            }
            if prev[s] == usize::MAX {
                prev[s] = target;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &s in &succ[v] {
                if s == target {
                    let mut path = vec![target, v];
                    let mut cur = v;
                    while prev[cur] != target {
                        cur = prev[cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return Some(path);
                }
                if prev[s] == usize::MAX {
                    prev[s] = v;
                    queue.push_back(s);
                }
            }
        }
        None
    }
}
