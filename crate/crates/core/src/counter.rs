//! Counter trees and the values of counter configurations.
//!
//! A tuple `(c0, τ0, kind, c1, τ1)` at node `x` adds an edge from
//! `(x0, c0)` to `(x1, c1)` in the configuration graph, where `xi` is `x`
//! itself or its parent according to `τi`. The value of a configuration is
//! the supremum, over all paths ending in it, of the number of increment
//! edges on the path (the empty path counts, so 0 is the minimum).

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{parse as perr, Error, Result};
use crate::ext::ExtNat;
use crate::graph::Digraph;
use crate::tree::text::{self, format_set, parse_set};
use crate::tree::{Address, RegularTree, Unfolding, UpPath, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Locus {
    Current,
    Parent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpKind {
    Inc,
    Tr,
}

/// One tuple of the counter-operations alphabet. Counters are indices into
/// the counter list of the surrounding tree or automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CounterOp {
    pub src: usize,
    pub src_at: Locus,
    pub kind: OpKind,
    pub dst: usize,
    pub dst_at: Locus,
}

pub type OpSet = BTreeSet<CounterOp>;

impl CounterOp {
    pub fn new(src: usize, src_at: Locus, kind: OpKind, dst: usize, dst_at: Locus) -> Result<Self> {
        if src_at == Locus::Parent && dst_at == Locus::Parent {
            return Err(Error::InvalidAutomaton(
                "a counter tuple must contain `self` at least once".into(),
            ));
        }
        Ok(CounterOp {
            src,
            src_at,
            kind,
            dst,
            dst_at,
        })
    }

    /// `(c, self, inc, c, parent)`.
    pub fn inc_up(c: usize) -> Self {
        CounterOp {
            src: c,
            src_at: Locus::Current,
            kind: OpKind::Inc,
            dst: c,
            dst_at: Locus::Parent,
        }
    }

    /// `(c, self, tr, c, parent)`.
    pub fn tr_up(c: usize) -> Self {
        CounterOp {
            kind: OpKind::Tr,
            ..CounterOp::inc_up(c)
        }
    }

    /// Source at the node, target at its parent.
    pub fn is_root_directed(&self) -> bool {
        self.src_at == Locus::Current && self.dst_at == Locus::Parent
    }

    pub fn weight(&self) -> u64 {
        match self.kind {
            OpKind::Inc => 1,
            OpKind::Tr => 0,
        }
    }

    pub fn mentions(&self, c: usize) -> bool {
        self.src == c || self.dst == c
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        OpDisplay { op: self, names }
    }

    /// Parses `(c,self,inc,d,parent)`, resolving names with `lookup`.
    pub fn parse(line: usize, s: &str, mut lookup: impl FnMut(&str) -> Result<usize>) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| perr(line, format!("expected a tuple, found `{s}`")))?;
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(perr(line, format!("a counter tuple has five fields: `{s}`")));
        }
        let locus = |t: &str| match t {
            "self" => Ok(Locus::Current),
            "parent" => Ok(Locus::Parent),
            _ => Err(perr(line, format!("expected self or parent, found `{t}`"))),
        };
        let kind = match parts[2] {
            "inc" | "increment" => OpKind::Inc,
            "tr" | "transfer" => OpKind::Tr,
            t => return Err(perr(line, format!("expected inc or tr, found `{t}`"))),
        };
        let src = lookup(parts[0])?;
        let dst = lookup(parts[3])?;
        CounterOp::new(src, locus(parts[1])?, kind, dst, locus(parts[4])?)
            .map_err(|e| perr(line, e.to_string()))
    }
}

struct OpDisplay<'a> {
    op: &'a CounterOp,
    names: &'a [String],
}

impl fmt::Display for OpDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let loc = |l: Locus| match l {
            Locus::Current => "self",
            Locus::Parent => "parent",
        };
        let kind = match self.op.kind {
            OpKind::Inc => "inc",
            OpKind::Tr => "tr",
        };
        write!(
            f,
            "({},{},{},{},{})",
            self.names[self.op.src],
            loc(self.op.src_at),
            kind,
            self.names[self.op.dst],
            loc(self.op.dst_at)
        )
    }
}

/// Parses `{(..), (..)}` into an op set.
pub fn parse_ops(line: usize, s: &str, lookup: impl FnMut(&str) -> Result<usize>) -> Result<OpSet> {
    let mut lookup = lookup;
    parse_set(line, s)?
        .iter()
        .map(|t| CounterOp::parse(line, t, &mut lookup))
        .collect()
}

pub fn format_ops(ops: &OpSet, names: &[String]) -> String {
    format_set(ops.iter().map(|o| o.display(names).to_string()))
}

/// Counter names, indexed by position.
pub fn counter_index(names: &[String], name: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::UnknownCounter(name.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterTree {
    pub counters: Vec<String>,
    pub tree: RegularTree<OpSet>,
}

impl CounterTree {
    pub fn new(counters: Vec<String>, tree: RegularTree<OpSet>) -> Result<Self> {
        for ops in tree.labels() {
            for op in ops {
                if op.src >= counters.len() || op.dst >= counters.len() {
                    return Err(Error::UnknownCounter(format!("#{}", op.src.max(op.dst))));
                }
            }
        }
        Ok(CounterTree { counters, tree })
    }

    pub fn counter(&self, name: &str) -> Result<usize> {
        counter_index(&self.counters, name)
    }

    /// Exact value of `(node, counter)` on a finite tree.
    pub fn value(&self, node: &Address, counter: usize) -> Result<ExtNat> {
        self.restricted_value(node, counter, &[])
    }

    /// Value of `(node, counter)` counting only paths that avoid
    /// configurations at strict ancestors of `node` lying in `x`.
    pub fn restricted_value(&self, node: &Address, counter: usize, x: &[Address]) -> Result<ExtNat> {
        self.check_counter(counter)?;
        let g = ConfigGraph::new(self)?;
        let target = g.unfolding.node(node)?;
        let mut banned = vec![false; g.unfolding.len()];
        for a in x {
            let n = g.unfolding.node(a)?;
            if g.unfolding.is_strict_ancestor(n, target) {
                banned[n] = true;
            }
        }
        Ok(g.values(|n| banned[n])[g.config(target, counter)])
    }

    fn check_counter(&self, counter: usize) -> Result<()> {
        if counter >= self.counters.len() {
            return Err(Error::UnknownCounter(format!("#{counter}")));
        }
        Ok(())
    }

    /// Counters whose values feed `counter`, including itself.
    fn feeders(&self, counter: usize) -> BTreeSet<usize> {
        let mut set = BTreeSet::from([counter]);
        loop {
            let before = set.len();
            for ops in self.tree.labels() {
                for op in ops {
                    if set.contains(&op.dst) {
                        set.insert(op.src);
                    }
                }
            }
            if set.len() == before {
                return set;
            }
        }
    }

    /// Fails unless every tuple mentioning `counter` or a counter feeding it
    /// is root-directed.
    pub fn require_root_directed(&self, counter: usize) -> Result<()> {
        self.check_counter(counter)?;
        let feeders = self.feeders(counter);
        for ops in self.tree.labels() {
            for op in ops {
                if (feeders.contains(&op.src) || feeders.contains(&op.dst)) && !op.is_root_directed() {
                    return Err(Error::NotRootDirected(self.counters[counter].clone()));
                }
            }
        }
        Ok(())
    }

    /// Values of all `(vertex, counter)` pairs computed from root-directed
    /// tuples only, indexed `vertex * |C| + counter`. Exact for counters that
    /// pass [`CounterTree::require_root_directed`].
    pub fn downward_values(&self) -> Vec<ExtNat> {
        downward_values(&self.tree, self.counters.len(), |v| self.tree.label(v))
    }

    /// Value of `(x, counter)` for every node `x` presented by `vertex`.
    pub fn downward_value(&self, vertex: VertexId, counter: usize) -> Result<ExtNat> {
        self.require_root_directed(counter)?;
        if vertex.0 >= self.tree.len() {
            return Err(Error::MalformedTree(format!("no vertex {}", vertex.0)));
        }
        Ok(self.downward_values()[vertex.0 * self.counters.len() + counter])
    }

    /// True iff `counter` is unbounded along `path` in every tree that
    /// differs from this one on finitely many labels.
    pub fn tail_unbounded(&self, path: &UpPath, counter: usize) -> Result<bool> {
        self.require_root_directed(counter)?;
        let values = self.downward_values();
        let k = self.counters.len();
        Ok(self
            .tree
            .path_cycle_vertices(path)?
            .into_iter()
            .any(|v| values[v.0 * k + counter].is_inf()))
    }

    pub fn parse(src: &str) -> Result<(String, CounterTree)> {
        let raw = text::parse(src)?;
        let mut counters: Vec<String> = Vec::new();
        let mut declared = false;
        for (ln, kw, rest) in &raw.headers {
            match kw.as_str() {
                "counters" => {
                    declared = true;
                    counters.extend(rest.split_whitespace().map(String::from));
                }
                _ => return Err(perr(*ln, format!("unexpected line `{kw}`"))),
            }
        }
        let mut labels = Vec::with_capacity(raw.tree.len());
        for v in raw.tree.vertices() {
            let attrs = raw.tree.label(v);
            let ops = match attrs.get("ops") {
                None => OpSet::new(),
                Some(s) => parse_ops(attrs.line, s, |name| match counter_index(&counters, name) {
                    Ok(i) => Ok(i),
                    Err(_) if !declared => {
                        counters.push(name.to_string());
                        Ok(counters.len() - 1)
                    }
                    Err(_) => Err(perr(attrs.line, format!("undeclared counter `{name}`"))),
                })?,
            };
            labels.push(ops);
        }
        let tree = raw.tree.map_labels(|v, _| labels[v.0].clone());
        Ok((raw.name, CounterTree { counters, tree }))
    }

    pub fn to_text(&self, name: &str) -> String {
        let header = format!("counters {}", self.counters.join(" "));
        text::write(name, &[header], &self.tree, |ops| {
            format!("ops={}", format_ops(ops, &self.counters))
        })
    }
}

/// Downward values over a presentation whose labels yield op sets.
pub(crate) fn downward_values<'a, L>(tree: &RegularTree<L>, k: usize, ops: impl Fn(VertexId) -> &'a OpSet) -> Vec<ExtNat> {
    let mut g = Digraph::new(tree.len() * k);
    for v in tree.vertices() {
        for u in tree.successors(v) {
            for op in ops(u) {
                if op.is_root_directed() {
                    g.add_edge(u.0 * k + op.src, v.0 * k + op.dst, op.weight());
                }
            }
        }
    }
    g.sup_walk_values(&vec![ExtNat::ZERO; tree.len() * k])
}

/// The counter configuration graph of a finite counter tree.
#[derive(Debug, Clone)]
pub struct ConfigGraph {
    pub unfolding: Unfolding,
    pub counters: usize,
    edges: Vec<(usize, usize, u64)>,
}

impl ConfigGraph {
    pub fn new(t: &CounterTree) -> Result<Self> {
        Self::build(&t.tree, t.counters.len(), |v| t.tree.label(v))
    }

    pub(crate) fn build<'a, L>(tree: &RegularTree<L>, k: usize, ops: impl Fn(VertexId) -> &'a OpSet) -> Result<Self> {
        let unfolding = tree.unfold()?;
        let mut edges = Vec::new();
        for x in 0..unfolding.len() {
            let parent = unfolding.parent[x];
            for op in ops(unfolding.vertex[x]) {
                let at = |l: Locus| match l {
                    Locus::Current => Some(x),
                    Locus::Parent => parent,
                };
                if let (Some(a), Some(b)) = (at(op.src_at), at(op.dst_at)) {
                    edges.push((a * k + op.src, b * k + op.dst, op.weight()));
                }
            }
        }
        Ok(ConfigGraph {
            unfolding,
            counters: k,
            edges,
        })
    }

    pub fn config(&self, node: usize, counter: usize) -> usize {
        node * self.counters + counter
    }

    pub fn edges(&self) -> &[(usize, usize, u64)] {
        &self.edges
    }

    /// Values of all configurations after deleting those at nodes for which
    /// `removed` holds. Deleted configurations get value 0.
    pub fn values(&self, removed: impl Fn(usize) -> bool) -> Vec<ExtNat> {
        let n = self.unfolding.len() * self.counters;
        let mut g = Digraph::new(n);
        for &(a, b, w) in &self.edges {
            if !removed(a / self.counters) && !removed(b / self.counters) {
                g.add_edge(a, b, w);
            }
        }
        g.sup_walk_values(&vec![ExtNat::ZERO; n])
    }
}
