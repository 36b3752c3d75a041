//! Puzzle trees and witness sets for tail-unbounded counters.
//!
//! Puzzle paths are plain downward tree paths. Witness sets concern
//! counter paths, which may go both ways; the two notions share nothing.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::counter::{ConfigGraph, CounterTree};
use crate::error::{parse as perr, Error, Result};
use crate::ext::ExtNat;
use crate::graph::Digraph;
use crate::tree::text::{self, parse_set};
use crate::tree::{Address, RegularTree, VertexId};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Flags {
    pub cut: bool,
    pub inc: bool,
    pub reset: bool,
    pub infty: bool,
}

impl Flags {
    pub fn parse(line: usize, s: &str) -> Result<Flags> {
        let mut f = Flags::default();
        for item in parse_set(line, s)? {
            match item.as_str() {
                "cut" => f.cut = true,
                "inc" => f.inc = true,
                "reset" => f.reset = true,
                "infty" => f.infty = true,
                other => return Err(perr(line, format!("unknown flag `{other}`"))),
            }
        }
        Ok(f)
    }
}

impl fmt::Display for Flags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = [(self.cut, "cut"), (self.inc, "inc"), (self.reset, "reset"), (self.infty, "infty")];
        let on: Vec<&str> = names.iter().filter(|(b, _)| *b).map(|(_, n)| *n).collect();
        write!(f, "{{{}}}", on.join(","))
    }
}

/// A cut-increment-reset tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CirTree {
    pub tree: RegularTree<Flags>,
}

impl CirTree {
    pub fn parse(src: &str) -> Result<(String, CirTree)> {
        let raw = text::parse(src)?;
        if let Some((ln, kw, _)) = raw.headers.first() {
            return Err(perr(*ln, format!("unexpected line `{kw}`")));
        }
        let mut labels = Vec::with_capacity(raw.tree.len());
        for v in raw.tree.vertices() {
            let a = raw.tree.label(v);
            labels.push(match a.get("flags") {
                Some(s) => Flags::parse(a.line, s)?,
                None => Flags::default(),
            });
        }
        let tree = raw.tree.map_labels(|v, _| labels[v.0]);
        Ok((raw.name, CirTree { tree }))
    }

    pub fn to_text(&self, name: &str) -> String {
        text::write(name, &[], &self.tree, |f| format!("flags={f}"))
    }

    /// Values of all vertices.
    ///
    /// A cut node has value 0: no path from it avoids cuts.
    pub fn values(&self) -> Vec<ExtNat> {
        let t = &self.tree;
        let n = t.len();
        let open = |v: VertexId| !t.label(v).cut && !t.label(v).reset;
        // longest increment count of a reset-free walk starting at each vertex
        let mut g = Digraph::new(n);
        for v in t.vertices().filter(|&v| open(v)) {
            for u in t.successors(v).filter(|&u| open(u)) {
                g.add_edge(u.0, v.0, u64::from(t.label(v).inc));
            }
        }
        let base: Vec<ExtNat> = t
            .vertices()
            .map(|v| ExtNat::Fin(u64::from(open(v) && t.label(v).inc)))
            .collect();
        let best = g.sup_walk_values(&base);
        t.vertices()
            .map(|x| {
                if t.label(x).cut {
                    return ExtNat::ZERO;
                }
                let mut seen = vec![false; n];
                seen[x.0] = true;
                let mut queue = VecDeque::from([x]);
                let mut val = ExtNat::ZERO;
                while let Some(y) = queue.pop_front() {
                    if open(y) {
                        val = val.max(best[y.0]);
                    }
                    for z in t.successors(y) {
                        if !t.label(z).cut && !seen[z.0] {
                            seen[z.0] = true;
                            queue.push_back(z);
                        }
                    }
                }
                val
            })
            .collect()
    }
}

/// Supremum, over cut-free downward paths from `vertex`, of the largest
/// number of increment nodes on a reset-free stretch.
pub fn puzzle_value(tree: &CirTree, vertex: VertexId) -> Result<ExtNat> {
    if vertex.0 >= tree.tree.len() {
        return Err(Error::MalformedTree(format!("no vertex {}", vertex.0)));
    }
    Ok(tree.values()[vertex.0])
}

/// True iff exactly the vertices of infinite value carry the `infty` flag.
pub fn puzzle_member(tree: &CirTree) -> bool {
    tree.values()
        .iter()
        .zip(tree.tree.labels())
        .all(|(v, f)| v.is_inf() == f.infty)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessNodes {
    /// Explicit nodes of a finite tree.
    Finite(BTreeSet<Address>),
    /// Every node presented by one of these vertices.
    Regular(BTreeSet<VertexId>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessSet {
    pub counter: usize,
    pub nodes: WitnessNodes,
}

impl WitnessSet {
    pub fn to_text(&self, names: &[String]) -> String {
        match &self.nodes {
            WitnessNodes::Finite(xs) => {
                let a: Vec<String> = xs.iter().map(|a| a.to_string()).collect();
                format!("witness {}\nnodes {}\n", names[self.counter], a.join(" "))
            }
            WitnessNodes::Regular(vs) => {
                let a: Vec<String> = vs.iter().map(|v| v.0.to_string()).collect();
                format!("witness {}\nvertices {}\n", names[self.counter], a.join(" "))
            }
        }
    }

    /// Reads `witness c` followed by `nodes a1 a2 ..` or `vertices v1 v2 ..`.
    /// Vertex numbers refer to the canonical numbering of the tree text.
    pub fn parse(src: &str, tree: &CounterTree) -> Result<WitnessSet> {
        let mut counter = None;
        let mut nodes = None;
        for (ln, l) in text::content_lines(src) {
            let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
            let items = rest.split_whitespace();
            match kw {
                "witness" => counter = Some(tree.counter(rest.trim())?),
                "nodes" => {
                    let set = items
                        .map(|s| s.parse::<Address>().map_err(|_| perr(ln, format!("bad address `{s}`"))))
                        .collect::<Result<_>>()?;
                    nodes = Some(WitnessNodes::Finite(set));
                }
                "vertices" => {
                    let set = items
                        .map(|s| match s.parse::<usize>() {
                            Ok(v) if v < tree.tree.len() => Ok(VertexId(v)),
                            _ => Err(perr(ln, format!("bad vertex `{s}`"))),
                        })
                        .collect::<Result<_>>()?;
                    nodes = Some(WitnessNodes::Regular(set));
                }
                _ => return Err(perr(ln, format!("unknown keyword `{kw}`"))),
            }
        }
        Ok(WitnessSet {
            counter: counter.ok_or_else(|| perr(1, "missing `witness` line"))?,
            nodes: nodes.ok_or_else(|| perr(1, "missing `nodes` or `vertices` line"))?,
        })
    }
}

/// Result of [`witness_build`]; `stages` lists `X_0, X_1, ..` on finite trees.
#[derive(Debug, Clone)]
pub struct WitnessBuild {
    pub set: WitnessSet,
    pub stages: Vec<BTreeSet<Address>>,
    /// Nodes added after the stages because their restricted value was
    /// still infinite.
    pub completed: BTreeSet<Address>,
}

/// `X`-restricted value of `counter` at every node of a finite tree.
fn restricted_all(g: &ConfigGraph, x: &[bool], counter: usize) -> Vec<ExtNat> {
    let u = &g.unfolding;
    (0..u.len())
        .map(|y| {
            let banned: BTreeSet<usize> = u.ancestors(y).into_iter().filter(|&a| x[a]).collect();
            g.values(|n| banned.contains(&n))[g.config(y, counter)]
        })
        .collect()
}

/// Nodes with `pred` that have no strict ancestor with `pred`.
fn minimal(g: &ConfigGraph, pred: impl Fn(usize) -> bool) -> Vec<usize> {
    let u = &g.unfolding;
    (0..u.len())
        .filter(|&y| pred(y) && !u.ancestors(y).into_iter().any(&pred))
        .collect()
}

/// A witness for `counter`.
///
/// On finite trees this follows the staged construction: `X_0` is the root
/// and `X_i` the minimal nodes whose `X_{<i}`-restricted value is at least
/// `i`, stopping once a stage adds nothing and no finite value reaches `i`.
/// Nodes whose restricted value is still infinite are then added, minimal
/// ones first. On infinite trees the counter must be root-directed, where
/// restricted values do not depend on `X`; the vertices of infinite value
/// form a witness.
pub fn witness_build(tree: &CounterTree, counter: usize) -> Result<WitnessBuild> {
    if counter >= tree.counters.len() {
        return Err(Error::UnknownCounter(format!("#{counter}")));
    }
    if !tree.tree.is_finite() {
        tree.require_root_directed(counter)?;
        let k = tree.counters.len();
        let values = tree.downward_values();
        let set = tree
            .tree
            .vertices()
            .filter(|v| values[v.0 * k + counter].is_inf())
            .collect();
        return Ok(WitnessBuild {
            set: WitnessSet {
                counter,
                nodes: WitnessNodes::Regular(set),
            },
            stages: Vec::new(),
            completed: BTreeSet::new(),
        });
    }
    let g = ConfigGraph::new(tree)?;
    let u = &g.unfolding;
    let mut x = vec![false; u.len()];
    x[0] = true;
    let mut stages = vec![BTreeSet::from([Address::root()])];
    for i in 1u64.. {
        let vals = restricted_all(&g, &x, counter);
        let stage = minimal(&g, |y| vals[y] >= ExtNat::Fin(i));
        let fresh = stage.iter().any(|&y| !x[y]);
        let finite_reach = vals.iter().any(|v| v.is_finite() && *v >= ExtNat::Fin(i));
        if !fresh && !finite_reach {
            break;
        }
        for &y in &stage {
            x[y] = true;
        }
        stages.push(stage.iter().map(|&y| u.address[y].clone()).collect());
    }
    let mut completed = BTreeSet::new();
    loop {
        let vals = restricted_all(&g, &x, counter);
        let add = minimal(&g, |y| !x[y] && vals[y].is_inf());
        if add.is_empty() {
            break;
        }
        for y in add {
            x[y] = true;
            completed.insert(u.address[y].clone());
        }
    }
    let set = (0..u.len()).filter(|&y| x[y]).map(|y| u.address[y].clone()).collect();
    Ok(WitnessBuild {
        set: WitnessSet {
            counter,
            nodes: WitnessNodes::Finite(set),
        },
        stages,
        completed,
    })
}

/// Checks the two witness conditions.
///
/// On a finite tree every path is finite, so only the first condition
/// matters and it holds iff every node outside `X` has finite restricted
/// value. On an infinite tree with a root-directed counter each vertex has
/// one value; the first condition holds iff every vertex outside `X` has
/// finite value, and the second iff no cycle of finite-valued vertices
/// passes through `X`.
pub fn witness_check(tree: &CounterTree, x: &WitnessSet) -> Result<bool> {
    let c = x.counter;
    if c >= tree.counters.len() {
        return Err(Error::UnknownCounter(format!("#{c}")));
    }
    match &x.nodes {
        WitnessNodes::Finite(nodes) => {
            let g = ConfigGraph::new(tree)?;
            let mut inx = vec![false; g.unfolding.len()];
            for a in nodes {
                inx[g.unfolding.node(a)?] = true;
            }
            let vals = restricted_all(&g, &inx, c);
            Ok((0..inx.len()).all(|y| inx[y] || vals[y].is_finite()))
        }
        WitnessNodes::Regular(vs) => {
            tree.require_root_directed(c)?;
            let k = tree.counters.len();
            let values = tree.downward_values();
            let inf = |v: usize| values[v * k + c].is_inf();
            if tree.tree.vertices().any(|v| !vs.contains(&v) && inf(v.0)) {
                return Ok(false);
            }
            let mut g = Digraph::new(tree.tree.len());
            for v in tree.tree.vertices() {
                for u in tree.tree.successors(v) {
                    g.add_edge(v.0, u.0, 0);
                }
            }
            let cyclic = g.cyclic_nodes(|v| !inf(v));
            Ok(!vs.iter().any(|v| cyclic[v.0]))
        }
    }
}
