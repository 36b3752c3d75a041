//! WMSO+UP automata: parity tree automata extended with bounded and
//! unbounded counters driven by per-state counter operations.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;

use crate::counter::{self, counter_index, format_ops, parse_ops, CounterTree, OpSet};
use crate::error::{parse as perr, Error, Result};
use crate::ext::ExtNat;
use crate::graph::Digraph;
use crate::parity::{ParityAutomaton, Run};
use crate::tree::text::{format_set, parse_set};
use crate::tree::{RegularTree, UpPath, VertexId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WmsoUpAutomaton {
    pub parity: ParityAutomaton,
    pub counters: Vec<String>,
    pub bounded: Vec<bool>,
    /// Per state: bounded counters cut there.
    pub cut: Vec<BTreeSet<usize>>,
    /// Per state: unbounded counters checked there.
    pub check: Vec<BTreeSet<usize>>,
    /// Per state: counter operations emitted there.
    pub ops: Vec<OpSet>,
}

/// Sets recorded by the normal-form construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormEvidence {
    pub larcut: Vec<BTreeSet<usize>>,
    pub larcheck: Vec<BTreeSet<usize>>,
    /// Bounded counters are separated and root-directed (checked).
    pub property_a: bool,
    /// larcut/larcheck describe the maximal state on loops (by construction).
    pub property_b: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedAutomaton {
    pub automaton: WmsoUpAutomaton,
    pub evidence: NormalFormEvidence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rejection {
    InitialState,
    /// The vertex violates δ0/δ2.
    Transition(VertexId),
    Parity,
    /// An uncut vertex has infinite value for a bounded counter.
    Boundedness { counter: usize, vertex: VertexId },
    /// The path checks `counter` infinitely often with bounded values.
    Unboundedness { counter: usize, path: UpPath },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(Rejection),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

impl WmsoUpAutomaton {
    /// An automaton without counters.
    pub fn from_parity(parity: ParityAutomaton) -> Self {
        let n = parity.states.len();
        WmsoUpAutomaton {
            parity,
            counters: Vec::new(),
            bounded: Vec::new(),
            cut: vec![BTreeSet::new(); n],
            check: vec![BTreeSet::new(); n],
            ops: vec![OpSet::new(); n],
        }
    }

    pub fn counter(&self, name: &str) -> Result<usize> {
        counter_index(&self.counters, name)
    }

    pub fn validate(&self) -> Result<()> {
        self.parity.validate()?;
        let n = self.parity.states.len();
        let k = self.counters.len();
        if self.cut.len() != n || self.check.len() != n || self.ops.len() != n || self.bounded.len() != k {
            return Err(Error::InvalidAutomaton("per-state tables do not match the state set".into()));
        }
        for q in 0..n {
            if let Some(&c) = self.cut[q].iter().find(|&&c| c >= k || !self.bounded[c]) {
                return Err(Error::InvalidAutomaton(format!(
                    "cut({}) contains `{}`, which is not a bounded counter",
                    self.parity.states[q],
                    self.counters.get(c).map_or("?", |s| s)
                )));
            }
            if let Some(&c) = self.check[q].iter().find(|&&c| c >= k || self.bounded[c]) {
                return Err(Error::InvalidAutomaton(format!(
                    "check({}) contains `{}`, which is not an unbounded counter",
                    self.parity.states[q],
                    self.counters.get(c).map_or("?", |s| s)
                )));
            }
            if self.ops[q].iter().any(|op| op.src >= k || op.dst >= k) {
                return Err(Error::UnknownCounter(format!("in ops({})", self.parity.states[q])));
            }
        }
        Ok(())
    }

    /// Property (a): every tuple mentioning a bounded counter is
    /// `(c, self, _, c, parent)`.
    pub fn check_property_a(&self) -> Result<()> {
        for ops in &self.ops {
            for op in ops {
                for c in [op.src, op.dst] {
                    if self.bounded[c] && !(op.is_root_directed() && op.src == op.dst) {
                        return Err(Error::PropertyAViolated(self.counters[c].clone()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Fails unless every tuple of every state is root-directed.
    pub fn require_root_directed(&self) -> Result<()> {
        for ops in &self.ops {
            if let Some(op) = ops.iter().find(|op| !op.is_root_directed()) {
                return Err(Error::NotRootDirected(self.counters[op.dst].clone()));
            }
        }
        Ok(())
    }

    /// The counter tree induced by a δ-consistent run.
    pub fn counterops_tree(&self, run: &Run) -> Result<CounterTree> {
        if !self.parity.transitions_consistent(run) {
            return Err(Error::InvalidRun("run violates the transition relation".into()));
        }
        let tree = run.map_labels(|_, &(_, q)| self.ops[q].clone());
        CounterTree::new(self.counters.clone(), tree)
    }

    pub fn accept_run(&self, input: &RegularTree<usize>, run: &Run) -> Result<Verdict> {
        input.agrees_with(run, |a, (b, _)| a == b)?;
        self.require_root_directed()?;
        self.accept_consistent_run(run)
    }

    /// Acceptance of a run whose input is its own letter projection.
    pub fn accept_consistent_run(&self, run: &Run) -> Result<Verdict> {
        if run.label(run.root()).1 != self.parity.initial {
            return Ok(Verdict::Reject(Rejection::InitialState));
        }
        if let Some(v) = run.vertices().find(|&v| {
            let (a, q) = *run.label(v);
            match run.children(v) {
                None => !self.parity.delta0.contains(&(q, a)),
                Some([l, r]) => !self.parity.delta2.contains(&(q, a, run.label(l).1, run.label(r).1)),
            }
        }) {
            return Ok(Verdict::Reject(Rejection::Transition(v)));
        }
        if !self.parity.parity_ok(run, |&(_, q)| q) {
            return Ok(Verdict::Reject(Rejection::Parity));
        }
        let k = self.counters.len();
        if k == 0 {
            return Ok(Verdict::Accept);
        }
        let values = counter::downward_values(run, k, |v| &self.ops[run.label(v).1]);
        let value = |v: VertexId, c: usize| values[v.0 * k + c];
        let state = |v: VertexId| run.label(v).1;
        for c in (0..k).filter(|&c| self.bounded[c]) {
            if let Some(v) = run
                .vertices()
                .find(|&v| !self.cut[state(v)].contains(&c) && value(v, c).is_inf())
            {
                return Ok(Verdict::Reject(Rejection::Boundedness { counter: c, vertex: v }));
            }
        }
        let mut g = Digraph::new(run.len());
        for v in run.vertices() {
            for w in run.successors(v) {
                g.add_edge(v.0, w.0, 0);
            }
        }
        for c in (0..k).filter(|&c| !self.bounded[c]) {
            let checks = |v: usize| self.check[state(VertexId(v))].contains(&c);
            let inf = |v: usize| value(VertexId(v), c).is_inf();
            let cyclic = g.cyclic_nodes(|v| !(checks(v) && inf(v)));
            let bad: Vec<usize> = (0..run.len()).filter(|&v| checks(v) && !inf(v) && cyclic[v]).collect();
            if bad.is_empty() {
                continue;
            }
            // prefer a cycle that avoids every infinite vertex, so that the
            // shipped path is also not tail unbounded
            let cycle = bad
                .iter()
                .find_map(|&v| g.cycle_through(v, |u| !inf(u)).map(|c| (v, c)))
                .or_else(|| {
                    bad.iter()
                        .find_map(|&v| g.cycle_through(v, |u| !(checks(u) && inf(u))).map(|c| (v, c)))
                })
                .expect("a cyclic vertex has a cycle");
            let (start, via) = cycle;
            let start = VertexId(start);
            let via: Vec<VertexId> = via.into_iter().map(VertexId).collect();
            let prefix = run.address_of(start).expect("reachable");
            let lp = run.directions(start, &via).expect("cycle follows child edges");
            return Ok(Verdict::Reject(Rejection::Unboundedness {
                counter: c,
                path: UpPath::new(prefix, lp),
            }));
        }
        Ok(Verdict::Accept)
    }

    /// Searches δ-consistent run presentations with at most `max_vertices`
    /// vertices, smallest first, and returns the first accepted one.
    pub fn semi_empty(&self, max_vertices: usize) -> Result<Option<(RegularTree<usize>, Run)>> {
        self.require_root_directed()?;
        for size in 1..=max_vertices {
            let mut search = Search {
                aut: self,
                limit: size,
                states: vec![self.parity.initial],
                labels: Vec::new(),
                children: Vec::new(),
                found: None,
            };
            search.extend(0);
            if let Some(run) = search.found {
                let input = run.map_labels(|_, &(a, _)| a);
                return Ok(Some((input, run)));
            }
        }
        Ok(None)
    }

    pub fn parse(src: &str) -> Result<(String, WmsoUpAutomaton, Option<NormalFormEvidence>)> {
        let (name, parity, extra) = ParityAutomaton::parse_with_extra(src)?;
        let n = parity.states.len();
        let mut counters = Vec::new();
        let mut bounded = Vec::new();
        let mut tables: Vec<(usize, String, String, String)> = Vec::new();
        for (ln, kw, rest) in extra {
            match kw.as_str() {
                "counters" => {
                    for part in rest.split(';') {
                        let part = part.trim();
                        if part.is_empty() {
                            continue;
                        }
                        let (kind, names) = part
                            .split_once(':')
                            .ok_or_else(|| perr(ln, "expected `bounded: ...` or `unbounded: ...`"))?;
                        let b = match kind.trim() {
                            "bounded" => true,
                            "unbounded" => false,
                            k => return Err(perr(ln, format!("unknown counter kind `{k}`"))),
                        };
                        for c in names.split_whitespace() {
                            if counters.iter().any(|x| x == c) {
                                return Err(perr(ln, format!("duplicate counter `{c}`")));
                            }
                            counters.push(c.to_string());
                            bounded.push(b);
                        }
                    }
                }
                "cut" | "check" | "ops" | "larcut" | "larcheck" => {
                    let (q, set) = rest
                        .split_once('=')
                        .ok_or_else(|| perr(ln, format!("expected `{kw} <state> = {{...}}`")))?;
                    tables.push((ln, kw, q.trim().to_string(), set.trim().to_string()));
                }
                _ => return Err(perr(ln, format!("unexpected line `{kw}`"))),
            }
        }
        let mut aut = WmsoUpAutomaton {
            counters,
            bounded,
            cut: vec![BTreeSet::new(); n],
            check: vec![BTreeSet::new(); n],
            ops: vec![OpSet::new(); n],
            parity,
        };
        let mut larcut = vec![BTreeSet::new(); n];
        let mut larcheck = vec![BTreeSet::new(); n];
        let mut has_lar = false;
        for (ln, kw, q, set) in tables {
            let q = aut.parity.state(&q).map_err(|e| perr(ln, e.to_string()))?;
            let lookup = |c: &str| counter_index(&aut.counters, c).map_err(|e| perr(ln, e.to_string()));
            if kw == "ops" {
                aut.ops[q] = parse_ops(ln, &set, lookup)?;
                continue;
            }
            let ids = parse_set(ln, &set)?
                .iter()
                .map(|c| lookup(c))
                .collect::<Result<BTreeSet<usize>>>()?;
            match kw.as_str() {
                "cut" => aut.cut[q] = ids,
                "check" => aut.check[q] = ids,
                "larcut" => {
                    has_lar = true;
                    larcut[q] = ids
                }
                _ => {
                    has_lar = true;
                    larcheck[q] = ids
                }
            }
        }
        aut.validate().map_err(|e| perr(0, e.to_string()))?;
        let evidence = has_lar.then(|| NormalFormEvidence {
            larcut,
            larcheck,
            property_a: aut.check_property_a().is_ok(),
            property_b: true,
        });
        Ok((name, aut, evidence))
    }

    pub fn to_text(&self, name: &str, evidence: Option<&NormalFormEvidence>) -> String {
        let mut out = format!("wmsoup {name}\n{}", self.parity.body_text());
        let group = |b: bool| -> Vec<&str> {
            (0..self.counters.len())
                .filter(|&c| self.bounded[c] == b)
                .map(|c| self.counters[c].as_str())
                .collect()
        };
        let _ = writeln!(
            out,
            "counters bounded: {} ; unbounded: {}",
            group(true).join(" "),
            group(false).join(" ")
        );
        let names = |s: &BTreeSet<usize>| format_set(s.iter().map(|&c| &self.counters[c]));
        for (q, qname) in self.parity.states.iter().enumerate() {
            if !self.cut[q].is_empty() {
                let _ = writeln!(out, "cut {qname} = {}", names(&self.cut[q]));
            }
            if !self.check[q].is_empty() {
                let _ = writeln!(out, "check {qname} = {}", names(&self.check[q]));
            }
            if !self.ops[q].is_empty() {
                let _ = writeln!(out, "ops {qname} = {}", format_ops(&self.ops[q], &self.counters));
            }
        }
        if let Some(ev) = evidence {
            for (q, qname) in self.parity.states.iter().enumerate() {
                let _ = writeln!(out, "larcut {qname} = {}", names(&ev.larcut[q]));
                let _ = writeln!(out, "larcheck {qname} = {}", names(&ev.larcheck[q]));
            }
        }
        out
    }

    /// Human-readable rejection reason.
    pub fn explain(&self, r: &Rejection) -> String {
        match r {
            Rejection::InitialState => "root does not carry the initial state".into(),
            Rejection::Transition(v) => format!("vertex {} violates the transition relation", v.0),
            Rejection::Parity => "some path sees a rejecting maximal state infinitely often".into(),
            Rejection::Boundedness { counter, vertex } => format!(
                "bounded counter {} has infinite value at uncut vertex {}",
                self.counters[*counter], vertex.0
            ),
            Rejection::Unboundedness { counter, path } => format!(
                "path {path} checks {} infinitely often with bounded values",
                self.counters[*counter]
            ),
        }
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::InitialState => f.write_str("initial"),
            Rejection::Transition(v) => write!(f, "transition {}", v.0),
            Rejection::Parity => f.write_str("parity"),
            Rejection::Boundedness { counter, vertex } => write!(f, "boundedness #{counter} {}", vertex.0),
            Rejection::Unboundedness { counter, path } => write!(f, "unboundedness #{counter} {path}"),
        }
    }
}

/// Depth-first enumeration of δ-consistent presentations. Vertices are
/// numbered in creation order, so each presentation shape is visited once.
struct Search<'a> {
    aut: &'a WmsoUpAutomaton,
    limit: usize,
    states: Vec<usize>,
    labels: Vec<usize>,
    children: Vec<Option<[VertexId; 2]>>,
    found: Option<Run>,
}

impl Search<'_> {
    fn extend(&mut self, i: usize) {
        if self.found.is_some() {
            return;
        }
        if i == self.states.len() {
            // complete presentation; vertices beyond the limit never exist
            if self.states.len() != self.limit {
                return;
            }
            let labels: Vec<(usize, usize)> = self.labels.iter().copied().zip(self.states.iter().copied()).collect();
            let Ok(run) = RegularTree::new(labels, self.children.clone(), VertexId(0)) else {
                return;
            };
            if let Ok(Verdict::Accept) = self.aut.accept_consistent_run(&run) {
                self.found = Some(run);
            }
            return;
        }
        let q = self.states[i];
        let p = &self.aut.parity;
        let leaves: Vec<usize> = p.delta0.iter().filter(|&&(s, _)| s == q).map(|&(_, a)| a).collect();
        for a in leaves {
            self.labels.push(a);
            self.children.push(None);
            self.extend(i + 1);
            self.labels.pop();
            self.children.pop();
        }
        let inner: Vec<(usize, usize, usize)> = p
            .delta2
            .iter()
            .filter(|&&(s, ..)| s == q)
            .map(|&(_, a, l, r)| (a, l, r))
            .collect();
        for (a, l, r) in inner {
            for left in self.targets(l) {
                let pushed_l = self.place(left, l);
                for right in self.targets(r) {
                    let pushed_r = self.place(right, r);
                    self.labels.push(a);
                    self.children.push(Some([VertexId(left), VertexId(right)]));
                    self.extend(i + 1);
                    self.labels.pop();
                    self.children.pop();
                    if pushed_r {
                        self.states.pop();
                    }
                }
                if pushed_l {
                    self.states.pop();
                }
            }
        }
    }

    /// Existing vertices carrying state `q`, plus a fresh one if room remains.
    fn targets(&self, q: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.states.len()).filter(|&v| self.states[v] == q).collect();
        if self.states.len() < self.limit {
            out.push(self.states.len());
        }
        out
    }

    fn place(&mut self, v: usize, q: usize) -> bool {
        if v == self.states.len() {
            self.states.push(q);
            true
        } else {
            false
        }
    }
}

/// Maximum finite downward value of `counter` over a run's vertices.
pub fn max_finite_value(aut: &WmsoUpAutomaton, run: &Run, counter: usize) -> ExtNat {
    let k = aut.counters.len();
    let values = counter::downward_values(run, k, |v| &aut.ops[run.label(v).1]);
    run.vertices()
        .map(|v| values[v.0 * k + counter])
        .filter(|v| v.is_finite())
        .max()
        .unwrap_or(ExtNat::ZERO)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "\
wmsoup t
states q
accepting q
initial q
d0 q a
d2 q a q q
";

    fn aut(extra: &str) -> WmsoUpAutomaton {
        WmsoUpAutomaton::parse(&format!("{BASE}{extra}")).unwrap().1
    }

    fn constant_run() -> Run {
        RegularTree::new(vec![(0, 0)], vec![Some([VertexId(0), VertexId(0)])], VertexId(0)).unwrap()
    }

    #[test]
    fn finite_runs_accept() {
        let a = aut("counters bounded: c ; unbounded:\nops q = {(c,self,inc,c,parent)}\n");
        let run = RegularTree::new(vec![(0, 0), (0, 0)], vec![Some([VertexId(1), VertexId(1)]), None], VertexId(0)).unwrap();
        let input = run.map_labels(|_, &(a, _)| a);
        assert_eq!(a.accept_run(&input, &run).unwrap(), Verdict::Accept);
    }

    #[test]
    fn unchecked_growth_is_rejected() {
        let a = aut("counters bounded: c ; unbounded:\nops q = {(c,self,inc,c,parent)}\n");
        let run = constant_run();
        let v = a.accept_run(&run.map_labels(|_, &(a, _)| a), &run).unwrap();
        assert!(matches!(v, Verdict::Reject(Rejection::Boundedness { counter: 0, .. })));
        // cutting c at q makes every zone a single cut node
        let a = aut("counters bounded: c ; unbounded:\ncut q = {c}\nops q = {(c,self,inc,c,parent)}\n");
        assert!(a.accept_run(&run.map_labels(|_, &(a, _)| a), &run).unwrap().is_accept());
    }

    #[test]
    fn check_without_increments_is_rejected() {
        let a = aut("counters bounded: ; unbounded: d\ncheck q = {d}\n");
        let run = constant_run();
        let input = run.map_labels(|_, &(a, _)| a);
        match a.accept_run(&input, &run).unwrap() {
            Verdict::Reject(Rejection::Unboundedness { counter, path }) => {
                assert_eq!(counter, 0);
                let ct = a.counterops_tree(&run).unwrap();
                assert!(!ct.tail_unbounded(&path, 0).unwrap());
            }
            other => panic!("unexpected verdict {other:?}"),
        }
        let a = aut("counters bounded: ; unbounded: d\ncheck q = {d}\nops q = {(d,self,inc,d,parent)}\n");
        assert!(a.accept_run(&input, &run).unwrap().is_accept());
    }

    #[test]
    fn non_root_directed_ops_are_refused() {
        let a = aut("counters bounded: ; unbounded: d\nops q = {(d,parent,inc,d,self)}\n");
        let run = constant_run();
        assert!(matches!(
            a.accept_run(&run.map_labels(|_, &(a, _)| a), &run),
            Err(Error::NotRootDirected(_))
        ));
    }

    #[test]
    fn semi_empty_finds_leaf_and_respects_parity() {
        let a = aut("");
        let (input, run) = a.semi_empty(3).unwrap().unwrap();
        assert_eq!(input.len(), 1);
        assert!(a.accept_run(&input, &run).unwrap().is_accept());
        let (_, p) = ParityAutomaton::parse("parity r\nstates r\ninitial r\nd2 r a r r\n").unwrap();
        let a = WmsoUpAutomaton::from_parity(p);
        assert!(a.semi_empty(4).unwrap().is_none());
    }

    #[test]
    fn semi_empty_needs_an_infinite_witness() {
        let a = WmsoUpAutomaton::parse(
            "wmsoup inf\nstates q\naccepting q\ninitial q\nd2 q a q q\ncounters bounded: ; unbounded: d\ncheck q = {d}\nops q = {(d,self,inc,d,parent)}\n",
        )
        .unwrap()
        .1;
        let (input, run) = a.semi_empty(2).unwrap().unwrap();
        assert_eq!(input.len(), 1);
        assert!(a.accept_run(&input, &run).unwrap().is_accept());
    }

    #[test]
    fn validation_rejects_misplaced_counters() {
        let src = format!("{BASE}counters bounded: c ; unbounded: d\ncheck q = {{c}}\n");
        assert!(WmsoUpAutomaton::parse(&src).is_err());
        let src = format!("{BASE}counters bounded: c ; unbounded: d\ncut q = {{d}}\n");
        assert!(WmsoUpAutomaton::parse(&src).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let a = aut("counters bounded: c ; unbounded: d\ncut q = {c}\ncheck q = {d}\nops q = {(c,self,inc,c,parent), (d,self,tr,d,parent)}\n");
        let printed = a.to_text("t", None);
        assert_eq!(WmsoUpAutomaton::parse(&printed).unwrap().1, a);
    }
}
