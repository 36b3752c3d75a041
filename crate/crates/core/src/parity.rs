//! Nondeterministic parity tree automata with leaf transitions.
//!
//! States are totally ordered (declaration order, smallest first); a run is
//! accepting when on every infinite path the largest state seen infinitely
//! often is accepting.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{parse as perr, Error, Result};
use crate::game::{ParityGame, Player};
use crate::graph::Digraph;
use crate::tree::text::content_lines;
use crate::tree::{RegularTree, VertexId};

/// A run over an input tree: each vertex carries `(letter, state)`.
pub type Run = RegularTree<(usize, usize)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityAutomaton {
    pub alphabet: Vec<String>,
    /// Smallest first.
    pub states: Vec<String>,
    pub accepting: Vec<bool>,
    pub initial: usize,
    /// `(q, a)`.
    pub delta0: BTreeSet<(usize, usize)>,
    /// `(q, a, left, right)`.
    pub delta2: BTreeSet<(usize, usize, usize, usize)>,
}

impl ParityAutomaton {
    pub fn state(&self, name: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn letter(&self, name: &str) -> Result<usize> {
        self.alphabet
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    /// `2·rank`, plus one for rejecting states.
    pub fn priority(&self, q: usize) -> u32 {
        2 * q as u32 + u32::from(!self.accepting[q])
    }

    pub fn validate(&self) -> Result<()> {
        let nq = self.states.len();
        let na = self.alphabet.len();
        if nq == 0 || self.initial >= nq || self.accepting.len() != nq {
            return Err(Error::InvalidAutomaton("bad state declarations".into()));
        }
        let ok0 = self.delta0.iter().all(|&(q, a)| q < nq && a < na);
        let ok2 = self
            .delta2
            .iter()
            .all(|&(q, a, l, r)| q < nq && a < na && l < nq && r < nq);
        if !ok0 || !ok2 {
            return Err(Error::InvalidAutomaton("transition references an undeclared symbol".into()));
        }
        Ok(())
    }

    /// Converts a letter-labelled tree to letter indices.
    pub fn encode_tree(&self, t: &RegularTree<String>) -> Result<RegularTree<usize>> {
        let mut labels = Vec::with_capacity(t.len());
        for l in t.labels() {
            labels.push(self.letter(l)?);
        }
        Ok(t.map_labels(|v, _| labels[v.0]))
    }

    pub fn decode_tree(&self, t: &RegularTree<usize>) -> RegularTree<String> {
        t.map_labels(|_, &a| self.alphabet[a].clone())
    }

    /// Local transition check at every vertex plus the initial state.
    pub fn locally_consistent(&self, run: &Run) -> bool {
        if run.label(run.root()).1 != self.initial {
            return false;
        }
        self.transitions_consistent(run)
    }

    /// Local transition check at every vertex, ignoring the root state.
    pub fn transitions_consistent(&self, run: &Run) -> bool {
        run.vertices().all(|v| {
            let (a, q) = *run.label(v);
            match run.children(v) {
                None => self.delta0.contains(&(q, a)),
                Some([l, r]) => self.delta2.contains(&(q, a, run.label(l).1, run.label(r).1)),
            }
        })
    }

    /// True iff every cycle of the presentation has an accepting maximum.
    pub fn parity_ok<L>(&self, tree: &RegularTree<L>, state: impl Fn(&L) -> usize) -> bool {
        parity_ok(tree, self.states.len(), |l| state(l), |q| self.accepting[q])
    }

    pub fn check_run(&self, input: &RegularTree<usize>, run: &Run) -> Result<bool> {
        input.agrees_with(run, |a, (b, _)| a == b)?;
        Ok(self.locally_consistent(run) && self.parity_ok(run, |&(_, q)| q))
    }

    /// Decides whether `input` has an accepting run and returns a regular one.
    pub fn membership(&self, input: &RegularTree<usize>) -> Option<Run> {
        let nq = self.states.len();
        let mut game = ParityGame::new();
        let sink = game.add_position(Player::Pathfinder, 0);
        let base = game.len();
        for _u in input.vertices() {
            for q in 0..nq {
                game.add_position(Player::Automaton, self.priority(q));
            }
        }
        let apos = |u: VertexId, q: usize| base + u.0 * nq + q;
        let mut choices: HashMap<usize, (usize, usize)> = HashMap::new();
        for u in input.vertices() {
            let a = *input.label(u);
            for q in 0..nq {
                let from = apos(u, q);
                match input.children(u) {
                    None => {
                        if self.delta0.contains(&(q, a)) {
                            game.add_edge(from, sink);
                        }
                    }
                    Some([l, r]) => {
                        for &(_, _, ql, qr) in self.delta2.range((q, a, 0, 0)..=(q, a, nq, nq)) {
                            let p = game.add_position(Player::Pathfinder, 0);
                            choices.insert(p, (ql, qr));
                            game.add_edge(p, apos(l, ql));
                            game.add_edge(p, apos(r, qr));
                            game.add_edge(from, p);
                        }
                    }
                }
            }
        }
        let sol = game.solve();
        let start = apos(input.root(), self.initial);
        if sol.winner[start] != Player::Automaton {
            return None;
        }
        // unfold the strategy over (vertex, state) pairs
        let mut index: HashMap<(VertexId, usize), usize> = HashMap::new();
        let mut order = vec![(input.root(), self.initial)];
        index.insert(order[0], 0);
        let mut children = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let (u, q) = order[i];
            let ch = match input.children(u) {
                None => None,
                Some([l, r]) => {
                    let p = sol.strategy[apos(u, q)].expect("winning Automaton position has a move");
                    let (ql, qr) = choices[&p];
                    let mut ids = [VertexId(0); 2];
                    for (k, key) in [(l, ql), (r, qr)].into_iter().enumerate() {
                        let next = order.len();
                        let id = *index.entry(key).or_insert_with(|| {
                            order.push(key);
                            next
                        });
                        ids[k] = VertexId(id);
                    }
                    Some(ids)
                }
            };
            children.push(ch);
            i += 1;
        }
        let labels = order.iter().map(|&(u, q)| (*input.label(u), q)).collect();
        Some(RegularTree::new(labels, children, VertexId(0)).expect("unfolding is reachable"))
    }

    /// The acceptance game over states: Automaton picks a transition,
    /// Pathfinder picks a child. Returns the game, the position of each
    /// state, and the transition behind each Pathfinder position.
    pub fn acceptance_game(&self) -> (ParityGame, Vec<usize>, HashMap<usize, (usize, usize, usize, usize)>) {
        let nq = self.states.len();
        let mut game = ParityGame::new();
        let sink = game.add_position(Player::Pathfinder, 0);
        game.names[sink] = "leaf".into();
        let apos: Vec<usize> = (0..nq)
            .map(|q| {
                let p = game.add_position(Player::Automaton, self.priority(q));
                game.names[p] = self.states[q].clone();
                p
            })
            .collect();
        for &(q, _) in &self.delta0 {
            game.add_edge(apos[q], sink);
        }
        let mut choices = HashMap::new();
        for &t in &self.delta2 {
            let (q, a, l, r) = t;
            let p = game.add_position(Player::Pathfinder, 0);
            game.names[p] = format!("{}:{}:{}:{}", self.states[q], self.alphabet[a], self.states[l], self.states[r]);
            choices.insert(p, t);
            game.add_edge(p, apos[l]);
            game.add_edge(p, apos[r]);
            game.add_edge(apos[q], p);
        }
        (game, apos, choices)
    }

    /// `None` if the language is empty, else a regular input tree with an
    /// accepting run.
    pub fn emptiness(&self) -> Option<(RegularTree<usize>, Run)> {
        let (game, apos, choices) = self.acceptance_game();
        let sol = game.solve();
        if sol.winner[apos[self.initial]] != Player::Automaton {
            return None;
        }
        let mut index: HashMap<usize, usize> = HashMap::from([(self.initial, 0)]);
        let mut order = vec![self.initial];
        let mut labels = Vec::new();
        let mut children = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            let mv = sol.strategy[apos[q]].expect("winning Automaton position has a move");
            match choices.get(&mv) {
                None => {
                    let a = self
                        .delta0
                        .iter()
                        .find(|&&(p, _)| p == q)
                        .map(|&(_, a)| a)
                        .expect("leaf move needs a leaf transition");
                    labels.push((a, q));
                    children.push(None);
                }
                Some(&(_, a, l, r)) => {
                    let mut ids = [VertexId(0); 2];
                    for (k, s) in [l, r].into_iter().enumerate() {
                        let next = order.len();
                        let id = *index.entry(s).or_insert_with(|| {
                            order.push(s);
                            next
                        });
                        ids[k] = VertexId(id);
                    }
                    labels.push((a, q));
                    children.push(Some(ids));
                }
            }
            i += 1;
        }
        let run = RegularTree::new(labels, children, VertexId(0)).expect("unfolding is reachable");
        let input = run.map_labels(|_, &(a, _)| a);
        Some((input, run))
    }

    /// Parses the parity lines of an automaton file. Unrecognised lines are
    /// returned for the caller as `(line, keyword, rest)`.
    pub fn parse_with_extra(src: &str) -> Result<(String, ParityAutomaton, Vec<(usize, String, String)>)> {
        let mut name = None;
        let mut alphabet: Option<Vec<String>> = None;
        let mut states: Vec<String> = Vec::new();
        let mut accepting_names: Vec<(usize, String)> = Vec::new();
        let mut initial = None;
        let mut d0: Vec<(usize, Vec<String>)> = Vec::new();
        let mut d2: Vec<(usize, Vec<String>)> = Vec::new();
        let mut extra = Vec::new();
        for (ln, line) in content_lines(src) {
            let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            let words: Vec<String> = rest.split_whitespace().map(String::from).collect();
            match kw {
                "parity" | "wmsoup" => name = Some(rest.to_string()),
                "alphabet" => alphabet = Some(words),
                "states" => {
                    states = rest.split('<').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
                    let uniq: BTreeSet<&String> = states.iter().collect();
                    if uniq.len() != states.len() {
                        return Err(perr(ln, "duplicate state"));
                    }
                }
                "accepting" => accepting_names.extend(words.into_iter().map(|w| (ln, w))),
                "initial" => initial = Some((ln, rest.to_string())),
                "d0" if words.len() == 2 => d0.push((ln, words)),
                "d2" if words.len() == 4 => d2.push((ln, words)),
                "d0" | "d2" => return Err(perr(ln, format!("wrong number of fields for `{kw}`"))),
                _ => extra.push((ln, kw.to_string(), rest.to_string())),
            }
        }
        let name = name.ok_or_else(|| perr(1, "missing automaton header"))?;
        if states.is_empty() {
            return Err(perr(0, "missing `states` line"));
        }
        let declared = alphabet.is_some();
        let mut alphabet = alphabet.unwrap_or_default();
        let state = |ln: usize, s: &str| -> Result<usize> {
            states
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| perr(ln, format!("unknown state `{s}`")))
        };
        let mut letter = |ln: usize, a: &str| -> Result<usize> {
            match alphabet.iter().position(|x| x == a) {
                Some(i) => Ok(i),
                None if !declared => {
                    alphabet.push(a.to_string());
                    Ok(alphabet.len() - 1)
                }
                None => Err(perr(ln, format!("unknown letter `{a}`"))),
            }
        };
        let mut accepting = vec![false; states.len()];
        for (ln, s) in &accepting_names {
            accepting[state(*ln, s)?] = true;
        }
        let (iln, iname) = initial.ok_or_else(|| perr(0, "missing `initial` line"))?;
        let initial = state(iln, &iname)?;
        let mut delta0 = BTreeSet::new();
        for (ln, w) in &d0 {
            let q = state(*ln, &w[0])?;
            delta0.insert((q, letter(*ln, &w[1])?));
        }
        let mut delta2 = BTreeSet::new();
        for (ln, w) in &d2 {
            let q = state(*ln, &w[0])?;
            let a = letter(*ln, &w[1])?;
            delta2.insert((q, a, state(*ln, &w[2])?, state(*ln, &w[3])?));
        }
        let aut = ParityAutomaton {
            alphabet,
            states,
            accepting,
            initial,
            delta0,
            delta2,
        };
        Ok((name, aut, extra))
    }

    pub fn parse(src: &str) -> Result<(String, ParityAutomaton)> {
        let (name, aut, extra) = Self::parse_with_extra(src)?;
        if let Some((ln, kw, _)) = extra.first() {
            return Err(perr(*ln, format!("unexpected line `{kw}`")));
        }
        Ok((name, aut))
    }

    /// The parity lines (without header) in file order.
    pub fn body_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "alphabet {}", self.alphabet.join(" "));
        let _ = writeln!(out, "states {}", self.states.join(" < "));
        let acc: Vec<&str> = (0..self.states.len())
            .filter(|&q| self.accepting[q])
            .map(|q| self.states[q].as_str())
            .collect();
        let _ = writeln!(out, "accepting {}", acc.join(" "));
        let _ = writeln!(out, "initial {}", self.states[self.initial]);
        for &(q, a) in &self.delta0 {
            let _ = writeln!(out, "d0 {} {}", self.states[q], self.alphabet[a]);
        }
        for &(q, a, l, r) in &self.delta2 {
            let _ = writeln!(
                out,
                "d2 {} {} {} {}",
                self.states[q], self.alphabet[a], self.states[l], self.states[r]
            );
        }
        out
    }

    pub fn to_text(&self, name: &str) -> String {
        format!("parity {name}\n{}", self.body_text())
    }

    /// Run trees in the tree format, labelled `label=<a> state=<q>`.
    pub fn run_to_text(&self, name: &str, run: &Run) -> String {
        crate::tree::text::write(name, &[], run, |&(a, q)| {
            format!("label={} state={}", self.alphabet[a], self.states[q])
        })
    }

    pub fn parse_run(&self, src: &str) -> Result<(String, Run)> {
        let raw = crate::tree::text::parse(src)?;
        let mut labels = Vec::with_capacity(raw.tree.len());
        for v in raw.tree.vertices() {
            let at = raw.tree.label(v);
            let a = self.letter(at.require("label")?).map_err(|e| perr(at.line, e.to_string()))?;
            let q = self.state(at.require("state")?).map_err(|e| perr(at.line, e.to_string()))?;
            labels.push((a, q));
        }
        Ok((raw.name, raw.tree.map_labels(|v, _| labels[v.0])))
    }
}

/// Parity check on a presentation: for every rejecting state `r`, no cycle
/// among vertices with state `<= r` passes through a vertex with state `r`.
pub(crate) fn parity_ok<L>(
    tree: &RegularTree<L>,
    nq: usize,
    state: impl Fn(&L) -> usize,
    accepting: impl Fn(usize) -> bool,
) -> bool {
    let mut g = Digraph::new(tree.len());
    for v in tree.vertices() {
        for c in tree.successors(v) {
            g.add_edge(v.0, c.0, 0);
        }
    }
    let st: Vec<usize> = tree.labels().iter().map(&state).collect();
    (0..nq).filter(|&r| !accepting(r)).all(|r| {
        let cyc = g.cyclic_nodes(|v| st[v] <= r);
        (0..tree.len()).all(|v| !(cyc[v] && st[v] == r))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn universal() -> ParityAutomaton {
        ParityAutomaton::parse("parity all\nstates q\naccepting q\ninitial q\nd0 q a\nd2 q a q q\n")
            .unwrap()
            .1
    }

    fn complete(a: usize) -> RegularTree<usize> {
        RegularTree::new(vec![a], vec![Some([VertexId(0), VertexId(0)])], VertexId(0)).unwrap()
    }

    #[test]
    fn universal_accepts_everything() {
        let aut = universal();
        for t in [complete(0), RegularTree::leaf(0)] {
            let run = aut.membership(&t).expect("accepted");
            assert!(aut.check_run(&t, &run).unwrap());
        }
    }

    #[test]
    fn rejecting_self_loop_is_empty() {
        let (_, aut) = ParityAutomaton::parse("parity none\nstates r\ninitial r\nd2 r a r r\n").unwrap();
        assert!(aut.membership(&complete(0)).is_none());
        assert!(aut.emptiness().is_none());
        let run = RegularTree::new(vec![(0, 0)], vec![Some([VertexId(0), VertexId(0)])], VertexId(0)).unwrap();
        assert!(!aut.check_run(&complete(0), &run).unwrap());
    }

    #[test]
    fn alternating_accepting_loop() {
        // r < q, q accepting; the run alternates r and q
        let (_, aut) =
            ParityAutomaton::parse("parity alt\nstates r < q\naccepting q\ninitial r\nd2 r a q q\nd2 q a r r\n").unwrap();
        let run = RegularTree::new(
            vec![(0, 0), (0, 1)],
            vec![Some([VertexId(1), VertexId(1)]), Some([VertexId(0), VertexId(0)])],
            VertexId(0),
        )
        .unwrap();
        assert!(aut.check_run(&complete(0), &run).unwrap());
        let (input, w) = aut.emptiness().unwrap();
        assert!(aut.check_run(&input, &w).unwrap());
    }

    #[test]
    fn leaf_transition_gives_single_leaf_witness() {
        let (_, aut) = ParityAutomaton::parse("parity l\nstates r\ninitial r\nd0 r a\nd2 r a r r\n").unwrap();
        let (input, run) = aut.emptiness().unwrap();
        assert_eq!(input.len(), 1);
        assert!(input.is_leaf(input.root()));
        assert!(aut.check_run(&input, &run).unwrap());
    }

    #[test]
    fn finite_runs_pass_vacuously() {
        let aut = universal();
        let t = RegularTree::new(vec![0, 0], vec![Some([VertexId(1), VertexId(1)]), None], VertexId(0)).unwrap();
        let run = t.map_labels(|_, &a| (a, 0));
        assert!(aut.check_run(&t, &run).unwrap());
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let aut = universal();
        let run = RegularTree::leaf((0, 0));
        assert!(matches!(aut.check_run(&complete(0), &run), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn text_roundtrip() {
        let (_, aut) =
            ParityAutomaton::parse("parity alt\nstates r < q\naccepting q\ninitial r\nd2 r a q q\nd0 q b\n").unwrap();
        let printed = aut.to_text("alt");
        assert_eq!(ParityAutomaton::parse(&printed).unwrap().1, aut);
        assert!(ParityAutomaton::parse("parity x\nstates q\ninitial p\n").is_err());
    }
}
