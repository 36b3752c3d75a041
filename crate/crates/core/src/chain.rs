//! Generalized parity automata, their games, and the cost functions used by
//! the emptiness reduction for WMSO+UP automata.
//!
//! Transitions of a generalized automaton are whole trees colored only at
//! the root and the leaves. A run is glued from transitions: a colored leaf
//! of one transition is the root of the next, so the two must carry the
//! same letter and state.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::counter::{ConfigGraph, CounterTree};
use crate::error::{parse as perr, Error, Result};
use crate::ext::ExtNat;
use crate::game::{ParityGame, Player};
use crate::graph::Digraph;
use crate::parity::ParityAutomaton;
use crate::tree::text::{self, content_lines, parse_set};
use crate::tree::{RegularTree, VertexId};
use crate::wmsoup::NormalizedAutomaton;

/// A tree whose labels carry an optional color.
pub type ColoredTree<L> = RegularTree<(L, Option<usize>)>;

/// Letters colored by states.
pub type PartiallyColoredTree = ColoredTree<usize>;

/// Root color (`None` for uncolored) and the colors of leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile {
    pub root: Option<usize>,
    pub leaves: BTreeSet<usize>,
}

/// Vertices that occur as a non-root node of the unfolding.
fn inner_occurrences<L>(t: &RegularTree<L>) -> Vec<bool> {
    let mut seen = vec![false; t.len()];
    let mut queue: VecDeque<VertexId> = t.successors(t.root()).collect();
    while let Some(v) = queue.pop_front() {
        if !seen[v.0] {
            seen[v.0] = true;
            queue.extend(t.successors(v));
        }
    }
    seen
}

/// Why a colored tree cannot serve as a transition, if it cannot.
fn transition_defect<L>(t: &ColoredTree<L>) -> Option<String> {
    let root = t.root();
    if t.label(root).1.is_some() {
        if t.is_leaf(root) {
            return Some("a single colored node".into());
        }
        if inner_occurrences(t)[root.0] {
            return Some("the colored root occurs again below itself".into());
        }
    }
    let inner = inner_occurrences(t);
    t.vertices()
        .find(|&v| inner[v.0] && !t.is_leaf(v) && t.label(v).1.is_some())
        .map(|v| format!("inner vertex {} is colored", v.0))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedAutomaton {
    pub alphabet: Vec<String>,
    /// In increasing order.
    pub states: Vec<String>,
    pub accepting: Vec<bool>,
    pub transitions: Vec<PartiallyColoredTree>,
}

/// The acceptance game together with the meaning of its positions.
#[derive(Debug, Clone)]
pub struct AcceptanceGame {
    pub game: ParityGame,
    pub initial: usize,
    /// Automaton's position for each colored label `(letter, state)`.
    pub label_pos: BTreeMap<(usize, usize), usize>,
    /// Pathfinder's position for each transition.
    pub transition_pos: Vec<usize>,
}

impl GeneralizedAutomaton {
    pub fn priority(&self, q: usize) -> u32 {
        2 * q as u32 + u32::from(!self.accepting[q])
    }

    pub fn validate(&self) -> Result<()> {
        if self.states.is_empty() || self.accepting.len() != self.states.len() {
            return Err(Error::InvalidAutomaton("bad state declarations".into()));
        }
        for (index, t) in self.transitions.iter().enumerate() {
            let bad = |reason: String| Error::MalformedTransition { index, reason };
            for &(a, c) in t.labels() {
                if a >= self.alphabet.len() || c.is_some_and(|q| q >= self.states.len()) {
                    return Err(bad("label out of range".into()));
                }
            }
            if let Some(reason) = transition_defect(t) {
                return Err(bad(reason));
            }
        }
        Ok(())
    }

    /// Colored leaves of transition `i` as `(vertex, letter, state)`.
    fn colored_leaves(&self, i: usize) -> Vec<(VertexId, usize, usize)> {
        let t = &self.transitions[i];
        let inner = inner_occurrences(t);
        t.vertices()
            .filter(|&v| inner[v.0] && t.is_leaf(v))
            .filter_map(|v| t.label(v).1.map(|q| (v, t.label(v).0, q)))
            .collect()
    }

    pub fn profile(&self, i: usize) -> Profile {
        let t = &self.transitions[i];
        Profile {
            root: t.label(t.root()).1,
            leaves: self.colored_leaves(i).into_iter().map(|(_, _, q)| q).collect(),
        }
    }

    pub fn profiles(&self) -> BTreeSet<Profile> {
        (0..self.transitions.len()).map(|i| self.profile(i)).collect()
    }

    /// The colored root label of transition `i`, if any.
    fn root_label(&self, i: usize) -> Option<(usize, usize)> {
        let t = &self.transitions[i];
        let (a, c) = *t.label(t.root());
        c.map(|q| (a, q))
    }

    /// Automaton picks a transition whose root matches the current colored
    /// label (an uncolored root at the start); Pathfinder picks a colored
    /// leaf, whose label becomes current.
    pub fn acceptance_game(&self) -> Result<AcceptanceGame> {
        self.validate()?;
        let mut game = ParityGame::new();
        let initial = game.add_position(Player::Automaton, 0);
        game.names[initial] = "start".into();
        let mut label_pos = BTreeMap::new();
        let mut pos_of = |game: &mut ParityGame, (a, q): (usize, usize)| {
            *label_pos.entry((a, q)).or_insert_with(|| {
                let p = game.add_position(Player::Automaton, self.priority(q));
                game.names[p] = format!("{}/{}", self.alphabet[a], self.states[q]);
                p
            })
        };
        let mut transition_pos = Vec::new();
        for i in 0..self.transitions.len() {
            let p = game.add_position(Player::Pathfinder, 0);
            game.names[p] = format!("t{i}");
            transition_pos.push(p);
            let from = match self.root_label(i) {
                None => initial,
                Some(l) => pos_of(&mut game, l),
            };
            game.add_edge(from, p);
            for (_, a, q) in self.colored_leaves(i) {
                let to = pos_of(&mut game, (a, q));
                game.add_edge(p, to);
            }
        }
        Ok(AcceptanceGame {
            game,
            initial,
            label_pos,
            transition_pos,
        })
    }

    /// Solves the acceptance game; on a win for Automaton returns the
    /// unfolding of its positional winning strategy.
    pub fn solve(&self) -> Result<Option<PartiallyColoredTree>> {
        let ag = self.acceptance_game()?;
        let sol = ag.game.solve();
        if sol.winner[ag.initial] != Player::Automaton {
            return Ok(None);
        }
        let trans_of: HashMap<usize, usize> = ag.transition_pos.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let pick = |pos: usize| sol.strategy[pos].and_then(|p| trans_of.get(&p).copied());
        let start = pick(ag.initial);
        let chosen: BTreeMap<(usize, usize), usize> = ag
            .label_pos
            .iter()
            .filter_map(|(&l, &p)| pick(p).map(|t| (l, t)))
            .collect();
        Ok(start.and_then(|s| self.unfold(s, &chosen)))
    }

    /// The run obtained by starting with transition `start` and continuing
    /// at every colored leaf with the transition `choice` assigns to its
    /// label. `None` if some reached label has no choice.
    pub fn unfold(&self, start: usize, choice: &BTreeMap<(usize, usize), usize>) -> Option<PartiallyColoredTree> {
        let leaves: Vec<BTreeSet<VertexId>> = (0..self.transitions.len())
            .map(|i| self.colored_leaves(i).into_iter().map(|(v, _, _)| v).collect())
            .collect();
        let first = (start, self.transitions[start].root());
        let mut ids = HashMap::from([(first, 0usize)]);
        let mut order = vec![first];
        let mut labels = Vec::new();
        let mut children = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let (t, v) = order[i];
            let tree = &self.transitions[t];
            labels.push(*tree.label(v));
            let mut ch = None;
            if let Some(cs) = tree.children(v) {
                let mut out = [VertexId(0); 2];
                for d in 0..2 {
                    let c = cs[d];
                    let key = if leaves[t].contains(&c) {
                        let (a, col) = *tree.label(c);
                        let next = *choice.get(&(a, col?))?;
                        (next, self.transitions[next].root())
                    } else {
                        (t, c)
                    };
                    let n = order.len();
                    let id = *ids.entry(key).or_insert_with(|| {
                        order.push(key);
                        n
                    });
                    out[d] = VertexId(id);
                }
                ch = Some(out);
            }
            children.push(ch);
            i += 1;
        }
        RegularTree::new(labels, children, VertexId(0)).ok()
    }

    /// Checks a regular run directly: uncolored root, every factor a listed
    /// transition, and the parity condition on colored vertices.
    pub fn verify_run(&self, run: &PartiallyColoredTree) -> std::result::Result<(), String> {
        if run.label(run.root()).1.is_some() {
            return Err("the root is colored".into());
        }
        let mut zone_roots = vec![run.root()];
        for v in run.vertices() {
            if run.label(v).1.is_some() {
                if run.is_leaf(v) {
                    return Err(format!("colored vertex {} is a leaf of the run", v.0));
                }
                zone_roots.push(v);
            }
        }
        for z in zone_roots {
            let f = factor(run, z);
            if !self.transitions.iter().any(|t| f.agrees_with(t, |x, y| x == y).is_ok()) {
                return Err(format!("the factor at vertex {} is not a transition", z.0));
            }
        }
        let mut g = Digraph::new(run.len());
        for v in run.vertices() {
            for c in run.successors(v) {
                g.add_edge(v.0, c.0, 0);
            }
        }
        for r in (0..self.states.len()).filter(|&r| !self.accepting[r]) {
            let cyc = g.cyclic_nodes(|v| run.labels()[v].1.is_none_or(|q| q <= r));
            if let Some(v) = run.vertices().find(|v| cyc[v.0] && run.label(*v).1 == Some(r)) {
                return Err(format!("a cycle through vertex {} has rejecting maximum", v.0));
            }
        }
        Ok(())
    }

    /// Reads `genaut`, `alphabet`, `states a < b`, `accepting`, then
    /// transitions, each a tree between `transition` and `end` with node
    /// attributes `label=` and `color=` (`-` for uncolored).
    pub fn parse(src: &str) -> Result<(String, GeneralizedAutomaton)> {
        let mut name = None;
        let mut aut = GeneralizedAutomaton {
            alphabet: Vec::new(),
            states: Vec::new(),
            accepting: Vec::new(),
            transitions: Vec::new(),
        };
        let mut accepting = Vec::new();
        let mut block: Option<(usize, String)> = None;
        let mut blocks = Vec::new();
        for (ln, l) in content_lines(src) {
            let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
            if let Some((start, body)) = block.as_mut() {
                if kw == "end" {
                    blocks.push((*start, std::mem::take(body)));
                    block = None;
                } else {
                    // keep line numbers aligned with the source
                    while body.lines().count() < ln - *start {
                        body.push('\n');
                    }
                    body.push_str(l);
                    body.push('\n');
                }
                continue;
            }
            match kw {
                "genaut" => name = Some(rest.trim().to_string()),
                "alphabet" => aut.alphabet = rest.split_whitespace().map(String::from).collect(),
                "states" => aut.states = rest.split('<').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
                "accepting" => accepting.extend(rest.split_whitespace().map(|s| (ln, s.to_string()))),
                "transition" => block = Some((ln, "tree t\n".into())),
                _ => return Err(perr(ln, format!("unknown keyword `{kw}`"))),
            }
        }
        if let Some((ln, _)) = block {
            return Err(perr(ln, "transition without `end`"));
        }
        aut.accepting = vec![false; aut.states.len()];
        for (ln, s) in accepting {
            let q = index(ln, &aut.states, &s, "state")?;
            aut.accepting[q] = true;
        }
        for (start, body) in blocks {
            let t = parse_colored(&body, &aut.alphabet, &aut.states, start)?;
            aut.transitions.push(t);
        }
        aut.validate()?;
        Ok((name.ok_or_else(|| perr(1, "missing `genaut` header"))?, aut))
    }

    pub fn to_text(&self, name: &str) -> String {
        let mut out = format!(
            "genaut {name}\nalphabet {}\nstates {}\n",
            self.alphabet.join(" "),
            self.states.join(" < ")
        );
        let acc: Vec<&str> = (0..self.states.len())
            .filter(|&q| self.accepting[q])
            .map(|q| self.states[q].as_str())
            .collect();
        if !acc.is_empty() {
            let _ = writeln!(out, "accepting {}", acc.join(" "));
        }
        for t in &self.transitions {
            out += "transition\n";
            let body = self.run_to_text("t", t);
            for l in body.lines().skip(1) {
                let _ = writeln!(out, "{l}");
            }
            out += "end\n";
        }
        out
    }

    pub fn run_to_text(&self, name: &str, run: &PartiallyColoredTree) -> String {
        text::write(name, &[], run, |&(a, c)| {
            format!("label={} color={}", self.alphabet[a], c.map_or("-", |q| self.states[q].as_str()))
        })
    }

    pub fn parse_run(&self, src: &str) -> Result<(String, PartiallyColoredTree)> {
        let raw = text::parse(src)?;
        let t = colored_from_raw(&raw.tree, &self.alphabet, &self.states)?;
        Ok((raw.name, t))
    }
}

fn index(line: usize, list: &[String], name: &str, what: &str) -> Result<usize> {
    list.iter()
        .position(|x| x == name)
        .ok_or_else(|| perr(line, format!("unknown {what} `{name}`")))
}

fn colored_from_raw(t: &RegularTree<text::Attrs>, alphabet: &[String], states: &[String]) -> Result<PartiallyColoredTree> {
    let mut labels = Vec::new();
    for v in t.vertices() {
        let a = t.label(v);
        let letter = index(a.line, alphabet, a.require("label")?, "letter")?;
        let color = match a.get("color") {
            None | Some("-") => None,
            Some(s) => Some(index(a.line, states, s, "state")?),
        };
        labels.push((letter, color));
    }
    Ok(t.map_labels(|v, _| labels[v.0]))
}

fn parse_colored(body: &str, alphabet: &[String], states: &[String], offset: usize) -> Result<PartiallyColoredTree> {
    let shift = |e: Error| match e {
        Error::Parse { line, message } if line > 0 => Error::Parse { line: line + offset - 1, message },
        other => other,
    };
    let raw = text::parse(body).map_err(shift)?;
    colored_from_raw(&raw.tree, alphabet, states).map_err(shift)
}

/// The factor rooted at `z`: descend through uncolored vertices, stopping
/// at colored ones, which become leaves.
fn factor<L: Clone>(run: &ColoredTree<L>, z: VertexId) -> ColoredTree<L> {
    // ids: 0 is the root copy; others keyed by (vertex, as_leaf)
    let mut ids: HashMap<(VertexId, bool), usize> = HashMap::new();
    let mut order = vec![(z, false)];
    let mut labels = Vec::new();
    let mut children = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let (v, as_leaf) = order[i];
        labels.push(run.label(v).clone());
        let ch = match run.children(v) {
            Some(cs) if !as_leaf => {
                let mut out = [VertexId(0); 2];
                for d in 0..2 {
                    let key = (cs[d], run.label(cs[d]).1.is_some());
                    let n = order.len();
                    out[d] = VertexId(*ids.entry(key).or_insert_with(|| {
                        order.push(key);
                        n
                    }));
                }
                Some(out)
            }
            _ => None,
        };
        children.push(ch);
        i += 1;
    }
    RegularTree::new(labels, children, VertexId(0)).expect("factor is well formed")
}

/// The game where Automaton, at `q` (or `None` initially), picks `P` with
/// `(q, P)` in `profiles`, and Pathfinder picks a state of `P`.
/// Position 0 is the initial one.
pub fn profile_game(profiles: &BTreeSet<Profile>, states: &[String], accepting: &[bool]) -> ParityGame {
    let mut game = ParityGame::new();
    let start = game.add_position(Player::Automaton, 0);
    game.names[start] = "start".into();
    let qpos: Vec<usize> = (0..states.len())
        .map(|q| {
            let p = game.add_position(Player::Automaton, 2 * q as u32 + u32::from(!accepting[q]));
            game.names[p] = states[q].clone();
            p
        })
        .collect();
    let mut setpos: BTreeMap<&BTreeSet<usize>, usize> = BTreeMap::new();
    for prof in profiles {
        let p = *setpos.entry(&prof.leaves).or_insert_with(|| {
            let p = game.add_position(Player::Pathfinder, 0);
            let names: Vec<&str> = prof.leaves.iter().map(|&q| states[q].as_str()).collect();
            game.names[p] = format!("{{{}}}", names.join(","));
            for &q in &prof.leaves {
                game.add_edge(p, qpos[q]);
            }
            p
        });
        let from = prof.root.map_or(start, |q| qpos[q]);
        game.add_edge(from, p);
    }
    game
}

/// Reads `profiles <name>`, `states a < b`, `accepting ..` and lines
/// `profile <root or -> {p,q}`.
pub fn parse_profiles(src: &str) -> Result<(String, Vec<String>, Vec<bool>, BTreeSet<Profile>)> {
    let mut name = None;
    let mut states: Vec<String> = Vec::new();
    let mut acc = Vec::new();
    let mut raw = Vec::new();
    for (ln, l) in content_lines(src) {
        let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        match kw {
            "profiles" => name = Some(rest.trim().to_string()),
            "states" => states = rest.split('<').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
            "accepting" => acc.extend(rest.split_whitespace().map(|s| (ln, s.to_string()))),
            "profile" => {
                let (root, set) = rest
                    .trim()
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| perr(ln, "expected `profile <root> {..}`"))?;
                raw.push((ln, root.to_string(), set.trim().to_string()));
            }
            _ => return Err(perr(ln, format!("unknown keyword `{kw}`"))),
        }
    }
    let mut accepting = vec![false; states.len()];
    for (ln, s) in acc {
        accepting[index(ln, &states, &s, "state")?] = true;
    }
    let mut profiles = BTreeSet::new();
    for (ln, root, set) in raw {
        let root = if root == "-" { None } else { Some(index(ln, &states, &root, "state")?) };
        let leaves = parse_set(ln, &set)?
            .iter()
            .map(|s| index(ln, &states, s, "state"))
            .collect::<Result<_>>()?;
        profiles.insert(Profile { root, leaves });
    }
    Ok((name.ok_or_else(|| perr(1, "missing `profiles` header"))?, states, accepting, profiles))
}

/// A finite candidate over `letter × state`, colored (by the single chain
/// state) where the label carries `Some`.
pub type CostRun = ColoredTree<(usize, usize)>;

/// The automaton and state the cost functions refer to.
#[derive(Debug, Clone, Copy)]
pub struct CostContext<'a> {
    pub aut: &'a NormalizedAutomaton,
    pub q: usize,
}

impl<'a> CostContext<'a> {
    pub fn new(aut: &'a NormalizedAutomaton, q: usize) -> Result<Self> {
        let ev = &aut.evidence;
        let n = aut.automaton.parity.states.len();
        if !ev.property_a || !ev.property_b || ev.larcut.len() != n || ev.larcheck.len() != n {
            return Err(Error::NotNormalForm("normal-form evidence missing or incomplete".into()));
        }
        if q >= n {
            return Err(Error::UnknownState(format!("#{q}")));
        }
        Ok(CostContext { aut, q })
    }
}

/// Counter values of a finite candidate, with its unfolding.
struct Valued {
    g: ConfigGraph,
    values: Vec<ExtNat>,
    state: Vec<usize>,
}

fn valued(run: &CostRun, ctx: &CostContext) -> Result<Valued> {
    let aut = &ctx.aut.automaton;
    let tree = run.map_labels(|_, &((_, p), _)| aut.ops[p].clone());
    let ct = CounterTree::new(aut.counters.clone(), tree)?;
    let g = ConfigGraph::new(&ct)?;
    let values = g.values(|_| false);
    let state = g.unfolding.vertex.iter().map(|v| run.label(*v).0 .1).collect();
    Ok(Valued { g, values, state })
}

/// `max_c max_x val(x, c)` over bounded `c ∉ larcut(q)` and nodes `x` with
/// no ancestor-or-self cutting `c`; 0 when either range is empty.
pub fn eval_cost_alpha(run: &CostRun, ctx: &CostContext) -> Result<ExtNat> {
    let aut = &ctx.aut.automaton;
    let larcut = &ctx.aut.evidence.larcut[ctx.q];
    let v = valued(run, ctx)?;
    let u = &v.g.unfolding;
    let mut best = ExtNat::ZERO;
    for c in (0..aut.counters.len()).filter(|&c| aut.bounded[c] && !larcut.contains(&c)) {
        for x in 0..u.len() {
            let cut_above = std::iter::once(x)
                .chain(u.ancestors(x))
                .any(|y| aut.cut[v.state[y]].contains(&c));
            if !cut_above {
                best = best.max(v.values[v.g.config(x, c)]);
            }
        }
    }
    Ok(best)
}

/// `∞` if the root is uncolored; otherwise `min_c min_x max_y val(y, c)`
/// over unbounded `c ∈ larcheck(q)`, colored leaves `x` and ancestors-or-self
/// `y` of `x` checking `c`. An empty max is 0 and an empty min is `∞`.
pub fn eval_cost_beta(run: &CostRun, ctx: &CostContext) -> Result<ExtNat> {
    if run.label(run.root()).1.is_none() {
        return Ok(ExtNat::Inf);
    }
    let aut = &ctx.aut.automaton;
    let larcheck = &ctx.aut.evidence.larcheck[ctx.q];
    let v = valued(run, ctx)?;
    let u = &v.g.unfolding;
    let leaves: Vec<usize> = u.leaves().filter(|&x| run.label(u.vertex[x]).1.is_some()).collect();
    let mut outer = ExtNat::Inf;
    for c in larcheck.iter().copied().filter(|&c| !aut.bounded[c]) {
        for &x in &leaves {
            let inner = std::iter::once(x)
                .chain(u.ancestors(x))
                .filter(|&y| aut.check[v.state[y]].contains(&c))
                .map(|y| v.values[v.g.config(y, c)])
                .max()
                .unwrap_or(ExtNat::ZERO);
            outer = outer.min(inner);
        }
    }
    Ok(outer)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransitionVerdict {
    Accepted,
    Rejected(String),
}

impl TransitionVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, TransitionVerdict::Accepted)
    }
}

/// Whether a finite candidate is a transition of the chain automaton for
/// `q` (`starred` for the variant where `q` occurs finitely often).
///
/// On finite candidates membership of the projection reduces to
/// δ2-consistency, since every finite partial run is accepting and the
/// conditions on states above `q` concern infinite subtrees only.
pub fn check_rq_transition(candidate: &CostRun, ctx: &CostContext, starred: bool) -> Result<TransitionVerdict> {
    let aut = &ctx.aut.automaton;
    let p = &aut.parity;
    let u = candidate.unfold()?;
    let reject = |s: String| Ok(TransitionVerdict::Rejected(s));
    if let Some(reason) = transition_defect(candidate) {
        return reject(reason);
    }
    for (x, &v) in u.vertex.iter().enumerate() {
        let ((a, s), _) = *candidate.label(v);
        if a >= p.alphabet.len() || s >= p.states.len() {
            return Err(Error::InvalidRun(format!("label out of range at {}", u.address[x])));
        }
        if let Some([l, r]) = candidate.children(v) {
            let (sl, sr) = (candidate.label(l).0 .1, candidate.label(r).0 .1);
            if !p.delta2.contains(&(s, a, sl, sr)) {
                return reject(format!("node {} violates the transition relation", u.address[x]));
            }
        }
    }
    for x in u.leaves() {
        if candidate.label(u.vertex[x]).1.is_none() {
            continue;
        }
        let top = std::iter::once(x)
            .chain(u.ancestors(x))
            .map(|y| candidate.label(u.vertex[y]).0 .1)
            .max()
            .unwrap_or(0);
        if top != ctx.q {
            return reject(format!(
                "the path to colored leaf {} has maximal state {}",
                u.address[x], p.states[top]
            ));
        }
    }
    if !starred && p.accepting[ctx.q] {
        let alpha = eval_cost_alpha(candidate, ctx)?;
        if alpha.is_inf() {
            return reject("alpha is infinite".into());
        }
        let beta = eval_cost_beta(candidate, ctx)?;
        if beta.is_finite() {
            return reject(format!("beta is finite ({beta})"));
        }
    }
    Ok(TransitionVerdict::Accepted)
}

/// Reads a candidate in tree format with `label=`, `state=` and
/// `color=state` or `color=-`.
pub fn parse_cost_run(src: &str, aut: &ParityAutomaton) -> Result<(String, CostRun)> {
    let raw = text::parse(src)?;
    let mut labels = Vec::new();
    for v in raw.tree.vertices() {
        let a = raw.tree.label(v);
        let letter = index(a.line, &aut.alphabet, a.require("label")?, "letter")?;
        let state = index(a.line, &aut.states, a.require("state")?, "state")?;
        let color = match a.get("color") {
            None | Some("-") => None,
            Some("state") => Some(0),
            Some(s) => return Err(perr(a.line, format!("unknown color `{s}`"))),
        };
        labels.push(((letter, state), color));
    }
    Ok((raw.name, raw.tree.map_labels(|v, _| labels[v.0])))
}

pub fn cost_run_to_text(name: &str, run: &CostRun, aut: &ParityAutomaton) -> String {
    text::write(name, &[], run, |&((a, s), c)| {
        format!(
            "label={} state={} color={}",
            aut.alphabet[a],
            aut.states[s],
            if c.is_some() { "state" } else { "-" }
        )
    })
}

/// The chain recognising (the closure of) partial runs of a normalized
/// automaton: the base level is the parity automaton, and each level adds
/// a one-state automaton whose transitions are checked by
/// [`check_rq_transition`].
#[derive(Debug, Clone)]
pub enum AutomatonChain {
    Base(ParityAutomaton),
    Level {
        /// Target state `q`.
        q: usize,
        starred: bool,
        /// Whether the single chain state is accepting.
        accepting: bool,
        inner: Box<AutomatonChain>,
    },
}

impl AutomatonChain {
    /// The chain for `q` (starred or not), built by induction on states.
    pub fn for_state(aut: &NormalizedAutomaton, q: usize, starred: bool) -> Result<AutomatonChain> {
        CostContext::new(aut, q)?;
        let p = &aut.automaton.parity;
        if !starred && p.accepting[q] {
            return Ok(AutomatonChain::Level {
                q,
                starred: false,
                accepting: true,
                inner: Box::new(Self::for_state(aut, q, true)?),
            });
        }
        let inner = if q == 0 {
            AutomatonChain::Base(p.clone())
        } else {
            Self::for_state(aut, q - 1, false)?
        };
        Ok(AutomatonChain::Level {
            q,
            starred: true,
            accepting: false,
            inner: Box::new(inner),
        })
    }

    pub fn depth(&self) -> usize {
        match self {
            AutomatonChain::Base(_) => 0,
            AutomatonChain::Level { inner, .. } => 1 + inner.depth(),
        }
    }

    /// Checks a finite candidate transition of the top level.
    pub fn accepts_transition(&self, aut: &NormalizedAutomaton, candidate: &CostRun) -> Result<TransitionVerdict> {
        match self {
            AutomatonChain::Base(_) => Err(Error::InvalidAutomaton("the base level has no tree transitions".into())),
            AutomatonChain::Level { q, starred, .. } => check_rq_transition(candidate, &CostContext::new(aut, *q)?, *starred),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wmsoup::WmsoUpAutomaton;

    const CLOSED: &str = "genaut g\nalphabet a\nstates q\naccepting q\ntransition\nnode 0 label=a left=1 right=1\nnode 1 label=a\nroot 0\nend\n";

    #[test]
    fn closed_transition_wins_at_once() {
        let (_, g) = GeneralizedAutomaton::parse(CLOSED).unwrap();
        let run = g.solve().unwrap().expect("automaton wins");
        assert!(g.verify_run(&run).is_ok());
        assert!(run.agrees_with(&g.transitions[0], |x, y| x == y).is_ok());
    }

    #[test]
    fn missing_continuation_loses() {
        let src = "genaut g\nalphabet a\nstates q\naccepting q\ntransition\nnode 0 label=a left=1 right=2\nnode 1 label=a color=q\nnode 2 label=a\nroot 0\nend\n";
        let (_, g) = GeneralizedAutomaton::parse(src).unwrap();
        assert!(g.solve().unwrap().is_none());
    }

    #[test]
    fn accepting_loop_gives_regular_run() {
        let src = "genaut g\nalphabet a\nstates q\naccepting q\n\
            transition\nnode 0 label=a left=1 right=1\nnode 1 label=a color=q\nroot 0\nend\n\
            transition\nnode 0 label=a color=q left=1 right=2\nnode 1 label=a color=q\nnode 2 label=a\nroot 0\nend\n";
        let (_, g) = GeneralizedAutomaton::parse(src).unwrap();
        let run = g.solve().unwrap().expect("wins");
        g.verify_run(&run).unwrap();
        let rejecting = src.replace("accepting q\n", "");
        let (_, g) = GeneralizedAutomaton::parse(&rejecting).unwrap();
        assert!(g.solve().unwrap().is_none());
    }

    #[test]
    fn malformed_transitions_are_reported() {
        let single = "genaut g\nalphabet a\nstates q\ntransition\nnode 0 label=a color=q\nroot 0\nend\n";
        assert!(matches!(
            GeneralizedAutomaton::parse(single),
            Err(Error::MalformedTransition { index: 0, .. })
        ));
        let inner = "genaut g\nalphabet a\nstates q\ntransition\nnode 0 label=a left=1 right=2\nnode 1 label=a color=q left=2 right=2\nnode 2 label=a\nroot 0\nend\n";
        assert!(matches!(
            GeneralizedAutomaton::parse(inner),
            Err(Error::MalformedTransition { index: 0, .. })
        ));
    }

    #[test]
    fn profile_game_examples() {
        let states = vec!["q".to_string()];
        let trivial = BTreeSet::from([Profile { root: None, leaves: BTreeSet::new() }]);
        let sol = profile_game(&trivial, &states, &[false]).solve();
        assert_eq!(sol.winner[0], Player::Automaton);
        let looping = BTreeSet::from([
            Profile { root: None, leaves: BTreeSet::from([0]) },
            Profile { root: Some(0), leaves: BTreeSet::from([0]) },
        ]);
        let g = profile_game(&looping, &states, &[false]);
        assert_eq!(g.len(), 3);
        assert_eq!(g.solve().winner[0], Player::Pathfinder);
        assert_eq!(profile_game(&looping, &states, &[true]).solve().winner[0], Player::Automaton);
    }

    fn normalized(src: &str) -> NormalizedAutomaton {
        let (_, automaton, evidence) = WmsoUpAutomaton::parse(src).unwrap();
        NormalizedAutomaton {
            automaton,
            evidence: evidence.unwrap(),
        }
    }

    const AUT: &str = "wmsoup w\nalphabet a\nstates p < q\naccepting q\ninitial p\nd0 p a\nd0 q a\nd2 p a p p\nd2 q a p p\nd2 q a q p\nd2 p a q p\ncounters bounded: b ; unbounded: u\nops p = {(b,self,inc,b,parent),(u,self,inc,u,parent)}\nops q = {(u,self,tr,u,parent)}\ncheck q = {u}\nlarcut p = {}\nlarcut q = {}\nlarcheck p = {}\nlarcheck q = {u}\n";

    fn run(aut: &NormalizedAutomaton, src: &str) -> CostRun {
        parse_cost_run(src, &aut.automaton.parity).unwrap().1
    }

    // q root with children: left p-spine of depth 2, right p leaf
    const SPINE: &str = "tree r\nnode 0 label=a state=q color=state left=1 right=3\nnode 1 label=a state=p left=2 right=3\nnode 2 label=a state=p\nnode 3 label=a state=p\nroot 0\n";

    #[test]
    fn alpha_takes_max_over_uncut_nodes() {
        let aut = normalized(AUT);
        let ctx = CostContext::new(&aut, 1).unwrap();
        let r = run(&aut, SPINE);
        assert_eq!(eval_cost_alpha(&r, &ctx).unwrap(), ExtNat::Fin(2));
        let cut = normalized(&AUT.replace("check q = {u}", "check q = {u}\ncut q = {b}"));
        let ctx = CostContext::new(&cut, 1).unwrap();
        assert_eq!(eval_cost_alpha(&r, &ctx).unwrap(), ExtNat::ZERO);
        let all = normalized(&AUT.replace("larcut q = {}", "larcut q = {b}"));
        assert_eq!(eval_cost_alpha(&r, &CostContext::new(&all, 1).unwrap()).unwrap(), ExtNat::ZERO);
    }

    #[test]
    fn beta_cases() {
        let aut = normalized(AUT);
        let ctx = CostContext::new(&aut, 1).unwrap();
        let uncolored = run(&aut, &SPINE.replace(" color=state", ""));
        assert_eq!(eval_cost_beta(&uncolored, &ctx).unwrap(), ExtNat::Inf);
        // colored root, no colored leaves: empty min
        assert_eq!(eval_cost_beta(&run(&aut, SPINE), &ctx).unwrap(), ExtNat::Inf);
        let leaf = SPINE.replace("node 2 label=a state=p", "node 2 label=a state=p color=state");
        // checked only at the root, where u has value 2
        assert_eq!(eval_cost_beta(&run(&aut, &leaf), &ctx).unwrap(), ExtNat::Fin(2));
    }

    #[test]
    fn transition_checks() {
        let aut = normalized(AUT);
        let ctx = CostContext::new(&aut, 1).unwrap();
        let single = run(&aut, "tree r\nnode 0 label=a state=p\nroot 0\n");
        assert!(check_rq_transition(&single, &ctx, true).unwrap().is_accepted());
        let leaf = SPINE.replace("node 2 label=a state=p", "node 2 label=a state=p color=state");
        assert!(check_rq_transition(&run(&aut, &leaf), &ctx, true).unwrap().is_accepted());
        let low = CostContext::new(&aut, 0).unwrap();
        assert!(!check_rq_transition(&run(&aut, &leaf), &low, true).unwrap().is_accepted());
        assert!(!check_rq_transition(&run(&aut, &leaf), &ctx, false).unwrap().is_accepted());
        assert!(check_rq_transition(&run(&aut, &SPINE.replace(" color=state", "")), &ctx, false)
            .unwrap()
            .is_accepted());
    }

    #[test]
    fn chain_depths() {
        let aut = normalized(AUT);
        assert_eq!(AutomatonChain::for_state(&aut, 0, true).unwrap().depth(), 1);
        assert_eq!(AutomatonChain::for_state(&aut, 1, false).unwrap().depth(), 3);
    }
}
