//! Seeded generators and brute-force oracles shared by the integration tests.
//! Nothing here calls into the library's own evaluation code.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wmsoup_core::parity::ParityAutomaton;
use wmsoup_core::chain::{GeneralizedAutomaton, Profile as ColorProfile};
use wmsoup_core::{
    Address, CounterOp, CounterTree, ExtNat, Locus, MaxAutomaton, Op, OpKind, OpSet, ParityGame, Player, Position,
    Profile, RegularTree, Run, UpWord, WmsoUpAutomaton, VertexId, WeightedAlphabet, WeightedWord,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// A finite binary tree shape; node 0 is the root.
#[derive(Debug, Clone)]
pub struct Shape {
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Option<[usize; 2]>>,
    pub address: Vec<Address>,
}

impl Shape {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.children[x].is_none()).collect()
    }

    /// Strict ancestors of `x`, nearest first.
    pub fn ancestors(&self, mut x: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some(p) = self.parent[x] {
            out.push(p);
            x = p;
        }
        out
    }

    pub fn tree<L: Clone>(&self, labels: &[L]) -> RegularTree<L> {
        let ch = self.children.iter().map(|c| c.map(|[l, r]| [VertexId(l), VertexId(r)])).collect();
        RegularTree::new(labels.to_vec(), ch, VertexId(0)).expect("shape is a tree")
    }
}

/// Splits random leaves until the next split would exceed `max_nodes` or a
/// coin says stop.
pub fn random_shape(rng: &mut ChaCha8Rng, max_nodes: usize) -> Shape {
    let mut s = Shape {
        parent: vec![None],
        children: vec![None],
        address: vec![Address::root()],
    };
    while s.len() + 2 <= max_nodes && rng.gen_bool(0.85) {
        let leaves = s.leaves();
        let x = *leaves.choose(rng).unwrap();
        let n = s.len();
        s.children[x] = Some([n, n + 1]);
        for d in 0..2u8 {
            s.parent.push(Some(x));
            s.children.push(None);
            s.address.push(s.address[x].child(d));
        }
    }
    s
}

pub fn random_op(rng: &mut ChaCha8Rng, k: usize, root_directed: bool) -> CounterOp {
    let kind = if rng.gen_bool(0.5) { OpKind::Inc } else { OpKind::Tr };
    let (a, b) = if root_directed {
        (Locus::Current, Locus::Parent)
    } else {
        *[
            (Locus::Current, Locus::Parent),
            (Locus::Parent, Locus::Current),
            (Locus::Current, Locus::Current),
        ]
        .choose(rng)
        .unwrap()
    };
    CounterOp::new(rng.gen_range(0..k), a, kind, rng.gen_range(0..k), b).unwrap()
}

pub fn random_ops(rng: &mut ChaCha8Rng, k: usize, max: usize, root_directed: bool) -> OpSet {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| random_op(rng, k, root_directed)).collect()
}

/// A finite counter tree: shape, per-node ops and counter count.
#[derive(Debug, Clone)]
pub struct FiniteCounters {
    pub shape: Shape,
    pub ops: Vec<OpSet>,
    pub k: usize,
}

impl FiniteCounters {
    pub fn random(rng: &mut ChaCha8Rng, max_nodes: usize, max_k: usize, root_directed: bool) -> Self {
        let shape = random_shape(rng, max_nodes);
        let k = rng.gen_range(1..=max_k);
        let ops = (0..shape.len()).map(|_| random_ops(rng, k, 4, root_directed)).collect();
        FiniteCounters { shape, ops, k }
    }

    pub fn counter_tree(&self) -> CounterTree {
        CounterTree::new(names("c", self.k), self.shape.tree(&self.ops)).unwrap()
    }

    /// Configuration edges `(from, to, increments)` over `node * k + c`.
    pub fn edges(&self) -> Vec<(usize, usize, u64)> {
        let mut out = Vec::new();
        for x in 0..self.shape.len() {
            for op in &self.ops[x] {
                let at = |l: Locus| match l {
                    Locus::Current => Some(x),
                    Locus::Parent => self.shape.parent[x],
                };
                if let (Some(a), Some(b)) = (at(op.src_at), at(op.dst_at)) {
                    let w = u64::from(op.kind == OpKind::Inc);
                    out.push((a * self.k + op.src, b * self.k + op.dst, w));
                }
            }
        }
        out
    }

    /// Largest increment count of a counter path ending in each
    /// configuration, avoiding configurations of `banned` nodes.
    ///
    /// Path weights are capped at `V + 1` for `V` configurations: a path
    /// with that many increments revisits the source of an increment, so
    /// the cycle can be pumped and the value is infinite.
    pub fn values(&self, banned: &dyn Fn(usize) -> bool) -> Vec<ExtNat> {
        let v = self.shape.len() * self.k;
        let cap = v as u64 + 1;
        let edges: Vec<_> = self
            .edges()
            .into_iter()
            .filter(|&(a, b, _)| !banned(a / self.k) && !banned(b / self.k))
            .collect();
        let mut best = vec![0u64; v];
        loop {
            let mut changed = false;
            for &(a, b, w) in &edges {
                let cand = (best[a] + w).min(cap);
                if cand > best[b] {
                    best[b] = cand;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        best.into_iter()
            .map(|b| if b >= cap { ExtNat::Inf } else { ExtNat::Fin(b) })
            .collect()
    }

    pub fn value(&self, x: usize, c: usize) -> ExtNat {
        self.values(&|_| false)[x * self.k + c]
    }

    pub fn restricted_value(&self, x: usize, c: usize, set: &BTreeSet<usize>) -> ExtNat {
        let banned: BTreeSet<usize> = self.shape.ancestors(x).into_iter().filter(|a| set.contains(a)).collect();
        self.values(&|n| banned.contains(&n))[x * self.k + c]
    }
}

/// A parity game kept as plain data for the enumeration oracle.
#[derive(Debug, Clone)]
pub struct GameData {
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
    pub edges: Vec<Vec<usize>>,
}

impl GameData {
    pub fn random(rng: &mut ChaCha8Rng, max_positions: usize, priorities: u32) -> Self {
        let n = rng.gen_range(1..=max_positions);
        let mut g = GameData {
            owner: Vec::new(),
            priority: Vec::new(),
            edges: Vec::new(),
        };
        for _ in 0..n {
            g.owner.push(if rng.gen_bool(0.5) { Player::Automaton } else { Player::Pathfinder });
            g.priority.push(rng.gen_range(0..priorities));
            let deg = if rng.gen_bool(0.1) { 0 } else { rng.gen_range(1..=3) };
            let mut out: Vec<usize> = (0..deg).map(|_| rng.gen_range(0..n)).collect();
            out.sort();
            out.dedup();
            g.edges.push(out);
        }
        g
    }

    pub fn game(&self) -> ParityGame {
        let mut g = ParityGame::new();
        for i in 0..self.owner.len() {
            g.add_position(self.owner[i], self.priority[i]);
        }
        for (i, out) in self.edges.iter().enumerate() {
            for &j in out {
                g.add_edge(i, j);
            }
        }
        g
    }

    fn wins(&self, p: Player, priority: u32) -> bool {
        priority.is_multiple_of(2) == (p == Player::Automaton)
    }

    /// Whether `p`, fixing positional choices `choice`, wins every play
    /// from `start`.
    pub fn strategy_wins(&self, p: Player, choice: &[Option<usize>], start: usize) -> bool {
        let n = self.owner.len();
        let succ = |v: usize| -> Vec<usize> {
            if self.owner[v] == p {
                choice[v].into_iter().collect()
            } else {
                self.edges[v].clone()
            }
        };
        let mut reach = vec![false; n];
        let mut stack = vec![start];
        reach[start] = true;
        while let Some(v) = stack.pop() {
            let s = succ(v);
            if s.is_empty() && self.owner[v] == p {
                return false;
            }
            for w in s {
                if !reach[w] {
                    reach[w] = true;
                    stack.push(w);
                }
            }
        }
        // a losing cycle: its maximum priority favours the opponent
        for top in (0..n).filter(|&v| reach[v] && !self.wins(p, self.priority[v])) {
            let allowed = |w: usize| reach[w] && self.priority[w] <= self.priority[top];
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = succ(top).into_iter().filter(|&w| allowed(w)).collect();
            while let Some(v) = stack.pop() {
                if v == top {
                    return false;
                }
                if seen[v] {
                    continue;
                }
                seen[v] = true;
                stack.extend(succ(v).into_iter().filter(|&w| allowed(w)));
            }
        }
        true
    }

    /// Positions from which `p` has a positional winning strategy, by
    /// enumerating all of them.
    pub fn enumerate_region(&self, p: Player) -> Vec<bool> {
        let n = self.owner.len();
        let mine: Vec<usize> = (0..n).filter(|&v| self.owner[v] == p && !self.edges[v].is_empty()).collect();
        let mut won = vec![false; n];
        let mut idx = vec![0usize; mine.len()];
        loop {
            let mut choice = vec![None; n];
            for (i, &v) in mine.iter().enumerate() {
                choice[v] = Some(self.edges[v][idx[i]]);
            }
            for (v, w) in won.iter_mut().enumerate() {
                if !*w && self.strategy_wins(p, &choice, v) {
                    *w = true;
                }
            }
            let mut i = 0;
            loop {
                if i == mine.len() {
                    return won;
                }
                idx[i] += 1;
                if idx[i] < self.edges[mine[i]].len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }
}

/// A random transition tree over `letters × states`, colored only at the
/// root and leaves. Uncolored vertices may point back to inner vertices.
fn random_transition(rng: &mut ChaCha8Rng, letters: usize, states: usize) -> RegularTree<(usize, Option<usize>)> {
    loop {
        let n = rng.gen_range(2..=5);
        let mut labels = Vec::new();
        let mut children = Vec::new();
        for v in 0..n {
            let a = rng.gen_range(0..letters);
            let leaf = v > 0 && rng.gen_bool(0.5);
            if leaf {
                let color = rng.gen_bool(0.7).then(|| rng.gen_range(0..states));
                labels.push((a, color));
                children.push(None);
            } else {
                // forward edges keep most trees finite; an occasional back
                // edge to an uncolored inner vertex makes them regular
                let pick = |rng: &mut ChaCha8Rng| {
                    if v + 1 < n && rng.gen_bool(0.85) {
                        VertexId(rng.gen_range(v + 1..n))
                    } else {
                        VertexId(rng.gen_range(1..n.max(2)))
                    }
                };
                let l = pick(rng);
                let r = pick(rng);
                let color = (v == 0 && rng.gen_bool(0.6)).then(|| rng.gen_range(0..states));
                labels.push((a, color));
                children.push(Some([l, r]));
            }
        }
        let Ok(t) = RegularTree::new_pruned(labels, children, VertexId(0)) else {
            continue;
        };
        let aut = GeneralizedAutomaton {
            alphabet: names("a", letters),
            states: names("q", states),
            accepting: vec![true; states],
            transitions: vec![t.clone()],
        };
        if aut.validate().is_ok() {
            return t;
        }
    }
}

pub fn random_generalized(rng: &mut ChaCha8Rng) -> GeneralizedAutomaton {
    let letters = rng.gen_range(1..=2);
    let states = rng.gen_range(1..=3);
    let count = rng.gen_range(1..=5);
    GeneralizedAutomaton {
        alphabet: names("a", letters),
        states: names("q", states),
        accepting: (0..states).map(|_| rng.gen_bool(0.5)).collect(),
        transitions: (0..count).map(|_| random_transition(rng, letters, states)).collect(),
    }
}

/// Colored leaves of a transition as `(letter, state)`, found by walking
/// its non-root occurrences.
pub fn colored_leaf_labels(t: &RegularTree<(usize, Option<usize>)>) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut stack: Vec<VertexId> = t.successors(t.root()).collect();
    while let Some(v) = stack.pop() {
        if !seen.insert(v) {
            continue;
        }
        match (t.children(v), t.label(v)) {
            (None, &(a, Some(q))) => {
                out.insert((a, q));
            }
            (Some(cs), _) => stack.extend(cs),
            _ => {}
        }
    }
    out
}

/// Every positional choice: for the start and for each colored label, an
/// admissible transition index (or none if there is no candidate).
pub fn all_choices(aut: &GeneralizedAutomaton) -> Vec<(usize, BTreeMap<(usize, usize), usize>)> {
    let root = |i: usize| {
        let t = &aut.transitions[i];
        let (a, c) = *t.label(t.root());
        c.map(|q| (a, q))
    };
    let starts: Vec<usize> = (0..aut.transitions.len()).filter(|&i| root(i).is_none()).collect();
    let mut by_label: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for i in 0..aut.transitions.len() {
        if let Some(l) = root(i) {
            by_label.entry(l).or_default().push(i);
        }
    }
    let labels: Vec<_> = by_label.keys().copied().collect();
    let mut out = Vec::new();
    for &s in &starts {
        let mut idx = vec![0usize; labels.len()];
        loop {
            let m = labels.iter().zip(&idx).map(|(l, &i)| (*l, by_label[l][i])).collect();
            out.push((s, m));
            let mut i = 0;
            loop {
                if i == labels.len() {
                    break;
                }
                idx[i] += 1;
                if idx[i] < by_label[&labels[i]].len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == labels.len() {
                break;
            }
        }
    }
    out
}

/// Whether the run glued from a positional choice is accepting: every
/// reachable colored label has a chosen transition, and every cycle of
/// labels has an accepting maximal state.
pub fn choice_accepts(aut: &GeneralizedAutomaton, start: usize, choice: &BTreeMap<(usize, usize), usize>) -> bool {
    let next = |i: usize| colored_leaf_labels(&aut.transitions[i]);
    let mut reach = BTreeSet::new();
    let mut stack: Vec<(usize, usize)> = next(start).into_iter().collect();
    while let Some(l) = stack.pop() {
        if !reach.insert(l) {
            continue;
        }
        let Some(&i) = choice.get(&l) else {
            return false;
        };
        stack.extend(next(i));
    }
    for &(a, r) in reach.iter().filter(|&&(_, r)| !aut.accepting[r]) {
        let allowed = |l: &(usize, usize)| reach.contains(l) && l.1 <= r;
        let mut seen = BTreeSet::new();
        let mut stack: Vec<_> = next(choice[&(a, r)]).into_iter().filter(allowed).collect();
        while let Some(l) = stack.pop() {
            if l == (a, r) {
                return false;
            }
            if seen.insert(l) {
                stack.extend(next(choice[&l]).into_iter().filter(allowed));
            }
        }
    }
    true
}

pub fn profile_image(aut: &GeneralizedAutomaton) -> BTreeSet<ColorProfile> {
    aut.transitions
        .iter()
        .map(|t| ColorProfile {
            root: t.label(t.root()).1,
            leaves: colored_leaf_labels(t).into_iter().map(|(_, q)| q).collect(),
        })
        .collect()
}

/// A random deterministic max-automaton over `alphabet`, reading only
/// finite weights.
pub fn random_max_automaton(rng: &mut ChaCha8Rng, alphabet: &WeightedAlphabet, n: usize, max_counters: usize) -> MaxAutomaton {
    let k = rng.gen_range(1..=max_counters);
    let nw = alphabet.weights.len();
    let mut transitions = BTreeMap::new();
    for q in 0..n {
        for prof in alphabet.profiles().into_iter().filter(|p| p.infinite.is_empty()) {
            if rng.gen_bool(0.15) {
                continue;
            }
            let len = rng.gen_range(0..=2);
            let ops = (0..len)
                .map(|_| {
                    let c = rng.gen_range(0..k);
                    match rng.gen_range(0..6) {
                        0 | 1 => Op::Inc(c),
                        2 if nw > 0 => Op::AddWeight(c, rng.gen_range(0..nw)),
                        2 | 3 => Op::Reset(c),
                        _ => Op::Max(c, rng.gen_range(0..k), rng.gen_range(0..k)),
                    }
                })
                .collect();
            transitions.insert((q, prof), (rng.gen_range(0..n), ops));
        }
    }
    let accept = (0..rng.gen_range(0..=3))
        .map(|_| (0..k).filter(|_| rng.gen_bool(0.5)).collect())
        .collect();
    MaxAutomaton {
        alphabet: alphabet.clone(),
        counters: names("c", k),
        states: names("s", n),
        initial: 0,
        transitions,
        accept,
    }
}

pub fn random_position(rng: &mut ChaCha8Rng, alphabet: &WeightedAlphabet, max_weight: u64) -> Position {
    Position {
        label: rng.gen_range(0..alphabet.labels.len()),
        weights: (0..alphabet.weights.len())
            .map(|_| ExtNat::Fin(rng.gen_range(0..=max_weight)))
            .collect(),
    }
}

pub fn random_word(rng: &mut ChaCha8Rng, alphabet: &WeightedAlphabet, max_prefix: usize, max_loop: usize, max_weight: u64) -> WeightedWord {
    let prefix = (0..rng.gen_range(0..=max_prefix))
        .map(|_| random_position(rng, alphabet, max_weight))
        .collect();
    let cycle = (0..rng.gen_range(1..=max_loop))
        .map(|_| random_position(rng, alphabet, max_weight))
        .collect();
    WeightedWord::new(alphabet.clone(), UpWord::new(prefix, cycle)).unwrap()
}

pub fn plain_profile(label: usize) -> Profile {
    Profile::plain(label)
}

pub fn random_wmsoup(r: &mut ChaCha8Rng) -> WmsoUpAutomaton {
    let letters = r.gen_range(1..=2);
    let n = r.gen_range(1..=3);
    let mut delta0 = BTreeSet::new();
    let mut delta2 = BTreeSet::new();
    for q in 0..n {
        for a in 0..letters {
            if r.gen_bool(0.5) {
                delta0.insert((q, a));
            }
            for l in 0..n {
                for rr in 0..n {
                    if r.gen_bool(0.3) {
                        delta2.insert((q, a, l, rr));
                    }
                }
            }
        }
    }
    let parity = ParityAutomaton {
        alphabet: names("a", letters),
        states: names("q", n),
        accepting: (0..n).map(|_| r.gen_bool(0.6)).collect(),
        initial: 0,
        delta0,
        delta2,
    };
    let k = r.gen_range(0..=2);
    let bounded: Vec<bool> = (0..k).map(|_| r.gen_bool(0.5)).collect();
    let ops = (0..n)
        .map(|_| {
            (0..k)
                .filter_map(|c| match r.gen_range(0..3) {
                    0 => Some(CounterOp::inc_up(c)),
                    1 => Some(CounterOp::tr_up(c)),
                    _ => None,
                })
                .collect()
        })
        .collect();
    let cut = (0..n)
        .map(|_| (0..k).filter(|&c| bounded[c] && r.gen_bool(0.3)).collect())
        .collect();
    let check = (0..n)
        .map(|_| (0..k).filter(|&c| !bounded[c] && r.gen_bool(0.5)).collect())
        .collect();
    WmsoUpAutomaton {
        parity,
        counters: names("c", k),
        bounded,
        cut,
        check,
        ops,
    }
}

/// A random presentation over `letters × states` with at most `n` vertices.
pub fn random_run(r: &mut ChaCha8Rng, aut: &WmsoUpAutomaton) -> Run {
    let p = &aut.parity;
    let n = r.gen_range(1..=4);
    let labels = (0..n)
        .map(|i| {
            let q = if i == 0 { p.initial } else { r.gen_range(0..p.states.len()) };
            (r.gen_range(0..p.alphabet.len()), q)
        })
        .collect();
    let children = (0..n)
        .map(|_| r.gen_bool(0.6).then(|| [VertexId(r.gen_range(0..n)), VertexId(r.gen_range(0..n))]))
        .collect();
    RegularTree::new_pruned(labels, children, VertexId(0)).unwrap()
}

