//! Weighted ω-words and max-automata.
//!
//! A max-automaton is a deterministic machine over position profiles whose
//! transitions update counters by `c+=1`, `c+=b` (the `b`-weight of the
//! current position), `c=0` and `c=max(d,e)`. A run accepts when the set of
//! counters unbounded along it belongs to the acceptance family.

mod affine;
mod factorial;
mod lasso;
mod text;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::ext::ExtNat;
use crate::tree::UpWord;

pub use affine::AffineMap;
pub use factorial::{factorial_simulation, ExtMaxAutomaton, Segment};
pub use lasso::Evaluation;

/// Name of the block-encoding letter standing for an infinite weight.
pub const INF_LETTER: &str = "inf";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedAlphabet {
    pub labels: Vec<String>,
    pub weights: Vec<String>,
}

impl WeightedAlphabet {
    pub fn new(labels: Vec<String>, weights: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidAutomaton("no label symbols".into()));
        }
        let mut seen = BTreeSet::new();
        for s in labels.iter().chain(&weights) {
            // `inf` may name a plain label only when there is nothing to encode
            if (s == INF_LETTER && !weights.is_empty()) || !seen.insert(s) {
                return Err(Error::InvalidAutomaton(format!("symbol `{s}` is reserved or repeated")));
            }
        }
        Ok(WeightedAlphabet { labels, weights })
    }

    pub fn label(&self, name: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    pub fn weight(&self, name: &str) -> Result<usize> {
        self.weights
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    /// Letters of the block encoding: labels, then weight symbols, then `inf`.
    pub fn block_letters(&self) -> Vec<String> {
        let mut out = self.labels.clone();
        out.extend(self.weights.iter().cloned());
        out.push(INF_LETTER.to_string());
        out
    }

    pub fn inf_letter(&self) -> usize {
        self.labels.len() + self.weights.len()
    }

    /// Every profile, labels outermost.
    pub fn profiles(&self) -> Vec<Profile> {
        let k = self.weights.len();
        let mut out = Vec::new();
        for label in 0..self.labels.len() {
            for code in 0..3usize.pow(k as u32) {
                let mut p = Profile::plain(label);
                let mut c = code;
                for b in 0..k {
                    match c % 3 {
                        1 => {
                            p.nonzero.insert(b);
                        }
                        2 => {
                            p.nonzero.insert(b);
                            p.infinite.insert(b);
                        }
                        _ => {}
                    }
                    c /= 3;
                }
                out.push(p);
            }
        }
        out
    }

    pub fn display_profile(&self, p: &Profile) -> String {
        let set = |s: &BTreeSet<usize>| {
            let v: Vec<&str> = s.iter().map(|&b| self.weights[b].as_str()).collect();
            format!("{{{}}}", v.join(","))
        };
        format!("({};nz={};inf={})", self.labels[p.label], set(&p.nonzero), set(&p.infinite))
    }
}

/// A label together with one weight per weight symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Position {
    pub label: usize,
    pub weights: Vec<ExtNat>,
}

impl Position {
    pub fn profile(&self) -> Profile {
        let mut p = Profile::plain(self.label);
        for (b, w) in self.weights.iter().enumerate() {
            if *w != ExtNat::ZERO {
                p.nonzero.insert(b);
            }
            if w.is_inf() {
                p.infinite.insert(b);
            }
        }
        p
    }
}

/// What a max-automaton sees of a position: its label and which weights
/// are nonzero or infinite.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile {
    pub label: usize,
    pub nonzero: BTreeSet<usize>,
    pub infinite: BTreeSet<usize>,
}

impl Profile {
    pub fn plain(label: usize) -> Self {
        Profile {
            label,
            nonzero: BTreeSet::new(),
            infinite: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedWord {
    pub alphabet: WeightedAlphabet,
    pub word: UpWord<Position>,
}

impl WeightedWord {
    pub fn new(alphabet: WeightedAlphabet, word: UpWord<Position>) -> Result<Self> {
        if word.cycle.is_empty() {
            return Err(Error::InvalidAutomaton("word loop is empty".into()));
        }
        for p in word.prefix.iter().chain(&word.cycle) {
            if p.label >= alphabet.labels.len() || p.weights.len() != alphabet.weights.len() {
                return Err(Error::UnknownLetter(format!("position with label #{}", p.label)));
            }
        }
        Ok(WeightedWord { alphabet, word })
    }

    /// All weights multiplied by `n`; zero stays zero and `∞` stays `∞`.
    pub fn multiply(&self, n: u64) -> WeightedWord {
        WeightedWord {
            alphabet: self.alphabet.clone(),
            word: self.word.map(|p| Position {
                label: p.label,
                weights: p.weights.iter().map(|w| w.scale(n)).collect(),
            }),
        }
    }

    /// Each position `a` with weights `n_1..n_k` becomes `a b_1^{n_1} ... b_k^{n_k}`,
    /// an infinite weight giving the single letter `inf`. Letters index
    /// [`WeightedAlphabet::block_letters`].
    pub fn block_encode(&self) -> Result<UpWord<usize>> {
        let enc = |ps: &[Position]| -> Result<Vec<usize>> {
            let mut out = Vec::new();
            for p in ps {
                out.extend(self.block(p)?);
            }
            Ok(out)
        };
        Ok(UpWord::new(enc(&self.word.prefix)?, enc(&self.word.cycle)?))
    }

    fn block(&self, p: &Position) -> Result<Vec<usize>> {
        let nl = self.alphabet.labels.len();
        let mut out = vec![p.label];
        for (b, w) in p.weights.iter().enumerate() {
            match w {
                ExtNat::Inf => out.push(self.alphabet.inf_letter()),
                ExtNat::Fin(n) => {
                    let n = usize::try_from(*n)
                        .ok()
                        .filter(|n| *n <= 1 << 24)
                        .ok_or_else(|| Error::InvalidAutomaton(format!("weight {n} too large to encode")))?;
                    out.extend(std::iter::repeat_n(nl + b, n));
                }
            }
        }
        Ok(out)
    }

    /// Reads an unweighted word as a weighted one without weight symbols.
    pub fn from_letters(alphabet: WeightedAlphabet, word: &UpWord<usize>) -> Result<Self> {
        let pos = |&a: &usize| Position { label: a, weights: Vec::new() };
        WeightedWord::new(alphabet, word.map(pos))
    }

    pub fn rotated(&self, k: usize) -> WeightedWord {
        WeightedWord {
            alphabet: self.alphabet.clone(),
            word: self.word.rotated(k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    /// `c += 1`
    Inc(usize),
    /// `c += b`, the weight of the current position.
    AddWeight(usize, usize),
    /// `c = 0`
    Reset(usize),
    /// `c = max(d, e)`
    Max(usize, usize, usize),
}

impl Op {
    pub fn map(&self, n: usize, weights: &[ExtNat]) -> AffineMap {
        match *self {
            Op::Inc(c) => AffineMap::add(n, c, ExtNat::ONE),
            Op::AddWeight(c, b) => AffineMap::add(n, c, weights[b]),
            Op::Reset(c) => AffineMap::reset(n, c),
            Op::Max(c, d, e) => AffineMap::max_of(n, c, d, e),
        }
    }

    fn counters(&self) -> Vec<usize> {
        match *self {
            Op::Inc(c) | Op::AddWeight(c, _) | Op::Reset(c) => vec![c],
            Op::Max(c, d, e) => vec![c, d, e],
        }
    }
}

/// The combined effect of `ops` run left to right.
pub fn ops_map(ops: &[Op], n: usize, weights: &[ExtNat]) -> AffineMap {
    ops.iter()
        .fold(AffineMap::identity(n), |acc, op| acc.then(&op.map(n, weights)))
}

/// A deterministic machine stepping over positions with affine counter
/// updates; implemented by both automaton kinds.
pub trait Machine {
    fn counter_count(&self) -> usize;
    fn initial_state(&self) -> usize;
    fn step(&self, state: usize, pos: &Position) -> (usize, AffineMap);
    fn accepts(&self, unbounded: &BTreeSet<usize>) -> bool;

    fn eval_up(&self, word: &WeightedWord) -> Evaluation
    where
        Self: Sized,
    {
        lasso::evaluate(self, &word.word)
    }

    /// Largest value of each counter over the prefix and `iterations` loop
    /// traversals, by direct simulation.
    fn simulate(&self, word: &WeightedWord, iterations: usize) -> Vec<ExtNat>
    where
        Self: Sized,
    {
        lasso::simulate(self, &word.word, iterations)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxAutomaton {
    pub alphabet: WeightedAlphabet,
    pub counters: Vec<String>,
    pub states: Vec<String>,
    pub initial: usize,
    /// Missing entries leave the state and the counters unchanged.
    pub transitions: BTreeMap<(usize, Profile), (usize, Vec<Op>)>,
    pub accept: BTreeSet<BTreeSet<usize>>,
}

impl MaxAutomaton {
    pub fn validate(&self) -> Result<()> {
        if self.initial >= self.states.len() {
            return Err(Error::UnknownState(format!("#{}", self.initial)));
        }
        let k = self.alphabet.weights.len();
        let d = self.counters.len();
        for ((q, p), (r, ops)) in &self.transitions {
            if *q >= self.states.len() || *r >= self.states.len() {
                return Err(Error::UnknownState(format!("#{}", q.max(r))));
            }
            if p.label >= self.alphabet.labels.len() {
                return Err(Error::UnknownLetter(format!("#{}", p.label)));
            }
            if !p.infinite.is_subset(&p.nonzero) || p.nonzero.iter().any(|&b| b >= k) {
                return Err(Error::InvalidAutomaton("malformed profile".into()));
            }
            for op in ops {
                if op.counters().iter().any(|&c| c >= d) {
                    return Err(Error::UnknownCounter(format!("#{}", d)));
                }
                if let Op::AddWeight(_, b) = op {
                    if *b >= k {
                        return Err(Error::UnknownLetter(format!("weight #{b}")));
                    }
                }
            }
        }
        if self.accept.iter().flatten().any(|&c| c >= d) {
            return Err(Error::UnknownCounter(format!("#{d}")));
        }
        Ok(())
    }

    pub fn transition(&self, state: usize, profile: &Profile) -> Option<&(usize, Vec<Op>)> {
        self.transitions.get(&(state, profile.clone()))
    }

    /// Evaluates an unweighted word over the label symbols.
    pub fn eval_letters(&self, word: &UpWord<usize>) -> Result<Evaluation> {
        if !self.alphabet.weights.is_empty() {
            return Err(Error::InvalidAutomaton("automaton has weight symbols".into()));
        }
        let w = WeightedWord::from_letters(self.alphabet.clone(), word)?;
        Ok(self.eval_up(&w))
    }

    pub fn parse(src: &str) -> Result<(String, MaxAutomaton)> {
        text::parse_automaton(src)
    }

    pub fn to_text(&self, name: &str) -> String {
        text::write_automaton(name, self)
    }

    pub fn display_ops(&self, ops: &[Op]) -> String {
        text::display_ops(self, ops)
    }
}

impl Machine for MaxAutomaton {
    fn counter_count(&self) -> usize {
        self.counters.len()
    }

    fn initial_state(&self) -> usize {
        self.initial
    }

    fn step(&self, state: usize, pos: &Position) -> (usize, AffineMap) {
        match self.transition(state, &pos.profile()) {
            Some((r, ops)) => (*r, ops_map(ops, self.counters.len(), &pos.weights)),
            None => (state, AffineMap::identity(self.counters.len())),
        }
    }

    fn accepts(&self, unbounded: &BTreeSet<usize>) -> bool {
        self.accept.contains(unbounded)
    }
}

impl WeightedWord {
    pub fn parse(src: &str, alphabet: Option<&WeightedAlphabet>) -> Result<WeightedWord> {
        text::parse_word(src, alphabet)
    }

    pub fn to_text(&self) -> String {
        text::write_word(self)
    }
}

/// `block prefix=[..] loop=[..]` over the block letters of `alphabet`.
pub fn block_word_text(alphabet: &WeightedAlphabet, word: &UpWord<usize>) -> String {
    let letters = alphabet.block_letters();
    let join = |v: &[usize]| v.iter().map(|&a| letters[a].as_str()).collect::<Vec<_>>().join(" ");
    format!("block prefix=[{}] loop=[{}]", join(&word.prefix), join(&word.cycle))
}
