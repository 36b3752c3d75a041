//! Simulating a max-automaton over block encodings of `n!`-scaled words.
//!
//! With `n` states, reading `b^{n!}` twice from any state ends where reading
//! it once did. So reading `b^{n!·m}` for `m ≥ 1` from `p` produces the ops
//! of `b^{n!}` from `p` followed by `m-1` copies of the ops of `b^{n!}` from
//! the state reached, and the state reached does not depend on `m`.

use std::collections::{BTreeMap, BTreeSet};

use super::{AffineMap, Machine, MaxAutomaton, Position, Profile, WeightedAlphabet};
use crate::error::{Error, Result};
use crate::ext::ExtNat;

/// One piece of a transition of [`ExtMaxAutomaton`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Once(AffineMap),
    /// Applied `m - 1` times, `m` being the position's weight for the symbol.
    Repeat { map: AffineMap, weight: usize },
}

/// A max-automaton whose transitions carry repetition templates.
#[derive(Debug, Clone)]
pub struct ExtMaxAutomaton {
    pub alphabet: WeightedAlphabet,
    pub counters: Vec<String>,
    pub states: Vec<String>,
    pub initial: usize,
    pub transitions: BTreeMap<(usize, Profile), (usize, Vec<Segment>)>,
    pub accept: BTreeSet<BTreeSet<usize>>,
    /// The scaling factor `n!`.
    pub factor: u64,
}

impl Machine for ExtMaxAutomaton {
    fn counter_count(&self) -> usize {
        self.counters.len()
    }

    fn initial_state(&self) -> usize {
        self.initial
    }

    fn step(&self, state: usize, pos: &Position) -> (usize, AffineMap) {
        let d = self.counters.len();
        let Some((r, segs)) = self.transitions.get(&(state, pos.profile())) else {
            return (state, AffineMap::identity(d));
        };
        let mut f = AffineMap::identity(d);
        for s in segs {
            f = match s {
                Segment::Once(g) => f.then(g),
                Segment::Repeat { map, weight } => {
                    let e = match pos.weights[*weight] {
                        ExtNat::Fin(m) => ExtNat::Fin(m.saturating_sub(1)),
                        ExtNat::Inf => ExtNat::Inf,
                    };
                    f.then(&map.power(e))
                }
            };
        }
        (*r, f)
    }

    fn accepts(&self, unbounded: &BTreeSet<usize>) -> bool {
        self.accept.contains(unbounded)
    }
}

impl ExtMaxAutomaton {
    pub fn to_text(&self, name: &str) -> String {
        let mut out = format!(
            "extmaxaut {name}\nfactor {}\nlabels {}\n{}counters {}\nstates {}\ninitial {}\n",
            self.factor,
            self.alphabet.labels.join(" "),
            if self.alphabet.weights.is_empty() { String::new() } else { format!("weights {}\n", self.alphabet.weights.join(" ")) },
            self.counters.join(" "),
            self.states.join(" "),
            self.states[self.initial]
        );
        for ((q, p), (r, segs)) in &self.transitions {
            let body: Vec<String> = segs
                .iter()
                .map(|s| match s {
                    Segment::Once(f) => f.describe(&self.counters),
                    Segment::Repeat { map, weight } => {
                        format!("{}^({}-1)", map.describe(&self.counters), self.alphabet.weights[*weight])
                    }
                })
                .collect();
            out += &format!(
                "trans {} {} -> {} : {}\n",
                self.states[*q],
                self.alphabet.display_profile(p),
                self.states[*r],
                body.join(" ")
            );
        }
        let sets: Vec<String> = self
            .accept
            .iter()
            .map(|s| format!("{{{}}}", s.iter().map(|&c| self.counters[c].as_str()).collect::<Vec<_>>().join(",")))
            .collect();
        out += &format!("accept {}\n", sets.join(" "));
        out
    }
}

/// Builds `B` with `B` accepting `w` iff `a` accepts the block encoding of
/// `n!·w`, `n` being the number of states of `a`. The automaton `a` reads
/// the block letters of `alphabet` as plain labels.
pub fn factorial_simulation(a: &MaxAutomaton, alphabet: &WeightedAlphabet) -> Result<ExtMaxAutomaton> {
    if !a.alphabet.weights.is_empty() {
        return Err(Error::InvalidAutomaton("automaton must read unweighted block letters".into()));
    }
    a.validate()?;
    let n = a.states.len();
    if n > 10 {
        return Err(Error::InvalidAutomaton(format!("{n} states: factorial too large")));
    }
    let factor: u64 = (1..=n as u64).product();
    let letter: Vec<usize> = alphabet
        .block_letters()
        .iter()
        .map(|l| a.alphabet.label(l))
        .collect::<Result<_>>()?;
    let d = a.counters.len();
    let read = |q: usize, x: usize| a.step(q, &Position { label: letter[x], weights: Vec::new() });
    let read_power = |mut q: usize, x: usize| {
        let mut f = AffineMap::identity(d);
        for _ in 0..factor {
            let (r, g) = read(q, x);
            f = f.then(&g);
            q = r;
        }
        (q, f)
    };
    let nl = alphabet.labels.len();
    let mut transitions = BTreeMap::new();
    for prof in alphabet.profiles() {
        for q in 0..n {
            let mut segs = Vec::new();
            let (mut r, f) = read(q, prof.label);
            let mut once = f;
            for b in 0..alphabet.weights.len() {
                if prof.infinite.contains(&b) {
                    let (r2, g) = read(r, alphabet.inf_letter());
                    once = once.then(&g);
                    r = r2;
                } else if prof.nonzero.contains(&b) {
                    let (r1, u) = read_power(r, nl + b);
                    let (r2, w) = read_power(r1, nl + b);
                    debug_assert_eq!(r1, r2);
                    segs.push(Segment::Once(once.then(&u)));
                    segs.push(Segment::Repeat { map: w, weight: b });
                    once = AffineMap::identity(d);
                    r = r1;
                }
            }
            if once != AffineMap::identity(d) || segs.is_empty() {
                segs.push(Segment::Once(once));
            }
            transitions.insert((q, prof.clone()), (r, segs));
        }
    }
    Ok(ExtMaxAutomaton {
        alphabet: alphabet.clone(),
        counters: a.counters.clone(),
        states: a.states.clone(),
        initial: a.initial,
        transitions,
        accept: a.accept.clone(),
        factor,
    })
}

#[cfg(test)]
mod tests {
    use super::super::WeightedWord;
    use super::*;

    fn alpha() -> WeightedAlphabet {
        WeightedAlphabet::new(vec!["a".into()], vec!["b".into()]).unwrap()
    }

    // counts b letters modulo 2 in state, increments c on every b read in state p
    const PARITY: &str = "maxaut m\nlabels a b inf\ncounters c\nstates p q\ninitial p\ntrans p (b) -> q : c+=1\ntrans q (b) -> p :\ntrans p (a) -> p : c=0\ntrans q (a) -> p : c=0\naccept {c} {}\n";

    fn both(word: &str) -> (bool, bool) {
        let (_, a) = MaxAutomaton::parse(PARITY).unwrap();
        let b = factorial_simulation(&a, &alpha()).unwrap();
        let w = WeightedWord::parse(word, Some(&alpha())).unwrap();
        let direct = a.eval_letters(&w.multiply(b.factor).block_encode().unwrap()).unwrap();
        (b.eval_up(&w).accept, direct.accept)
    }

    #[test]
    fn agrees_on_growing_weights() {
        let (x, y) = both("word prefix=[(a;b=1)] loop=[(a;b=3) (a;b=2)]");
        assert_eq!(x, y);
    }

    #[test]
    fn agrees_on_zero_weights() {
        let (x, y) = both("word prefix=[] loop=[(a)]");
        assert_eq!(x, y);
    }

    #[test]
    fn repeat_uses_position_weight() {
        let (_, a) = MaxAutomaton::parse(PARITY).unwrap();
        let b = factorial_simulation(&a, &alpha()).unwrap();
        assert_eq!(b.factor, 2);
        let w = WeightedWord::parse("word prefix=[(a;b=3)] loop=[(a)]", Some(&alpha())).unwrap();
        // b^6 from p: three increments
        let peak = b.simulate(&w, 0);
        assert_eq!(peak, vec![ExtNat::Fin(3)]);
    }

    #[test]
    fn infinite_weight_reads_inf_letter() {
        let src = PARITY.replace("accept {c} {}", "trans p (inf) -> p : c+=1\naccept {c}");
        let (_, a) = MaxAutomaton::parse(&src).unwrap();
        let b = factorial_simulation(&a, &alpha()).unwrap();
        let w = WeightedWord::parse("word prefix=[] loop=[(a;b=inf)]", Some(&alpha())).unwrap();
        let direct = a.eval_letters(&w.block_encode().unwrap()).unwrap();
        assert_eq!(b.eval_up(&w).accept, direct.accept);
    }

    #[test]
    fn weighted_input_automaton_is_rejected() {
        let (_, a) = MaxAutomaton::parse("maxaut m\nlabels a\nweights b\ncounters c\nstates p\ninitial p\naccept {}\n").unwrap();
        assert!(factorial_simulation(&a, &alpha()).is_err());
    }
}
