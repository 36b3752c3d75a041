//! Latest appearance records and the normal-form product.
//!
//! A record `(w, v)` lists the letters seen so far, each once, in order of
//! their last appearance; the split point marks where the previous last
//! letter sat. On any segment that returns to a record without visiting a
//! larger one, the letters read are exactly those of `v`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::parity::{ParityAutomaton, Run};
use crate::tree::{RegularTree, VertexId};
use crate::wmsoup::{NormalFormEvidence, NormalizedAutomaton, WmsoUpAutomaton};

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LarState {
    pub w: Vec<usize>,
    pub v: Vec<usize>,
}

impl LarState {
    pub fn initial() -> Self {
        LarState::default()
    }

    pub fn is_valid(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.w.iter().chain(&self.v).all(|a| seen.insert(*a))
    }

    pub fn step(&self, a: usize) -> LarState {
        let mut wv: Vec<usize> = self.w.iter().chain(&self.v).copied().collect();
        match wv.iter().position(|&x| x == a) {
            Some(i) => {
                let mut v = wv.split_off(i + 1);
                wv.pop();
                v.push(a);
                LarState { w: wv, v }
            }
            None => {
                wv.push(a);
                LarState { w: Vec::new(), v: wv }
            }
        }
    }

    pub fn letters(&self) -> BTreeSet<usize> {
        self.v.iter().copied().collect()
    }

    /// `w@v` with letters joined by commas, using `names` for letters.
    pub fn display(&self, names: &[String]) -> String {
        let join = |x: &[usize]| x.iter().map(|&a| names[a].as_str()).collect::<Vec<_>>().join(",");
        format!("{}:{}", join(&self.w), join(&self.v))
    }
}

impl Ord for LarState {
    /// Shorter `v` first, then lexicographic on `(v, w)`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.v
            .len()
            .cmp(&other.v.len())
            .then_with(|| self.v.cmp(&other.v))
            .then_with(|| self.w.cmp(&other.w))
    }
}

impl PartialOrd for LarState {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One transition of the record automaton over an alphabet of `size`
/// letters.
pub fn lar_step(state: &LarState, a: usize, size: usize) -> Result<LarState> {
    if a >= size {
        return Err(Error::UnknownLetter(format!("#{a}")));
    }
    Ok(state.step(a))
}

pub fn lar_of(state: &LarState) -> BTreeSet<usize> {
    state.letters()
}

/// Every record over `size` letters, in the record order.
pub fn all_states(size: usize) -> Vec<LarState> {
    fn words(size: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(prefix.clone());
        for a in 0..size {
            if !prefix.contains(&a) {
                prefix.push(a);
                words(size, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut ws = Vec::new();
    words(size, &mut Vec::new(), &mut ws);
    let mut out: Vec<LarState> = ws
        .into_iter()
        .flat_map(|wv| {
            (0..=wv.len()).map(move |k| LarState {
                w: wv[..k].to_vec(),
                v: wv[k..].to_vec(),
            })
        })
        .collect();
    out.sort();
    out
}

/// Records reachable from the initial one, in the record order.
pub fn reachable_states(size: usize) -> Vec<LarState> {
    let mut seen: BTreeSet<LarState> = BTreeSet::from([LarState::initial()]);
    let mut queue = VecDeque::from([LarState::initial()]);
    while let Some(s) = queue.pop_front() {
        for a in 0..size {
            let t = s.step(a);
            if seen.insert(t.clone()) {
                queue.push_back(t);
            }
        }
    }
    seen.into_iter().collect()
}

/// The record sequence of a finite word, starting with the initial record.
pub fn trace(word: &[usize]) -> Vec<LarState> {
    let mut out = Vec::with_capacity(word.len() + 1);
    let mut s = LarState::initial();
    out.push(s.clone());
    for &a in word {
        s = s.step(a);
        out.push(s.clone());
    }
    out
}

/// The normal-form product together with the origin of each product state.
#[derive(Debug, Clone)]
pub struct LarProduct {
    pub result: NormalizedAutomaton,
    /// Original state and record of every product state.
    pub origin: Vec<(usize, LarState)>,
}

impl LarProduct {
    /// The product run that follows `run` deterministically.
    pub fn lift_run(&self, run: &Run) -> Result<Run> {
        let index: HashMap<(usize, &LarState), usize> = self
            .origin
            .iter()
            .enumerate()
            .map(|(i, (q, l))| ((*q, l), i))
            .collect();
        let root = run.root();
        let start = (root, LarState::initial().step(run.label(root).1));
        let mut order = vec![start.clone()];
        let mut ids: HashMap<(VertexId, LarState), usize> = HashMap::from([(start, 0)]);
        let mut labels = Vec::new();
        let mut children = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let (v, l) = order[i].clone();
            let (a, q) = *run.label(v);
            let s = *index
                .get(&(q, &l))
                .ok_or_else(|| Error::InvalidRun("run leaves the reachable product".into()))?;
            labels.push((a, s));
            children.push(run.children(v).map(|ch| {
                ch.map(|c| {
                    let key = (c, l.step(run.label(c).1));
                    let next = order.len();
                    VertexId(*ids.entry(key.clone()).or_insert_with(|| {
                        order.push(key);
                        next
                    }))
                })
            }));
            i += 1;
        }
        RegularTree::new(labels, children, VertexId(0))
    }

    /// Forgets the record component.
    pub fn project_run(&self, run: &Run) -> Run {
        run.map_labels(|_, &(a, s)| (a, self.origin[s].0))
    }
}

/// Builds the product of `aut` with the record automaton over its states.
pub fn normalize(aut: &WmsoUpAutomaton) -> Result<LarProduct> {
    aut.validate()?;
    aut.check_property_a()?;
    let p = &aut.parity;
    let init = (p.initial, LarState::initial().step(p.initial));
    let mut seen: BTreeSet<(usize, LarState)> = BTreeSet::from([init.clone()]);
    let mut queue = VecDeque::from([init.clone()]);
    while let Some((q, l)) = queue.pop_front() {
        for &(_, _, ql, qr) in p.delta2.range((q, 0, 0, 0)..(q + 1, 0, 0, 0)) {
            for c in [ql, qr] {
                let next = (c, l.step(c));
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    // record first, original state second
    let mut origin: Vec<(usize, LarState)> = seen.into_iter().collect();
    origin.sort_by(|(q1, l1), (q2, l2)| l1.cmp(l2).then(q1.cmp(q2)));
    let index: HashMap<&(usize, LarState), usize> = origin.iter().enumerate().map(|(i, s)| (s, i)).collect();

    let states: Vec<String> = origin
        .iter()
        .map(|(q, l)| format!("{}@{}", p.states[*q], l.display(&p.states)))
        .collect();
    let accepting: Vec<bool> = origin
        .iter()
        .map(|(q, l)| {
            let top = l.v.iter().copied().max().unwrap_or(*q);
            p.accepting[top]
        })
        .collect();
    let mut delta0 = BTreeSet::new();
    let mut delta2 = BTreeSet::new();
    for (s, (q, l)) in origin.iter().enumerate() {
        for &(_, a) in p.delta0.range((*q, 0)..(*q + 1, 0)) {
            delta0.insert((s, a));
        }
        for &(_, a, ql, qr) in p.delta2.range((*q, 0, 0, 0)..(*q + 1, 0, 0, 0)) {
            let sl = index[&(ql, l.step(ql))];
            let sr = index[&(qr, l.step(qr))];
            delta2.insert((s, a, sl, sr));
        }
    }
    let parity = ParityAutomaton {
        alphabet: p.alphabet.clone(),
        states,
        accepting,
        initial: index[&init],
        delta0,
        delta2,
    };
    let union = |table: &[BTreeSet<usize>], l: &LarState| -> BTreeSet<usize> {
        l.v.iter().flat_map(|&p| table[p].iter().copied()).collect()
    };
    let automaton = WmsoUpAutomaton {
        parity,
        counters: aut.counters.clone(),
        bounded: aut.bounded.clone(),
        cut: origin.iter().map(|(q, _)| aut.cut[*q].clone()).collect(),
        check: origin.iter().map(|(q, _)| aut.check[*q].clone()).collect(),
        ops: origin.iter().map(|(q, _)| aut.ops[*q].clone()).collect(),
    };
    let evidence = NormalFormEvidence {
        larcut: origin.iter().map(|(_, l)| union(&aut.cut, l)).collect(),
        larcheck: origin.iter().map(|(_, l)| union(&aut.check, l)).collect(),
        property_a: true,
        property_b: true,
    };
    Ok(LarProduct {
        result: NormalizedAutomaton { automaton, evidence },
        origin,
    })
}
