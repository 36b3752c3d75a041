//! Evaluation of a max-automaton on an ultimately periodic word.
//!
//! The prefix and a transient part of the loop are run concretely. After
//! that the run repeats a block `H` of positions whose state sequence and
//! pattern of infinite counters are both periodic, so the counter values at
//! block boundaries are `H^t(x)` for a max-plus affine `H`. Growth is read
//! off the closure of `H`; values inside the block are images of the
//! boundary values under prefixes of `H`.

use std::collections::{BTreeSet, HashMap};

use super::{AffineMap, Machine, Position};
use crate::ext::ExtNat;
use crate::tree::UpWord;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub unbounded: BTreeSet<usize>,
    pub accept: bool,
    /// A bound on every value a bounded counter takes; `None` for unbounded
    /// counters.
    pub bounds: Vec<Option<ExtNat>>,
}

struct Runner {
    x: Vec<ExtNat>,
    peak: Vec<ExtNat>,
}

impl Runner {
    fn apply(&mut self, f: &AffineMap) {
        self.x = f.apply(&self.x);
        for (p, v) in self.peak.iter_mut().zip(&self.x) {
            *p = (*p).max(*v);
        }
    }
}

pub(crate) fn simulate<M: Machine>(m: &M, word: &UpWord<Position>, iterations: usize) -> Vec<ExtNat> {
    let d = m.counter_count();
    let mut r = Runner {
        x: vec![ExtNat::ZERO; d],
        peak: vec![ExtNat::ZERO; d],
    };
    let mut q = m.initial_state();
    let cycle = word.cycle.iter().cycle().take(word.cycle.len() * iterations);
    for p in word.prefix.iter().chain(cycle) {
        let (q2, f) = m.step(q, p);
        r.apply(&f);
        q = q2;
    }
    r.peak
}

pub(crate) fn evaluate<M: Machine>(m: &M, word: &UpWord<Position>) -> Evaluation {
    let d = m.counter_count();
    let mut r = Runner {
        x: vec![ExtNat::ZERO; d],
        peak: vec![ExtNat::ZERO; d],
    };
    let mut q = m.initial_state();
    for p in &word.prefix {
        let (q2, f) = m.step(q, p);
        r.apply(&f);
        q = q2;
    }

    // state at the start of each loop traversal is eventually periodic
    let traverse = |mut s: usize, mut on: Option<&mut Runner>| {
        for p in &word.cycle {
            let (s2, f) = m.step(s, p);
            if let Some(r) = on.as_deref_mut() {
                r.apply(&f);
            }
            s = s2;
        }
        s
    };
    let mut seen = HashMap::new();
    let mut s = q;
    let mut j = 0;
    while !seen.contains_key(&s) {
        seen.insert(s, j);
        s = traverse(s, None);
        j += 1;
    }
    let (j0, period) = (seen[&s], j - seen[&s]);
    for _ in 0..j0 {
        q = traverse(q, Some(&mut r));
    }

    let mut block = Vec::new();
    let mut s = q;
    for _ in 0..period {
        for p in &word.cycle {
            let (s2, f) = m.step(s, p);
            block.push(f);
            s = s2;
        }
    }
    let f = block.iter().fold(AffineMap::identity(d), |acc, g| acc.then(g));

    // so is the set of infinite counters at block boundaries
    let mut seen = HashMap::new();
    let mut inf: Vec<bool> = r.x.iter().map(|v| v.is_inf()).collect();
    let mut t = 0;
    while !seen.contains_key(&inf) {
        seen.insert(inf.clone(), t);
        inf = f.inf_image(&inf);
        t += 1;
    }
    let (t0, p2) = (seen[&inf], t - seen[&inf]);
    for _ in 0..t0 {
        for g in &block {
            r.apply(g);
        }
    }

    let mut prefixes = vec![AffineMap::identity(d)];
    for _ in 0..p2 {
        for g in &block {
            let next = prefixes.last().unwrap().then(g);
            prefixes.push(next);
        }
    }
    let h = prefixes.pop().unwrap();
    let plus = h.closure();
    let x = &r.x;
    let at = |c: usize, j: usize| plus[c * (d + 1) + j];
    let grows: Vec<bool> = (0..d)
        .map(|c| x[c].is_inf() || (0..=d).any(|j| at(c, j) == Some(ExtNat::Inf)))
        .collect();
    // supremum of the boundary values of each counter that does not grow
    let boundary: Vec<ExtNat> = (0..d)
        .map(|c| {
            if grows[c] {
                return ExtNat::Inf;
            }
            let mut b = x[c];
            for j in 0..=d {
                if let Some(w) = at(c, j) {
                    b = b.max(w + if j == d { ExtNat::ZERO } else { x[j] });
                }
            }
            b
        })
        .collect();

    let mut unbounded = BTreeSet::new();
    let mut bound = r.peak.clone();
    for g in &prefixes {
        for c in 0..d {
            if g.forces_inf(c) || (0..d).any(|j| grows[j] && g.depends(c, j)) {
                unbounded.insert(c);
            }
        }
        for (b, y) in bound.iter_mut().zip(g.apply(&boundary)) {
            *b = (*b).max(y);
        }
    }
    let bounds = (0..d)
        .map(|c| (!unbounded.contains(&c)).then_some(bound[c]))
        .collect();
    Evaluation {
        accept: m.accepts(&unbounded),
        unbounded,
        bounds,
    }
}
