//! Text formats for max-automata and weighted words.
//!
//! ```text
//! maxaut example
//! labels a
//! weights b
//! counters c d
//! states p q
//! initial p
//! trans p (a;nz={b};inf={}) -> q : c+=1 | d+=b | c=0 | d=max(c,d)
//! accept {c} {}
//! ```
//!
//! `(a)` abbreviates a profile with no nonzero weights.

use std::collections::{BTreeMap, BTreeSet};

use super::{MaxAutomaton, Op, Position, Profile, WeightedAlphabet, WeightedWord};
use crate::error::{parse as perr, Error, Result};
use crate::ext::ExtNat;
use crate::tree::text::{content_lines, parse_set, split_top, tokens};
use crate::tree::UpWord;

fn names(rest: &str) -> Vec<String> {
    rest.split_whitespace().map(str::to_string).collect()
}

fn index(line: usize, list: &[String], name: &str, what: &str) -> Result<usize> {
    list.iter()
        .position(|x| x == name)
        .ok_or_else(|| perr(line, format!("unknown {what} `{name}`")))
}

pub(super) fn parse_profile(line: usize, alphabet: &WeightedAlphabet, s: &str) -> Result<Profile> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| perr(line, format!("expected a (label;...) profile, found `{s}`")))?;
    let parts = split_top(inner, ';');
    let label = index(line, &alphabet.labels, parts[0].trim(), "label")?;
    let mut p = Profile::plain(label);
    for part in &parts[1..] {
        let (key, val) = part
            .split_once('=')
            .ok_or_else(|| perr(line, format!("bad profile part `{part}`")))?;
        let set = parse_set(line, val)?
            .iter()
            .map(|b| index(line, &alphabet.weights, b, "weight symbol"))
            .collect::<Result<BTreeSet<_>>>()?;
        match key.trim() {
            "nz" => p.nonzero = set,
            "inf" => p.infinite = set,
            k => return Err(perr(line, format!("unknown profile key `{k}`"))),
        }
    }
    if !p.infinite.is_subset(&p.nonzero) {
        return Err(perr(line, "infinite weights must be nonzero"));
    }
    Ok(p)
}

fn parse_op(line: usize, aut: &MaxAutomaton, s: &str) -> Result<Op> {
    let counter = |n: &str| index(line, &aut.counters, n.trim(), "counter");
    if let Some((c, rhs)) = s.split_once("+=") {
        let c = counter(c)?;
        return match rhs.trim() {
            "1" => Ok(Op::Inc(c)),
            b => Ok(Op::AddWeight(c, index(line, &aut.alphabet.weights, b, "weight symbol")?)),
        };
    }
    let (c, rhs) = s
        .split_once('=')
        .ok_or_else(|| perr(line, format!("bad operation `{s}`")))?;
    let c = counter(c)?;
    let rhs = rhs.trim();
    if rhs == "0" {
        return Ok(Op::Reset(c));
    }
    let args = rhs
        .strip_prefix("max(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| perr(line, format!("bad operation `{s}`")))?;
    match args.split(',').collect::<Vec<_>>()[..] {
        [d, e] => Ok(Op::Max(c, counter(d)?, counter(e)?)),
        _ => Err(perr(line, format!("max takes two counters in `{s}`"))),
    }
}

pub(super) fn parse_automaton(src: &str) -> Result<(String, MaxAutomaton)> {
    let mut name = None;
    let mut labels = Vec::new();
    let mut weights = Vec::new();
    let mut aut = MaxAutomaton {
        alphabet: WeightedAlphabet {
            labels: Vec::new(),
            weights: Vec::new(),
        },
        counters: Vec::new(),
        states: Vec::new(),
        initial: 0,
        transitions: BTreeMap::new(),
        accept: BTreeSet::new(),
    };
    let mut initial = None;
    let mut alphabet_done = false;
    for (ln, l) in content_lines(src) {
        let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let rest = rest.trim();
        if matches!(kw, "trans" | "accept") && !alphabet_done {
            aut.alphabet = WeightedAlphabet::new(labels.clone(), weights.clone()).map_err(|e| perr(ln, e.to_string()))?;
            alphabet_done = true;
        }
        match kw {
            "maxaut" => name = Some(rest.to_string()),
            "labels" => labels = names(rest),
            "weights" => weights = names(rest),
            "counters" => aut.counters = names(rest),
            "states" => aut.states = names(rest),
            "initial" => initial = Some(index(ln, &aut.states, rest, "state")?),
            "trans" => {
                let (lhs, rhs) = rest
                    .split_once("->")
                    .ok_or_else(|| perr(ln, "expected `->`"))?;
                let (q, prof) = lhs
                    .trim()
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| perr(ln, "expected a state and a profile"))?;
                let q = index(ln, &aut.states, q, "state")?;
                let prof = parse_profile(ln, &aut.alphabet, prof)?;
                let (r, ops) = rhs.split_once(':').unwrap_or((rhs, ""));
                let r = index(ln, &aut.states, r.trim(), "state")?;
                let ops = ops
                    .split('|')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_op(ln, &aut, s))
                    .collect::<Result<Vec<_>>>()?;
                match aut.transitions.get(&(q, prof.clone())) {
                    Some(old) if *old != (r, ops.clone()) => {
                        return Err(Error::NondeterministicInput(format!(
                            "line {ln}: two transitions from `{}` on {}",
                            aut.states[q],
                            aut.alphabet.display_profile(&prof)
                        )))
                    }
                    _ => {
                        aut.transitions.insert((q, prof), (r, ops));
                    }
                }
            }
            "accept" => {
                for set in tokens(rest) {
                    let s = parse_set(ln, set)?
                        .iter()
                        .map(|c| index(ln, &aut.counters, c, "counter"))
                        .collect::<Result<BTreeSet<_>>>()?;
                    aut.accept.insert(s);
                }
            }
            _ => return Err(perr(ln, format!("unknown keyword `{kw}`"))),
        }
    }
    if !alphabet_done {
        aut.alphabet = WeightedAlphabet::new(labels, weights)?;
    }
    let name = name.ok_or_else(|| perr(1, "missing `maxaut` header"))?;
    aut.initial = initial.ok_or_else(|| perr(1, "missing `initial`"))?;
    aut.validate()?;
    Ok((name, aut))
}

pub(super) fn display_ops(aut: &MaxAutomaton, ops: &[Op]) -> String {
    let c = &aut.counters;
    ops.iter()
        .map(|op| match *op {
            Op::Inc(x) => format!("{}+=1", c[x]),
            Op::AddWeight(x, b) => format!("{}+={}", c[x], aut.alphabet.weights[b]),
            Op::Reset(x) => format!("{}=0", c[x]),
            Op::Max(x, d, e) => format!("{}=max({},{})", c[x], c[d], c[e]),
        })
        .collect::<Vec<_>>()
        .join(" | ")
}

pub(super) fn write_automaton(name: &str, aut: &MaxAutomaton) -> String {
    let mut out = format!("maxaut {name}\nlabels {}\n", aut.alphabet.labels.join(" "));
    if !aut.alphabet.weights.is_empty() {
        out += &format!("weights {}\n", aut.alphabet.weights.join(" "));
    }
    out += &format!(
        "counters {}\nstates {}\ninitial {}\n",
        aut.counters.join(" "),
        aut.states.join(" "),
        aut.states[aut.initial]
    );
    for ((q, p), (r, ops)) in &aut.transitions {
        out += &format!(
            "trans {} {} -> {} : {}\n",
            aut.states[*q],
            aut.alphabet.display_profile(p),
            aut.states[*r],
            display_ops(aut, ops)
        );
    }
    let sets: Vec<String> = aut
        .accept
        .iter()
        .map(|s| format!("{{{}}}", s.iter().map(|&c| aut.counters[c].as_str()).collect::<Vec<_>>().join(",")))
        .collect();
    out += &format!("accept {}\n", sets.join(" "));
    out
}

fn raw_positions(line: usize, s: &str) -> Result<Vec<(String, Vec<(String, ExtNat)>)>> {
    let inner = s
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| perr(line, format!("expected [...], found `{s}`")))?;
    let mut out = Vec::new();
    for tok in tokens(inner) {
        let body = tok
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| perr(line, format!("expected (label;...), found `{tok}`")))?;
        let (label, ws) = body.split_once(';').unwrap_or((body, ""));
        let mut weights = Vec::new();
        for kv in ws.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| perr(line, format!("bad weight `{kv}`")))?;
            let v: ExtNat = v.trim().parse().map_err(|_| perr(line, format!("bad weight value `{v}`")))?;
            weights.push((k.trim().to_string(), v));
        }
        out.push((label.trim().to_string(), weights));
    }
    Ok(out)
}

/// Reads `word prefix=[..] loop=[..]`, optionally preceded by `labels` and
/// `weights` lines. Without either, the alphabet is `given` or else the
/// symbols in order of appearance.
pub(super) fn parse_word(src: &str, given: Option<&WeightedAlphabet>) -> Result<WeightedWord> {
    let mut labels = None;
    let mut weights = None;
    let mut parts = None;
    for (ln, l) in content_lines(src) {
        let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        match kw {
            "labels" => labels = Some(names(rest)),
            "weights" => weights = Some(names(rest)),
            "word" => {
                let mut prefix = Vec::new();
                let mut cycle = None;
                for t in tokens(rest) {
                    if let Some(v) = t.strip_prefix("prefix=") {
                        prefix = raw_positions(ln, v)?;
                    } else if let Some(v) = t.strip_prefix("loop=") {
                        cycle = Some(raw_positions(ln, v)?);
                    } else {
                        return Err(perr(ln, format!("unexpected `{t}`")));
                    }
                }
                let cycle = cycle.ok_or_else(|| perr(ln, "missing loop="))?;
                parts = Some((ln, prefix, cycle));
            }
            _ => return Err(perr(ln, format!("unknown keyword `{kw}`"))),
        }
    }
    let (ln, prefix, cycle) = parts.ok_or_else(|| perr(1, "missing `word` line"))?;
    if cycle.is_empty() {
        return Err(perr(ln, "loop must be nonempty"));
    }
    let alphabet = match (labels, weights, given) {
        (None, None, Some(a)) => a.clone(),
        (l, w, _) => {
            let mut ls = l.unwrap_or_default();
            let mut ws = w.unwrap_or_default();
            for (lab, kv) in prefix.iter().chain(&cycle) {
                if !ls.contains(lab) {
                    ls.push(lab.clone());
                }
                for (k, _) in kv {
                    if !ws.contains(k) {
                        ws.push(k.clone());
                    }
                }
            }
            WeightedAlphabet::new(ls, ws).map_err(|e| perr(ln, e.to_string()))?
        }
    };
    let convert = |ps: &[(String, Vec<(String, ExtNat)>)]| -> Result<Vec<Position>> {
        ps.iter()
            .map(|(lab, kv)| {
                let label = alphabet.label(lab)?;
                let mut weights = vec![ExtNat::ZERO; alphabet.weights.len()];
                for (k, v) in kv {
                    weights[alphabet.weight(k)?] = *v;
                }
                Ok(Position { label, weights })
            })
            .collect()
    };
    let word = UpWord::new(convert(&prefix)?, convert(&cycle)?);
    WeightedWord::new(alphabet, word)
}

pub(super) fn write_word(w: &WeightedWord) -> String {
    let a = &w.alphabet;
    let pos = |p: &Position| {
        let ws: Vec<String> = p
            .weights
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != ExtNat::ZERO)
            .map(|(b, v)| format!("{}={v}", a.weights[b]))
            .collect();
        if ws.is_empty() {
            format!("({})", a.labels[p.label])
        } else {
            format!("({};{})", a.labels[p.label], ws.join(","))
        }
    };
    let seq = |ps: &[Position]| ps.iter().map(pos).collect::<Vec<_>>().join(" ");
    let mut out = format!("labels {}\n", a.labels.join(" "));
    if !a.weights.is_empty() {
        out += &format!("weights {}\n", a.weights.join(" "));
    }
    out += &format!("word prefix=[{}] loop=[{}]\n", seq(&w.word.prefix), seq(&w.word.cycle));
    out
}
