//! Instance generators shared by the benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wmsoup_core::{
    CounterOp, CounterTree, ExtNat, Locus, MaxAutomaton, OpKind, OpSet, ParityGame, Player, Position, RegularTree, UpWord,
    VertexId, WeightedWord, WmsoUpAutomaton,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_ops(rng: &mut ChaCha8Rng, k: usize, root_directed: bool) -> OpSet {
    (0..rng.gen_range(0..=3))
        .map(|_| {
            let kind = if rng.gen_bool(0.5) { OpKind::Inc } else { OpKind::Tr };
            let (a, b) = if root_directed || rng.gen_bool(0.5) {
                (Locus::Current, Locus::Parent)
            } else {
                *[(Locus::Parent, Locus::Current), (Locus::Current, Locus::Current)].choose(rng).unwrap()
            };
            CounterOp::new(rng.gen_range(0..k), a, kind, rng.gen_range(0..k), b).unwrap()
        })
        .collect()
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// A complete binary tree of the given depth with random ops on `k` counters.
pub fn finite_counter_tree(seed: u64, depth: u32, k: usize) -> CounterTree {
    let mut rng = rng(seed);
    let n = (1usize << (depth + 1)) - 1;
    let inner = (1usize << depth) - 1;
    let children = (0..n).map(|i| (i < inner).then(|| [VertexId(2 * i + 1), VertexId(2 * i + 2)])).collect();
    let ops = (0..n).map(|_| random_ops(&mut rng, k, false)).collect();
    CounterTree::new(names("c", k), RegularTree::new(ops, children, VertexId(0)).unwrap()).unwrap()
}

/// A regular tree on `n` vertices, each with two random successors, and
/// root-directed ops.
pub fn regular_counter_tree(seed: u64, n: usize, k: usize) -> CounterTree {
    let mut rng = rng(seed);
    let children = (0..n).map(|_| Some([VertexId(rng.gen_range(0..n)), VertexId(rng.gen_range(0..n))])).collect();
    let ops = (0..n).map(|_| random_ops(&mut rng, k, true)).collect();
    CounterTree::new(names("c", k), RegularTree::new_pruned(ops, children, VertexId(0)).unwrap()).unwrap()
}

pub fn random_game(seed: u64, n: usize, priorities: u32) -> ParityGame {
    let mut rng = rng(seed);
    let mut g = ParityGame::new();
    for _ in 0..n {
        let owner = if rng.gen_bool(0.5) { Player::Automaton } else { Player::Pathfinder };
        g.add_position(owner, rng.gen_range(0..priorities));
    }
    for v in 0..n {
        for _ in 0..rng.gen_range(1..=3) {
            g.add_edge(v, rng.gen_range(0..n));
        }
    }
    g
}

/// A one-weight automaton on `n` states cycling through them; state `i`
/// adds the weight to counter `i mod k` and resets the next one.
pub fn cycling_max_automaton(n: usize, k: usize) -> MaxAutomaton {
    let mut src = format!(
        "maxaut m\nlabels a\nweights b\ncounters {}\nstates {}\ninitial s0\n",
        names("c", k).join(" "),
        names("s", n).join(" ")
    );
    for i in 0..n {
        let (c, d, next) = (i % k, (i + 1) % k, (i + 1) % n);
        src += &format!("trans s{i} (a;nz={{b}};inf={{}}) -> s{next} : c{c}+=b | c{d}=max(c{d},c{c})\n");
        src += &format!("trans s{i} (a;nz={{}};inf={{}}) -> s{next} : c{d}=0\n");
        src += &format!("trans s{i} (a;nz={{b}};inf={{b}}) -> s{next} : c{c}+=1\n");
    }
    src += "accept {} {c0}\n";
    MaxAutomaton::parse(&src).unwrap().1
}

pub fn random_weighted_word(seed: u64, a: &MaxAutomaton, prefix: usize, cycle: usize) -> WeightedWord {
    let mut rng = rng(seed);
    let pos = |rng: &mut ChaCha8Rng| Position {
        label: 0,
        weights: vec![
            match rng.gen_range(0..10) {
                0 => ExtNat::Inf,
                w => ExtNat::Fin(w - 1),
            };
            a.alphabet.weights.len()
        ],
    };
    let p = (0..prefix).map(|_| pos(&mut rng)).collect();
    let c = (0..cycle).map(|_| pos(&mut rng)).collect();
    WeightedWord::new(a.alphabet.clone(), UpWord::new(p, c)).unwrap()
}

/// A chain of `n` states where each state increments its own counter and
/// checks the previous one.
pub fn chain_wmsoup(n: usize) -> WmsoUpAutomaton {
    let states = names("q", n);
    let mut src = format!("wmsoup w\nalphabet a\nstates {}\naccepting q{}\ninitial q0\n", states.join(" < "), n - 1);
    for i in 0..n {
        src += &format!("d0 q{i} a\n");
        for j in [i, (i + 1) % n] {
            src += &format!("d2 q{i} a q{j} q{i}\n");
        }
    }
    src += &format!("counters unbounded: {}\n", names("u", n).join(" "));
    for i in 0..n {
        src += &format!("ops q{i} = {{(u{i},self,inc,u{i},parent)}}\n");
        if i > 0 {
            src += &format!("check q{i} = {{u{}}}\n", i - 1);
        }
    }
    WmsoUpAutomaton::parse(&src).unwrap().1
}
