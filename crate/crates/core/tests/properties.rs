mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use wmsoup_core::chain::{eval_cost_alpha, eval_cost_beta, profile_game, CostContext, CostRun};
use wmsoup_core::flat::{puzzle_value, witness_build, WitnessSet};
use wmsoup_core::lar::trace;
use wmsoup_core::tree::text;
use wmsoup_core::{
    CirTree, CounterOp, CounterTree, ExtNat, Flags, Machine, ParityAutomaton, Player, Rejection, RegularTree, UpPath,
    Verdict, VertexId, WeightedAlphabet,
};

fn small_tree(seed: u64) -> RegularTree<String> {
    let mut r = rng(seed);
    let n = r.gen_range(1..=5);
    let labels = (0..n).map(|_| ["a", "b"][r.gen_range(0..2)].to_string()).collect();
    let children = (0..n)
        .map(|_| r.gen_bool(0.6).then(|| [VertexId(r.gen_range(0..n)), VertexId(r.gen_range(0..n))]))
        .collect();
    RegularTree::new_pruned(labels, children, VertexId(0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tree_text_is_byte_stable(seed in any::<u64>()) {
        let t = small_tree(seed).canonical();
        let once = text::write_labeled("t", &t);
        let (_, back) = text::parse_labeled(&once).unwrap();
        prop_assert_eq!(text::write_labeled("t", &back.canonical()), once);
    }

    #[test]
    fn resolve_agrees_with_truncation(seed in any::<u64>(), dirs in prop::collection::vec(0u8..2, 0..6)) {
        let t = small_tree(seed);
        let addr = wmsoup_core::Address::from_dirs(dirs.clone());
        if let Ok(v) = t.resolve(&addr) {
            let cut = t.truncate(dirs.len());
            let w = cut.resolve(&addr).unwrap();
            prop_assert_eq!(t.label(v), cut.label(w));
        }
    }

    #[test]
    fn adding_a_tuple_never_decreases_values(seed in any::<u64>()) {
        let mut r = rng(seed);
        let fc = FiniteCounters::random(&mut r, 12, 3, false);
        let before = fc.values(&|_| false);
        let mut more = fc.clone();
        let x = r.gen_range(0..fc.shape.len());
        more.ops[x].insert(random_op(&mut r, fc.k, false));
        let ct = more.counter_tree();
        for n in 0..fc.shape.len() {
            for c in 0..fc.k {
                prop_assert!(ct.value(&fc.shape.address[n], c).unwrap() >= before[n * fc.k + c]);
            }
        }
    }

    #[test]
    fn tail_unbounded_ignores_the_prefix(seed in any::<u64>()) {
        let mut r = rng(seed);
        // a spine looping at vertex 1 back to itself, right children leaves
        let k = 2;
        let labels = vec![
            random_ops(&mut r, k, 2, true),
            random_ops(&mut r, k, 2, true),
            random_ops(&mut r, k, 2, true),
        ];
        let children = vec![Some([VertexId(1), VertexId(2)]), Some([VertexId(1), VertexId(2)]), None];
        let ct = CounterTree::new(names("c", k), RegularTree::new(labels, children, VertexId(0)).unwrap()).unwrap();
        let p: UpPath = "0:0".parse().unwrap();
        let q: UpPath = "000:0".parse().unwrap();
        for c in 0..k {
            prop_assert_eq!(ct.tail_unbounded(&p, c).unwrap(), ct.tail_unbounded(&q, c).unwrap());
        }
    }

    #[test]
    fn winning_regions_partition_and_strategies_win(seed in any::<u64>()) {
        let mut r = rng(seed);
        let data = GameData::random(&mut r, 8, 4);
        let sol = data.game().solve();
        let a = sol.region(Player::Automaton);
        let p = sol.region(Player::Pathfinder);
        prop_assert_eq!(a.len() + p.len(), data.owner.len());
        for player in [Player::Automaton, Player::Pathfinder] {
            let choice: Vec<Option<usize>> = (0..data.owner.len())
                .map(|v| if data.owner[v] == player { sol.strategy[v] } else { None })
                .collect();
            for v in sol.region(player) {
                prop_assert!(data.strategy_wins(player, &choice, v), "{:?} loses from {}", player, v);
            }
        }
    }

    #[test]
    fn emptiness_witnesses_are_members(seed in any::<u64>()) {
        let mut r = rng(seed);
        let aut = random_wmsoup(&mut r).parity;
        if let Some((input, run)) = aut.emptiness() {
            prop_assert!(aut.check_run(&input, &run).unwrap());
            prop_assert!(aut.membership(&input).is_some());
        }
    }

    #[test]
    fn semi_empty_is_monotone(seed in any::<u64>()) {
        let mut r = rng(seed);
        let aut = random_wmsoup(&mut r);
        let found = (1..=4).map(|k| aut.semi_empty(k).unwrap().is_some()).collect::<Vec<_>>();
        for w in found.windows(2) {
            prop_assert!(!w[0] || w[1]);
        }
    }

    #[test]
    fn unboundedness_rejections_replay(seed in any::<u64>()) {
        let mut r = rng(seed);
        let aut = random_wmsoup(&mut r);
        for _ in 0..20 {
            let run = random_run(&mut r, &aut);
            if !aut.parity.transitions_consistent(&run) {
                continue;
            }
            if let Verdict::Reject(Rejection::Unboundedness { counter, path }) = aut.accept_consistent_run(&run).unwrap() {
                let ct = aut.counterops_tree(&run).unwrap();
                prop_assert!(!ct.tail_unbounded(&path, counter).unwrap());
                let cyc = run.path_cycle_vertices(&path).unwrap();
                prop_assert!(cyc.iter().any(|v| aut.check[run.label(*v).1].contains(&counter)));
            }
        }
    }

    #[test]
    fn records_grow_and_stay_valid(word in prop::collection::vec(0usize..4, 0..60)) {
        let states = trace(&word);
        for w in states.windows(2) {
            prop_assert!(w[1].is_valid());
            prop_assert!(w[1].w.len() + w[1].v.len() >= w[0].w.len() + w[0].v.len());
        }
    }

    #[test]
    fn lasso_evaluation_ignores_loop_rotation(seed in any::<u64>(), k in 0usize..4) {
        let mut r = rng(seed);
        let alphabet = WeightedAlphabet::new(vec!["a".into(), "b".into()], vec!["w".into()]).unwrap();
        let n = r.gen_range(1..=3);
        let aut = random_max_automaton(&mut r, &alphabet, n, 3);
        let word = random_word(&mut r, &alphabet, 3, 4, 3);
        prop_assert_eq!(aut.eval_up(&word).unbounded, aut.eval_up(&word.rotated(k)).unbounded);
    }

    #[test]
    fn block_encoding_expands_each_position(seed in any::<u64>(), n in 1u64..4) {
        let mut r = rng(seed);
        let alphabet = WeightedAlphabet::new(vec!["a".into(), "b".into()], vec!["u".into(), "w".into()]).unwrap();
        let word = random_word(&mut r, &alphabet, 2, 3, 3);
        let enc = word.multiply(n).block_encode().unwrap();
        let mut expanded = Vec::new();
        let mut i = 0;
        while expanded.len() < 10 {
            let p = word.word.get(i);
            expanded.push(p.label);
            for (b, w) in p.weights.iter().enumerate() {
                for _ in 0..w.finite().unwrap() * n {
                    expanded.push(2 + b);
                }
            }
            i += 1;
        }
        prop_assert_eq!(enc.take(10), expanded[..10].to_vec());
    }

    #[test]
    fn puzzle_values_are_monotone_in_flags(seed in any::<u64>(), which in 0usize..3) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=4);
        let labels: Vec<Flags> = (0..n)
            .map(|_| Flags { cut: r.gen_bool(0.15), inc: r.gen_bool(0.4), reset: r.gen_bool(0.2), infty: false })
            .collect();
        let children = (0..n)
            .map(|_| r.gen_bool(0.7).then(|| [VertexId(r.gen_range(0..n)), VertexId(r.gen_range(0..n))]))
            .collect();
        let before = CirTree { tree: RegularTree::new_pruned(labels, children, VertexId(0)).unwrap() };
        let v = r.gen_range(0..before.tree.len());
        let mut labels = before.tree.labels().to_vec();
        match which {
            0 => labels[v].inc = true,
            1 => labels[v].reset = true,
            _ => labels[v].cut = true,
        }
        let after = CirTree { tree: before.tree.map_labels(|u, _| labels[u.0]) };
        for u in before.tree.vertices() {
            let (x, y) = (puzzle_value(&before, u).unwrap(), puzzle_value(&after, u).unwrap());
            if which == 0 {
                prop_assert!(y >= x);
            } else {
                prop_assert!(y <= x);
            }
        }
    }

    #[test]
    fn witness_text_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let fc = FiniteCounters::random(&mut r, 10, 2, false);
        let ct = fc.counter_tree();
        let set = witness_build(&ct, 0).unwrap().set;
        let back = WitnessSet::parse(&set.to_text(&ct.counters), &ct).unwrap();
        prop_assert_eq!(back, set);
    }

    #[test]
    fn profile_game_matches_acceptance_game_on_one_letter(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut aut = random_generalized(&mut r);
        for t in aut.transitions.iter_mut() {
            *t = t.map_labels(|_, &(_, c)| (0, c));
        }
        aut.alphabet.truncate(1);
        let pg = profile_game(&profile_image(&aut), &aut.states, &aut.accepting);
        prop_assert_eq!(pg.solve().winner[0] == Player::Automaton, aut.solve().unwrap().is_some());
    }

    #[test]
    fn costs_grow_with_increments(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (aut, run) = cost_instance(&mut r);
        let q = r.gen_range(0..2);
        let mut more = aut.clone();
        let s = r.gen_range(0..2);
        let c = r.gen_range(0..3);
        more.automaton.ops[s].insert(CounterOp::inc_up(c));
        let (c0, c1) = (CostContext::new(&aut, q).unwrap(), CostContext::new(&more, q).unwrap());
        prop_assert!(eval_cost_alpha(&run, &c1).unwrap() >= eval_cost_alpha(&run, &c0).unwrap());
        prop_assert!(eval_cost_beta(&run, &c1).unwrap() >= eval_cost_beta(&run, &c0).unwrap());
    }
}

fn cost_instance(r: &mut rand_chacha::ChaCha8Rng) -> (wmsoup_core::NormalizedAutomaton, CostRun) {
    use wmsoup_core::{NormalFormEvidence, NormalizedAutomaton, OpSet, WmsoUpAutomaton};
    let set = |r: &mut rand_chacha::ChaCha8Rng, allowed: &[usize]| -> BTreeSet<usize> {
        allowed.iter().copied().filter(|_| r.gen_bool(0.5)).collect()
    };
    let parity = ParityAutomaton {
        alphabet: vec!["a".into()],
        states: vec!["p".into(), "q".into()],
        accepting: vec![false, true],
        initial: 0,
        delta0: BTreeSet::from([(0, 0), (1, 0)]),
        delta2: BTreeSet::new(),
    };
    let ops: Vec<OpSet> = (0..2).map(|_| random_ops(r, 3, 3, true)).collect();
    let aut = NormalizedAutomaton {
        automaton: WmsoUpAutomaton {
            parity,
            counters: names("c", 3),
            bounded: vec![true, false, false],
            cut: (0..2).map(|_| set(r, &[0])).collect(),
            check: (0..2).map(|_| set(r, &[1, 2])).collect(),
            ops,
        },
        evidence: NormalFormEvidence {
            larcut: (0..2).map(|_| set(r, &[0])).collect(),
            larcheck: (0..2).map(|_| set(r, &[1, 2])).collect(),
            property_a: true,
            property_b: true,
        },
    };
    let shape = random_shape(r, 9);
    let labels: Vec<((usize, usize), Option<usize>)> = (0..shape.len())
        .map(|x| {
            let colored = (x == 0 || shape.children[x].is_none()) && r.gen_bool(0.6);
            ((0, r.gen_range(0..2)), colored.then_some(0))
        })
        .collect();
    (aut, shape.tree(&labels))
}

#[test]
fn evaluation_bounds_are_never_exceeded_with_weights_present() {
    let alphabet = WeightedAlphabet::new(vec!["a".into()], vec!["w".into()]).unwrap();
    for seed in 0..50 {
        let mut r = rng(77_000 + seed);
        let aut = random_max_automaton(&mut r, &alphabet, 2, 2);
        let word = random_word(&mut r, &alphabet, 2, 3, 2);
        let ev = aut.eval_up(&word);
        let peak = aut.simulate(&word, 2_000);
        for (c, b) in ev.bounds.iter().enumerate() {
            match b {
                Some(b) => assert!(peak[c] <= *b, "seed {seed}"),
                None => assert!(peak[c] > ExtNat::Fin(100), "seed {seed}"),
            }
        }
    }
}
