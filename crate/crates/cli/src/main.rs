//! `wmsoup`: command line access to counter trees, WMSO+UP automata, parity
//! games, max-automata and the witness constructions.
//!
//! Exit status: 0 for a positive verdict or a computed value, 1 for a
//! negative verdict, 2 when a bounded search is inconclusive, 64 for usage,
//! parse and precondition errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use wmsoup_core::chain::{self, check_rq_transition, eval_cost_alpha, eval_cost_beta, profile_game, CostContext};
use wmsoup_core::flat::{puzzle_member, witness_build, witness_check, WitnessSet};
use wmsoup_core::maxauto::{block_word_text, factorial_simulation};
use wmsoup_core::tree::text;
use wmsoup_core::{
    lar, Address, CirTree, CounterTree, Error, Machine, MaxAutomaton, NormalizedAutomaton, ParityAutomaton,
    ParityGame, Player, UpPath, Verdict, WeightedAlphabet, WeightedWord, WmsoUpAutomaton,
};

#[derive(Parser)]
#[command(name = "wmsoup", version, about = "Counter trees, WMSO+UP automata and related games")]
struct Cli {
    /// Output style; `tabular` prints tab-separated verdict lines.
    #[arg(long, value_enum, global = true, default_value = "human")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Tabular,
}

#[derive(Subcommand)]
enum Command {
    /// Value of a counter configuration in a finite counter tree.
    Value {
        tree: PathBuf,
        #[arg(long)]
        node: Address,
        #[arg(long)]
        counter: String,
    },
    /// Value counting only paths that avoid the given strict ancestors.
    RestrictedValue {
        tree: PathBuf,
        #[arg(long)]
        node: Address,
        #[arg(long)]
        counter: String,
        /// Addresses of the prohibited set, e.g. `e 0 01`.
        #[arg(long, num_args = 0.., value_delimiter = ' ')]
        set: Vec<Address>,
    },
    /// Whether a root-directed counter is unbounded along a path (`prefix:loop`).
    TailUnbounded {
        tree: PathBuf,
        #[arg(long)]
        path: UpPath,
        #[arg(long)]
        counter: String,
    },
    /// Membership of a labelled tree in a parity tree automaton.
    Member { automaton: PathBuf, tree: PathBuf },
    /// Emptiness of a parity tree automaton; exits 0 with a witness when
    /// the language is nonempty and 1 when it is empty.
    Empty { automaton: PathBuf },
    /// Acceptance of a run by a WMSO+UP automaton.
    AcceptRun { automaton: PathBuf, input: PathBuf, run: PathBuf },
    /// Bounded search for an accepted regular run.
    SemiEmpty {
        automaton: PathBuf,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        /// Also write `input.tree` and `run.tree` into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normal-form product with latest appearance records.
    Normalize { automaton: PathBuf },
    /// Records along a finite word.
    LarTrace {
        /// Letters separated by spaces.
        word: String,
        /// Alphabet in order; defaults to letters in order of appearance.
        #[arg(long, num_args = 0.., value_delimiter = ' ')]
        alphabet: Vec<String>,
    },
    /// Winning regions and positional strategies of a parity game.
    SolveGame { game: PathBuf },
    /// Winner of the profile game from a profile set.
    ProfileGame { profiles: PathBuf },
    /// Unbounded counters and verdict of a max-automaton on an ultimately
    /// periodic word.
    EvalWord { automaton: PathBuf, word: PathBuf },
    /// Block encoding of a weighted word, optionally multiplied first.
    BlockEncode {
        word: PathBuf,
        #[arg(long, default_value_t = 1)]
        multiply: u64,
    },
    /// The automaton simulating block encodings of `n!`-scaled words.
    FactorialSim {
        automaton: PathBuf,
        #[arg(long, num_args = 1.., value_delimiter = ' ', required = true)]
        labels: Vec<String>,
        #[arg(long, num_args = 0.., value_delimiter = ' ')]
        weights: Vec<String>,
    },
    /// Values and membership of a cut-increment-reset tree.
    Puzzle { tree: PathBuf },
    /// Builds a witness set for a counter.
    WitnessBuild {
        tree: PathBuf,
        #[arg(long)]
        counter: String,
    },
    /// Checks a witness set.
    WitnessCheck { tree: PathBuf, witness: PathBuf },
    /// Checks a finite candidate transition of the chain automaton for a state.
    CheckTransition {
        automaton: PathBuf,
        candidate: PathBuf,
        #[arg(long)]
        state: String,
        /// The variant in which the state occurs finitely often.
        #[arg(long)]
        starred: bool,
    },
    /// The boundedness cost of a finite candidate.
    EvalAlpha {
        automaton: PathBuf,
        candidate: PathBuf,
        #[arg(long)]
        state: String,
    },
    /// The unboundedness cost of a finite candidate.
    EvalBeta {
        automaton: PathBuf,
        candidate: PathBuf,
        #[arg(long)]
        state: String,
    },
}

/// Verdict lines plus optional witness text.
struct Report {
    code: u8,
    lines: Vec<Vec<String>>,
    body: String,
}

impl Report {
    fn new(code: u8) -> Self {
        Report {
            code,
            lines: Vec::new(),
            body: String::new(),
        }
    }

    fn line<I, S>(mut self, fields: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.lines.push(fields.into_iter().map(|s| s.to_string()).collect());
        self
    }

    fn body(mut self, text: impl Into<String>) -> Self {
        self.body.push_str(&text.into());
        self
    }

    fn print(&self, format: Format) {
        for l in &self.lines {
            match format {
                Format::Human => match l.split_first() {
                    Some((k, rest)) if !rest.is_empty() => println!("{k}: {}", rest.join(" ")),
                    Some((k, _)) => println!("{k}"),
                    None => {}
                },
                Format::Tabular => println!("{}", l.join("\t")),
            }
        }
        if !self.body.is_empty() {
            print!("{}", self.body);
        }
    }
}

#[derive(Debug)]
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<Report, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

/// Attaches the file name to parse errors.
fn parsed<T>(path: &Path, r: Result<T, Error>) -> Result<T, Failure> {
    r.map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn counter_tree(path: &Path) -> Result<CounterTree, Failure> {
    Ok(parsed(path, CounterTree::parse(&read(path)?))?.1)
}

fn wmsoup(path: &Path) -> Result<(String, WmsoUpAutomaton, Option<wmsoup_core::NormalFormEvidence>), Failure> {
    parsed(path, WmsoUpAutomaton::parse(&read(path)?))
}

fn normalized(path: &Path) -> Result<NormalizedAutomaton, Failure> {
    let (_, automaton, evidence) = wmsoup(path)?;
    let evidence = evidence.ok_or_else(|| Failure(format!("{}: no larcut/larcheck evidence", path.display())))?;
    Ok(NormalizedAutomaton { automaton, evidence })
}

fn state_index(aut: &ParityAutomaton, name: &str) -> Result<usize, Failure> {
    Ok(aut.state(name)?)
}

fn verdict(yes: bool) -> u8 {
    if yes {
        0
    } else {
        1
    }
}

fn witness_text(aut: &ParityAutomaton, input: &wmsoup_core::RegularTree<usize>, run: &wmsoup_core::Run) -> (String, String) {
    (
        text::write_labeled("input", &aut.decode_tree(input).canonical()),
        aut.run_to_text("run", &run.canonical()),
    )
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Value { tree, node, counter } => {
            let t = counter_tree(&tree)?;
            let v = t.value(&node, t.counter(&counter)?)?;
            Ok(Report::new(0).line(["value".to_string(), v.to_string()]))
        }
        Command::RestrictedValue { tree, node, counter, set } => {
            let t = counter_tree(&tree)?;
            let v = t.restricted_value(&node, t.counter(&counter)?, &set)?;
            Ok(Report::new(0).line(["restricted-value".to_string(), v.to_string()]))
        }
        Command::TailUnbounded { tree, path, counter } => {
            let t = counter_tree(&tree)?;
            let yes = t.tail_unbounded(&path, t.counter(&counter)?)?;
            Ok(Report::new(verdict(yes)).line(["tail-unbounded", if yes { "yes" } else { "no" }]))
        }
        Command::Member { automaton, tree } => {
            let (_, aut) = parsed(&automaton, ParityAutomaton::parse(&read(&automaton)?))?;
            let (_, t) = parsed(&tree, text::parse_labeled(&read(&tree)?))?;
            let input = aut.encode_tree(&t)?;
            Ok(match aut.membership(&input) {
                Some(r) => Report::new(0).line(["member", "yes"]).body(aut.run_to_text("run", &r.canonical())),
                None => Report::new(1).line(["member", "no"]),
            })
        }
        Command::Empty { automaton } => {
            let (_, aut) = parsed(&automaton, ParityAutomaton::parse(&read(&automaton)?))?;
            Ok(match aut.emptiness() {
                Some((input, r)) => {
                    let (i, r) = witness_text(&aut, &input, &r);
                    Report::new(0).line(["empty", "no"]).body(i + &r)
                }
                None => Report::new(1).line(["empty", "yes"]),
            })
        }
        Command::AcceptRun { automaton, input, run } => {
            let (_, aut, _) = wmsoup(&automaton)?;
            let (_, t) = parsed(&input, text::parse_labeled(&read(&input)?))?;
            let t = aut.parity.encode_tree(&t)?;
            let (_, r) = parsed(&run, aut.parity.parse_run(&read(&run)?))?;
            Ok(match aut.accept_run(&t, &r)? {
                Verdict::Accept => Report::new(0).line(["accept", "yes"]),
                Verdict::Reject(why) => Report::new(1).line(["accept", "no"]).line(["reason".to_string(), aut.explain(&why)]),
            })
        }
        Command::SemiEmpty { automaton, bound, out } => {
            let (_, aut, _) = wmsoup(&automaton)?;
            let Some((input, r)) = aut.semi_empty(bound)? else {
                return Ok(Report::new(2).line(["semi-empty".to_string(), format!("unknown (no run with at most {bound} vertices)")]));
            };
            let (i, r) = witness_text(&aut.parity, &input, &r);
            if let Some(dir) = out {
                let write = |name: &str, s: &str| {
                    fs::write(dir.join(name), s).map_err(|e| Failure(format!("{}: {e}", dir.display())))
                };
                write("input.tree", &i)?;
                write("run.tree", &r)?;
            }
            Ok(Report::new(0).line(["semi-empty", "witness"]).body(i + &r))
        }
        Command::Normalize { automaton } => {
            let (name, aut, _) = wmsoup(&automaton)?;
            let product = lar::normalize(&aut)?;
            let n = product.result.automaton.parity.states.len();
            Ok(Report::new(0)
                .line(["states".to_string(), n.to_string()])
                .body(product.result.automaton.to_text(&format!("{name}-normal"), Some(&product.result.evidence))))
        }
        Command::LarTrace { word, alphabet } => {
            let letters: Vec<&str> = word.split_whitespace().collect();
            let mut names = alphabet;
            if names.is_empty() {
                for l in &letters {
                    if !names.iter().any(|n| n == l) {
                        names.push(l.to_string());
                    }
                }
            }
            let idx = letters
                .iter()
                .map(|l| names.iter().position(|n| n == l).ok_or_else(|| Failure(format!("unknown letter `{l}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            let mut rep = Report::new(0);
            for (i, s) in lar::trace(&idx).iter().enumerate() {
                let read = if i == 0 { "-" } else { letters[i - 1] };
                let set: Vec<&str> = lar::lar_of(s).iter().map(|&a| names[a].as_str()).collect();
                rep = rep.line([i.to_string(), read.to_string(), s.display(&names), format!("{{{}}}", set.join(","))]);
            }
            Ok(rep)
        }
        Command::SolveGame { game } => {
            let (_, g) = parsed(&game, ParityGame::parse(&read(&game)?))?;
            let sol = g.solve();
            let mut rep = Report::new(0);
            for v in 0..g.len() {
                let mv = sol.strategy[v].map_or("-".to_string(), |w| g.name(w));
                rep = rep.line([g.name(v), sol.winner[v].code().to_string(), mv]);
            }
            Ok(rep)
        }
        Command::ProfileGame { profiles } => {
            let (_, states, accepting, set) = parsed(&profiles, chain::parse_profiles(&read(&profiles)?))?;
            let g = profile_game(&set, &states, &accepting);
            let sol = g.solve();
            let w = sol.winner[0];
            let mut rep = Report::new(verdict(w == Player::Automaton)).line(["winner", w.code()]);
            for v in 1..g.len() {
                rep = rep.line([g.name(v), sol.winner[v].code().to_string()]);
            }
            Ok(rep)
        }
        Command::EvalWord { automaton, word } => {
            let (_, a) = parsed(&automaton, MaxAutomaton::parse(&read(&automaton)?))?;
            let w = parsed(&word, WeightedWord::parse(&read(&word)?, Some(&a.alphabet)))?;
            let ev = a.eval_up(&w);
            let unb: Vec<&str> = ev.unbounded.iter().map(|&c| a.counters[c].as_str()).collect();
            let mut rep = Report::new(verdict(ev.accept))
                .line(["unbounded".to_string(), format!("{{{}}}", unb.join(","))])
                .line(["accept", if ev.accept { "yes" } else { "no" }]);
            for (c, b) in ev.bounds.iter().enumerate() {
                if let Some(b) = b {
                    rep = rep.line(["bound".to_string(), a.counters[c].clone(), b.to_string()]);
                }
            }
            Ok(rep)
        }
        Command::BlockEncode { word, multiply } => {
            let w = parsed(&word, WeightedWord::parse(&read(&word)?, None))?;
            let enc = w.multiply(multiply).block_encode()?;
            Ok(Report::new(0).body(block_word_text(&w.alphabet, &enc) + "\n"))
        }
        Command::FactorialSim { automaton, labels, weights } => {
            let (name, a) = parsed(&automaton, MaxAutomaton::parse(&read(&automaton)?))?;
            let alphabet = WeightedAlphabet::new(labels, weights)?;
            let b = factorial_simulation(&a, &alphabet)?;
            Ok(Report::new(0)
                .line(["factor".to_string(), b.factor.to_string()])
                .body(b.to_text(&format!("{name}-factorial"))))
        }
        Command::Puzzle { tree } => {
            let (_, t) = parsed(&tree, CirTree::parse(&read(&tree)?))?;
            let values = t.values();
            let member = puzzle_member(&t);
            let mut rep = Report::new(verdict(member));
            for (v, val) in values.iter().enumerate() {
                rep = rep.line([v.to_string(), t.tree.labels()[v].to_string(), val.to_string()]);
            }
            Ok(rep.line(["member", if member { "yes" } else { "no" }]))
        }
        Command::WitnessBuild { tree, counter } => {
            let t = counter_tree(&tree)?;
            let built = witness_build(&t, t.counter(&counter)?)?;
            let mut rep = Report::new(0);
            for (i, stage) in built.stages.iter().enumerate() {
                let a: Vec<String> = stage.iter().map(|a| a.to_string()).collect();
                rep = rep.line([format!("stage {i}"), a.join(" ")]);
            }
            if !built.completed.is_empty() {
                let a: Vec<String> = built.completed.iter().map(|a| a.to_string()).collect();
                rep = rep.line(["completed".to_string(), a.join(" ")]);
            }
            Ok(rep.body(built.set.to_text(&t.counters)))
        }
        Command::WitnessCheck { tree, witness } => {
            let t = counter_tree(&tree)?;
            let x = parsed(&witness, WitnessSet::parse(&read(&witness)?, &t))?;
            let ok = witness_check(&t, &x)?;
            Ok(Report::new(verdict(ok)).line(["witness", if ok { "valid" } else { "invalid" }]))
        }
        Command::CheckTransition { automaton, candidate, state, starred } => {
            let aut = normalized(&automaton)?;
            let q = state_index(&aut.automaton.parity, &state)?;
            let (_, c) = parsed(&candidate, chain::parse_cost_run(&read(&candidate)?, &aut.automaton.parity))?;
            let v = check_rq_transition(&c, &CostContext::new(&aut, q)?, starred)?;
            Ok(match v {
                chain::TransitionVerdict::Accepted => Report::new(0).line(["transition", "yes"]),
                chain::TransitionVerdict::Rejected(why) => {
                    Report::new(1).line(["transition", "no"]).line(["reason".to_string(), why])
                }
            }
            .line(["note", "finite candidates only"]))
        }
        Command::EvalAlpha { automaton, candidate, state } => cost(&automaton, &candidate, &state, false),
        Command::EvalBeta { automaton, candidate, state } => cost(&automaton, &candidate, &state, true),
    }
}

fn cost(automaton: &Path, candidate: &Path, state: &str, beta: bool) -> Outcome {
    let aut = normalized(automaton)?;
    let q = state_index(&aut.automaton.parity, state)?;
    let (_, c) = parsed(candidate, chain::parse_cost_run(&read(candidate)?, &aut.automaton.parity))?;
    let ctx = CostContext::new(&aut, q)?;
    let (key, v) = if beta {
        ("beta", eval_cost_beta(&c, &ctx)?)
    } else {
        ("alpha", eval_cost_alpha(&c, &ctx)?)
    };
    Ok(Report::new(0).line([key.to_string(), v.to_string()]))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(rep) => {
            rep.print(cli.format);
            ExitCode::from(rep.code)
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(64)
        }
    }
}
