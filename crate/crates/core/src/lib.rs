//! Counter trees, WMSO+UP automata over regular binary trees, parity games,
//! and weighted max-automata over ultimately periodic words.

pub mod chain;
pub mod counter;
pub mod error;
pub mod ext;
pub mod flat;
pub mod game;
mod graph;
pub mod lar;
pub mod maxauto;
pub mod parity;
pub mod tree;
pub mod wmsoup;

pub use counter::{ConfigGraph, CounterOp, CounterTree, Locus, OpKind, OpSet};
pub use error::{Error, Result};
pub use ext::ExtNat;
pub use game::{ParityGame, Player, Solution};
pub use parity::{ParityAutomaton, Run};
pub use tree::{Address, RegularTree, UpPath, UpWord, VertexId};
pub use wmsoup::{NormalFormEvidence, NormalizedAutomaton, Rejection, Verdict, WmsoUpAutomaton};
pub use lar::{LarProduct, LarState};
pub use maxauto::{Evaluation, ExtMaxAutomaton, Machine, MaxAutomaton, Op, Position, Profile, WeightedAlphabet, WeightedWord};
pub use flat::{CirTree, Flags, WitnessNodes, WitnessSet};
pub use chain::{AutomatonChain, GeneralizedAutomaton, PartiallyColoredTree};
