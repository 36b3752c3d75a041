//! Two-player parity games with max-parity acceptance.
//!
//! Player [`Player::Automaton`] wins a play when the largest priority seen
//! infinitely often is even. A position without moves loses for its owner.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{parse as perr, Result};
use crate::tree::text::content_lines;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    /// Even player.
    Automaton,
    /// Odd player.
    Pathfinder,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Automaton => Player::Pathfinder,
            Player::Pathfinder => Player::Automaton,
        }
    }

    /// The player favoured by a priority.
    pub fn of_priority(p: u32) -> Player {
        if p.is_multiple_of(2) {
            Player::Automaton
        } else {
            Player::Pathfinder
        }
    }

    /// `A` or `P`, as in the game text format.
    pub fn code(self) -> &'static str {
        match self {
            Player::Automaton => "A",
            Player::Pathfinder => "P",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParityGame {
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
    pub succ: Vec<Vec<usize>>,
    /// Optional display names; defaults to indices.
    pub names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub winner: Vec<Player>,
    /// For positions won by their owner, the move the owner plays; `None`
    /// for dead ends and positions won by the opponent.
    pub strategy: Vec<Option<usize>>,
}

impl Solution {
    pub fn region(&self, p: Player) -> Vec<usize> {
        (0..self.winner.len()).filter(|&v| self.winner[v] == p).collect()
    }
}

impl ParityGame {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_position(&mut self, owner: Player, priority: u32) -> usize {
        self.owner.push(owner);
        self.priority.push(priority);
        self.succ.push(Vec::new());
        self.names.push(String::new());
        self.owner.len() - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        if !self.succ[from].contains(&to) {
            self.succ[from].push(to);
        }
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn name(&self, v: usize) -> String {
        match self.names.get(v) {
            Some(n) if !n.is_empty() => n.clone(),
            _ => v.to_string(),
        }
    }

    /// Winning regions and positional strategies for both players.
    pub fn solve(&self) -> Solution {
        let n = self.len();
        // dead ends become self-loops with a priority losing for the owner
        let mut succ: Vec<Vec<usize>> = self
            .succ
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        let mut priority = self.priority.clone();
        let mut dead = vec![false; n];
        for v in 0..n {
            if succ[v].is_empty() {
                dead[v] = true;
                succ[v].push(v);
                priority[v] = match self.owner[v] {
                    Player::Automaton => 1,
                    Player::Pathfinder => 0,
                };
            }
        }
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            for &w in &succ[v] {
                pred[w].push(v);
            }
        }
        let arena = Arena {
            owner: &self.owner,
            priority: &priority,
            succ: &succ,
            pred: &pred,
        };
        let mut strategy = vec![None; n];
        let won = arena.zielonka(&vec![true; n], &mut strategy);
        let winner: Vec<Player> = (0..n)
            .map(|v| if won[v] { Player::Automaton } else { Player::Pathfinder })
            .collect();
        for v in 0..n {
            if dead[v] || winner[v] != self.owner[v] {
                strategy[v] = None;
            }
        }
        Solution { winner, strategy }
    }

    pub fn parse(src: &str) -> Result<(String, ParityGame)> {
        let mut name = None;
        let mut game = ParityGame::new();
        let mut ids: HashMap<String, usize> = HashMap::new();
        let mut pending: Vec<(usize, usize, Vec<String>)> = Vec::new();
        for (ln, line) in content_lines(src) {
            let mut toks = line.split_whitespace();
            match toks.next() {
                Some("game") => name = Some(toks.collect::<Vec<_>>().join(" ")),
                Some("pos") => {
                    let id = toks.next().ok_or_else(|| perr(ln, "pos line without id"))?;
                    let (mut owner, mut prio, mut succ) = (None, None, Vec::new());
                    for t in toks {
                        match t.split_once('=') {
                            Some(("owner", "A")) => owner = Some(Player::Automaton),
                            Some(("owner", "P")) => owner = Some(Player::Pathfinder),
                            Some(("prio", p)) => {
                                prio = Some(p.parse::<u32>().map_err(|_| perr(ln, format!("bad priority `{p}`")))?)
                            }
                            Some(("succ", "-")) => {}
                            Some(("succ", s)) => succ = s.split(',').map(String::from).collect(),
                            _ => return Err(perr(ln, format!("unexpected `{t}`"))),
                        }
                    }
                    let owner = owner.ok_or_else(|| perr(ln, "missing owner=A|P"))?;
                    let prio = prio.ok_or_else(|| perr(ln, "missing prio=<n>"))?;
                    let v = game.add_position(owner, prio);
                    game.names[v] = id.to_string();
                    if ids.insert(id.to_string(), v).is_some() {
                        return Err(perr(ln, format!("duplicate position `{id}`")));
                    }
                    pending.push((ln, v, succ));
                }
                Some(kw) => return Err(perr(ln, format!("unexpected line `{kw}`"))),
                None => {}
            }
        }
        for (ln, v, succ) in pending {
            for s in succ {
                let w = *ids
                    .get(&s)
                    .ok_or_else(|| perr(ln, format!("unknown position `{s}`")))?;
                game.add_edge(v, w);
            }
        }
        let name = name.ok_or_else(|| perr(1, "missing `game <name>` header"))?;
        Ok((name, game))
    }

    pub fn to_text(&self, name: &str) -> String {
        let mut out = format!("game {name}\n");
        for v in 0..self.len() {
            let succ = if self.succ[v].is_empty() {
                "-".to_string()
            } else {
                self.succ[v].iter().map(|&w| self.name(w)).collect::<Vec<_>>().join(",")
            };
            let _ = writeln!(
                out,
                "pos {} owner={} prio={} succ={}",
                self.name(v),
                self.owner[v].code(),
                self.priority[v],
                succ
            );
        }
        out
    }
}

struct Arena<'a> {
    owner: &'a [Player],
    priority: &'a [u32],
    succ: &'a [Vec<usize>],
    pred: &'a [Vec<usize>],
}

impl Arena<'_> {
    /// Attractor of `target` for `p` within `mask`. Records attractor moves
    /// (lowest-indexed successor into the growing set) in `strategy`.
    fn attract(&self, p: Player, target: &[bool], mask: &[bool], strategy: &mut [Option<usize>]) -> Vec<bool> {
        let n = mask.len();
        let mut attr: Vec<bool> = (0..n).map(|v| mask[v] && target[v]).collect();
        let mut remaining: Vec<usize> = (0..n)
            .map(|v| if mask[v] { self.succ[v].iter().filter(|&&w| mask[w]).count() } else { 0 })
            .collect();
        let mut queue: Vec<usize> = (0..n).filter(|&v| attr[v]).collect();
        let mut head = 0;
        while head < queue.len() {
            let w = queue[head];
            head += 1;
            for &v in &self.pred[w] {
                if !mask[v] || attr[v] {
                    continue;
                }
                if self.owner[v] == p {
                    strategy[v] = self.succ[v].iter().copied().find(|&s| attr[s] && mask[s]);
                    attr[v] = true;
                    queue.push(v);
                } else {
                    remaining[v] -= 1;
                    if remaining[v] == 0 {
                        attr[v] = true;
                        queue.push(v);
                    }
                }
            }
        }
        attr
    }

    /// Returns the Automaton-won part of `mask` and fills winning moves.
    fn zielonka(&self, mask: &[bool], strategy: &mut [Option<usize>]) -> Vec<bool> {
        let n = mask.len();
        let Some(d) = (0..n).filter(|&v| mask[v]).map(|v| self.priority[v]).max() else {
            return vec![false; n];
        };
        let i = Player::of_priority(d);
        let top: Vec<bool> = (0..n).map(|v| mask[v] && self.priority[v] == d).collect();
        let mut attr_moves = vec![None; n];
        let a = self.attract(i, &top, mask, &mut attr_moves);
        let sub: Vec<bool> = (0..n).map(|v| mask[v] && !a[v]).collect();
        let mut sub_strategy = vec![None; n];
        let sub_even = self.zielonka(&sub, &mut sub_strategy);
        let wins = |even: &[bool], v: usize, p: Player| match p {
            Player::Automaton => even[v],
            Player::Pathfinder => !even[v],
        };
        let opp = i.opponent();
        let opp_region: Vec<bool> = (0..n).map(|v| sub[v] && wins(&sub_even, v, opp)).collect();
        if !opp_region.iter().any(|&b| b) {
            for v in 0..n {
                if !mask[v] || self.owner[v] != i {
                    continue;
                }
                strategy[v] = if sub[v] {
                    sub_strategy[v]
                } else if top[v] {
                    self.succ[v].iter().copied().find(|&s| mask[s])
                } else {
                    attr_moves[v]
                };
            }
            return match i {
                Player::Automaton => mask.to_vec(),
                Player::Pathfinder => vec![false; n],
            };
        }
        let mut b_moves = vec![None; n];
        let b = self.attract(opp, &opp_region, mask, &mut b_moves);
        let rest: Vec<bool> = (0..n).map(|v| mask[v] && !b[v]).collect();
        let mut rest_strategy = vec![None; n];
        let rest_even = self.zielonka(&rest, &mut rest_strategy);
        let mut even = vec![false; n];
        for v in 0..n {
            if !mask[v] {
                continue;
            }
            let w = if b[v] { opp } else if wins(&rest_even, v, Player::Automaton) { Player::Automaton } else { Player::Pathfinder };
            even[v] = w == Player::Automaton;
            if self.owner[v] != w {
                continue;
            }
            strategy[v] = if b[v] {
                if opp_region[v] {
                    sub_strategy[v]
                } else {
                    b_moves[v]
                }
            } else {
                rest_strategy[v]
            };
        }
        even
    }
}
