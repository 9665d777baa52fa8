//! Built-in adversaries.

use std::collections::{BTreeMap, VecDeque};

use super::{funit_address, politeral_of_move, Adversary, Move, Player, Run};
use crate::formula::{Formula, Position};
use crate::unit::UnitRef;

/// Answer to a permission grant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reply {
    Moves(Vec<Move>),
    /// End the play.
    Quit,
}

impl Reply {
    pub fn pass() -> Reply {
        Reply::Moves(Vec::new())
    }
}

/// Never moves.
#[derive(Debug, Clone, Copy, Default)]
pub struct Silent;

impl Adversary for Silent {
    fn on_permission(&mut self, _: &Formula, _: &Run) -> Reply {
        Reply::pass()
    }
}

#[derive(Debug, Clone)]
enum Script {
    /// One batch per grant, in order.
    Batches(VecDeque<Vec<Move>>),
    /// A stored run: at a grant with `n` labmoves played, emit the
    /// contiguous `⊤` labmoves found at index `n` of the stored run.
    Transcript(Run),
}

/// Replays stored moves.
#[derive(Debug, Clone)]
pub struct Scripted {
    script: Script,
}

impl Scripted {
    pub fn from_batches(batches: Vec<Vec<Move>>) -> Scripted {
        Scripted {
            script: Script::Batches(batches.into()),
        }
    }

    pub fn from_transcript(run: &Run) -> Scripted {
        Scripted {
            script: Script::Transcript(run.clone()),
        }
    }
}

impl Adversary for Scripted {
    fn on_permission(&mut self, _: &Formula, position: &Run) -> Reply {
        match &mut self.script {
            Script::Batches(b) => Reply::Moves(b.pop_front().unwrap_or_default()),
            Script::Transcript(stored) => Reply::Moves(
                stored
                    .moves()
                    .iter()
                    .skip(position.len())
                    .take_while(|l| l.player == Player::Top)
                    .map(|l| l.mv.clone())
                    .collect(),
            ),
        }
    }
}

/// Pairs every politeral with the first later unpaired politeral of the
/// opposite literal and equal modal depth. The result is an involution.
pub fn default_pairing(formula: &Formula) -> BTreeMap<Position, Position> {
    let lits = formula.politerals();
    let mut pairing = BTreeMap::new();
    for (i, a) in lits.iter().enumerate() {
        if pairing.contains_key(a) {
            continue;
        }
        let fa = formula.subformula_at(a).unwrap();
        let da = formula.modal_depth(a).unwrap();
        let partner = lits[i + 1..].iter().find(|b| {
            !pairing.contains_key(*b)
                && formula.subformula_at(b).unwrap() == &fa.negate()
                && formula.modal_depth(b).unwrap() == da
        });
        if let Some(b) = partner {
            pairing.insert(a.clone(), b.clone());
            pairing.insert(b.clone(), a.clone());
        }
    }
    pairing
}

/// Mirrors every counterstrategy move across a politeral pairing.
///
/// Unmatched counterstrategy moves are queued; on each grant the oldest
/// `burst` of them (all of them when `burst` is `None`) are played. With an
/// unbounded burst the finite play shows what a lagging first-in first-out
/// copier eventually plays on every move.
#[derive(Debug, Clone)]
pub struct Copycat {
    pairing: BTreeMap<Position, Position>,
    queue: VecDeque<Move>,
    seen: usize,
    burst: Option<usize>,
}

impl Copycat {
    pub fn new(formula: &Formula) -> Copycat {
        Copycat::with_pairing(default_pairing(formula))
    }

    pub fn with_pairing(pairing: BTreeMap<Position, Position>) -> Copycat {
        Copycat {
            pairing,
            queue: VecDeque::new(),
            seen: 0,
            burst: None,
        }
    }

    pub fn burst(mut self, burst: Option<usize>) -> Copycat {
        self.burst = burst;
        self
    }

    fn mirror(&self, formula: &Formula, mv: &Move) -> Option<Move> {
        let unit = politeral_of_move(formula, mv)?;
        let target = self.pairing.get(&unit.position)?;
        let mirrored = UnitRef::new(target.clone(), unit.branches);
        let blocks = funit_address(formula, &mirrored).ok()?;
        Some(Move::new(blocks, mv.numeral))
    }
}

impl Adversary for Copycat {
    fn on_permission(&mut self, formula: &Formula, position: &Run) -> Reply {
        for l in &position.moves()[self.seen.min(position.len())..] {
            if l.player == Player::Bottom {
                if let Some(m) = self.mirror(formula, &l.mv) {
                    self.queue.push_back(m);
                }
            }
        }
        self.seen = position.len();
        let n = self.burst.unwrap_or(usize::MAX).min(self.queue.len());
        Reply::Moves(self.queue.drain(..n).collect())
    }
}
