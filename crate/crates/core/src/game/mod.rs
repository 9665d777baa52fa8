//! Addressed moves, runs and funit bookkeeping for enumeration games played
//! on a formula.

mod adversary;
mod counter;
mod transcript;

pub use adversary::{default_pairing, Copycat, Reply, Scripted, Silent};
pub use counter::{
    play_match, run_counterstrategy, Adversary, GameError, MatchTranscripts, DEFAULT_MOVE_BUDGET,
};
pub use transcript::{parse_transcript, write_transcript, TranscriptError};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::formula::{Connective, Formula};
use crate::unit::{Bits, UnitRef};

/// Funits share their shape with unit references: a position plus one
/// finite bitstring per modal ancestor.
pub type Funit = UnitRef;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("bad move {0:?}")]
    Syntax(String),
    #[error("funit {unit} does not fit the formula")]
    Arity { unit: UnitRef },
    #[error("move {0} is not legal")]
    Illegal(Move),
}

/// `⊤` is the machine (the adversary of the counterstrategy), `⊥` the
/// environment (the counterstrategy itself).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Top,
    Bottom,
}

impl Player {
    pub fn flip(self) -> Player {
        match self {
            Player::Top => Player::Bottom,
            Player::Bottom => Player::Top,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Top => "T",
            Player::Bottom => "B",
        })
    }
}

/// A move `αa`: the address blocks of a politeral funit and a numeral.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub blocks: Vec<Bits>,
    pub numeral: u64,
}

impl Move {
    pub fn new(blocks: Vec<Bits>, numeral: u64) -> Move {
        Move { blocks, numeral }
    }
}

/// Serialized address: every block followed by a period.
pub fn address_string(blocks: &[Bits]) -> String {
    let mut s = String::new();
    for b in blocks {
        s.push_str(b.as_str());
        s.push('.');
    }
    s
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", address_string(&self.blocks), self.numeral)
    }
}

impl FromStr for Move {
    type Err = MoveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MoveError::Syntax(s.to_string());
        let mut parts: Vec<&str> = s.split('.').collect();
        let numeral = parts.pop().ok_or_else(bad)?;
        let canonical = !numeral.is_empty()
            && numeral.bytes().all(|b| b.is_ascii_digit())
            && (numeral == "0" || !numeral.starts_with('0'));
        if !canonical {
            return Err(bad());
        }
        let numeral = numeral.parse().map_err(|_| bad())?;
        let blocks = parts
            .into_iter()
            .map(|p| Bits::new(p).map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Move { blocks, numeral })
    }
}

/// A labeled move with its cycle tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Labmove {
    pub player: Player,
    pub mv: Move,
    pub cycle: u64,
}

/// A finite run. Cycle tags strictly increase.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Run {
    moves: Vec<Labmove>,
}

impl Run {
    pub fn new() -> Run {
        Run::default()
    }

    /// Appends with the next sequential cycle tag.
    pub fn push(&mut self, player: Player, mv: Move) {
        let cycle = self.moves.last().map_or(1, |l| l.cycle + 1);
        self.moves.push(Labmove { player, mv, cycle });
    }

    /// Appends with an explicit tag; `None` if it would not increase.
    pub fn push_tagged(&mut self, player: Player, mv: Move, cycle: u64) -> Option<()> {
        if self.moves.last().is_some_and(|l| l.cycle >= cycle) {
            return None;
        }
        self.moves.push(Labmove { player, mv, cycle });
        Some(())
    }

    pub fn from_moves(moves: impl IntoIterator<Item = (Player, Move)>) -> Run {
        let mut run = Run::new();
        for (p, m) in moves {
            run.push(p, m);
        }
        run
    }

    pub fn moves(&self) -> &[Labmove] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// `Ω_m`: the labmoves tagged with cycles `≤ m`.
    pub fn up_to(&self, m: u64) -> Run {
        Run {
            moves: self.moves.iter().filter(|l| l.cycle <= m).cloned().collect(),
        }
    }

    /// The same run with every label reversed.
    pub fn flipped(&self) -> Run {
        Run {
            moves: self
                .moves
                .iter()
                .map(|l| Labmove {
                    player: l.player.flip(),
                    ..l.clone()
                })
                .collect(),
        }
    }

    /// Numerals found in labmoves of `player`.
    pub fn numerals_of(&self, player: Player) -> BTreeSet<u64> {
        self.moves
            .iter()
            .filter(|l| l.player == player)
            .map(|l| l.mv.numeral)
            .collect()
    }

    pub fn last_cycle(&self) -> u64 {
        self.moves.last().map_or(0, |l| l.cycle)
    }
}

/// Address blocks of funit `unit` of `formula`.
pub fn funit_address(formula: &Formula, unit: &Funit) -> Result<Vec<Bits>, MoveError> {
    let arity = || MoveError::Arity { unit: unit.clone() };
    if !unit.fits(formula) {
        return Err(arity());
    }
    let mut node = formula;
    let mut branches = unit.branches.iter();
    let mut blocks = Vec::new();
    for &step in unit.position.steps() {
        match node.connective() {
            Connective::And | Connective::Or => blocks.push(Bits::from_index(step as usize, 1)),
            Connective::Rec | Connective::Corec => {
                blocks.push(branches.next().ok_or_else(arity)?.clone())
            }
            Connective::Literal => return Err(arity()),
        }
        node = node.child(step).ok_or_else(arity)?;
    }
    Ok(blocks)
}

/// The funit whose address is `blocks`, walking from the root; `None` if the
/// blocks do not spell the address of any funit.
pub fn funit_of_address(formula: &Formula, blocks: &[Bits]) -> Option<Funit> {
    let mut node = formula;
    let mut unit = UnitRef::root();
    for block in blocks {
        match node.connective() {
            Connective::And | Connective::Or => {
                let step = match block.as_str() {
                    "0" => 0,
                    "1" => 1,
                    _ => return None,
                };
                unit.position = unit.position.child(step);
                node = node.child(step)?;
            }
            Connective::Rec | Connective::Corec => {
                unit.position = unit.position.child(0);
                unit.branches.push(block.clone());
                node = node.child(0)?;
            }
            Connective::Literal => return None,
        }
    }
    Some(unit)
}

/// The politeral funit a move is made in, if the move is legal.
pub fn politeral_of_move(formula: &Formula, mv: &Move) -> Option<Funit> {
    let unit = funit_of_address(formula, &mv.blocks)?;
    formula
        .subformula_at(&unit.position)
        .ok()?
        .is_literal()
        .then_some(unit)
}

pub fn legal_move(formula: &Formula, mv: &Move) -> bool {
    politeral_of_move(formula, mv).is_some()
}

/// Funits hosting some move of `run`: each move's politeral funit together
/// with all of its superfunits.
pub fn active_funits(formula: &Formula, run: &Run) -> Result<BTreeSet<Funit>, MoveError> {
    let mut out = BTreeSet::new();
    for l in run.moves() {
        let unit =
            politeral_of_move(formula, &l.mv).ok_or_else(|| MoveError::Illegal(l.mv.clone()))?;
        out.extend(unit.ancestors(formula));
        out.insert(unit);
    }
    Ok(out)
}

/// Greatest height of an active funit, `None` when nothing is active.
pub fn max_active_height(formula: &Formula, run: &Run) -> Result<Option<usize>, MoveError> {
    Ok(active_funits(formula, run)?.iter().map(UnitRef::height).max())
}

/// The prompts of position `run`, sorted by serialized address.
///
/// The prompt height is the least number above every active height, i.e.
/// `0` for a position with no active funits.
pub fn prompts(formula: &Formula, run: &Run) -> Result<Vec<Funit>, MoveError> {
    let h = max_active_height(formula, run)?.map_or(0, |m| m + 1);
    let mut out: Vec<(String, Funit)> = Vec::new();
    for pos in formula.politerals() {
        let depth = formula.modal_depth(&pos).expect("politeral position");
        let per_coordinate = Bits::all_of_length(h);
        let mut tuples: Vec<Vec<Bits>> = vec![Vec::new()];
        for _ in 0..depth {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    per_coordinate.iter().map(move |b| {
                        let mut t = t.clone();
                        t.push(b.clone());
                        t
                    })
                })
                .collect();
        }
        for branches in tuples {
            let unit = UnitRef::new(pos.clone(), branches);
            let addr = address_string(&funit_address(formula, &unit)?);
            out.push((addr, unit));
        }
    }
    out.sort();
    Ok(out.into_iter().map(|(_, u)| u).collect())
}

/// Number of prompts at height `h` without materializing them.
pub fn prompt_count(formula: &Formula, h: usize) -> u128 {
    formula
        .politerals()
        .iter()
        .map(|p| {
            let d = formula.modal_depth(p).unwrap() as u32;
            1u128.checked_shl(h as u32 * d).unwrap_or(u128::MAX)
        })
        .fold(0u128, u128::saturating_add)
}

/// Projection of `run` on `target`: at a `∧`/`∨` child keep the moves whose
/// next block is that child's bit, at a `⫰`/`⫯` branch `y` keep the moves
/// whose next block is a prefix of `y`; the block is stripped either way.
pub fn project(run: &Run, formula: &Formula, target: &UnitRef) -> Result<Run, MoveError> {
    let arity = || MoveError::Arity {
        unit: target.clone(),
    };
    if !target.fits(formula) {
        return Err(arity());
    }
    let mut current: Vec<Labmove> = run.moves().to_vec();
    let mut node = formula;
    let mut branches = target.branches.iter();
    for &step in target.position.steps() {
        let keep: Box<dyn Fn(&Bits) -> bool> = match node.connective() {
            Connective::And | Connective::Or => {
                let bit = Bits::from_index(step as usize, 1);
                Box::new(move |b: &Bits| *b == bit)
            }
            Connective::Rec | Connective::Corec => {
                let y = branches.next().ok_or_else(arity)?.clone();
                Box::new(move |b: &Bits| b.is_prefix_of(&y))
            }
            Connective::Literal => return Err(arity()),
        };
        current = current
            .into_iter()
            .filter(|l| l.mv.blocks.first().is_some_and(|b| keep(b)))
            .map(|mut l| {
                l.mv.blocks.remove(0);
                l
            })
            .collect();
        node = node.child(step).ok_or_else(arity)?;
    }
    Ok(Run { moves: current })
}

/// Whether `player` has numerically made `numeral` inside funit `unit` by
/// cycle `m` (`None` means the whole run).
pub fn made_in(
    run: &Run,
    formula: &Formula,
    player: Player,
    numeral: u64,
    unit: &Funit,
    m: Option<u64>,
) -> bool {
    let Ok(addr) = funit_address(formula, unit) else {
        return false;
    };
    run.moves().iter().any(|l| {
        m.is_none_or(|m| l.cycle <= m)
            && l.player == player
            && l.mv.numeral == numeral
            && l.mv.blocks.starts_with(&addr)
    })
}
