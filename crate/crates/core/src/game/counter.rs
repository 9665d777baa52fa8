//! The counterstrategy and the scheduler that plays it against an adversary.
//!
//! One iteration is one full ROUTINE pass: the prompt list of the current
//! position is computed once, a fresh numeral (the least one not yet played
//! by anybody) is made in each prompt in order, and then the adversary is
//! granted permission exactly once.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{legal_move, prompt_count, prompts, MoveError, Player, Reply, Run};
use crate::formula::Formula;

pub const DEFAULT_MOVE_BUDGET: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("adversary made the illegal move {mv} after {} labmoves", partial.len())]
    IllegalAdversaryMove { mv: String, partial: Run },
    #[error("move budget of {limit} exceeded (would need {needed})")]
    BudgetExceeded { limit: usize, needed: u128 },
    #[error(transparent)]
    Move(#[from] MoveError),
}

/// A strategy consulted on every permission grant.
///
/// `position` is the run so far from the adversary's side: its own moves are
/// labeled `⊤`, the counterstrategy's `⊥`. The reply is the finite batch of
/// moves made before the next grant; an empty batch is a pass.
pub trait Adversary {
    fn on_permission(&mut self, formula: &Formula, position: &Run) -> Reply;
}

impl<A: Adversary + ?Sized> Adversary for &mut A {
    fn on_permission(&mut self, formula: &Formula, position: &Run) -> Reply {
        (**self).on_permission(formula, position)
    }
}

impl<A: Adversary + ?Sized> Adversary for Box<A> {
    fn on_permission(&mut self, formula: &Formula, position: &Run) -> Reply {
        (**self).on_permission(formula, position)
    }
}

/// Outcome of a finite-horizon play.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchTranscripts {
    /// The run on the counterstrategy's own tape: its moves labeled `⊤`.
    pub epm: Run,
    /// The run spelled by the adversary: the counterstrategy's moves labeled `⊥`.
    pub hpm: Run,
    pub grants: usize,
    /// The adversary ended the play early.
    pub quit: bool,
}

struct Numerals {
    used: BTreeSet<u64>,
    next: u64,
}

impl Numerals {
    fn note(&mut self, n: u64) {
        self.used.insert(n);
    }

    /// Smallest natural number never played.
    fn fresh(&mut self) -> u64 {
        while self.used.contains(&self.next) {
            self.next += 1;
        }
        let n = self.next;
        self.used.insert(n);
        n
    }
}

/// Plays `iterations` ROUTINE passes against `adversary` and returns both
/// views of the run.
pub fn play_match<A: Adversary>(
    formula: &Formula,
    mut adversary: A,
    iterations: usize,
    budget: usize,
) -> Result<MatchTranscripts, GameError> {
    let mut run = Run::new();
    let mut numerals = Numerals {
        used: BTreeSet::new(),
        next: 0,
    };
    let mut grants = 0;
    let mut quit = false;
    for _ in 0..iterations {
        let h = super::max_active_height(formula, &run)?.map_or(0, |m| m + 1);
        let needed = run.len() as u128 + prompt_count(formula, h);
        if needed > budget as u128 {
            return Err(GameError::BudgetExceeded {
                limit: budget,
                needed,
            });
        }
        for prompt in prompts(formula, &run)? {
            let blocks = super::funit_address(formula, &prompt)?;
            let n = numerals.fresh();
            run.push(Player::Bottom, super::Move::new(blocks, n));
        }
        grants += 1;
        match adversary.on_permission(formula, &run) {
            Reply::Quit => {
                quit = true;
                break;
            }
            Reply::Moves(batch) => {
                for mv in batch {
                    if !legal_move(formula, &mv) {
                        return Err(GameError::IllegalAdversaryMove {
                            mv: mv.to_string(),
                            partial: run,
                        });
                    }
                    numerals.note(mv.numeral);
                    run.push(Player::Top, mv);
                }
                if run.len() > budget {
                    return Err(GameError::BudgetExceeded {
                        limit: budget,
                        needed: run.len() as u128,
                    });
                }
            }
        }
    }
    Ok(MatchTranscripts {
        epm: run.flipped(),
        hpm: run,
        grants,
        quit,
    })
}

/// The run cospelled by the counterstrategy: its moves labeled `⊥`, the
/// adversary's `⊤`.
pub fn run_counterstrategy<A: Adversary>(
    formula: &Formula,
    adversary: A,
    iterations: usize,
    budget: usize,
) -> Result<Run, GameError> {
    play_match(formula, adversary, iterations, budget).map(|t| t.hpm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::game::{Copycat, Move, Scripted, Silent};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn moves(run: &Run) -> Vec<String> {
        run.moves()
            .iter()
            .map(|l| format!("{}{}", l.player, l.mv))
            .collect()
    }

    #[test]
    fn silent_counterstrategy_runs() {
        let g = f("?~P | !P");
        let one = run_counterstrategy(&g, Silent, 1, DEFAULT_MOVE_BUDGET).unwrap();
        assert_eq!(moves(&one), ["B0..0", "B1..1"]);
        let two = run_counterstrategy(&g, Silent, 2, DEFAULT_MOVE_BUDGET).unwrap();
        assert_eq!(
            moves(&two),
            ["B0..0", "B1..1", "B0.0.2", "B0.1.3", "B1.0.4", "B1.1.5"]
        );
        let p = run_counterstrategy(&f("P"), Silent, 1, DEFAULT_MOVE_BUDGET).unwrap();
        assert_eq!(moves(&p), ["B0"]);
        let none = run_counterstrategy(&g, Silent, 0, DEFAULT_MOVE_BUDGET).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn copycat_mirrors_each_batch() {
        let g = f("?~P | !P");
        let t = play_match(&g, Copycat::new(&g), 2, DEFAULT_MOVE_BUDGET).unwrap();
        assert_eq!(
            moves(&t.hpm),
            [
                "B0..0", "B1..1", "T1..0", "T0..1", "B0.0.2", "B0.1.3", "B1.0.4", "B1.1.5",
                "T1.0.2", "T1.1.3", "T0.0.4", "T0.1.5"
            ]
        );
        assert_eq!(t.epm, t.hpm.flipped());
        assert_eq!(t.grants, 2);
    }

    #[test]
    fn scripted_replay_reproduces_transcript() {
        let g = f("?~P | !P");
        let stored = run_counterstrategy(&g, Copycat::new(&g), 3, DEFAULT_MOVE_BUDGET).unwrap();
        let replay =
            run_counterstrategy(&g, Scripted::from_transcript(&stored), 3, DEFAULT_MOVE_BUDGET)
                .unwrap();
        assert_eq!(replay, stored);
    }

    #[test]
    fn illegal_adversary_move_halts() {
        let g = f("?~P | !P");
        let bad = Scripted::from_batches(vec![vec!["9".parse::<Move>().unwrap()]]);
        let err = run_counterstrategy(&g, bad, 3, DEFAULT_MOVE_BUDGET).unwrap_err();
        match err {
            GameError::IllegalAdversaryMove { mv, partial } => {
                assert_eq!(mv, "9");
                assert_eq!(partial.len(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn budget_is_enforced() {
        let g = f("?~P | !P");
        let err = run_counterstrategy(&g, Silent, 4, 10).unwrap_err();
        assert!(matches!(err, GameError::BudgetExceeded { limit: 10, .. }));
    }

    #[test]
    fn fresh_numerals_skip_adversary_numerals() {
        let g = f("P & Q");
        let script = Scripted::from_batches(vec![vec!["0.2".parse().unwrap()]]);
        let run = run_counterstrategy(&g, script, 2, DEFAULT_MOVE_BUDGET).unwrap();
        assert_eq!(moves(&run), ["B0.0", "B1.1", "T0.2", "B0.3", "B1.4"]);
    }
}
