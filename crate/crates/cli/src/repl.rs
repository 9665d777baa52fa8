//! An adversary typed in by an operator, one line per permission grant.

use std::io::{BufRead, Write};

use cl15_core::formula::Formula;
use cl15_core::game::{legal_move, Adversary, Move, Player, Reply, Run};

/// What one typed line asks for.
///
/// `pass` makes no move and `quit` ends the play. Anything else must be a
/// single legal move.
pub fn interpret(formula: &Formula, line: &str) -> Result<Reply, String> {
    match line.trim() {
        "pass" => Ok(Reply::pass()),
        "quit" => Ok(Reply::Quit),
        "" => Err("type a move, `pass` or `quit`".into()),
        text => {
            let mv: Move = text.parse().map_err(|e| format!("parse error: {e}"))?;
            if legal_move(formula, &mv) {
                Ok(Reply::Moves(vec![mv]))
            } else {
                Err(format!("illegal move {mv}: its address names no politeral"))
            }
        }
    }
}

/// Reads replies from `input` and echoes the counterstrategy's moves and
/// every prompt to `output`. End of input quits.
pub struct Repl<R, W> {
    input: R,
    output: W,
    shown: usize,
}

impl<R: BufRead, W: Write> Repl<R, W> {
    pub fn new(input: R, output: W) -> Repl<R, W> {
        Repl {
            input,
            output,
            shown: 0,
        }
    }

    pub fn into_output(self) -> W {
        self.output
    }
}

impl<R: BufRead, W: Write> Adversary for Repl<R, W> {
    fn on_permission(&mut self, formula: &Formula, position: &Run) -> Reply {
        // Write failures only lose the echo; the play itself goes on.
        for l in &position.moves()[self.shown..] {
            if l.player == Player::Bottom {
                let _ = writeln!(self.output, "  B {} @{}", l.mv, l.cycle);
            }
        }
        self.shown = position.len();
        loop {
            let _ = write!(self.output, "move, pass or quit> ");
            let _ = self.output.flush();
            let mut line = String::new();
            match self.input.read_line(&mut line) {
                Ok(0) | Err(_) => return Reply::Quit,
                Ok(_) => {}
            }
            match interpret(formula, &line) {
                Ok(reply) => {
                    if let Reply::Moves(m) = &reply {
                        self.shown += m.len();
                    }
                    return reply;
                }
                Err(message) => {
                    let _ = writeln!(self.output, "{message}");
                }
            }
        }
    }
}
