//! The `--report` summary: one `key: value` line per fact, in a fixed order.

use std::fmt::Display;

use cl15_core::derivation::Stage;

/// Pipeline stages as reported, preceded by the play that feeds them.
const STAGES: [(&str, Option<Stage>); 10] = [
    ("play", None),
    ("tree", Some(Stage::Tree)),
    ("pairing", Some(Stage::Pairing)),
    ("image", Some(Stage::Image)),
    ("resolution", Some(Stage::Resolution)),
    ("finitize", Some(Stage::Finitize)),
    ("domination", Some(Stage::Domination)),
    ("derivation", Some(Stage::Derivation)),
    ("endgame", Some(Stage::Endgame)),
    ("check", Some(Stage::Check)),
];

/// Where an attempt ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reached {
    /// Every stage ran.
    All,
    /// The play (or reading its transcript) failed.
    FailedPlay,
    FailedAt(Stage),
}

#[derive(Debug, Default)]
pub struct Report {
    lines: Vec<String>,
}

impl Report {
    pub fn set(&mut self, key: &str, value: impl Display) {
        self.lines.push(format!("{key}: {value}"));
    }

    /// `ok`, `failed` or `skipped` for every stage; `off` for stages the
    /// options disable. Without a play, `play` reads `none`.
    pub fn stages(&mut self, reached: Reached, played: bool, minimize: bool) {
        let failed = match reached {
            Reached::All => None,
            Reached::FailedPlay => Some(0),
            Reached::FailedAt(s) => STAGES.iter().position(|(_, st)| *st == Some(s)),
        };
        for (i, (name, _)) in STAGES.iter().enumerate() {
            let state = match failed {
                Some(f) if i == f => "failed",
                Some(f) if i > f => "skipped",
                _ if i == 0 && !played => "none",
                _ if *name == "finitize" && !minimize => "off",
                _ => "ok",
            };
            self.set(&format!("stage.{name}"), state);
        }
    }

    pub fn render(&self) -> String {
        self.lines.iter().map(|l| format!("{l}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stages_after_a_failure_are_skipped() {
        let mut r = Report::default();
        r.stages(Reached::FailedAt(Stage::Image), true, false);
        let text = r.render();
        assert!(text.starts_with("stage.play: ok\nstage.tree: ok\nstage.pairing: ok\nstage.image: failed\n"));
        assert!(text.ends_with("stage.check: skipped\n"));
    }

    #[test]
    fn finitize_is_off_unless_minimizing() {
        let mut r = Report::default();
        r.stages(Reached::All, false, false);
        let text = r.render();
        assert!(text.contains("stage.play: none\n"));
        assert!(text.contains("stage.finitize: off\n"));
        assert!(text.contains("stage.check: ok\n"));
    }
}
