//! Transcript files: one labmove per line, `T <move> @<cycle>` or
//! `B <move> @<cycle>`. The cycle tag is optional on input; a missing tag
//! continues the sequence from the previous line.

use thiserror::Error;

use super::{Move, Player, Run};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("transcript line {line}: {message}")]
pub struct TranscriptError {
    pub line: usize,
    pub message: String,
}

pub fn write_transcript(run: &Run) -> String {
    run.moves()
        .iter()
        .map(|l| format!("{} {} @{}\n", l.player, l.mv, l.cycle))
        .collect()
}

pub fn parse_transcript(text: &str) -> Result<Run, TranscriptError> {
    let mut run = Run::new();
    for (i, raw) in text.lines().enumerate() {
        let err = |message: String| TranscriptError {
            line: i + 1,
            message,
        };
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (body, tag) = match line.split_once('@') {
            Some((b, t)) => (b.trim(), Some(t.trim())),
            None => (line, None),
        };
        let mut parts = body.split_whitespace();
        let player = match parts.next() {
            Some("T") => Player::Top,
            Some("B") => Player::Bottom,
            other => return Err(err(format!("expected T or B, found {other:?}"))),
        };
        let mv: Move = parts
            .next()
            .ok_or_else(|| err("missing move".into()))?
            .parse()
            .map_err(|e| err(format!("{e}")))?;
        if parts.next().is_some() {
            return Err(err("trailing fields".into()));
        }
        match tag {
            None => run.push(player, mv),
            Some(t) => {
                let cycle: u64 = t.parse().map_err(|_| err(format!("bad cycle tag {t:?}")))?;
                run.push_tagged(player, mv, cycle)
                    .ok_or_else(|| err("cycle tags must strictly increase".into()))?;
            }
        }
    }
    Ok(run)
}
