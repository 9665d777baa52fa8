//! Line-oriented text forms.
//!
//! A cirquent is one line, `<slots> | <undergroups> | <overgroups>`:
//!
//! ```text
//! ~P ; #?~P ; P | {0,1,2} | {0,1,2}=master {0,2}=1@
//! ```
//!
//! Slots are separated by ` ; ` and a leading `#` marks a checked slot.
//! The line is split at its last two ` | ` separators, so formulas may use
//! `|`. A derivation file holds an optional `PROOF <formula>` header and then
//! alternating `CIRQUENT <line>` and `RULE <name> <params>` lines from the
//! premise end to the conclusion end.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{Annotation, Cirquent, Derivation, GroupKind, Overgroup, Rule, Slot};
use crate::formula::{parse_formula, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct TextError {
    pub line: usize,
    pub message: String,
}

fn err(message: impl Into<String>) -> TextError {
    TextError {
        line: 0,
        message: message.into(),
    }
}

fn write_set(s: &BTreeSet<usize>) -> String {
    let items: Vec<String> = s.iter().map(usize::to_string).collect();
    format!("{{{}}}", items.join(","))
}

fn parse_set(s: &str) -> Result<BTreeSet<usize>, TextError> {
    let inner = s
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| err(format!("expected {{...}}, found {s:?}")))?;
    if inner.is_empty() {
        return Ok(BTreeSet::new());
    }
    let mut out = BTreeSet::new();
    for item in inner.split(',') {
        let n: usize = item
            .parse()
            .map_err(|_| err(format!("bad index {item:?}")))?;
        if n.to_string() != item || !out.insert(n) {
            return Err(err(format!("non-canonical set {s:?}")));
        }
    }
    Ok(out)
}

fn parse_annotation(s: &str) -> Result<Annotation, TextError> {
    match s {
        "master" => Ok(Annotation::Master),
        "none" => Ok(Annotation::None),
        unit => unit
            .parse()
            .map(Annotation::Label)
            .map_err(|e| err(format!("{e}"))),
    }
}

pub fn write_cirquent(c: &Cirquent) -> String {
    let slots: Vec<String> = c
        .slots
        .iter()
        .map(|s| format!("{}{}", if s.checked { "#" } else { "" }, s.formula))
        .collect();
    let under: Vec<String> = c.undergroups.iter().map(write_set).collect();
    let over: Vec<String> = c
        .overgroups
        .iter()
        .map(|o| format!("{}={}", write_set(&o.members), o.annotation))
        .collect();
    format!("{} | {} | {}", slots.join(" ; "), under.join(" "), over.join(" "))
}

pub fn parse_cirquent(line: &str) -> Result<Cirquent, TextError> {
    let mut parts = line.rsplitn(3, " | ");
    let over = parts.next().unwrap_or("");
    let under = parts
        .next()
        .ok_or_else(|| err("expected `slots | undergroups | overgroups`"))?;
    let slots_text = parts
        .next()
        .ok_or_else(|| err("expected `slots | undergroups | overgroups`"))?;
    let mut slots = Vec::new();
    if !slots_text.is_empty() {
        for item in slots_text.split(" ; ") {
            let (checked, body) = match item.strip_prefix('#') {
                Some(rest) => (true, rest),
                None => (false, item),
            };
            let formula: Formula = parse_formula(body).map_err(|e| err(format!("{e}")))?;
            slots.push(Slot { formula, checked });
        }
    }
    let undergroups = under
        .split(' ')
        .filter(|s| !s.is_empty())
        .map(parse_set)
        .collect::<Result<Vec<_>, _>>()?;
    let overgroups = over
        .split(' ')
        .filter(|s| !s.is_empty())
        .map(|tok| {
            let (set, ann) = tok
                .split_once('=')
                .ok_or_else(|| err(format!("overgroup {tok:?} lacks an annotation")))?;
            Ok(Overgroup {
                members: parse_set(set)?,
                annotation: parse_annotation(ann)?,
            })
        })
        .collect::<Result<Vec<_>, TextError>>()?;
    Ok(Cirquent {
        slots,
        undergroups,
        overgroups,
    })
}

/// `<name> <params>` with the rule name first.
pub fn write_rule(r: &Rule) -> String {
    let params = match r {
        Rule::Exchange { kind, index } => format!("{kind} {index}"),
        Rule::Weakening { slot, undergroup } => format!("{slot} {undergroup}"),
        Rule::Contraction { slot }
        | Rule::ConjunctionIntroduction { slot }
        | Rule::DisjunctionIntroduction { slot } => slot.to_string(),
        Rule::UndergroupDuplication { index } | Rule::OvergroupDuplication { index } => {
            index.to_string()
        }
        Rule::Merging {
            overgroup,
            first,
            second,
        } => format!("{overgroup} {} {}", write_set(first), write_set(second)),
        Rule::RecurrenceIntroduction { slot, annotation } => format!("{slot} {annotation}"),
        Rule::CorecurrenceIntroduction { slot, overgroups } => {
            format!("{slot} {}", write_set(overgroups))
        }
    };
    format!("{} {params}", r.name())
}

pub fn parse_rule(text: &str) -> Result<Rule, TextError> {
    let fields: Vec<&str> = text.split(' ').collect();
    let name = fields[0];
    let args = &fields[1..];
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(err(format!("{name} takes {n} parameters")))
        }
    };
    let num = |s: &str| -> Result<usize, TextError> {
        let n: usize = s.parse().map_err(|_| err(format!("bad index {s:?}")))?;
        if n.to_string() == s {
            Ok(n)
        } else {
            Err(err(format!("non-canonical index {s:?}")))
        }
    };
    let rule = match name {
        "Exchange" => {
            arity(2)?;
            let kind = match args[0] {
                "slots" => GroupKind::Slots,
                "undergroups" => GroupKind::Undergroups,
                "overgroups" => GroupKind::Overgroups,
                other => return Err(err(format!("unknown exchange kind {other:?}"))),
            };
            Rule::Exchange {
                kind,
                index: num(args[1])?,
            }
        }
        "Weakening" => {
            arity(2)?;
            Rule::Weakening {
                slot: num(args[0])?,
                undergroup: num(args[1])?,
            }
        }
        "Contraction" => {
            arity(1)?;
            Rule::Contraction { slot: num(args[0])? }
        }
        "ConjunctionIntroduction" => {
            arity(1)?;
            Rule::ConjunctionIntroduction { slot: num(args[0])? }
        }
        "DisjunctionIntroduction" => {
            arity(1)?;
            Rule::DisjunctionIntroduction { slot: num(args[0])? }
        }
        "UndergroupDuplication" => {
            arity(1)?;
            Rule::UndergroupDuplication {
                index: num(args[0])?,
            }
        }
        "OvergroupDuplication" => {
            arity(1)?;
            Rule::OvergroupDuplication {
                index: num(args[0])?,
            }
        }
        "Merging" => {
            arity(3)?;
            Rule::Merging {
                overgroup: num(args[0])?,
                first: parse_set(args[1])?,
                second: parse_set(args[2])?,
            }
        }
        "RecurrenceIntroduction" => {
            arity(2)?;
            Rule::RecurrenceIntroduction {
                slot: num(args[0])?,
                annotation: parse_annotation(args[1])?,
            }
        }
        "CorecurrenceIntroduction" => {
            arity(2)?;
            Rule::CorecurrenceIntroduction {
                slot: num(args[0])?,
                overgroups: parse_set(args[1])?,
            }
        }
        other => return Err(err(format!("unknown rule {other:?}"))),
    };
    Ok(rule)
}

/// Contents of a derivation file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationFile {
    /// The proved formula, when the file is a proof.
    pub formula: Option<Formula>,
    pub derivation: Derivation,
}

pub fn write_derivation_file(file: &DerivationFile) -> String {
    let mut out = String::new();
    if let Some(f) = &file.formula {
        out.push_str(&format!("PROOF {f}\n"));
    }
    let d = &file.derivation;
    for (i, c) in d.cirquents.iter().enumerate() {
        out.push_str(&format!("CIRQUENT {}\n", write_cirquent(c)));
        if let Some(r) = d.rules.get(i) {
            out.push_str(&format!("RULE {}\n", write_rule(r)));
        }
    }
    out
}

/// Reads a derivation file. Lines must alternate between cirquents and
/// rules, starting and ending with a cirquent.
pub fn parse_derivation_file(text: &str) -> Result<DerivationFile, TextError> {
    let mut formula = None;
    let mut cirquents = Vec::new();
    let mut rules = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let at = |e: TextError| TextError {
            line: i + 1,
            message: e.message,
        };
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = line.split_once(' ').unwrap_or((line, ""));
        match keyword {
            "PROOF" if i == 0 => {
                formula = Some(parse_formula(rest).map_err(|e| at(err(e.to_string())))?)
            }
            "CIRQUENT" if cirquents.len() == rules.len() => {
                cirquents.push(parse_cirquent(rest).map_err(at)?)
            }
            "RULE" if cirquents.len() == rules.len() + 1 => rules.push(parse_rule(rest).map_err(at)?),
            other => return Err(at(err(format!("unexpected {other:?}")))),
        }
    }
    if cirquents.len() != rules.len() + 1 {
        return Err(TextError {
            line: text.lines().count(),
            message: "derivation must end with a cirquent".into(),
        });
    }
    Ok(DerivationFile {
        formula,
        derivation: Derivation { cirquents, rules },
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::{f, set};
    use super::*;

    fn sample() -> Cirquent {
        Cirquent {
            slots: vec![
                Slot::new(f("~P")),
                Slot::checked(f("?~P | Q")),
                Slot::new(f("P")),
            ],
            undergroups: vec![set(&[0, 1, 2])],
            overgroups: vec![
                Overgroup::new([0, 1, 2], Annotation::Master),
                Overgroup::new([0, 2], Annotation::Label("1@".parse().unwrap())),
                Overgroup::new([1], Annotation::None),
            ],
        }
    }

    #[test]
    fn cirquent_line_round_trip() {
        let line = "~P ; #?~P | Q ; P | {0,1,2} | {0,1,2}=master {0,2}=1@ {1}=none";
        assert_eq!(write_cirquent(&sample()), line);
        assert_eq!(parse_cirquent(line).unwrap(), sample());
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(parse_cirquent("P | {0}").is_err());
        assert!(parse_cirquent("P | {0} | {0}").is_err());
        assert!(parse_cirquent("P | {0,0} | {0}=master").is_err());
        assert!(parse_cirquent("P | {01} | {0}=master").is_err());
        assert!(parse_cirquent("P & | {0} | {0}=master").is_err());
        assert!(parse_rule("Weakening 1").is_err());
        assert!(parse_rule("Frobnicate 1").is_err());
        assert!(parse_rule("Exchange columns 1").is_err());
    }

    #[test]
    fn rule_round_trip() {
        let rules = [
            Rule::Exchange {
                kind: GroupKind::Overgroups,
                index: 2,
            },
            Rule::Weakening {
                slot: 1,
                undergroup: 0,
            },
            Rule::Merging {
                overgroup: 0,
                first: set(&[0, 1]),
                second: set(&[2, 3]),
            },
            Rule::RecurrenceIntroduction {
                slot: 0,
                annotation: Annotation::Label("100@0,1".parse().unwrap()),
            },
            Rule::CorecurrenceIntroduction {
                slot: 3,
                overgroups: BTreeSet::new(),
            },
            Rule::OvergroupDuplication { index: 0 },
        ];
        for r in rules {
            let text = write_rule(&r);
            assert_eq!(parse_rule(&text).unwrap(), r, "{text}");
        }
    }

    #[test]
    fn derivation_file_round_trip() {
        let g = f("P | ~P");
        let d = Derivation::from_conclusion(
            Cirquent::initial(&g),
            &[Rule::DisjunctionIntroduction { slot: 0 }],
        )
        .unwrap();
        let file = DerivationFile {
            formula: Some(g),
            derivation: d,
        };
        let text = write_derivation_file(&file);
        assert_eq!(
            text,
            "PROOF P | ~P\nCIRQUENT P ; ~P | {0,1} | {0,1}=master\nRULE DisjunctionIntroduction 0\nCIRQUENT P | ~P | {0} | {0}=master\n"
        );
        let back = parse_derivation_file(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(write_derivation_file(&back), text);
        assert!(parse_derivation_file("RULE Contraction 0\n").is_err());
        assert!(parse_derivation_file("CIRQUENT P | {0} | {0}=master\nRULE Contraction 0\n").is_err());
    }
}
