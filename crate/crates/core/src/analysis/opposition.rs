//! Opposite politeral units, computed from a run or supplied by hand, and
//! the `RESOLVE` / `PAIR` text formats.
//!
//! A file may hold both kinds of line; each parser skips the other keyword,
//! blank lines and `#` comments.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{AnalysisError, Resolution, TruncUnitTree};
use crate::formula::Formula;
use crate::game::{project, Player, Run};
use crate::unit::{Bits, UnitRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Derived from the numerals of a run.
    Computed,
    /// Read from a file or built by a caller.
    Supplied,
}

/// A symmetric relation between politeral units whose origins are
/// negations of each other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OppositionPairing {
    partners: BTreeMap<UnitRef, BTreeSet<UnitRef>>,
    provenance: Provenance,
}

/// `(atom, positive)` of the literal at `unit`'s position.
fn origin<'f>(f: &'f Formula, unit: &UnitRef) -> Option<(&'f str, bool)> {
    if !unit.fits(f) {
        return None;
    }
    f.subformula_at(&unit.position).ok()?.literal()
}

impl OppositionPairing {
    pub fn empty(provenance: Provenance) -> OppositionPairing {
        OppositionPairing {
            partners: BTreeMap::new(),
            provenance,
        }
    }

    /// Builds a pairing from unordered pairs, checking that each pair joins
    /// politeral units of `f` with negated origins.
    pub fn from_pairs(
        f: &Formula,
        pairs: impl IntoIterator<Item = (UnitRef, UnitRef)>,
        provenance: Provenance,
    ) -> Result<OppositionPairing, AnalysisError> {
        let mut out = OppositionPairing::empty(provenance);
        for (l, m) in pairs {
            match (origin(f, &l), origin(f, &m)) {
                (Some((a, pa)), Some((b, pb))) if a == b && pa != pb => {}
                (None, _) => return Err(AnalysisError::BadPairing(format!("{l} is not a politeral unit"))),
                (_, None) => return Err(AnalysisError::BadPairing(format!("{m} is not a politeral unit"))),
                _ => {
                    return Err(AnalysisError::BadPairing(format!(
                        "origins of {l} and {m} are not negations of each other"
                    )))
                }
            }
            out.insert(l, m);
        }
        Ok(out)
    }

    fn insert(&mut self, l: UnitRef, m: UnitRef) {
        self.partners.entry(l.clone()).or_default().insert(m.clone());
        self.partners.entry(m).or_default().insert(l);
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn partners<'a>(&'a self, unit: &UnitRef) -> impl Iterator<Item = &'a UnitRef> + 'a {
        self.partners.get(unit).into_iter().flatten()
    }

    /// The least partner of `unit`, if any.
    pub fn partner(&self, unit: &UnitRef) -> Option<&UnitRef> {
        self.partners(unit).next()
    }

    pub fn are_paired(&self, l: &UnitRef, m: &UnitRef) -> bool {
        self.partners.get(l).is_some_and(|s| s.contains(m))
    }

    /// No unit has two partners.
    pub fn is_matching(&self) -> bool {
        self.partners.values().all(|s| s.len() <= 1)
    }

    /// Each unordered pair once, smaller unit first.
    pub fn pairs(&self) -> Vec<(UnitRef, UnitRef)> {
        self.partners
            .iter()
            .flat_map(|(l, ms)| ms.iter().filter(move |m| l < *m).map(move |m| (l.clone(), m.clone())))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.pairs().len()
    }

    pub fn is_empty(&self) -> bool {
        self.partners.is_empty()
    }

    /// The pairs whose units both survive in `t`.
    pub fn restrict(&self, t: &TruncUnitTree) -> OppositionPairing {
        let mut out = OppositionPairing::empty(self.provenance);
        for (l, m) in self.pairs() {
            if t.contains(&l) && t.contains(&m) {
                out.insert(l, m);
            }
        }
        out
    }
}

/// Numerals `(⊤, ⊥)` made inside politeral unit `unit` during `run`.
pub fn numerals_in(
    run: &Run,
    f: &Formula,
    unit: &UnitRef,
) -> Result<(BTreeSet<u64>, BTreeSet<u64>), AnalysisError> {
    let p = project(run, f, unit)?;
    Ok((p.numerals_of(Player::Top), p.numerals_of(Player::Bottom)))
}

/// All opposite pairs among the politeral units of `t`: negated origins,
/// swapped numeral sets and both `⊥` sets nonempty.
pub fn opposite_pairs(t: &TruncUnitTree, run: &Run) -> Result<OppositionPairing, AnalysisError> {
    type Key = (String, BTreeSet<u64>, BTreeSet<u64>);
    let f = t.formula();
    let mut positive: HashMap<Key, Vec<UnitRef>> = HashMap::new();
    let mut negative: Vec<(Key, UnitRef)> = Vec::new();
    for id in t.politeral_ids() {
        let unit = t.unit(id);
        let (atom, pos) = origin(f, unit).expect("politeral node");
        let (top, bottom) = numerals_in(run, f, unit)?;
        if pos {
            if !bottom.is_empty() {
                positive.entry((atom.to_string(), top, bottom)).or_default().push(unit.clone());
            }
        } else if !bottom.is_empty() {
            negative.push(((atom.to_string(), bottom, top), unit.clone()));
        }
    }
    let mut out = OppositionPairing::empty(Provenance::Computed);
    for (key, m) in negative {
        for l in positive.get(&key).into_iter().flatten() {
            out.insert(l.clone(), m.clone());
        }
    }
    Ok(out)
}

pub fn write_resolution(r: &Resolution) -> String {
    r.iter()
        .map(|(u, b)| format!("RESOLVE {u} {}\n", b.token()))
        .collect()
}

pub fn write_pairing(p: &OppositionPairing) -> String {
    p.pairs()
        .iter()
        .map(|(l, m)| format!("PAIR {l} {m}\n"))
        .collect()
}

fn records<'a>(
    text: &'a str,
    keyword: &'static str,
) -> impl Iterator<Item = Result<(usize, String, String), AnalysisError>> + 'a {
    text.lines().enumerate().filter_map(move |(i, raw)| {
        let line = raw.trim();
        let mut fields = line.split_whitespace();
        let head = fields.next()?;
        if head.starts_with('#') || (head != keyword && matches!(head, "RESOLVE" | "PAIR")) {
            return None;
        }
        let err = |message: String| AnalysisError::Syntax { line: i + 1, message };
        if head != keyword {
            return Some(Err(err(format!("unknown keyword {head:?}"))));
        }
        let rest: Vec<&str> = fields.collect();
        match rest.as_slice() {
            [a, b] => Some(Ok((i + 1, a.to_string(), b.to_string()))),
            _ => Some(Err(err(format!("{keyword} takes two fields")))),
        }
    })
}

fn unit_field(line: usize, s: &str) -> Result<UnitRef, AnalysisError> {
    s.parse().map_err(|e| AnalysisError::Syntax {
        line,
        message: format!("{e}"),
    })
}

pub fn parse_resolution(text: &str) -> Result<Resolution, AnalysisError> {
    let mut r = Resolution::new();
    for rec in records(text, "RESOLVE") {
        let (line, unit, bits) = rec?;
        let unit = unit_field(line, &unit)?;
        let bits = Bits::from_token(&bits).map_err(|e| AnalysisError::Syntax {
            line,
            message: format!("{e}"),
        })?;
        if r.insert(unit.clone(), bits).is_some() {
            return Err(AnalysisError::Syntax {
                line,
                message: format!("{unit} resolved twice"),
            });
        }
    }
    Ok(r)
}

pub fn parse_pairing(text: &str, f: &Formula) -> Result<OppositionPairing, AnalysisError> {
    let mut pairs = Vec::new();
    for rec in records(text, "PAIR") {
        let (line, l, m) = rec?;
        pairs.push((unit_field(line, &l)?, unit_field(line, &m)?));
    }
    OppositionPairing::from_pairs(f, pairs, Provenance::Supplied)
}
