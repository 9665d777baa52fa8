//! Cirquents, the ten CL15 rules read bottom-up, and a derivation checker.
//!
//! A cirquent is a sequence of oformula slots together with undergroups and
//! overgroups (sets of slot indices). Rules are stored as instances over the
//! conclusion; [`apply_rule`] produces the premise.

mod rules;
mod text;

pub use rules::{apply_rule, GroupKind, Rule};
pub use text::{
    parse_cirquent, parse_derivation_file, parse_rule, write_cirquent, write_derivation_file,
    write_rule, DerivationFile, TextError,
};

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::formula::{Connective, Formula};
use crate::unit::UnitRef;

/// A slot: an oformula, possibly check-marked.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Slot {
    pub formula: Formula,
    pub checked: bool,
}

impl Slot {
    pub fn new(formula: Formula) -> Slot {
        Slot {
            formula,
            checked: false,
        }
    }

    pub fn checked(formula: Formula) -> Slot {
        Slot {
            formula,
            checked: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Annotation {
    Master,
    Label(UnitRef),
    None,
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Annotation::Master => f.write_str("master"),
            Annotation::None => f.write_str("none"),
            Annotation::Label(u) => write!(f, "{u}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Overgroup {
    pub members: BTreeSet<usize>,
    pub annotation: Annotation,
}

impl Overgroup {
    pub fn new(members: impl IntoIterator<Item = usize>, annotation: Annotation) -> Overgroup {
        Overgroup {
            members: members.into_iter().collect(),
            annotation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cirquent {
    pub slots: Vec<Slot>,
    pub undergroups: Vec<BTreeSet<usize>>,
    pub overgroups: Vec<Overgroup>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CirquentError {
    #[error("{} {group} refers to missing oformula {slot}", .kind.singular())]
    SlotOutOfRange {
        kind: GroupKind,
        group: usize,
        slot: usize,
    },
    #[error("{} {index} is empty", .kind.singular())]
    EmptyGroup { kind: GroupKind, index: usize },
    #[error("oformula {0} lies outside every undergroup")]
    OutsideUndergroups(usize),
    #[error("oformula {0} lies outside every overgroup")]
    OutsideOvergroups(usize),
    #[error("checked oformula {0} is not a corecurrence")]
    CheckedNotCorecurrence(usize),
    #[error("{} index {index} out of range", .kind.singular())]
    IndexOutOfRange { kind: GroupKind, index: usize },
    #[error("{rule} is not applicable: {reason}")]
    Inapplicable { rule: &'static str, reason: String },
}

impl Cirquent {
    /// The cirquent with the single oformula `f` in one undergroup and the
    /// master overgroup.
    pub fn initial(f: &Formula) -> Cirquent {
        Cirquent {
            slots: vec![Slot::new(f.clone())],
            undergroups: vec![BTreeSet::from([0])],
            overgroups: vec![Overgroup::new([0], Annotation::Master)],
        }
    }

    pub fn validate(&self) -> Result<(), CirquentError> {
        let n = self.slots.len();
        let groups = self
            .undergroups
            .iter()
            .map(|g| (GroupKind::Undergroups, g))
            .chain(
                self.overgroups
                    .iter()
                    .map(|o| (GroupKind::Overgroups, &o.members)),
            );
        let mut under = vec![false; n];
        let mut over = vec![false; n];
        let mut counters = [0usize; 2];
        for (kind, members) in groups {
            let k = (kind == GroupKind::Overgroups) as usize;
            let index = counters[k];
            counters[k] += 1;
            if members.is_empty() {
                return Err(CirquentError::EmptyGroup { kind, index });
            }
            for &s in members {
                if s >= n {
                    return Err(CirquentError::SlotOutOfRange {
                        kind,
                        group: index,
                        slot: s,
                    });
                }
                if k == 0 {
                    under[s] = true;
                } else {
                    over[s] = true;
                }
            }
        }
        if let Some(s) = under.iter().position(|&b| !b) {
            return Err(CirquentError::OutsideUndergroups(s));
        }
        if let Some(s) = over.iter().position(|&b| !b) {
            return Err(CirquentError::OutsideOvergroups(s));
        }
        if let Some(s) = self
            .slots
            .iter()
            .position(|s| s.checked && s.formula.connective() != Connective::Corec)
        {
            return Err(CirquentError::CheckedNotCorecurrence(s));
        }
        Ok(())
    }

    /// Equality up to the order of undergroups and of overgroups, ignoring
    /// check marks.
    pub fn equivalent(&self, other: &Cirquent) -> bool {
        fn sorted<T: Ord + Clone>(v: &[T]) -> Vec<T> {
            let mut v = v.to_vec();
            v.sort();
            v
        }
        self.slots.len() == other.slots.len()
            && self
                .slots
                .iter()
                .zip(&other.slots)
                .all(|(a, b)| a.formula == b.formula)
            && sorted(&self.undergroups) == sorted(&other.undergroups)
            && sorted(&self.overgroups) == sorted(&other.overgroups)
    }

    /// Overgroup indices containing `slot`.
    pub fn overgroups_of(&self, slot: usize) -> BTreeSet<usize> {
        (0..self.overgroups.len())
            .filter(|&i| self.overgroups[i].members.contains(&slot))
            .collect()
    }

    /// Undergroup indices containing `slot`.
    pub fn undergroups_of(&self, slot: usize) -> BTreeSet<usize> {
        (0..self.undergroups.len())
            .filter(|&i| self.undergroups[i].contains(&slot))
            .collect()
    }
}

pub fn initial_cirquent(f: &Formula) -> Cirquent {
    Cirquent::initial(f)
}

/// Terminal shape: every group is a two-element set `{F, ¬F}`, no member is
/// shared between two undergroups or between two overgroups, and each slot's
/// undergroup and overgroup coincide.
pub fn is_axiom(c: &Cirquent) -> bool {
    if c.validate().is_err() {
        return false;
    }
    let is_pair = |g: &BTreeSet<usize>| {
        let v: Vec<usize> = g.iter().copied().collect();
        v.len() == 2 && c.slots[v[0]].formula.negate() == c.slots[v[1]].formula
    };
    if !c.undergroups.iter().all(is_pair) || !c.overgroups.iter().all(|o| is_pair(&o.members)) {
        return false;
    }
    (0..c.slots.len()).all(|s| {
        let u = c.undergroups_of(s);
        let o = c.overgroups_of(s);
        u.len() == 1
            && o.len() == 1
            && c.undergroups[*u.first().unwrap()] == c.overgroups[*o.first().unwrap()].members
    })
}

/// Cirquents from the premise end to the conclusion end; `rules[i]` leads
/// from `cirquents[i + 1]` (its conclusion) up to `cirquents[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub cirquents: Vec<Cirquent>,
    pub rules: Vec<Rule>,
}

impl Derivation {
    /// A derivation of length zero.
    pub fn single(c: Cirquent) -> Derivation {
        Derivation {
            cirquents: vec![c],
            rules: Vec::new(),
        }
    }

    pub fn premise(&self) -> Option<&Cirquent> {
        self.cirquents.first()
    }

    pub fn conclusion(&self) -> Option<&Cirquent> {
        self.cirquents.last()
    }

    /// Builds a derivation by applying `rules` bottom-up from `conclusion`.
    pub fn from_conclusion(conclusion: Cirquent, rules: &[Rule]) -> Result<Derivation, CirquentError> {
        let mut cs = vec![conclusion];
        for r in rules {
            let next = apply_rule(cs.last().unwrap(), r)?;
            cs.push(next);
        }
        cs.reverse();
        let mut rules = rules.to_vec();
        rules.reverse();
        Ok(Derivation {
            cirquents: cs,
            rules,
        })
    }

    /// `self` (ending in some `D`) followed by `upper`, a derivation whose
    /// conclusion is `D`, yields a derivation from `upper`'s premise.
    pub fn stack_on(mut self, upper: Derivation) -> Derivation {
        let mut cirquents = upper.cirquents;
        cirquents.pop();
        cirquents.extend(self.cirquents.drain(..));
        let mut rules = upper.rules;
        rules.extend(self.rules);
        Derivation { cirquents, rules }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}{reason}", step.map(|s| format!("step {s}: ")).unwrap_or_default())]
pub struct Violation {
    /// Index of the offending rule, if the problem is local to one step.
    pub step: Option<usize>,
    pub reason: String,
}

impl Violation {
    fn global(reason: impl Into<String>) -> Violation {
        Violation {
            step: None,
            reason: reason.into(),
        }
    }
}

/// Checks that `rule` leads from `conclusion` to `premise`.
pub fn check_step(premise: &Cirquent, conclusion: &Cirquent, rule: &Rule) -> Result<(), String> {
    conclusion
        .validate()
        .map_err(|e| format!("conclusion: {e}"))?;
    premise.validate().map_err(|e| format!("premise: {e}"))?;
    let expected = apply_rule(conclusion, rule).map_err(|e| e.to_string())?;
    if expected.equivalent(premise) {
        Ok(())
    } else {
        Err(format!(
            "{} yields `{}`, found `{}`",
            rule.name(),
            write_cirquent(&expected),
            write_cirquent(premise)
        ))
    }
}

pub fn check_derivation(d: &Derivation, from: &Cirquent, to: &Cirquent) -> Result<(), Violation> {
    if d.cirquents.len() != d.rules.len() + 1 {
        return Err(Violation::global(format!(
            "{} cirquents for {} rules",
            d.cirquents.len(),
            d.rules.len()
        )));
    }
    if !d.cirquents[0].equivalent(from) {
        return Err(Violation::global("premise end does not match"));
    }
    if !d.cirquents.last().unwrap().equivalent(to) {
        return Err(Violation::global("conclusion end does not match"));
    }
    for (i, r) in d.rules.iter().enumerate() {
        check_step(&d.cirquents[i], &d.cirquents[i + 1], r)
            .map_err(|reason| Violation { step: Some(i), reason })?;
    }
    Ok(())
}

/// A derivation of the initial cirquent of `f` from an axiom.
pub fn check_proof(d: &Derivation, f: &Formula) -> Result<(), Violation> {
    let premise = d
        .premise()
        .ok_or_else(|| Violation::global("empty derivation"))?;
    if !is_axiom(premise) {
        return Err(Violation::global("premise end is not an axiom"));
    }
    check_derivation(d, &premise.clone(), &Cirquent::initial(f))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::formula::parse_formula;

    pub(crate) fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    pub(crate) fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    fn pair_cirquent() -> Cirquent {
        Cirquent {
            slots: vec![Slot::new(f("P")), Slot::new(f("~P"))],
            undergroups: vec![set(&[0, 1])],
            overgroups: vec![Overgroup::new([0, 1], Annotation::Master)],
        }
    }

    #[test]
    fn initial_shape() {
        let c = initial_cirquent(&f("?~P | !P"));
        assert_eq!(c.slots.len(), 1);
        assert_eq!(c.undergroups, vec![set(&[0])]);
        assert_eq!(c.overgroups, vec![Overgroup::new([0], Annotation::Master)]);
        assert!(c.validate().is_ok());
        assert!(!is_axiom(&c));
    }

    #[test]
    fn axiom_shapes() {
        assert!(is_axiom(&pair_cirquent()));
        let two = Cirquent {
            slots: ["P", "~P", "Q", "~Q"].iter().map(|s| Slot::new(f(s))).collect(),
            undergroups: vec![set(&[0, 1]), set(&[2, 3])],
            overgroups: vec![
                Overgroup::new([0, 1], Annotation::None),
                Overgroup::new([2, 3], Annotation::Master),
            ],
        };
        assert!(is_axiom(&two));
        let mut shared = two.clone();
        shared.overgroups.push(Overgroup::new([0, 1], Annotation::None));
        assert!(!is_axiom(&shared));
        let mut crossed = two.clone();
        crossed.overgroups = vec![
            Overgroup::new([0, 2], Annotation::None),
            Overgroup::new([1, 3], Annotation::None),
        ];
        assert!(!is_axiom(&crossed));
        let mut same = pair_cirquent();
        same.slots[1] = Slot::new(f("P"));
        assert!(!is_axiom(&same));
    }

    #[test]
    fn validation_errors() {
        let mut c = pair_cirquent();
        c.undergroups = vec![set(&[0])];
        assert_eq!(c.validate(), Err(CirquentError::OutsideUndergroups(1)));
        let mut c = pair_cirquent();
        c.overgroups[0].members.insert(5);
        assert!(matches!(c.validate(), Err(CirquentError::SlotOutOfRange { slot: 5, .. })));
        let mut c = pair_cirquent();
        c.slots[0].checked = true;
        assert_eq!(c.validate(), Err(CirquentError::CheckedNotCorecurrence(0)));
        let mut c = pair_cirquent();
        c.undergroups.push(BTreeSet::new());
        assert!(matches!(c.validate(), Err(CirquentError::EmptyGroup { .. })));
    }

    #[test]
    fn one_step_excluded_middle() {
        let g = f("P | ~P");
        let d = Derivation::from_conclusion(
            initial_cirquent(&g),
            &[Rule::DisjunctionIntroduction { slot: 0 }],
        )
        .unwrap();
        assert!(d.premise().unwrap().equivalent(&pair_cirquent()));
        assert!(check_proof(&d, &g).is_ok());
    }

    #[test]
    fn three_step_recurrence_proof() {
        let g = f("!(P | ~P)");
        let d = Derivation::from_conclusion(
            initial_cirquent(&g),
            &[
                Rule::RecurrenceIntroduction {
                    slot: 0,
                    annotation: Annotation::Label("@".parse().unwrap()),
                },
                Rule::DisjunctionIntroduction { slot: 0 },
                Rule::OvergroupDuplication { index: 0 },
            ],
        )
        .unwrap();
        assert_eq!(d.rules.len(), 3);
        assert!(check_proof(&d, &g).is_ok());
        assert!(is_axiom(d.premise().unwrap()));
    }

    #[test]
    fn derivation_endpoints() {
        let a = initial_cirquent(&f("P"));
        let b = initial_cirquent(&f("Q"));
        let d = Derivation::single(a.clone());
        assert!(check_derivation(&d, &a, &a).is_ok());
        assert!(check_derivation(&d, &a, &b).is_err());
        assert!(check_proof(&d, &f("P")).is_err());
        let empty = Derivation {
            cirquents: vec![],
            rules: vec![],
        };
        assert!(check_proof(&empty, &f("P")).is_err());
    }

    #[test]
    fn step_reports_invariant_breach() {
        let conclusion = initial_cirquent(&f("P | ~P"));
        let mut premise = pair_cirquent();
        premise.undergroups = vec![set(&[0])];
        let err = check_step(
            &premise,
            &conclusion,
            &Rule::DisjunctionIntroduction { slot: 0 },
        )
        .unwrap_err();
        assert!(err.contains("outside every undergroup"), "{err}");
        assert!(check_step(
            &pair_cirquent(),
            &conclusion,
            &Rule::DisjunctionIntroduction { slot: 0 }
        )
        .is_ok());
    }

    #[test]
    fn stacking_derivations() {
        let g = f("!(P | ~P)");
        let lower = Derivation::from_conclusion(
            initial_cirquent(&g),
            &[Rule::RecurrenceIntroduction {
                slot: 0,
                annotation: Annotation::None,
            }],
        )
        .unwrap();
        let upper = Derivation::from_conclusion(
            lower.premise().unwrap().clone(),
            &[
                Rule::DisjunctionIntroduction { slot: 0 },
                Rule::OvergroupDuplication { index: 0 },
            ],
        )
        .unwrap();
        let whole = lower.stack_on(upper);
        assert_eq!(whole.rules.len(), 3);
        assert_eq!(whole.cirquents.len(), 4);
        assert!(check_proof(&whole, &g).is_ok());
    }
}
