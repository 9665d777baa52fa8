//! Rule instances and their bottom-up application.

use std::collections::BTreeSet;
use std::fmt;

use super::{Annotation, Cirquent, CirquentError, Overgroup, Slot};
use crate::formula::{Connective, Formula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupKind {
    Slots,
    Undergroups,
    Overgroups,
}

impl GroupKind {
    pub fn singular(self) -> &'static str {
        match self {
            GroupKind::Slots => "oformula",
            GroupKind::Undergroups => "undergroup",
            GroupKind::Overgroups => "overgroup",
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::Slots => "slots",
            GroupKind::Undergroups => "undergroups",
            GroupKind::Overgroups => "overgroups",
        })
    }
}

/// A rule instance, parameterized by indices of its conclusion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Swaps items `index` and `index + 1`.
    Exchange { kind: GroupKind, index: usize },
    /// Removes `slot` from `undergroup`; a slot left in no undergroup is
    /// deleted, and overgroups left empty disappear.
    Weakening { slot: usize, undergroup: usize },
    /// Replaces a corecurrence slot by two adjacent copies.
    Contraction { slot: usize },
    /// Collapses identical undergroups `index` and `index + 1`.
    UndergroupDuplication { index: usize },
    /// Collapses identical overgroups `index` and `index + 1`, keeping the
    /// annotation of the first.
    OvergroupDuplication { index: usize },
    /// Splits an overgroup into two adjacent ones covering it.
    Merging {
        overgroup: usize,
        first: BTreeSet<usize>,
        second: BTreeSet<usize>,
    },
    ConjunctionIntroduction { slot: usize },
    DisjunctionIntroduction { slot: usize },
    /// Strips `⫰` and appends a new overgroup holding just the slot.
    RecurrenceIntroduction { slot: usize, annotation: Annotation },
    /// Strips `⫯` and adds the slot to the listed overgroups.
    CorecurrenceIntroduction {
        slot: usize,
        overgroups: BTreeSet<usize>,
    },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Exchange { .. } => "Exchange",
            Rule::Weakening { .. } => "Weakening",
            Rule::Contraction { .. } => "Contraction",
            Rule::UndergroupDuplication { .. } => "UndergroupDuplication",
            Rule::OvergroupDuplication { .. } => "OvergroupDuplication",
            Rule::Merging { .. } => "Merging",
            Rule::ConjunctionIntroduction { .. } => "ConjunctionIntroduction",
            Rule::DisjunctionIntroduction { .. } => "DisjunctionIntroduction",
            Rule::RecurrenceIntroduction { .. } => "RecurrenceIntroduction",
            Rule::CorecurrenceIntroduction { .. } => "CorecurrenceIntroduction",
        }
    }
}

fn inapplicable(rule: &Rule, reason: impl Into<String>) -> CirquentError {
    CirquentError::Inapplicable {
        rule: rule.name(),
        reason: reason.into(),
    }
}

fn check_index(kind: GroupKind, index: usize, len: usize) -> Result<(), CirquentError> {
    if index < len {
        Ok(())
    } else {
        Err(CirquentError::IndexOutOfRange { kind, index })
    }
}

/// Shifts every member above `at` up by one, making room for a new slot at
/// `at + 1`.
fn open_slot(members: &BTreeSet<usize>, at: usize) -> BTreeSet<usize> {
    members
        .iter()
        .map(|&s| if s > at { s + 1 } else { s })
        .collect()
}

fn close_slot(members: &BTreeSet<usize>, gone: usize) -> BTreeSet<usize> {
    members
        .iter()
        .filter(|&&s| s != gone)
        .map(|&s| if s > gone { s - 1 } else { s })
        .collect()
}

/// Replaces slot `s` by two adjacent slots. Groups containing `s` are
/// rewritten by `split_under` / `split_over`; the rest are renumbered.
fn split_slot(
    c: &Cirquent,
    s: usize,
    left: Slot,
    right: Slot,
    split_under: bool,
) -> Cirquent {
    let mut slots = c.slots.clone();
    slots[s] = left;
    slots.insert(s + 1, right);
    let mut undergroups = Vec::new();
    for g in &c.undergroups {
        let shifted = open_slot(g, s);
        if g.contains(&s) {
            if split_under {
                let mut with_right = shifted.clone();
                with_right.remove(&s);
                with_right.insert(s + 1);
                undergroups.push(shifted);
                undergroups.push(with_right);
            } else {
                let mut both = shifted;
                both.insert(s + 1);
                undergroups.push(both);
            }
        } else {
            undergroups.push(shifted);
        }
    }
    let overgroups = c
        .overgroups
        .iter()
        .map(|o| {
            let mut members = open_slot(&o.members, s);
            if o.members.contains(&s) {
                members.insert(s + 1);
            }
            Overgroup {
                members,
                annotation: o.annotation.clone(),
            }
        })
        .collect();
    Cirquent {
        slots,
        undergroups,
        overgroups,
    }
}

/// Computes the premise of `rule` applied bottom-up to `conclusion`.
pub fn apply_rule(conclusion: &Cirquent, rule: &Rule) -> Result<Cirquent, CirquentError> {
    let c = conclusion;
    let slot_of = |s: usize| -> Result<&Slot, CirquentError> {
        check_index(GroupKind::Slots, s, c.slots.len())?;
        Ok(&c.slots[s])
    };
    match rule {
        Rule::Exchange { kind, index } => {
            let len = match kind {
                GroupKind::Slots => c.slots.len(),
                GroupKind::Undergroups => c.undergroups.len(),
                GroupKind::Overgroups => c.overgroups.len(),
            };
            check_index(*kind, index + 1, len)?;
            let i = *index;
            let mut p = c.clone();
            match kind {
                GroupKind::Slots => {
                    p.slots.swap(i, i + 1);
                    let swap = |g: &BTreeSet<usize>| -> BTreeSet<usize> {
                        g.iter()
                            .map(|&s| match s {
                                s if s == i => i + 1,
                                s if s == i + 1 => i,
                                s => s,
                            })
                            .collect()
                    };
                    p.undergroups = c.undergroups.iter().map(swap).collect();
                    for o in &mut p.overgroups {
                        o.members = swap(&o.members);
                    }
                }
                GroupKind::Undergroups => p.undergroups.swap(i, i + 1),
                GroupKind::Overgroups => p.overgroups.swap(i, i + 1),
            }
            Ok(p)
        }
        Rule::Weakening { slot, undergroup } => {
            slot_of(*slot)?;
            check_index(GroupKind::Undergroups, *undergroup, c.undergroups.len())?;
            let g = &c.undergroups[*undergroup];
            if !g.contains(slot) {
                return Err(inapplicable(rule, "oformula is not in the undergroup"));
            }
            if g.len() == 1 {
                return Err(inapplicable(rule, "the undergroup would become empty"));
            }
            let mut p = c.clone();
            p.undergroups[*undergroup].remove(slot);
            if p.undergroups.iter().any(|g| g.contains(slot)) {
                return Ok(p);
            }
            p.slots.remove(*slot);
            p.undergroups = p.undergroups.iter().map(|g| close_slot(g, *slot)).collect();
            p.overgroups = p
                .overgroups
                .iter()
                .map(|o| Overgroup {
                    members: close_slot(&o.members, *slot),
                    annotation: o.annotation.clone(),
                })
                .filter(|o| !o.members.is_empty())
                .collect();
            Ok(p)
        }
        Rule::Contraction { slot } => {
            let sl = slot_of(*slot)?;
            if sl.formula.connective() != Connective::Corec {
                return Err(inapplicable(rule, "oformula is not a corecurrence"));
            }
            Ok(split_slot(c, *slot, sl.clone(), sl.clone(), false))
        }
        Rule::UndergroupDuplication { index } => {
            check_index(GroupKind::Undergroups, index + 1, c.undergroups.len())?;
            if c.undergroups[*index] != c.undergroups[index + 1] {
                return Err(inapplicable(rule, "undergroups differ"));
            }
            let mut p = c.clone();
            p.undergroups.remove(index + 1);
            Ok(p)
        }
        Rule::OvergroupDuplication { index } => {
            check_index(GroupKind::Overgroups, index + 1, c.overgroups.len())?;
            if c.overgroups[*index].members != c.overgroups[index + 1].members {
                return Err(inapplicable(rule, "overgroups differ"));
            }
            let mut p = c.clone();
            p.overgroups.remove(index + 1);
            Ok(p)
        }
        Rule::Merging {
            overgroup,
            first,
            second,
        } => {
            check_index(GroupKind::Overgroups, *overgroup, c.overgroups.len())?;
            let o = &c.overgroups[*overgroup];
            if first.is_empty() || second.is_empty() {
                return Err(inapplicable(rule, "a part is empty"));
            }
            let union: BTreeSet<usize> = first.union(second).copied().collect();
            if union != o.members {
                return Err(inapplicable(rule, "the parts do not cover the overgroup"));
            }
            let mut p = c.clone();
            p.overgroups[*overgroup] = Overgroup {
                members: first.clone(),
                annotation: o.annotation.clone(),
            };
            p.overgroups.insert(
                overgroup + 1,
                Overgroup {
                    members: second.clone(),
                    annotation: o.annotation.clone(),
                },
            );
            Ok(p)
        }
        Rule::ConjunctionIntroduction { slot } | Rule::DisjunctionIntroduction { slot } => {
            let sl = slot_of(*slot)?;
            let conj = matches!(rule, Rule::ConjunctionIntroduction { .. });
            let (a, b) = match (&sl.formula, conj) {
                (Formula::And(a, b), true) | (Formula::Or(a, b), false) => (a, b),
                _ => {
                    return Err(inapplicable(
                        rule,
                        format!("oformula `{}` has the wrong main connective", sl.formula),
                    ))
                }
            };
            Ok(split_slot(
                c,
                *slot,
                Slot::new((**a).clone()),
                Slot::new((**b).clone()),
                conj,
            ))
        }
        Rule::RecurrenceIntroduction { slot, annotation } => {
            let sl = slot_of(*slot)?;
            let Formula::Rec(body) = &sl.formula else {
                return Err(inapplicable(rule, "oformula is not a recurrence"));
            };
            let mut p = c.clone();
            p.slots[*slot] = Slot::new((**body).clone());
            p.overgroups
                .push(Overgroup::new([*slot], annotation.clone()));
            Ok(p)
        }
        Rule::CorecurrenceIntroduction { slot, overgroups } => {
            let sl = slot_of(*slot)?;
            let Formula::Corec(body) = &sl.formula else {
                return Err(inapplicable(rule, "oformula is not a corecurrence"));
            };
            let mut p = c.clone();
            p.slots[*slot] = Slot::new((**body).clone());
            for &o in overgroups {
                check_index(GroupKind::Overgroups, o, c.overgroups.len())?;
                if !p.overgroups[o].members.insert(*slot) {
                    return Err(inapplicable(
                        rule,
                        format!("overgroup {o} already contains the oformula"),
                    ));
                }
            }
            Ok(p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{f, set};
    use super::*;
    use crate::formula::tests::arb_formula;
    use proptest::prelude::*;

    fn c3() -> Cirquent {
        Cirquent {
            slots: vec![
                Slot::checked(f("?~P")),
                Slot::new(f("P & Q")),
                Slot::new(f("R | ~R")),
            ],
            undergroups: vec![set(&[0, 1]), set(&[1, 2])],
            overgroups: vec![
                Overgroup::new([0, 1, 2], Annotation::Master),
                Overgroup::new([0, 2], Annotation::Label("1@".parse().unwrap())),
            ],
        }
    }

    #[test]
    fn disjunction_introduction() {
        let p = apply_rule(
            &Cirquent::initial(&f("P | ~P")),
            &Rule::DisjunctionIntroduction { slot: 0 },
        )
        .unwrap();
        assert_eq!(p.slots, vec![Slot::new(f("P")), Slot::new(f("~P"))]);
        assert_eq!(p.undergroups, vec![set(&[0, 1])]);
        assert_eq!(p.overgroups, vec![Overgroup::new([0, 1], Annotation::Master)]);
        let p = apply_rule(&c3(), &Rule::DisjunctionIntroduction { slot: 2 }).unwrap();
        assert_eq!(p.undergroups, vec![set(&[0, 1]), set(&[1, 2, 3])]);
        assert_eq!(p.overgroups[1].members, set(&[0, 2, 3]));
    }

    #[test]
    fn conjunction_splits_undergroups() {
        let p = apply_rule(&c3(), &Rule::ConjunctionIntroduction { slot: 1 }).unwrap();
        assert_eq!(p.slots[1].formula, f("P"));
        assert_eq!(p.slots[2].formula, f("Q"));
        assert_eq!(
            p.undergroups,
            vec![set(&[0, 1]), set(&[0, 2]), set(&[1, 3]), set(&[2, 3])]
        );
        assert_eq!(p.overgroups[0].members, set(&[0, 1, 2, 3]));
        assert_eq!(p.overgroups[1].members, set(&[0, 3]));
        assert!(p.validate().is_ok());
    }

    #[test]
    fn recurrence_introduction_adds_labeled_overgroup() {
        let label = Annotation::Label("@".parse().unwrap());
        let p = apply_rule(
            &Cirquent::initial(&f("!(P | ~P)")),
            &Rule::RecurrenceIntroduction {
                slot: 0,
                annotation: label.clone(),
            },
        )
        .unwrap();
        assert_eq!(p.slots, vec![Slot::new(f("P | ~P"))]);
        assert_eq!(
            p.overgroups,
            vec![
                Overgroup::new([0], Annotation::Master),
                Overgroup::new([0], label)
            ]
        );
    }

    #[test]
    fn contraction_copies_memberships() {
        let p = apply_rule(&c3(), &Rule::Contraction { slot: 0 }).unwrap();
        assert_eq!(p.slots[0], Slot::checked(f("?~P")));
        assert_eq!(p.slots[1], Slot::checked(f("?~P")));
        assert_eq!(p.undergroups, vec![set(&[0, 1, 2]), set(&[2, 3])]);
        assert_eq!(p.overgroups[1].members, set(&[0, 1, 3]));
        assert!(apply_rule(&c3(), &Rule::Contraction { slot: 1 }).is_err());
    }

    #[test]
    fn corecurrence_introduction() {
        let mut c = c3();
        c.overgroups[1].members = set(&[2]);
        let p = apply_rule(
            &c,
            &Rule::CorecurrenceIntroduction {
                slot: 0,
                overgroups: set(&[1]),
            },
        )
        .unwrap();
        assert_eq!(p.slots[0], Slot::new(f("~P")));
        assert_eq!(p.overgroups[1].members, set(&[0, 2]));
        assert!(apply_rule(
            &c3(),
            &Rule::CorecurrenceIntroduction {
                slot: 0,
                overgroups: set(&[1]),
            }
        )
        .is_err());
    }

    #[test]
    fn weakening_deletes_orphans() {
        let p = apply_rule(
            &c3(),
            &Rule::Weakening {
                slot: 1,
                undergroup: 1,
            },
        )
        .unwrap();
        assert_eq!(p.slots.len(), 3);
        assert_eq!(p.undergroups, vec![set(&[0, 1]), set(&[2])]);
        let p = apply_rule(
            &p,
            &Rule::Weakening {
                slot: 0,
                undergroup: 0,
            },
        )
        .unwrap();
        assert_eq!(p.slots.len(), 2);
        assert_eq!(p.undergroups, vec![set(&[0]), set(&[1])]);
        assert_eq!(p.overgroups[1].members, set(&[1]));
        assert!(apply_rule(
            &p,
            &Rule::Weakening {
                slot: 0,
                undergroup: 0
            }
        )
        .is_err());
    }

    #[test]
    fn weakening_drops_empty_overgroups() {
        let c = Cirquent {
            slots: vec![Slot::new(f("P")), Slot::new(f("Q"))],
            undergroups: vec![set(&[0, 1])],
            overgroups: vec![
                Overgroup::new([0, 1], Annotation::Master),
                Overgroup::new([1], Annotation::None),
            ],
        };
        let p = apply_rule(
            &c,
            &Rule::Weakening {
                slot: 1,
                undergroup: 0,
            },
        )
        .unwrap();
        assert_eq!(p.overgroups, vec![Overgroup::new([0], Annotation::Master)]);
    }

    #[test]
    fn duplications_and_merging() {
        let mut c = c3();
        c.undergroups.push(set(&[1, 2]));
        let p = apply_rule(&c, &Rule::UndergroupDuplication { index: 1 }).unwrap();
        assert_eq!(p.undergroups, c3().undergroups);
        assert!(apply_rule(&c, &Rule::UndergroupDuplication { index: 0 }).is_err());
        let m = apply_rule(
            &c3(),
            &Rule::Merging {
                overgroup: 0,
                first: set(&[0, 1]),
                second: set(&[1, 2]),
            },
        )
        .unwrap();
        assert_eq!(m.overgroups.len(), 3);
        assert_eq!(m.overgroups[1].annotation, Annotation::Master);
        assert!(apply_rule(
            &c3(),
            &Rule::Merging {
                overgroup: 0,
                first: set(&[0]),
                second: set(&[1]),
            }
        )
        .is_err());
        let mut d = c3();
        d.overgroups[1].members = set(&[0, 1, 2]);
        let p = apply_rule(&d, &Rule::OvergroupDuplication { index: 0 }).unwrap();
        assert_eq!(p.overgroups, vec![Overgroup::new([0, 1, 2], Annotation::Master)]);
    }

    #[test]
    fn exchange_slots() {
        let p = apply_rule(
            &c3(),
            &Rule::Exchange {
                kind: GroupKind::Slots,
                index: 0,
            },
        )
        .unwrap();
        assert_eq!(p.slots[0].formula, f("P & Q"));
        assert_eq!(p.undergroups, vec![set(&[0, 1]), set(&[0, 2])]);
        assert_eq!(p.overgroups[1].members, set(&[1, 2]));
        assert!(apply_rule(
            &c3(),
            &Rule::Exchange {
                kind: GroupKind::Slots,
                index: 2
            }
        )
        .is_err());
    }

    fn arb_cirquent() -> impl Strategy<Value = Cirquent> {
        (1usize..5)
            .prop_flat_map(|n| {
                let slots = prop::collection::vec((arb_formula(), any::<bool>()), n);
                let groups = prop::collection::vec(prop::collection::btree_set(0..n, 1..=n), 0..4);
                let annotations = prop::collection::vec(0u8..3, 4);
                (Just(n), slots, groups.clone(), groups, annotations)
            })
            .prop_map(|(n, slots, mut under, mut over, ann)| {
                // every slot gets at least one undergroup and one overgroup
                under.push((0..n).collect());
                over.insert(0, (0..n).collect());
                Cirquent {
                    slots: slots
                        .into_iter()
                        .map(|(formula, check)| {
                            let checked = check && formula.connective() == Connective::Corec;
                            Slot { formula, checked }
                        })
                        .collect(),
                    undergroups: under,
                    overgroups: over
                        .into_iter()
                        .enumerate()
                        .map(|(i, members)| Overgroup {
                            members,
                            annotation: match ann[i % ann.len()] {
                                0 => Annotation::Master,
                                1 => Annotation::None,
                                _ => Annotation::Label("@".parse().unwrap()),
                            },
                        })
                        .collect(),
                }
            })
    }

    fn arb_rule() -> impl Strategy<Value = Rule> {
        let idx = 0usize..6;
        let small_set = prop::collection::btree_set(0usize..6, 0..4);
        prop_oneof![
            (
                prop::sample::select(vec![
                    GroupKind::Slots,
                    GroupKind::Undergroups,
                    GroupKind::Overgroups
                ]),
                idx.clone()
            )
                .prop_map(|(kind, index)| Rule::Exchange { kind, index }),
            (idx.clone(), idx.clone())
                .prop_map(|(slot, undergroup)| Rule::Weakening { slot, undergroup }),
            idx.clone().prop_map(|slot| Rule::Contraction { slot }),
            idx.clone().prop_map(|index| Rule::UndergroupDuplication { index }),
            idx.clone().prop_map(|index| Rule::OvergroupDuplication { index }),
            (idx.clone(), small_set.clone(), small_set.clone()).prop_map(
                |(overgroup, first, second)| Rule::Merging {
                    overgroup,
                    first,
                    second
                }
            ),
            idx.clone().prop_map(|slot| Rule::ConjunctionIntroduction { slot }),
            idx.clone().prop_map(|slot| Rule::DisjunctionIntroduction { slot }),
            idx.clone().prop_map(|slot| Rule::RecurrenceIntroduction {
                slot,
                annotation: Annotation::None
            }),
            (idx, small_set).prop_map(|(slot, overgroups)| Rule::CorecurrenceIntroduction {
                slot,
                overgroups
            }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(512))]

        #[test]
        fn premises_are_well_formed(c in arb_cirquent(), r in arb_rule()) {
            prop_assume!(c.validate().is_ok());
            if let Ok(p) = apply_rule(&c, &r) {
                prop_assert!(p.validate().is_ok(), "{:?} -> {:?}", r, p.validate());
                prop_assert!(super::super::check_step(&p, &c, &r).is_ok());
            }
        }

        #[test]
        fn axioms_are_closed_under_exchange(
            pairs in prop::collection::vec(prop::sample::select(vec!["P", "Q", "R"]), 1..4),
            swaps in prop::collection::vec((0u8..3, 0usize..8), 0..6),
        ) {
            let mut c = Cirquent { slots: vec![], undergroups: vec![], overgroups: vec![] };
            for atom in pairs {
                let i = c.slots.len();
                c.slots.push(Slot::new(Formula::atom(atom)));
                c.slots.push(Slot::new(Formula::neg_atom(atom)));
                c.undergroups.push(set(&[i, i + 1]));
                c.overgroups.push(Overgroup::new([i, i + 1], Annotation::None));
            }
            prop_assert!(super::super::is_axiom(&c));
            for (k, index) in swaps {
                let kind = [GroupKind::Slots, GroupKind::Undergroups, GroupKind::Overgroups][k as usize];
                if let Ok(p) = apply_rule(&c, &Rule::Exchange { kind, index }) {
                    c = p;
                    prop_assert!(super::super::is_axiom(&c));
                }
            }
        }
    }
}
