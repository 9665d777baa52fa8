//! Greedy disjunct pruning of tautological hyperformulas.

use std::collections::BTreeSet;

use super::{is_tautology, Hyper, HyperError, HyperNode};
use crate::formula::Connective;

/// Only disjunctions stemming from `⫯`-units may lose disjuncts; those from
/// `∨`-units keep both.
fn prunable(h: &Hyper) -> bool {
    matches!(h.node, HyperNode::Or(_))
        && h.origin.as_ref().is_some_and(|o| o.connective == Connective::Corec)
}

/// Copy of `h` without the nodes whose preorder numbers are in `removed`.
fn without(h: &Hyper, removed: &BTreeSet<usize>, counter: &mut usize) -> Option<Hyper> {
    let me = *counter;
    *counter += 1;
    if removed.contains(&me) {
        *counter += h.size() - 1;
        return None;
    }
    let node = match &h.node {
        HyperNode::Lit { .. } => h.node.clone(),
        HyperNode::And(c) => {
            HyperNode::And(c.iter().filter_map(|x| without(x, removed, counter)).collect())
        }
        HyperNode::Or(c) => {
            HyperNode::Or(c.iter().filter_map(|x| without(x, removed, counter)).collect())
        }
    };
    Some(Hyper {
        node,
        origin: h.origin.clone(),
    })
}

/// Drops disjuncts of `⫯`-origin disjunctions, in preorder, whenever the
/// result stays tautological. Every disjunction keeps at least one
/// disjunct. A single pass is minimal: dropping disjuncts only weakens the
/// formula, so a disjunct needed once stays needed.
pub fn finitize(h: &Hyper) -> Result<Hyper, HyperError> {
    if !is_tautology(h)? {
        return Err(HyperError::NotTautological);
    }
    // Preorder numbers of each prunable node's children.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut next = 0usize;
    number(h, &mut next, &mut groups);
    let mut removed: BTreeSet<usize> = BTreeSet::new();
    for group in groups {
        for &child in &group {
            let live = group.iter().filter(|c| !removed.contains(c)).count();
            if live <= 1 || removed.contains(&child) {
                continue;
            }
            removed.insert(child);
            let candidate = without(h, &removed, &mut 0).expect("root is never removed");
            if !is_tautology(&candidate)? {
                removed.remove(&child);
            }
        }
    }
    Ok(without(h, &removed, &mut 0).expect("root is never removed"))
}

fn number(h: &Hyper, next: &mut usize, groups: &mut Vec<Vec<usize>>) {
    *next += 1;
    let slot = prunable(h).then(|| {
        groups.push(Vec::new());
        groups.len() - 1
    });
    for c in h.children() {
        if let Some(g) = slot {
            groups[g].push(*next);
        }
        number(c, next, groups);
    }
}

/// `pruned` arises from `original` by deleting disjuncts of `⫯`-origin
/// disjunctions only, every disjunction keeps a disjunct, and origins are
/// unchanged.
pub fn is_pruning_of(pruned: &Hyper, original: &Hyper) -> bool {
    if pruned.origin != original.origin {
        return false;
    }
    match (&pruned.node, &original.node) {
        (HyperNode::Lit { .. }, HyperNode::Lit { .. }) => pruned.node == original.node,
        (HyperNode::And(p), HyperNode::And(o)) => {
            p.len() == o.len() && p.iter().zip(o).all(|(a, b)| is_pruning_of(a, b))
        }
        (HyperNode::Or(p), HyperNode::Or(o)) => {
            if p.is_empty() || (!prunable(original) && p.len() != o.len()) {
                return false;
            }
            let mut rest = o.iter();
            p.iter().all(|a| rest.by_ref().any(|b| is_pruning_of(a, b)))
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{arb_hyper, arb_tautology, neg, pos, truth_table};
    use super::*;
    use crate::unit::UnitRef;
    use proptest::prelude::*;

    fn corec(c: Vec<Hyper>) -> Hyper {
        Hyper::or(c).with_origin(UnitRef::root(), Connective::Corec)
    }

    fn disj(c: Vec<Hyper>) -> Hyper {
        Hyper::or(c).with_origin(UnitRef::root(), Connective::Or)
    }

    fn conj(c: Vec<Hyper>) -> Hyper {
        Hyper::and(c).with_origin(UnitRef::root(), Connective::Rec)
    }

    #[test]
    fn golden_image_loses_the_unneeded_branch() {
        let h = disj(vec![corec(vec![neg(0), neg(1)]), conj(vec![pos(0)])]);
        let out = finitize(&h).unwrap();
        assert_eq!(out, disj(vec![corec(vec![neg(0)]), conj(vec![pos(0)])]));
        assert!(is_pruning_of(&out, &h));
    }

    #[test]
    fn plain_disjunctions_keep_both_disjuncts() {
        let h = disj(vec![pos(0), neg(0)]);
        assert_eq!(finitize(&h).unwrap(), h);
        let h = disj(vec![corec(vec![pos(1)]), disj(vec![pos(0), neg(0)])]);
        assert_eq!(finitize(&h).unwrap(), h);
    }

    #[test]
    fn redundant_corecurrence_disjuncts_go() {
        let h = disj(vec![corec(vec![neg(0), neg(1), neg(2)]), conj(vec![pos(1)])]);
        let out = finitize(&h).unwrap();
        assert_eq!(out, disj(vec![corec(vec![neg(1)]), conj(vec![pos(1)])]));
    }

    #[test]
    fn refuses_non_tautologies() {
        assert_eq!(finitize(&pos(0)).unwrap_err(), HyperError::NotTautological);
    }

    #[test]
    fn pruning_relation() {
        let h = disj(vec![corec(vec![neg(0), neg(1)]), conj(vec![pos(0)])]);
        let dropped_plain = disj(vec![corec(vec![neg(0), neg(1)])]);
        assert!(!is_pruning_of(&dropped_plain, &h));
        let emptied = disj(vec![corec(vec![]), conj(vec![pos(0)])]);
        assert!(!is_pruning_of(&emptied, &h));
        assert!(is_pruning_of(&h, &h));
    }

    type Clause = BTreeSet<(super::super::Hyperatom, bool)>;

    /// Disjunctive normal form of the negation of `h`, clause by clause.
    fn negated_dnf(h: &Hyper) -> Vec<Clause> {
        match &h.node {
            HyperNode::Lit { atom, positive } => vec![[(atom.clone(), !positive)].into()],
            // ¬(a ∧ b) = ¬a ∨ ¬b
            HyperNode::And(c) => c.iter().flat_map(negated_dnf).collect(),
            // ¬(a ∨ b) = ¬a ∧ ¬b
            HyperNode::Or(c) => c.iter().fold(vec![Clause::new()], |acc, x| {
                let right = negated_dnf(x);
                acc.iter()
                    .flat_map(|l| right.iter().map(move |r| l.union(r).cloned().collect()))
                    .collect()
            }),
        }
    }

    /// Tautology through normal forms: `h` is valid iff every clause of the
    /// DNF of `¬h` holds a complementary pair.
    fn dnf_tautology(h: &Hyper) -> bool {
        negated_dnf(h)
            .iter()
            .all(|cl| cl.iter().any(|(a, p)| cl.contains(&(a.clone(), !p))))
    }

    proptest! {
        #[test]
        fn normal_form_route_agrees(h in arb_hyper(4)) {
            prop_assume!(h.size() <= 20);
            let valid = truth_table(&h);
            prop_assert_eq!(dnf_tautology(&h), valid);
            if valid {
                prop_assert!(dnf_tautology(&finitize(&h).unwrap()));
            }
        }

        #[test]
        fn finitize_keeps_tautologies(h in arb_tautology(4)) {
            let out = finitize(&h).unwrap();
            prop_assert!(truth_table(&out));
            prop_assert!(is_pruning_of(&out, &h));
            // Minimal: no single further drop survives.
            let again = finitize(&out).unwrap();
            prop_assert_eq!(again, out);
        }
    }
}
