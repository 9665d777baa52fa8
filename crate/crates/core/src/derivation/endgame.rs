//! From a cirquent of literals down to an axiom.

use std::collections::BTreeSet;

use super::DerivationError;
use crate::cirquent::{apply_rule, is_axiom, write_cirquent, Cirquent, Derivation, GroupKind, Rule};
use crate::hyper::Hyper;

struct Steps {
    cirquents: Vec<Cirquent>,
    rules: Vec<Rule>,
}

impl Steps {
    fn current(&self) -> &Cirquent {
        self.cirquents.last().expect("never empty")
    }

    fn apply(&mut self, rule: Rule) -> Result<(), DerivationError> {
        let next = apply_rule(self.current(), &rule)?;
        self.cirquents.push(next);
        self.rules.push(rule);
        Ok(())
    }

    /// Moves item `from` of `kind` down to position `to` (`to < from`) by
    /// adjacent exchanges.
    fn bring_down(&mut self, kind: GroupKind, from: usize, to: usize) -> Result<(), DerivationError> {
        for index in (to..from).rev() {
            self.apply(Rule::Exchange { kind, index })?;
        }
        Ok(())
    }
}

/// Derives `d`, a cirquent of literals whose slot images are `images`, from
/// an axiom. Each undergroup keeps its lowest-indexed pair of opposite
/// images; everything else is weakened away, duplicate undergroups
/// collapse, overgroups split into pairs, and duplicate overgroups collapse.
pub fn prove_literal_cirquent(d: &Cirquent, images: &[&Hyper]) -> Result<Derivation, DerivationError> {
    if let Some(s) = d.slots.iter().position(|s| !s.formula.is_literal()) {
        return Err(DerivationError::NotLiteral(s));
    }
    let chosen: Vec<(usize, usize)> = d
        .undergroups
        .iter()
        .enumerate()
        .map(|(u, g)| {
            let v: Vec<usize> = g.iter().copied().collect();
            v.iter()
                .enumerate()
                .flat_map(|(k, &a)| v[k + 1..].iter().map(move |&b| (a, b)))
                .find(|&(a, b)| images[a].is_opposite_to(images[b]))
                .ok_or(DerivationError::NoOppositePair(u))
        })
        .collect::<Result<_, _>>()?;
    let mut st = Steps {
        cirquents: vec![d.clone()],
        rules: Vec::new(),
    };
    // `orig[i]` is the slot of `d` now at position `i`.
    let mut orig: Vec<usize> = (0..d.slots.len()).collect();
    for (u, &(a, b)) in chosen.iter().enumerate() {
        while let Some(&s) = st.current().undergroups[u]
            .iter()
            .find(|&&s| orig[s] != a && orig[s] != b)
        {
            st.apply(Rule::Weakening { slot: s, undergroup: u })?;
            if st.current().slots.len() < orig.len() {
                orig.remove(s);
            }
        }
    }
    while let Some((i, j)) = first_duplicate(&st.current().undergroups) {
        st.bring_down(GroupKind::Undergroups, j, i + 1)?;
        st.apply(Rule::UndergroupDuplication { index: i })?;
    }
    let c = st.current().clone();
    for g in &c.undergroups {
        let v: Vec<usize> = g.iter().copied().collect();
        if c.overgroups_of(v[0]) != c.overgroups_of(v[1]) {
            return Err(DerivationError::NotCogrouped(orig[v[0]], orig[v[1]]));
        }
    }
    loop {
        let c = st.current();
        let wide = c.overgroups.iter().position(|o| o.members.len() > 2);
        let Some(o) = wide else { break };
        let members = &c.overgroups[o].members;
        let first_slot = *members.first().expect("nonempty");
        let first = c
            .undergroups
            .iter()
            .find(|g| g.contains(&first_slot))
            .expect("every slot is in an undergroup")
            .clone();
        let second: BTreeSet<usize> = members.difference(&first).copied().collect();
        st.apply(Rule::Merging { overgroup: o, first, second })?;
    }
    let members: Vec<BTreeSet<usize>> =
        st.current().overgroups.iter().map(|o| o.members.clone()).collect();
    let mut members = members;
    while let Some((i, j)) = first_duplicate(&members) {
        st.bring_down(GroupKind::Overgroups, j, i + 1)?;
        st.apply(Rule::OvergroupDuplication { index: i })?;
        members = st.current().overgroups.iter().map(|o| o.members.clone()).collect();
    }
    if !is_axiom(st.current()) {
        return Err(DerivationError::NotAxiom(write_cirquent(st.current())));
    }
    st.cirquents.reverse();
    st.rules.reverse();
    Ok(Derivation {
        cirquents: st.cirquents,
        rules: st.rules,
    })
}

fn first_duplicate<T: PartialEq>(items: &[T]) -> Option<(usize, usize)> {
    (0..items.len()).find_map(|i| ((i + 1)..items.len()).find(|&j| items[j] == items[i]).map(|j| (i, j)))
}
