use std::collections::{BTreeSet, VecDeque};

use super::{AnalysisError, OppositionPairing, Resolution, TruncUnitTree};
use crate::formula::Connective;
use crate::unit::UnitRef;

impl TruncUnitTree {
    pub(crate) fn scs_id(&self, a: usize, b: usize) -> usize {
        let mut h = a;
        while !self.is_subunit_id(b, h) {
            h = self.node(h).parent.expect("root is a common superunit");
        }
        h
    }

    /// Highest superunit reachable from `e` without climbing onto a `⫯`-unit
    /// and, when `strict` is given, onto a `⫰`-unit whose resolvent misses
    /// `e`. A unit drives exactly the subunits of this ceiling.
    pub(crate) fn ceiling(&self, e: usize, strict: Option<&Resolution>) -> usize {
        let depth_of = |id: usize| self.unit(id).branches.len();
        let mut top = e;
        while let Some(p) = self.node(top).parent {
            let ok = match self.node(p).connective {
                Connective::Corec => false,
                Connective::Rec => match strict {
                    None => true,
                    Some(r) => r
                        .get(self.unit(p))
                        .is_some_and(|b| self.unit(e).branches[depth_of(p)] == *b),
                },
                _ => true,
            };
            if !ok {
                break;
            }
            top = p;
        }
        top
    }

    pub(crate) fn drives_id(&self, e: usize, g: usize) -> bool {
        self.is_subunit_id(g, self.ceiling(e, None))
    }

    pub(crate) fn strictly_drives_id(&self, r: &Resolution, e: usize, g: usize) -> bool {
        self.is_subunit_id(g, self.ceiling(e, Some(r)))
    }
}

pub fn smallest_common_superunit(
    t: &TruncUnitTree,
    a: &UnitRef,
    b: &UnitRef,
) -> Result<UnitRef, AnalysisError> {
    let (a, b) = (t.require(a)?, t.require(b)?);
    Ok(t.unit(t.scs_id(a, b)).clone())
}

/// `Some(H)` with `H` the smallest common superunit when `e` drives `g`.
pub fn drives(t: &TruncUnitTree, e: &UnitRef, g: &UnitRef) -> Result<Option<UnitRef>, AnalysisError> {
    let (ei, gi) = (t.require(e)?, t.require(g)?);
    Ok(t.drives_id(ei, gi).then(|| t.unit(t.scs_id(ei, gi)).clone()))
}

pub fn strictly_drives(
    t: &TruncUnitTree,
    r: &Resolution,
    e: &UnitRef,
    g: &UnitRef,
) -> Result<bool, AnalysisError> {
    let (ei, gi) = (t.require(e)?, t.require(g)?);
    Ok(t.strictly_drives_id(r, ei, gi))
}

/// `e` sees `g`: directly by strict driving, or through a chain of opposite
/// politeral pairs each strictly driving the next.
pub fn visible(
    t: &TruncUnitTree,
    r: &Resolution,
    pairing: &OppositionPairing,
    e: &UnitRef,
    g: &UnitRef,
) -> Result<bool, AnalysisError> {
    let (ei, gi) = (t.require(e)?, t.require(g)?);
    if t.strictly_drives_id(r, ei, gi) {
        return Ok(true);
    }
    let paired: Vec<usize> = t
        .politeral_ids()
        .filter(|&l| pairing.partners(t.unit(l)).any(|m| t.contains(m)))
        .collect();
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &l in &paired {
        if t.strictly_drives_id(r, ei, l) && seen.insert(l) {
            queue.push_back(l);
        }
    }
    while let Some(l) = queue.pop_front() {
        for m in pairing.partners(t.unit(l)).filter_map(|m| t.id(m)) {
            if t.strictly_drives_id(r, m, gi) {
                return Ok(true);
            }
            for &next in &paired {
                if t.strictly_drives_id(r, m, next) && seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(false)
}
