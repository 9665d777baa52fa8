use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{AnalysisError, OppositionPairing, TruncUnitTree};
use crate::formula::Connective;
use crate::unit::UnitRef;

/// One triple `L, M, X` of a domination chain: `L` and `M` are opposite and
/// `M` drives the next `L` (or the target) through `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainLink {
    pub l: UnitRef,
    pub m: UnitRef,
    pub x: UnitRef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domination {
    /// The target lies strictly below the dominating unit.
    ProperSubunit,
    /// A shortest domination chain.
    Chain(Vec<ChainLink>),
}

/// Opposite pairs `(L, M)` of `t` usable inside a chain for `e`: both
/// present, `M` outside `e`.
fn chain_nodes(t: &TruncUnitTree, pairing: &OppositionPairing, e: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for l in t.politeral_ids() {
        for m in pairing.partners(t.unit(l)).filter_map(|m| t.id(m)) {
            if !t.is_subunit_id(m, e) {
                out.push((l, m));
            }
        }
    }
    out
}

struct Search {
    nodes: Vec<(usize, usize)>,
    /// BFS predecessor of each reached node; starts map to themselves.
    pred: HashMap<usize, usize>,
    order: Vec<usize>,
}

/// Breadth-first search over chain nodes. Stops early at the first popped
/// node whose `M` satisfies `stop`.
fn search(
    t: &TruncUnitTree,
    pairing: &OppositionPairing,
    e: usize,
    mut stop: impl FnMut(usize) -> bool,
) -> (Search, Option<usize>) {
    let nodes = chain_nodes(t, pairing, e);
    let ceilings: Vec<usize> = nodes.iter().map(|&(_, m)| t.ceiling(m, None)).collect();
    let mut pred = HashMap::new();
    let mut queue = VecDeque::new();
    for (i, &(l, _)) in nodes.iter().enumerate() {
        if t.is_subunit_id(l, e) {
            pred.insert(i, i);
            queue.push_back(i);
        }
    }
    let mut order = Vec::new();
    let mut hit = None;
    while let Some(i) = queue.pop_front() {
        order.push(i);
        if stop(nodes[i].1) {
            hit = Some(i);
            break;
        }
        for (j, &(l2, _)) in nodes.iter().enumerate() {
            if !pred.contains_key(&j) && t.is_subunit_id(l2, ceilings[i]) {
                pred.insert(j, i);
                queue.push_back(j);
            }
        }
    }
    (Search { nodes, pred, order }, hit)
}

fn require_rec(t: &TruncUnitTree, e: &UnitRef) -> Result<usize, AnalysisError> {
    let id = t.require(e)?;
    if t.node(id).connective != Connective::Rec {
        return Err(AnalysisError::NotRecurrence(e.clone()));
    }
    Ok(id)
}

/// Whether `⫰`-unit `e` dominates `g` in `t`, with a witness.
///
/// A shortest chain needs no check that `M_i` avoids driving later units:
/// if it drove some `L_j` with `j ≥ i + 2`, or the target early, cutting
/// the chain there would give a shorter one.
pub fn dominates(
    t: &TruncUnitTree,
    pairing: &OppositionPairing,
    e: &UnitRef,
    g: &UnitRef,
) -> Result<Option<Domination>, AnalysisError> {
    let ei = require_rec(t, e)?;
    let gi = t.require(g)?;
    if gi != ei && t.is_subunit_id(gi, ei) {
        return Ok(Some(Domination::ProperSubunit));
    }
    let (s, hit) = search(t, pairing, ei, |m| t.drives_id(m, gi));
    let Some(mut i) = hit else {
        return Ok(None);
    };
    let mut path = vec![i];
    while s.pred[&i] != i {
        i = s.pred[&i];
        path.push(i);
    }
    path.reverse();
    let mut links = Vec::new();
    for (k, &node) in path.iter().enumerate() {
        let (l, m) = s.nodes[node];
        let next = path.get(k + 1).map_or(gi, |&n| s.nodes[n].0);
        links.push(ChainLink {
            l: t.unit(l).clone(),
            m: t.unit(m).clone(),
            x: t.unit(t.scs_id(m, next)).clone(),
        });
    }
    Ok(Some(Domination::Chain(links)))
}

pub(crate) fn dominated_ids(t: &TruncUnitTree, pairing: &OppositionPairing, e: usize) -> BTreeSet<usize> {
    let mut out: BTreeSet<usize> = t.subtree(e).skip(1).collect();
    let (s, _) = search(t, pairing, e, |_| false);
    for i in s.order {
        out.extend(t.subtree(t.ceiling(s.nodes[i].1, None)));
    }
    out
}

/// Every unit of `t` dominated by `⫰`-unit `e`.
pub fn dominated_set(
    t: &TruncUnitTree,
    pairing: &OppositionPairing,
    e: &UnitRef,
) -> Result<BTreeSet<UnitRef>, AnalysisError> {
    let ei = require_rec(t, e)?;
    Ok(dominated_ids(t, pairing, ei)
        .into_iter()
        .map(|i| t.unit(i).clone())
        .collect())
}

/// Outcome of checking the three domination conditions on a totally
/// resolved tree; each field names a violation when there is one.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditReport {
    /// A `⫰`-unit dominating the root.
    pub root_dominated_by: Option<UnitRef>,
    /// Two `⫰`-units (possibly equal) dominating each other.
    pub mutual: Option<(UnitRef, UnitRef)>,
    /// `E` dominates `⫰G`, `⫰G` dominates `H`, yet `E` misses `H`.
    pub intransitive: Option<(UnitRef, UnitRef, UnitRef)>,
}

impl AuditReport {
    pub fn passes(&self) -> bool {
        self.root_dominated_by.is_none() && self.mutual.is_none() && self.intransitive.is_none()
    }
}

pub fn audit_resolution(
    t: &TruncUnitTree,
    pairing: &OppositionPairing,
) -> Result<AuditReport, AnalysisError> {
    if let Some(id) = t.first_unresolved() {
        return Err(AnalysisError::NotTotal(t.unit(id).clone()));
    }
    let recs: Vec<usize> = t.recurrence_ids().collect();
    let sets: HashMap<usize, BTreeSet<usize>> =
        recs.iter().map(|&e| (e, dominated_ids(t, pairing, e))).collect();
    let unit = |i: usize| t.unit(i).clone();
    let mut report = AuditReport::default();
    for &e in &recs {
        let d = &sets[&e];
        if report.root_dominated_by.is_none() && d.contains(&0) {
            report.root_dominated_by = Some(unit(e));
        }
        for &g in recs.iter().filter(|g| d.contains(g)) {
            if report.mutual.is_none() && sets[&g].contains(&e) {
                report.mutual = Some((unit(e), unit(g)));
            }
            if report.intransitive.is_none() {
                if let Some(&h) = sets[&g].difference(d).next() {
                    report.intransitive = Some((unit(e), unit(g), unit(h)));
                }
            }
        }
    }
    Ok(report)
}
