//! Bottom-up proof construction: the four-stage procedure from the initial
//! cirquent down to a cirquent of literals, then the endgame from an axiom.

mod endgame;
mod pipeline;

pub use endgame::prove_literal_cirquent;
pub use pipeline::{prove, Finitization, Proof, ProveError, ProveOptions, ProveSource, Stage};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::analysis::{dominated_set, AnalysisError, OppositionPairing, TruncUnitTree};
use crate::cirquent::{
    apply_rule, write_cirquent, Annotation, Cirquent, CirquentError, Derivation, Rule,
};
use crate::formula::{Connective, Formula};
use crate::hyper::{Hyper, HyperNode};
use crate::unit::UnitRef;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("no progress after {sweeps} sweeps; stuck at `{cirquent}`")]
    SweepCap { sweeps: usize, cirquent: String },
    #[error("oformula {slot} does not match its image: {reason}")]
    ImageMismatch { slot: usize, reason: String },
    #[error("oformula {0} of the final cirquent is not a literal")]
    NotLiteral(usize),
    #[error("undergroup {0} holds no pair of opposite images")]
    NoOppositePair(usize),
    #[error("opposite oformulas {0} and {1} lie in different overgroups")]
    NotCogrouped(usize, usize),
    #[error("endgame ended in `{0}`, which is not an axiom")]
    NotAxiom(String),
    #[error(transparent)]
    Rule(#[from] CirquentError),
}

/// Which `⫰`-units dominate which units, kept only for `⫰`-units that are
/// origins of nodes of the image being derived.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DominationOracle {
    dominated: BTreeMap<UnitRef, BTreeSet<UnitRef>>,
}

impl DominationOracle {
    pub fn new(
        t: &TruncUnitTree,
        pairing: &OppositionPairing,
        image: &Hyper,
    ) -> Result<DominationOracle, AnalysisError> {
        let mut dominated = BTreeMap::new();
        for node in image.preorder() {
            if let Some(o) = node.origin.as_ref().filter(|o| o.connective == Connective::Rec) {
                if !dominated.contains_key(&o.unit) {
                    dominated.insert(o.unit.clone(), dominated_set(t, pairing, &o.unit)?);
                }
            }
        }
        Ok(DominationOracle { dominated })
    }

    /// An oracle from explicit `(dominator, dominated)` pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (UnitRef, UnitRef)>) -> DominationOracle {
        let mut dominated: BTreeMap<UnitRef, BTreeSet<UnitRef>> = BTreeMap::new();
        for (e, g) in pairs {
            dominated.entry(e).or_default().insert(g);
        }
        DominationOracle { dominated }
    }

    pub fn dominates(&self, e: &UnitRef, g: &UnitRef) -> bool {
        self.dominated.get(e).is_some_and(|s| s.contains(g))
    }

    pub fn dominators_of<'a>(&'a self, g: &'a UnitRef) -> impl Iterator<Item = &'a UnitRef> + 'a {
        self.dominated
            .iter()
            .filter(move |(_, s)| s.contains(g))
            .map(|(e, _)| e)
    }

    /// The `⫰`-units kept, each with the units it dominates.
    pub fn entries(&self) -> impl Iterator<Item = (&UnitRef, &BTreeSet<UnitRef>)> {
        self.dominated.iter()
    }

    pub fn len(&self) -> usize {
        self.dominated.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Preorder numbering of a hyperformula's nodes.
pub(crate) struct Indexed<'a> {
    pub nodes: Vec<&'a Hyper>,
    pub children: Vec<Vec<usize>>,
}

impl<'a> Indexed<'a> {
    pub fn new(h: &'a Hyper) -> Indexed<'a> {
        let nodes = h.preorder();
        let mut children = vec![Vec::new(); nodes.len()];
        for (i, n) in nodes.iter().enumerate() {
            let mut next = i + 1;
            for c in n.children() {
                children[i].push(next);
                next += c.size();
            }
        }
        Indexed { nodes, children }
    }

    fn origin_unit(&self, id: usize) -> Option<&'a UnitRef> {
        self.nodes[id].origin.as_ref().map(|o| &o.unit)
    }
}

/// Image of every slot: a preorder number into the derived hyperformula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageMap {
    pub ids: Vec<usize>,
}

impl ImageMap {
    pub fn get(&self, slot: usize) -> usize {
        self.ids[slot]
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// The subhyperformulas themselves, slot by slot.
    pub fn resolve<'a>(&self, image: &'a Hyper) -> Vec<&'a Hyper> {
        let nodes = image.preorder();
        self.ids.iter().map(|&i| nodes[i]).collect()
    }
}

/// One rule application of the first part, tagged with its stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageStep {
    pub stage: u8,
    pub rule: Rule,
    /// False for a contraction that more contractions of the same
    /// disjunction follow; the cirquent after it is mid-step.
    pub completes: bool,
}

/// Result of the four-stage procedure. `cirquents` and `images` run from
/// the initial cirquent upward, one entry per step plus the start.
#[derive(Debug, Clone)]
pub struct FirstRun {
    pub cirquents: Vec<Cirquent>,
    pub images: Vec<ImageMap>,
    pub steps: Vec<StageStep>,
}

impl FirstRun {
    /// The cirquent of literals the procedure stops at.
    pub fn last(&self) -> &Cirquent {
        self.cirquents.last().expect("never empty")
    }

    pub fn last_images(&self) -> &ImageMap {
        self.images.last().expect("never empty")
    }

    /// The derivation from [`FirstRun::last`] to the initial cirquent.
    pub fn derivation(&self) -> Derivation {
        let mut cirquents = self.cirquents.clone();
        cirquents.reverse();
        let rules = self.steps.iter().rev().map(|s| s.rule.clone()).collect();
        Derivation { cirquents, rules }
    }
}

struct Builder<'a> {
    f4: Indexed<'a>,
    dom: &'a DominationOracle,
    run: FirstRun,
}

impl Builder<'_> {
    fn current(&self) -> &Cirquent {
        self.run.last()
    }

    fn ids(&self) -> &[usize] {
        &self.run.last_images().ids
    }

    fn step(&mut self, stage: u8, rule: Rule, ids: Vec<usize>) -> Result<(), DerivationError> {
        let next = apply_rule(self.current(), &rule)?;
        self.run.cirquents.push(next);
        self.run.images.push(ImageMap { ids });
        self.run.steps.push(StageStep {
            stage,
            rule,
            completes: true,
        });
        Ok(())
    }

    fn mismatch(slot: usize, reason: impl Into<String>) -> DerivationError {
        DerivationError::ImageMismatch {
            slot,
            reason: reason.into(),
        }
    }

    /// Children of the image of `slot`: a conjunction when `conj`, else a
    /// disjunction.
    fn image_children(&self, slot: usize, conj: bool) -> Result<Vec<usize>, DerivationError> {
        let id = self.ids()[slot];
        match (&self.f4.nodes[id].node, conj) {
            (HyperNode::And(_), true) | (HyperNode::Or(_), false) => Ok(self.f4.children[id].clone()),
            _ => Err(Self::mismatch(
                slot,
                format!("expected {}, found `{}`", if conj { "and" } else { "or" }, self.f4.nodes[id]),
            )),
        }
    }

    fn stage1(&mut self) -> Result<bool, DerivationError> {
        let mut changed = false;
        loop {
            let found = self.current().slots.iter().position(|s| {
                !s.checked && matches!(s.formula.connective(), Connective::And | Connective::Or)
            });
            let Some(s) = found else { return Ok(changed) };
            let conj = self.current().slots[s].formula.connective() == Connective::And;
            let kids = self.image_children(s, conj)?;
            if kids.len() != 2 {
                return Err(Self::mismatch(s, format!("{} children instead of 2", kids.len())));
            }
            let mut ids = self.ids().to_vec();
            ids[s] = kids[0];
            ids.insert(s + 1, kids[1]);
            let rule = if conj {
                Rule::ConjunctionIntroduction { slot: s }
            } else {
                Rule::DisjunctionIntroduction { slot: s }
            };
            self.step(1, rule, ids)?;
            changed = true;
        }
    }

    fn stage2(&mut self) -> Result<bool, DerivationError> {
        let mut changed = false;
        loop {
            let found = self
                .current()
                .slots
                .iter()
                .position(|s| s.formula.connective() == Connective::Rec);
            let Some(s) = found else { return Ok(changed) };
            let kids = self.image_children(s, true)?;
            if kids.len() != 1 {
                return Err(Self::mismatch(s, format!("{} children instead of 1", kids.len())));
            }
            let label = self
                .f4
                .origin_unit(self.ids()[s])
                .ok_or_else(|| Self::mismatch(s, "image has no origin"))?
                .clone();
            let mut ids = self.ids().to_vec();
            ids[s] = kids[0];
            let annotation = Annotation::Label(label);
            self.step(2, Rule::RecurrenceIntroduction { slot: s, annotation }, ids)?;
            changed = true;
        }
    }

    fn stage3(&mut self) -> Result<bool, DerivationError> {
        let mut changed = false;
        loop {
            let found = self
                .current()
                .slots
                .iter()
                .position(|s| !s.checked && s.formula.connective() == Connective::Corec);
            let Some(s) = found else { return Ok(changed) };
            let kids = self.image_children(s, false)?;
            if kids.is_empty() {
                return Err(Self::mismatch(s, "empty disjunction"));
            }
            // The remainder at `s` keeps the disjunction's image; each split-off
            // copy at `s + 1` is checked and takes the last disjunct not yet
            // handed out.
            let n = kids.len();
            for k in 1..n {
                let mut ids = self.ids().to_vec();
                ids.insert(s + 1, kids[n - k]);
                self.step(3, Rule::Contraction { slot: s }, ids)?;
                self.run.steps.last_mut().expect("just pushed").completes = k + 1 == n;
                let last = self.run.cirquents.len() - 1;
                self.run.cirquents[last].slots[s + 1].checked = true;
            }
            let last = self.run.cirquents.len() - 1;
            self.run.cirquents[last].slots[s].checked = true;
            self.run.images[last].ids[s] = kids[0];
            changed = true;
        }
    }

    fn stage4(&mut self) -> Result<bool, DerivationError> {
        let mut changed = false;
        loop {
            let c = self.current();
            let labels: BTreeMap<&UnitRef, Vec<usize>> =
                c.overgroups.iter().enumerate().fold(BTreeMap::new(), |mut m, (i, o)| {
                    if let Annotation::Label(u) = &o.annotation {
                        m.entry(u).or_insert_with(Vec::new).push(i);
                    }
                    m
                });
            let mut pick = None;
            for (s, slot) in c.slots.iter().enumerate() {
                if !slot.checked {
                    continue;
                }
                let Some(origin) = self.f4.origin_unit(self.ids()[s]) else {
                    return Err(Self::mismatch(s, "image has no origin"));
                };
                let dominators: Vec<&UnitRef> = self.dom.dominators_of(origin).collect();
                if dominators.iter().all(|d| labels.contains_key(d)) {
                    let overgroups: BTreeSet<usize> = dominators
                        .iter()
                        .flat_map(|d| labels[d].iter().copied())
                        .filter(|&o| !c.overgroups[o].members.contains(&s))
                        .collect();
                    pick = Some((s, overgroups));
                    break;
                }
            }
            let Some((slot, overgroups)) = pick else { return Ok(changed) };
            let ids = self.ids().to_vec();
            self.step(4, Rule::CorecurrenceIntroduction { slot, overgroups }, ids)?;
            changed = true;
        }
    }
}

/// Runs the four stages from the initial cirquent of `f`, whose image is
/// `f4`, until a whole sweep changes nothing.
pub fn run_first(f: &Formula, f4: &Hyper, dom: &DominationOracle) -> Result<FirstRun, DerivationError> {
    let f4i = Indexed::new(f4);
    let cap = 4 * f4i.nodes.len() + 8;
    let mut b = Builder {
        f4: f4i,
        dom,
        run: FirstRun {
            cirquents: vec![Cirquent::initial(f)],
            images: vec![ImageMap { ids: vec![0] }],
            steps: Vec::new(),
        },
    };
    for _ in 0..cap {
        let mut changed = b.stage1()?;
        changed |= b.stage2()?;
        changed |= b.stage3()?;
        changed |= b.stage4()?;
        if !changed {
            return Ok(b.run);
        }
    }
    Err(DerivationError::SweepCap {
        sweeps: cap,
        cirquent: write_cirquent(b.current()),
    })
}
