//! Height-`h` truncations of the unit tree and the structural relations on
//! them: driving, opposition, visibility and domination.
//!
//! A node's bitstrings all have length `h`; each stands for the cylinder of
//! infinite bitstrings extending it.

mod domination;
mod maturity;
mod opposition;
mod relations;
mod search;

pub use domination::{audit_resolution, dominated_set, dominates, AuditReport, ChainLink, Domination};
pub use maturity::{dm_incomparable, incomparable, mature, restrict_at};
pub use opposition::{
    numerals_in, opposite_pairs, parse_pairing, parse_resolution, write_pairing, write_resolution,
    OppositionPairing, Provenance,
};
pub use relations::{drives, smallest_common_superunit, strictly_drives, visible};
pub use search::{
    find_total_resolution, find_total_resolution_with, SearchBudget, DEFAULT_CANDIDATE_BUDGET,
};

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::formula::{Connective, Formula};
use crate::game::{funit_address, address_string, MoveError};
use crate::hyper::HyperError;
use crate::unit::{Bits, UnitRef};

pub const DEFAULT_NODE_BUDGET: usize = 100_000;

/// Resolved `⫰`-units and their resolvent bitstrings; absent units are
/// unresolved.
pub type Resolution = BTreeMap<UnitRef, Bits>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("unit tree exceeds the node budget of {limit}")]
    NodeBudget { limit: usize },
    #[error("bad resolution entry {unit}: {reason}")]
    BadResolution { unit: UnitRef, reason: String },
    #[error("unit {0} is not in the tree")]
    NodeAbsent(UnitRef),
    #[error("unit {0} is not a recurrence unit")]
    NotRecurrence(UnitRef),
    #[error("resolution is not total: {0} is unresolved")]
    NotTotal(UnitRef),
    #[error("bad pairing: {0}")]
    BadPairing(String),
    #[error("more than {limit} candidate resolutions")]
    CandidateBudget { limit: usize },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Hyper(#[from] HyperError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub unit: UnitRef,
    pub connective: Connective,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// A finite unit tree. Node ids are preorder positions, so the subunits of
/// node `i` are exactly the ids in `i..end(i)`.
#[derive(Debug, Clone)]
pub struct TruncUnitTree {
    formula: Formula,
    height: usize,
    resolution: Resolution,
    nodes: Vec<Node>,
    end: Vec<usize>,
    index: HashMap<UnitRef, usize>,
}

impl TruncUnitTree {
    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> &Resolution {
        &self.resolution
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn unit(&self, id: usize) -> &UnitRef {
        &self.nodes[id].unit
    }

    pub fn id(&self, unit: &UnitRef) -> Option<usize> {
        self.index.get(unit).copied()
    }

    pub fn contains(&self, unit: &UnitRef) -> bool {
        self.index.contains_key(unit)
    }

    pub(crate) fn require(&self, unit: &UnitRef) -> Result<usize, AnalysisError> {
        self.id(unit)
            .ok_or_else(|| AnalysisError::NodeAbsent(unit.clone()))
    }

    /// `sub` is `sup` or lies below it.
    pub fn is_subunit_id(&self, sub: usize, sup: usize) -> bool {
        sup <= sub && sub < self.end[sup]
    }

    /// Ids of the subunits of `id`, itself included.
    pub fn subtree(&self, id: usize) -> std::ops::Range<usize> {
        id..self.end[id]
    }

    pub fn politeral_ids(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.nodes[i].connective == Connective::Literal)
    }

    pub fn recurrence_ids(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.nodes[i].connective == Connective::Rec)
    }

    /// Every `⫰`-unit of the tree is resolved.
    pub fn is_total(&self) -> bool {
        self.first_unresolved().is_none()
    }

    /// The unresolved `⫰`-unit with the least address, if any.
    pub fn first_unresolved(&self) -> Option<usize> {
        self.recurrence_ids()
            .filter(|&i| !self.resolution.contains_key(self.unit(i)))
            .min_by_key(|&i| self.address(i))
    }

    /// Serialized address of a node.
    pub fn address(&self, id: usize) -> String {
        address_string(&funit_address(&self.formula, self.unit(id)).expect("tree unit fits"))
    }

    /// Proper superunits from the parent up to the root.
    pub fn ancestors(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self.nodes[id].parent;
        while let Some(p) = cur {
            out.push(p);
            cur = self.nodes[p].parent;
        }
        out
    }
}

fn validate_resolution(f: &Formula, h: usize, r: &Resolution) -> Result<(), AnalysisError> {
    for (unit, bits) in r {
        let bad = |reason: &str| AnalysisError::BadResolution {
            unit: unit.clone(),
            reason: reason.to_string(),
        };
        if !unit.fits(f) {
            return Err(bad("does not fit the formula"));
        }
        if f.subformula_at(&unit.position).map(Formula::connective) != Ok(Connective::Rec) {
            return Err(bad("not a recurrence unit"));
        }
        if unit.branches.iter().any(|b| b.len() != h) || bits.len() != h {
            return Err(bad("bitstrings must have the tree height"));
        }
    }
    Ok(())
}

/// Builds the height-`h` truncation trimmed by resolution `r`.
pub fn build_tree(
    f: &Formula,
    h: usize,
    r: &Resolution,
    budget: usize,
) -> Result<TruncUnitTree, AnalysisError> {
    validate_resolution(f, h, r)?;
    let mut t = TruncUnitTree {
        formula: f.clone(),
        height: h,
        resolution: r.clone(),
        nodes: Vec::new(),
        end: Vec::new(),
        index: HashMap::new(),
    };
    let branches = Bits::all_of_length(h);
    grow(&mut t, f, UnitRef::root(), None, &branches, budget)?;
    Ok(t)
}

fn grow(
    t: &mut TruncUnitTree,
    node: &Formula,
    unit: UnitRef,
    parent: Option<usize>,
    branches: &[Bits],
    budget: usize,
) -> Result<usize, AnalysisError> {
    if t.nodes.len() >= budget {
        return Err(AnalysisError::NodeBudget { limit: budget });
    }
    let id = t.nodes.len();
    t.nodes.push(Node {
        unit: unit.clone(),
        connective: node.connective(),
        parent,
        children: Vec::new(),
    });
    t.end.push(0);
    t.index.insert(unit.clone(), id);
    let mut kids: Vec<(&Formula, UnitRef)> = Vec::new();
    match node.connective() {
        Connective::Literal => {}
        Connective::And | Connective::Or => {
            for (i, c) in node.children().into_iter().enumerate() {
                kids.push((c, UnitRef::new(unit.position.child(i as u8), unit.branches.clone())));
            }
        }
        Connective::Rec | Connective::Corec => {
            let body = node.child(0).expect("modal node has a body");
            let chosen: Vec<Bits> = match (node.connective(), t.resolution.get(&unit)) {
                (Connective::Rec, Some(b)) => vec![b.clone()],
                _ => branches.to_vec(),
            };
            for b in chosen {
                let mut bs = unit.branches.clone();
                bs.push(b);
                kids.push((body, UnitRef::new(unit.position.child(0), bs)));
            }
        }
    }
    for (c, u) in kids {
        let child = grow(t, c, u, Some(id), branches, budget)?;
        t.nodes[id].children.push(child);
    }
    t.end[id] = t.nodes.len();
    Ok(id)
}
