//! Hyperformulas: the propositional image of a unit tree, with each
//! politeral unit replaced by a hyperliteral built from the numerals played
//! inside it.

mod finitize;

pub use finitize::{finitize, is_pruning_of};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::analysis::{build_tree, AnalysisError, OppositionPairing, Resolution, TruncUnitTree};
use crate::formula::{Connective, Formula};
use crate::game::{project, MoveError, Player, Run};
use crate::unit::UnitRef;

/// Default limit on distinct hyperatoms for truth-table checks.
pub const ATOM_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HyperError {
    #[error("{count} distinct hyperatoms exceed the cap of {cap}")]
    TooManyAtoms { count: usize, cap: usize },
    #[error("hyperformula is not tautological")]
    NotTautological,
    #[error("unit {0} is not a politeral unit")]
    NotPoliteral(UnitRef),
    #[error(transparent)]
    Move(#[from] MoveError),
}

/// `(P, A, B)`: an atom with the numerals enumerated by the adversary (`A`)
/// and by the counterstrategy (`B`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperatom {
    pub atom: String,
    pub a: BTreeSet<u64>,
    pub b: BTreeSet<u64>,
}

impl Hyperatom {
    pub fn new(
        atom: &str,
        a: impl IntoIterator<Item = u64>,
        b: impl IntoIterator<Item = u64>,
    ) -> Hyperatom {
        Hyperatom {
            atom: atom.to_string(),
            a: a.into_iter().collect(),
            b: b.into_iter().collect(),
        }
    }
}

fn set_text(s: &BTreeSet<u64>) -> String {
    let items: Vec<String> = s.iter().map(u64::to_string).collect();
    format!("{{{}}}", items.join(","))
}

impl fmt::Display for Hyperatom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.atom, set_text(&self.a), set_text(&self.b))
    }
}

/// The unit a hyperformula node stems from, with that unit's connective.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Origin {
    pub unit: UnitRef,
    pub connective: Connective,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HyperNode {
    Lit { atom: Hyperatom, positive: bool },
    And(Vec<Hyper>),
    Or(Vec<Hyper>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hyper {
    pub node: HyperNode,
    pub origin: Option<Origin>,
}

impl Hyper {
    pub fn lit(atom: Hyperatom, positive: bool) -> Hyper {
        Hyper {
            node: HyperNode::Lit { atom, positive },
            origin: None,
        }
    }

    pub fn and(children: Vec<Hyper>) -> Hyper {
        Hyper {
            node: HyperNode::And(children),
            origin: None,
        }
    }

    pub fn or(children: Vec<Hyper>) -> Hyper {
        Hyper {
            node: HyperNode::Or(children),
            origin: None,
        }
    }

    pub fn with_origin(mut self, unit: UnitRef, connective: Connective) -> Hyper {
        self.origin = Some(Origin { unit, connective });
        self
    }

    pub fn children(&self) -> &[Hyper] {
        match &self.node {
            HyperNode::Lit { .. } => &[],
            HyperNode::And(c) | HyperNode::Or(c) => c,
        }
    }

    pub fn is_lit(&self) -> bool {
        matches!(self.node, HyperNode::Lit { .. })
    }

    /// The hyperliteral opposite to this one.
    pub fn opposite(&self) -> Option<Hyper> {
        match &self.node {
            HyperNode::Lit { atom, positive } => Some(Hyper {
                node: HyperNode::Lit {
                    atom: atom.clone(),
                    positive: !positive,
                },
                origin: self.origin.clone(),
            }),
            _ => None,
        }
    }

    /// Both are hyperliterals over the same hyperatom with opposite signs.
    pub fn is_opposite_to(&self, other: &Hyper) -> bool {
        match (&self.node, &other.node) {
            (
                HyperNode::Lit { atom: a, positive: p },
                HyperNode::Lit { atom: b, positive: q },
            ) => a == b && p != q,
            _ => false,
        }
    }

    /// Nodes in preorder.
    pub fn preorder(&self) -> Vec<&Hyper> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            out.push(node);
            stack.extend(node.children().iter().rev());
        }
        out
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(Hyper::size).sum::<usize>()
    }

    /// Distinct hyperatoms in order of first occurrence.
    pub fn atoms(&self) -> Vec<Hyperatom> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for n in self.preorder() {
            if let HyperNode::Lit { atom, .. } = &n.node {
                if seen.insert(atom.clone()) {
                    out.push(atom.clone());
                }
            }
        }
        out
    }

    pub fn evaluate(&self, value: &dyn Fn(&Hyperatom) -> bool) -> bool {
        match &self.node {
            HyperNode::Lit { atom, positive } => value(atom) == *positive,
            HyperNode::And(c) => c.iter().all(|x| x.evaluate(value)),
            HyperNode::Or(c) => c.iter().any(|x| x.evaluate(value)),
        }
    }
}

impl fmt::Display for Hyper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            HyperNode::Lit { atom, positive } => {
                write!(f, "{}lit {atom}", if *positive { "" } else { "~" })?
            }
            HyperNode::And(c) | HyperNode::Or(c) => {
                let name = if matches!(self.node, HyperNode::And(_)) { "and" } else { "or" };
                write!(f, "{name}(")?;
                for (i, x) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")?;
            }
        }
        if let Some(o) = &self.origin {
            write!(f, "[{}]", o.unit)?;
        }
        Ok(())
    }
}

/// At most one positive and at most one negative occurrence of every
/// hyperatom.
pub fn is_binary(h: &Hyper) -> bool {
    let mut seen = HashMap::new();
    for n in h.preorder() {
        if let HyperNode::Lit { atom, positive } = &n.node {
            let count = seen.entry((atom, *positive)).or_insert(0);
            *count += 1;
            if *count > 1 {
                return false;
            }
        }
    }
    true
}

/// Truth assignment to hyperatoms; unmapped ones take the default.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Hypermodel {
    pub values: BTreeMap<Hyperatom, bool>,
    pub default: bool,
}

impl Hypermodel {
    pub fn new(default: bool) -> Hypermodel {
        Hypermodel {
            values: BTreeMap::new(),
            default,
        }
    }

    pub fn set(mut self, atom: Hyperatom, value: bool) -> Hypermodel {
        self.values.insert(atom, value);
        self
    }

    pub fn value(&self, atom: &Hyperatom) -> bool {
        self.values.get(atom).copied().unwrap_or(self.default)
    }

    pub fn satisfies(&self, h: &Hyper) -> bool {
        h.evaluate(&|a| self.value(a))
    }
}

/// Node of a hyperformula compiled to atom indices for fast evaluation.
enum Compiled {
    Lit(usize, bool),
    And(Vec<Compiled>),
    Or(Vec<Compiled>),
}

impl Compiled {
    fn eval(&self, bits: u64) -> bool {
        match self {
            Compiled::Lit(i, p) => ((bits >> i) & 1 == 1) == *p,
            Compiled::And(c) => c.iter().all(|x| x.eval(bits)),
            Compiled::Or(c) => c.iter().any(|x| x.eval(bits)),
        }
    }
}

fn compile(h: &Hyper, index: &HashMap<Hyperatom, usize>) -> Compiled {
    match &h.node {
        HyperNode::Lit { atom, positive } => Compiled::Lit(index[atom], *positive),
        HyperNode::And(c) => Compiled::And(c.iter().map(|x| compile(x, index)).collect()),
        HyperNode::Or(c) => Compiled::Or(c.iter().map(|x| compile(x, index)).collect()),
    }
}

/// A hypermodel falsifying `h`, found by trying all assignments to its
/// hyperatoms; `None` when `h` is tautological.
pub fn counter_model(h: &Hyper, cap: usize) -> Result<Option<Hypermodel>, HyperError> {
    let atoms = h.atoms();
    if atoms.len() > cap.min(63) {
        return Err(HyperError::TooManyAtoms {
            count: atoms.len(),
            cap,
        });
    }
    let index: HashMap<Hyperatom, usize> =
        atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
    let c = compile(h, &index);
    for bits in 0..1u64 << atoms.len() {
        if !c.eval(bits) {
            let mut model = Hypermodel::new(false);
            for (i, a) in atoms.iter().enumerate() {
                model.values.insert(a.clone(), (bits >> i) & 1 == 1);
            }
            return Ok(Some(model));
        }
    }
    Ok(None)
}

/// Every hypermodel makes `h` true. Limited to [`ATOM_CAP`] hyperatoms.
pub fn is_tautology(h: &Hyper) -> Result<bool, HyperError> {
    Ok(counter_model(h, ATOM_CAP)?.is_none())
}

/// Where hyperliterals come from.
#[derive(Debug, Clone, Copy)]
pub enum LiteralSource<'a> {
    /// Numerals played inside each politeral unit.
    Run(&'a Run),
    /// A pairing alone: paired units share a hyperatom, every other unit
    /// gets one of its own.
    Pairing(&'a OppositionPairing),
}

/// `L°`: `(P, A, B)` for a politeral unit with origin `P`, `¬(P, B, A)` for
/// one with origin `¬P`, where `A` and `B` are the numerals enumerated in
/// the unit by the adversary and by the counterstrategy.
pub fn hyperliteral_of(f: &Formula, unit: &UnitRef, run: &Run) -> Result<Hyper, HyperError> {
    let (atom, positive) = f
        .subformula_at(&unit.position)
        .ok()
        .and_then(Formula::literal)
        .filter(|_| unit.fits(f))
        .ok_or_else(|| HyperError::NotPoliteral(unit.clone()))?;
    let p = project(run, f, unit)?;
    let (a, b) = (p.numerals_of(Player::Top), p.numerals_of(Player::Bottom));
    let hatom = if positive {
        Hyperatom { atom: atom.to_string(), a, b }
    } else {
        Hyperatom { atom: atom.to_string(), a: b, b: a }
    };
    Ok(Hyper::lit(hatom, positive).with_origin(unit.clone(), Connective::Literal))
}

/// Synthetic hyperatoms for a pairing: each connected class of paired units
/// is keyed by the tree id of its first member.
fn pairing_atoms(t: &TruncUnitTree, p: &OppositionPairing) -> HashMap<usize, u64> {
    let mut class: HashMap<usize, u64> = HashMap::new();
    for start in t.politeral_ids() {
        if class.contains_key(&start) {
            continue;
        }
        let key = start as u64;
        let mut stack = vec![start];
        class.insert(start, key);
        while let Some(x) = stack.pop() {
            for y in p.partners(t.unit(x)).filter_map(|y| t.id(y)) {
                if class.insert(y, key).is_none() {
                    stack.push(y);
                }
            }
        }
    }
    class
}

/// The image of `t`: `∧`/`⫰` units become conjunctions, `∨`/`⫯` units
/// disjunctions, politeral units their hyperliterals.
pub fn build_hyperformula(t: &TruncUnitTree, source: LiteralSource<'_>) -> Result<Hyper, HyperError> {
    let classes = match source {
        LiteralSource::Pairing(p) => Some(pairing_atoms(t, p)),
        LiteralSource::Run(_) => None,
    };
    image(t, 0, source, classes.as_ref())
}

fn image(
    t: &TruncUnitTree,
    id: usize,
    source: LiteralSource<'_>,
    classes: Option<&HashMap<usize, u64>>,
) -> Result<Hyper, HyperError> {
    let node = t.node(id);
    let children = || -> Result<Vec<Hyper>, HyperError> {
        node.children.iter().map(|&c| image(t, c, source, classes)).collect()
    };
    let h = match node.connective {
        Connective::Literal => match (source, classes) {
            (LiteralSource::Run(run), _) => return hyperliteral_of(t.formula(), &node.unit, run),
            (LiteralSource::Pairing(_), Some(classes)) => {
                let (atom, positive) = t
                    .formula()
                    .subformula_at(&node.unit.position)
                    .ok()
                    .and_then(Formula::literal)
                    .expect("politeral node");
                Hyper::lit(Hyperatom::new(atom, [classes[&id]], []), positive)
            }
            (LiteralSource::Pairing(_), None) => unreachable!("classes are built for pairings"),
        },
        Connective::And | Connective::Rec => Hyper::and(children()?),
        Connective::Or | Connective::Corec => Hyper::or(children()?),
    };
    Ok(h.with_origin(node.unit.clone(), node.connective))
}

/// Winner of `run` under `model`: `⊤` iff the model makes the image of the
/// untrimmed height-`height` tree true.
pub fn verdict(
    f: &Formula,
    run: &Run,
    model: &Hypermodel,
    height: usize,
    node_budget: usize,
) -> Result<Player, AnalysisError> {
    let t = build_tree(f, height, &Resolution::new(), node_budget)?;
    let h = build_hyperformula(&t, LiteralSource::Run(run))?;
    Ok(if model.satisfies(&h) { Player::Top } else { Player::Bottom })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::analysis::DEFAULT_NODE_BUDGET;
    use crate::formula::parse_formula;
    use crate::game::{play_match, run_counterstrategy, Copycat, Silent, DEFAULT_MOVE_BUDGET};
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    pub(crate) fn ha(i: u64) -> Hyperatom {
        Hyperatom::new("P", [i], [])
    }

    pub(crate) fn pos(i: u64) -> Hyper {
        Hyper::lit(ha(i), true)
    }

    pub(crate) fn neg(i: u64) -> Hyper {
        Hyper::lit(ha(i), false)
    }

    /// Truth-table oracle written without the compiled evaluator: every
    /// assignment is a map from hyperatom to value.
    pub(crate) fn truth_table(h: &Hyper) -> bool {
        let atoms: Vec<Hyperatom> = h.atoms();
        (0..1u64 << atoms.len()).all(|bits| {
            let m: BTreeMap<&Hyperatom, bool> = atoms
                .iter()
                .enumerate()
                .map(|(i, a)| (a, bits & (1 << i) != 0))
                .collect();
            h.evaluate(&|a| m[a])
        })
    }

    pub(crate) fn arb_hyper(atoms: u64) -> impl Strategy<Value = Hyper> {
        let leaf = (0..atoms, any::<bool>()).prop_map(|(i, p)| Hyper::lit(ha(i), p));
        leaf.prop_recursive(4, 32, 4, |inner| {
            (prop::collection::vec(inner, 1..4), 0u8..4).prop_map(|(c, k)| {
                let u = UnitRef::root();
                match k {
                    0 => Hyper::and(c).with_origin(u, Connective::And),
                    1 => Hyper::and(c).with_origin(u, Connective::Rec),
                    2 => Hyper::or(c).with_origin(u, Connective::Corec),
                    _ => Hyper::or(c).with_origin(u, Connective::Or),
                }
            })
        })
    }

    /// The dual of `h`: literals flipped, conjunctions and disjunctions
    /// swapped, with `⫰`/`⫯` origins swapped to match.
    pub(crate) fn dual(h: &Hyper) -> Hyper {
        let swap = |c: Connective| match c {
            Connective::And => Connective::Or,
            Connective::Or => Connective::And,
            Connective::Rec => Connective::Corec,
            Connective::Corec => Connective::Rec,
            Connective::Literal => Connective::Literal,
        };
        let node = match &h.node {
            HyperNode::Lit { atom, positive } => HyperNode::Lit { atom: atom.clone(), positive: !positive },
            HyperNode::And(c) => HyperNode::Or(c.iter().map(dual).collect()),
            HyperNode::Or(c) => HyperNode::And(c.iter().map(dual).collect()),
        };
        let origin = h.origin.clone().map(|o| Origin { unit: o.unit, connective: swap(o.connective) });
        Hyper { node, origin }
    }

    /// Tautologies of the shape `h ∨ dual(h)`, possibly inside a wider
    /// `⫯`-disjunction with extra disjuncts.
    pub(crate) fn arb_tautology(atoms: u64) -> impl Strategy<Value = Hyper> {
        (arb_hyper(atoms), prop::collection::vec(arb_hyper(atoms), 0..3), any::<bool>()).prop_map(
            |(h, extra, flip)| {
                let mut c = vec![h.clone(), dual(&h)];
                if flip {
                    c.reverse();
                }
                c.extend(extra);
                Hyper::or(c).with_origin(UnitRef::root(), Connective::Corec)
            },
        )
    }

    fn copycat_run(f: &Formula) -> Run {
        play_match(f, Copycat::new(f), 2, DEFAULT_MOVE_BUDGET).unwrap().hpm
    }

    #[test]
    fn hyperliterals_from_projections() {
        let f = parse_formula("?~P | !P").unwrap();
        let run = copycat_run(&f);
        let p0 = hyperliteral_of(&f, &"10@0".parse().unwrap(), &run).unwrap();
        assert_eq!(p0.to_string(), "lit P {0,2} {1,4}[10@0]");
        let n0 = hyperliteral_of(&f, &"00@0".parse().unwrap(), &run).unwrap();
        assert_eq!(n0.to_string(), "~lit P {0,2} {1,4}[00@0]");
        assert!(p0.is_opposite_to(&n0));
        let empty = hyperliteral_of(&f, &"10@1".parse().unwrap(), &Run::new()).unwrap();
        assert_eq!(empty.node, HyperNode::Lit { atom: Hyperatom::new("P", [], []), positive: true });
        assert!(hyperliteral_of(&f, &"1@".parse().unwrap(), &run).is_err());
    }

    #[test]
    fn image_of_the_copycat_tree() {
        let f = parse_formula("?~P | !P").unwrap();
        let run = copycat_run(&f);
        let t = build_tree(&f, 1, &Resolution::new(), DEFAULT_NODE_BUDGET).unwrap();
        let h = build_hyperformula(&t, LiteralSource::Run(&run)).unwrap();
        let a0 = Hyperatom::new("P", [0, 2], [1, 4]);
        let a1 = Hyperatom::new("P", [0, 3], [1, 5]);
        let shape = Hyper::or(vec![
            Hyper::or(vec![Hyper::lit(a0.clone(), false), Hyper::lit(a1.clone(), false)]),
            Hyper::and(vec![Hyper::lit(a0, true), Hyper::lit(a1, true)]),
        ]);
        assert_eq!(strip(&h), shape);
        assert!(is_binary(&h));
        assert!(is_tautology(&h).unwrap());
        let r: Resolution = [("1@".parse().unwrap(), crate::unit::Bits::new("0").unwrap())].into();
        let trimmed = build_tree(&f, 1, &r, DEFAULT_NODE_BUDGET).unwrap();
        let ht = build_hyperformula(&trimmed, LiteralSource::Run(&run)).unwrap();
        assert!(is_tautology(&ht).unwrap());
        assert_eq!(ht.children()[1].children().len(), 1);
    }

    pub(crate) fn strip(h: &Hyper) -> Hyper {
        let node = match &h.node {
            HyperNode::Lit { .. } => h.node.clone(),
            HyperNode::And(c) => HyperNode::And(c.iter().map(strip).collect()),
            HyperNode::Or(c) => HyperNode::Or(c.iter().map(strip).collect()),
        };
        Hyper { node, origin: None }
    }

    #[test]
    fn pairing_source_shares_atoms_between_partners() {
        let f = parse_formula("?~P | !P").unwrap();
        let run = copycat_run(&f);
        let t = build_tree(&f, 1, &Resolution::new(), DEFAULT_NODE_BUDGET).unwrap();
        let p = crate::analysis::opposite_pairs(&t, &run).unwrap();
        let h = build_hyperformula(&t, LiteralSource::Pairing(&p)).unwrap();
        let by_run = build_hyperformula(&t, LiteralSource::Run(&run)).unwrap();
        assert_eq!(h.atoms().len(), by_run.atoms().len());
        assert_eq!(is_tautology(&h).unwrap(), is_tautology(&by_run).unwrap());
    }

    #[test]
    fn small_tautologies() {
        assert!(is_tautology(&Hyper::or(vec![pos(0), neg(0)])).unwrap());
        assert!(!is_tautology(&Hyper::and(vec![pos(0)])).unwrap());
        assert!(!is_binary(&Hyper::or(vec![pos(0), pos(0)])));
        assert!(is_binary(&pos(3)));
        let wide = Hyper::or((0..21).map(pos).collect());
        assert_eq!(
            is_tautology(&wide).unwrap_err(),
            HyperError::TooManyAtoms { count: 21, cap: ATOM_CAP }
        );
    }

    #[test]
    fn counter_models_falsify() {
        let h = Hyper::or(vec![pos(0), Hyper::and(vec![neg(0), pos(1)])]);
        let m = counter_model(&h, ATOM_CAP).unwrap().unwrap();
        assert!(!m.satisfies(&h));
    }

    #[test]
    fn verdicts() {
        let p = parse_formula("P").unwrap();
        assert_eq!(
            verdict(&p, &Run::new(), &Hypermodel::new(false), 0, DEFAULT_NODE_BUDGET).unwrap(),
            Player::Bottom
        );
        let f = parse_formula("?~P | !P").unwrap();
        let run = copycat_run(&f);
        assert_eq!(verdict(&f, &run, &Hypermodel::new(false), 1, DEFAULT_NODE_BUDGET).unwrap(), Player::Top);
        let m = Hypermodel::new(false)
            .set(Hyperatom::new("P", [0, 2], [1, 4]), true)
            .set(Hyperatom::new("P", [0, 3], [1, 5]), true);
        assert_eq!(verdict(&f, &run, &m, 1, DEFAULT_NODE_BUDGET).unwrap(), Player::Top);
        let m = Hypermodel::new(true).set(Hyperatom::new("P", [0, 3], [1, 5]), false);
        assert_eq!(verdict(&f, &run, &m, 1, DEFAULT_NODE_BUDGET).unwrap(), Player::Top);
        let silent = run_counterstrategy(&f, Silent, 2, DEFAULT_MOVE_BUDGET).unwrap();
        let all_true = Hypermodel::new(true);
        assert_eq!(verdict(&f, &silent, &all_true, 1, DEFAULT_NODE_BUDGET).unwrap(), Player::Top);
    }

    proptest! {
        #[test]
        fn tautology_matches_truth_table(h in arb_hyper(5)) {
            prop_assert_eq!(is_tautology(&h).unwrap(), truth_table(&h));
        }

        #[test]
        fn deleting_conjuncts_keeps_tautologies(h in arb_tautology(4), seed in any::<u64>()) {
            let pruned = drop_conjuncts(&h, &mut StdRng::seed_from_u64(seed));
            prop_assert!(truth_table(&pruned));
        }
    }

    /// Randomly deletes conjuncts, keeping at least one per conjunction.
    fn drop_conjuncts(h: &Hyper, rng: &mut StdRng) -> Hyper {
        let node = match &h.node {
            HyperNode::Lit { .. } => h.node.clone(),
            HyperNode::Or(c) => HyperNode::Or(c.iter().map(|x| drop_conjuncts(x, rng)).collect()),
            HyperNode::And(c) => {
                let keep = rng.gen_range(0..c.len());
                let mut kept = Vec::new();
                for (i, x) in c.iter().enumerate() {
                    if i == keep || rng.gen_bool(0.5) {
                        kept.push(drop_conjuncts(x, rng));
                    }
                }
                HyperNode::And(kept)
            }
        };
        Hyper { node, origin: h.origin.clone() }
    }
}
