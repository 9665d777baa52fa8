//! Exhaustive search for a total resolution whose domination audit passes
//! and whose trimmed image is tautological.

use super::{
    audit_resolution, build_tree, opposite_pairs, AnalysisError, OppositionPairing, Resolution,
    DEFAULT_NODE_BUDGET,
};
use crate::formula::Formula;
use crate::game::Run;
use crate::hyper::{build_hyperformula, is_tautology, LiteralSource};
use crate::unit::Bits;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest tree built.
    pub nodes: usize,
    /// Total resolutions examined before giving up with an error.
    pub candidates: usize,
}

pub const DEFAULT_CANDIDATE_BUDGET: usize = 10_000;

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            nodes: DEFAULT_NODE_BUDGET,
            candidates: DEFAULT_CANDIDATE_BUDGET,
        }
    }
}

/// Pairs the politeral units of the untrimmed tree from `run`'s numerals,
/// then searches as [`find_total_resolution_with`].
pub fn find_total_resolution(
    f: &Formula,
    h: usize,
    run: &Run,
    budget: SearchBudget,
) -> Result<Option<(Resolution, OppositionPairing)>, AnalysisError> {
    let full = build_tree(f, h, &Resolution::new(), budget.nodes)?;
    let pairing = opposite_pairs(&full, run)?;
    find_total_resolution_with(f, h, &pairing, LiteralSource::Run(run), budget)
}

/// Tries total resolutions in lexicographic order of (unit address,
/// bitstring), always branching on the least unresolved `⫰`-unit of the
/// current trimmed tree. The first candidate whose audit passes under the
/// restricted pairing and whose image is tautological wins.
///
/// With a pairing source the image is built from the restricted pairing.
pub fn find_total_resolution_with(
    f: &Formula,
    h: usize,
    pairing: &OppositionPairing,
    source: LiteralSource<'_>,
    budget: SearchBudget,
) -> Result<Option<(Resolution, OppositionPairing)>, AnalysisError> {
    let mut r = Resolution::new();
    let mut seen = 0usize;
    descend(f, h, pairing, source, budget, &mut r, &mut seen)
}

fn descend(
    f: &Formula,
    h: usize,
    pairing: &OppositionPairing,
    source: LiteralSource<'_>,
    budget: SearchBudget,
    r: &mut Resolution,
    seen: &mut usize,
) -> Result<Option<(Resolution, OppositionPairing)>, AnalysisError> {
    let t = build_tree(f, h, r, budget.nodes)?;
    if let Some(id) = t.first_unresolved() {
        let unit = t.unit(id).clone();
        for b in Bits::all_of_length(h) {
            r.insert(unit.clone(), b);
            if let Some(found) = descend(f, h, pairing, source, budget, r, seen)? {
                return Ok(Some(found));
            }
        }
        r.remove(&unit);
        return Ok(None);
    }
    *seen += 1;
    if *seen > budget.candidates {
        return Err(AnalysisError::CandidateBudget {
            limit: budget.candidates,
        });
    }
    let restricted = pairing.restrict(&t);
    if !audit_resolution(&t, &restricted)?.passes() {
        return Ok(None);
    }
    let image = match source {
        LiteralSource::Run(run) => build_hyperformula(&t, LiteralSource::Run(run))?,
        LiteralSource::Pairing(_) => build_hyperformula(&t, LiteralSource::Pairing(&restricted))?,
    };
    if is_tautology(&image)? {
        Ok(Some((r.clone(), restricted)))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::res;
    use super::*;
    use crate::formula::parse_formula;
    use crate::game::{play_match, run_counterstrategy, Copycat, Silent, DEFAULT_MOVE_BUDGET};

    #[test]
    fn copycat_formula_resolves_to_the_first_branch() {
        let f = parse_formula("?~P | !P").unwrap();
        let run = play_match(&f, Copycat::new(&f), 2, DEFAULT_MOVE_BUDGET).unwrap().hpm;
        let (r, p) = find_total_resolution(&f, 1, &run, SearchBudget::default())
            .unwrap()
            .unwrap();
        assert_eq!(r, res(&[("1@", "0")]));
        assert!(p.are_paired(&"00@0".parse().unwrap(), &"10@0".parse().unwrap()));
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn trivial_and_refutable_cases() {
        let p = parse_formula("P | ~P").unwrap();
        let run = play_match(&p, Copycat::new(&p), 1, DEFAULT_MOVE_BUDGET).unwrap().hpm;
        let (r, _) = find_total_resolution(&p, 0, &run, SearchBudget::default()).unwrap().unwrap();
        assert!(r.is_empty());
        let single = parse_formula("P").unwrap();
        assert_eq!(find_total_resolution(&single, 0, &Run::new(), SearchBudget::default()).unwrap(), None);
        let rec = parse_formula("!P").unwrap();
        let silent = run_counterstrategy(&rec, Silent, 2, DEFAULT_MOVE_BUDGET).unwrap();
        assert_eq!(find_total_resolution(&rec, 1, &silent, SearchBudget::default()).unwrap(), None);
    }

    #[test]
    fn candidate_budget_is_an_error() {
        let f = parse_formula("!P & !Q").unwrap();
        let budget = SearchBudget { candidates: 2, ..SearchBudget::default() };
        assert_eq!(
            find_total_resolution(&f, 1, &Run::new(), budget).unwrap_err(),
            AnalysisError::CandidateBudget { limit: 2 }
        );
    }
}
