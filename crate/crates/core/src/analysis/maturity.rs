//! Funital restrictions of units at a time `m` and chain maturity.

use super::{AnalysisError, ChainLink};
use crate::formula::Formula;
use crate::game::{address_string, funit_address, max_active_height, Funit, Run};
use crate::unit::UnitRef;

/// `E↓m`: `unit` with every bitstring cut to the greatest height of a funit
/// active in `Ω_m` (`0` when none is). `None` when a bitstring is shorter
/// than that height, i.e. the tree is too low to tell.
pub fn restrict_at(
    f: &Formula,
    unit: &UnitRef,
    run: &Run,
    m: u64,
) -> Result<Option<Funit>, AnalysisError> {
    if unit.branches.is_empty() {
        return Ok(Some(unit.clone()));
    }
    let hm = max_active_height(f, &run.up_to(m))?.unwrap_or(0);
    if unit.branches.iter().any(|b| b.len() < hm) {
        return Ok(None);
    }
    Ok(Some(UnitRef::new(
        unit.position.clone(),
        unit.branches.iter().map(|b| b.prefix(hm)).collect(),
    )))
}

/// Neither unit is a subunit of the other.
pub fn incomparable(a: &UnitRef, b: &UnitRef) -> bool {
    !a.is_subunit_of(b) && !b.is_subunit_of(a)
}

/// The addresses of `a↓m` and `b↓m` are neither prefixes nor extensions of
/// each other. `None` when a restriction is undefined.
pub fn dm_incomparable(
    f: &Formula,
    a: &UnitRef,
    b: &UnitRef,
    run: &Run,
    m: u64,
) -> Result<Option<bool>, AnalysisError> {
    let (Some(ra), Some(rb)) = (restrict_at(f, a, run, m)?, restrict_at(f, b, run, m)?) else {
        return Ok(None);
    };
    let sa = address_string(&funit_address(f, &ra)?);
    let sb = address_string(&funit_address(f, &rb)?);
    Ok(Some(!sa.starts_with(&sb) && !sb.starts_with(&sa)))
}

/// Every incomparable pair of superunits of chain `M`s is also
/// `↓m`-incomparable. `None` when some restriction is undefined.
pub fn mature(
    f: &Formula,
    chain: &[ChainLink],
    run: &Run,
    m: u64,
) -> Result<Option<bool>, AnalysisError> {
    let supers: Vec<UnitRef> = chain
        .iter()
        .flat_map(|c| std::iter::once(c.m.clone()).chain(c.m.ancestors(f)))
        .collect();
    for (i, a) in supers.iter().enumerate() {
        for b in &supers[i + 1..] {
            if !incomparable(a, b) {
                continue;
            }
            match dm_incomparable(f, a, b, run, m)? {
                None => return Ok(None),
                Some(false) => return Ok(Some(false)),
                Some(true) => {}
            }
        }
    }
    Ok(Some(true))
}
