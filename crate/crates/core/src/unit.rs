//! Bitstrings and unit references shared by the game runtime, the unit-tree
//! analysis and the cirquent labels.
//!
//! A [`UnitRef`] is an osubformula position together with one bitstring per
//! modal ancestor. The same shape serves as a funit (finite bitstrings of any
//! length) and as a node of a height-`h` truncated unit tree, where each
//! length-`h` bitstring stands for all of its infinite extensions.
//!
//! Text syntax: `<path>@<bits>,<bits>,...` with `e` for the empty bitstring,
//! e.g. `@` (root), `0@` (`⫯¬P[]` in `?~P | !P`), `10@0` (`P[0]`).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::formula::{Connective, Formula, Position};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnitSyntaxError {
    #[error("bad bitstring {0:?}")]
    Bits(String),
    #[error("bad unit {0:?}: expected <path>@<bits,...>")]
    Unit(String),
}

/// A finite bitstring.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(String);

impl Bits {
    pub fn empty() -> Bits {
        Bits(String::new())
    }

    pub fn new(s: &str) -> Result<Bits, UnitSyntaxError> {
        if s.chars().all(|c| c == '0' || c == '1') {
            Ok(Bits(s.to_string()))
        } else {
            Err(UnitSyntaxError::Bits(s.to_string()))
        }
    }

    /// The `len`-bit binary expansion of `value`, most significant bit first.
    pub fn from_index(value: usize, len: usize) -> Bits {
        Bits((0..len)
            .rev()
            .map(|i| if (value >> i) & 1 == 1 { '1' } else { '0' })
            .collect())
    }

    /// All bitstrings of length `len` in lexicographic order.
    pub fn all_of_length(len: usize) -> Vec<Bits> {
        (0..1usize << len).map(|v| Bits::from_index(v, len)).collect()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_prefix_of(&self, other: &Bits) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn prefix(&self, len: usize) -> Bits {
        Bits(self.0[..len.min(self.0.len())].to_string())
    }

    /// Token form used in unit syntax and resolution files (`e` when empty).
    pub fn token(&self) -> String {
        if self.0.is_empty() {
            "e".to_string()
        } else {
            self.0.clone()
        }
    }

    pub fn from_token(s: &str) -> Result<Bits, UnitSyntaxError> {
        if s == "e" {
            Ok(Bits::empty())
        } else if s.is_empty() {
            Err(UnitSyntaxError::Bits(s.to_string()))
        } else {
            Bits::new(s)
        }
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An osubformula position plus one bitstring per modal ancestor.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitRef {
    pub position: Position,
    pub branches: Vec<Bits>,
}

impl UnitRef {
    pub fn new(position: Position, branches: Vec<Bits>) -> UnitRef {
        UnitRef { position, branches }
    }

    pub fn root() -> UnitRef {
        UnitRef::default()
    }

    /// Longest bitstring length (0 when there are none).
    pub fn height(&self) -> usize {
        self.branches.iter().map(Bits::len).max().unwrap_or(0)
    }

    /// All bitstrings have the same length.
    pub fn is_regular(&self) -> bool {
        self.branches.windows(2).all(|w| w[0].len() == w[1].len())
    }

    /// Reflexive subunit relation: `self` lies at or below `other`.
    pub fn is_subunit_of(&self, other: &UnitRef) -> bool {
        other.position.is_prefix_of(&self.position)
            && self.branches.len() >= other.branches.len()
            && self.branches[..other.branches.len()] == other.branches[..]
    }

    pub fn is_proper_subunit_of(&self, other: &UnitRef) -> bool {
        self != other && self.is_subunit_of(other)
    }

    /// Checks the shape against `formula`: the position exists and there is
    /// one bitstring per modal ancestor.
    pub fn fits(&self, formula: &Formula) -> bool {
        formula
            .modal_depth(&self.position)
            .map(|d| d == self.branches.len())
            .unwrap_or(false)
    }

    /// The parent unit, computed against `formula`.
    pub fn parent(&self, formula: &Formula) -> Option<UnitRef> {
        let parent_pos = self.position.parent()?;
        let node = formula.subformula_at(&parent_pos).ok()?;
        let mut branches = self.branches.clone();
        if matches!(node.connective(), Connective::Rec | Connective::Corec) {
            branches.pop();
        }
        Some(UnitRef::new(parent_pos, branches))
    }

    /// Proper superunits from the parent up to the root.
    pub fn ancestors(&self, formula: &Formula) -> Vec<UnitRef> {
        let mut out = Vec::new();
        let mut cur = self.parent(formula);
        while let Some(u) = cur {
            cur = u.parent(formula);
            out.push(u);
        }
        out
    }
}

impl fmt::Display for UnitRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@", self.position)?;
        let tokens: Vec<String> = self.branches.iter().map(Bits::token).collect();
        f.write_str(&tokens.join(","))
    }
}

impl FromStr for UnitRef {
    type Err = UnitSyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (path, bits) = s
            .split_once('@')
            .ok_or_else(|| UnitSyntaxError::Unit(s.to_string()))?;
        let position: Position = path
            .parse()
            .map_err(|_| UnitSyntaxError::Unit(s.to_string()))?;
        let branches = if bits.is_empty() {
            Vec::new()
        } else {
            bits.split(',')
                .map(Bits::from_token)
                .collect::<Result<Vec<_>, _>>()?
        };
        Ok(UnitRef { position, branches })
    }
}
