use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// A point of the domain. The domain is fixed as the positive integers and
/// its canonical enumeration is the identity, so `x_j` has value `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Element(u64);

impl Element {
    pub fn new(value: u64) -> Result<Self> {
        if value == 0 {
            return Err(LabError::config(
                "element",
                "elements are positive integers",
            ));
        }
        Ok(Element(value))
    }

    /// Callers guarantee `value >= 1`.
    pub(crate) const fn from_raw(value: u64) -> Self {
        debug_assert!(value >= 1);
        Element(value)
    }

    pub const fn value(self) -> u64 {
        self.0
    }

    /// Rank in the canonical domain enumeration (1-based).
    pub const fn rank(self) -> u64 {
        self.0
    }
}

impl TryFrom<u64> for Element {
    type Error = LabError;

    fn try_from(value: u64) -> Result<Self> {
        Element::new(value)
    }
}

impl From<Element> for u64 {
    fn from(e: Element) -> u64 {
        e.0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Largest element a finite-set code can mention (one bit per element of a u64).
pub const MAX_CODED_ELEMENT: u64 = 64;

/// Decode the finite set whose characteristic vector is the binary expansion of
/// `code`: bit `k` (least significant first) set means element `k + 1` is present.
pub fn decode_finite_set(code: u64) -> Vec<u64> {
    (0..64)
        .filter(|k| (code >> k) & 1 == 1)
        .map(|k| k + 1)
        .collect()
}

/// Inverse of [`decode_finite_set`]. `None` when some element exceeds
/// [`MAX_CODED_ELEMENT`] or is zero.
pub fn encode_finite_set(elements: &[u64]) -> Option<u64> {
    elements.iter().try_fold(0u64, |acc, &x| {
        if (1..=MAX_CODED_ELEMENT).contains(&x) {
            Some(acc | (1u64 << (x - 1)))
        } else {
            None
        }
    })
}

#[inline]
pub(crate) fn code_contains(code: u64, x: u64) -> bool {
    (1..=MAX_CODED_ELEMENT).contains(&x) && (code >> (x - 1)) & 1 == 1
}

/// The shape of a single language.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LanguageKind {
    /// All positive multiples of `modulus`.
    Multiples {
        modulus: u64,
    },
    /// `{1, ..., bound}`.
    FinitePrefix {
        bound: u64,
    },
    /// An explicit finite set, sorted ascending without duplicates.
    FiniteSet {
        elements: Vec<u64>,
    },
    AllOfDomain,
}

impl LanguageKind {
    pub fn finite_set(mut elements: Vec<u64>) -> Result<Self> {
        if elements.contains(&0) {
            return Err(LabError::config(
                "elements",
                "elements are positive integers",
            ));
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(LanguageKind::FiniteSet { elements })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LanguageKind::Multiples { modulus: 0 } => {
                Err(LabError::config("modulus", "modulus must be at least 1"))
            }
            LanguageKind::FiniteSet { elements } => {
                if elements.first() == Some(&0) {
                    return Err(LabError::config(
                        "elements",
                        "elements are positive integers",
                    ));
                }
                if elements.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(LabError::config(
                        "elements",
                        "finite set must be sorted ascending without duplicates",
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn contains(&self, x: Element) -> bool {
        let x = x.value();
        match self {
            LanguageKind::Multiples { modulus } => x.is_multiple_of(*modulus),
            LanguageKind::FinitePrefix { bound } => x <= *bound,
            LanguageKind::FiniteSet { elements } => elements.binary_search(&x).is_ok(),
            LanguageKind::AllOfDomain => true,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(
            self,
            LanguageKind::FinitePrefix { .. } | LanguageKind::FiniteSet { .. }
        )
    }

    /// `None` for infinite languages.
    pub fn cardinality(&self) -> Option<u64> {
        match self {
            LanguageKind::FinitePrefix { bound } => Some(*bound),
            LanguageKind::FiniteSet { elements } => Some(elements.len() as u64),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cardinality() == Some(0)
    }

    /// True when the language is the whole domain.
    pub fn is_everything(&self) -> bool {
        matches!(
            self,
            LanguageKind::AllOfDomain | LanguageKind::Multiples { modulus: 1 }
        )
    }

    /// Ascending listing of the language; ends only for finite languages.
    pub fn ascending(&self) -> Ascending<'_> {
        Ascending {
            kind: self,
            position: 0,
        }
    }

    /// The `rank`-th element (0-based) of the ascending listing.
    pub fn nth_ascending(&self, rank: u64) -> Option<Element> {
        let value = match self {
            LanguageKind::Multiples { modulus } => modulus.checked_mul(rank.checked_add(1)?)?,
            LanguageKind::FinitePrefix { bound } => {
                if rank >= *bound {
                    return None;
                }
                rank + 1
            }
            LanguageKind::FiniteSet { elements } => *elements.get(usize::try_from(rank).ok()?)?,
            LanguageKind::AllOfDomain => rank.checked_add(1)?,
        };
        Some(Element::from_raw(value))
    }

    /// The first `n` elements in ascending order and whether the language is
    /// exhausted by them (`|L| <= n`).
    pub fn enumerate(&self, n: usize) -> (Vec<Element>, bool) {
        let elements: Vec<Element> = self.ascending().take(n).collect();
        let exhausted = match self.cardinality() {
            Some(card) => card <= n as u64,
            None => false,
        };
        (elements, exhausted)
    }

    /// Exact extensional inclusion `self ⊆ other`.
    pub fn is_subset_of(&self, other: &LanguageKind) -> bool {
        use LanguageKind::*;
        match (self, other) {
            (_, AllOfDomain) => true,
            (FinitePrefix { bound }, _) => (1..=*bound).all(|x| other.contains(Element(x))),
            (FiniteSet { elements }, _) => elements.iter().all(|&x| other.contains(Element(x))),
            // self is infinite from here on
            (_, FinitePrefix { .. } | FiniteSet { .. }) => false,
            (AllOfDomain, Multiples { modulus }) => *modulus == 1,
            (Multiples { modulus: a }, Multiples { modulus: b }) => a % b == 0,
        }
    }
}

impl fmt::Display for LanguageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LanguageKind::Multiples { modulus } => write!(f, "{modulus}N"),
            LanguageKind::FinitePrefix { bound } => write!(f, "{{1..{bound}}}"),
            LanguageKind::FiniteSet { elements } => {
                write!(f, "{{")?;
                for (k, x) in elements.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "}}")
            }
            LanguageKind::AllOfDomain => write!(f, "N"),
        }
    }
}

pub struct Ascending<'a> {
    kind: &'a LanguageKind,
    position: u64,
}

impl Iterator for Ascending<'_> {
    type Item = Element;

    fn next(&mut self) -> Option<Element> {
        let next = self.kind.nth_ascending(self.position)?;
        self.position += 1;
        Some(next)
    }
}

/// A language `L_i` of some collection, tagged with where it came from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LanguageDescriptor {
    pub collection_id: String,
    pub index: u64,
    #[serde(flatten)]
    pub kind: LanguageKind,
}

impl LanguageDescriptor {
    pub fn contains(&self, x: Element) -> bool {
        self.kind.contains(x)
    }

    pub fn enumerate(&self, n: usize) -> (Vec<Element>, bool) {
        self.kind.enumerate(n)
    }
}
