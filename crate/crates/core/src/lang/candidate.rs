use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::collection::Catalog;
use super::language::{Element, LanguageDescriptor, LanguageKind};
use crate::error::{LabError, Result};

/// Serializable description of a candidate set `G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CandidateSpec {
    LanguageOf {
        collection: String,
        index: u64,
    },
    FiniteUnionWith {
        base: Box<CandidateSpec>,
        elements: Vec<u64>,
    },
    FiniteMinus {
        base: Box<CandidateSpec>,
        elements: Vec<u64>,
    },
    ExplicitFinite {
        elements: Vec<u64>,
    },
    AllOfDomain,
    Empty,
}

impl CandidateSpec {
    pub fn language_of(collection: impl Into<String>, index: u64) -> Self {
        CandidateSpec::LanguageOf {
            collection: collection.into(),
            index,
        }
    }

    pub fn union_with(self, elements: Vec<u64>) -> Self {
        CandidateSpec::FiniteUnionWith {
            base: Box::new(self),
            elements,
        }
    }

    pub fn minus(self, elements: Vec<u64>) -> Self {
        CandidateSpec::FiniteMinus {
            base: Box::new(self),
            elements,
        }
    }

    /// Parse the flag grammar `lang:<i>`, `lang:<i>+{a,b}`, `lang:<i>-{a,b}`,
    /// `set:{a,b,c}`, `all`, `empty`. `lang` refers to `collection`.
    pub fn parse(text: &str, collection: &str) -> Result<Self> {
        let text = text.trim();
        let bad = |msg: &str| LabError::config("candidate", format!("{msg} in {text:?}"));
        match text {
            "all" => return Ok(CandidateSpec::AllOfDomain),
            "empty" => return Ok(CandidateSpec::Empty),
            _ => {}
        }
        if let Some(rest) = text.strip_prefix("set:") {
            return Ok(CandidateSpec::ExplicitFinite {
                elements: parse_braced(rest).map_err(|m| bad(&m))?,
            });
        }
        let rest = text
            .strip_prefix("lang:")
            .ok_or_else(|| bad("expected lang:, set:, all or empty"))?;
        let split = rest.find(['+', '-']);
        let (index_part, tail) = match split {
            Some(pos) => rest.split_at(pos),
            None => (rest, ""),
        };
        let index: u64 = index_part
            .trim()
            .parse()
            .map_err(|_| bad("expected a positive index after lang:"))?;
        if index == 0 {
            return Err(bad("indices start at 1"));
        }
        let base = CandidateSpec::language_of(collection, index);
        match tail.chars().next() {
            None => Ok(base),
            Some('+') => Ok(base.union_with(parse_braced(&tail[1..]).map_err(|m| bad(&m))?)),
            Some(_) => Ok(base.minus(parse_braced(&tail[1..]).map_err(|m| bad(&m))?)),
        }
    }

    /// Resolve collection references against a catalog.
    pub fn resolve(&self, catalog: &Catalog) -> Result<CandidateSet> {
        let form = Normal::build(self, catalog)?;
        Ok(CandidateSet {
            spec: self.clone(),
            descriptor: self.to_string(),
            form,
        })
    }
}

fn parse_braced(text: &str) -> std::result::Result<Vec<u64>, String> {
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| "expected {a,b,...}".to_string())?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|s| match s.trim().parse::<u64>() {
            Ok(0) | Err(_) => Err(format!("bad element {:?}", s.trim())),
            Ok(v) => Ok(v),
        })
        .collect()
}

fn write_set(f: &mut fmt::Formatter<'_>, elements: &[u64]) -> fmt::Result {
    let parts: Vec<String> = elements.iter().map(u64::to_string).collect();
    write!(f, "{{{}}}", parts.join(","))
}

impl fmt::Display for CandidateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CandidateSpec::LanguageOf { collection, index } => write!(f, "{collection}:{index}"),
            CandidateSpec::FiniteUnionWith { base, elements } => {
                write!(f, "{base}+")?;
                write_set(f, elements)
            }
            CandidateSpec::FiniteMinus { base, elements } => {
                write!(f, "{base}-")?;
                write_set(f, elements)
            }
            CandidateSpec::ExplicitFinite { elements } => {
                write!(f, "set:")?;
                write_set(f, elements)
            }
            CandidateSpec::AllOfDomain => write!(f, "all"),
            CandidateSpec::Empty => write!(f, "empty"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Base {
    Nothing,
    Language(LanguageDescriptor),
}

/// Every grammar term normalizes to `(base ∪ added) \ removed` with
/// `added ∩ removed = ∅`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Normal {
    base: Base,
    added: BTreeSet<u64>,
    removed: BTreeSet<u64>,
}

impl Normal {
    fn build(spec: &CandidateSpec, catalog: &Catalog) -> Result<Self> {
        let plain = |base| Normal {
            base,
            added: BTreeSet::new(),
            removed: BTreeSet::new(),
        };
        let check = |elements: &[u64]| {
            if elements.contains(&0) {
                Err(LabError::config(
                    "candidate",
                    "elements are positive integers",
                ))
            } else {
                Ok(())
            }
        };
        Ok(match spec {
            CandidateSpec::LanguageOf { collection, index } => {
                let c = catalog.get(collection)?;
                plain(Base::Language(c.language(*index)?))
            }
            CandidateSpec::AllOfDomain => plain(Base::Language(LanguageDescriptor {
                collection_id: String::new(),
                index: 0,
                kind: LanguageKind::AllOfDomain,
            })),
            CandidateSpec::Empty => plain(Base::Nothing),
            CandidateSpec::ExplicitFinite { elements } => {
                check(elements)?;
                let mut n = plain(Base::Nothing);
                n.added.extend(elements.iter().copied());
                n
            }
            CandidateSpec::FiniteUnionWith { base, elements } => {
                check(elements)?;
                let mut n = Normal::build(base, catalog)?;
                for &x in elements {
                    n.removed.remove(&x);
                    n.added.insert(x);
                }
                n
            }
            CandidateSpec::FiniteMinus { base, elements } => {
                check(elements)?;
                let mut n = Normal::build(base, catalog)?;
                for &x in elements {
                    n.added.remove(&x);
                    n.removed.insert(x);
                }
                n
            }
        })
    }

    fn contains(&self, x: Element) -> bool {
        let v = x.value();
        if self.removed.contains(&v) {
            return false;
        }
        self.added.contains(&v)
            || match &self.base {
                Base::Nothing => false,
                Base::Language(d) => d.contains(x),
            }
    }
}

/// A resolved candidate set `G` with decidable membership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSet {
    spec: CandidateSpec,
    descriptor: String,
    form: Normal,
}

impl CandidateSet {
    /// A candidate that is exactly the given language, bypassing the catalog.
    pub fn of_language(language: LanguageDescriptor) -> Self {
        let spec = CandidateSpec::language_of(language.collection_id.clone(), language.index);
        CandidateSet {
            descriptor: spec.to_string(),
            spec,
            form: Normal {
                base: Base::Language(language),
                added: BTreeSet::new(),
                removed: BTreeSet::new(),
            },
        }
    }

    pub fn spec(&self) -> &CandidateSpec {
        &self.spec
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    /// Raw `1{x ∈ G}`; the ledgered path is
    /// [`crate::ledger::QueryLedger::query_candidate`].
    pub fn contains(&self, x: Element) -> bool {
        self.form.contains(x)
    }

    /// Exact decision of `G ⊆ K`.
    pub fn is_subset_of(&self, target: &LanguageKind) -> bool {
        self.form
            .added
            .iter()
            .all(|&x| target.contains(Element::from_raw(x)))
            && self.base_inside(target)
    }

    /// Whether `base \ removed ⊆ K`.
    fn base_inside(&self, target: &LanguageKind) -> bool {
        let n = &self.form;
        match &n.base {
            Base::Nothing => true,
            Base::Language(d) if d.kind.is_finite() => d
                .kind
                .ascending()
                .filter(|x| !n.removed.contains(&x.value()))
                .all(|x| target.contains(x)),
            // An infinite base minus finitely many points lies inside K only
            // if K is infinite, and then only if the whole base does.
            Base::Language(d) => !target.is_finite() && d.kind.is_subset_of(target),
        }
    }

    /// Least element of `G \ K`, or `None` when `G ⊆ K`.
    pub fn least_outside(&self, target: &LanguageKind) -> Option<Element> {
        if self.is_subset_of(target) {
            return None;
        }
        let from_added = self
            .form
            .added
            .iter()
            .map(|&x| Element::from_raw(x))
            .find(|&x| !target.contains(x));
        let from_base = match &self.form.base {
            Base::Language(d) if !self.base_inside(target) => d
                .kind
                .ascending()
                .filter(|x| !self.form.removed.contains(&x.value()))
                .find(|&x| !target.contains(x)),
            _ => None,
        };
        match (from_added, from_base) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::collection::{FINITE_PREFIXES, MULTIPLES};

    fn el(v: u64) -> Element {
        Element::new(v).unwrap()
    }

    fn resolve(text: &str, collection: &str) -> CandidateSet {
        CandidateSpec::parse(text, collection)
            .unwrap()
            .resolve(&Catalog::standard())
            .unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(resolve("lang:3", MULTIPLES).contains(el(3)));
        assert!(!resolve("empty", MULTIPLES).contains(el(7)));
        assert!(resolve("lang:2+{9}", FINITE_PREFIXES).contains(el(9)));
        assert!(!resolve("lang:2-{2}", FINITE_PREFIXES).contains(el(2)));
        assert!(resolve("all", MULTIPLES).contains(el(11)));
        assert!(resolve("set:{4,1}", MULTIPLES).contains(el(4)));
    }

    #[test]
    fn parse_rejects_malformed_specs() {
        for bad in [
            "lang:",
            "lang:0",
            "lang:x",
            "set:1,2",
            "set:{0}",
            "foo",
            "lang:2+{a}",
        ] {
            assert!(CandidateSpec::parse(bad, MULTIPLES).is_err(), "{bad}");
        }
    }

    #[test]
    fn display_is_stable() {
        let spec = CandidateSpec::parse("lang:2-{4,6}", MULTIPLES).unwrap();
        assert_eq!(spec.to_string(), "multiples:2-{4,6}");
        assert_eq!(
            CandidateSpec::parse("set:{}", MULTIPLES)
                .unwrap()
                .to_string(),
            "set:{}"
        );
    }

    #[test]
    fn union_then_minus_normalizes() {
        let g = CandidateSpec::language_of(MULTIPLES, 2)
            .union_with(vec![3])
            .minus(vec![3, 4])
            .union_with(vec![4])
            .resolve(&Catalog::standard())
            .unwrap();
        assert!(!g.contains(el(3)));
        assert!(g.contains(el(4)));
        assert!(g.contains(el(6)));
    }

    #[test]
    fn subset_decisions_against_targets() {
        let evens = LanguageKind::Multiples { modulus: 2 };
        assert!(resolve("lang:4", MULTIPLES).is_subset_of(&evens));
        assert!(!resolve("lang:3", MULTIPLES).is_subset_of(&evens));
        assert!(resolve("empty", MULTIPLES).is_subset_of(&evens));
        assert!(!resolve("all", MULTIPLES).is_subset_of(&evens));
        assert!(resolve("all", MULTIPLES).is_subset_of(&LanguageKind::AllOfDomain));
        // all multiples of 1 except the odd ones we list are still not even
        assert!(!resolve("lang:1-{1,3,5}", MULTIPLES).is_subset_of(&evens));
        let prefix3 = LanguageKind::FinitePrefix { bound: 3 };
        assert!(resolve("lang:4-{4}", FINITE_PREFIXES).is_subset_of(&prefix3));
        assert!(!resolve("lang:2+{9}", FINITE_PREFIXES).is_subset_of(&prefix3));
        assert!(!resolve("lang:2-{1}", MULTIPLES).is_subset_of(&prefix3));
    }

    #[test]
    fn least_outside_finds_the_first_witness() {
        let evens = LanguageKind::Multiples { modulus: 2 };
        assert_eq!(
            resolve("lang:3", MULTIPLES).least_outside(&evens),
            Some(el(3))
        );
        assert_eq!(
            resolve("lang:3-{3}", MULTIPLES).least_outside(&evens),
            Some(el(9))
        );
        assert_eq!(
            resolve("lang:4+{7}", MULTIPLES).least_outside(&evens),
            Some(el(7))
        );
        assert_eq!(resolve("lang:4", MULTIPLES).least_outside(&evens), None);
    }
}
