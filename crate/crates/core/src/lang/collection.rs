use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::language::{
    code_contains, decode_finite_set, Element, LanguageDescriptor, LanguageKind,
};
use crate::error::{LabError, Result};

pub const MULTIPLES: &str = "multiples";
pub const FINITE_PREFIXES: &str = "finite_prefixes";
pub const FINITE_SETS: &str = "finite_sets";
pub const FINITE_PLUS_ALL: &str = "finite_plus_all";

/// The rule mapping an index `i >= 1` to the language `L_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `L_i` = multiples of `i`.
    Multiples,
    /// `L_i = {1..i}`.
    FinitePrefixes,
    /// `L_i` = the set whose characteristic vector is the binary expansion of `i`.
    FiniteSets,
    /// `L_1` = the whole domain, `L_{i+1}` = the `i`-th finite set.
    FinitePlusAll,
    /// A finite, explicitly listed collection. Duplicates are allowed.
    Explicit {
        languages: Vec<LanguageKind>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        telltales: Option<Vec<Vec<u64>>>,
    },
}

/// An indexed family `L_1, L_2, ...` with a membership oracle, exact
/// index-level subset/equality relations and an optional tell-tale oracle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collection {
    id: String,
    #[serde(flatten)]
    family: Family,
}

impl Collection {
    pub fn new(id: impl Into<String>, family: Family) -> Result<Self> {
        let id = id.into();
        if let Family::Explicit {
            languages,
            telltales,
        } = &family
        {
            if languages.is_empty() {
                return Err(LabError::config(
                    "languages",
                    "explicit collection is empty",
                ));
            }
            for kind in languages {
                kind.validate()?;
            }
            if let Some(tt) = telltales {
                if tt.len() != languages.len() {
                    return Err(LabError::config(
                        "telltales",
                        "one tell-tale per language is required",
                    ));
                }
                for (k, (t, kind)) in tt.iter().zip(languages).enumerate() {
                    if let Some(&bad) = t
                        .iter()
                        .find(|&&x| x == 0 || !kind.contains(Element::from_raw(x)))
                    {
                        return Err(LabError::config(
                            "telltales",
                            format!(
                                "element {bad} of tell-tale {} is not in the language",
                                k + 1
                            ),
                        ));
                    }
                }
            }
        }
        Ok(Collection { id, family })
    }

    pub fn multiples() -> Self {
        Collection::new(MULTIPLES, Family::Multiples).unwrap()
    }

    pub fn finite_prefixes() -> Self {
        Collection::new(FINITE_PREFIXES, Family::FinitePrefixes).unwrap()
    }

    pub fn finite_sets() -> Self {
        Collection::new(FINITE_SETS, Family::FiniteSets).unwrap()
    }

    pub fn finite_plus_all() -> Self {
        Collection::new(FINITE_PLUS_ALL, Family::FinitePlusAll).unwrap()
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Largest valid index, if the collection is finite.
    pub fn index_bound(&self) -> Option<u64> {
        match &self.family {
            Family::Explicit { languages, .. } => Some(languages.len() as u64),
            _ => None,
        }
    }

    pub fn check_index(&self, i: u64) -> Result<()> {
        if i == 0 {
            return Err(LabError::config("index", "indices start at 1"));
        }
        if let Some(bound) = self.index_bound() {
            if i > bound {
                return Err(LabError::config(
                    "index",
                    format!("index {i} outside 1..={bound} for collection {}", self.id),
                ));
            }
        }
        Ok(())
    }

    pub fn kind(&self, i: u64) -> Result<LanguageKind> {
        self.check_index(i)?;
        Ok(match &self.family {
            Family::Multiples => LanguageKind::Multiples { modulus: i },
            Family::FinitePrefixes => LanguageKind::FinitePrefix { bound: i },
            Family::FiniteSets => LanguageKind::FiniteSet {
                elements: decode_finite_set(i),
            },
            Family::FinitePlusAll if i == 1 => LanguageKind::AllOfDomain,
            Family::FinitePlusAll => LanguageKind::FiniteSet {
                elements: decode_finite_set(i - 1),
            },
            Family::Explicit { languages, .. } => languages[(i - 1) as usize].clone(),
        })
    }

    pub fn language(&self, i: u64) -> Result<LanguageDescriptor> {
        Ok(LanguageDescriptor {
            collection_id: self.id.clone(),
            index: i,
            kind: self.kind(i)?,
        })
    }

    /// Raw membership oracle `x ∈ L_i`. Not ledgered; see
    /// [`crate::ledger::QueryLedger::query_collection`] for the accounted path.
    pub fn contains(&self, i: u64, x: Element) -> Result<bool> {
        self.check_index(i)?;
        let v = x.value();
        Ok(match &self.family {
            Family::Multiples => v.is_multiple_of(i),
            Family::FinitePrefixes => v <= i,
            Family::FiniteSets => code_contains(i, v),
            Family::FinitePlusAll => i == 1 || code_contains(i - 1, v),
            Family::Explicit { languages, .. } => languages[(i - 1) as usize].contains(x),
        })
    }

    /// Exact `L_i ⊆ L_j`.
    pub fn subset_of(&self, i: u64, j: u64) -> Result<bool> {
        self.check_index(i)?;
        self.check_index(j)?;
        Ok(match &self.family {
            Family::Multiples => i.is_multiple_of(j),
            Family::FinitePrefixes => i <= j,
            Family::FiniteSets => i & !j == 0,
            Family::FinitePlusAll => match (i, j) {
                (_, 1) => true,
                (1, _) => false,
                (i, j) => (i - 1) & !(j - 1) == 0,
            },
            Family::Explicit { languages, .. } => {
                languages[(i - 1) as usize].is_subset_of(&languages[(j - 1) as usize])
            }
        })
    }

    /// Exact `L_i = L_j`.
    pub fn equals(&self, i: u64, j: u64) -> Result<bool> {
        Ok(self.subset_of(i, j)? && self.subset_of(j, i)?)
    }

    /// Whether the collection ships a tell-tale oracle for every index.
    pub fn has_telltale_rule(&self) -> bool {
        match &self.family {
            Family::FinitePlusAll => false,
            Family::Explicit { telltales, .. } => telltales.is_some(),
            _ => true,
        }
    }

    /// The tell-tale oracle: `T_i`, ascending, or `None` when the collection
    /// has no tell-tale for this index.
    pub fn telltale(&self, i: u64) -> Result<Option<Vec<Element>>> {
        self.check_index(i)?;
        let raw: Option<Vec<u64>> = match &self.family {
            Family::Multiples | Family::FinitePrefixes => Some(vec![i]),
            Family::FiniteSets => Some(decode_finite_set(i)),
            Family::FinitePlusAll if i == 1 => None,
            Family::FinitePlusAll => Some(decode_finite_set(i - 1)),
            Family::Explicit { telltales, .. } => telltales.as_ref().map(|tt| {
                let mut t = tt[(i - 1) as usize].clone();
                t.sort_unstable();
                t.dedup();
                t
            }),
        };
        Ok(raw.map(|v| v.into_iter().map(Element::from_raw).collect()))
    }

    pub fn summary(&self) -> String {
        match &self.family {
            Family::Multiples => "L_i = multiples of i; T_i = {i}".into(),
            Family::FinitePrefixes => "L_i = {1..i}; T_i = {i}".into(),
            Family::FiniteSets => {
                "L_i = set with characteristic vector = binary expansion of i; T_i = L_i".into()
            }
            Family::FinitePlusAll => {
                "L_1 = N, L_(i+1) = i-th finite set; no tell-tale for index 1".into()
            }
            Family::Explicit { languages, .. } => {
                let parts: Vec<String> = languages.iter().map(ToString::to_string).collect();
                format!("explicit: {}", parts.join(", "))
            }
        }
    }
}

/// Lookup table of collections by id.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    collections: BTreeMap<String, Arc<Collection>>,
}

impl Catalog {
    /// The four built-in families.
    pub fn standard() -> Self {
        let mut catalog = Catalog::default();
        for c in [
            Collection::multiples(),
            Collection::finite_prefixes(),
            Collection::finite_sets(),
            Collection::finite_plus_all(),
        ] {
            catalog.insert(c);
        }
        catalog
    }

    pub fn insert(&mut self, collection: Collection) -> Arc<Collection> {
        let c = Arc::new(collection);
        self.collections.insert(c.id().to_string(), Arc::clone(&c));
        c
    }

    pub fn get(&self, id: &str) -> Result<Arc<Collection>> {
        self.collections
            .get(id)
            .cloned()
            .ok_or_else(|| LabError::config("collection", format!("unknown collection id {id:?}")))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<Collection>> {
        self.collections.values()
    }
}

pub fn catalog() -> Catalog {
    Catalog::standard()
}
