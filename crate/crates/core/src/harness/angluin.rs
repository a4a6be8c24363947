//! Bounded checker for the tell-tale condition of a single index.
//!
//! A finite `T_i ⊆ L_i` is a tell-tale when no `L_j ⊇ T_i` is a proper subset
//! of `L_i`. The checker is a semi-decision procedure:
//!
//! 1. blind search over `j <= J` for a violating `L_j`;
//! 2. for the built-in families, a closed-form argument that either exhibits a
//!    violating index (possibly beyond `J`) or rules out every `j`;
//! 3. otherwise, an honest "inconclusive".
//!
//! Every violation carries a certificate that replays against the membership
//! oracle alone.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::lang::{encode_finite_set, Collection, Element, Family, MAX_CODED_ELEMENT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckBounds {
    /// Blind search covers indices `1..=index_bound`.
    pub index_bound: u64,
    /// Extensional checks look at elements `1..=element_bound`.
    pub element_bound: u64,
}

impl Default for CheckBounds {
    fn default() -> Self {
        CheckBounds {
            index_bound: 64,
            element_bound: 64,
        }
    }
}

/// How `L_j ⊆ L_i` was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContainmentBasis {
    /// The collection's exact subset relation.
    ExactRelation,
    /// `L_j` is finite and every element of it was checked against `L_i`.
    FiniteEnumeration,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationCertificate {
    pub collection: String,
    pub index: u64,
    pub telltale: Vec<u64>,
    pub witness_index: u64,
    /// An element of `L_i \ L_j`.
    pub strictness_witness: u64,
    pub containment: ContainmentBasis,
    /// Elements of `L_j` when it is finite.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_language: Option<Vec<u64>>,
    /// Elements at or below this bound are re-checked on replay.
    pub element_bound: u64,
}

impl ViolationCertificate {
    /// Re-verify the certificate with membership queries only.
    pub fn replay(&self, collection: &Collection) -> bool {
        let (i, j) = (self.index, self.witness_index);
        let member = |k: u64, x: u64| {
            Element::new(x)
                .and_then(|x| collection.contains(k, x))
                .unwrap_or(false)
        };
        if i == j || collection.id() != self.collection {
            return false;
        }
        let telltale_ok = self.telltale.iter().all(|&x| member(i, x) && member(j, x));
        let strict = member(i, self.strictness_witness) && !member(j, self.strictness_witness);
        let bound = match &self.witness_language {
            Some(lj) => self
                .element_bound
                .max(lj.last().copied().unwrap_or(0))
                .max(self.strictness_witness),
            None => self.element_bound,
        };
        let contained = (1..=bound).all(|x| !member(j, x) || member(i, x));
        let listing_ok = match &self.witness_language {
            Some(lj) => {
                lj.iter().all(|&x| member(j, x) && member(i, x))
                    && (1..=bound).filter(|&x| member(j, x)).count() == lj.len()
            }
            None => true,
        };
        telltale_ok && strict && contained && listing_ok
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum AngluinVerdict {
    SatisfiedExactly { argument: String },
    ViolationCertified(ViolationCertificate),
    InconclusiveWithinBounds,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngluinCheckResult {
    pub collection: String,
    pub index: u64,
    pub telltale: Vec<u64>,
    pub bounds: CheckBounds,
    #[serde(flatten)]
    pub verdict: AngluinVerdict,
}

impl AngluinCheckResult {
    pub fn verdict_name(&self) -> &'static str {
        match self.verdict {
            AngluinVerdict::SatisfiedExactly { .. } => "satisfied_exactly",
            AngluinVerdict::ViolationCertified(_) => "violation_certified",
            AngluinVerdict::InconclusiveWithinBounds => "inconclusive_within_bounds",
        }
    }

    pub fn certificate(&self) -> Option<&ViolationCertificate> {
        match &self.verdict {
            AngluinVerdict::ViolationCertified(c) => Some(c),
            _ => None,
        }
    }
}

/// Outcome of the closed-form analysis for a built-in family.
enum ClosedForm {
    Satisfied(String),
    Violated(u64),
    Unknown,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Closed forms over all `j` for the coded finite sets, where `code` is the
/// characteristic vector of `L_i` and `offset` maps a code to its index.
fn coded_closed_form(code: u64, telltale: &[u64], offset: u64) -> ClosedForm {
    let Some(t_code) = encode_finite_set(telltale) else {
        return ClosedForm::Unknown;
    };
    if t_code == code {
        return ClosedForm::Satisfied(
            "T_i = L_i, and any language containing L_i is not a proper subset of it".into(),
        );
    }
    if t_code != 0 {
        // T_i itself is a nonempty proper subset of L_i in the family
        return ClosedForm::Violated(t_code + offset);
    }
    if code.count_ones() == 1 {
        ClosedForm::Satisfied("L_i is a singleton and the family has no empty language".into())
    } else {
        let lowest = code & code.wrapping_neg();
        ClosedForm::Violated(lowest + offset)
    }
}

fn closed_form(collection: &Collection, i: u64, telltale: &[u64]) -> ClosedForm {
    match collection.family() {
        Family::Multiples => {
            // L_j ⊇ T iff j | gcd(T); L_j ⊊ L_i iff i | j and j != i
            let g = telltale.iter().fold(0, |acc, &x| gcd(acc, x));
            if g == 0 {
                ClosedForm::Violated(2 * i)
            } else if g == i {
                ClosedForm::Satisfied(format!(
                    "L_j ⊇ T_i iff j | {g}, and L_j ⊊ L_i iff {i} | j with j != {i}; only j = {i} meets both"
                ))
            } else {
                ClosedForm::Violated(g)
            }
        }
        Family::FinitePrefixes => {
            // L_j ⊇ T iff j >= max(T); L_j ⊊ L_i iff j < i
            let m = telltale.iter().copied().max().unwrap_or(0);
            if i == 1 || m == i {
                ClosedForm::Satisfied(format!(
                    "L_j ⊇ T_i iff j >= {}, and L_j ⊊ L_i iff j < {i}",
                    m.max(1)
                ))
            } else {
                ClosedForm::Violated(m.max(1))
            }
        }
        Family::FiniteSets => coded_closed_form(i, telltale, 0),
        Family::FinitePlusAll if i == 1 => {
            if telltale.iter().any(|&x| x > MAX_CODED_ELEMENT) {
                ClosedForm::Satisfied(format!(
                    "no finite language of the family contains elements above {MAX_CODED_ELEMENT}"
                ))
            } else {
                match encode_finite_set(telltale) {
                    Some(0) | None => ClosedForm::Violated(2),
                    Some(code) => ClosedForm::Violated(code + 1),
                }
            }
        }
        Family::FinitePlusAll => coded_closed_form(i - 1, telltale, 1),
        Family::Explicit { .. } => ClosedForm::Unknown,
    }
}

/// Try to certify `L_j ⊊ L_i` with `T ⊆ L_j`.
fn certify(
    collection: &Collection,
    i: u64,
    j: u64,
    telltale: &[u64],
    bounds: CheckBounds,
) -> Result<Option<ViolationCertificate>> {
    if i == j {
        return Ok(None);
    }
    for &x in telltale {
        if !collection.contains(j, Element::from_raw(x))? {
            return Ok(None);
        }
    }
    if !collection.subset_of(j, i)? || collection.equals(j, i)? {
        return Ok(None);
    }
    let lj = collection.kind(j)?;
    let li = collection.kind(i)?;
    let (containment, witness_language) = if lj.is_finite() && !li.is_finite() {
        let listing: Vec<u64> = lj.ascending().map(Element::value).collect();
        for &x in &listing {
            if !collection.contains(i, Element::from_raw(x))? {
                return Ok(None);
            }
        }
        (ContainmentBasis::FiniteEnumeration, Some(listing))
    } else if lj.is_finite() {
        (
            ContainmentBasis::ExactRelation,
            Some(lj.ascending().map(Element::value).collect()),
        )
    } else {
        (ContainmentBasis::ExactRelation, None)
    };
    let search_to = match &witness_language {
        Some(l) => bounds.element_bound.max(l.last().copied().unwrap_or(0) + 1),
        None => bounds.element_bound,
    };
    let mut strictness = None;
    for x in 1..=search_to {
        let e = Element::from_raw(x);
        if collection.contains(i, e)? && !collection.contains(j, e)? {
            strictness = Some(x);
            break;
        }
    }
    let Some(strictness_witness) = strictness else {
        return Ok(None);
    };
    Ok(Some(ViolationCertificate {
        collection: collection.id().to_string(),
        index: i,
        telltale: telltale.to_vec(),
        witness_index: j,
        strictness_witness,
        containment,
        witness_language,
        element_bound: bounds.element_bound,
    }))
}

/// Check whether `telltale` (default: the collection's tell-tale oracle) is a
/// tell-tale for `L_i`.
pub fn check_angluin(
    collection: &Collection,
    i: u64,
    telltale: Option<&[u64]>,
    bounds: CheckBounds,
) -> Result<AngluinCheckResult> {
    collection.check_index(i)?;
    if bounds.index_bound == 0 || bounds.element_bound == 0 {
        return Err(LabError::config("bounds", "both bounds must be at least 1"));
    }
    let mut telltale: Vec<u64> = match telltale {
        Some(t) => t.to_vec(),
        None => collection
            .telltale(i)?
            .ok_or_else(|| {
                LabError::config(
                    "telltale",
                    format!(
                        "collection {} has no tell-tale for index {i}; supply one",
                        collection.id()
                    ),
                )
            })?
            .into_iter()
            .map(Element::value)
            .collect(),
    };
    telltale.sort_unstable();
    telltale.dedup();
    for &x in &telltale {
        let e =
            Element::new(x).map_err(|_| LabError::config("telltale", "elements are positive"))?;
        if !collection.contains(i, e)? {
            return Err(LabError::config(
                "telltale",
                format!("element {x} is not in L_{i}"),
            ));
        }
    }
    let result = |verdict| AngluinCheckResult {
        collection: collection.id().to_string(),
        index: i,
        telltale: telltale.clone(),
        bounds,
        verdict,
    };

    let search_to = collection
        .index_bound()
        .map_or(bounds.index_bound, |b| b.min(bounds.index_bound));
    for j in 1..=search_to {
        if let Some(cert) = certify(collection, i, j, &telltale, bounds)? {
            return Ok(result(AngluinVerdict::ViolationCertified(cert)));
        }
    }

    Ok(result(match closed_form(collection, i, &telltale) {
        ClosedForm::Satisfied(argument) => AngluinVerdict::SatisfiedExactly { argument },
        ClosedForm::Violated(j) => match certify(collection, i, j, &telltale, bounds)? {
            Some(cert) => AngluinVerdict::ViolationCertified(cert),
            None => AngluinVerdict::InconclusiveWithinBounds,
        },
        ClosedForm::Unknown => match collection.index_bound() {
            Some(n) if n <= bounds.index_bound => AngluinVerdict::SatisfiedExactly {
                argument: format!("exhaustive search over all {n} indices"),
            },
            _ => AngluinVerdict::InconclusiveWithinBounds,
        },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::LanguageKind;

    #[test]
    fn finite_plus_all_index_one_is_violated_by_the_coded_set() {
        let c = Collection::finite_plus_all();
        let r = check_angluin(&c, 1, Some(&[1, 2, 3]), CheckBounds::default()).unwrap();
        let cert = r.certificate().expect("violation");
        assert!(cert.replay(&c));
        assert_eq!(cert.containment, ContainmentBasis::FiniteEnumeration);
        // first hit of the blind search: L_8 = {1,2,3}
        assert_eq!(cert.witness_index, 8);
    }

    #[test]
    fn finite_plus_all_witness_beyond_the_index_bound() {
        let c = Collection::finite_plus_all();
        let r = check_angluin(&c, 1, Some(&[20]), CheckBounds::default()).unwrap();
        let cert = r.certificate().expect("violation");
        assert_eq!(cert.witness_index, (1 << 19) + 1);
        assert!(cert.replay(&c));
    }

    #[test]
    fn prefixes_are_satisfied() {
        let c = Collection::finite_prefixes();
        let r = check_angluin(&c, 5, None, CheckBounds::default()).unwrap();
        assert_eq!(r.verdict_name(), "satisfied_exactly");
        let r = check_angluin(&c, 5, Some(&[3]), CheckBounds::default()).unwrap();
        assert_eq!(r.certificate().unwrap().witness_index, 3);
    }

    #[test]
    fn multiples_two_with_its_own_telltale() {
        let c = Collection::multiples();
        let r = check_angluin(&c, 2, None, CheckBounds::default()).unwrap();
        assert_eq!(r.verdict_name(), "satisfied_exactly");
        let r = check_angluin(&c, 2, Some(&[4, 8]), CheckBounds::default()).unwrap();
        let cert = r.certificate().unwrap();
        assert_eq!(cert.witness_index, 4);
        assert!(cert.replay(&c));
    }

    #[test]
    fn missing_or_bad_telltales_are_validation_errors() {
        let c = Collection::finite_plus_all();
        assert!(matches!(
            check_angluin(&c, 1, None, CheckBounds::default()),
            Err(LabError::Config { .. })
        ));
        assert!(check_angluin(
            &Collection::finite_prefixes(),
            2,
            Some(&[3]),
            CheckBounds::default()
        )
        .is_err());
    }

    #[test]
    fn explicit_collections_are_searched_exhaustively_when_small() {
        let c = Collection::new(
            "pair",
            Family::Explicit {
                languages: vec![
                    LanguageKind::AllOfDomain,
                    LanguageKind::Multiples { modulus: 2 },
                ],
                telltales: None,
            },
        )
        .unwrap();
        let r = check_angluin(&c, 1, Some(&[1]), CheckBounds::default()).unwrap();
        assert_eq!(r.verdict_name(), "satisfied_exactly");
        let r = check_angluin(&c, 1, Some(&[2]), CheckBounds::default()).unwrap();
        assert!(r.certificate().unwrap().replay(&c));
    }

    #[test]
    fn tampered_certificates_do_not_replay() {
        let c = Collection::finite_plus_all();
        let r = check_angluin(&c, 1, Some(&[1, 2, 3]), CheckBounds::default()).unwrap();
        let mut cert = r.certificate().unwrap().clone();
        cert.strictness_witness = 2;
        assert!(!cert.replay(&c));
        let mut cert = r.certificate().unwrap().clone();
        cert.witness_index = 1;
        assert!(!cert.replay(&c));
    }
}
