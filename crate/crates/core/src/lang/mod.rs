//! Elements, languages, indexed collections and candidate sets.
//!
//! The domain is the positive integers. A [`Collection`] maps each index
//! `i >= 1` to a language and answers membership, exact index-level
//! subset/equality questions and, where available, tell-tale queries.

mod candidate;
mod collection;
mod language;

pub use candidate::{CandidateSet, CandidateSpec};
pub use collection::{
    catalog, Catalog, Collection, Family, FINITE_PLUS_ALL, FINITE_PREFIXES, FINITE_SETS, MULTIPLES,
};
pub use language::{
    decode_finite_set, encode_finite_set, Ascending, Element, LanguageDescriptor, LanguageKind,
    MAX_CODED_ELEMENT,
};
