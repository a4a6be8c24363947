//! Adversarial presentations: complete enumerations of a target language
//! (positive-only game) and labeled enumerations of the whole domain.
//!
//! Every strategy draws "fresh" elements from the canonical ascending listing
//! and differs only in how it interleaves repetitions or reorders them:
//!
//! * `canonical` emits the listing as is.
//! * `repeat_heavy` re-emits a uniformly chosen earlier element with
//!   probability `numerator / denominator`, and otherwise the next fresh one.
//! * `block_shuffle` cuts the listing into blocks of sizes `g, 2g, 3g, ...` and
//!   emits each block in a seeded random order.
//! * `delay_pattern` emits a fresh element at steps `1, p + 1, 2p + 1, ...` and
//!   the least element of the listing in between, so the element of rank `r`
//!   shows up at step `(r - 1)p + 1`.
//!
//! For a finite target the listing cycles once exhausted.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::lang::{Element, LanguageDescriptor, LanguageKind};

/// Identifier of the pseudo-random generator behind seeded strategies. It is
/// recorded in transcripts so that golden vectors can be tied to it.
pub const RNG_ALGORITHM: &str = "chacha8 (rand_chacha 0.3, seed_from_u64)";

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum Strategy {
    Canonical,
    RepeatHeavy {
        seed: u64,
        numerator: u32,
        denominator: u32,
    },
    BlockShuffle {
        seed: u64,
        block_growth: u64,
    },
    DelayPattern {
        period: u64,
    },
}

impl Strategy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Strategy::RepeatHeavy {
                numerator,
                denominator,
                ..
            } if denominator == 0 || numerator >= denominator => Err(LabError::config(
                "adversary.numerator",
                "repeat probability must satisfy 0 <= numerator < denominator",
            )),
            Strategy::BlockShuffle {
                block_growth: 0, ..
            } => Err(LabError::config(
                "adversary.block_growth",
                "block_growth must be at least 1",
            )),
            Strategy::DelayPattern { period: 0 } => Err(LabError::config(
                "adversary.period",
                "period must be at least 1",
            )),
            _ => Ok(()),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match *self {
            Strategy::RepeatHeavy { seed, .. } | Strategy::BlockShuffle { seed, .. } => Some(seed),
            _ => None,
        }
    }

    /// Compact form without separators, for identifiers and file names.
    pub fn slug(&self) -> String {
        match self {
            Strategy::Canonical => "canonical".to_string(),
            Strategy::RepeatHeavy {
                seed,
                numerator,
                denominator,
            } => format!("repeat_heavy-s{seed}-p{numerator}of{denominator}"),
            Strategy::BlockShuffle { seed, block_growth } => {
                format!("block_shuffle-s{seed}-g{block_growth}")
            }
            Strategy::DelayPattern { period } => format!("delay_pattern-p{period}"),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Canonical => "canonical",
            Strategy::RepeatHeavy { .. } => "repeat_heavy",
            Strategy::BlockShuffle { .. } => "block_shuffle",
            Strategy::DelayPattern { .. } => "delay_pattern",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Canonical => write!(f, "canonical"),
            Strategy::RepeatHeavy {
                seed,
                numerator,
                denominator,
            } => write!(f, "repeat_heavy(seed={seed},p={numerator}/{denominator})"),
            Strategy::BlockShuffle { seed, block_growth } => {
                write!(f, "block_shuffle(seed={seed},growth={block_growth})")
            }
            Strategy::DelayPattern { period } => write!(f, "delay_pattern(period={period})"),
        }
    }
}

/// Canonical ascending listing, cycling when the language is finite.
#[derive(Clone, Debug)]
struct Listing {
    kind: LanguageKind,
    rank: u64,
}

impl Listing {
    fn next(&mut self) -> Element {
        match self.kind.nth_ascending(self.rank) {
            Some(x) => {
                self.rank += 1;
                x
            }
            None => {
                self.rank = 1;
                self.kind
                    .nth_ascending(0)
                    .expect("listings are only built over nonempty languages")
            }
        }
    }

    fn first(&self) -> Element {
        self.kind.nth_ascending(0).expect("nonempty listing")
    }
}

#[derive(Clone, Debug)]
enum Presenter {
    Canonical,
    RepeatHeavy {
        rng: ChaCha8Rng,
        numerator: u32,
        denominator: u32,
        history: Vec<Element>,
    },
    BlockShuffle {
        rng: ChaCha8Rng,
        growth: u64,
        block_no: u64,
        pending: Vec<Element>,
    },
    DelayPattern {
        period: u64,
    },
}

impl Presenter {
    fn new(strategy: &Strategy) -> Result<Self> {
        strategy.validate()?;
        Ok(match *strategy {
            Strategy::Canonical => Presenter::Canonical,
            Strategy::RepeatHeavy {
                seed,
                numerator,
                denominator,
            } => Presenter::RepeatHeavy {
                rng: ChaCha8Rng::seed_from_u64(seed),
                numerator,
                denominator,
                history: Vec::new(),
            },
            Strategy::BlockShuffle { seed, block_growth } => Presenter::BlockShuffle {
                rng: ChaCha8Rng::seed_from_u64(seed),
                growth: block_growth,
                block_no: 0,
                pending: Vec::new(),
            },
            Strategy::DelayPattern { period } => Presenter::DelayPattern { period },
        })
    }

    /// Produce the element for step `t` (1-based).
    fn next(&mut self, t: u64, listing: &mut Listing) -> Element {
        match self {
            Presenter::Canonical => listing.next(),
            Presenter::RepeatHeavy {
                rng,
                numerator,
                denominator,
                history,
            } => {
                if !history.is_empty() && rng.gen_ratio(*numerator, *denominator) {
                    history[rng.gen_range(0..history.len())]
                } else {
                    let fresh = listing.next();
                    history.push(fresh);
                    fresh
                }
            }
            Presenter::BlockShuffle {
                rng,
                growth,
                block_no,
                pending,
            } => {
                if pending.is_empty() {
                    *block_no += 1;
                    let size = *growth * *block_no;
                    pending.extend((0..size).map(|_| listing.next()));
                    pending.shuffle(rng);
                    // emitted from the back
                    pending.reverse();
                }
                pending.pop().expect("blocks are nonempty")
            }
            Presenter::DelayPattern { period } => {
                if (t - 1).is_multiple_of(*period) {
                    listing.next()
                } else {
                    listing.first()
                }
            }
        }
    }
}

/// A complete enumeration `w_1, w_2, ...` of a nonempty target `K`.
#[derive(Clone, Debug)]
pub struct EnumerationStream {
    target: LanguageDescriptor,
    strategy: Strategy,
    listing: Listing,
    presenter: Presenter,
    t: u64,
}

impl EnumerationStream {
    pub fn new(target: LanguageDescriptor, strategy: Strategy) -> Result<Self> {
        target.kind.validate()?;
        if target.kind.is_empty() {
            return Err(LabError::config(
                "target_index",
                "the empty language has no enumeration",
            ));
        }
        Ok(EnumerationStream {
            listing: Listing {
                kind: target.kind.clone(),
                rank: 0,
            },
            presenter: Presenter::new(&strategy)?,
            target,
            strategy,
            t: 0,
        })
    }

    pub fn target(&self) -> &LanguageDescriptor {
        &self.target
    }

    pub fn strategy(&self) -> &Strategy {
        &self.strategy
    }

    /// Steps emitted so far.
    pub fn position(&self) -> u64 {
        self.t
    }

    pub fn next_element(&mut self) -> Element {
        self.t += 1;
        self.presenter.next(self.t, &mut self.listing)
    }

    pub fn take_prefix(&mut self, n: usize) -> Vec<Element> {
        (0..n).map(|_| self.next_element()).collect()
    }
}

impl Iterator for EnumerationStream {
    type Item = Element;

    fn next(&mut self) -> Option<Element> {
        Some(self.next_element())
    }
}

/// A labeled enumeration of the whole domain: pairs `(w_t, 1{w_t ∈ K})`.
#[derive(Clone, Debug)]
pub struct LabeledEnumerationStream {
    target: LanguageDescriptor,
    strategy: Strategy,
    listing: Listing,
    presenter: Presenter,
    t: u64,
}

impl LabeledEnumerationStream {
    /// `K` may be empty here; every label is then 0.
    pub fn new(target: LanguageDescriptor, strategy: Strategy) -> Result<Self> {
        target.kind.validate()?;
        Ok(LabeledEnumerationStream {
            listing: Listing {
                kind: LanguageKind::AllOfDomain,
                rank: 0,
            },
            presenter: Presenter::new(&strategy)?,
            target,
            strategy,
            t: 0,
        })
    }

    pub fn target(&self) -> &LanguageDescriptor {
        &self.target
    }

    pub fn strategy(&self) -> &Strategy {
        &self.strategy
    }

    pub fn position(&self) -> u64 {
        self.t
    }

    pub fn next_labeled(&mut self) -> (Element, bool) {
        self.t += 1;
        let w = self.presenter.next(self.t, &mut self.listing);
        (w, self.target.contains(w))
    }
}

impl Iterator for LabeledEnumerationStream {
    type Item = (Element, bool);

    fn next(&mut self) -> Option<(Element, bool)> {
        Some(self.next_labeled())
    }
}
