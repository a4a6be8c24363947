//! Naive reference implementations, written straight from the definitions and
//! sharing no code with the library.

#![allow(dead_code)]

use limitlab::adversary::{EnumerationStream, Strategy};
use limitlab::lang::{Catalog, Element};

pub fn coded(code: u64, x: u64) -> bool {
    x <= 64 && (code >> (x - 1)) & 1 == 1
}

/// `x ∈ L_i` for the built-in families.
pub fn member(collection: &str, i: u64, x: u64) -> bool {
    match collection {
        "multiples" => x.is_multiple_of(i),
        "finite_prefixes" => x <= i,
        "finite_sets" => coded(i, x),
        "finite_plus_all" => i == 1 || coded(i - 1, x),
        other => panic!("no reference for {other}"),
    }
}

pub fn telltale(collection: &str, i: u64) -> Option<Vec<u64>> {
    match collection {
        "multiples" | "finite_prefixes" => Some(vec![i]),
        "finite_sets" => Some((1..=64).filter(|&x| coded(i, x)).collect()),
        "finite_plus_all" if i == 1 => None,
        "finite_plus_all" => Some((1..=64).filter(|&x| coded(i - 1, x)).collect()),
        other => panic!("no reference for {other}"),
    }
}

/// `L_i ⊆ L_j` checked on `1..=n`.
pub fn subset_upto(collection: &str, i: u64, j: u64, n: u64) -> bool {
    (1..=n).all(|x| !member(collection, i, x) || member(collection, j, x))
}

pub fn distinct(prefix: &[u64]) -> Vec<u64> {
    let mut v = prefix.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

pub fn consistent(collection: &str, i: u64, prefix: &[u64]) -> bool {
    prefix.iter().all(|&x| member(collection, i, x))
}

/// Least `i <= t` with `T_i ⊆ E_t ⊆ L_i`, else 1.
pub fn telltale_guesses(collection: &str, stream: &[u64]) -> Vec<u64> {
    (1..=stream.len())
        .map(|t| {
            let e = &stream[..t];
            (1..=t as u64)
                .find(|&i| {
                    let tt = telltale(collection, i).expect("tell-tale exists");
                    tt.iter().all(|x| e.contains(x)) && consistent(collection, i, e)
                })
                .unwrap_or(1)
        })
        .collect()
}

/// Least consistent `i <= t`, else 1.
pub fn consistency_min_guesses(collection: &str, stream: &[u64]) -> Vec<u64> {
    (1..=stream.len())
        .map(|t| {
            let e = &stream[..t];
            (1..=t as u64)
                .find(|&i| consistent(collection, i, e))
                .unwrap_or(1)
        })
        .collect()
}

/// Detection from identification, recomputed from scratch at every step.
pub fn alg1_verdicts(collection: &str, stream: &[u64], g: &dyn Fn(u64) -> bool) -> Vec<u8> {
    let guesses = telltale_guesses(collection, stream);
    (1..=stream.len() as u64)
        .map(|t| {
            let z = guesses[(t - 1) as usize];
            u8::from(!(1..=t).any(|x| g(x) && !member(collection, z, x)))
        })
        .collect()
}

/// The reduction run literally: fresh detectors on every prefix.
pub fn reduction_guesses(collection: &str, stream: &[u64]) -> Vec<u64> {
    (1..=stream.len())
        .map(|t| {
            let e = &stream[..t];
            (1..=t as u64)
                .filter(|&i| consistent(collection, i, e))
                .find(|&i| {
                    let g = |x: u64| member(collection, i, x);
                    *alg1_verdicts(collection, e, &g).last().unwrap() == 1
                })
                .unwrap_or(1)
        })
        .collect()
}

/// Least `t` from which `outputs` is constant and correct, if the last output is correct.
pub fn t_star(outputs: &[u64], correct: impl Fn(u64) -> bool) -> Option<u64> {
    let last = *outputs.last()?;
    if !correct(last) {
        return None;
    }
    (1..=outputs.len())
        .find(|&t| outputs[t - 1..].iter().all(|&o| o == last))
        .map(|t| t as u64)
}

pub fn prefix(collection: &str, k: u64, strategy: Strategy, n: usize) -> Vec<u64> {
    let target = Catalog::standard()
        .get(collection)
        .unwrap()
        .language(k)
        .unwrap();
    EnumerationStream::new(target, strategy)
        .unwrap()
        .take_prefix(n)
        .into_iter()
        .map(Element::value)
        .collect()
}

pub fn strategies() -> Vec<Strategy> {
    let mut v = vec![Strategy::Canonical, Strategy::DelayPattern { period: 3 }];
    for seed in [1, 2, 7] {
        v.push(Strategy::RepeatHeavy {
            seed,
            numerator: 1,
            denominator: 2,
        });
        v.push(Strategy::BlockShuffle {
            seed,
            block_growth: 2,
        });
    }
    v
}
