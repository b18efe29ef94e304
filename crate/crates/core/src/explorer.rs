//! Bounded search for block/pillar decompositions of other `K(a, b)`.
//!
//! A probe takes `B_1 = K[1..b1]` and reads `P_1 = K[b1+1..b1+p1]` from the
//! sequence, then iterates `B_{k+1} = B_k P_k B_k`,
//! `P_{k+1} = G(P_k read as runs, b)` for as long as each new block is still
//! a prefix of `K(a, b)`. The number of successful steps is the probe's
//! verified depth. An empty result only means nothing was found within the
//! bounds.

use rayon::prelude::*;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::word::{expand_runs, kolakoski_stream_with_cap, Alphabet, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_block: usize,
    pub max_pillar: usize,
    pub depth: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_block: 64,
            max_pillar: 8,
            depth: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub alphabet: Alphabet,
    pub block_len: usize,
    pub pillar: Word,
    /// Recursion steps whose block was a true prefix, capped at the search depth.
    pub verified_depth: usize,
}

/// Candidates with verified depth at least 2, deepest first, then by block
/// and pillar length.
pub fn detect(
    alphabet: Alphabet,
    bounds: SearchBounds,
    budget: &Budget,
    parallel: bool,
) -> Result<Vec<Candidate>> {
    if bounds.max_block == 0 || bounds.max_pillar == 0 || bounds.depth == 0 {
        return Err(Error::OutOfRange {
            name: "search bounds",
            value: format!("{bounds:?}"),
            range: "all >= 1",
        });
    }
    let needed = prefix_needed(alphabet, bounds)?;
    budget.check_len("explorer prefix", needed)?;
    let reference = kolakoski_stream_with_cap(alphabet, needed as u64, budget.max_symbols)?;
    let reference = reference.symbols();
    let deadline = budget.start();

    let probe_block = |b1: usize| -> Result<Vec<Candidate>> {
        deadline.check("exploring")?;
        let mut found = Vec::new();
        for p1 in 1..=bounds.max_pillar {
            let depth = probe(alphabet, reference, b1, p1, bounds.depth);
            if depth >= 2 {
                found.push(Candidate {
                    alphabet,
                    block_len: b1,
                    pillar: Word::from_trusted(alphabet, reference[b1..b1 + p1].to_vec()),
                    verified_depth: depth,
                });
            }
        }
        Ok(found)
    };

    let per_block: Vec<Vec<Candidate>> = if parallel {
        (1..=bounds.max_block)
            .into_par_iter()
            .map(probe_block)
            .collect::<Result<_>>()?
    } else {
        (1..=bounds.max_block)
            .map(probe_block)
            .collect::<Result<_>>()?
    };
    let mut found: Vec<Candidate> = per_block.into_iter().flatten().collect();
    found.sort_by(|x, y| {
        y.verified_depth
            .cmp(&x.verified_depth)
            .then(x.block_len.cmp(&y.block_len))
            .then(x.pillar.len().cmp(&y.pillar.len()))
    });
    Ok(found)
}

/// Upper bound on the prefix length any probe can ask for.
fn prefix_needed(alphabet: Alphabet, bounds: SearchBounds) -> Result<u128> {
    let growth = alphabet.a().max(alphabet.b()) as u128;
    let overflow = Error::Overflow {
        level: bounds.depth,
    };
    let (mut block, mut pillar) = (bounds.max_block as u128, bounds.max_pillar as u128);
    let mut longest = block + pillar;
    for _ in 0..bounds.depth {
        block = block
            .checked_mul(2)
            .and_then(|b| b.checked_add(pillar))
            .ok_or(overflow.clone())?;
        pillar = pillar.checked_mul(growth).ok_or(overflow.clone())?;
        longest = longest.max(block);
    }
    Ok(longest)
}

fn probe(alphabet: Alphabet, reference: &[u8], b1: usize, p1: usize, depth: usize) -> usize {
    let mut block = reference[..b1].to_vec();
    let mut pillar = reference[b1..b1 + p1].to_vec();
    let mut verified = 0;
    while verified < depth {
        let next_len = 2 * block.len() + pillar.len();
        let matches = next_len <= reference.len()
            && reference[block.len()..block.len() + pillar.len()] == pillar[..]
            && reference[block.len() + pillar.len()..next_len] == block[..];
        if !matches {
            break;
        }
        verified += 1;
        if verified == depth {
            break;
        }
        let mut next_block = Vec::with_capacity(next_len);
        next_block.extend_from_slice(&block);
        next_block.extend_from_slice(&pillar);
        next_block.extend_from_slice(&block);
        let mut next_pillar = Vec::new();
        expand_runs(
            pillar.iter().map(|&s| s as u32),
            alphabet.b(),
            alphabet,
            &mut next_pillar,
        );
        block = next_block;
        pillar = next_pillar;
    }
    verified
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds(max_block: usize, max_pillar: usize, depth: usize) -> SearchBounds {
        SearchBounds {
            max_block,
            max_pillar,
            depth,
        }
    }

    #[test]
    fn finds_known_decomposition() {
        let found = detect(
            Alphabet::ONE_THREE,
            bounds(64, 8, 4),
            &Budget::default(),
            false,
        )
        .unwrap();
        let c = found
            .iter()
            .find(|c| c.block_len == 11)
            .expect("block of length 11");
        assert_eq!(c.pillar.symbols(), &[3]);
        assert_eq!(c.verified_depth, 4);
    }

    #[test]
    fn parallel_matches_sequential() {
        for (a, b) in [(1, 3), (1, 2), (3, 5)] {
            let alphabet = Alphabet::new(a, b).unwrap();
            let seq = detect(alphabet, bounds(40, 6, 3), &Budget::default(), false).unwrap();
            let par = detect(alphabet, bounds(40, 6, 3), &Budget::default(), true).unwrap();
            assert_eq!(seq, par);
        }
    }

    #[test]
    fn rejects_zero_bounds() {
        assert!(detect(
            Alphabet::ONE_THREE,
            bounds(0, 1, 1),
            &Budget::default(),
            false
        )
        .is_err());
    }

    #[test]
    fn respects_cap() {
        let tight = Budget::default().with_max_symbols(100);
        assert!(matches!(
            detect(Alphabet::ONE_THREE, bounds(64, 8, 4), &tight, false),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn one_two_has_nothing_within_bounds() {
        let found = detect(
            Alphabet::new(1, 2).unwrap(),
            bounds(64, 8, 3),
            &Budget::default(),
            false,
        )
        .unwrap();
        assert!(found.is_empty(), "{found:?}");
    }
}
