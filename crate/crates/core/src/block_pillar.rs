//! The block/pillar tower.
//!
//! Blocks and pillars are defined by
//!
//! ```text
//! B_{n+1} = B_n P_n B_n
//! P_{n+1} = G(P_n read as run lengths, pillar start symbol)
//! ```
//!
//! with `B_1 = 1 3 3 3 1 1 1 3 3 3 1` and `P_1 = 3` for `K(1, 3)`. Pillar
//! lengths grow like `2.2^n`, so besides materialized [`BlockPillarLevel`]s
//! the module offers [`PillarStream`] and [`BlockStream`], which produce the
//! symbols of a level in `O(n)` memory.

use crate::analytics::LevelStats;
use crate::budget::{Budget, Deadline};
use crate::error::{Error, Result};
use crate::word::{generate_with_cap, word_as_runs, Alphabet, Kolakoski, Word};

/// Seeds of a block/pillar recursion over some alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower {
    alphabet: Alphabet,
    block_seed: Vec<u8>,
    pillar_seed: Vec<u8>,
    pillar_start: u8,
}

impl Tower {
    /// `B_1 = G(<1,3,3,3,1>, 1)`, `P_1 = <3>`, pillars generated from 3.
    pub fn kolakoski_13() -> Tower {
        Tower {
            alphabet: Alphabet::ONE_THREE,
            block_seed: vec![1, 3, 3, 3, 1, 1, 1, 3, 3, 3, 1],
            pillar_seed: vec![3],
            pillar_start: 3,
        }
    }

    pub fn new(block_seed: &Word, pillar_seed: &Word, pillar_start: u8) -> Result<Tower> {
        let alphabet = block_seed.alphabet();
        if block_seed.is_empty() || pillar_seed.is_empty() {
            return Err(Error::Empty("tower seed"));
        }
        alphabet.require(pillar_start)?;
        if pillar_seed.alphabet() != alphabet {
            return Err(Error::SymbolOutsideAlphabet {
                symbol: pillar_seed.symbols()[0],
                alphabet,
            });
        }
        Ok(Tower {
            alphabet,
            block_seed: block_seed.symbols().to_vec(),
            pillar_seed: pillar_seed.symbols().to_vec(),
            pillar_start,
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn block_seed(&self) -> Word {
        Word::from_trusted(self.alphabet, self.block_seed.clone())
    }

    pub fn pillar_seed(&self) -> Word {
        Word::from_trusted(self.alphabet, self.pillar_seed.clone())
    }

    pub fn pillar_start(&self) -> u8 {
        self.pillar_start
    }

    /// Lazy symbols of `P_n`.
    pub fn pillar_stream(&self, n: usize) -> Result<PillarStream> {
        if n == 0 {
            return Err(Error::InvalidLevel);
        }
        Ok(PillarStream {
            alphabet: self.alphabet,
            start: self.pillar_start,
            seed: self.pillar_seed.clone(),
            seed_pos: 0,
            expanders: vec![Expander::default(); n - 1],
            tallies: vec![PillarTally::default(); n],
        })
    }

    /// Lazy symbols of `B_n`. Blocks and pillars no longer than
    /// `cache_limit` symbols are materialized once and copied; larger
    /// pillars are re-streamed every time they occur.
    pub fn block_stream(&self, n: usize, cache_limit: usize) -> Result<BlockStream> {
        if n == 0 {
            return Err(Error::InvalidLevel);
        }
        let mut blocks: Vec<Option<Vec<u8>>> = vec![None; n];
        let mut pillars: Vec<Option<Vec<u8>>> = vec![None; n];
        blocks[0] = Some(self.block_seed.clone());
        pillars[0] = Some(self.pillar_seed.clone());
        for k in 1..n {
            let (prev_b, prev_p) = (&blocks[k - 1], &pillars[k - 1]);
            if let (Some(b), Some(p)) = (prev_b, prev_p) {
                if 2 * b.len() + p.len() <= cache_limit {
                    let mut next = Vec::with_capacity(2 * b.len() + p.len());
                    next.extend_from_slice(b);
                    next.extend_from_slice(p);
                    next.extend_from_slice(b);
                    blocks[k] = Some(next);
                }
            }
            if let Some(p) = &pillars[k - 1] {
                let len: usize = p.iter().map(|&s| s as usize).sum();
                if len <= cache_limit {
                    let mut next = Vec::with_capacity(len);
                    crate::word::expand_runs(
                        p.iter().map(|&s| s as u32),
                        self.pillar_start,
                        self.alphabet,
                        &mut next,
                    );
                    pillars[k] = Some(next);
                }
            }
        }
        Ok(BlockStream {
            tower: self.clone(),
            blocks,
            pillars,
            pending: vec![Piece::Block(n)],
            current: Current::Idle,
            emitted: 0,
        })
    }
}

/// Per-level counters accumulated while a [`PillarStream`] runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PillarTally {
    /// Symbols emitted so far.
    pub len: u64,
    /// Occurrences of the alphabet's first letter.
    pub first_letter: u64,
    /// Sum of symbols at even 1-based positions.
    pub even_sum: u64,
    pub last: Option<u8>,
}

impl PillarTally {
    #[inline]
    fn record_run(&mut self, symbol: u8, count: u64, first_letter: u8) {
        let evens = (self.len + count) / 2 - self.len / 2;
        self.len += count;
        self.even_sum += evens * symbol as u64;
        if symbol == first_letter {
            self.first_letter += count;
        }
        self.last = Some(symbol);
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Expander {
    symbol: u8,
    remaining: u32,
    started: bool,
}

/// Streams `P_n` through a stack of `n - 1` run expanders rooted at `P_1`.
///
/// Expander `k` reads the symbols of `P_k` as run lengths and emits
/// `P_{k+1}`. Every level keeps a [`PillarTally`], so draining the stream
/// also yields exact counts for every lower pillar.
#[derive(Debug, Clone)]
pub struct PillarStream {
    alphabet: Alphabet,
    start: u8,
    seed: Vec<u8>,
    seed_pos: usize,
    expanders: Vec<Expander>,
    tallies: Vec<PillarTally>,
}

impl PillarStream {
    /// Next symbol of `P_{level + 1}`.
    fn pull(&mut self, level: usize) -> Option<u8> {
        let symbol = if level == 0 {
            let s = *self.seed.get(self.seed_pos)?;
            self.seed_pos += 1;
            s
        } else {
            if self.expanders[level - 1].remaining == 0 {
                let run = self.pull(level - 1)?;
                self.begin_run(level - 1, run);
            }
            let e = &mut self.expanders[level - 1];
            e.remaining -= 1;
            e.symbol
        };
        self.tallies[level].record_run(symbol, 1, self.alphabet.a());
        Some(symbol)
    }

    #[inline]
    fn begin_run(&mut self, expander: usize, run: u8) {
        let e = &mut self.expanders[expander];
        e.symbol = if e.started {
            self.alphabet.other(e.symbol)
        } else {
            self.start
        };
        e.started = true;
        e.remaining = run as u32;
    }

    /// Fills `buf` with the next symbols, returning how many were written.
    /// Returns less than `buf.len()` only once the pillar is exhausted.
    pub fn fill(&mut self, buf: &mut [u8]) -> usize {
        let top = self.expanders.len();
        if top == 0 {
            let mut written = 0;
            while written < buf.len() {
                match self.pull(0) {
                    Some(s) => buf[written] = s,
                    None => break,
                }
                written += 1;
            }
            return written;
        }
        let first_letter = self.alphabet.a();
        let mut written = 0;
        while written < buf.len() {
            if self.expanders[top - 1].remaining == 0 {
                match self.pull(top - 1) {
                    Some(run) => self.begin_run(top - 1, run),
                    None => break,
                }
            }
            let e = &mut self.expanders[top - 1];
            let take = (e.remaining as usize).min(buf.len() - written);
            buf[written..written + take].fill(e.symbol);
            e.remaining -= take as u32;
            self.tallies[top].record_run(e.symbol, take as u64, first_letter);
            written += take;
        }
        written
    }

    /// Tallies for `P_1 ..= P_n`. Complete only once the stream is drained.
    pub fn tallies(&self) -> &[PillarTally] {
        &self.tallies
    }

    /// Drains the stream in chunks, checking `deadline` between chunks.
    pub fn drain(mut self, chunk_size: usize, deadline: &Deadline) -> Result<Vec<PillarTally>> {
        let mut buf = vec![0u8; chunk_size.max(1)];
        while self.fill(&mut buf) == buf.len() {
            deadline.check("streaming pillar")?;
        }
        Ok(self.tallies)
    }
}

impl Iterator for PillarStream {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        let top = self.expanders.len();
        self.pull(top)
    }
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Block(usize),
    Pillar(usize),
}

#[derive(Debug, Clone)]
enum Current {
    Idle,
    Cached {
        block: bool,
        level: usize,
        offset: usize,
    },
    Streaming(PillarStream),
}

/// Streams `B_n` by walking `B_k = B_{k-1} P_{k-1} B_{k-1}` depth first.
#[derive(Debug, Clone)]
pub struct BlockStream {
    tower: Tower,
    blocks: Vec<Option<Vec<u8>>>,
    pillars: Vec<Option<Vec<u8>>>,
    pending: Vec<Piece>,
    current: Current,
    emitted: u64,
}

impl BlockStream {
    /// Symbols written so far.
    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    /// Fills `buf`, returning less than `buf.len()` only at the end of the block.
    pub fn fill(&mut self, buf: &mut [u8]) -> usize {
        let mut written = 0;
        while written < buf.len() {
            match &mut self.current {
                Current::Cached {
                    block,
                    level,
                    offset,
                } => {
                    let src = if *block {
                        &self.blocks[*level - 1]
                    } else {
                        &self.pillars[*level - 1]
                    };
                    let src = src.as_deref().expect("cached piece");
                    let take = (src.len() - *offset).min(buf.len() - written);
                    buf[written..written + take].copy_from_slice(&src[*offset..*offset + take]);
                    *offset += take;
                    written += take;
                    if *offset == src.len() {
                        self.current = Current::Idle;
                    }
                }
                Current::Streaming(stream) => {
                    let got = stream.fill(&mut buf[written..]);
                    written += got;
                    if written < buf.len() {
                        self.current = Current::Idle;
                    }
                }
                Current::Idle => match self.pending.pop() {
                    None => break,
                    Some(Piece::Block(k)) => {
                        if self.blocks[k - 1].is_some() {
                            self.current = Current::Cached {
                                block: true,
                                level: k,
                                offset: 0,
                            };
                        } else {
                            self.pending.push(Piece::Block(k - 1));
                            self.pending.push(Piece::Pillar(k - 1));
                            self.pending.push(Piece::Block(k - 1));
                        }
                    }
                    Some(Piece::Pillar(k)) => {
                        self.current = if self.pillars[k - 1].is_some() {
                            Current::Cached {
                                block: false,
                                level: k,
                                offset: 0,
                            }
                        } else {
                            Current::Streaming(
                                self.tower.pillar_stream(k).expect("level is positive"),
                            )
                        };
                    }
                },
            }
        }
        self.emitted += written as u64;
        written
    }
}

/// `(B_n, P_n)` for `K(1, 3)` with exact statistics. Words above the
/// materialization cap are left out; the statistics are always present.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPillarLevel {
    pub n: usize,
    pub block: Option<Word>,
    pub pillar: Option<Word>,
    pub stats: LevelStats,
}

pub fn initial_level() -> BlockPillarLevel {
    let tower = Tower::kolakoski_13();
    BlockPillarLevel {
        n: 1,
        block: Some(tower.block_seed()),
        pillar: Some(tower.pillar_seed()),
        stats: LevelStats::initial(),
    }
}

/// Builds level `n + 1` from level `n`.
pub fn next_level(level: &BlockPillarLevel, budget: &Budget) -> Result<BlockPillarLevel> {
    let a = Alphabet::ONE_THREE;
    let next_pillar_ones = match &level.pillar {
        Some(p) => p
            .symbols()
            .iter()
            .skip(1)
            .step_by(2)
            .map(|&s| s as u128)
            .sum(),
        None => {
            let tallies = Tower::kolakoski_13()
                .pillar_stream(level.n)?
                .drain(budget.chunk_size, &budget.start())?;
            tallies[level.n - 1].even_sum as u128
        }
    };
    let stats = level.stats.successor(next_pillar_ones)?;

    let block = match (&level.block, &level.pillar) {
        (Some(b), Some(p)) if budget.check_len("block", stats.block_len).is_ok() => {
            Some(b.concat(&[p, b])?)
        }
        _ => None,
    };
    let pillar = match &level.pillar {
        Some(p) if stats.pillar_len <= budget.max_symbols as u128 => Some(generate_with_cap(
            &word_as_runs(p)?,
            3,
            a,
            budget.max_symbols,
        )?),
        _ => None,
    };
    Ok(BlockPillarLevel {
        n: level.n + 1,
        block,
        pillar,
        stats,
    })
}

/// Materializes level `n`, failing if `B_n` or `P_n` exceeds the cap.
pub fn build_level(n: usize, budget: &Budget) -> Result<BlockPillarLevel> {
    if n == 0 {
        return Err(Error::InvalidLevel);
    }
    let deadline = budget.start();
    let mut level = initial_level();
    while level.n < n {
        level = next_level(&level, budget)?;
        deadline.check("building levels")?;
    }
    if level.block.is_none() {
        budget.check_len("block", level.stats.block_len)?;
    }
    if level.pillar.is_none() {
        budget.check_len("pillar", level.stats.pillar_len)?;
    }
    Ok(level)
}

/// Lazy `P_n` of `K(1, 3)`.
pub fn pillar_stream(n: usize) -> Result<PillarStream> {
    Tower::kolakoski_13().pillar_stream(n)
}

/// Which structural property a [`Verdict`] is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Check {
    Prefix,
    Step,
    Lemma,
    Identity,
}

impl Check {
    pub const ALL: [Check; 4] = [Check::Prefix, Check::Step, Check::Lemma, Check::Identity];

    pub fn name(&self) -> &'static str {
        match self {
            Check::Prefix => "prefix",
            Check::Step => "step",
            Check::Lemma => "lemma",
            Check::Identity => "identity",
        }
    }
}

/// Outcome of a structural check at one level. `first_mismatch` is a
/// 1-based symbol position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub check: Check,
    pub level: usize,
    pub passed: bool,
    pub compared: u64,
    pub first_mismatch: Option<u64>,
}

/// Compares two chunked sources symbol by symbol. Sources must fill whole
/// chunks until they end.
fn compare_streams<L, R>(
    mut left: L,
    mut right: R,
    chunk: usize,
    deadline: &Deadline,
) -> Result<(u64, Option<u64>)>
where
    L: FnMut(&mut [u8]) -> usize,
    R: FnMut(&mut [u8]) -> usize,
{
    let chunk = chunk.max(1);
    let mut lbuf = vec![0u8; chunk];
    let mut rbuf = vec![0u8; chunk];
    let mut compared = 0u64;
    loop {
        let nl = left(&mut lbuf);
        let nr = right(&mut rbuf[..nl.max(1).min(chunk)]);
        let n = nl.min(nr);
        if let Some(i) = lbuf[..n].iter().zip(&rbuf[..n]).position(|(x, y)| x != y) {
            return Ok((compared + i as u64, Some(compared + i as u64 + 1)));
        }
        compared += n as u64;
        if nl != nr && nl > 0 {
            // One side ended early; the first missing symbol is the mismatch.
            return Ok((compared, Some(compared + 1)));
        }
        if nl < chunk {
            return Ok((compared, None));
        }
        deadline.check("comparing streams")?;
    }
}

/// Checks that `B_n` equals the first `L_n` symbols of `K(1, 3)`, streaming
/// both sides.
pub fn verify_prefix(n: usize, budget: &Budget) -> Result<Verdict> {
    let deadline = budget.start();
    let mut block = Tower::kolakoski_13().block_stream(n, budget.chunk_size)?;
    let mut reference = Kolakoski::new(Alphabet::ONE_THREE);
    let cap = budget.max_symbols;
    let mut seen = 0u64;
    // The reference generator keeps a queue proportional to the prefix it has
    // produced, so the cap bounds the comparison as well.
    let (compared, first_mismatch) = compare_streams(
        |buf| {
            let room = (cap - seen).min(buf.len() as u64) as usize;
            let got = block.fill(&mut buf[..room]);
            seen += got as u64;
            got
        },
        |buf| reference.fill(buf),
        budget.chunk_size,
        &deadline,
    )?;
    if seen >= cap && block.fill(&mut [0u8; 1]) > 0 {
        return Err(Error::CapExceeded {
            what: "prefix comparison",
            requested: seen as u128 + 1,
            cap,
        });
    }
    Ok(Verdict {
        check: Check::Prefix,
        level: n,
        passed: first_mismatch.is_none(),
        compared,
        first_mismatch,
    })
}

/// Checks a materialized word against the Kolakoski sequence over its own
/// alphabet. `level` is only carried into the verdict.
pub fn verify_block_prefix(word: &Word, level: usize, budget: &Budget) -> Result<Verdict> {
    let deadline = budget.start();
    let mut reference = Kolakoski::new(word.alphabet());
    let mut offset = 0usize;
    let symbols = word.symbols();
    let (compared, first_mismatch) = compare_streams(
        |buf| {
            let take = (symbols.len() - offset).min(buf.len());
            buf[..take].copy_from_slice(&symbols[offset..offset + take]);
            offset += take;
            take
        },
        |buf| reference.fill(buf),
        budget.chunk_size,
        &deadline,
    )?;
    Ok(Verdict {
        check: Check::Prefix,
        level,
        passed: first_mismatch.is_none(),
        compared,
        first_mismatch,
    })
}

/// Checks `G(B_n read as runs, 1) = B_{n+1}`. `B_n` is materialized; the
/// expansion and `B_{n+1}` are compared chunk by chunk.
pub fn verify_kolakoski_step(n: usize, budget: &Budget) -> Result<Verdict> {
    let level = build_level(n, budget)?;
    let next_len = level
        .stats
        .block_len
        .checked_mul(2)
        .and_then(|x| x.checked_add(level.stats.pillar_len))
        .ok_or(Error::Overflow { level: n + 1 })?;
    budget.check_len("next block", next_len)?;
    let block = level.block.as_ref().expect("build_level materializes");
    verify_step_of(block, n, budget)
}

/// Step check for an explicit `B_n`, so that corrupted words can be tested.
pub fn verify_step_of(block: &Word, n: usize, budget: &Budget) -> Result<Verdict> {
    let deadline = budget.start();
    let a = Alphabet::ONE_THREE;
    let runs = word_as_runs(block)?;
    let mut expected = Tower::kolakoski_13().block_stream(n + 1, budget.chunk_size)?;

    let mut run_idx = 0usize;
    let mut symbol = a.b();
    let mut left_in_run = 0u32;
    let runs = runs.runs();
    let expansion = |buf: &mut [u8]| {
        let mut written = 0;
        while written < buf.len() {
            if left_in_run == 0 {
                let Some(&r) = runs.get(run_idx) else { break };
                run_idx += 1;
                symbol = a.other(symbol);
                left_in_run = r;
            }
            let take = (left_in_run as usize).min(buf.len() - written);
            buf[written..written + take].fill(symbol);
            left_in_run -= take as u32;
            written += take;
        }
        written
    };
    let (compared, first_mismatch) = compare_streams(
        expansion,
        |buf| expected.fill(buf),
        budget.chunk_size,
        &deadline,
    )?;
    // The expansion may also stop short of B_{n+1}.
    let trailing = if first_mismatch.is_none() {
        let mut probe = [0u8; 1];
        (expected.fill(&mut probe) > 0).then_some(compared + 1)
    } else {
        None
    };
    let first_mismatch = first_mismatch.or(trailing);
    Ok(Verdict {
        check: Check::Step,
        level: n,
        passed: first_mismatch.is_none(),
        compared,
        first_mismatch,
    })
}

/// Parity and last-symbol facts for one level, all read from streamed words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LemmaVerdict {
    pub level: usize,
    pub pillar_len_odd: bool,
    pub block_ends_in_one: bool,
    pub pillar_ends_in_three: bool,
    pub block_len_odd: bool,
    /// Streamed lengths agree with `stats`.
    pub lengths_match: bool,
}

impl LemmaVerdict {
    pub fn passed(&self) -> bool {
        self.pillar_len_odd
            && self.block_ends_in_one
            && self.pillar_ends_in_three
            && self.block_len_odd
            && self.lengths_match
    }
}

pub fn verify_lemma(stats: &LevelStats, budget: &Budget) -> Result<LemmaVerdict> {
    let n = stats.n;
    let deadline = budget.start();
    let tower = Tower::kolakoski_13();

    let pillar = tower
        .pillar_stream(n)?
        .drain(budget.chunk_size, &deadline)?;
    let pillar = pillar[n - 1];

    let mut block = tower.block_stream(n, budget.chunk_size)?;
    let mut buf = vec![0u8; budget.chunk_size.max(1)];
    let mut block_last = None;
    loop {
        let got = block.fill(&mut buf);
        if got > 0 {
            block_last = Some(buf[got - 1]);
        }
        if got < buf.len() {
            break;
        }
        deadline.check("streaming block")?;
    }
    let block_len = block.emitted();

    Ok(LemmaVerdict {
        level: n,
        pillar_len_odd: pillar.len % 2 == 1,
        block_ends_in_one: block_last == Some(1),
        pillar_ends_in_three: pillar.last == Some(3),
        block_len_odd: block_len % 2 == 1,
        lengths_match: pillar.len as u128 == stats.pillar_len
            && block_len as u128 == stats.block_len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{count_symbol, kolakoski_stream};

    fn drain(mut s: PillarStream) -> Vec<u8> {
        let mut out = Vec::new();
        let mut buf = [0u8; 7];
        loop {
            let n = s.fill(&mut buf);
            out.extend_from_slice(&buf[..n]);
            if n < buf.len() {
                return out;
            }
        }
    }

    fn drain_block(mut s: BlockStream) -> Vec<u8> {
        let mut out = Vec::new();
        let mut buf = [0u8; 13];
        loop {
            let n = s.fill(&mut buf);
            out.extend_from_slice(&buf[..n]);
            if n < buf.len() {
                return out;
            }
        }
    }

    #[test]
    fn initial_level_values() {
        let l = initial_level();
        assert_eq!(l.n, 1);
        assert_eq!(l.block.as_ref().unwrap().len(), 11);
        assert_eq!(l.pillar.as_ref().unwrap().symbols(), &[3]);
        assert_eq!(l.stats.block_ones, 5);
        assert_eq!(l.stats.pillar_ones, 0);
        assert_eq!(l.block.as_ref().unwrap().last(), Some(1));
        assert_eq!(l.pillar.as_ref().unwrap().last(), Some(3));
    }

    #[test]
    fn next_levels_match_hand_values() {
        let b = Budget::default();
        let l1 = initial_level();
        let l2 = next_level(&l1, &b).unwrap();
        let b1 = l1.block.as_ref().unwrap();
        let mut expected = b1.symbols().to_vec();
        expected.push(3);
        expected.extend_from_slice(b1.symbols());
        assert_eq!(l2.block.as_ref().unwrap().symbols(), expected.as_slice());
        assert_eq!(l2.block.as_ref().unwrap().len(), 23);
        assert_eq!(l2.pillar.as_ref().unwrap().symbols(), &[3, 3, 3]);

        let l3 = next_level(&l2, &b).unwrap();
        assert_eq!(l3.block.as_ref().unwrap().len(), 49);
        assert_eq!(
            l3.pillar.as_ref().unwrap().symbols(),
            &[3, 3, 3, 1, 1, 1, 3, 3, 3]
        );

        let l4 = next_level(&l3, &b).unwrap();
        assert_eq!(
            (
                l4.stats.block_len,
                l4.stats.pillar_len,
                l4.stats.block_ones,
                l4.stats.pillar_ones
            ),
            (107, 21, 43, 8)
        );
    }

    #[test]
    fn levels_beyond_cap_keep_exact_stats() {
        let small = Budget::default().with_max_symbols(100);
        let mut l = initial_level();
        let mut reference = initial_level();
        for _ in 0..7 {
            l = next_level(&l, &small).unwrap();
            reference = next_level(&reference, &Budget::default()).unwrap();
            assert_eq!(l.stats, reference.stats);
        }
        assert!(l.block.is_none());
        assert!(l.pillar.is_none());
        assert!(matches!(
            build_level(7, &small),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn pillar_stream_small_levels() {
        assert_eq!(drain(pillar_stream(1).unwrap()), vec![3]);
        assert_eq!(drain(pillar_stream(2).unwrap()), vec![3, 3, 3]);
        let p4 = drain(pillar_stream(4).unwrap());
        assert_eq!(&p4[..9], &[3, 3, 3, 1, 1, 1, 3, 3, 3]);
        assert_eq!(p4.len(), 21);
        assert_eq!(p4.iter().filter(|&&s| s == 1).count(), 8);
        assert!(pillar_stream(0).is_err());
    }

    #[test]
    fn pillar_stream_iterator_matches_fill() {
        let by_iter: Vec<u8> = pillar_stream(9).unwrap().collect();
        assert_eq!(by_iter, drain(pillar_stream(9).unwrap()));
    }

    #[test]
    fn streams_match_materialized_levels() {
        let tower = Tower::kolakoski_13();
        let mut level = initial_level();
        for n in 1..=12 {
            let p = level.pillar.as_ref().unwrap();
            let b = level.block.as_ref().unwrap();
            assert_eq!(drain(tower.pillar_stream(n).unwrap()), p.symbols(), "P_{n}");
            for cache in [0, 16, 1 << 20] {
                let streamed = drain_block(tower.block_stream(n, cache).unwrap());
                assert_eq!(streamed, b.symbols(), "B_{n} cache {cache}");
            }
            level = next_level(&level, &Budget::default()).unwrap();
        }
    }

    #[test]
    fn tallies_count_every_lower_pillar() {
        let tallies = pillar_stream(8)
            .unwrap()
            .drain(64, &Budget::default().start())
            .unwrap();
        let mut level = initial_level();
        for t in &tallies {
            let p = level.pillar.as_ref().unwrap();
            assert_eq!(t.len, p.len() as u64);
            assert_eq!(t.first_letter, count_symbol(p, 1).unwrap());
            assert_eq!(t.last, p.last());
            let even: u64 = p
                .symbols()
                .iter()
                .skip(1)
                .step_by(2)
                .map(|&s| s as u64)
                .sum();
            assert_eq!(t.even_sum, even);
            level = next_level(&level, &Budget::default()).unwrap();
        }
    }

    #[test]
    fn prefix_small_levels() {
        let b = Budget::default();
        for (n, len) in [(1, 11), (2, 23), (3, 49)] {
            let v = verify_prefix(n, &b).unwrap();
            assert!(v.passed);
            assert_eq!(v.compared, len);
        }
        // Tiny chunks exercise the chunk boundaries.
        let v = verify_prefix(8, &b.with_chunk_size(3)).unwrap();
        assert!(v.passed, "{v:?}");
    }

    #[test]
    fn prefix_detects_injected_fault() {
        let mut b3 = build_level(3, &Budget::default()).unwrap().block.unwrap();
        b3.flip_symbol(30).unwrap();
        let v = verify_block_prefix(&b3, 3, &Budget::default().with_chunk_size(8)).unwrap();
        assert!(!v.passed);
        assert_eq!(v.first_mismatch, Some(30));
    }

    #[test]
    fn prefix_of_other_alphabet_word() {
        let a = Alphabet::new(1, 2).unwrap();
        let w = kolakoski_stream(a, 500).unwrap();
        assert!(
            verify_block_prefix(&w, 0, &Budget::default())
                .unwrap()
                .passed
        );
    }

    #[test]
    fn step_small_levels() {
        for n in 1..=8 {
            let v = verify_kolakoski_step(n, &Budget::default()).unwrap();
            assert!(v.passed, "{v:?}");
        }
        let mut b2 = build_level(2, &Budget::default()).unwrap().block.unwrap();
        b2.flip_symbol(5).unwrap();
        let v = verify_step_of(&b2, 2, &Budget::default()).unwrap();
        assert!(!v.passed);
    }

    #[test]
    fn step_respects_cap() {
        let tight = Budget::default().with_max_symbols(40);
        assert!(matches!(
            verify_kolakoski_step(2, &tight),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn prefix_respects_cap() {
        for (cap, chunk) in [(300, 1 << 20), (300, 100), (235, 1 << 20), (50, 7)] {
            let budget = Budget::default()
                .with_max_symbols(cap)
                .with_chunk_size(chunk);
            assert!(verify_prefix(5, &Budget::default()).unwrap().passed);
            let err = verify_prefix(6, &budget).unwrap_err();
            assert!(matches!(err, Error::CapExceeded { .. }), "{cap}/{chunk}");
        }
        let exact = Budget::default().with_max_symbols(517).with_chunk_size(11);
        assert!(verify_prefix(6, &exact).unwrap().passed);
    }

    #[test]
    fn lemma_small_levels() {
        let mut level = initial_level();
        for _ in 0..10 {
            let v = verify_lemma(&level.stats, &Budget::default()).unwrap();
            assert!(v.passed(), "{v:?}");
            level = next_level(&level, &Budget::default()).unwrap();
        }
    }

    #[test]
    fn generic_tower_streams() {
        let a = Alphabet::new(3, 5).unwrap();
        let tower = Tower::new(
            &Word::new(a, vec![3]).unwrap(),
            &Word::new(a, vec![3]).unwrap(),
            5,
        )
        .unwrap();
        // B_2 = 3 3 3, P_2 = 5 5 5, B_3 = 333 555 333.
        assert_eq!(
            drain_block(tower.block_stream(2, 0).unwrap()),
            vec![3, 3, 3]
        );
        assert_eq!(drain(tower.pillar_stream(2).unwrap()), vec![5, 5, 5]);
        assert_eq!(
            drain_block(tower.block_stream(3, 0).unwrap()),
            vec![3, 3, 3, 5, 5, 5, 3, 3, 3]
        );
    }
}
