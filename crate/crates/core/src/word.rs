//! Finite words over a two-letter alphabet, run-length vectors, the generation
//! operator and a self-reading streamer for `K(a, b)`.

use std::collections::VecDeque;
use std::fmt;

use crate::budget::DEFAULT_MAX_SYMBOLS;
use crate::error::{Error, Result};

/// Two distinct positive symbols. `a` is the symbol a Kolakoski sequence
/// starts with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    a: u8,
    b: u8,
}

impl Alphabet {
    /// The alphabet of `K(1, 3)`.
    pub const ONE_THREE: Alphabet = Alphabet { a: 1, b: 3 };

    pub fn new(a: u8, b: u8) -> Result<Self> {
        if a == 0 || b == 0 || a == b {
            return Err(Error::InvalidAlphabet { a, b });
        }
        Ok(Alphabet { a, b })
    }

    pub fn a(&self) -> u8 {
        self.a
    }

    pub fn b(&self) -> u8 {
        self.b
    }

    pub fn contains(&self, symbol: u8) -> bool {
        symbol == self.a || symbol == self.b
    }

    /// The symbol that is not `symbol`. For `{1, 3}` this is `4 - symbol`.
    #[inline]
    pub fn other(&self, symbol: u8) -> u8 {
        debug_assert!(self.contains(symbol));
        if symbol == self.a {
            self.b
        } else {
            self.a
        }
    }

    pub(crate) fn require(&self, symbol: u8) -> Result<()> {
        if self.contains(symbol) {
            Ok(())
        } else {
            Err(Error::SymbolOutsideAlphabet {
                symbol,
                alphabet: *self,
            })
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.a, self.b)
    }
}

/// A finite word, one byte per symbol. Every symbol belongs to the alphabet.
///
/// The empty word is a legal value (it is the identity for concatenation) but
/// every operation that models an object from the construction rejects it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    alphabet: Alphabet,
    symbols: Vec<u8>,
}

impl Word {
    pub fn new(alphabet: Alphabet, symbols: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = symbols.iter().find(|&&s| !alphabet.contains(s)) {
            return Err(Error::SymbolOutsideAlphabet {
                symbol: bad,
                alphabet,
            });
        }
        Ok(Word { alphabet, symbols })
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        Word {
            alphabet,
            symbols: Vec::new(),
        }
    }

    pub(crate) fn from_trusted(alphabet: Alphabet, symbols: Vec<u8>) -> Self {
        debug_assert!(symbols.iter().all(|&s| alphabet.contains(s)));
        Word { alphabet, symbols }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<u8> {
        self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn last(&self) -> Option<u8> {
        self.symbols.last().copied()
    }

    /// Concatenates `parts` onto a copy of `self`. All parts must share the
    /// alphabet.
    pub fn concat(&self, parts: &[&Word]) -> Result<Word> {
        let total = self.len() + parts.iter().map(|w| w.len()).sum::<usize>();
        let mut symbols = Vec::with_capacity(total);
        symbols.extend_from_slice(&self.symbols);
        for part in parts {
            if part.alphabet != self.alphabet {
                // Report the first foreign symbol, or the mismatched letter
                // itself when the part happens to be empty.
                let symbol = part
                    .symbols
                    .iter()
                    .copied()
                    .find(|&s| !self.alphabet.contains(s))
                    .unwrap_or(part.alphabet.a);
                return Err(Error::SymbolOutsideAlphabet {
                    symbol,
                    alphabet: self.alphabet,
                });
            }
            symbols.extend_from_slice(&part.symbols);
        }
        Ok(Word::from_trusted(self.alphabet, symbols))
    }

    /// Replaces the symbol at 1-based `position` with the other letter.
    /// Used to inject faults into otherwise correct words.
    pub fn flip_symbol(&mut self, position: usize) -> Result<()> {
        let slot = position
            .checked_sub(1)
            .and_then(|i| self.symbols.get_mut(i))
            .ok_or(Error::OutOfRange {
                name: "position",
                value: position.to_string(),
                range: "1..=len",
            })?;
        *slot = self.alphabet.other(*slot);
        Ok(())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// A sequence of positive run lengths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RunLengthVector(Vec<u32>);

impl RunLengthVector {
    pub fn new(runs: Vec<u32>) -> Result<Self> {
        if let Some(i) = runs.iter().position(|&r| r == 0) {
            return Err(Error::ZeroRun { index: i + 1 });
        }
        Ok(RunLengthVector(runs))
    }

    pub fn runs(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Length of the word this vector generates.
    pub fn total(&self) -> u128 {
        self.0.iter().map(|&r| r as u128).sum()
    }
}

/// Expands `runs` into `s^r1 t^r2 s^r3 ...` where `t` is the other letter,
/// using the default materialization cap.
pub fn generate(runs: &RunLengthVector, start: u8, alphabet: Alphabet) -> Result<Word> {
    generate_with_cap(runs, start, alphabet, DEFAULT_MAX_SYMBOLS)
}

pub fn generate_with_cap(
    runs: &RunLengthVector,
    start: u8,
    alphabet: Alphabet,
    cap: u64,
) -> Result<Word> {
    alphabet.require(start)?;
    if runs.is_empty() {
        return Err(Error::Empty("generate"));
    }
    let total = runs.total();
    if total > cap as u128 {
        return Err(Error::CapExceeded {
            what: "generate",
            requested: total,
            cap,
        });
    }
    let mut symbols = Vec::with_capacity(total as usize);
    expand_runs(runs.runs().iter().copied(), start, alphabet, &mut symbols);
    Ok(Word::from_trusted(alphabet, symbols))
}

/// Appends the expansion of `runs` to `out`, alternating from `start`.
pub(crate) fn expand_runs<I>(runs: I, start: u8, alphabet: Alphabet, out: &mut Vec<u8>)
where
    I: IntoIterator<Item = u32>,
{
    let mut symbol = start;
    for r in runs {
        out.extend(std::iter::repeat_n(symbol, r as usize));
        symbol = alphabet.other(symbol);
    }
}

/// Maximal-run decomposition of a nonempty word, with its first symbol.
pub fn run_length_encode(word: &Word) -> Result<(RunLengthVector, u8)> {
    let first = *word
        .symbols()
        .first()
        .ok_or(Error::Empty("run_length_encode"))?;
    let runs = word
        .symbols()
        .chunk_by(|x, y| x == y)
        .map(|run| run.len() as u32)
        .collect();
    Ok((RunLengthVector(runs), first))
}

/// Reads the symbols of `word` as run lengths, one run per symbol.
pub fn word_as_runs(word: &Word) -> Result<RunLengthVector> {
    if word.is_empty() {
        return Err(Error::Empty("word_as_runs"));
    }
    Ok(RunLengthVector(
        word.symbols().iter().map(|&s| s as u32).collect(),
    ))
}

/// Number of occurrences of `symbol` in `word`.
pub fn count_symbol(word: &Word, symbol: u8) -> Result<u64> {
    word.alphabet().require(symbol)?;
    Ok(word.symbols().iter().filter(|&&s| s == symbol).count() as u64)
}

/// The first `n` symbols of `K(a, b)`, materialized under the default cap.
pub fn kolakoski_stream(alphabet: Alphabet, n: u64) -> Result<Word> {
    kolakoski_stream_with_cap(alphabet, n, DEFAULT_MAX_SYMBOLS)
}

pub fn kolakoski_stream_with_cap(alphabet: Alphabet, n: u64, cap: u64) -> Result<Word> {
    if n == 0 {
        return Err(Error::Empty("kolakoski_stream"));
    }
    if n > cap {
        return Err(Error::CapExceeded {
            what: "kolakoski_stream",
            requested: n as u128,
            cap,
        });
    }
    let mut symbols = vec![0u8; n as usize];
    let written = Kolakoski::new(alphabet).fill(&mut symbols);
    debug_assert_eq!(written, symbols.len());
    Ok(Word::from_trusted(alphabet, symbols))
}

/// Self-reading generator for `K(a, b)`.
///
/// Symbols that have been emitted but not yet consumed as run lengths wait in
/// a queue. Run `i` takes its length from position `i`; when position `i` is
/// the first symbol of run `i` itself, that symbol is its own length.
#[derive(Debug, Clone)]
pub struct Kolakoski {
    alphabet: Alphabet,
    pending: VecDeque<u8>,
    symbol: u8,
    remaining: u32,
    runs_started: u64,
    self_read: bool,
}

impl Kolakoski {
    pub fn new(alphabet: Alphabet) -> Self {
        Kolakoski {
            alphabet,
            pending: VecDeque::new(),
            symbol: alphabet.b(),
            remaining: 0,
            runs_started: 0,
            self_read: false,
        }
    }

    /// Number of emitted symbols still waiting to be read as run lengths.
    pub fn pending(&self) -> usize {
        self.pending.len()
    }

    #[inline]
    fn start_run(&mut self) {
        self.symbol = if self.runs_started.is_multiple_of(2) {
            self.alphabet.a()
        } else {
            self.alphabet.b()
        };
        self.runs_started += 1;
        self.remaining = match self.pending.pop_front() {
            Some(len) => len as u32,
            None => {
                self.self_read = true;
                self.symbol as u32
            }
        };
    }

    /// Writes the next `buf.len()` symbols. Always fills the buffer.
    pub fn fill(&mut self, buf: &mut [u8]) -> usize {
        for slot in buf.iter_mut() {
            *slot = self.step();
        }
        buf.len()
    }

    #[inline]
    fn step(&mut self) -> u8 {
        if self.remaining == 0 {
            self.start_run();
        }
        self.remaining -= 1;
        if self.self_read {
            self.self_read = false;
        } else {
            self.pending.push_back(self.symbol);
        }
        self.symbol
    }
}

impl Iterator for Kolakoski {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        Some(self.step())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w13(symbols: &[u8]) -> Word {
        Word::new(Alphabet::ONE_THREE, symbols.to_vec()).unwrap()
    }

    fn runs(r: &[u32]) -> RunLengthVector {
        RunLengthVector::new(r.to_vec()).unwrap()
    }

    const B1: [u8; 11] = [1, 3, 3, 3, 1, 1, 1, 3, 3, 3, 1];

    #[test]
    fn alphabet_rejects_equal_or_zero() {
        assert!(Alphabet::new(1, 1).is_err());
        assert!(Alphabet::new(0, 3).is_err());
        assert!(Alphabet::new(3, 0).is_err());
        assert!(Alphabet::new(3, 1).is_ok());
        assert_eq!(Alphabet::ONE_THREE.other(1), 3);
        assert_eq!(Alphabet::ONE_THREE.other(3), 1);
    }

    #[test]
    fn word_rejects_foreign_symbols() {
        let err = Word::new(Alphabet::ONE_THREE, vec![1, 2]).unwrap_err();
        assert!(matches!(
            err,
            Error::SymbolOutsideAlphabet { symbol: 2, .. }
        ));
    }

    #[test]
    fn generate_initial_block() {
        let b1 = generate(&runs(&[1, 3, 3, 3, 1]), 1, Alphabet::ONE_THREE).unwrap();
        assert_eq!(b1.symbols(), &B1);
        assert_eq!(b1.len(), 11);
    }

    #[test]
    fn generate_small_cases() {
        let a = Alphabet::ONE_THREE;
        assert_eq!(generate(&runs(&[3]), 3, a).unwrap().symbols(), &[3, 3, 3]);
        assert_eq!(generate(&runs(&[1]), 1, a).unwrap().symbols(), &[1]);
        assert_eq!(
            generate(&runs(&[3, 3, 3]), 3, a).unwrap().symbols(),
            &[3, 3, 3, 1, 1, 1, 3, 3, 3]
        );
    }

    #[test]
    fn generate_errors() {
        let a = Alphabet::ONE_THREE;
        assert!(matches!(
            generate(&runs(&[1]), 2, a),
            Err(Error::SymbolOutsideAlphabet { symbol: 2, .. })
        ));
        assert_eq!(
            RunLengthVector::new(vec![1, 0, 2]).unwrap_err(),
            Error::ZeroRun { index: 2 }
        );
        assert!(matches!(generate(&runs(&[]), 1, a), Err(Error::Empty(_))));
        assert!(matches!(
            generate_with_cap(&runs(&[3, 3]), 1, a, 5),
            Err(Error::CapExceeded {
                requested: 6,
                cap: 5,
                ..
            })
        ));
    }

    #[test]
    fn generate_other_alphabet_alternates() {
        let a = Alphabet::new(3, 5).unwrap();
        let w = generate(&runs(&[2, 1, 3]), 5, a).unwrap();
        assert_eq!(w.symbols(), &[5, 5, 3, 5, 5, 5]);
    }

    #[test]
    fn encode_initial_block() {
        let (r, first) = run_length_encode(&w13(&B1)).unwrap();
        assert_eq!(r.runs(), &[1, 3, 3, 3, 1]);
        assert_eq!(first, 1);

        let (r, first) = run_length_encode(&w13(&[3, 3, 3])).unwrap();
        assert_eq!(r.runs(), &[3]);
        assert_eq!(first, 3);

        assert!(run_length_encode(&Word::empty(Alphabet::ONE_THREE)).is_err());
    }

    #[test]
    fn word_as_runs_keeps_every_symbol() {
        assert_eq!(word_as_runs(&w13(&[3, 3, 3])).unwrap().runs(), &[3, 3, 3]);
        assert_eq!(word_as_runs(&w13(&[1])).unwrap().runs(), &[1]);
        assert_eq!(
            word_as_runs(&w13(&B1)).unwrap().runs(),
            &[1, 3, 3, 3, 1, 1, 1, 3, 3, 3, 1]
        );
        assert!(word_as_runs(&Word::empty(Alphabet::ONE_THREE)).is_err());
    }

    #[test]
    fn count_symbol_cases() {
        assert_eq!(count_symbol(&w13(&B1), 1).unwrap(), 5);
        assert_eq!(count_symbol(&w13(&B1), 3).unwrap(), 6);
        assert_eq!(count_symbol(&w13(&[3, 3, 3]), 1).unwrap(), 0);
        assert_eq!(count_symbol(&w13(&[1]), 1).unwrap(), 1);
        assert!(count_symbol(&w13(&[1]), 2).is_err());
    }

    #[test]
    fn kolakoski_known_prefixes() {
        let k13 = kolakoski_stream(Alphabet::ONE_THREE, 12).unwrap();
        assert_eq!(k13.to_string(), "1 3 3 3 1 1 1 3 3 3 1 3");
        let k12 = kolakoski_stream(Alphabet::new(1, 2).unwrap(), 12).unwrap();
        assert_eq!(k12.to_string(), "1 2 2 1 1 2 1 2 2 1 2 2");
        assert_eq!(
            kolakoski_stream(Alphabet::ONE_THREE, 1).unwrap().symbols(),
            &[1]
        );
        let k23 = kolakoski_stream(Alphabet::new(2, 3).unwrap(), 10).unwrap();
        assert_eq!(k23.symbols(), &[2, 2, 3, 3, 2, 2, 2, 3, 3, 3]);
        let k35 = kolakoski_stream(Alphabet::new(3, 5).unwrap(), 12).unwrap();
        assert_eq!(k35.symbols(), &[3, 3, 3, 5, 5, 5, 3, 3, 3, 5, 5, 5]);
    }

    #[test]
    fn kolakoski_rejects_zero_and_cap() {
        assert!(kolakoski_stream(Alphabet::ONE_THREE, 0).is_err());
        assert!(matches!(
            kolakoski_stream_with_cap(Alphabet::ONE_THREE, 100, 10),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn flip_symbol_bounds() {
        let mut w = w13(&[1, 3]);
        w.flip_symbol(2).unwrap();
        assert_eq!(w.symbols(), &[1, 1]);
        assert!(w.flip_symbol(0).is_err());
        assert!(w.flip_symbol(3).is_err());
    }

    /// Run-length encoding of a prefix, minus its possibly truncated last run,
    /// must itself be a prefix of the sequence.
    fn assert_self_encoding(alphabet: Alphabet, n: u64) {
        let prefix = kolakoski_stream(alphabet, n).unwrap();
        let (runs, first) = run_length_encode(&prefix).unwrap();
        assert_eq!(first, alphabet.a());
        let complete = &runs.runs()[..runs.len() - 1];
        let reread = kolakoski_stream(alphabet, complete.len() as u64).unwrap();
        let as_u32: Vec<u32> = reread.symbols().iter().map(|&s| s as u32).collect();
        assert_eq!(complete, as_u32.as_slice(), "alphabet {alphabet}");
    }

    #[test]
    fn self_encoding_small() {
        for (a, b) in [(1, 2), (1, 3), (2, 3), (3, 5), (2, 1), (3, 1)] {
            assert_self_encoding(Alphabet::new(a, b).unwrap(), 10_000);
        }
    }

    fn word13() -> impl Strategy<Value = Word> {
        prop::collection::vec(prop::sample::select(vec![1u8, 3]), 1..200)
            .prop_map(|s| Word::new(Alphabet::ONE_THREE, s).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn encode_then_generate_round_trips(w in word13()) {
            let (runs, first) = run_length_encode(&w).unwrap();
            prop_assert_eq!(generate(&runs, first, w.alphabet()).unwrap(), w);
        }

        #[test]
        fn generate_then_encode_returns_runs(
            r in prop::collection::vec(1u32..6, 1..100),
            start in prop::sample::select(vec![1u8, 3]),
        ) {
            let r = RunLengthVector::new(r).unwrap();
            let w = generate(&r, start, Alphabet::ONE_THREE).unwrap();
            prop_assert_eq!(w.len() as u128, r.total());
            let (back, first) = run_length_encode(&w).unwrap();
            prop_assert_eq!(back, r);
            prop_assert_eq!(first, start);
        }

        #[test]
        fn counts_add_over_concatenation(u in word13(), v in word13()) {
            let uv = u.concat(&[&v]).unwrap();
            for x in [1u8, 3] {
                prop_assert_eq!(
                    count_symbol(&uv, x).unwrap(),
                    count_symbol(&u, x).unwrap() + count_symbol(&v, x).unwrap()
                );
            }
            prop_assert_eq!(
                count_symbol(&uv, 1).unwrap() + count_symbol(&uv, 3).unwrap(),
                uv.len() as u64
            );
        }
    }
}
