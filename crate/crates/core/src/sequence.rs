//! Symbol sequences, sliding-window counts and next-symbol distributions.

use std::collections::HashMap;

use indexmap::IndexMap;

use crate::error::{Error, Result};

/// Ordinal of a symbol within its [`Alphabet`].
pub type Symbol = usize;

/// A contiguous window of the observed sequence, as symbol ordinals.
pub type History = Vec<Symbol>;

/// Ordered set of distinct opaque tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet("no symbols".into()));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(Error::InvalidAlphabet(format!("bad token {s:?}")));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate token {s:?}")));
            }
        }
        Ok(Self { symbols, index })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, a: Symbol) -> &str {
        &self.symbols[a]
    }

    pub fn index_of(&self, token: &str) -> Option<Symbol> {
        self.index.get(token).copied()
    }

    fn single_char_tokens(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Renders a history as text: concatenated for single-character
    /// alphabets, space separated otherwise. The empty history renders as "".
    pub fn format_history(&self, h: &[Symbol]) -> String {
        let sep = if self.single_char_tokens() { "" } else { " " };
        h.iter()
            .map(|&a| self.symbols[a].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Inverse of [`Alphabet::format_history`].
    pub fn parse_history(&self, text: &str) -> Result<History> {
        let lookup = |t: &str| self.index_of(t).ok_or_else(|| Error::UnknownSymbol(t.into()));
        if self.single_char_tokens() {
            text.chars()
                .map(|c| lookup(c.encode_utf8(&mut [0; 4])))
                .collect()
        } else {
            text.split_whitespace().map(lookup).collect()
        }
    }
}

/// How raw text is split into tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TokenMode {
    /// One symbol per non-whitespace character.
    #[default]
    Chars,
    /// Whitespace-separated tokens.
    Whitespace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    tokens: Vec<Symbol>,
    alphabet: Alphabet,
}

impl SymbolSequence {
    pub fn new(tokens: Vec<Symbol>, alphabet: Alphabet) -> Result<Self> {
        if let Some(&bad) = tokens.iter().find(|&&t| t >= alphabet.len()) {
            return Err(Error::UnknownSymbol(format!("ordinal {bad}")));
        }
        Ok(Self { tokens, alphabet })
    }

    /// Tokenizes `text`; the alphabet is the set of distinct tokens in order
    /// of first appearance.
    pub fn parse(text: &str, mode: TokenMode) -> Result<Self> {
        let raw: Vec<String> = match mode {
            TokenMode::Chars => text
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(String::from)
                .collect(),
            TokenMode::Whitespace => text.split_whitespace().map(String::from).collect(),
        };
        if raw.is_empty() {
            return Err(Error::EmptySequence);
        }
        let mut index: IndexMap<String, Symbol> = IndexMap::new();
        let tokens = raw
            .into_iter()
            .map(|t| {
                let next = index.len();
                *index.entry(t).or_insert(next)
            })
            .collect();
        let alphabet = Alphabet::new(index.into_keys())?;
        Ok(Self { tokens, alphabet })
    }

    pub fn tokens(&self) -> &[Symbol] {
        &self.tokens
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Text form accepted back by [`SymbolSequence::parse`].
    pub fn to_text(&self) -> String {
        self.alphabet.format_history(&self.tokens)
    }
}

/// The 648-symbol binary sequence on which greedy CSSR overshoots the
/// minimum: 518 zeros, sixteen `1100` blocks, twenty-one `100` blocks, then
/// `101`.
pub fn gen_fixture() -> SymbolSequence {
    let mut tokens = vec![0; 518];
    for _ in 0..16 {
        tokens.extend([1, 1, 0, 0]);
    }
    for _ in 0..21 {
        tokens.extend([1, 0, 0]);
    }
    tokens.extend([1, 0, 1]);
    let alphabet = Alphabet::new(["0", "1"]).expect("static alphabet");
    SymbolSequence { tokens, alphabet }
}

/// Shift-append: drops the oldest symbol and appends `a`.
pub fn successor(x: &[Symbol], a: Symbol) -> History {
    let mut next = Vec::with_capacity(x.len());
    if !x.is_empty() {
        next.extend_from_slice(&x[1..]);
        next.push(a);
    }
    next
}

/// Occurrence counts of every window of length `0..=max_len + 1`.
///
/// Windows do not wrap around. Each level keeps its windows in order of
/// first appearance, which downstream code uses as the canonical order of
/// histories.
#[derive(Debug, Clone)]
pub struct WindowCounts {
    max_len: usize,
    alphabet: Alphabet,
    total_len: usize,
    levels: Vec<IndexMap<History, u64>>,
}

impl WindowCounts {
    pub fn new(seq: &SymbolSequence, max_len: usize) -> Result<Self> {
        let tokens = seq.tokens();
        if max_len + 1 > tokens.len() {
            return Err(Error::SequenceTooShort {
                len: tokens.len(),
                window: max_len + 1,
            });
        }
        let levels = (0..=max_len + 1)
            .map(|k| {
                let mut level: IndexMap<History, u64> = IndexMap::new();
                if k == 0 {
                    level.insert(Vec::new(), tokens.len() as u64);
                } else {
                    for w in tokens.windows(k) {
                        *level.entry(w.to_vec()).or_insert(0) += 1;
                    }
                }
                level
            })
            .collect();
        Ok(Self {
            max_len,
            alphabet: seq.alphabet().clone(),
            total_len: tokens.len(),
            levels,
        })
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn total_len(&self) -> usize {
        self.total_len
    }

    /// `#(x, y)`; zero for unobserved or over-long windows.
    pub fn count(&self, x: &[Symbol]) -> u64 {
        self.levels
            .get(x.len())
            .and_then(|level| level.get(x))
            .copied()
            .unwrap_or(0)
    }

    /// Rank of `x` in first-appearance order among windows of its length.
    pub fn appearance_rank(&self, x: &[Symbol]) -> Option<usize> {
        self.levels.get(x.len())?.get_index_of(x)
    }

    /// Observed windows of length `len` in order of first appearance.
    pub fn windows(&self, len: usize) -> impl Iterator<Item = (&History, u64)> {
        self.levels
            .get(len)
            .into_iter()
            .flat_map(|level| level.iter().map(|(h, &c)| (h, c)))
    }

    /// `#(xa, y)` for every symbol `a`.
    pub fn next_counts(&self, x: &[Symbol]) -> Vec<u64> {
        let mut buf = x.to_vec();
        buf.push(0);
        (0..self.alphabet.len())
            .map(|a| {
                *buf.last_mut().unwrap() = a;
                self.count(&buf)
            })
            .collect()
    }

    /// Number of occurrences of `x` that are followed by another symbol.
    pub fn support(&self, x: &[Symbol]) -> u64 {
        self.next_counts(x).iter().sum()
    }

    /// The distinct length-`max_len` histories with an observed continuation,
    /// in order of first appearance.
    pub fn strings(&self) -> Vec<History> {
        self.windows(self.max_len)
            .filter(|(h, _)| self.support(h) > 0)
            .map(|(h, _)| h.clone())
            .collect()
    }

    pub fn cond_dist(&self, x: &[Symbol]) -> Result<ConditionalDistribution> {
        let counts = self.next_counts(x);
        if counts.iter().all(|&c| c == 0) {
            return Err(Error::UnobservedHistory(x.to_vec()));
        }
        Ok(ConditionalDistribution::from_counts(counts))
    }

    /// Pooled distribution of a set of histories: summed continuation counts
    /// over summed totals.
    pub fn state_dist<H: AsRef<[Symbol]>>(&self, histories: &[H]) -> Result<ConditionalDistribution> {
        if histories.is_empty() {
            return Err(Error::EmptyState);
        }
        let mut pooled = vec![0u64; self.alphabet.len()];
        for h in histories {
            let counts = self.next_counts(h.as_ref());
            if counts.iter().all(|&c| c == 0) {
                return Err(Error::UnobservedHistory(h.as_ref().to_vec()));
            }
            pooled.iter_mut().zip(counts).for_each(|(p, c)| *p += c);
        }
        Ok(ConditionalDistribution::from_counts(pooled))
    }
}

/// Empirical next-symbol distribution with the counts behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDistribution {
    pub probs: Vec<f64>,
    pub counts: Vec<u64>,
    pub support_count: u64,
}

impl ConditionalDistribution {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let support_count: u64 = counts.iter().sum();
        let probs = counts
            .iter()
            .map(|&c| {
                if support_count == 0 {
                    0.0
                } else {
                    c as f64 / support_count as f64
                }
            })
            .collect();
        Self {
            probs,
            counts,
            support_count,
        }
    }
}

/// For each history and symbol, the index of the successor history when the
/// transition was observed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuccessorTable {
    next: Vec<Vec<Option<usize>>>,
    dangling: Vec<(usize, Symbol)>,
}

impl SuccessorTable {
    /// A transition `x -a->` is present iff `#(xa) > 0` and its successor is
    /// one of `histories`; observed transitions leaving the set are recorded
    /// as dangling.
    pub fn new(histories: &[History], wc: &WindowCounts) -> Self {
        let index: HashMap<&[Symbol], usize> = histories
            .iter()
            .enumerate()
            .map(|(i, h)| (h.as_slice(), i))
            .collect();
        let mut dangling = Vec::new();
        let next = histories
            .iter()
            .enumerate()
            .map(|(i, h)| {
                wc.next_counts(h)
                    .into_iter()
                    .enumerate()
                    .map(|(a, c)| {
                        if c == 0 {
                            return None;
                        }
                        let target = index.get(successor(h, a).as_slice()).copied();
                        if target.is_none() {
                            dangling.push((i, a));
                        }
                        target
                    })
                    .collect()
            })
            .collect();
        Self { next, dangling }
    }

    /// Builds a table from explicit rows (`rows[i][a]`).
    pub fn from_rows(next: Vec<Vec<Option<usize>>>) -> Self {
        Self {
            next,
            dangling: Vec::new(),
        }
    }

    pub fn get(&self, i: usize, a: Symbol) -> Option<usize> {
        self.next[i][a]
    }

    pub fn row(&self, i: usize) -> &[Option<usize>] {
        &self.next[i]
    }

    pub fn len(&self) -> usize {
        self.next.len()
    }

    pub fn is_empty(&self) -> bool {
        self.next.is_empty()
    }

    pub fn alphabet_size(&self) -> usize {
        self.next.first().map_or(0, Vec::len)
    }

    pub fn dangling(&self) -> &[(usize, Symbol)] {
        &self.dangling
    }

    /// `preds[l]` lists every `(i, a)` with `get(i, a) == Some(l)`.
    pub fn predecessors(&self) -> Vec<Vec<(usize, Symbol)>> {
        let mut preds = vec![Vec::new(); self.next.len()];
        for (i, row) in self.next.iter().enumerate() {
            for (a, target) in row.iter().enumerate() {
                if let Some(l) = *target {
                    preds[l].push((i, a));
                }
            }
        }
        preds
    }
}
