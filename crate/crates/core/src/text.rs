//! Symbols, sentinel-padded texts and altered strings.
//!
//! Strings are sequences of `u32` codes. Codes at or above [`RESERVED_BASE`] are
//! reserved for the sentinel, the dictionary terminator and dictionary position
//! counters; user input must stay below it.
//!
//! Positions inside this crate are 0-based. Match positions reported to callers
//! (see [`crate::engine::Match`]) are 1-based.

use smallvec::SmallVec;

use crate::error::TextError;

pub type Symbol = u32;

/// First reserved code. Everything below is available to the input alphabet.
pub const RESERVED_BASE: Symbol = 0x8000_0000;
/// Padding symbol appended `2k+1` times to every text.
pub const SENTINEL: Symbol = u32::MAX;
/// Separator placed between transformed dictionary entries.
pub const TERMINATOR: Symbol = u32::MAX - 1;

/// Largest `k` accepted for a text of length `n`.
///
/// The structure is meant for `k <= log2(n) / 2`; `k = 1` is always accepted so
/// that tiny texts can still be indexed.
pub fn max_k(n: usize) -> usize {
    if n < 2 {
        return 1;
    }
    let log = usize::BITS - 1 - n.leading_zeros();
    ((log / 2) as usize).max(1)
}

/// `ceil(log2(n))`, the height bound of the tree.
pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// A text followed by `2k+1` copies of [`SENTINEL`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaddedText {
    symbols: Vec<Symbol>,
    n: usize,
    k: usize,
}

impl PaddedText {
    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// The original text without padding.
    pub fn raw(&self) -> &[Symbol] {
        &self.symbols[..self.n]
    }

    /// Length of the original text.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Total stored length, `n + 2k + 1`.
    pub fn padded_len(&self) -> usize {
        self.symbols.len()
    }

    /// Suffix starting at 0-based position `i`, sentinels included.
    pub fn suffix(&self, i: usize) -> &[Symbol] {
        &self.symbols[i..]
    }
}

/// Pads `raw` with `2k+1` sentinels.
pub fn pad_text(raw: &[Symbol], k: usize) -> Result<PaddedText, TextError> {
    if let Some((position, &symbol)) = raw.iter().enumerate().find(|(_, &s)| s >= RESERVED_BASE) {
        return Err(TextError::ReservedSymbolInInput { position, symbol });
    }
    pad_unchecked(raw, k)
}

/// Like [`pad_text`] but lets counters and terminators through. The sentinel is
/// still rejected.
pub fn pad_text_reserved(raw: &[Symbol], k: usize) -> Result<PaddedText, TextError> {
    if let Some((position, &symbol)) = raw.iter().enumerate().find(|(_, &s)| s == SENTINEL) {
        return Err(TextError::ReservedSymbolInInput { position, symbol });
    }
    pad_unchecked(raw, k)
}

fn pad_unchecked(raw: &[Symbol], k: usize) -> Result<PaddedText, TextError> {
    let n = raw.len();
    if n == 0 {
        return Err(TextError::EmptyText);
    }
    if n < 2 {
        return Err(TextError::TextTooShort { n });
    }
    let max = max_k(n);
    if k < 1 || k > max {
        return Err(TextError::KOutOfRange { k, n, max });
    }
    let mut symbols = Vec::with_capacity(n + 2 * k + 1);
    symbols.extend_from_slice(raw);
    symbols.resize(n + 2 * k + 1, SENTINEL);
    Ok(PaddedText { symbols, n, k })
}

/// Where an altered string's characters come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    /// Suffix of the padded text starting at this 0-based position.
    Text(u32),
    /// Suffix of the query starting at this 0-based offset.
    Query(u32),
}

impl Base {
    pub fn shifted(self, by: usize) -> Base {
        match self {
            Base::Text(i) => Base::Text(i + by as u32),
            Base::Query(j) => Base::Query(j + by as u32),
        }
    }
}

/// A single substitution: the character at `offset` (0-based, relative to the
/// string start) becomes `symbol`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alteration {
    pub offset: u32,
    pub symbol: Symbol,
}

impl Alteration {
    pub fn new(offset: usize, symbol: Symbol) -> Self {
        Alteration { offset: offset as u32, symbol }
    }
}

pub type Alterations = SmallVec<[Alteration; 4]>;

/// A base string plus a canonical alteration list (strictly increasing offsets).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlteredString {
    pub base: Base,
    alts: Alterations,
}

/// Borrowed form of [`AlteredString`]; tree nodes hand these out without copying.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlteredRef<'a> {
    pub base: Base,
    pub alts: &'a [Alteration],
}

impl AlteredString {
    pub fn new(base: Base) -> Self {
        AlteredString { base, alts: SmallVec::new() }
    }

    pub fn text_suffix(i: usize) -> Self {
        Self::new(Base::Text(i as u32))
    }

    pub fn query() -> Self {
        Self::new(Base::Query(0))
    }

    /// Builds a canonical string from alterations applied in the given order;
    /// a later alteration at an already-altered offset replaces the earlier one.
    pub fn with_alterations(base: Base, seq: impl IntoIterator<Item = Alteration>) -> Self {
        let mut s = Self::new(base);
        for a in seq {
            s.push(a);
        }
        s
    }

    pub fn alterations(&self) -> &[Alteration] {
        &self.alts
    }

    /// Inserts an alteration, keeping offsets sorted and unique (last writer wins).
    pub fn push(&mut self, alt: Alteration) {
        match self.alts.binary_search_by_key(&alt.offset, |a| a.offset) {
            Ok(i) => self.alts[i] = alt,
            Err(i) => self.alts.insert(i, alt),
        }
    }

    pub fn as_ref(&self) -> AlteredRef<'_> {
        AlteredRef { base: self.base, alts: &self.alts }
    }
}

impl<'a> AlteredRef<'a> {
    pub fn to_owned(self) -> AlteredString {
        AlteredString { base: self.base, alts: self.alts.iter().copied().collect() }
    }

    pub fn is_canonical(&self) -> bool {
        self.alts.windows(2).all(|w| w[0].offset < w[1].offset)
    }
}

/// Character and length access for text- and query-based strings.
#[derive(Clone, Copy, Debug)]
pub struct Sources<'a> {
    pub text: &'a [Symbol],
    pub query: &'a [Symbol],
}

impl<'a> Sources<'a> {
    pub fn new(text: &'a PaddedText, query: &'a [Symbol]) -> Self {
        Sources { text: text.symbols(), query }
    }

    #[inline]
    pub fn base_len(&self, base: Base) -> usize {
        match base {
            Base::Text(i) => self.text.len() - i as usize,
            Base::Query(j) => self.query.len() - j as usize,
        }
    }

    #[inline]
    pub fn base_at(&self, base: Base, pos: usize) -> Symbol {
        match base {
            Base::Text(i) => self.text[i as usize + pos],
            Base::Query(j) => self.query[j as usize + pos],
        }
    }

    /// Materialized character of an altered string.
    #[inline]
    pub fn at(&self, s: AlteredRef<'_>, pos: usize) -> Symbol {
        match s.alts.binary_search_by_key(&(pos as u32), |a| a.offset) {
            Ok(i) => s.alts[i].symbol,
            Err(_) => self.base_at(s.base, pos),
        }
    }

    pub fn len(&self, s: AlteredRef<'_>) -> usize {
        self.base_len(s.base)
    }
}

/// Applies the alterations of `s` to its base string.
pub fn materialize(
    s: AlteredRef<'_>,
    text: &PaddedText,
    query: Option<&[Symbol]>,
) -> Result<Vec<Symbol>, TextError> {
    let mut out = match s.base {
        Base::Text(i) => text.suffix(i as usize).to_vec(),
        Base::Query(j) => query.ok_or(TextError::MissingQuery)?[j as usize..].to_vec(),
    };
    for a in s.alts {
        let len = out.len();
        let slot = out
            .get_mut(a.offset as usize)
            .ok_or(TextError::AlterationPastEnd { offset: a.offset as usize, len })?;
        *slot = a.symbol;
    }
    Ok(out)
}

/// Number of mismatching positions over the shorter of the two strings.
pub fn hamming_naive(a: &[Symbol], b: &[Symbol]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Naive longest common prefix.
pub fn lcp_naive(a: &[Symbol], b: &[Symbol]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Makes `s` agree with `pivot` on one more character: the alteration
/// `(lcp, pivot[lcp])` is added, where `lcp` is their longest common prefix.
pub fn pivot_alter(
    s: AlteredRef<'_>,
    lcp: usize,
    pivot: AlteredRef<'_>,
    src: &Sources<'_>,
) -> Result<AlteredString, TextError> {
    if lcp >= src.len(s).min(src.len(pivot)) {
        return Err(TextError::LcpAtEnd { lcp });
    }
    let mut out = s.to_owned();
    out.push(Alteration::new(lcp, src.at(pivot, lcp)));
    Ok(out)
}
