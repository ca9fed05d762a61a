//! Reduction from dictionary queries to text indexing.
//!
//! Every entry `e` is rewritten as `e[0] c1 e[1] c2 ... e[m-1] cm`, where `cj` are
//! position counters drawn from the reserved code range. Transformed entries are
//! separated by `2k+1` terminators. A query gets the same interleaving, so an
//! alignment at an entry start compares data with data and counters with
//! counters, and the counters always agree.

use crate::error::TextError;
use crate::text::{pad_text_reserved, PaddedText, Symbol, RESERVED_BASE, TERMINATOR};

/// Largest entry length representable with distinct counter codes.
pub const MAX_ENTRY_LEN: usize = (TERMINATOR - RESERVED_BASE - 1) as usize;

#[inline]
fn counter(p: usize) -> Symbol {
    RESERVED_BASE + p as Symbol
}

#[derive(Clone, Debug)]
pub struct DictionaryCorpus {
    entries: Vec<Vec<Symbol>>,
    transformed: PaddedText,
    offsets: Vec<usize>,
}

impl DictionaryCorpus {
    pub fn entries(&self) -> &[Vec<Symbol>] {
        &self.entries
    }

    pub fn transformed(&self) -> &PaddedText {
        &self.transformed
    }

    /// 0-based start of each transformed entry in the transformed text.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Entry whose transformed form starts exactly at `pos` (0-based).
    pub fn entry_at(&self, pos: usize) -> Option<usize> {
        self.offsets.binary_search(&pos).ok()
    }
}

pub fn dictionary_transform(entries: &[Vec<Symbol>], k: usize) -> Result<DictionaryCorpus, TextError> {
    dictionary_transform_limited(entries, k, MAX_ENTRY_LEN)
}

/// [`dictionary_transform`] with an explicit cap on the number of counter codes.
pub fn dictionary_transform_limited(
    entries: &[Vec<Symbol>],
    k: usize,
    max_len: usize,
) -> Result<DictionaryCorpus, TextError> {
    if entries.is_empty() {
        return Err(TextError::EmptyDictionary);
    }
    let mut raw = Vec::new();
    let mut offsets = Vec::with_capacity(entries.len());
    for (idx, e) in entries.iter().enumerate() {
        if e.is_empty() {
            return Err(TextError::EmptyText);
        }
        if e.len() > max_len.min(MAX_ENTRY_LEN) {
            return Err(TextError::EntryTooLong { entry: idx, len: e.len(), max: max_len });
        }
        if let Some((position, &symbol)) = e.iter().enumerate().find(|(_, &s)| s >= RESERVED_BASE) {
            return Err(TextError::ReservedSymbolInInput { position, symbol });
        }
        if idx > 0 {
            raw.extend(std::iter::repeat(TERMINATOR).take(2 * k + 1));
        }
        offsets.push(raw.len());
        raw.extend(interleave(e));
    }
    let transformed = pad_text_reserved(&raw, k)?;
    Ok(DictionaryCorpus { entries: entries.to_vec(), transformed, offsets })
}

/// Interleaves `q` with position counters the same way entries are rewritten.
pub fn dictionary_query_transform(q: &[Symbol]) -> Result<Vec<Symbol>, TextError> {
    if q.is_empty() {
        return Err(TextError::EmptyQuery);
    }
    if q.len() > MAX_ENTRY_LEN {
        return Err(TextError::EntryTooLong { entry: 0, len: q.len(), max: MAX_ENTRY_LEN });
    }
    if let Some((position, &symbol)) = q.iter().enumerate().find(|(_, &s)| s >= RESERVED_BASE) {
        return Err(TextError::ReservedSymbolInInput { position, symbol });
    }
    Ok(interleave(q).collect())
}

fn interleave(s: &[Symbol]) -> impl Iterator<Item = Symbol> + '_ {
    s.iter().enumerate().flat_map(|(j, &c)| [c, counter(j + 1)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> Vec<Symbol> {
        s.bytes().map(Symbol::from).collect()
    }

    #[test]
    fn layout() {
        let c = dictionary_transform(&[sym("ab"), sym("cd")], 1).unwrap();
        let t = c.transformed().raw();
        assert_eq!(c.offsets(), &[0, 7]);
        assert_eq!(&t[..4], &[97, counter(1), 98, counter(2)]);
        assert_eq!(&t[4..7], &[TERMINATOR; 3]);
        assert_eq!(&t[7..], &[99, counter(1), 100, counter(2)]);
        assert_eq!(c.entry_at(7), Some(1));
        assert_eq!(c.entry_at(1), None);
        assert_eq!(dictionary_query_transform(&sym("ad")).unwrap(), vec![97, counter(1), 100, counter(2)]);
    }

    #[test]
    fn errors() {
        assert_eq!(dictionary_transform(&[], 1).unwrap_err(), TextError::EmptyDictionary);
        assert!(matches!(
            dictionary_transform_limited(&[sym("abc")], 1, 2),
            Err(TextError::EntryTooLong { entry: 0, len: 3, max: 2 })
        ));
        assert_eq!(dictionary_query_transform(&[]), Err(TextError::EmptyQuery));
    }
}
