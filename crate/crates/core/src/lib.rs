//! Indexing a text for Hamming-distance search: report every suffix whose
//! prefix of length `|q|` is within `r <= k` mismatches of a query `q`.
//!
//! ```
//! use mismatch_index::{BuildParams, MismatchIndex};
//!
//! let text: Vec<u32> = b"ABRACADABRA".iter().map(|&c| c as u32).collect();
//! let index = MismatchIndex::build(&text, BuildParams::new(1, 2)).unwrap();
//! let q: Vec<u32> = b"ABRC".iter().map(|&c| c as u32).collect();
//! let hits: Vec<usize> = index.query(&q, 1).unwrap().iter().map(|m| m.position).collect();
//! assert_eq!(hits, vec![1, 8]);
//! ```

pub mod dictionary;
pub mod engine;
pub mod error;
pub mod fninv;
pub mod lcp;
pub mod oracle;
pub mod text;
pub mod tree;
pub mod trunc;

pub use engine::{BuildParams, BuildReport, DictionaryIndex, EntryMatch, Match, MismatchIndex, Mode, QueryReport};
pub use error::{BuildError, InversionError, QueryError, TextError};
pub use text::{max_k, pad_text, PaddedText, Symbol};
