use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("text is empty")]
    EmptyText,
    #[error("text of length {n} is too short to index (need at least 2 symbols)")]
    TextTooShort { n: usize },
    #[error("k = {k} is out of range for a text of length {n} (allowed 1..={max})")]
    KOutOfRange { k: usize, n: usize, max: usize },
    #[error("symbol {symbol:#x} at position {position} is a reserved code")]
    ReservedSymbolInInput { position: usize, symbol: u32 },
    #[error("query contains the sentinel symbol at position {position}")]
    SentinelInQuery { position: usize },
    #[error("query is empty")]
    EmptyQuery,
    #[error("alteration offset {offset} is past the end of a string of length {len}")]
    AlterationPastEnd { offset: usize, len: usize },
    #[error("longest common prefix {lcp} reaches the end of one string; nothing to pivot-alter")]
    LcpAtEnd { lcp: usize },
    #[error("altered query string given but no query was supplied")]
    MissingQuery,
    #[error("dictionary entry {entry} has length {len}, more than the {max} position counters available")]
    EntryTooLong { entry: usize, len: usize, max: usize },
    #[error("dictionary has no entries")]
    EmptyDictionary,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("search radius {r} exceeds the index bound k = {k}")]
    RadiusOutOfRange { r: usize, k: usize },
    #[error(transparent)]
    Text(#[from] TextError),
    #[error("full-tree query requested on a truncated tree")]
    TruncatedTree,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InversionError {
    #[error("cannot invert the undefined value")]
    BotQuery,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error(transparent)]
    Text(#[from] TextError),
    #[error("sigma must be at least 1")]
    SigmaZero,
    #[error("tau must be at least 1")]
    TauZero,
}
