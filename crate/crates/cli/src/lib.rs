//! Library side of `mmidx`: index files, input parsing and the benchmark sweep.

pub mod ingest;
pub mod persist;
pub mod sweep;
pub mod workload;
