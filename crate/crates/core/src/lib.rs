//! Domain-specific comparable corpora from Wikipedia dumps.
//!
//! The crate covers the whole pipeline: dump ingestion into a persisted
//! [`ingest::CorpusStore`], multilingual preprocessing, characteristic
//! vocabulary construction, the category-graph extractor ([`wt`]), the
//! retrieval extractor ([`ir`]), cross-language alignment through
//! inter-language links ([`align`]), domainness metrics ([`domainness`]) and
//! the evaluation statistics used for manual assessment ([`eval`]).
//! [`batch`] wires everything into reproducible runs.

pub mod align;
pub mod batch;
pub mod domainness;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod ir;
pub mod system;
pub mod text;
pub mod vocabulary;
pub mod wt;

pub use error::{Error, Result};
