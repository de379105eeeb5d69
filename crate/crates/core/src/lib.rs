//! Cause/effect span extraction as BIO sequence labeling.
//!
//! The pipeline parses a `Index; Text; Cause; Effect` corpus, tokenizes and
//! POS-tags each text, encodes the gold spans as `B-C I-C B-E I-E` labels
//! (everything else is padding, `-`), trains or imports token classifiers,
//! fuses their outputs by mode voting, repairs and selects one cause/effect
//! pair per instance, and scores the result.

pub mod bio;
pub mod cli;
pub mod corpus;
pub mod document;
pub mod ensemble;
pub mod error;
pub mod fsio;
pub mod lexer;
pub mod pos;
pub mod predictions;
pub mod preprocessed;
pub mod scorer;
pub mod tagger;

pub use bio::{Alignment, BioLabel, Bracketing, TagSequence};
pub use corpus::{CharSpan, Corpus, Instance, Mode};
pub use document::Document;
pub use ensemble::{CausalPair, EnsembleConfig};
pub use error::{Error, Result};
pub use lexer::Token;
pub use pos::PosTag;
pub use predictions::PredictionSet;
pub use scorer::ScoreReport;
pub use tagger::TaggerModel;
