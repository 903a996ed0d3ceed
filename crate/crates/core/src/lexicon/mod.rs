//! Word taxonomy, Wu–Palmer similarity and the bag-of-words prompt codec.

mod taxonomy;
mod wordset;

pub use taxonomy::{Lemma, PartOfSpeech, Taxonomy};
pub use wordset::{build_word_set, decode_bow, BowGenome, ScoredWord, WordSet, BOW_TIE_TOLERANCE};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LexiconError {
    #[error("taxonomy parse error: {0}")]
    Parse(String),
    #[error("cycle through node {0:?}")]
    CycleDetected(String),
    #[error("taxonomy needs exactly one root: {0}")]
    MissingRoot(String),
    #[error("reference to unknown node {0:?}")]
    UnknownNode(String),
    #[error("word {0:?} is not in the taxonomy")]
    UnknownWord(String),
    #[error("word pool for {0} is empty")]
    EmptyPool(&'static str),
}
