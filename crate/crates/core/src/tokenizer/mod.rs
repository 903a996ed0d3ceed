//! Byte-level BPE codec and the token genome that fills the template
//! `A car in the shape of <string>`.

mod genome;
mod vocab;

pub use genome::{decode_token_genome, round_and_clamp, TokenGenome, DEFAULT_TOKEN_DIMENSION, DEFAULT_VOCAB_LIMIT, TOKEN_PROMPT_PREFIX};
pub use vocab::{BpeVocab, VocabError};
