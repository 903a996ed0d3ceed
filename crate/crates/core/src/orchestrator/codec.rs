use serde::{Deserialize, Serialize};

use super::{OrchestratorError, Representation, RunConfig};
use crate::lexicon::{build_word_set, BowGenome, ScoredWord, Taxonomy, WordSet};
use crate::tokenizer::{decode_token_genome, round_and_clamp, BpeVocab, TokenGenome};

/// Turns CMA-ES search points into prompts.
#[derive(Clone, Debug)]
pub enum Codec {
    Bow(WordSet),
    Token { vocab: BpeVocab, vocab_limit: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decoded {
    pub prompt: String,
    pub adjective: Option<ScoredWord>,
    pub noun: Option<ScoredWord>,
    pub tokens: Option<Vec<u32>>,
}

impl Codec {
    pub fn from_config(config: &RunConfig) -> Result<Self, OrchestratorError> {
        Ok(match config.representation {
            Representation::Bow => {
                let taxonomy = match &config.bow.taxonomy {
                    Some(path) => Taxonomy::load(path)?,
                    None => Taxonomy::bundled(),
                };
                Codec::Bow(build_word_set(
                    &taxonomy,
                    &config.bow.reference_adjective,
                    &config.bow.reference_noun,
                    config.bow.pool_size,
                    config.seed,
                )?)
            }
            Representation::Token => Codec::Token {
                vocab: match &config.token.vocab {
                    Some(path) => BpeVocab::load(path)?,
                    None => BpeVocab::fixture(),
                },
                vocab_limit: config.token.vocab_limit,
            },
        })
    }

    /// `(1, 1)` for bag-of-words (both references at full similarity);
    /// for tokens the encoding of the initial text, padded with id 0 or
    /// truncated to the genome length.
    pub fn initial_mean(&self, config: &RunConfig) -> Vec<f64> {
        match self {
            Codec::Bow(_) => vec![1.0, 1.0],
            Codec::Token { vocab, .. } => {
                let mut ids: Vec<f64> = vocab
                    .encode_text(&config.token.initial_text)
                    .into_iter()
                    .map(f64::from)
                    .collect();
                ids.resize(config.token.dimension, 0.0);
                ids
            }
        }
    }

    pub fn decode(&self, genome: &[f64]) -> Decoded {
        match self {
            Codec::Bow(words) => {
                let (adj, noun) = words.decode_words(BowGenome::from_slice(genome));
                Decoded {
                    prompt: format!("A {} car in the shape of {}", adj.word, noun.word),
                    adjective: Some(adj.clone()),
                    noun: Some(noun.clone()),
                    tokens: None,
                }
            }
            Codec::Token { vocab, vocab_limit } => {
                let limit = (*vocab_limit).min(vocab.vocab_size() as u32);
                let genome = TokenGenome {
                    values: genome.to_vec(),
                };
                Decoded {
                    prompt: decode_token_genome(&genome, vocab, limit),
                    adjective: None,
                    noun: None,
                    tokens: Some(round_and_clamp(&genome.values, limit)),
                }
            }
        }
    }

    pub fn word_set(&self) -> Option<&WordSet> {
        match self {
            Codec::Bow(w) => Some(w),
            Codec::Token { .. } => None,
        }
    }
}
