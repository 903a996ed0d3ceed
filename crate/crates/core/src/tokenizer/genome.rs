use serde::{Deserialize, Serialize};

use super::BpeVocab;

pub const TOKEN_PROMPT_PREFIX: &str = "A car in the shape of ";
/// Token ids are limited to `[0, 32768)`.
pub const DEFAULT_VOCAB_LIMIT: u32 = 32768;
pub const DEFAULT_TOKEN_DIMENSION: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TokenGenome {
    pub values: Vec<f64>,
}

/// Rounds half away from zero, then clamps to `[0, vocab_limit - 1]`.
/// NaN maps to 0.
pub fn round_and_clamp(values: &[f64], vocab_limit: u32) -> Vec<u32> {
    let top = vocab_limit.saturating_sub(1) as f64;
    values
        .iter()
        .map(|&v| {
            if v.is_nan() {
                0
            } else {
                v.round().clamp(0.0, top) as u32
            }
        })
        .collect()
}

/// Builds the prompt for a token genome. The effective id limit is the
/// smaller of `vocab_limit` and the vocabulary size.
pub fn decode_token_genome(genome: &TokenGenome, vocab: &BpeVocab, vocab_limit: u32) -> String {
    let limit = vocab_limit.min(vocab.vocab_size() as u32);
    let ids = round_and_clamp(&genome.values, limit);
    format!("{TOKEN_PROMPT_PREFIX}{}", vocab.decode_tokens(&ids))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rounding_examples() {
        assert_eq!(round_and_clamp(&[5.4, 5.5, -3.2], 32768), vec![5, 6, 0]);
        assert_eq!(round_and_clamp(&[40000.9], 32768), vec![32767]);
        assert_eq!(round_and_clamp(&[0.0, 17.0, 32767.0], 32768), vec![0, 17, 32767]);
        assert_eq!(round_and_clamp(&[-0.5, f64::NAN, f64::INFINITY], 10), vec![0, 0, 9]);
    }

    #[test]
    fn wing_prompt() {
        let v = BpeVocab::fixture();
        let ids = v.encode_text(" wing");
        let g = TokenGenome { values: ids.iter().map(|&i| i as f64).collect() };
        assert_eq!(decode_token_genome(&g, &v, DEFAULT_VOCAB_LIMIT), "A car in the shape of wing");
    }

    #[test]
    fn zeros_decode_to_token_zero() {
        let v = BpeVocab::fixture();
        let g = TokenGenome { values: vec![0.0; 3] };
        assert_eq!(decode_token_genome(&g, &v, DEFAULT_VOCAB_LIMIT), "A car in the shape of !!!");
    }

    #[test]
    fn rounding_plateau() {
        let v = BpeVocab::fixture();
        let a = TokenGenome { values: vec![100.0, 250.2, 7.0] };
        let b = TokenGenome { values: vec![100.45, 249.8, 6.6] };
        assert_eq!(decode_token_genome(&a, &v, 32768), decode_token_genome(&b, &v, 32768));
    }

    proptest! {
        #[test]
        fn ids_in_range_and_monotone(x in -1e6f64..1e6, y in -1e6f64..1e6, limit in 1u32..40000) {
            let ids = round_and_clamp(&[x, y], limit);
            prop_assert!(ids.iter().all(|&i| i < limit));
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            let pair = round_and_clamp(&[lo, hi], limit);
            prop_assert!(pair[0] <= pair[1]);
        }

        #[test]
        fn prompt_prefix_always_present(values in prop::collection::vec(any::<f64>(), 0..6)) {
            let v = BpeVocab::fixture();
            let p = decode_token_genome(&TokenGenome { values }, &v, DEFAULT_VOCAB_LIMIT);
            prop_assert!(p.starts_with(TOKEN_PROMPT_PREFIX));
        }
    }
}
