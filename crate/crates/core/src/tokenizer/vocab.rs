use std::collections::HashMap;
use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const FIXTURE: &str = include_str!("../../data/fixture_vocab.json");

#[derive(Debug, Error)]
pub enum VocabError {
    #[error("vocab parse error: {0}")]
    Parse(String),
    #[error("vocab is missing the single-byte token for byte {0:#04x}")]
    MissingByte(u8),
    #[error("merge #{rank} is invalid: {reason}")]
    BadMerge { rank: usize, reason: String },
}

/// On-disk layout: `tokens[id]` is the base64 of the token's bytes and
/// `merges` lists `[left, right, result]` in rank order.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VocabDoc {
    vocab_size: usize,
    tokens: Vec<String>,
    merges: Vec<[u32; 3]>,
}

#[derive(Clone, Debug)]
pub struct BpeVocab {
    tokens: Vec<Vec<u8>>,
    byte_ids: [u32; 256],
    /// (left, right) -> (rank, merged id)
    ranks: HashMap<(u32, u32), (usize, u32)>,
}

impl BpeVocab {
    /// 490-token vocabulary trained on a few hundred car and shape words.
    pub fn fixture() -> Self {
        Self::from_json(FIXTURE).expect("fixture vocab is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, VocabError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| VocabError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, VocabError> {
        let doc: VocabDoc = serde_json::from_str(text).map_err(|e| VocabError::Parse(e.to_string()))?;
        if doc.tokens.len() != doc.vocab_size {
            return Err(VocabError::Parse(format!(
                "vocab_size {} but {} tokens listed",
                doc.vocab_size,
                doc.tokens.len()
            )));
        }
        let tokens = doc
            .tokens
            .iter()
            .enumerate()
            .map(|(id, b64)| {
                STANDARD
                    .decode(b64)
                    .map_err(|e| VocabError::Parse(format!("token {id}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;

        let mut byte_ids = [u32::MAX; 256];
        for (id, bytes) in tokens.iter().enumerate() {
            if let [b] = bytes.as_slice() {
                if byte_ids[*b as usize] == u32::MAX {
                    byte_ids[*b as usize] = id as u32;
                }
            }
        }
        if let Some(b) = byte_ids.iter().position(|&id| id == u32::MAX) {
            return Err(VocabError::MissingByte(b as u8));
        }

        let mut ranks = HashMap::with_capacity(doc.merges.len());
        for (rank, &[left, right, result]) in doc.merges.iter().enumerate() {
            let bad = |reason: String| VocabError::BadMerge { rank, reason };
            let get = |id: u32| tokens.get(id as usize).ok_or_else(|| bad(format!("id {id} out of range")));
            let mut joined = get(left)?.clone();
            joined.extend_from_slice(get(right)?);
            if get(result)? != &joined {
                return Err(bad(format!("token {result} is not {left} + {right}")));
            }
            if ranks.insert((left, right), (rank, result)).is_some() {
                return Err(bad(format!("pair ({left}, {right}) merged twice")));
            }
        }
        Ok(Self { tokens, byte_ids, ranks })
    }

    pub fn vocab_size(&self) -> usize {
        self.tokens.len()
    }

    pub fn token_bytes(&self, id: u32) -> Option<&[u8]> {
        self.tokens.get(id as usize).map(Vec::as_slice)
    }

    /// Greedy BPE: start from single bytes and repeatedly merge the adjacent
    /// pair with the lowest merge rank.
    pub fn encode_text(&self, text: &str) -> Vec<u32> {
        let mut ids: Vec<u32> = text.bytes().map(|b| self.byte_ids[b as usize]).collect();
        loop {
            let best = ids
                .windows(2)
                .filter_map(|w| self.ranks.get(&(w[0], w[1])).map(|&(rank, merged)| (rank, w[0], w[1], merged)))
                .min_by_key(|&(rank, ..)| rank);
            let Some((_, left, right, merged)) = best else {
                break;
            };
            let mut out = Vec::with_capacity(ids.len());
            let mut i = 0;
            while i < ids.len() {
                if i + 1 < ids.len() && ids[i] == left && ids[i + 1] == right {
                    out.push(merged);
                    i += 2;
                } else {
                    out.push(ids[i]);
                    i += 1;
                }
            }
            ids = out;
        }
        ids
    }

    /// Concatenates token bytes, decodes them as UTF-8 with replacement
    /// characters for invalid sequences and trims surrounding whitespace.
    /// Ids outside the vocabulary decode to a replacement character.
    pub fn decode_tokens(&self, ids: &[u32]) -> String {
        let mut bytes = Vec::new();
        for &id in ids {
            match self.token_bytes(id) {
                Some(b) => bytes.extend_from_slice(b),
                None => bytes.extend_from_slice(char::REPLACEMENT_CHARACTER.encode_utf8(&mut [0; 4]).as_bytes()),
            }
        }
        String::from_utf8_lossy(&bytes).trim().to_owned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixture_shape() {
        let v = BpeVocab::fixture();
        assert!(v.vocab_size() <= 512);
        assert_eq!(v.token_bytes(0), Some(&b"!"[..]));
    }

    #[test]
    fn empty_roundtrip() {
        let v = BpeVocab::fixture();
        assert!(v.encode_text("").is_empty());
        assert_eq!(v.decode_tokens(&[]), "");
    }

    #[test]
    fn wing_roundtrip_and_idempotence() {
        let v = BpeVocab::fixture();
        let ids = v.encode_text(" wing");
        assert!(ids.len() < 5, "merges should compress {ids:?}");
        assert_eq!(v.decode_tokens(&ids), "wing");
        let once = v.encode_text("wing");
        assert_eq!(v.encode_text(&v.decode_tokens(&once)), once);
    }

    #[test]
    fn broken_utf8_is_replaced() {
        let v = BpeVocab::fixture();
        // lead byte of a two-byte sequence with nothing after it
        let lead = (0..v.vocab_size() as u32)
            .find(|&i| v.token_bytes(i) == Some(&[0xC3][..]))
            .unwrap();
        let ids = [v.encode_text("car")[0], lead];
        let s = v.decode_tokens(&ids);
        assert!(s.contains(char::REPLACEMENT_CHARACTER), "{s:?}");
        assert!(v.decode_tokens(&[u32::MAX]).contains(char::REPLACEMENT_CHARACTER));
    }

    #[test]
    fn rejects_inconsistent_vocab() {
        assert!(matches!(BpeVocab::from_json("{}"), Err(VocabError::Parse(_))));
        let doc = r#"{"vocab_size": 1, "tokens": ["IQ=="], "merges": []}"#;
        assert!(matches!(BpeVocab::from_json(doc), Err(VocabError::MissingByte(_))));
    }

    proptest! {
        #[test]
        fn ascii_roundtrip(s in "[ -~]{0,40}") {
            let v = BpeVocab::fixture();
            prop_assert_eq!(v.decode_tokens(&v.encode_text(&s)), s.trim());
        }

        #[test]
        fn unicode_roundtrip(s in "\\PC{0,20}") {
            let v = BpeVocab::fixture();
            prop_assert_eq!(v.decode_tokens(&v.encode_text(&s)), s.trim());
        }
    }
}
