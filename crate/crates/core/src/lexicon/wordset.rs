use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{LexiconError, PartOfSpeech, Taxonomy};

/// Two cached similarities closer than this are treated as a tie.
pub const BOW_TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoredWord {
    pub word: String,
    /// Wu–Palmer similarity to the reference word of the same part of speech.
    pub similarity: f64,
}

/// Candidate words for the two template slots, each scored against its
/// reference word and kept in lexicographic order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordSet {
    pub reference_adjective: String,
    pub reference_noun: String,
    pub adjectives: Vec<ScoredWord>,
    pub nouns: Vec<ScoredWord>,
}

/// Target similarities to the reference adjective and noun.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BowGenome {
    pub adj_value: f64,
    pub noun_value: f64,
}

impl BowGenome {
    pub fn new(adj_value: f64, noun_value: f64) -> Self {
        Self { adj_value, noun_value }
    }

    pub fn from_slice(values: &[f64]) -> Self {
        Self::new(values[0], values[1])
    }
}

impl WordSet {
    /// Scores explicit word pools against the references. The reference
    /// words are always part of their pool.
    pub fn from_pools(
        taxonomy: &Taxonomy,
        reference_adjective: &str,
        reference_noun: &str,
        adjectives: impl IntoIterator<Item = String>,
        nouns: impl IntoIterator<Item = String>,
    ) -> Result<Self, LexiconError> {
        let score = |reference: &str, pool: Vec<String>, kind| -> Result<Vec<ScoredWord>, LexiconError> {
            let mut pool = pool;
            pool.push(reference.to_owned());
            pool.sort();
            pool.dedup();
            if pool.is_empty() {
                return Err(LexiconError::EmptyPool(kind));
            }
            pool.into_iter()
                .map(|word| {
                    let similarity = taxonomy.wup_similarity(&word, reference)?;
                    Ok(ScoredWord { word, similarity })
                })
                .collect()
        };
        taxonomy.lemma(reference_adjective)?;
        taxonomy.lemma(reference_noun)?;
        Ok(Self {
            reference_adjective: reference_adjective.to_owned(),
            reference_noun: reference_noun.to_owned(),
            adjectives: score(reference_adjective, adjectives.into_iter().collect(), "adjectives")?,
            nouns: score(reference_noun, nouns.into_iter().collect(), "nouns")?,
        })
    }

    /// Words whose cached similarity is closest to the genome's clamped
    /// values; ties go to the lexicographically smallest word.
    pub fn decode_words(&self, genome: BowGenome) -> (&ScoredWord, &ScoredWord) {
        (
            nearest(&self.adjectives, genome.adj_value),
            nearest(&self.nouns, genome.noun_value),
        )
    }
}

fn clamp_unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

fn nearest(words: &[ScoredWord], target: f64) -> &ScoredWord {
    let target = clamp_unit(target);
    let mut best = &words[0];
    let mut best_gap = (best.similarity - target).abs();
    for w in &words[1..] {
        let gap = (w.similarity - target).abs();
        if gap < best_gap - BOW_TIE_TOLERANCE {
            best = w;
            best_gap = gap;
        }
    }
    best
}

/// Renders `A <adjective> car in the shape of <noun>`.
pub fn decode_bow(genome: BowGenome, words: &WordSet) -> String {
    let (adj, noun) = words.decode_words(genome);
    format!("A {} car in the shape of {}", adj.word, noun.word)
}

/// Samples `n` adjectives and `n` nouns (everything when the taxonomy has
/// fewer) and scores them against the references. The reference word takes
/// one of the `n` slots.
pub fn build_word_set(
    taxonomy: &Taxonomy,
    reference_adjective: &str,
    reference_noun: &str,
    n: usize,
    seed: u64,
) -> Result<WordSet, LexiconError> {
    taxonomy.lemma(reference_adjective)?;
    taxonomy.lemma(reference_noun)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample = |pos, reference: &str| -> Vec<String> {
        let pool: Vec<&str> = taxonomy.words(pos).filter(|w| *w != reference).collect();
        let take = n.saturating_sub(1).min(pool.len());
        index::sample(&mut rng, pool.len(), take)
            .into_iter()
            .map(|i| pool[i].to_owned())
            .collect()
    };
    let adjectives = sample(PartOfSpeech::Adjective, reference_adjective);
    let nouns = sample(PartOfSpeech::Noun, reference_noun);
    WordSet::from_pools(taxonomy, reference_adjective, reference_noun, adjectives, nouns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fixture_set() -> WordSet {
        build_word_set(&Taxonomy::bundled(), "fast", "wing", 300, 1).unwrap()
    }

    #[test]
    fn references_decode_at_one() {
        let set = fixture_set();
        assert_eq!(decode_bow(BowGenome::new(1.0, 1.0), &set), "A fast car in the shape of wing");
    }

    #[test]
    fn values_are_clamped() {
        let set = fixture_set();
        assert_eq!(
            decode_bow(BowGenome::new(-0.3, 1.7), &set),
            decode_bow(BowGenome::new(0.0, 1.0), &set)
        );
        assert_eq!(
            decode_bow(BowGenome::new(f64::NAN, f64::INFINITY), &set),
            decode_bow(BowGenome::new(0.0, 1.0), &set)
        );
    }

    #[test]
    fn matches_exhaustive_scan() {
        let set = fixture_set();
        let scan = |words: &[ScoredWord], v: f64| -> String {
            let mut all: Vec<(f64, &str)> = words.iter().map(|w| ((w.similarity - v).abs(), w.word.as_str())).collect();
            all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(b.1)));
            all[0].1.to_owned()
        };
        let (adj, noun) = set.decode_words(BowGenome::new(0.66, 0.5));
        assert_eq!(adj.word, scan(&set.adjectives, 0.66));
        assert_eq!(noun.word, scan(&set.nouns, 0.5));
    }

    #[test]
    fn ties_go_to_smallest_word() {
        let set = WordSet {
            reference_adjective: "a".into(),
            reference_noun: "n".into(),
            adjectives: vec![
                ScoredWord { word: "alpha".into(), similarity: 0.5 },
                ScoredWord { word: "beta".into(), similarity: 0.5 },
            ],
            nouns: vec![ScoredWord { word: "n".into(), similarity: 1.0 }],
        };
        assert_eq!(set.decode_words(BowGenome::new(0.5, 1.0)).0.word, "alpha");
        assert_eq!(set.decode_words(BowGenome::new(0.1, 1.0)).0.word, "alpha");
    }

    #[test]
    fn sampling_is_deterministic_and_bounded() {
        let t = Taxonomy::bundled();
        let a = build_word_set(&t, "fast", "wing", 10, 1).unwrap();
        let b = build_word_set(&t, "fast", "wing", 10, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.adjectives.len(), 10);
        assert_eq!(a.nouns.len(), 10);
        assert!(a.adjectives.iter().any(|w| w.word == "fast"));
        for w in a.adjectives.iter().chain(&a.nouns) {
            assert!(w.similarity > 0.0 && w.similarity <= 1.0);
        }
        let c = build_word_set(&t, "fast", "wing", 10, 2).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn oversized_request_returns_whole_lexicon() {
        let t = Taxonomy::bundled();
        let set = build_word_set(&t, "fast", "wing", 10_000, 3).unwrap();
        assert_eq!(set.adjectives.len(), t.words(PartOfSpeech::Adjective).count());
        assert_eq!(set.nouns.len(), t.words(PartOfSpeech::Noun).count());
    }

    #[test]
    fn unknown_reference() {
        let t = Taxonomy::bundled();
        assert!(matches!(
            build_word_set(&t, "zzz", "wing", 5, 0),
            Err(LexiconError::UnknownWord(_))
        ));
    }

    proptest! {
        #[test]
        fn decode_is_total(a in any::<f64>(), b in any::<f64>()) {
            let set = fixture_set();
            let p = decode_bow(BowGenome::new(a, b), &set);
            prop_assert!(p.starts_with("A ") && p.contains(" car in the shape of "));
        }

        #[test]
        fn own_similarity_decodes_to_equal_similarity(i in 0usize..64, j in 0usize..64) {
            let set = fixture_set();
            let adj = &set.adjectives[i % set.adjectives.len()];
            let noun = &set.nouns[j % set.nouns.len()];
            let (da, dn) = set.decode_words(BowGenome::new(adj.similarity, noun.similarity));
            prop_assert!((da.similarity - adj.similarity).abs() <= BOW_TIE_TOLERANCE);
            prop_assert!((dn.similarity - noun.similarity).abs() <= BOW_TIE_TOLERANCE);
        }
    }
}
