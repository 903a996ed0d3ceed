use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::LexiconError;

const BUNDLED: &str = include_str!("../../data/taxonomy.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartOfSpeech {
    Adjective,
    Noun,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TaxonomyDoc {
    nodes: Vec<NodeDoc>,
    lemmas: Vec<LemmaDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: String,
    parent: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LemmaDoc {
    word: String,
    pos: PartOfSpeech,
    senses: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Lemma {
    pub pos: PartOfSpeech,
    senses: Vec<usize>,
}

/// A rooted word hierarchy. Depth counts nodes on the path from the root,
/// so the root has depth 1.
#[derive(Clone, Debug)]
pub struct Taxonomy {
    ids: Vec<String>,
    parent: Vec<Option<usize>>,
    depth: Vec<u32>,
    root: usize,
    lemmas: BTreeMap<String, Lemma>,
}

impl Taxonomy {
    /// The ~90-node car/animal/object hierarchy that ships with the crate.
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED).expect("bundled taxonomy is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| LexiconError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, LexiconError> {
        let doc: TaxonomyDoc = serde_json::from_str(text).map_err(|e| LexiconError::Parse(e.to_string()))?;

        let mut index = HashMap::with_capacity(doc.nodes.len());
        for (i, node) in doc.nodes.iter().enumerate() {
            if index.insert(node.id.as_str(), i).is_some() {
                return Err(LexiconError::Parse(format!("duplicate node id {:?}", node.id)));
            }
        }
        let parent = doc
            .nodes
            .iter()
            .map(|node| match &node.parent {
                None => Ok(None),
                Some(p) => index
                    .get(p.as_str())
                    .map(|&i| Some(i))
                    .ok_or_else(|| LexiconError::UnknownNode(p.clone())),
            })
            .collect::<Result<Vec<_>, _>>()?;

        // walk to the root from every node; 0 = unvisited, 1 = on stack, 2 = done
        let n = doc.nodes.len();
        let mut state = vec![0u8; n];
        let mut depth = vec![0u32; n];
        for start in 0..n {
            let mut path = Vec::new();
            let mut cur = Some(start);
            while let Some(i) = cur {
                match state[i] {
                    2 => break,
                    1 => return Err(LexiconError::CycleDetected(doc.nodes[i].id.clone())),
                    _ => {
                        state[i] = 1;
                        path.push(i);
                        cur = parent[i];
                    }
                }
            }
            let mut d = cur.map_or(0, |i| depth[i]);
            for &i in path.iter().rev() {
                d += 1;
                depth[i] = d;
                state[i] = 2;
            }
        }

        let roots: Vec<usize> = (0..n).filter(|&i| parent[i].is_none()).collect();
        let root = match roots.as_slice() {
            [r] => *r,
            [] => return Err(LexiconError::MissingRoot("no parentless node".into())),
            many => {
                let names: Vec<&str> = many.iter().map(|&i| doc.nodes[i].id.as_str()).collect();
                return Err(LexiconError::MissingRoot(format!(
                    "expected one root, found {}: {}",
                    many.len(),
                    names.join(", ")
                )));
            }
        };

        let mut lemmas = BTreeMap::new();
        for lemma in doc.lemmas {
            if lemma.senses.is_empty() {
                return Err(LexiconError::Parse(format!("lemma {:?} has no senses", lemma.word)));
            }
            let senses = lemma
                .senses
                .iter()
                .map(|s| index.get(s.as_str()).copied().ok_or_else(|| LexiconError::UnknownNode(s.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            let word = lemma.word;
            if lemmas.insert(word.clone(), Lemma { pos: lemma.pos, senses }).is_some() {
                return Err(LexiconError::Parse(format!("duplicate lemma {word:?}")));
            }
        }

        Ok(Self {
            ids: doc.nodes.into_iter().map(|n| n.id).collect(),
            parent,
            depth,
            root,
            lemmas,
        })
    }

    pub fn root(&self) -> &str {
        &self.ids[self.root]
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.lemmas.contains_key(word)
    }

    pub fn lemma(&self, word: &str) -> Result<&Lemma, LexiconError> {
        self.lemmas
            .get(word)
            .ok_or_else(|| LexiconError::UnknownWord(word.to_owned()))
    }

    /// Depth of each sense of `word`.
    pub fn sense_depths(&self, word: &str) -> Result<Vec<u32>, LexiconError> {
        Ok(self.lemma(word)?.senses.iter().map(|&s| self.depth[s]).collect())
    }

    /// Words of one part of speech in lexicographic order.
    pub fn words(&self, pos: PartOfSpeech) -> impl Iterator<Item = &str> {
        self.lemmas
            .iter()
            .filter(move |(_, l)| l.pos == pos)
            .map(|(w, _)| w.as_str())
    }

    /// Wu–Palmer similarity `2·depth(lcs) / (depth(a) + depth(b))`,
    /// maximised over all sense pairs.
    pub fn wup_similarity(&self, word_a: &str, word_b: &str) -> Result<f64, LexiconError> {
        let a = self.lemma(word_a)?;
        let b = self.lemma(word_b)?;
        let mut best = 0.0f64;
        for &sa in &a.senses {
            for &sb in &b.senses {
                best = best.max(self.node_similarity(sa, sb));
            }
        }
        Ok(best)
    }

    fn node_similarity(&self, a: usize, b: usize) -> f64 {
        let lcs = self.lowest_common_subsumer(a, b);
        2.0 * self.depth[lcs] as f64 / (self.depth[a] + self.depth[b]) as f64
    }

    fn lowest_common_subsumer(&self, mut a: usize, mut b: usize) -> usize {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].expect("non-root node has a parent");
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("non-root node has a parent");
        }
        while a != b {
            a = self.parent[a].expect("non-root node has a parent");
            b = self.parent[b].expect("non-root node has a parent");
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = r#"{
        "nodes": [
            {"id": "root", "parent": null},
            {"id": "mid", "parent": "root"},
            {"id": "left", "parent": "mid"},
            {"id": "right", "parent": "mid"},
            {"id": "far", "parent": "root"}
        ],
        "lemmas": [
            {"word": "left", "pos": "noun", "senses": ["left"]},
            {"word": "right", "pos": "noun", "senses": ["right"]},
            {"word": "far", "pos": "noun", "senses": ["far"]},
            {"word": "both", "pos": "noun", "senses": ["far", "left"]},
            {"word": "top", "pos": "noun", "senses": ["root"]}
        ]
    }"#;

    #[test]
    fn bundled_has_single_root() {
        let t = Taxonomy::bundled();
        assert_eq!(t.root(), "entity");
        assert!(t.node_count() >= 60);
        for w in ["fast", "wing", "car", "snake", "frog"] {
            assert!(t.contains(w), "{w}");
        }
    }

    #[test]
    fn sibling_similarity_is_two_thirds() {
        let t = Taxonomy::from_json(TINY).unwrap();
        let s = t.wup_similarity("left", "right").unwrap();
        assert!((s - 2.0 / 3.0).abs() < 1e-12);
        // root depth 1: far (2) vs left (3) share only the root
        assert!((t.wup_similarity("far", "left").unwrap() - 2.0 / 5.0).abs() < 1e-12);
        assert_eq!(t.wup_similarity("top", "top").unwrap(), 1.0);
    }

    #[test]
    fn best_sense_pair_wins() {
        let t = Taxonomy::from_json(TINY).unwrap();
        assert_eq!(t.wup_similarity("both", "far").unwrap(), 1.0);
        assert!((t.wup_similarity("both", "right").unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_word() {
        let t = Taxonomy::from_json(TINY).unwrap();
        assert!(matches!(t.wup_similarity("left", "nope"), Err(LexiconError::UnknownWord(w)) if w == "nope"));
    }

    #[test]
    fn self_parent_is_a_cycle() {
        let doc = r#"{"nodes": [{"id": "r", "parent": null}, {"id": "x", "parent": "x"}], "lemmas": []}"#;
        assert!(matches!(Taxonomy::from_json(doc), Err(LexiconError::CycleDetected(id)) if id == "x"));
    }

    #[test]
    fn longer_cycle_detected() {
        let doc = r#"{"nodes": [{"id": "r", "parent": null}, {"id": "a", "parent": "b"}, {"id": "b", "parent": "c"}, {"id": "c", "parent": "a"}], "lemmas": []}"#;
        assert!(matches!(Taxonomy::from_json(doc), Err(LexiconError::CycleDetected(_))));
    }

    #[test]
    fn two_roots_rejected() {
        let doc = r#"{"nodes": [{"id": "r", "parent": null}, {"id": "s", "parent": null}], "lemmas": []}"#;
        assert!(matches!(Taxonomy::from_json(doc), Err(LexiconError::MissingRoot(_))));
    }

    #[test]
    fn orphans_and_dangling_senses_rejected() {
        let doc = r#"{"nodes": [{"id": "r", "parent": null}, {"id": "a", "parent": "ghost"}], "lemmas": []}"#;
        assert!(matches!(Taxonomy::from_json(doc), Err(LexiconError::UnknownNode(id)) if id == "ghost"));
        let doc = r#"{"nodes": [{"id": "r", "parent": null}], "lemmas": [{"word": "w", "pos": "noun", "senses": ["zz"]}]}"#;
        assert!(matches!(Taxonomy::from_json(doc), Err(LexiconError::UnknownNode(_))));
        assert!(matches!(Taxonomy::from_json("{"), Err(LexiconError::Parse(_))));
    }
}
