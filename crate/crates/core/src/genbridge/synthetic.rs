//! Procedural stand-in for a text-to-3D model.
//!
//! A prompt is lowercased and split on anything that is not a letter or
//! digit. Template words ("a", "car", "in", "the", "shape", "of") are
//! neutral. Every other word scales the base body's width and height: words
//! in [`KEYWORDS`] by a fixed factor pair, any other word by a pair derived
//! from its SHA-256 digest in `[e^-0.3, e^0.3]`. Cabin size and taper get a
//! small digest-derived residual from the whole canonical prompt, so
//! unrelated word changes still move the shape a little.
//!
//! The seed (and batch index) adds a log-normal jitter to width and height
//! that does not depend on the prompt, so two prompts compared at the same
//! seed keep their keyword ordering.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{GenerationError, GenerationRequest, GenerationResult, ShapeGenerator};
use crate::geometry::TriMesh;

const BASE_WIDTH: f64 = 0.72;
const BASE_HEIGHT: f64 = 0.64;
const BASE_CABIN: f64 = 0.3;
const BASE_TAPER: f64 = 0.5;
const MIN_EXTENT: f64 = 0.2;
const MAX_EXTENT: f64 = 0.8;
const UNKNOWN_WORD_SCALE: f64 = 0.3;

const NEUTRAL: &[&str] = &["a", "an", "the", "car", "in", "of", "shape"];

/// `(word, width factor, height factor, taper shift)`.
pub const KEYWORDS: &[(&str, f64, f64, f64)] = &[
    // adjectives
    ("fast", 0.98, 0.97, 0.1),
    ("quick", 0.96, 0.95, 0.1),
    ("rapid", 0.96, 0.95, 0.1),
    ("hasty", 0.94, 0.93, 0.05),
    ("slow", 0.93, 0.92, -0.05),
    ("sluggish", 0.9, 0.88, -0.05),
    ("big", 1.3, 1.25, -0.1),
    ("huge", 1.45, 1.45, -0.1),
    ("bulky", 1.3, 1.3, -0.2),
    ("fat", 1.35, 1.2, -0.2),
    ("boxy", 1.25, 1.3, -0.3),
    ("wide", 1.4, 1.0, 0.0),
    ("tall", 1.0, 1.4, 0.0),
    ("rough", 1.1, 1.1, -0.1),
    ("rifled", 1.0, 1.0, 0.1),
    ("small", 0.8, 0.8, 0.0),
    ("tiny", 0.6, 0.6, 0.0),
    ("smooth", 0.95, 0.95, 0.2),
    ("sleek", 0.8, 0.75, 0.3),
    ("streamlined", 0.75, 0.7, 0.4),
    ("slender", 0.6, 0.7, 0.2),
    ("thin", 0.5, 0.6, 0.2),
    // nouns
    ("wing", 1.1, 0.85, 0.3),
    ("feather", 0.85, 0.55, 0.2),
    ("rock", 1.2, 1.15, -0.2),
    ("box", 1.25, 1.25, -0.4),
    ("cube", 1.3, 1.3, -0.4),
    ("house", 1.35, 1.45, -0.3),
    ("bus", 1.2, 1.35, -0.3),
    ("truck", 1.15, 1.25, -0.3),
    ("bicycle", 0.5, 1.0, 0.0),
    ("arrow", 0.45, 0.5, 0.4),
    ("bullet", 0.35, 0.35, 0.4),
    ("needle", 0.3, 0.3, 0.4),
    ("rifle", 0.35, 0.4, 0.2),
    ("pipe", 0.45, 0.45, 0.0),
    ("tube", 0.5, 0.5, 0.0),
    ("teardrop", 0.4, 0.4, 0.5),
    ("leaf", 0.9, 0.3, 0.2),
    ("bird", 0.8, 0.7, 0.3),
    ("fish", 0.65, 0.6, 0.3),
    ("shark", 0.55, 0.5, 0.4),
    ("snake", 0.35, 0.3, 0.2),
    ("frog", 1.05, 0.95, 0.0),
    ("cloud", 1.4, 1.35, -0.2),
    ("smoke", 1.4, 1.35, -0.2),
];

/// Body dimensions before seed jitter. Length is always 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeParams {
    pub length: f64,
    pub width: f64,
    pub height: f64,
    /// Share of the total height taken by the cabin.
    pub cabin_fraction: f64,
    /// 0 = upright cabin, 1 = strongly raked.
    pub taper: f64,
}

pub fn canonical_words(prompt: &str) -> Vec<String> {
    prompt
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Uniform values in `[-1, 1]` from a labelled digest.
fn digest_units<const N: usize>(label: &str, text: &str) -> [f64; N] {
    let digest = Sha256::new().chain_update(label).chain_update([0]).chain_update(text).finalize();
    std::array::from_fn(|i| {
        let bytes: [u8; 4] = digest[4 * i..4 * i + 4].try_into().expect("4 bytes");
        u32::from_le_bytes(bytes) as f64 / u32::MAX as f64 * 2.0 - 1.0
    })
}

pub fn synthetic_shape_params(prompt: &str) -> ShapeParams {
    let words = canonical_words(prompt);
    let mut width = BASE_WIDTH;
    let mut height = BASE_HEIGHT;
    let mut taper = BASE_TAPER;
    for word in &words {
        if NEUTRAL.contains(&word.as_str()) {
            continue;
        }
        match KEYWORDS.iter().find(|(k, ..)| k == word) {
            Some(&(_, fw, fh, dt)) => {
                width *= fw;
                height *= fh;
                taper += dt;
            }
            None => {
                let [uw, uh] = digest_units("word", word);
                width *= (UNKNOWN_WORD_SCALE * uw).exp();
                height *= (UNKNOWN_WORD_SCALE * uh).exp();
            }
        }
    }
    let [uc, ut] = digest_units("prompt", &words.join(" "));
    ShapeParams {
        length: 1.0,
        width: width.clamp(MIN_EXTENT, MAX_EXTENT),
        height: height.clamp(MIN_EXTENT, MAX_EXTENT),
        cabin_fraction: BASE_CABIN + 0.05 * uc,
        taper: (taper + 0.15 * ut).clamp(0.0, 1.0),
    }
}

/// Deterministic prompt-keyed car bodies.
#[derive(Clone, Debug)]
pub struct SyntheticGenerator {
    /// Standard deviation of the log-normal seed jitter on width and height.
    pub jitter: f64,
}

impl Default for SyntheticGenerator {
    fn default() -> Self {
        Self { jitter: 0.1 }
    }
}

impl SyntheticGenerator {
    pub const ID: &'static str = "synthetic";

    /// Parameters for one batch element: the prompt's parameters with the
    /// seed jitter applied.
    pub fn params_for(&self, prompt: &str, seed: u64, index: usize) -> ShapeParams {
        let mut p = synthetic_shape_params(prompt);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let mut draw = || {
            let z: f64 = StandardNormal.sample(&mut rng);
            z.clamp(-3.0, 3.0)
        };
        p.width = (p.width * (self.jitter * draw()).exp()).clamp(MIN_EXTENT, MAX_EXTENT);
        p.height = (p.height * (self.jitter * draw()).exp()).clamp(MIN_EXTENT, MAX_EXTENT);
        p.cabin_fraction = (p.cabin_fraction + 0.01 * draw()).clamp(0.2, 0.4);
        p
    }

    /// Box body along +x with a raked cabin on top, flow along +x.
    pub fn build_mesh(params: &ShapeParams) -> TriMesh {
        let ShapeParams {
            length,
            width,
            height,
            cabin_fraction,
            taper,
        } = *params;
        let body_top = height * (1.0 - cabin_fraction);
        let mut mesh = TriMesh::cuboid([0.0, -width / 2.0, 0.0], [length, width / 2.0, body_top]);

        let half = 0.4 * width;
        let (x0, x1) = (0.3 * length, 0.85 * length);
        let (t0, t1) = ((0.35 + 0.2 * taper) * length, (0.83 - 0.1 * taper) * length);
        // same corner order as TriMesh::cuboid so its face table stays outward
        let mut cabin = TriMesh::cuboid([0.0; 3], [1.0; 3]);
        cabin.vertices = [
            [x0, -half, body_top],
            [x1, -half, body_top],
            [x1, half, body_top],
            [x0, half, body_top],
            [t0, -half, height],
            [t1, -half, height],
            [t1, half, height],
            [t0, half, height],
        ]
        .iter()
        .map(|&[x, y, z]| crate::geometry::Point::new(x, y, z))
        .collect();
        mesh.append(&cabin);
        mesh
    }
}

impl ShapeGenerator for SyntheticGenerator {
    fn id(&self) -> &str {
        Self::ID
    }

    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResult, GenerationError> {
        request.validate()?;
        let start = Instant::now();
        let meshes = (0..request.batch_size)
            .map(|i| Self::build_mesh(&self.params_for(&request.prompt, request.seed, i)))
            .collect();
        Ok(GenerationResult {
            meshes,
            generator_id: Self::ID.to_owned(),
            latency: start.elapsed(),
        })
    }
}
