//! Evolutionary design optimization over text-prompt encodings.
//!
//! A run decodes CMA-ES search points into prompts (either a bag-of-words
//! template filled by Wu–Palmer similarity lookup, or byte-pair token ids),
//! turns each prompt into a triangle mesh with a [`genbridge::ShapeGenerator`],
//! scores the mesh with an [`evaluator::DragEvaluator`] and feeds the
//! normalized drag coefficient back to the optimizer.

pub mod geometry;
pub mod lexicon;
pub mod tokenizer;
pub mod cmaes;
pub mod genbridge;
pub mod evaluator;
pub mod orchestrator;
pub mod process;
