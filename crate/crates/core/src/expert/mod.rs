//! Per-learning-rate experts.

pub mod full;
pub mod sketch;

pub use full::{FullExpert, FullExpertFactory};
pub use sketch::{FrequentDirections, SketchedExpert, SketchedExpertFactory};
