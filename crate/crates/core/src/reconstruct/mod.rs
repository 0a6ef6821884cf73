//! Recursive string value reconstruction with typed placeholders and
//! similarity-based guessing.

mod resolve;
mod similarity;
mod value;

pub use resolve::{
    candidate_pool, number_text, reconstruct, CandidatePool, Reconstructor, ResolutionBudget, DEFAULT_MAX_ITERATIONS,
};
pub use similarity::{guess_value, jaro, jaro_winkler, SimilarityConfig};
pub use value::{Part, PlaceholderKind, StringValue};
