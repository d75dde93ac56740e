//! Words, orbits and cosets for finitely generated groups of ball
//! isometries.

mod enumerate;
mod limitset;
mod orbit;
mod spec;
mod stallings;
mod word;

pub use enumerate::{
    enumerate_with, free_word_count, free_word_count_at, reduced_words, NodeView, DEFAULT_WORD_CAP,
};
pub use limitset::{limit_set_sample, LimitSetParams};
pub use orbit::{orbit, orbit_count, OrbitEntry, OrbitParams, OrbitTable};
pub use spec::{apply_word_h, word_boundary_data, GroupSpec, Presentation};
pub use stallings::{cosets, CosetMode, CosetParams, CosetTable, HeuristicParams, SubgroupGraph};
pub use word::{Letter, Word};
