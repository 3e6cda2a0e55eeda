//! Phase I: evolutionary search over priority lists decoded into production
//! assignments.

mod decode;
mod dist;
mod evolution;
mod operators;

use crate::model::{PartIdx, ProductionAssignment};

pub use decode::{DecodeOutcome, Decoder, ShareSampling};
pub use dist::{dist_upper_bound, pair_bound, DistError, PairBounds};
pub use evolution::{run_phase1, EaConfig, EaConfigError, GenerationStats, Phase1Result};
pub use operators::{
    crossover_1pt, crossover_at, is_better, merge_populations, mutate_reposition, rank, reposition, tournament,
};

/// An evaluated priority list.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate<S> {
    pub priority_list: Vec<PartIdx>,
    /// Parts placed before decoding stopped.
    pub placed: usize,
    pub sr: S,
    /// Distance bound; defined only when every part was placed.
    pub dist: Option<S>,
    pub assignment: ProductionAssignment<S>,
}
