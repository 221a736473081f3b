//! Brute-force references for validating the rest of the crate at small
//! sizes: exhaustive enumeration of decomposable graphs, explicit
//! junction-tree enumeration, a dense precision-matrix density, a
//! graph-state Metropolis sampler, exact transition matrices, and the
//! goodness-of-fit statistics used to compare chains with exact answers.

mod chisq;
mod enumerate;
mod freq;
mod gg;
mod precision;
mod transition;
mod trees;

pub use chisq::{equal_mass_bins, total_variation, BatchedChiSquare, Binning};
pub use enumerate::{clique_key, enumerate_decomposable, enumerate_decomposable_with, CliqueKey, GraphEntry, GraphTable};
pub use freq::FrequencyRecorder;
pub use gg::{reference_gg_sampler, GgRun};
pub use precision::{mvn_log_density, precision_matrix_oracle, PrecisionOracle};
pub use transition::{all_junction_trees, transition_matrix, transition_matrix_check, TransitionMatrix};
pub use trees::{brute_force_junction_trees, labelled_trees};
