//! One-shot converse over fractional partitions and exact checkers for the
//! interactive-communication lemmas it rests on.

mod bound;
mod interactive;
mod partition;
mod reduction;
pub mod simplex;

pub use bound::{best_bound_lp, one_shot_bound, penalty, BoundTerms, ConverseBoundResult, TerminalLayout};
pub use interactive::{
    check_factorization, check_genie_factorization, check_genie_inequality, check_interactive_inequality,
    factorization_on, genie_law, inequality_on, random_observation_law, random_protocol, transcript_law,
    FactorizationCheck, GenieTranscript, InequalityCheck, InteractiveProtocol, MessageSpec,
    MAX_OBSERVATION_TUPLES,
};
pub use partition::{
    all_partitions, full_mask, members, partition_to_fractional, random_fractional_partition, subset_label,
    FractionalPartition, Partition, Subset, COVER_TOL, MAX_TERMINALS,
};
pub use reduction::{f1_constant_reduction, KeyLayout, ReductionResult};
