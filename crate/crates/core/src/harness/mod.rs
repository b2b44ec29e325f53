//! Cross-module checks, the verification suite and JSON reports.

mod checks;
mod report;
mod suite;

pub use checks::{
    converse_dominance, eps_of, lp_dominates_partitions, n_letter_check, DominanceCheck, LpPartitionCheck,
    NLetterCheck, BOUND_TOL, LP_TOL,
};
pub use report::{Provenance, Report, Stage, Status, REPORT_VERSION, TIMESTAMP_ENV};
pub use suite::{
    tiny_exact_params, verify_suite, CaseFailure, CheckOutcome, Level, SuiteParams, SuiteReport, LEMMA_TOL,
};
