//! Communication-transmission protocols and secret-key schemes built on
//! them.

mod ct;
pub mod gf2;
mod hashing;
mod metrics;
mod pipeline;
mod random;
mod slepian_wolf;
mod source_emulation;

pub use ct::{
    run_protocol, run_protocol_trials, trace_law, CtMessage, CtProtocol, CtSpec, Restriction, Rule, RuleFn,
    SkTrace, TraceVars, View, MAX_EXACT_OUTCOMES,
};
pub use metrics::{key_metrics_exact, key_metrics_sampled, KeyMetrics, Mode};
pub use source_emulation::{source_emulation_sk, BlockCode, SeCode, SeReport, SourceEmulation, MAX_DECODE_PAIRS};
pub use hashing::ToeplitzHash;
pub use slepian_wolf::{SwCode, SwDecode, SwStatus, MAX_KERNEL_DIM};
pub use pipeline::{
    feedback_rate_report, feedback_sk_exact, feedback_sk_runs, feedback_sk_scheme, AnalyticRate, ExactSecurity,
    FeedbackRun, PipelineParams, PipelineReport, PipelineSummary, StageErrors, TerminalStage, MAX_EXACT_PIPELINE_BITS,
};
pub use random::random_ct_protocol;
