//! Exact probability tables and information measures over finite alphabets.
//!
//! All logarithms are base 2 and `0 log 0 = 0`. Tables are dense and bounded
//! by [`table_budget`]; anything larger is refused rather than approximated.
//! [`SparseLaw`] stores only the support, for laws over large labeled
//! variables such as protocol transcripts.

mod channel;
mod dist;
mod measures;
mod sparse;

pub use channel::{channel_pushforward, MacChannel};
pub(crate) use dist::checked_size;
pub use dist::{table_budget, FiniteDist, JointDist, NORMALIZATION_TOL};
pub use measures::{
    binary_entropy, conditional_entropy, entropy, entropy_of, kl_divergence, mutual_information,
    security_index,
};
pub use sparse::{EntropyOracle, SparseLaw};
