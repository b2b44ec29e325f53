//! Rate quantities of the MAC: pentagon rates, the no-feedback maximum
//! symmetric rate, and n-letter rate expressions evaluated on the joint law
//! of a concrete protocol.

mod nletter;
mod pentagon;
mod rstar;

pub use nletter::{n_letter_rate_nic, n_letter_rate_se, NLetterRate, NicLayout, SeLayout};
pub use pentagon::{pentagon, PentagonRates};
pub use rstar::{compute_rstar, RstarOptions, RstarResult};

