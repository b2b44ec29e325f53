//! Cross-module invariants evaluated on exact protocol laws.

use serde::Serialize;

use crate::converse::{all_partitions, best_bound_lp, one_shot_bound, partition_to_fractional, penalty};
use crate::error::{invalid, Result};
use crate::info::{binary_entropy, EntropyOracle, MacChannel};
use crate::protocols::{key_metrics_exact, trace_law, CtProtocol, Restriction};
use crate::rates::{n_letter_rate_nic, n_letter_rate_se};

/// Tolerance of the dominance and n-letter checks.
pub const BOUND_TOL: f64 = 1e-6;
/// Tolerance of the LP-versus-partition comparison.
pub const LP_TOL: f64 = 1e-8;

/// `1 - agreement`, kept inside `(0, 1)` as the converse requires.
pub fn eps_of(agreement: f64) -> f64 {
    (1.0 - agreement).clamp(1e-12, 1.0 - 1e-12)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceCheck {
    pub log_k: f64,
    pub bound_bits: f64,
    pub lp_penalty: f64,
    pub eps: f64,
    pub holds: bool,
}

/// `log|K| <= one_shot_bound` with LP-optimal weights, terminals observing
/// `(U_i, X_i^n)` and `eps = 1 - agreement`.
pub fn converse_dominance(p: &CtProtocol, ch: &MacChannel) -> Result<DominanceCheck> {
    let outcomes = p.enumerate(ch)?;
    let metrics = key_metrics_exact(&outcomes, p.n());
    let (law, vars) = trace_law(&outcomes)?;
    let layout = vars.terminal_layout();
    let (lam, lp_penalty) = best_bound_lp(&law, &layout.terminals)?;
    let eps = eps_of(metrics.agreement);
    let b = one_shot_bound(&law, &layout, &lam, eps)?;
    Ok(DominanceCheck {
        log_k: b.log_k,
        bound_bits: b.bound_bits,
        lp_penalty,
        eps,
        holds: b.log_k <= b.bound_bits + BOUND_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpPartitionCheck {
    pub lp_penalty: f64,
    pub best_partition_penalty: f64,
    pub best_partition: String,
    pub holds: bool,
}

/// The LP-optimal penalty dominates the penalty of every partition.
pub fn lp_dominates_partitions<L: EntropyOracle + ?Sized>(law: &L, terminals: &[Vec<usize>]) -> Result<LpPartitionCheck> {
    let (_, lp_penalty) = best_bound_lp(law, terminals)?;
    let mut best = (f64::NEG_INFINITY, String::new());
    for p in all_partitions(terminals.len())? {
        let v = penalty(law, terminals, &partition_to_fractional(&p))?;
        if v > best.0 {
            best = (v, p.label());
        }
    }
    Ok(LpPartitionCheck {
        lp_penalty,
        best_partition_penalty: best.0,
        best_partition: best.1,
        holds: lp_penalty >= best.0 - LP_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NLetterCheck {
    /// `(log|K| - s_in) / n`
    pub key_content: f64,
    pub rate: f64,
    /// `nu / n`
    pub nu_per_n: f64,
    pub eps: f64,
    pub holds: bool,
}

/// `(log|K| - s_in) / n <= rate + nu / n`, with the source-emulation rate
/// for SE protocols and the no-input-communication rate for NIC protocols.
pub fn n_letter_check(p: &CtProtocol, ch: &MacChannel) -> Result<NLetterCheck> {
    let outcomes = p.enumerate(ch)?;
    let n = p.n();
    let metrics = key_metrics_exact(&outcomes, n);
    let (law, vars) = trace_law(&outcomes)?;
    let rate = match p.restriction() {
        Restriction::Se => n_letter_rate_se(&law, &vars.se_layout(), n)?.0.rate,
        Restriction::Nic => n_letter_rate_nic(&law, &vars.nic_layout(), n)?.rate,
        Restriction::General => return invalid("n-letter rates apply to SE and NIC protocols only"),
    };
    let eps = eps_of(metrics.agreement);
    let log_k = metrics.key_bits;
    // Three terminals: nu = (m + 2)(eps log|K| + h(eps)).
    let nu = 5.0 * (eps * log_k + binary_entropy(eps));
    let key_content = (log_k - metrics.s_in) / n as f64;
    let nu_per_n = nu / n as f64;
    Ok(NLetterCheck {
        key_content,
        rate,
        nu_per_n,
        eps,
        holds: key_content <= rate + nu_per_n + BOUND_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{random_ct_protocol, source_emulation_sk, SeCode};
    use crate::seed;

    #[test]
    fn source_emulation_meets_its_bounds() {
        let se = source_emulation_sk(&MacChannel::xor(), 2, SeCode::BuiltIn, 0).unwrap();
        let c = n_letter_check(&se.protocol, &MacChannel::xor()).unwrap();
        assert!(c.holds, "{c:?}");
        assert!((c.key_content - 0.5).abs() < 1e-9);
        let d = converse_dominance(&se.protocol, &MacChannel::xor()).unwrap();
        assert!(d.holds, "{d:?}");
    }

    #[test]
    fn random_protocols_meet_bounds() {
        let ch = MacChannel::adder();
        for s in 0..10 {
            let mut rng = seed::rng(s);
            let p = random_ct_protocol(&ch, 2, Restriction::Nic, &mut rng).unwrap();
            assert!(n_letter_check(&p, &ch).unwrap().holds);
            assert!(converse_dominance(&p, &ch).unwrap().holds);
        }
    }
}
