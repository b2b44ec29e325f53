use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::info::{EntropyOracle, SparseLaw};

/// Where the pieces of a key-agreement law live.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeyLayout {
    /// Local randomness `U_i`, one variable per terminal.
    pub randomness: Vec<usize>,
    /// The first-round message `F_1`.
    pub first_message: usize,
    /// All transcript variables, including `F_1`.
    pub transcript: Vec<usize>,
    /// Key estimates `K_1, K_2, K_3`.
    pub estimates: Vec<usize>,
    pub key: usize,
    pub key_alphabet: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionResult {
    /// Label of the selected `F_1` value.
    pub f1: u64,
    pub prob_f1: f64,
    /// `Pr{K_1 = K_2 = K_3 = K | F_1 = f1}`
    pub agreement: f64,
    /// `log|K| - H(K | F, F_1 = f1)`
    pub s_in: f64,
    /// Largest deviation of the conditioned randomness law from product form.
    pub product_gap: f64,
    #[serde(skip)]
    pub law: SparseLaw,
}

/// Fixes the first message to the lowest-labeled value `f1` under which the
/// key conditions hold with doubled slack: agreement at least `1 - 2 eps`
/// and security index at most `2 eps`. Returns the law conditioned on it.
pub fn f1_constant_reduction(law: &SparseLaw, layout: &KeyLayout, eps: f64) -> Result<ReductionResult> {
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("eps must lie in (0, 1), got {eps}"));
    }
    let nv = law.num_vars();
    if layout
        .randomness
        .iter()
        .chain(&layout.transcript)
        .chain(&layout.estimates)
        .chain([&layout.key, &layout.first_message])
        .any(|&v| v >= nv)
    {
        return Err(Error::ShapeMismatch("layout names a variable outside the law".into()));
    }
    let mut labels: Vec<u64> = law.outcomes().iter().map(|(l, _)| l[layout.first_message]).collect();
    labels.sort_unstable();
    labels.dedup();
    let log_k = (layout.key_alphabet as f64).log2();
    for f1 in labels {
        let prob_f1: f64 = law
            .outcomes()
            .iter()
            .filter(|(l, _)| l[layout.first_message] == f1)
            .map(|(_, p)| p)
            .sum();
        let cond = law.condition(layout.first_message, f1).expect("value from the support");
        let agreement: f64 = cond
            .outcomes()
            .iter()
            .filter(|(l, _)| layout.estimates.iter().all(|&e| l[e] == l[layout.key]))
            .map(|(_, p)| p)
            .sum();
        let s_in = (log_k - cond.cond_entropy(&[layout.key], &layout.transcript)).max(0.0);
        if agreement >= 1.0 - 2.0 * eps - 1e-12 && s_in <= 2.0 * eps + 1e-12 {
            let groups: Vec<Vec<usize>> = layout.randomness.iter().map(|&v| vec![v]).collect();
            return Ok(ReductionResult {
                f1,
                prob_f1,
                agreement,
                s_in,
                product_gap: cond.product_gap(&groups),
                law: cond,
            });
        }
    }
    Err(Error::NoQualifyingValue)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// (U1, U2, F1, K, K1, K2, K3) with K = K_i = U1 AND U2.
    fn law(f1: impl Fn(u64, u64) -> u64) -> SparseLaw {
        let mut o = Vec::new();
        for u1 in 0..2 {
            for u2 in 0..2 {
                let k = u1 & u2;
                o.push((vec![u1, u2, f1(u1, u2), k, k, k, k], 0.25));
            }
        }
        SparseLaw::new(o).unwrap()
    }

    fn layout() -> KeyLayout {
        KeyLayout {
            randomness: vec![0, 1],
            first_message: 2,
            transcript: vec![2],
            estimates: vec![4, 5, 6],
            key: 3,
            key_alphabet: 1,
        }
    }

    #[test]
    fn constant_first_message_is_kept() {
        let l = law(|_, _| 5);
        let r = f1_constant_reduction(&l, &KeyLayout { key_alphabet: 2, ..layout() }, 0.45).unwrap();
        assert_eq!(r.f1, 5);
        assert_eq!(r.prob_f1, 1.0);
        assert!(r.product_gap < 1e-12);
    }

    #[test]
    fn lowest_label_wins_and_independence_survives() {
        // F1 = U1 is an interactive first message; any value qualifies for a
        // trivially secure key over |K| = 1.
        let r = f1_constant_reduction(&law(|u1, _| 7 + u1), &layout(), 0.1).unwrap();
        assert_eq!(r.f1, 7);
        assert!(r.product_gap < 1e-12);
    }

    #[test]
    fn no_value_qualifies() {
        // Key K = U1 AND U2 is biased: s_in > 2 eps for |K| = 2.
        let err = f1_constant_reduction(&law(|_, _| 0), &KeyLayout { key_alphabet: 2, ..layout() }, 0.01);
        assert!(matches!(err, Err(Error::NoQualifyingValue)));
    }
}
