use std::collections::HashMap;

use serde::Serialize;

use super::ct::SkTrace;
use crate::codes::wilson_interval;
use crate::info::entropy_of;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeyMetrics {
    /// `Pr{K_1 = K_2 = K_3 = K}`
    pub agreement: f64,
    /// `log|K| - H(K | F)` in bits.
    pub s_in: f64,
    pub s_in_mode: Mode,
    /// `log|K|`
    pub key_bits: f64,
    /// `log|K| / n`, bits per channel use.
    pub weak_rate: f64,
    /// Sample count behind estimates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    /// 95% interval for the agreement probability when estimated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement_ci: Option<(f64, f64)>,
}

fn agree(t: &SkTrace) -> bool {
    t.keys.iter().all(|&k| k == t.key)
}

/// `H(K | F)` from weighted `(key, transcript)` pairs.
fn key_given_transcript<'a>(items: impl Iterator<Item = (&'a SkTrace, f64)>) -> f64 {
    let mut joint: HashMap<(&'a [usize], usize), f64> = HashMap::new();
    let mut marg: HashMap<&'a [usize], f64> = HashMap::new();
    for (t, p) in items {
        *joint.entry((&t.f, t.key)).or_default() += p;
        *marg.entry(&t.f).or_default() += p;
    }
    let hj = entropy_of(&joint.values().copied().collect::<Vec<_>>());
    let hm = entropy_of(&marg.values().copied().collect::<Vec<_>>());
    (hj - hm).max(0.0)
}

/// Exact metrics from an enumerated law of executions.
pub fn key_metrics_exact(outcomes: &[(SkTrace, f64)], n: usize) -> KeyMetrics {
    let key_alphabet = outcomes.first().map_or(1, |(t, _)| t.key_alphabet);
    let key_bits = (key_alphabet as f64).log2();
    let agreement = outcomes.iter().filter(|(t, _)| agree(t)).map(|(_, p)| p).sum();
    let h = key_given_transcript(outcomes.iter().map(|(t, p)| (t, *p)));
    let s_in = key_bits - h;
    KeyMetrics {
        agreement,
        s_in: if s_in < 1e-12 { 0.0 } else { s_in },
        s_in_mode: Mode::Exact,
        key_bits,
        weak_rate: key_bits / n as f64,
        samples: None,
        agreement_ci: None,
    }
}

/// Plug-in estimates from sampled executions. The plug-in conditional
/// entropy is biased low, so `s_in` is biased high.
pub fn key_metrics_sampled(traces: &[SkTrace], n: usize) -> KeyMetrics {
    let key_alphabet = traces.first().map_or(1, |t| t.key_alphabet);
    let key_bits = (key_alphabet as f64).log2();
    let total = traces.len() as u64;
    let agreeing = traces.iter().filter(|t| agree(t)).count() as u64;
    let w = 1.0 / total.max(1) as f64;
    let h = key_given_transcript(traces.iter().map(|t| (t, w)));
    KeyMetrics {
        agreement: agreeing as f64 * w,
        s_in: (key_bits - h).max(0.0),
        s_in_mode: Mode::Estimate,
        key_bits,
        weak_rate: key_bits / n as f64,
        samples: Some(total),
        agreement_ci: Some(wilson_interval(agreeing, total)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(key: usize, keys: [usize; 3], f: Vec<usize>, alphabet: usize) -> SkTrace {
        SkTrace {
            u: [0; 3],
            x1: vec![],
            x2: vec![],
            x3: vec![],
            f,
            f1_len: 0,
            keys,
            key,
            key_alphabet: alphabet,
        }
    }

    #[test]
    fn constant_key() {
        let m = key_metrics_exact(&[(trace(0, [0; 3], vec![], 1), 1.0)], 1);
        assert_eq!((m.agreement, m.s_in), (1.0, 0.0));
    }

    #[test]
    fn published_key_fully_leaks() {
        let o: Vec<(SkTrace, f64)> = (0..4).map(|k| (trace(k, [k; 3], vec![k], 4), 0.25)).collect();
        let m = key_metrics_exact(&o, 1);
        assert!((m.s_in - 2.0).abs() < 1e-12);
        let hidden: Vec<(SkTrace, f64)> = (0..4).map(|k| (trace(k, [k; 3], vec![], 4), 0.25)).collect();
        assert_eq!(key_metrics_exact(&hidden, 1).s_in, 0.0);
    }

    #[test]
    fn sampled_metrics_flag_estimates() {
        let traces: Vec<SkTrace> = (0..100).map(|i| trace(i % 2, [i % 2, i % 2, 0], vec![], 2)).collect();
        let m = key_metrics_sampled(&traces, 1);
        assert_eq!(m.s_in_mode, Mode::Estimate);
        assert_eq!(m.samples, Some(100));
        assert_eq!(m.agreement, 0.5);
    }
}
