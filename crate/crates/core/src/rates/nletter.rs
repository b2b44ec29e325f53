use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::info::EntropyOracle;

/// The three normalized terms of an n-letter symmetric-rate expression and
/// their minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NLetterRate {
    pub first: f64,
    pub second: f64,
    pub half_sum: f64,
    pub rate: f64,
}

impl NLetterRate {
    fn new(first: f64, second: f64, sum: f64, n: usize) -> Self {
        let n = n as f64;
        let (first, second, half_sum) = (first / n, second / n, sum / (2.0 * n));
        NLetterRate {
            first,
            second,
            half_sum,
            rate: first.min(second).min(half_sum),
        }
    }
}

/// Which variables of a trace law hold the randomization of each terminal
/// and the channel outputs. Empty groups stand for constants.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NicLayout {
    pub u1: Vec<usize>,
    pub u2: Vec<usize>,
    pub u3: Vec<usize>,
    pub x3: Vec<usize>,
}

impl NicLayout {
    /// Variables ordered `U1, U2, U3, X3_1 .. X3_n`.
    pub fn standard(n: usize) -> Self {
        NicLayout {
            u1: vec![0],
            u2: vec![1],
            u3: vec![2],
            x3: (3..3 + n).collect(),
        }
    }
}

/// Variable groups for source-emulation trace laws.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeLayout {
    pub x1: Vec<usize>,
    pub u1: Vec<usize>,
    pub x2: Vec<usize>,
    pub u2: Vec<usize>,
    pub x3: Vec<usize>,
    pub u3: Vec<usize>,
}

fn cat(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

fn mi_or_zero<L: EntropyOracle + ?Sized>(j: &L, a: &[usize], b: &[usize], given: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let mut seen = vec![false; j.num_vars()];
    for &v in a.iter().chain(b).chain(given) {
        if v >= seen.len() || seen[v] {
            return Err(Error::ShapeMismatch(format!("variable {v} is out of range or repeated")));
        }
        seen[v] = true;
    }
    let ag = cat(a, given);
    let bg = cat(b, given);
    let abg = cat(&ag, b);
    let i = j.joint_entropy(&ag) + j.joint_entropy(&bg) - j.joint_entropy(&abg) - j.joint_entropy(given);
    Ok(if i < 1e-12 { 0.0 } else { i })
}

/// `min{ I(U1; X3^n, U3 | U2) / n, I(U2; X3^n, U3 | U1) / n,
/// I(U1, U2; X3^n, U3) / 2n }` on the law of a no-input-communication run.
pub fn n_letter_rate_nic<L: EntropyOracle + ?Sized>(law: &L, layout: &NicLayout, n: usize) -> Result<NLetterRate> {
    if n == 0 {
        return invalid("block length must be positive");
    }
    let out = cat(&layout.x3, &layout.u3);
    let u12 = cat(&layout.u1, &layout.u2);
    Ok(NLetterRate::new(
        mi_or_zero(law, &layout.u1, &out, &layout.u2)?,
        mi_or_zero(law, &layout.u2, &out, &layout.u1)?,
        mi_or_zero(law, &u12, &out, &[])?,
        n,
    ))
}

/// Source-emulation rate terms. Returns the terms with randomization
/// included and the input-only terms `I(X1^n; X3^n | X2^n)` etc. that bound
/// them.
pub fn n_letter_rate_se<L: EntropyOracle + ?Sized>(law: &L, layout: &SeLayout, n: usize) -> Result<(NLetterRate, NLetterRate)> {
    if n == 0 {
        return invalid("block length must be positive");
    }
    let y1 = cat(&layout.x1, &layout.u1);
    let y2 = cat(&layout.x2, &layout.u2);
    let y3 = cat(&layout.x3, &layout.u3);
    let y12 = cat(&y1, &y2);
    let with_u = NLetterRate::new(
        mi_or_zero(law, &y1, &y3, &y2)?,
        mi_or_zero(law, &y2, &y3, &y1)?,
        mi_or_zero(law, &y12, &y3, &[])?,
        n,
    );
    let x12 = cat(&layout.x1, &layout.x2);
    let inputs_only = NLetterRate::new(
        mi_or_zero(law, &layout.x1, &layout.x3, &layout.x2)?,
        mi_or_zero(law, &layout.x2, &layout.x3, &layout.x1)?,
        mi_or_zero(law, &x12, &layout.x3, &[])?,
        n,
    );
    Ok((with_u, inputs_only))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{channel_pushforward, FiniteDist, JointDist, MacChannel};

    /// Identity encoders on uniform bits, one channel use, constant U3.
    fn identity_trace(ch: &MacChannel) -> JointDist {
        let mut outcomes = Vec::new();
        for u1 in 0..2 {
            for u2 in 0..2 {
                for y in 0..ch.out() {
                    outcomes.push((vec![u1, u2, 0, y], 0.25 * ch.prob(y, u1, u2)));
                }
            }
        }
        JointDist::from_outcomes(vec![2, 2, 1, ch.out()], outcomes.iter().map(|(s, p)| (s.as_slice(), *p)))
            .unwrap()
    }

    #[test]
    fn nic_examples() {
        let r = n_letter_rate_nic(&identity_trace(&MacChannel::adder()), &NicLayout::standard(1), 1).unwrap();
        assert!((r.rate - 0.75).abs() < 1e-12);
        let r = n_letter_rate_nic(&identity_trace(&MacChannel::xor()), &NicLayout::standard(1), 1).unwrap();
        assert!((r.rate - 0.5).abs() < 1e-12);
        let constant = JointDist::new(vec![1, 1, 1, 3], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(n_letter_rate_nic(&constant, &NicLayout::standard(1), 1).unwrap().rate, 0.0);
    }

    fn iid_layout(n: usize) -> SeLayout {
        SeLayout {
            x1: (0..n).collect(),
            x2: (n..2 * n).collect(),
            x3: (2 * n..3 * n).collect(),
            ..Default::default()
        }
    }

    #[test]
    fn se_iid_inputs_are_additive() {
        let u = FiniteDist::uniform(2);
        for n in 1..=2 {
            let law = channel_pushforward(&MacChannel::adder(), &u, &u, n).unwrap();
            let (r, x) = n_letter_rate_se(&law, &iid_layout(n), n).unwrap();
            assert!((r.rate - 0.75).abs() < 1e-9, "n={n} {r:?}");
            assert_eq!(r, x);
        }
        let point = FiniteDist::point(2, 0);
        let law = channel_pushforward(&MacChannel::adder(), &point, &point, 1).unwrap();
        assert_eq!(n_letter_rate_se(&law, &iid_layout(1), 1).unwrap().0.rate, 0.0);
    }
}
