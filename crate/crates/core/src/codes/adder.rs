use num_bigint::BigUint;
use serde::Serialize;

use super::{
    exact_output_entropy, exact_slot_conditional_entropy, BruteForcePredictor, FeedbackCode, Message, OutputPredictor, Role,
    SlotEncoder,
};
use crate::error::{invalid, Result};
use crate::info::MacChannel;

/// Two-phase feedback code for the binary adder channel.
///
/// Phase 1 sends `k` uncoded bits from each user. Output 1 marks an
/// ambiguous slot where the receiver knows the bits differ but not which is
/// which; both senders see every output, so both know the ambiguity pattern
/// and user 1's bits there. Phase 2 spends `L` slots sending that bit string
/// cooperatively in base 3: trit 0 as inputs (0, 0), 1 as (0, 1), 2 as (1, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct AdderFeedbackCode {
    k: usize,
    slack_c: f64,
    phase2_len: usize,
    capacity_bits: usize,
}

/// Analytic figures for the adder code at one parameter choice.
#[derive(Debug, Clone, Serialize)]
pub struct AdderRateReport {
    pub k: usize,
    pub slack_c: f64,
    pub phase2_len: usize,
    pub block_len: usize,
    /// Bits per user per channel use, `k / (k + L)`.
    pub rate: f64,
    /// Limit of the rate as `k` grows, `1 / (1 + 1 / (2 log2 3))`.
    pub asymptotic_rate: f64,
    /// Probability that the ambiguity string does not fit in phase 2.
    pub overflow_prob: f64,
}

/// `1 / (1 + 1 / (2 log2 3))`, about 0.76019.
pub fn adder_asymptotic_rate() -> f64 {
    1.0 / (1.0 + 1.0 / (2.0 * 3f64.log2()))
}

fn phase2_len(k: usize, slack_c: f64) -> usize {
    let bits = (k as f64 / 2.0 + slack_c * (k as f64).sqrt()).ceil();
    (bits / 3f64.log2()).ceil() as usize
}

/// Largest `A` with `2^A <= 3^L`.
fn capacity_bits(l: usize) -> usize {
    // Exact check around the floating estimate.
    let mut a = (l as f64 * 3f64.log2()).floor() as usize;
    let three = BigUint::from(3u32).pow(l as u32);
    while a > 0 && (BigUint::from(1u32) << a) > three {
        a -= 1;
    }
    while (BigUint::from(1u32) << (a + 1)) <= three {
        a += 1;
    }
    a
}

pub fn adder_feedback_code(k: usize, slack_c: f64) -> Result<AdderFeedbackCode> {
    AdderFeedbackCode::new(k, slack_c)
}

impl AdderFeedbackCode {
    pub fn new(k: usize, slack_c: f64) -> Result<Self> {
        if k == 0 {
            return invalid("adder code needs k >= 1");
        }
        if !(slack_c >= 0.0) || !slack_c.is_finite() {
            return invalid(format!("slack must be a finite nonnegative number, got {slack_c}"));
        }
        let l = phase2_len(k, slack_c);
        Ok(AdderFeedbackCode {
            k,
            slack_c,
            phase2_len: l,
            capacity_bits: capacity_bits(l),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn slack_c(&self) -> f64 {
        self.slack_c
    }

    pub fn phase2_len(&self) -> usize {
        self.phase2_len
    }

    /// Longest ambiguity string phase 2 can carry.
    pub fn capacity_bits(&self) -> usize {
        self.capacity_bits
    }

    /// `Pr{A > capacity}` for `A ~ Binomial(k, 1/2)`.
    pub fn overflow_prob(&self) -> f64 {
        binomial_half_pmf(self.k)
            .iter()
            .enumerate()
            .filter(|(a, _)| *a > self.capacity_bits)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn report(&self) -> AdderRateReport {
        AdderRateReport {
            k: self.k,
            slack_c: self.slack_c,
            phase2_len: self.phase2_len,
            block_len: self.k + self.phase2_len,
            rate: self.rate_per_user(),
            asymptotic_rate: adder_asymptotic_rate(),
            overflow_prob: self.overflow_prob(),
        }
    }

    /// Smallest `k0` such that the rate exceeds `threshold` for every
    /// `k >= k0`, or `None` if the limit does not exceed it.
    ///
    /// Uses `L <= (k/2 + c sqrt(k) + 1) / log2 3 + 1`, whose gap to the
    /// threshold is eventually increasing, to bound the exact scan.
    pub fn threshold_k0(slack_c: f64, threshold: f64) -> Option<usize> {
        if adder_asymptotic_rate() <= threshold || threshold <= 0.0 {
            return None;
        }
        // rate > thr  <=>  L < k (1 - thr) / thr
        let slope = (1.0 - threshold) / threshold;
        let lg3 = 3f64.log2();
        let lin = slope - 0.5 / lg3;
        let sq = slack_c / lg3;
        let gap = |k: f64| lin * k - sq * k.sqrt() - 1.0 / lg3 - 1.0;
        let turn = (sq / (2.0 * lin)).powi(2);
        let mut bound = turn.ceil().max(1.0) as usize;
        while gap(bound as f64) <= 0.0 {
            bound = bound * 2;
        }
        let mut k0 = 1;
        for k in 1..=bound {
            let l = phase2_len(k, slack_c);
            if k as f64 / (k + l) as f64 <= threshold {
                k0 = k + 1;
            }
        }
        Some(k0)
    }

    fn ambiguity_bits(&self, role: Role, msg: &[bool], phase1: &[usize]) -> Vec<bool> {
        phase1
            .iter()
            .zip(msg)
            .filter(|(&y, _)| y == 1)
            .map(|(_, &b)| match role {
                Role::First => b,
                Role::Second => !b,
            })
            .collect()
    }

    /// Base-3 digits, most significant first, or `None` on overflow.
    fn trits(&self, bits: &[bool]) -> Option<Vec<u8>> {
        if bits.len() > self.capacity_bits {
            return None;
        }
        let digits: Vec<u8> = bits.iter().map(|&b| b as u8).collect();
        let value = if digits.is_empty() {
            BigUint::default()
        } else {
            BigUint::from_radix_be(&digits, 2).expect("binary digits")
        };
        let mut t = value.to_radix_be(3);
        if t == [0] {
            t.clear();
        }
        let mut out = vec![0u8; self.phase2_len - t.len()];
        out.extend(t);
        Some(out)
    }
}

/// `Binomial(k, 1/2)` probabilities, computed in the log domain.
fn binomial_half_pmf(k: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k + 1);
    let mut log_c = 0.0f64;
    let base = -(k as f64) * std::f64::consts::LN_2;
    for a in 0..=k {
        out.push((log_c + base).exp());
        if a < k {
            log_c += ((k - a) as f64).ln() - ((a + 1) as f64).ln();
        }
    }
    out
}

struct AdderEncoder<'a> {
    code: &'a AdderFeedbackCode,
    role: Role,
    msg: Message,
    trits: Option<Option<Vec<u8>>>,
}

impl AdderEncoder<'_> {
    /// Phase 2 digit for slot `t`, 0 on overflow.
    fn trit(&mut self, past: &[usize], t: usize) -> u8 {
        let code = self.code;
        let trits = self.trits.get_or_insert_with(|| {
            let bits = code.ambiguity_bits(self.role, &self.msg, &past[..code.k]);
            code.trits(&bits)
        });
        trits.as_ref().map_or(0, |v| v[t - code.k])
    }

    fn phase2_input(&mut self, past: &[usize], t: usize) -> usize {
        let d = self.trit(past, t);
        match self.role {
            Role::First => usize::from(d == 2),
            Role::Second => usize::from(d >= 1),
        }
    }
}

impl SlotEncoder for AdderEncoder<'_> {
    fn input(&mut self, past: &[usize]) -> usize {
        let t = past.len();
        if t < self.code.k {
            self.msg[t] as usize
        } else {
            self.phase2_input(past, t)
        }
    }
}

/// Output law given one message: phase 1 outputs are own bit plus a fair
/// coin, phase 2 outputs are known to both senders.
struct AdderPredictor<'a> {
    enc: AdderEncoder<'a>,
}

impl OutputPredictor for AdderPredictor<'_> {
    fn next_output_law(&mut self, past: &[usize]) -> Vec<f64> {
        let t = past.len();
        let mut law = vec![0.0; 3];
        if t < self.enc.code.k {
            let b = self.enc.msg[t] as usize;
            law[b] = 0.5;
            law[b + 1] = 0.5;
        } else {
            law[self.enc.trit(past, t) as usize] = 1.0;
        }
        law
    }
}

impl FeedbackCode for AdderFeedbackCode {
    fn name(&self) -> String {
        format!("adder(k={}, slack_c={})", self.k, self.slack_c)
    }

    fn block_len(&self) -> usize {
        self.k + self.phase2_len
    }

    fn message_bits(&self) -> usize {
        self.k
    }

    fn input_sizes(&self) -> (usize, usize) {
        (2, 2)
    }

    fn output_size(&self) -> usize {
        3
    }

    fn encoder(&self, role: Role, msg: &[bool]) -> Box<dyn SlotEncoder + '_> {
        Box::new(AdderEncoder {
            code: self,
            role,
            msg: msg.to_vec(),
            trits: None,
        })
    }

    fn decode(&self, outputs: &[usize]) -> (Message, Message) {
        let k = self.k;
        let mut m1 = vec![false; k];
        let mut m2 = vec![false; k];
        let mut ambiguous = Vec::new();
        for (t, &y) in outputs[..k].iter().enumerate() {
            match y {
                0 => {}
                2 => {
                    m1[t] = true;
                    m2[t] = true;
                }
                _ => ambiguous.push(t),
            }
        }
        let a = ambiguous.len();
        let mut fill = vec![false; a];
        if a > 0 && a <= self.capacity_bits {
            let trits: Vec<u8> = outputs[k..k + self.phase2_len].iter().map(|&y| y.min(2) as u8).collect();
            let value = BigUint::from_radix_be(&trits, 3).expect("ternary digits");
            let bits = value.to_radix_be(2);
            // Keep the low `a` bits; more cannot occur on a noiseless channel.
            let take = bits.len().min(a);
            for (i, &b) in bits[bits.len() - take..].iter().enumerate() {
                fill[a - take + i] = b == 1;
            }
        }
        for (&t, &b) in ambiguous.iter().zip(&fill) {
            m1[t] = b;
            m2[t] = !b;
        }
        (m1, m2)
    }

    fn predictor<'a>(&'a self, ch: &'a MacChannel, role: Role, msg: &[bool]) -> Result<Box<dyn OutputPredictor + 'a>> {
        if *ch != MacChannel::adder() {
            return Ok(Box::new(BruteForcePredictor::new(self, ch, role, msg)?));
        }
        Ok(Box::new(AdderPredictor {
            enc: AdderEncoder {
                code: self,
                role,
                msg: msg.to_vec(),
                trits: None,
            },
        }))
    }

    /// One bit per phase 1 slot, nothing afterwards, on the noiseless adder
    /// channel. Other channels get the exact computation.
    fn slot_conditional_entropy(&self, ch: &MacChannel, role: Role, t: usize) -> Result<f64> {
        if *ch != MacChannel::adder() {
            return exact_slot_conditional_entropy(self, ch, role, t);
        }
        if t >= self.block_len() {
            return invalid(format!("slot {t} is past the block length {}", self.block_len()));
        }
        Ok(if t < self.k { 1.0 } else { 0.0 })
    }

    /// `2k - E[A ; A > capacity]`: the outputs reveal both messages except
    /// the ambiguous bits on overflow, on the noiseless adder channel.
    fn output_entropy(&self, ch: &MacChannel) -> Result<f64> {
        if *ch != MacChannel::adder() {
            return exact_output_entropy(self, ch);
        }
        let lost: f64 = binomial_half_pmf(self.k)
            .iter()
            .enumerate()
            .filter(|(a, _)| *a > self.capacity_bits)
            .map(|(a, p)| a as f64 * p)
            .sum();
        Ok(2.0 * self.k as f64 - lost)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{code_law, message_bits_of, simulate_code, transmit};
    use crate::info::entropy_of;

    #[test]
    fn capacity_matches_powers() {
        assert_eq!(capacity_bits(1), 1);
        assert_eq!(capacity_bits(2), 3);
        assert_eq!(capacity_bits(5), 7);
        assert_eq!(capacity_bits(0), 0);
    }

    #[test]
    fn phase_lengths() {
        let c = AdderFeedbackCode::new(1000, 3.0).unwrap();
        assert_eq!(c.phase2_len(), 376);
        assert_eq!(c.block_len(), 1376);
        let tiny = AdderFeedbackCode::new(2, 0.5).unwrap();
        assert_eq!(tiny.block_len(), 4);
    }

    #[test]
    fn exhaustive_decoding_small_k() {
        let code = AdderFeedbackCode::new(4, 1.0).unwrap();
        let ch = MacChannel::adder();
        let mut rng = crate::seed::rng(1);
        let mut failures = 0;
        for i in 0..16 {
            for j in 0..16 {
                let m1 = message_bits_of(i, 4);
                let m2 = message_bits_of(j, 4);
                let y = transmit(&code, &ch, &m1, &m2, &mut rng);
                let (a, b) = code.decode(&y);
                if a != m1 || b != m2 {
                    failures += 1;
                }
            }
        }
        // Decoding fails only on overflow, whose probability is known exactly.
        assert_eq!(failures as f64 / 256.0 > 0.0, code.overflow_prob() > 0.0);
    }

    #[test]
    fn closed_form_entropies_match_exact_law() {
        let ch = MacChannel::adder();
        for (k, c) in [(2, 0.5), (3, 0.0), (4, 0.0)] {
            let code = AdderFeedbackCode::new(k, c).unwrap();
            let law = code_law(&code, &ch).unwrap();
            let outs: Vec<usize> = (2..2 + code.block_len()).collect();
            let exact = entropy_of(&law.marginal_table(&outs));
            assert!((exact - code.output_entropy(&ch).unwrap()).abs() < 1e-9, "k={k}");
            for t in 0..code.block_len() {
                let mut v = vec![0];
                v.extend(2..2 + t);
                let before = entropy_of(&law.marginal_table(&v));
                v.push(2 + t);
                let h = entropy_of(&law.marginal_table(&v)) - before;
                let closed = code.slot_conditional_entropy(&ch, Role::First, t).unwrap();
                assert!((h - closed).abs() < 1e-9, "k={k} t={t}: {h} vs {closed}");
            }
        }
    }

    #[test]
    fn rate_threshold() {
        let k0 = AdderFeedbackCode::threshold_k0(2.0, 0.75).unwrap();
        let rate = |k| AdderFeedbackCode::new(k, 2.0).unwrap().rate_per_user();
        assert!(rate(k0) > 0.75);
        assert!(rate(k0 - 1) <= 0.75);
        assert!(AdderFeedbackCode::threshold_k0(2.0, 0.77).is_none());
        assert!((adder_asymptotic_rate() - 0.76019).abs() < 1e-5);
    }

    #[test]
    fn simulated_error_is_small() {
        let code = AdderFeedbackCode::new(200, 4.0).unwrap();
        let est = simulate_code(&MacChannel::adder(), &code, 500, 7).unwrap();
        assert!(est.error_prob <= 0.01, "{est:?}");
    }
}
