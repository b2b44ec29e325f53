//! Feedback codes for the two-input MAC.
//!
//! A code is a pair of causal encoders, each reading its own message and the
//! strictly past channel outputs, plus a decoder over the full output block.
//! Encoders are stateful objects fed the output history slot by slot, which
//! keeps long blocks linear in the block length.

mod adder;
mod identity;
mod symmetric;
mod tdma;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::info::{checked_size, entropy_of, JointDist, MacChannel};
use crate::seed;

pub use adder::{adder_asymptotic_rate, adder_feedback_code, AdderFeedbackCode, AdderRateReport};
pub use identity::IdentityCode;
pub use symmetric::{check_entropy_symmetry, symmetrize_code, EntropySymmetry, SymmetrizedCode};
pub use tdma::TdmaCode;

/// Which encoder map of the code a terminal runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Role {
    First,
    Second,
}

impl Role {
    pub fn swap(self) -> Role {
        match self {
            Role::First => Role::Second,
            Role::Second => Role::First,
        }
    }
}

/// Messages are bit strings, most significant bit first.
pub type Message = Vec<bool>;

pub fn message_index(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
}

pub fn message_bits_of(index: u64, len: usize) -> Message {
    (0..len).rev().map(|i| (index >> i) & 1 == 1).collect()
}

/// Causal encoder for one terminal over one block.
pub trait SlotEncoder {
    /// Input for slot `past.len()`, given all earlier outputs.
    fn input(&mut self, past: &[usize]) -> usize;
}

/// Law of the next channel output as seen by one terminal: conditioned on
/// its own message and the outputs so far.
pub trait OutputPredictor {
    fn next_output_law(&mut self, past: &[usize]) -> Vec<f64>;
}

pub trait FeedbackCode: Send + Sync {
    fn name(&self) -> String;
    fn block_len(&self) -> usize;
    /// Each user's message is this many uniform bits.
    fn message_bits(&self) -> usize;
    fn input_sizes(&self) -> (usize, usize);
    fn output_size(&self) -> usize;
    fn encoder(&self, role: Role, msg: &[bool]) -> Box<dyn SlotEncoder + '_>;
    fn decode(&self, outputs: &[usize]) -> (Message, Message);

    fn rate_per_user(&self) -> f64 {
        self.message_bits() as f64 / self.block_len() as f64
    }

    /// Default: exact posterior over the partner's messages, feasible for
    /// small message sets only.
    fn predictor<'a>(&'a self, ch: &'a MacChannel, role: Role, msg: &[bool]) -> Result<Box<dyn OutputPredictor + 'a>>
    where
        Self: Sized,
    {
        Ok(Box::new(BruteForcePredictor::new(self, ch, role, msg)?))
    }

    /// `H(X3_t | M_role, X3^{t-1})`; default computes the exact code law.
    fn slot_conditional_entropy(&self, ch: &MacChannel, role: Role, t: usize) -> Result<f64>
    where
        Self: Sized,
    {
        exact_slot_conditional_entropy(self, ch, role, t)
    }

    /// `H(X3^n)` for uniform messages; default computes the exact code law.
    fn output_entropy(&self, ch: &MacChannel) -> Result<f64>
    where
        Self: Sized,
    {
        exact_output_entropy(self, ch)
    }
}

pub fn exact_slot_conditional_entropy<C: FeedbackCode + ?Sized>(
    code: &C,
    ch: &MacChannel,
    role: Role,
    t: usize,
) -> Result<f64> {
    if t >= code.block_len() {
        return invalid(format!("slot {t} is past the block length {}", code.block_len()));
    }
    let law = code_law(code, ch)?;
    let m = match role {
        Role::First => 0,
        Role::Second => 1,
    };
    let mut upto: Vec<usize> = vec![m];
    upto.extend(2..2 + t);
    let before = entropy_of(&law.marginal_table(&upto));
    upto.push(2 + t);
    Ok((entropy_of(&law.marginal_table(&upto)) - before).max(0.0))
}

pub fn exact_output_entropy<C: FeedbackCode + ?Sized>(code: &C, ch: &MacChannel) -> Result<f64> {
    let law = code_law(code, ch)?;
    let outs: Vec<usize> = (2..2 + code.block_len()).collect();
    Ok(entropy_of(&law.marginal_table(&outs)))
}

pub(crate) fn check_code_channel<C: FeedbackCode + ?Sized>(code: &C, ch: &MacChannel) -> Result<()> {
    let (a, b) = code.input_sizes();
    if a != ch.in1() || b != ch.in2() || code.output_size() != ch.out() {
        return Err(Error::ShapeMismatch(format!(
            "code alphabets ({a}, {b}) -> {} do not match channel ({}, {}) -> {}",
            code.output_size(),
            ch.in1(),
            ch.in2(),
            ch.out()
        )));
    }
    Ok(())
}

/// Runs one block through the channel; returns the outputs.
pub fn transmit<C: FeedbackCode + ?Sized, R: rand::Rng>(
    code: &C,
    ch: &MacChannel,
    m1: &[bool],
    m2: &[bool],
    rng: &mut R,
) -> Vec<usize> {
    let mut e1 = code.encoder(Role::First, m1);
    let mut e2 = code.encoder(Role::Second, m2);
    let mut out = Vec::with_capacity(code.block_len());
    for _ in 0..code.block_len() {
        let x1 = e1.input(&out);
        let x2 = e2.input(&out);
        out.push(ch.sample(x1, x2, rng));
    }
    out
}

/// Exact joint law of `(M1, M2, X3_1, .., X3_n)` under uniform messages.
pub fn code_law<C: FeedbackCode + ?Sized>(code: &C, ch: &MacChannel) -> Result<JointDist> {
    check_code_channel(code, ch)?;
    let mb = code.message_bits();
    if mb > 20 {
        return Err(Error::BudgetExceeded {
            needed: 1u128 << (2 * mb.min(60)),
            budget: crate::info::table_budget(),
        });
    }
    let m = 1usize << mb;
    let n = code.block_len();
    let mut arity = vec![m, m];
    arity.extend(std::iter::repeat(ch.out()).take(n));
    checked_size(&arity)?;
    let pm = 1.0 / (m * m) as f64;
    let mut outcomes: Vec<(Vec<usize>, f64)> = Vec::new();
    for i1 in 0..m {
        let b1 = message_bits_of(i1 as u64, mb);
        for i2 in 0..m {
            let b2 = message_bits_of(i2 as u64, mb);
            branch(code, ch, &b1, &b2, &mut Vec::new(), pm, &mut |ys, p| {
                let mut s = vec![i1, i2];
                s.extend_from_slice(ys);
                outcomes.push((s, p));
            });
        }
    }
    JointDist::from_outcomes(arity, outcomes.iter().map(|(s, p)| (s.as_slice(), *p)))
}

/// Depth-first enumeration of output sequences with positive probability.
/// Encoders are rebuilt per branch, which is fine at enumerable sizes.
fn branch<C: FeedbackCode + ?Sized>(
    code: &C,
    ch: &MacChannel,
    m1: &[bool],
    m2: &[bool],
    past: &mut Vec<usize>,
    p: f64,
    emit: &mut dyn FnMut(&[usize], f64),
) {
    if past.len() == code.block_len() {
        emit(past, p);
        return;
    }
    let (x1, x2) = {
        let mut e1 = code.encoder(Role::First, m1);
        let mut e2 = code.encoder(Role::Second, m2);
        let mut xs = (0, 0);
        for t in 0..=past.len() {
            xs = (e1.input(&past[..t]), e2.input(&past[..t]));
        }
        xs
    };
    for (y, &w) in ch.row(x1, x2).iter().enumerate() {
        if w > 0.0 {
            past.push(y);
            branch(code, ch, m1, m2, past, p * w, emit);
            past.pop();
        }
    }
}

struct Candidate<'a> {
    encoder: Box<dyn SlotEncoder + 'a>,
    weight: f64,
}

/// Posterior over every partner message, updated slot by slot.
pub struct BruteForcePredictor<'a> {
    ch: &'a MacChannel,
    role: Role,
    own: Box<dyn SlotEncoder + 'a>,
    partners: Vec<Candidate<'a>>,
    consumed: usize,
    pending: Option<(usize, Vec<usize>)>,
}

impl<'a> BruteForcePredictor<'a> {
    pub fn new<C: FeedbackCode + ?Sized>(code: &'a C, ch: &'a MacChannel, role: Role, msg: &[bool]) -> Result<Self> {
        let mb = code.message_bits();
        if mb > 16 {
            return invalid(format!(
                "exact prediction enumerates partner messages; {mb} bits is too many"
            ));
        }
        let partners = (0..1u64 << mb)
            .map(|i| Candidate {
                encoder: code.encoder(role.swap(), &message_bits_of(i, mb)),
                weight: 1.0,
            })
            .collect();
        Ok(BruteForcePredictor {
            ch,
            role,
            own: code.encoder(role, msg),
            partners,
            consumed: 0,
            pending: None,
        })
    }

    fn w(&self, y: usize, own: usize, partner: usize) -> f64 {
        match self.role {
            Role::First => self.ch.prob(y, own, partner),
            Role::Second => self.ch.prob(y, partner, own),
        }
    }

    fn inputs_for(&mut self, past: &[usize]) -> (usize, Vec<usize>) {
        let own = self.own.input(past);
        let partner = self.partners.iter_mut().map(|c| c.encoder.input(past)).collect();
        (own, partner)
    }
}

impl OutputPredictor for BruteForcePredictor<'_> {
    fn next_output_law(&mut self, past: &[usize]) -> Vec<f64> {
        while self.consumed < past.len() {
            let (own, partner) = match self.pending.take() {
                Some(p) => p,
                None => self.inputs_for(&past[..self.consumed]),
            };
            let y = past[self.consumed];
            let ws: Vec<f64> = partner.iter().map(|&x| self.w(y, own, x)).collect();
            for (c, w) in self.partners.iter_mut().zip(ws) {
                c.weight *= w;
            }
            let total: f64 = self.partners.iter().map(|c| c.weight).sum();
            if total > 0.0 {
                self.partners.iter_mut().for_each(|c| c.weight /= total);
            }
            self.consumed += 1;
        }
        let (own, partner) = self.inputs_for(past);
        let mut law = vec![0.0; self.ch.out()];
        let mut mass = 0.0;
        for (c, &x) in self.partners.iter().zip(&partner) {
            if c.weight == 0.0 {
                continue;
            }
            mass += c.weight;
            for (y, l) in law.iter_mut().enumerate() {
                *l += c.weight * self.w(y, own, x);
            }
        }
        if mass > 0.0 {
            law.iter_mut().for_each(|l| *l /= mass);
        }
        self.pending = Some((own, partner));
        law
    }
}

/// Monte Carlo estimate with a Wilson 95% interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorEstimate {
    pub trials: u64,
    pub errors: u64,
    pub error_prob: f64,
    pub ci: (f64, f64),
}

pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

impl ErrorEstimate {
    pub fn new(errors: u64, trials: u64) -> Self {
        ErrorEstimate {
            trials,
            errors,
            error_prob: if trials == 0 { 0.0 } else { errors as f64 / trials as f64 },
            ci: wilson_interval(errors, trials),
        }
    }
}

fn random_message<R: rand::Rng>(len: usize, rng: &mut R) -> Message {
    (0..len).map(|_| rng.gen::<bool>()).collect()
}

/// Block error probability `Pr{decoded pair != sent pair}` under uniform
/// messages. Trial `i` draws from its own derived seed, so the estimate does
/// not depend on how trials are scheduled across threads.
pub fn simulate_code<C: FeedbackCode + ?Sized>(ch: &MacChannel, code: &C, trials: u64, seed: u64) -> Result<ErrorEstimate> {
    check_code_channel(code, ch)?;
    let errors: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::rng(seed::derive(seed, seed::stream::TRIAL, i));
            let m1 = random_message(code.message_bits(), &mut rng);
            let m2 = random_message(code.message_bits(), &mut rng);
            let y = transmit(code, ch, &m1, &m2, &mut rng);
            let (d1, d2) = code.decode(&y);
            u64::from(d1 != m1 || d2 != m2)
        })
        .sum();
    Ok(ErrorEstimate::new(errors, trials))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn message_bits_round_trip() {
        assert_eq!(message_bits_of(5, 4), vec![false, true, false, true]);
        assert_eq!(message_index(&message_bits_of(11, 4)), 11);
    }

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson_interval(5, 100);
        assert!(lo < 0.05 && 0.05 < hi);
        let (lo, hi) = wilson_interval(0, 10_000);
        assert_eq!(lo, 0.0);
        assert!(hi < 4e-4);
    }
}
