use serde::Serialize;

use super::{code_law, FeedbackCode, Message, OutputPredictor, Role, SlotEncoder};
use crate::error::{invalid, Result};
use crate::info::{entropy_of, MacChannel};

/// Interleaves a code with its role-swapped copy.
///
/// Odd channel uses (1, 3, ..) run the inner code on `(M1', M2')`. Even uses
/// run it with roles exchanged: terminal 1 plays the second encoder on `M1''`
/// and terminal 2 plays the first encoder on `M2''`. On a symmetric channel
/// this makes the per-slot conditional output entropies the same from either
/// terminal's side once slots are taken in pairs.
#[derive(Debug, Clone)]
pub struct SymmetrizedCode<C> {
    inner: C,
}

/// Wraps `code`; the channel must satisfy `W(y|a,b) = W(y|b,a)` within 1e-9.
pub fn symmetrize_code<C: FeedbackCode>(code: C, ch: &MacChannel) -> Result<SymmetrizedCode<C>> {
    if !ch.is_symmetric(1e-9) {
        return invalid("symmetrization needs a channel symmetric in its two inputs");
    }
    let (a, b) = code.input_sizes();
    if a != b {
        return invalid("symmetrization needs equal input alphabets");
    }
    Ok(SymmetrizedCode { inner: code })
}

impl<C> SymmetrizedCode<C> {
    pub fn inner(&self) -> &C {
        &self.inner
    }
}

/// Splits a history into the odd-use and even-use subsequences as new
/// outputs arrive.
#[derive(Default)]
struct Split {
    seen: usize,
    odd: Vec<usize>,
    even: Vec<usize>,
}

impl Split {
    fn catch_up(&mut self, past: &[usize]) {
        for (t, &y) in past.iter().enumerate().skip(self.seen) {
            if t % 2 == 0 {
                self.odd.push(y);
            } else {
                self.even.push(y);
            }
        }
        self.seen = past.len();
    }
}

struct SymEncoder<'a> {
    first: Box<dyn SlotEncoder + 'a>,
    second: Box<dyn SlotEncoder + 'a>,
    split: Split,
}

impl SlotEncoder for SymEncoder<'_> {
    fn input(&mut self, past: &[usize]) -> usize {
        self.split.catch_up(past);
        if past.len() % 2 == 0 {
            self.first.input(&self.split.odd)
        } else {
            self.second.input(&self.split.even)
        }
    }
}

struct SymPredictor<'a> {
    first: Box<dyn OutputPredictor + 'a>,
    second: Box<dyn OutputPredictor + 'a>,
    split: Split,
}

impl OutputPredictor for SymPredictor<'_> {
    fn next_output_law(&mut self, past: &[usize]) -> Vec<f64> {
        self.split.catch_up(past);
        if past.len() % 2 == 0 {
            self.first.next_output_law(&self.split.odd)
        } else {
            self.second.next_output_law(&self.split.even)
        }
    }
}

impl<C: FeedbackCode> FeedbackCode for SymmetrizedCode<C> {
    fn name(&self) -> String {
        format!("symmetrized({})", self.inner.name())
    }

    fn block_len(&self) -> usize {
        2 * self.inner.block_len()
    }

    fn message_bits(&self) -> usize {
        2 * self.inner.message_bits()
    }

    fn input_sizes(&self) -> (usize, usize) {
        self.inner.input_sizes()
    }

    fn output_size(&self) -> usize {
        self.inner.output_size()
    }

    fn encoder(&self, role: Role, msg: &[bool]) -> Box<dyn SlotEncoder + '_> {
        let (hat, tilde) = msg.split_at(self.inner.message_bits());
        Box::new(SymEncoder {
            first: self.inner.encoder(role, hat),
            second: self.inner.encoder(role.swap(), tilde),
            split: Split::default(),
        })
    }

    fn decode(&self, outputs: &[usize]) -> (Message, Message) {
        let odd: Vec<usize> = outputs.iter().step_by(2).copied().collect();
        let even: Vec<usize> = outputs.iter().skip(1).step_by(2).copied().collect();
        let (mut m1, mut m2) = self.inner.decode(&odd);
        // Roles are swapped on even uses: the inner "first" message is M2''.
        let (t2, t1) = self.inner.decode(&even);
        m1.extend(t1);
        m2.extend(t2);
        (m1, m2)
    }

    fn predictor<'a>(&'a self, ch: &'a MacChannel, role: Role, msg: &[bool]) -> Result<Box<dyn OutputPredictor + 'a>> {
        let (hat, tilde) = msg.split_at(self.inner.message_bits());
        Ok(Box::new(SymPredictor {
            first: self.inner.predictor(ch, role, hat)?,
            second: self.inner.predictor(ch, role.swap(), tilde)?,
            split: Split::default(),
        }))
    }

    fn slot_conditional_entropy(&self, ch: &MacChannel, role: Role, t: usize) -> Result<f64> {
        if t % 2 == 0 {
            self.inner.slot_conditional_entropy(ch, role, t / 2)
        } else {
            self.inner.slot_conditional_entropy(ch, role.swap(), t / 2)
        }
    }

    fn output_entropy(&self, ch: &MacChannel) -> Result<f64> {
        Ok(2.0 * self.inner.output_entropy(ch)?)
    }
}

/// Exact per-slot conditional output entropies seen from each terminal.
#[derive(Debug, Clone, Serialize)]
pub struct EntropySymmetry {
    /// `H(Y_t | M1, Y^{t-1})` for each channel use.
    pub given_m1: Vec<f64>,
    /// `H(Y_t | M2, Y^{t-1})` for each channel use.
    pub given_m2: Vec<f64>,
    /// Largest mismatch between the two sides summed over slot pairs.
    pub max_pair_gap: f64,
}

/// Computes the per-slot entropies from the exact law of `code`; only
/// feasible for tiny codes.
pub fn check_entropy_symmetry<C: FeedbackCode + ?Sized>(code: &C, ch: &MacChannel) -> Result<EntropySymmetry> {
    let law = code_law(code, ch)?;
    let n = code.block_len();
    let side = |m: usize| -> Vec<f64> {
        let mut v = vec![m];
        let mut prev = entropy_of(&law.marginal_table(&v));
        (0..n)
            .map(|t| {
                v.push(2 + t);
                let h = entropy_of(&law.marginal_table(&v));
                let d = h - prev;
                prev = h;
                d.max(0.0)
            })
            .collect()
    };
    let given_m1 = side(0);
    let given_m2 = side(1);
    let max_pair_gap = (0..n / 2)
        .map(|i| {
            let a = given_m1[2 * i] + given_m1[2 * i + 1];
            let b = given_m2[2 * i] + given_m2[2 * i + 1];
            (a - b).abs()
        })
        .fold(0.0, f64::max);
    Ok(EntropySymmetry {
        given_m1,
        given_m2,
        max_pair_gap,
    })
}
