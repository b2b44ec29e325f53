use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use super::ct::{run_protocol_trials, CtMessage, CtProtocol, CtSpec, Restriction, Rule};
use super::metrics::{key_metrics_exact, key_metrics_sampled, KeyMetrics};
use crate::error::{invalid, Error, Result};
use crate::info::{FiniteDist, MacChannel};
use crate::seed;

/// Largest message-pair count decoded by exhaustive search.
pub const MAX_DECODE_PAIRS: usize = 1 << 20;

/// Which MAC code carries the two messages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SeCode {
    /// Zero-error code for the binary adder channel, time-division
    /// otherwise.
    BuiltIn,
    /// User 1 sends raw symbols in odd slots while user 2 sends 0, and the
    /// other way around in even slots.
    Tdma,
    /// Random codebook of about `2^{n rate}` words per user with joint ML
    /// decoding.
    Random { rate: f64 },
}

/// Codebooks of equal size for the two users over `n` channel uses.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCode {
    pub n: usize,
    pub size: usize,
    pub c1: Vec<Vec<usize>>,
    pub c2: Vec<Vec<usize>>,
    pub name: String,
}

impl BlockCode {
    /// Uniquely decodable adder code: within each group of four slots user 1
    /// sends a word of `{00, 01, 10}` then of `{00, 11}` and user 2 the
    /// reverse, giving 6 messages per user per group. Leftover slots carry 0.
    pub fn adder_ud(n: usize) -> Result<Self> {
        let groups = n / 4;
        if groups == 0 {
            return invalid("the adder code needs at least four channel uses");
        }
        let size = 6usize.checked_pow(groups as u32).filter(|&s| s <= 1 << 16).ok_or_else(|| {
            Error::InvalidArgument(format!("adder code with n = {n} has too many messages"))
        })?;
        let three = [[0, 0], [0, 1], [1, 0]];
        let two = [[0, 0], [1, 1]];
        let word = |mut m: usize, first: bool| {
            let mut w = vec![0; n];
            for g in 0..groups {
                let d = m % 6;
                m /= 6;
                let (a, b) = (d / 2, d % 2);
                let (p, q) = if first { (three[a], two[b]) } else { (two[b], three[a]) };
                w[4 * g..4 * g + 2].copy_from_slice(&p);
                w[4 * g + 2..4 * g + 4].copy_from_slice(&q);
            }
            w
        };
        Ok(BlockCode {
            n,
            size,
            c1: (0..size).map(|m| word(m, true)).collect(),
            c2: (0..size).map(|m| word(m, false)).collect(),
            name: "adder-ud".into(),
        })
    }

    pub fn tdma(n: usize, in1: usize, in2: usize) -> Result<Self> {
        let half = n / 2;
        let q = in1.min(in2);
        if half == 0 || q < 2 {
            return invalid("time division needs n >= 2 and input alphabets of size >= 2");
        }
        let size = q.checked_pow(half as u32).filter(|&s| s <= 1 << 16).ok_or_else(|| {
            Error::InvalidArgument(format!("time-division code with n = {n} has too many messages"))
        })?;
        let word = |mut m: usize, offset: usize| {
            let mut w = vec![0; n];
            for s in 0..half {
                w[2 * s + offset] = m % q;
                m /= q;
            }
            w
        };
        Ok(BlockCode {
            n,
            size,
            c1: (0..size).map(|m| word(m, 0)).collect(),
            c2: (0..size).map(|m| word(m, 1)).collect(),
            name: "tdma".into(),
        })
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rate: f64, in1: usize, in2: usize, rng: &mut R) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return invalid(format!("rate must be a nonnegative number, got {rate}"));
        }
        let size = 2f64.powf(n as f64 * rate).round().max(1.0);
        if size * size > MAX_DECODE_PAIRS as f64 {
            return Err(Error::BudgetExceeded {
                needed: (size * size) as u128,
                budget: MAX_DECODE_PAIRS,
            });
        }
        let size = size as usize;
        let mut book = |q: usize| -> Vec<Vec<usize>> {
            (0..size).map(|_| (0..n).map(|_| rng.gen_range(0..q)).collect()).collect()
        };
        let c1 = book(in1);
        let c2 = book(in2);
        Ok(BlockCode {
            n,
            size,
            c1,
            c2,
            name: format!("random(rate={rate})"),
        })
    }

    pub fn rate_per_user(&self) -> f64 {
        (self.size as f64).log2() / self.n as f64
    }

    /// Joint maximum-likelihood decoding, ties to the lowest `(m1, m2)`.
    pub fn decode(&self, ch: &MacChannel, y: &[usize]) -> (usize, usize) {
        let mut best = (0, 0);
        let mut best_p = -1.0;
        for (i, a) in self.c1.iter().enumerate() {
            for (j, b) in self.c2.iter().enumerate() {
                let mut p = 1.0;
                for t in 0..self.n {
                    p *= ch.prob(y[t], a[t], b[t]);
                    if p <= best_p {
                        break;
                    }
                }
                if p > best_p {
                    best_p = p;
                    best = (i, j);
                }
            }
        }
        best
    }
}

/// Source-emulation key agreement: each input terminal sends a uniform
/// message over the MAC, the output terminal decodes both and publishes
/// their sum modulo the message count, and the key is user 1's message.
#[derive(Debug, Clone)]
pub struct SourceEmulation {
    pub code: Arc<BlockCode>,
    pub protocol: CtProtocol,
    pub channel: MacChannel,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeReport {
    pub code: String,
    pub n: usize,
    pub messages_per_user: usize,
    /// `log2(messages) / n`
    pub key_rate: f64,
    /// Public bits per channel use.
    pub comm_rate: f64,
    pub metrics: KeyMetrics,
}

pub fn source_emulation_sk(ch: &MacChannel, n: usize, code: SeCode, seed: u64) -> Result<SourceEmulation> {
    let block = match code {
        SeCode::BuiltIn if *ch == MacChannel::adder() => BlockCode::adder_ud(n)?,
        SeCode::BuiltIn | SeCode::Tdma => BlockCode::tdma(n, ch.in1(), ch.in2())?,
        SeCode::Random { rate } => {
            let mut rng = seed::rng(seed::derive(seed, seed::stream::CODEBOOK, 0));
            BlockCode::random(n, rate, ch.in1(), ch.in2(), &mut rng)?
        }
    };
    SourceEmulation::new(ch, block)
}

impl SourceEmulation {
    pub fn new(ch: &MacChannel, block: BlockCode) -> Result<Self> {
        let n = block.n;
        let m = block.size;
        let code = Arc::new(block);
        let chan = Arc::new(ch.clone());
        let inputs = (0..n)
            .map(|t| {
                [
                    Rule::Table(code.c1.iter().map(|w| w[t]).collect()),
                    Rule::Table(code.c2.iter().map(|w| w[t]).collect()),
                ]
            })
            .collect();
        let (c, w) = (code.clone(), chan.clone());
        let publish = Rule::func(move |v| {
            let (a, b) = c.decode(&w, v.x3);
            (a + b) % c.size
        });
        let (c, w) = (code.clone(), chan.clone());
        let k3 = Rule::func(move |v| c.decode(&w, v.x3).0);
        let mut messages = vec![Vec::new(); n + 1];
        messages[n].push(CtMessage {
            sender: 2,
            alphabet: m,
            rule: publish,
        });
        let protocol = CtProtocol::new(CtSpec {
            n,
            channel_alphabets: (ch.in1(), ch.in2(), ch.out()),
            randomness: [FiniteDist::uniform(m), FiniteDist::uniform(m), FiniteDist::point(1, 0)],
            messages,
            inputs,
            keys: [
                Rule::func(|v| v.u),
                Rule::func(move |v| (v.f[0] + m - v.u) % m),
                k3,
            ],
            key_source: 0,
            key_alphabet: m,
            restriction: Restriction::Se,
        })?;
        Ok(SourceEmulation {
            code,
            protocol,
            channel: ch.clone(),
        })
    }

    fn report(&self, metrics: KeyMetrics) -> SeReport {
        SeReport {
            code: self.code.name.clone(),
            n: self.code.n,
            messages_per_user: self.code.size,
            key_rate: self.code.rate_per_user(),
            comm_rate: (self.code.size as f64).log2() / self.code.n as f64,
            metrics,
        }
    }

    /// Metrics from the enumerated law of all executions.
    pub fn exact(&self) -> Result<SeReport> {
        let outcomes = self.protocol.enumerate(&self.channel)?;
        Ok(self.report(key_metrics_exact(&outcomes, self.code.n)))
    }

    pub fn sampled(&self, trials: u64, seed: u64) -> Result<SeReport> {
        let traces = run_protocol_trials(&self.protocol, &self.channel, trials, seed)?;
        Ok(self.report(key_metrics_sampled(&traces, self.code.n)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adder_code_is_uniquely_decodable() {
        let code = BlockCode::adder_ud(8).unwrap();
        assert_eq!(code.size, 36);
        let ch = MacChannel::adder();
        let mut seen = std::collections::HashSet::new();
        for a in &code.c1 {
            for b in &code.c2 {
                let y: Vec<usize> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                assert!(seen.insert(y));
            }
        }
        let y: Vec<usize> = code.c1[17].iter().zip(&code.c2[5]).map(|(x, y)| x + y).collect();
        assert_eq!(code.decode(&ch, &y), (17, 5));
    }

    #[test]
    fn adder_scheme_is_perfectly_secret() {
        let se = source_emulation_sk(&MacChannel::adder(), 8, SeCode::BuiltIn, 0).unwrap();
        let r = se.exact().unwrap();
        assert_eq!(r.metrics.s_in, 0.0);
        assert!(r.metrics.agreement >= 0.99);
        assert!((r.key_rate - 6f64.log2() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn xor_time_division() {
        let se = source_emulation_sk(&MacChannel::xor(), 8, SeCode::BuiltIn, 0).unwrap();
        let r = se.exact().unwrap();
        assert_eq!(r.metrics.agreement, 1.0);
        assert_eq!(r.metrics.s_in, 0.0);
        assert_eq!(r.key_rate, 0.5);
    }

    #[test]
    fn rate_above_half_sum_keeps_failing() {
        let ch = MacChannel::adder();
        for n in [4, 8] {
            let se = source_emulation_sk(&ch, n, SeCode::Random { rate: 0.9 }, 3).unwrap();
            let r = se.sampled(300, 4).unwrap();
            assert!(r.metrics.agreement < 0.7, "n={n}: {:?}", r.metrics);
        }
    }
}
