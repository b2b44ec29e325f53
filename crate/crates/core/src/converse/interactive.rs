use rand::Rng;
use serde::Serialize;

use super::partition::{full_mask, members, FractionalPartition};
use crate::error::{invalid, Error, Result};
use crate::info::{EntropyOracle, FiniteDist, JointDist, SparseLaw};

/// Observation tuples enumerated by the exact checkers are capped at this.
pub const MAX_OBSERVATION_TUPLES: usize = 1 << 20;

/// One message of an interactive protocol.
///
/// `table` is indexed by `own_obs * P + prior`, where `prior` is the
/// mixed-radix value of all earlier messages (earliest most significant) and
/// `P` the product of their alphabet sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MessageSpec {
    pub sender: usize,
    pub alphabet: usize,
    pub table: Vec<usize>,
}

/// Public discussion among `m` terminals where each message depends only on
/// the sender's observation and strictly earlier messages.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteractiveProtocol {
    obs: Vec<usize>,
    rounds: usize,
    messages: Vec<MessageSpec>,
}

impl InteractiveProtocol {
    /// `obs[i]` is terminal `i`'s observation alphabet size.
    pub fn new(obs: Vec<usize>, rounds: usize, messages: Vec<MessageSpec>) -> Result<Self> {
        if obs.len() < 2 || obs.iter().any(|&a| a == 0) {
            return invalid("need at least two terminals with nonempty observation alphabets");
        }
        let mut prior: usize = 1;
        for (idx, msg) in messages.iter().enumerate() {
            if msg.sender >= obs.len() {
                return invalid(format!("message {idx} has sender {} outside 1..={}", msg.sender + 1, obs.len()));
            }
            if msg.alphabet == 0 {
                return invalid(format!("message {idx} has an empty alphabet"));
            }
            let want = obs[msg.sender]
                .checked_mul(prior)
                .filter(|&w| w <= MAX_OBSERVATION_TUPLES)
                .ok_or_else(|| Error::InvalidArgument(format!("message {idx} table is too large")))?;
            if msg.table.len() != want {
                return Err(Error::ShapeMismatch(format!(
                    "message {idx} table has {} entries, expected {want}",
                    msg.table.len()
                )));
            }
            if let Some(&bad) = msg.table.iter().find(|&&v| v >= msg.alphabet) {
                return invalid(format!("message {idx} emits {bad} outside alphabet {}", msg.alphabet));
            }
            prior = prior
                .checked_mul(msg.alphabet)
                .filter(|&p| p <= MAX_OBSERVATION_TUPLES)
                .ok_or_else(|| Error::InvalidArgument("transcript space is too large".into()))?;
        }
        Ok(InteractiveProtocol { obs, rounds, messages })
    }

    pub fn terminals(&self) -> usize {
        self.obs.len()
    }

    pub fn observation_alphabets(&self) -> &[usize] {
        &self.obs
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn messages(&self) -> &[MessageSpec] {
        &self.messages
    }

    /// Messages sent for one observation tuple.
    pub fn run(&self, obs: &[usize]) -> Vec<usize> {
        let mut sent = Vec::with_capacity(self.messages.len());
        let mut prior = 0usize;
        let mut radix = 1usize;
        for msg in &self.messages {
            let v = msg.table[obs[msg.sender] * radix + prior];
            sent.push(v);
            prior = prior * msg.alphabet + v;
            radix *= msg.alphabet;
        }
        sent
    }

    fn code(&self, obs: &[usize]) -> u64 {
        self.run(obs)
            .iter()
            .zip(&self.messages)
            .fold(0u64, |acc, (&v, m)| acc * m.alphabet as u64 + v as u64)
    }
}

/// A transcript that is an arbitrary function of all observations at once.
/// Not a valid interactive protocol; used as a negative control.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenieTranscript {
    obs: Vec<usize>,
    // Indexed by the row-major observation tuple.
    table: Vec<u64>,
}

impl GenieTranscript {
    pub fn new(obs: Vec<usize>, f: impl Fn(&[usize]) -> u64) -> Result<Self> {
        let tuples = tuple_count(&obs)?;
        let table = (0..tuples).map(|i| f(&decode_tuple(&obs, i))).collect();
        Ok(GenieTranscript { obs, table })
    }

    /// `F = Y1 xor Y2` on two binary observations.
    pub fn xor_pair() -> Self {
        GenieTranscript::new(vec![2, 2], |y| (y[0] ^ y[1]) as u64).expect("small")
    }
}

fn tuple_count(obs: &[usize]) -> Result<usize> {
    let mut n: usize = 1;
    for &a in obs {
        n = n.checked_mul(a).filter(|&n| n <= MAX_OBSERVATION_TUPLES).ok_or(Error::BudgetExceeded {
            needed: obs.iter().map(|&a| a as u128).product(),
            budget: MAX_OBSERVATION_TUPLES,
        })?;
    }
    Ok(n)
}

fn decode_tuple(obs: &[usize], mut idx: usize) -> Vec<usize> {
    let mut y = vec![0; obs.len()];
    for i in (0..obs.len()).rev() {
        y[i] = idx % obs[i];
        idx /= obs[i];
    }
    y
}

/// Law of `(Y_1, .., Y_m, F)` from a law of the observations (one variable
/// per terminal) and a transcript map.
fn transcript_law_with(law: &JointDist, obs: &[usize], f: impl Fn(usize, &[usize]) -> u64) -> Result<SparseLaw> {
    if law.arity() != obs {
        return Err(Error::ShapeMismatch(format!(
            "observation alphabets {:?} do not match law arity {:?}",
            obs,
            law.arity()
        )));
    }
    tuple_count(obs)?;
    let outcomes = law
        .table()
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(i, &p)| {
            let y = decode_tuple(obs, i);
            let mut labels: Vec<u64> = y.iter().map(|&v| v as u64).collect();
            labels.push(f(i, &y));
            (labels, p)
        })
        .collect();
    SparseLaw::new(outcomes)
}

pub fn transcript_law(proto: &InteractiveProtocol, law: &JointDist) -> Result<SparseLaw> {
    transcript_law_with(law, &proto.obs, |_, y| proto.code(y))
}

pub fn genie_law(genie: &GenieTranscript, law: &JointDist) -> Result<SparseLaw> {
    transcript_law_with(law, &genie.obs, |i, _| genie.table[i])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    /// `H(F)`
    pub lhs: f64,
    /// `sum_B lambda_B H(F | Y_{B^c})`
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates `H(F) >= sum_B lambda_B H(F | Y_{B^c})` on a law whose last
/// variable is `F` and whose first `m` variables are the observations.
pub fn inequality_on(tlaw: &SparseLaw, lam: &FractionalPartition) -> Result<InequalityCheck> {
    let m = lam.m();
    if tlaw.num_vars() != m + 1 {
        return Err(Error::ShapeMismatch("weights do not match the terminal count".into()));
    }
    let full = full_mask(m);
    let lhs = tlaw.joint_entropy(&[m]);
    let rhs = lam
        .support()
        .into_iter()
        .map(|(b, l)| l * tlaw.cond_entropy(&[m], &members(full & !b)))
        .sum();
    Ok(InequalityCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-9,
    })
}

pub fn check_interactive_inequality(
    proto: &InteractiveProtocol,
    law: &JointDist,
    lam: &FractionalPartition,
) -> Result<InequalityCheck> {
    inequality_on(&transcript_law(proto, law)?, lam)
}

pub fn check_genie_inequality(genie: &GenieTranscript, law: &JointDist, lam: &FractionalPartition) -> Result<InequalityCheck> {
    inequality_on(&genie_law(genie, law)?, lam)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorizationCheck {
    /// Largest `D(P_{Y|f} || prod_i P_{Y_i|f})` over transcripts `f`.
    pub max_gap: f64,
    /// Transcript code attaining it.
    pub worst_transcript: Option<u64>,
}

fn require_product(law: &JointDist) -> Result<()> {
    let groups: Vec<Vec<usize>> = (0..law.num_vars()).map(|v| vec![v]).collect();
    let gap = SparseLaw::from_dense(law).product_gap(&groups);
    if gap > 1e-9 {
        return Err(Error::NotProduct(gap));
    }
    Ok(())
}

/// Conditional divergence from product form, per transcript value.
pub fn factorization_on(tlaw: &SparseLaw, m: usize) -> FactorizationCheck {
    let mut by_f: std::collections::BTreeMap<u64, Vec<(Vec<u64>, f64)>> = Default::default();
    for (l, p) in tlaw.outcomes() {
        by_f.entry(l[m]).or_default().push((l.clone(), *p));
    }
    let mut best = FactorizationCheck {
        max_gap: 0.0,
        worst_transcript: None,
    };
    for (f, group) in by_f {
        let cond = SparseLaw::new({
            let mass: f64 = group.iter().map(|(_, p)| p).sum();
            group.into_iter().map(|(l, p)| (l, p / mass)).collect()
        })
        .expect("conditional of a valid law");
        let all: Vec<usize> = (0..m).collect();
        let gap = (0..m).map(|i| cond.joint_entropy(&[i])).sum::<f64>() - cond.joint_entropy(&all);
        let gap = if gap < 1e-12 { 0.0 } else { gap };
        if best.worst_transcript.is_none() || gap > best.max_gap {
            best = FactorizationCheck {
                max_gap: gap,
                worst_transcript: Some(f),
            };
        }
    }
    best
}

/// Independent observations stay independent given the transcript.
pub fn check_factorization(proto: &InteractiveProtocol, law: &JointDist) -> Result<FactorizationCheck> {
    require_product(law)?;
    Ok(factorization_on(&transcript_law(proto, law)?, proto.terminals()))
}

pub fn check_genie_factorization(genie: &GenieTranscript, law: &JointDist) -> Result<FactorizationCheck> {
    require_product(law)?;
    Ok(factorization_on(&genie_law(genie, law)?, genie.obs.len()))
}

/// Random protocol: `rounds` passes over the terminals, each terminal
/// speaking with probability 3/4 per pass, message alphabets in
/// `1..=max_alphabet`, uniformly random tables.
pub fn random_protocol<R: Rng + ?Sized>(obs: &[usize], rounds: usize, max_alphabet: usize, rng: &mut R) -> InteractiveProtocol {
    let mut messages = Vec::new();
    let mut prior = 1usize;
    for _ in 0..rounds {
        for (sender, &a) in obs.iter().enumerate() {
            if rng.gen_bool(0.25) {
                continue;
            }
            let alphabet = rng.gen_range(1..=max_alphabet);
            let table = (0..a * prior).map(|_| rng.gen_range(0..alphabet)).collect();
            messages.push(MessageSpec { sender, alphabet, table });
            prior *= alphabet;
        }
    }
    InteractiveProtocol::new(obs.to_vec(), rounds, messages).expect("generated protocol is valid")
}

/// Random law on the observation alphabets; `product` selects independent
/// observations.
pub fn random_observation_law<R: Rng + ?Sized>(obs: &[usize], product: bool, rng: &mut R) -> JointDist {
    let draw = |k: usize, rng: &mut R| -> Vec<f64> {
        let raw: Vec<f64> = (0..k).map(|_| -rng.gen::<f64>().max(1e-12).ln()).collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / s).collect()
    };
    if product {
        let margs: Vec<FiniteDist> = obs.iter().map(|&k| FiniteDist::new(draw(k, rng)).expect("normalized")).collect();
        let refs: Vec<&FiniteDist> = margs.iter().collect();
        JointDist::independent(&refs).expect("small")
    } else {
        let size = obs.iter().product();
        JointDist::new(obs.to_vec(), draw(size, rng)).expect("small")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::converse::partition::{partition_to_fractional, random_fractional_partition, Partition};

    fn uniform_bits(m: usize) -> JointDist {
        JointDist::new(vec![2; m], vec![1.0 / (1 << m) as f64; 1 << m]).unwrap()
    }

    #[test]
    fn constant_communication() {
        let proto = InteractiveProtocol::new(vec![2, 2], 1, vec![]).unwrap();
        let lam = partition_to_fractional(&Partition::parse(2, "1|2").unwrap());
        let c = check_interactive_inequality(&proto, &uniform_bits(2), &lam).unwrap();
        assert_eq!((c.lhs, c.rhs, c.holds), (0.0, 0.0, true));
        assert_eq!(check_factorization(&proto, &uniform_bits(2)).unwrap().max_gap, 0.0);
    }

    #[test]
    fn xor_genie_is_the_counterexample() {
        let lam = partition_to_fractional(&Partition::parse(2, "1|2").unwrap());
        let c = check_genie_inequality(&GenieTranscript::xor_pair(), &uniform_bits(2), &lam).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-12 && (c.rhs - 2.0).abs() < 1e-12);
        assert!(!c.holds);
        let g = check_genie_factorization(&GenieTranscript::xor_pair(), &uniform_bits(2)).unwrap();
        assert!((g.max_gap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parity_then_reply_factorizes() {
        // Terminal 1 observes 2 bits and announces their parity; terminal 2
        // replies with its bit AND the parity.
        let obs = vec![4, 2];
        let parity: Vec<usize> = (0..4).map(|y: usize| y.count_ones() as usize % 2).collect();
        let reply: Vec<usize> = (0..2).flat_map(|y2| (0..2).map(move |p| y2 & p)).collect();
        let proto = InteractiveProtocol::new(
            obs.clone(),
            2,
            vec![
                MessageSpec { sender: 0, alphabet: 2, table: parity },
                MessageSpec { sender: 1, alphabet: 2, table: reply },
            ],
        )
        .unwrap();
        let law = JointDist::new(obs, vec![0.125; 8]).unwrap();
        assert!(check_factorization(&proto, &law).unwrap().max_gap <= 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad = InteractiveProtocol::new(
            vec![2, 2],
            1,
            vec![MessageSpec { sender: 0, alphabet: 2, table: vec![0, 2] }],
        );
        assert!(bad.is_err());
        let proto = InteractiveProtocol::new(vec![2, 2], 1, vec![]).unwrap();
        let corr = JointDist::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(matches!(check_factorization(&proto, &corr), Err(Error::NotProduct(_))));
        let three = JointDist::new(vec![3, 2], vec![1.0 / 6.0; 6]).unwrap();
        assert!(check_factorization(&proto, &three).is_err());
    }

    #[test]
    fn random_protocols_respect_both_lemmas() {
        let mut rng = crate::seed::rng(17);
        for _ in 0..50 {
            let obs: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=4)).collect();
            let proto = random_protocol(&obs, rng.gen_range(1..=3), 3, &mut rng);
            let law = random_observation_law(&obs, false, &mut rng);
            let lam = random_fractional_partition(3, &mut rng).unwrap();
            assert!(check_interactive_inequality(&proto, &law, &lam).unwrap().holds);
            let prod = random_observation_law(&obs, true, &mut rng);
            assert!(check_factorization(&proto, &prod).unwrap().max_gap <= 1e-9);
        }
    }
}
