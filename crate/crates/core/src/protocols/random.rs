//! Random communication-transmission protocols for property batteries.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;

use super::ct::{CtMessage, CtProtocol, CtSpec, Restriction, Rule, SkTrace};
use crate::error::Result;
use crate::info::{FiniteDist, MacChannel};

fn random_dist<R: Rng + ?Sized>(k: usize, rng: &mut R) -> FiniteDist {
    let raw: Vec<f64> = (0..k).map(|_| -rng.gen::<f64>().max(1e-12).ln()).collect();
    let s: f64 = raw.iter().sum();
    FiniteDist::new(raw.into_iter().map(|v| v / s).collect()).expect("normalized")
}

fn table<R: Rng + ?Sized>(size: usize, range: usize, rng: &mut R) -> Rule {
    Rule::Table((0..size).map(|_| rng.gen_range(0..range)).collect())
}

/// Random protocol on `ch` with `n` slots under `restriction`.
///
/// Randomization alphabets are 2 or 3 for terminals 1 and 2 and 1 or 2 for
/// terminal 3, with random laws. Messages are binary or ternary from random
/// tables. The slot-1 round is empty for SE and NIC protocols, so `F_1` is
/// constant. Terminal 1's key `K_1(U_1, F)` is a random table and is the
/// key; terminals 2 and 3 estimate it by maximum a posteriori decoding
/// from their views under the exact law, ties to the lowest value.
pub fn random_ct_protocol<R: Rng + ?Sized>(
    ch: &MacChannel,
    n: usize,
    restriction: Restriction,
    rng: &mut R,
) -> Result<CtProtocol> {
    let out = ch.out();
    let randomness = [
        random_dist(rng.gen_range(2..=3), rng),
        random_dist(rng.gen_range(2..=3), rng),
        random_dist(rng.gen_range(1..=2), rng),
    ];
    let u_size = |i: usize| randomness[i].alphabet_size();
    let mut messages = Vec::with_capacity(n + 1);
    let mut prior = 1usize;
    let mut slot_prior = Vec::with_capacity(n + 1);
    for t in 0..=n {
        let senders: Vec<usize> = match (t, restriction) {
            (0, Restriction::Se | Restriction::Nic) => vec![],
            (t, Restriction::Se) if t < n => vec![],
            (t, Restriction::Nic) if t < n => (0..rng.gen_range(0..=1)).map(|_| 2).collect(),
            _ => (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..3)).collect(),
        };
        let mut slot = Vec::new();
        for sender in senders {
            let alphabet = rng.gen_range(2..=3);
            let x3_space = if sender == 2 { out.pow(t as u32) } else { 1 };
            let rule = table(u_size(sender) * x3_space * prior, alphabet, rng);
            slot.push(CtMessage { sender, alphabet, rule });
            prior *= alphabet;
        }
        messages.push(slot);
        slot_prior.push(prior);
    }
    let inputs = (0..n)
        .map(|t| [table(u_size(0) * slot_prior[t], ch.in1(), rng), table(u_size(1) * slot_prior[t], ch.in2(), rng)])
        .collect();
    let key_alphabet = rng.gen_range(2..=4);
    let k1 = table(u_size(0) * prior, key_alphabet, rng);
    let spec = CtSpec {
        n,
        channel_alphabets: (ch.in1(), ch.in2(), out),
        randomness,
        messages,
        inputs,
        keys: [k1, Rule::constant(0), Rule::constant(0)],
        key_source: 0,
        key_alphabet,
        restriction,
    };
    let draft = CtProtocol::new(spec.clone())?;
    let outcomes = draft.enumerate(ch)?;
    let mut keys = spec.keys.clone();
    keys[1] = map_estimate(&outcomes, |t| (t.u[1], Vec::new(), t.f.clone()));
    keys[2] = map_estimate(&outcomes, |t| (t.u[2], t.x3.clone(), t.f.clone()));
    CtProtocol::new(CtSpec { keys, ..spec })
}

type ViewKey = (usize, Vec<usize>, Vec<usize>);

fn map_estimate(outcomes: &[(SkTrace, f64)], view: impl Fn(&SkTrace) -> ViewKey) -> Rule {
    let mut mass: HashMap<ViewKey, Vec<f64>> = HashMap::new();
    for (t, p) in outcomes {
        let e = mass.entry(view(t)).or_insert_with(|| vec![0.0; t.key_alphabet]);
        e[t.key] += p;
    }
    let guess: HashMap<ViewKey, usize> = mass
        .into_iter()
        .map(|(v, m)| {
            let best = (0..m.len()).fold(0, |b, k| if m[k] > m[b] { k } else { b });
            (v, best)
        })
        .collect();
    let guess = Arc::new(guess);
    Rule::func(move |v| {
        guess
            .get(&(v.u, v.x3.to_vec(), v.f.to_vec()))
            .copied()
            .unwrap_or(0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::key_metrics_exact;
    use crate::seed;

    #[test]
    fn generated_protocols_respect_restrictions() {
        let ch = MacChannel::adder();
        for (i, r) in [Restriction::General, Restriction::Se, Restriction::Nic].into_iter().enumerate() {
            for s in 0..20 {
                let mut rng = seed::rng(seed::derive(i as u64, seed::stream::PROTOCOL, s));
                let p = random_ct_protocol(&ch, 1 + (s as usize % 3), r, &mut rng).unwrap();
                assert_eq!(p.restriction(), r);
                let outcomes = p.enumerate(&ch).unwrap();
                let m = key_metrics_exact(&outcomes, p.n());
                assert!(m.agreement > 0.0 && m.agreement <= 1.0 + 1e-12);
                if r != Restriction::General {
                    assert!(outcomes.iter().all(|(t, _)| t.f1_len == 0));
                }
            }
        }
    }
}
