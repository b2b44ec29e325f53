use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::converse::{KeyLayout, TerminalLayout};
use crate::error::{invalid, Error, Result};
use crate::info::{FiniteDist, MacChannel, SparseLaw};
use crate::rates::{NicLayout, SeLayout};
use crate::seed;

/// Largest number of weighted outcomes produced by exact enumeration.
pub const MAX_EXACT_OUTCOMES: usize = 1 << 22;

/// Communication pattern allowed after the first slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Restriction {
    General,
    /// Only the output terminal speaks in slots `2..=n`.
    Nic,
    /// Nobody speaks in slots `2..=n`.
    Se,
}

/// What a terminal can see when it computes a message, input or key.
///
/// Terminals 1 and 2 (indices 0 and 1) see their randomness and the public
/// messages so far. Terminal 3 (index 2) also sees the channel outputs so
/// far.
#[derive(Debug, Clone, Copy)]
pub struct View<'a> {
    pub terminal: usize,
    pub u: usize,
    pub x3: &'a [usize],
    pub f: &'a [usize],
}

pub type RuleFn = Arc<dyn Fn(&View) -> usize + Send + Sync>;

/// A deterministic map from a view to a symbol.
///
/// Tables are indexed by `(u * X + x3) * P + f`, where `x3` and `f` are
/// mixed-radix codes of the visible outputs and messages (earliest most
/// significant), `X` is the number of possible output strings and `P` the
/// number of possible message strings.
#[derive(Clone)]
pub enum Rule {
    Table(Vec<usize>),
    Func(RuleFn),
}

impl Rule {
    pub fn func(f: impl Fn(&View) -> usize + Send + Sync + 'static) -> Rule {
        Rule::Func(Arc::new(f))
    }

    pub fn constant(v: usize) -> Rule {
        Rule::func(move |_| v)
    }

    fn is_constant(&self) -> bool {
        match self {
            Rule::Table(t) => t.windows(2).all(|w| w[0] == w[1]),
            Rule::Func(_) => false,
        }
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Table(t) => write!(f, "Table({} entries)", t.len()),
            Rule::Func(_) => write!(f, "Func"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CtMessage {
    /// 0-based terminal index.
    pub sender: usize,
    pub alphabet: usize,
    pub rule: Rule,
}

/// Full description of a communication-transmission protocol.
#[derive(Debug, Clone)]
pub struct CtSpec {
    pub n: usize,
    /// `(|X1|, |X2|, |X3|)`
    pub channel_alphabets: (usize, usize, usize),
    pub randomness: [FiniteDist; 3],
    /// Messages of slots `1..=n+1`, in speaking order within each slot.
    pub messages: Vec<Vec<CtMessage>>,
    /// Input maps `X_{1t}(F^t, U_1)`, `X_{2t}(F^t, U_2)` for `t = 1..=n`.
    pub inputs: Vec<[Rule; 2]>,
    /// Key estimates `K_1, K_2, K_3`.
    pub keys: [Rule; 3],
    /// Terminal whose estimate is taken as the key `K`.
    pub key_source: usize,
    pub key_alphabet: usize,
    pub restriction: Restriction,
}

#[derive(Debug, Clone)]
pub struct CtProtocol {
    spec: CtSpec,
    // Product of message alphabets before global message j (length = count + 1).
    prefix_space: Vec<u128>,
    slot_end: Vec<usize>,
}

/// One execution of a protocol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SkTrace {
    pub u: [usize; 3],
    pub x1: Vec<usize>,
    pub x2: Vec<usize>,
    pub x3: Vec<usize>,
    /// Every public message in order.
    pub f: Vec<usize>,
    /// Number of messages sent in slot 1.
    pub f1_len: usize,
    pub keys: [usize; 3],
    pub key: usize,
    pub key_alphabet: usize,
}

fn mixed_code(digits: &[usize], radix: usize) -> u128 {
    digits.iter().fold(0u128, |acc, &d| acc.saturating_mul(radix as u128).saturating_add(d as u128))
}

impl CtProtocol {
    pub fn new(spec: CtSpec) -> Result<Self> {
        let n = spec.n;
        if n == 0 {
            return invalid("a protocol needs at least one transmission slot");
        }
        let (in1, in2, out) = spec.channel_alphabets;
        if in1 == 0 || in2 == 0 || out == 0 || spec.key_alphabet == 0 {
            return invalid("alphabets must be nonempty");
        }
        if spec.messages.len() != n + 1 {
            return Err(Error::ShapeMismatch(format!(
                "expected messages for {} slots, got {}",
                n + 1,
                spec.messages.len()
            )));
        }
        if spec.inputs.len() != n {
            return Err(Error::ShapeMismatch(format!("expected input maps for {n} slots, got {}", spec.inputs.len())));
        }
        if spec.key_source > 2 {
            return invalid("key source must be terminal 1, 2 or 3");
        }
        let mut prefix_space = vec![1u128];
        let mut slot_end = Vec::with_capacity(n + 1);
        for slot in &spec.messages {
            for m in slot {
                let last = *prefix_space.last().unwrap();
                prefix_space.push(last.saturating_mul(m.alphabet as u128));
            }
            slot_end.push(prefix_space.len() - 1);
        }
        let p = CtProtocol {
            spec,
            prefix_space,
            slot_end,
        };
        p.validate()?;
        Ok(p)
    }

    fn u_size(&self, terminal: usize) -> u128 {
        self.spec.randomness[terminal].alphabet_size() as u128
    }

    fn check_rule(&self, rule: &Rule, size: u128, range: usize, what: &str) -> Result<()> {
        if let Rule::Table(t) = rule {
            if t.len() as u128 != size {
                return Err(Error::ShapeMismatch(format!("{what}: table has {} entries, expected {size}", t.len())));
            }
            if let Some(&bad) = t.iter().find(|&&v| v >= range) {
                return invalid(format!("{what}: value {bad} outside alphabet of size {range}"));
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let s = &self.spec;
        let (in1, in2, out) = s.channel_alphabets;
        let out = out as u128;
        let mut j = 0;
        for (t, slot) in s.messages.iter().enumerate() {
            let inner = t >= 1 && t < s.n;
            for m in slot {
                if m.sender > 2 {
                    return invalid(format!("slot {} message from terminal {}", t + 1, m.sender + 1));
                }
                if m.alphabet == 0 {
                    return invalid(format!("slot {} has a message with an empty alphabet", t + 1));
                }
                if inner && s.restriction == Restriction::Se && m.alphabet > 1 && !m.rule.is_constant() {
                    return Err(Error::Restriction(format!(
                        "source emulation forbids communication in slot {}",
                        t + 1
                    )));
                }
                if inner && s.restriction == Restriction::Nic && m.sender != 2 {
                    return Err(Error::Restriction(format!(
                        "no-input-communication protocol has terminal {} speaking in slot {}",
                        m.sender + 1,
                        t + 1
                    )));
                }
                let x3_space = if m.sender == 2 { out.saturating_pow(t as u32) } else { 1 };
                let size = self.u_size(m.sender).saturating_mul(x3_space).saturating_mul(self.prefix_space[j]);
                self.check_rule(&m.rule, size, m.alphabet, &format!("slot {} message {}", t + 1, j))?;
                j += 1;
            }
        }
        for (t, maps) in s.inputs.iter().enumerate() {
            let space = self.prefix_space[self.slot_end[t]];
            for (i, (rule, range)) in maps.iter().zip([in1, in2]).enumerate() {
                let size = self.u_size(i).saturating_mul(space);
                self.check_rule(rule, size, range, &format!("input map of terminal {} slot {}", i + 1, t + 1))?;
            }
        }
        let all = *self.prefix_space.last().unwrap();
        for (i, rule) in s.keys.iter().enumerate() {
            let x3_space = if i == 2 { out.saturating_pow(s.n as u32) } else { 1 };
            let size = self.u_size(i).saturating_mul(x3_space).saturating_mul(all);
            self.check_rule(rule, size, s.key_alphabet, &format!("key map of terminal {}", i + 1))?;
        }
        Ok(())
    }

    pub fn spec(&self) -> &CtSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    /// Public communication in bits, `sum log2 |alphabet|` over messages.
    pub fn comm_bits(&self) -> f64 {
        self.spec.messages.iter().flatten().map(|m| (m.alphabet as f64).log2()).sum()
    }

    pub fn restriction(&self) -> Restriction {
        self.spec.restriction
    }

    fn eval(&self, rule: &Rule, view: &View, range: usize, x3_radix: usize, what: &str) -> Result<usize> {
        let v = match rule {
            Rule::Table(t) => {
                let x3_space = (x3_radix as u128).saturating_pow(view.x3.len() as u32);
                let f_space = self.prefix_space[view.f.len()];
                let f_code = self.f_code(view.f);
                let idx = ((view.u as u128 * x3_space + mixed_code(view.x3, x3_radix)) * f_space + f_code) as usize;
                t[idx]
            }
            Rule::Func(f) => f(view),
        };
        if v >= range {
            return Err(Error::Internal(format!("{what} produced {v}, alphabet has {range} symbols")));
        }
        Ok(v)
    }

    fn f_code(&self, f: &[usize]) -> u128 {
        let mut code = 0u128;
        let mut j = 0;
        for slot in &self.spec.messages {
            for m in slot {
                if j == f.len() {
                    return code;
                }
                code = code * m.alphabet as u128 + f[j] as u128;
                j += 1;
            }
        }
        code
    }

    fn send_slot(&self, t: usize, st: &mut State) -> Result<()> {
        let out = self.spec.channel_alphabets.2;
        for m in &self.spec.messages[t] {
            let x3: &[usize] = if m.sender == 2 { &st.x3 } else { &[] };
            let view = View {
                terminal: m.sender,
                u: st.u[m.sender],
                x3,
                f: &st.f,
            };
            let v = self.eval(&m.rule, &view, m.alphabet, out, "message")?;
            st.f.push(v);
        }
        Ok(())
    }

    fn finish(&self, st: &State) -> Result<SkTrace> {
        let s = &self.spec;
        let mut keys = [0; 3];
        for (i, rule) in s.keys.iter().enumerate() {
            let x3: &[usize] = if i == 2 { &st.x3 } else { &[] };
            let view = View {
                terminal: i,
                u: st.u[i],
                x3,
                f: &st.f,
            };
            keys[i] = self.eval(rule, &view, s.key_alphabet, s.channel_alphabets.2, "key map")?;
        }
        Ok(SkTrace {
            u: st.u,
            x1: st.x1.clone(),
            x2: st.x2.clone(),
            x3: st.x3.clone(),
            f: st.f.clone(),
            f1_len: self.slot_end[0],
            keys,
            key: keys[s.key_source],
            key_alphabet: s.key_alphabet,
        })
    }

    /// Slots `t..`, branching on channel outputs through `branch`.
    fn walk(
        &self,
        ch: &MacChannel,
        st: &mut State,
        t: usize,
        w: f64,
        branch: &mut dyn FnMut(&[f64]) -> Vec<(usize, f64)>,
        emit: &mut dyn FnMut(SkTrace, f64) -> Result<()>,
    ) -> Result<()> {
        let mark = st.f.len();
        self.send_slot(t, st)?;
        if t == self.spec.n {
            let trace = self.finish(st)?;
            st.f.truncate(mark);
            return emit(trace, w);
        }
        let (in1, in2, _) = self.spec.channel_alphabets;
        let mut xs = [0; 2];
        for (i, range) in [in1, in2].into_iter().enumerate() {
            let view = View {
                terminal: i,
                u: st.u[i],
                x3: &[],
                f: &st.f,
            };
            xs[i] = self.eval(&self.spec.inputs[t][i], &view, range, 1, "input map")?;
        }
        st.x1.push(xs[0]);
        st.x2.push(xs[1]);
        for (y, p) in branch(ch.row(xs[0], xs[1])) {
            st.x3.push(y);
            self.walk(ch, st, t + 1, w * p, branch, emit)?;
            st.x3.pop();
        }
        st.x1.pop();
        st.x2.pop();
        st.f.truncate(mark);
        Ok(())
    }

    fn check_channel(&self, ch: &MacChannel) -> Result<()> {
        if (ch.in1(), ch.in2(), ch.out()) != self.spec.channel_alphabets {
            return Err(Error::ShapeMismatch(format!(
                "protocol alphabets {:?} do not match channel ({}, {}, {})",
                self.spec.channel_alphabets,
                ch.in1(),
                ch.in2(),
                ch.out()
            )));
        }
        Ok(())
    }

    /// Simulates one execution; deterministic given `seed`.
    pub fn run<R: Rng>(&self, ch: &MacChannel, rng: &mut R) -> Result<SkTrace> {
        self.check_channel(ch)?;
        let mut u = [0; 3];
        for (i, d) in self.spec.randomness.iter().enumerate() {
            u[i] = sample_index(d.probs(), rng);
        }
        let mut st = State::new(u);
        let mut out = None;
        let mut branch = |row: &[f64]| vec![(sample_index(row, rng), 1.0)];
        self.walk(ch, &mut st, 0, 1.0, &mut branch, &mut |t, _| {
            out = Some(t);
            Ok(())
        })?;
        out.ok_or_else(|| Error::Internal("execution produced no trace".into()))
    }

    /// Every execution with positive probability and its probability.
    pub fn enumerate(&self, ch: &MacChannel) -> Result<Vec<(SkTrace, f64)>> {
        self.check_channel(ch)?;
        let mut outcomes = Vec::new();
        let r = &self.spec.randomness;
        for (u1, &p1) in r[0].probs().iter().enumerate() {
            for (u2, &p2) in r[1].probs().iter().enumerate() {
                for (u3, &p3) in r[2].probs().iter().enumerate() {
                    let w = p1 * p2 * p3;
                    if w == 0.0 {
                        continue;
                    }
                    let mut st = State::new([u1, u2, u3]);
                    let mut branch = |row: &[f64]| {
                        row.iter().enumerate().filter(|(_, &p)| p > 0.0).map(|(y, &p)| (y, p)).collect()
                    };
                    self.walk(ch, &mut st, 0, w, &mut branch, &mut |t, p| {
                        if outcomes.len() >= MAX_EXACT_OUTCOMES {
                            return Err(Error::BudgetExceeded {
                                needed: outcomes.len() as u128 + 1,
                                budget: MAX_EXACT_OUTCOMES,
                            });
                        }
                        outcomes.push((t, p));
                        Ok(())
                    })?;
                }
            }
        }
        Ok(outcomes)
    }
}

/// One execution seeded from `seed`.
pub fn run_protocol(p: &CtProtocol, ch: &MacChannel, seed: u64) -> Result<SkTrace> {
    p.run(ch, &mut seed::rng(seed::derive(seed, seed::stream::PROTOCOL, 0)))
}

/// Runs `trials` independent executions, trial `i` on its own derived seed.
pub fn run_protocol_trials(p: &CtProtocol, ch: &MacChannel, trials: u64, seed: u64) -> Result<Vec<SkTrace>> {
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .map(|i| p.run(ch, &mut seed::rng(seed::derive(seed, seed::stream::PROTOCOL, i))))
        .collect()
}

fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

struct State {
    u: [usize; 3],
    x1: Vec<usize>,
    x2: Vec<usize>,
    x3: Vec<usize>,
    f: Vec<usize>,
}

impl State {
    fn new(u: [usize; 3]) -> Self {
        State {
            u,
            x1: Vec::new(),
            x2: Vec::new(),
            x3: Vec::new(),
            f: Vec::new(),
        }
    }
}

/// Variable positions in a trace law built by [`trace_law`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceVars {
    pub n: usize,
    pub u: [usize; 3],
    pub x1: Vec<usize>,
    pub x2: Vec<usize>,
    pub x3: Vec<usize>,
    /// Whole transcript.
    pub f: usize,
    /// Slot-1 messages.
    pub f1: usize,
    pub key: usize,
    pub estimates: [usize; 3],
    pub key_alphabet: usize,
}

impl TraceVars {
    pub fn nic_layout(&self) -> NicLayout {
        NicLayout {
            u1: vec![self.u[0]],
            u2: vec![self.u[1]],
            u3: vec![self.u[2]],
            x3: self.x3.clone(),
        }
    }

    pub fn se_layout(&self) -> SeLayout {
        SeLayout {
            x1: self.x1.clone(),
            u1: vec![self.u[0]],
            x2: self.x2.clone(),
            u2: vec![self.u[1]],
            x3: self.x3.clone(),
            u3: vec![self.u[2]],
        }
    }

    /// Terminal observations are the full local views `(U_i, X_i^n)`.
    pub fn terminal_layout(&self) -> TerminalLayout {
        let view = |u: usize, x: &[usize]| std::iter::once(u).chain(x.iter().copied()).collect();
        TerminalLayout {
            terminals: vec![view(self.u[0], &self.x1), view(self.u[1], &self.x2), view(self.u[2], &self.x3)],
            key: self.key,
            key_alphabet: self.key_alphabet,
            transcript: vec![self.f],
        }
    }

    pub fn key_layout(&self) -> KeyLayout {
        KeyLayout {
            randomness: self.u.to_vec(),
            first_message: self.f1,
            transcript: vec![self.f],
            estimates: self.estimates.to_vec(),
            key: self.key,
            key_alphabet: self.key_alphabet,
        }
    }
}

/// Exact law of `(U1, U2, U3, X1^n, X2^n, X3^n, F, F_1, K, K1, K2, K3)`
/// with one variable per channel letter. Transcripts are labeled in order
/// of first appearance.
pub fn trace_law(outcomes: &[(SkTrace, f64)]) -> Result<(SparseLaw, TraceVars)> {
    let Some((first, _)) = outcomes.first() else {
        return invalid("no outcomes");
    };
    let n = first.x3.len();
    let mut f_ids: HashMap<&[usize], u64> = HashMap::new();
    let mut f1_ids: HashMap<&[usize], u64> = HashMap::new();
    let mut rows = Vec::with_capacity(outcomes.len());
    for (t, p) in outcomes {
        let next = f_ids.len() as u64;
        let f = *f_ids.entry(&t.f).or_insert(next);
        let next = f1_ids.len() as u64;
        let f1 = *f1_ids.entry(&t.f[..t.f1_len]).or_insert(next);
        let mut l: Vec<u64> = t.u.iter().map(|&v| v as u64).collect();
        l.extend(t.x1.iter().chain(&t.x2).chain(&t.x3).map(|&v| v as u64));
        l.push(f);
        l.push(f1);
        l.push(t.key as u64);
        l.extend(t.keys.iter().map(|&k| k as u64));
        rows.push((l, *p));
    }
    let base = 3 + 3 * n;
    let vars = TraceVars {
        n,
        u: [0, 1, 2],
        x1: (3..3 + n).collect(),
        x2: (3 + n..3 + 2 * n).collect(),
        x3: (3 + 2 * n..base).collect(),
        f: base,
        f1: base + 1,
        key: base + 2,
        estimates: [base + 3, base + 4, base + 5],
        key_alphabet: first.key_alphabet,
    };
    Ok((SparseLaw::new(rows)?, vars))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits() -> FiniteDist {
        FiniteDist::uniform(2)
    }

    fn identity_protocol(restriction: Restriction, slot2: Vec<CtMessage>) -> Result<CtProtocol> {
        // n = 2, U1, U2 uniform bits sent in both slots.
        CtProtocol::new(CtSpec {
            n: 2,
            channel_alphabets: (2, 2, 3),
            randomness: [bits(), bits(), FiniteDist::point(1, 0)],
            messages: vec![vec![], slot2, vec![]],
            inputs: vec![
                [Rule::func(|v| v.u), Rule::func(|v| v.u)],
                [Rule::func(|v| v.u), Rule::func(|v| v.u)],
            ],
            keys: [Rule::constant(0), Rule::constant(0), Rule::constant(0)],
            key_source: 0,
            key_alphabet: 1,
            restriction,
        })
    }

    #[test]
    fn deterministic_channel_single_slot() {
        let p = CtProtocol::new(CtSpec {
            n: 1,
            channel_alphabets: (2, 2, 3),
            randomness: [bits(), bits(), FiniteDist::point(1, 0)],
            messages: vec![vec![], vec![]],
            inputs: vec![[Rule::Table(vec![0, 1]), Rule::Table(vec![0, 1])]],
            keys: [Rule::constant(0), Rule::constant(0), Rule::constant(0)],
            key_source: 0,
            key_alphabet: 1,
            restriction: Restriction::General,
        })
        .unwrap();
        let ch = MacChannel::adder();
        for s in 0..20 {
            let t = run_protocol(&p, &ch, s).unwrap();
            assert_eq!(t.x3[0], t.u[0] + t.u[1]);
        }
        assert_eq!(p.enumerate(&ch).unwrap().len(), 4);
    }

    #[test]
    fn restrictions_checked_at_construction() {
        let echo = || CtMessage {
            sender: 2,
            alphabet: 3,
            rule: Rule::func(|v| v.x3[0]),
        };
        assert!(identity_protocol(Restriction::Nic, vec![echo()]).is_ok());
        let from_1 = CtMessage {
            sender: 0,
            alphabet: 2,
            rule: Rule::Table(vec![0, 1]),
        };
        assert!(matches!(
            identity_protocol(Restriction::Nic, vec![from_1.clone()]),
            Err(Error::Restriction(_))
        ));
        assert!(matches!(identity_protocol(Restriction::Se, vec![echo()]), Err(Error::Restriction(_))));
        let constant = CtMessage {
            sender: 0,
            alphabet: 2,
            rule: Rule::Table(vec![1, 1]),
        };
        assert!(identity_protocol(Restriction::Se, vec![constant]).is_ok());
        assert!(identity_protocol(Restriction::General, vec![from_1]).is_ok());
    }

    #[test]
    fn nic_echo_feeds_inputs() {
        // Slot-2 inputs copy the published first output (capped at 1).
        let p = CtProtocol::new(CtSpec {
            n: 2,
            channel_alphabets: (2, 2, 3),
            randomness: [bits(), bits(), FiniteDist::point(1, 0)],
            messages: vec![
                vec![],
                vec![CtMessage {
                    sender: 2,
                    alphabet: 3,
                    rule: Rule::func(|v| v.x3[0]),
                }],
                vec![],
            ],
            inputs: vec![
                [Rule::func(|v| v.u), Rule::func(|v| v.u)],
                [Rule::func(|v| v.f[0].min(1)), Rule::constant(0)],
            ],
            keys: [Rule::constant(0), Rule::constant(0), Rule::constant(0)],
            key_source: 0,
            key_alphabet: 1,
            restriction: Restriction::Nic,
        })
        .unwrap();
        for (t, _) in p.enumerate(&MacChannel::adder()).unwrap() {
            assert_eq!(t.x1[1], t.x3[0].min(1));
        }
    }

    #[test]
    fn exact_law_matches_monte_carlo() {
        let ch = MacChannel::noisy_adder(0.05);
        let p = identity_protocol(Restriction::Se, vec![]).unwrap();
        let exact = p.enumerate(&ch).unwrap();
        let total: f64 = exact.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let trials = 20_000;
        let runs = run_protocol_trials(&p, &ch, trials, 5).unwrap();
        let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
        for r in &runs {
            *counts.entry(r.x3.clone()).or_default() += 1;
        }
        let mut probs: HashMap<Vec<usize>, f64> = HashMap::new();
        for (t, q) in &exact {
            *probs.entry(t.x3.clone()).or_default() += q;
        }
        for (k, q) in probs {
            let c = *counts.get(&k).unwrap_or(&0) as f64;
            let sd = (trials as f64 * q * (1.0 - q)).sqrt();
            assert!((c - trials as f64 * q).abs() <= 3.0 * sd + 1.0, "{k:?}");
        }
    }

    #[test]
    fn trace_law_layout() {
        let p = identity_protocol(Restriction::Se, vec![]).unwrap();
        let (law, vars) = trace_law(&p.enumerate(&MacChannel::adder()).unwrap()).unwrap();
        assert_eq!(vars.x3, vec![7, 8]);
        use crate::info::EntropyOracle;
        assert!((law.joint_entropy(&vars.x3) - 1.5).abs() < 1e-12);
    }
}
