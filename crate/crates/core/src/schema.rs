//! JSON input formats. Every parser rejects unknown fields; malformed
//! documents and documents describing invalid objects both map to
//! [`Error::Schema`], except memory-budget failures.

use serde::{Deserialize, Serialize};

use crate::converse::{InteractiveProtocol, MessageSpec, TerminalLayout};
use crate::error::{Error, Result};
use crate::info::{EntropyOracle, FiniteDist, JointDist, MacChannel, SparseLaw};
use crate::protocols::{CtMessage, CtProtocol, CtSpec, Restriction, Rule};

fn schema<T>(what: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::BudgetExceeded { .. } | Error::Schema(_) => e,
        other => Error::Schema(format!("{what}: {other}")),
    })
}

fn decode<'a, T: Deserialize<'a>>(what: &str, json: &'a str) -> Result<T> {
    serde_json::from_str(json).map_err(|e| Error::Schema(format!("{what}: {e}")))
}

fn bad<T>(what: &str, msg: impl std::fmt::Display) -> Result<T> {
    Err(Error::Schema(format!("{what}: {msg}")))
}

/// `{"in1": k, "in2": k, "out": k, "w": [[[...]]]}` with rows `w[x1][x2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub in1: usize,
    pub in2: usize,
    pub out: usize,
    pub w: Vec<Vec<Vec<f64>>>,
}

impl ChannelFile {
    pub fn of(ch: &MacChannel) -> Self {
        ChannelFile {
            in1: ch.in1(),
            in2: ch.in2(),
            out: ch.out(),
            w: ch.to_nested(),
        }
    }

    pub fn build(self) -> Result<MacChannel> {
        const WHAT: &str = "channel";
        if self.w.len() != self.in1 {
            return bad(WHAT, format!("w has {} blocks, in1 is {}", self.w.len(), self.in1));
        }
        for (x1, rows) in self.w.iter().enumerate() {
            if rows.len() != self.in2 {
                return bad(WHAT, format!("w[{x1}] has {} rows, in2 is {}", rows.len(), self.in2));
            }
            if let Some(x2) = rows.iter().position(|r| r.len() != self.out) {
                return bad(WHAT, format!("w[{x1}][{x2}] has {} entries, out is {}", rows[x2].len(), self.out));
            }
        }
        schema(WHAT, MacChannel::new(self.w))
    }
}

pub fn parse_channel(json: &str) -> Result<MacChannel> {
    decode::<ChannelFile>("channel", json)?.build()
}

/// `{"probs": [...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionFile {
    pub probs: Vec<f64>,
}

pub fn parse_distribution(json: &str) -> Result<FiniteDist> {
    let f: DistributionFile = decode("distribution", json)?;
    schema("distribution", FiniteDist::new(f.probs))
}

/// Dense joint law of one variable per terminal, row-major:
/// `{"arity": [...], "table": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationLawFile {
    pub arity: Vec<usize>,
    pub table: Vec<f64>,
}

pub fn parse_observation_law(json: &str) -> Result<JointDist> {
    let f: ObservationLawFile = decode("observation law", json)?;
    schema("observation law", JointDist::new(f.arity, f.table))
}

/// Law of a key-agreement experiment for the converse bound.
///
/// The law is given either sparsely as `outcomes`, a list of
/// `[[label, ...], probability]`, or densely as `arity` and a row-major
/// `table`. Variables are referred to by 0-based position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<Vec<(Vec<u64>, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<f64>>,
    /// Variables observed by each terminal.
    pub terminals: Vec<Vec<usize>>,
    pub key: usize,
    #[serde(default)]
    pub transcript: Vec<usize>,
    pub key_alphabet: usize,
}

#[derive(Debug, Clone)]
pub struct ParsedLaw {
    pub law: SparseLaw,
    pub layout: TerminalLayout,
}

pub fn parse_law(json: &str) -> Result<ParsedLaw> {
    const WHAT: &str = "law";
    let f: LawFile = decode(WHAT, json)?;
    let law = match (f.outcomes, f.arity, f.table) {
        (Some(o), None, None) => schema(WHAT, SparseLaw::new(o))?,
        (None, Some(a), Some(t)) => SparseLaw::from_dense(&schema(WHAT, JointDist::new(a, t))?),
        _ => return bad(WHAT, "give either outcomes or arity with table"),
    };
    let nv = law.num_vars();
    let vars = f.terminals.iter().flatten().chain(&f.transcript).chain(std::iter::once(&f.key));
    if let Some(v) = vars.into_iter().find(|&&v| v >= nv) {
        return bad(WHAT, format!("variable {v} outside the {nv} variables of the law"));
    }
    if f.terminals.len() < 2 || f.terminals.iter().any(Vec::is_empty) {
        return bad(WHAT, "need at least two terminals, each observing some variable");
    }
    if f.key_alphabet == 0 {
        return bad(WHAT, "key alphabet must be nonempty");
    }
    if let Some((l, _)) = law.outcomes().iter().find(|(l, _)| l[f.key] >= f.key_alphabet as u64) {
        return bad(WHAT, format!("key value {} outside alphabet {}", l[f.key], f.key_alphabet));
    }
    Ok(ParsedLaw {
        law,
        layout: TerminalLayout {
            terminals: f.terminals,
            key: f.key,
            key_alphabet: f.key_alphabet,
            transcript: f.transcript,
        },
    })
}

/// One message; `sender` is 1-based. Tables are indexed by
/// `own_obs * P + prior` with `prior` the mixed-radix code of earlier
/// messages, earliest most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MessageFile {
    pub sender: usize,
    pub alphabet: usize,
    pub table: Vec<usize>,
}

fn sender_index(what: &str, sender: usize, terminals: usize) -> Result<usize> {
    if sender == 0 || sender > terminals {
        return bad(what, format!("sender {sender} outside 1..={terminals}"));
    }
    Ok(sender - 1)
}

/// `{"obs": [...], "rounds": r, "messages": [...]}`; messages are listed in
/// speaking order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractiveFile {
    pub obs: Vec<usize>,
    pub rounds: usize,
    pub messages: Vec<MessageFile>,
}

pub fn parse_interactive(json: &str) -> Result<InteractiveProtocol> {
    const WHAT: &str = "interactive protocol";
    let f: InteractiveFile = decode(WHAT, json)?;
    let messages = f
        .messages
        .into_iter()
        .map(|m| {
            Ok(MessageSpec {
                sender: sender_index(WHAT, m.sender, f.obs.len())?,
                alphabet: m.alphabet,
                table: m.table,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    schema(WHAT, InteractiveProtocol::new(f.obs, f.rounds, messages))
}

/// Communication-transmission protocol over an inline channel.
///
/// Terminals are numbered 1 (first input), 2 (second input), 3 (output).
/// `messages[t]` lists the messages of slot `t + 1` in speaking order, for
/// `n + 1` slots; `inputs[t]` holds the input tables of both senders for
/// channel use `t + 1`; `keys` holds the three key estimates. Tables are
/// indexed by `(u * X + x3) * P + f`, see the protocol documentation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CtFile {
    pub n: usize,
    pub channel: ChannelFile,
    /// Laws of `U_1, U_2, U_3`.
    pub randomness: [Vec<f64>; 3],
    pub messages: Vec<Vec<MessageFile>>,
    pub inputs: Vec<[Vec<usize>; 2]>,
    pub keys: [Vec<usize>; 3],
    /// 1-based terminal whose estimate defines the key.
    pub key_source: usize,
    pub key_alphabet: usize,
    #[serde(default = "general")]
    pub restriction: Restriction,
}

fn general() -> Restriction {
    Restriction::General
}

#[derive(Debug, Clone)]
pub struct ParsedCt {
    pub protocol: CtProtocol,
    pub channel: MacChannel,
}

pub fn parse_ct(json: &str) -> Result<ParsedCt> {
    const WHAT: &str = "protocol";
    let f: CtFile = decode(WHAT, json)?;
    let channel = f.channel.build()?;
    let [r1, r2, r3] = f.randomness;
    let randomness = [
        schema(WHAT, FiniteDist::new(r1))?,
        schema(WHAT, FiniteDist::new(r2))?,
        schema(WHAT, FiniteDist::new(r3))?,
    ];
    let messages = f
        .messages
        .into_iter()
        .map(|slot| {
            slot.into_iter()
                .map(|m| {
                    Ok(CtMessage {
                        sender: sender_index(WHAT, m.sender, 3)?,
                        alphabet: m.alphabet,
                        rule: Rule::Table(m.table),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let inputs = f.inputs.into_iter().map(|[a, b]| [Rule::Table(a), Rule::Table(b)]).collect();
    let [k1, k2, k3] = f.keys;
    let spec = CtSpec {
        n: f.n,
        channel_alphabets: (channel.in1(), channel.in2(), channel.out()),
        randomness,
        messages,
        inputs,
        keys: [Rule::Table(k1), Rule::Table(k2), Rule::Table(k3)],
        key_source: sender_index(WHAT, f.key_source, 3)?,
        key_alphabet: f.key_alphabet,
        restriction: f.restriction,
    };
    let protocol = schema(WHAT, CtProtocol::new(spec))?;
    Ok(ParsedCt { protocol, channel })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_round_trip() {
        let ch = MacChannel::noisy_adder(0.05);
        let json = serde_json::to_string(&ChannelFile::of(&ch)).unwrap();
        assert_eq!(parse_channel(&json).unwrap(), ch);
    }

    #[test]
    fn channel_errors_are_schema() {
        for bad in [
            "{",
            r#"{"in1":2,"in2":2,"out":3}"#,
            r#"{"in1":1,"in2":1,"out":1,"w":[[[1.0]]],"extra":0}"#,
            r#"{"in1":1,"in2":1,"out":2,"w":[[[1.0]]]}"#,
            r#"{"in1":1,"in2":1,"out":2,"w":[[[0.3, 0.3]]]}"#,
        ] {
            assert_eq!(parse_channel(bad).unwrap_err().kind(), "schema", "{bad}");
        }
    }

    #[test]
    fn distribution_and_observation_law() {
        assert_eq!(parse_distribution(r#"{"probs":[0.25,0.75]}"#).unwrap().alphabet_size(), 2);
        assert!(parse_distribution(r#"{"probs":[0.2,0.7]}"#).is_err());
        let law = parse_observation_law(r#"{"arity":[2,2],"table":[0.25,0.25,0.25,0.25]}"#).unwrap();
        assert_eq!(law.arity(), &[2, 2]);
    }

    #[test]
    fn law_forms_agree() {
        let sparse = r#"{"outcomes":[[[0,0,0],0.5],[[1,1,1],0.5]],"terminals":[[0],[1]],"key":2,"key_alphabet":2}"#;
        let dense = r#"{"arity":[2,2,2],"table":[0.5,0,0,0,0,0,0,0.5],"terminals":[[0],[1]],"key":2,"key_alphabet":2}"#;
        let a = parse_law(sparse).unwrap();
        let b = parse_law(dense).unwrap();
        assert!((a.law.joint_entropy(&[0, 1]) - b.law.joint_entropy(&[0, 1])).abs() < 1e-12);
        assert_eq!(a.layout, b.layout);
        let both = r#"{"outcomes":[[[0],1.0]],"arity":[1],"table":[1.0],"terminals":[[0],[0]],"key":0,"key_alphabet":1}"#;
        assert!(parse_law(both).is_err());
        let oob = r#"{"outcomes":[[[0],1.0]],"terminals":[[0],[3]],"key":0,"key_alphabet":1}"#;
        assert!(parse_law(oob).is_err());
    }

    #[test]
    fn interactive_senders_are_one_based() {
        let ok = r#"{"obs":[2,2],"rounds":1,"messages":[{"sender":1,"alphabet":2,"table":[0,1]}]}"#;
        assert_eq!(parse_interactive(ok).unwrap().messages()[0].sender, 0);
        let zero = r#"{"obs":[2,2],"rounds":1,"messages":[{"sender":0,"alphabet":2,"table":[0,1]}]}"#;
        assert_eq!(parse_interactive(zero).unwrap_err().kind(), "schema");
    }

    #[test]
    fn ct_protocol_parses_and_runs() {
        // Terminal 1 publishes its random bit, which is the key: full
        // agreement and no secrecy.
        let json = r#"{
            "n": 1,
            "channel": {"in1":2,"in2":2,"out":2,"w":[[[1,0],[0,1]],[[0,1],[1,0]]]},
            "randomness": [[0.5,0.5],[1.0],[1.0]],
            "messages": [[], [{"sender":1,"alphabet":2,"table":[0,1]}]],
            "inputs": [[[0,0],[0]]],
            "keys": [[0,0,1,1], [0,1], [0,1,0,1]],
            "key_source": 1,
            "key_alphabet": 2
        }"#;
        let p = parse_ct(json).unwrap();
        let out = p.protocol.enumerate(&p.channel).unwrap();
        let m = crate::protocols::key_metrics_exact(&out, 1);
        assert!((m.agreement - 1.0).abs() < 1e-12);
        assert!((m.s_in - 1.0).abs() < 1e-12);
    }
}
