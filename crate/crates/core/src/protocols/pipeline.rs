//! Secret-key agreement from a feedback code.
//!
//! The code is symmetrized so that both input terminals face the same
//! conditional output entropies. `N` independent blocks run in lockstep. After
//! each paired slot `t` the output terminal publishes a random linear bin of
//! `(Y_t1 .. Y_tN)` at rate `H(Y_t | M_1, Y^{t-1}) + delta_sw` bits per block.
//! Terminals 1 and 2 decode it from their own messages and reconstructed past
//! outputs, then pick their next inputs from the reconstruction. At the end
//! every terminal hashes its copy of all outputs with a seeded Toeplitz matrix.

use serde::Serialize;

use super::gf2::set_bit;
use super::hashing::ToeplitzHash;
use super::metrics::Mode;
use super::slepian_wolf::{SwCode, SwStatus};
use crate::codes::{
    message_bits_of, symmetrize_code, wilson_interval, FeedbackCode, Message, OutputPredictor, Role, SlotEncoder,
    SymmetrizedCode,
};
use crate::error::{invalid, Error, Result};
use crate::info::{entropy_of, MacChannel};
use crate::seed;

/// Bit width of the exact `(K, F)` enumeration, both for the outcome count
/// and the joint table.
pub const MAX_EXACT_PIPELINE_BITS: usize = 26;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineParams {
    /// Independent code blocks `N`.
    pub blocks: usize,
    /// Binning slack in bits per block.
    pub delta_sw: f64,
    /// Key-rate backoff in bits per paired slot.
    pub delta_pa: f64,
    pub seed: u64,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            blocks: 400,
            delta_sw: 0.1,
            delta_pa: 0.1,
            seed: 0,
        }
    }
}

impl PipelineParams {
    fn validate(&self) -> Result<()> {
        if self.blocks == 0 {
            return invalid("the pipeline needs at least one block");
        }
        for (name, d) in [("delta_sw", self.delta_sw), ("delta_pa", self.delta_pa)] {
            if !(d >= 0.0 && d.is_finite()) {
                return invalid(format!("{name} must be finite and nonnegative, got {d}"));
            }
        }
        Ok(())
    }
}

/// Per-block entropy accounting of the symmetrized code, from the exact law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticRate {
    pub code: String,
    /// Paired slots `n` per block.
    pub paired_slots: usize,
    /// Channel uses per block, `2n`.
    pub channel_uses: usize,
    /// `H(Y^n)`
    pub output_entropy: f64,
    /// `sum_t H(Y_t | M_1, Y^{t-1})`
    pub conditional_entropy: f64,
    /// `I(Y^n; M_1)`
    pub mutual_information: f64,
    /// `I(Y^n; M_1)` per channel use.
    pub rate: f64,
    #[serde(skip)]
    pub slot_entropies: Vec<f64>,
}

fn analyze<C: FeedbackCode>(sym: &SymmetrizedCode<C>, ch: &MacChannel) -> Result<AnalyticRate> {
    let n = sym.inner().block_len();
    let slot_entropies = (0..n)
        .map(|t| {
            Ok(sym.slot_conditional_entropy(ch, Role::First, 2 * t)?
                + sym.slot_conditional_entropy(ch, Role::First, 2 * t + 1)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let output_entropy = sym.output_entropy(ch)?;
    let conditional_entropy: f64 = slot_entropies.iter().sum();
    let mutual_information = (output_entropy - conditional_entropy).max(0.0);
    Ok(AnalyticRate {
        code: sym.name(),
        paired_slots: n,
        channel_uses: 2 * n,
        output_entropy,
        conditional_entropy,
        mutual_information,
        rate: mutual_information / (2 * n) as f64,
        slot_entropies,
    })
}

/// Rate `I(Y^n; M_1) / 2n` of the symmetrized code, without simulation.
pub fn feedback_rate_report<C: FeedbackCode>(ch: &MacChannel, code: C) -> Result<AnalyticRate> {
    analyze(&symmetrize_code(code, ch)?, ch)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TerminalStage {
    /// Slots whose bin could not be decoded.
    pub failed_slots: usize,
    /// Slots decoded without communication where a block was uncertain.
    pub guessed_slots: usize,
    /// First slot where the reconstruction differed from the outputs.
    pub first_wrong_slot: Option<usize>,
    /// Blocks whose final reconstruction is wrong.
    pub wrong_blocks: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StageErrors {
    /// Output reconstruction at terminals 1 and 2.
    pub reconstruction: [TerminalStage; 2],
    /// Key estimate of terminal 1 or 2 differs from the key.
    pub key_mismatch: [bool; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub params: PipelineParams,
    pub analytic: AnalyticRate,
    /// Channel uses over all blocks.
    pub channel_uses: usize,
    /// Public bits over all slots.
    pub comm_bits: usize,
    pub comm_rate: f64,
    pub key_bits: usize,
    /// Key bits per channel use.
    pub key_rate: f64,
    /// 1 when all three keys agree in this run, else 0.
    pub agreement: f64,
    /// One minus a union bound over slots and terminals of the decoding
    /// failure probability given a correct past.
    pub agreement_bound: f64,
    /// Total `log|K| - H(K | F)`.
    pub s_in: f64,
    pub s_in_per_symbol: f64,
    pub s_in_mode: Mode,
    pub stage_errors: StageErrors,
}

#[derive(Debug, Clone)]
pub struct FeedbackRun {
    pub report: PipelineReport,
    /// Key of the output terminal, packed little-endian.
    pub key: Vec<u64>,
    /// Estimates of terminals 1 and 2.
    pub estimates: [Vec<u64>; 2],
}

fn symbol_bits(out: usize) -> usize {
    (usize::BITS - (out.max(2) - 1).leading_zeros()) as usize
}

/// Key length `min(N I - n N delta_pa, N H(Y^n) - |F|)`, floored at zero,
/// and the leftover entropy `N H(Y^n) - |F|`.
fn key_length(a: &AnalyticRate, params: &PipelineParams, comm_bits: usize) -> (usize, f64) {
    let nb = params.blocks as f64;
    let target = nb * a.mutual_information - a.paired_slots as f64 * nb * params.delta_pa;
    let leftover = nb * a.output_entropy - comm_bits as f64;
    let len = (target.min(leftover) + 1e-9).floor().max(0.0) as usize;
    (len, leftover)
}

/// `log2(1 + 2^{len - leftover})`: leftover-hash estimate of the leak,
/// treating the Shannon entropy of the outputs as if it were collision
/// entropy.
fn leak_estimate(len: usize, leftover: f64) -> f64 {
    if len == 0 {
        return 0.0;
    }
    let gap = len as f64 - leftover;
    let est = if gap > 50.0 { gap } else { gap.exp2().ln_1p() / std::f64::consts::LN_2 };
    est.min(len as f64)
}

fn bin_codes(a: &AnalyticRate, params: &PipelineParams, width: usize) -> Result<Vec<SwCode>> {
    a.slot_entropies
        .iter()
        .enumerate()
        .map(|(t, &h)| {
            SwCode::new(
                params.blocks,
                width,
                h,
                params.delta_sw,
                seed::derive(params.seed, seed::stream::BINNING, t as u64),
            )
        })
        .collect()
}

/// One copy of the inner code as seen by one terminal.
struct Half<'a> {
    enc: Box<dyn SlotEncoder + 'a>,
    pred: Box<dyn OutputPredictor + 'a>,
    hist: Vec<usize>,
}

impl<'a> Half<'a> {
    fn new<C: FeedbackCode>(code: &'a C, ch: &'a MacChannel, role: Role, msg: &[bool]) -> Result<Self> {
        Ok(Half {
            enc: code.encoder(role, msg),
            pred: code.predictor(ch, role, msg)?,
            hist: Vec::new(),
        })
    }

    fn input(&mut self) -> usize {
        self.enc.input(&self.hist)
    }

    /// Next-output law; uniform once the reconstructed past has become
    /// impossible.
    fn law(&mut self, out: usize) -> Vec<f64> {
        let law = self.pred.next_output_law(&self.hist);
        if law.iter().sum::<f64>() > 0.0 {
            law
        } else {
            vec![1.0 / out as f64; out]
        }
    }
}

/// Terminal `i` in one block: the odd-use copy plays role `i` on `M_i'`,
/// the even-use copy plays the other role on `M_i''`.
struct Local<'a> {
    hat: Half<'a>,
    tilde: Half<'a>,
}

fn random_message<R: rand::Rng>(len: usize, rng: &mut R) -> Message {
    (0..len).map(|_| rng.gen()).collect()
}

/// Runs the pipeline once on `N` blocks.
pub fn feedback_sk_scheme<C: FeedbackCode>(ch: &MacChannel, code: C, params: PipelineParams) -> Result<FeedbackRun> {
    params.validate()?;
    let sym = symmetrize_code(code, ch)?;
    let analytic = analyze(&sym, ch)?;
    let inner = sym.inner();
    let n = inner.block_len();
    let nb = params.blocks;
    let out = ch.out();
    let bps = symbol_bits(out);
    let width = 2 * bps;
    let codes = bin_codes(&analytic, &params, width)?;
    let mb = inner.message_bits();

    let roles = [Role::First, Role::Second];
    let mut locals: [Vec<Local<'_>>; 2] = [Vec::with_capacity(nb), Vec::with_capacity(nb)];
    for j in 0..nb {
        let mut rng = seed::rng(seed::derive(params.seed, seed::stream::MESSAGES, j as u64));
        for (i, role) in roles.into_iter().enumerate() {
            let hat_msg = random_message(mb, &mut rng);
            let tilde_msg = random_message(mb, &mut rng);
            locals[i].push(Local {
                hat: Half::new(inner, ch, role, &hat_msg)?,
                tilde: Half::new(inner, ch, role.swap(), &tilde_msg)?,
            });
        }
    }
    let mut chan_rng = seed::rng(seed::derive(params.seed, seed::stream::CHANNEL, 0));
    let mut truth: Vec<Vec<u64>> = vec![Vec::with_capacity(n); nb];
    let mut recon: [Vec<Vec<u64>>; 2] = [vec![Vec::with_capacity(n); nb], vec![Vec::with_capacity(n); nb]];
    let mut stages: [TerminalStage; 2] = Default::default();
    let mut fail_bound = 0.0f64;
    let mut comm_bits = 0;

    for (t, sw) in codes.iter().enumerate() {
        let mut symbols = Vec::with_capacity(nb);
        for j in 0..nb {
            let (a, b) = locals.split_at_mut(1);
            let (l1, l2) = (&mut a[0][j], &mut b[0][j]);
            let yo = ch.sample(l1.hat.input(), l2.hat.input(), &mut chan_rng);
            let ye = ch.sample(l1.tilde.input(), l2.tilde.input(), &mut chan_rng);
            symbols.push(((yo << bps) | ye) as u64);
        }
        let bin = sw.compress(&symbols);
        comm_bits += sw.bins();
        for i in 0..2 {
            let side: Vec<Vec<f64>> = locals[i]
                .iter_mut()
                .map(|l| {
                    let lo = l.hat.law(out);
                    let le = l.tilde.law(out);
                    let mut law = vec![0.0; 1 << width];
                    for (a, pa) in lo.iter().enumerate() {
                        for (b, pb) in le.iter().enumerate() {
                            law[(a << bps) | b] = pa * pb;
                        }
                    }
                    law
                })
                .collect();
            let dec = sw.decode(&bin, &side);
            fail_bound += if sw.bins() > 0 {
                (dec.unknowns as f64 - sw.bins() as f64).exp2().min(1.0)
            } else {
                side.iter().map(|l| 1.0 - l.iter().copied().fold(0.0, f64::max)).sum()
            };
            let st = &mut stages[i];
            match dec.status {
                SwStatus::Guessed => st.guessed_slots += 1,
                s if s.is_failure() => st.failed_slots += 1,
                _ => {}
            }
            if st.first_wrong_slot.is_none() && dec.symbols != symbols {
                st.first_wrong_slot = Some(t);
            }
            for (j, (l, &s)) in locals[i].iter_mut().zip(&dec.symbols).enumerate() {
                l.hat.hist.push((s >> bps) as usize);
                l.tilde.hist.push((s & ((1 << bps) - 1)) as usize);
                recon[i][j].push(s);
            }
        }
        for (j, s) in symbols.into_iter().enumerate() {
            truth[j].push(s);
        }
    }

    let (key_bits, leftover) = key_length(&analytic, &params, comm_bits);
    let in_len = nb * n * width;
    let hash = ToeplitzHash::new(key_bits, in_len, seed::derive(params.seed, seed::stream::EXTRACTOR, 0));
    let pack_all = |blocks: &[Vec<u64>]| {
        let mut v = vec![0u64; in_len.div_ceil(64)];
        for (j, block) in blocks.iter().enumerate() {
            for (t, &s) in block.iter().enumerate() {
                let base = (j * n + t) * width;
                for b in 0..width {
                    if (s >> b) & 1 == 1 {
                        set_bit(&mut v, base + b, true);
                    }
                }
            }
        }
        v
    };
    let key = hash.hash(&pack_all(&truth));
    let mut estimates: [Vec<u64>; 2] = [key.clone(), key.clone()];
    let mut mismatch = [false; 2];
    for i in 0..2 {
        stages[i].wrong_blocks = recon[i].iter().zip(&truth).filter(|(a, b)| a != b).count();
        if stages[i].wrong_blocks > 0 {
            estimates[i] = hash.hash(&pack_all(&recon[i]));
            mismatch[i] = estimates[i] != key;
        }
    }
    let uses = nb * 2 * n;
    let s_in = leak_estimate(key_bits, leftover);
    let report = PipelineReport {
        params,
        channel_uses: uses,
        comm_bits,
        comm_rate: comm_bits as f64 / uses as f64,
        key_bits,
        key_rate: key_bits as f64 / uses as f64,
        agreement: if mismatch.iter().any(|&m| m) { 0.0 } else { 1.0 },
        agreement_bound: (1.0 - fail_bound).max(0.0),
        s_in,
        s_in_per_symbol: s_in / uses as f64,
        s_in_mode: Mode::Estimate,
        stage_errors: StageErrors {
            reconstruction: stages,
            key_mismatch: mismatch,
        },
        analytic,
    };
    Ok(FeedbackRun {
        report,
        key,
        estimates,
    })
}

/// Several independent runs with seeds split from `params.seed`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineSummary {
    pub runs: Vec<PipelineReport>,
    /// Fraction of runs in which all keys agree.
    pub agreement: f64,
    pub agreement_ci: (f64, f64),
    /// Smallest per-run agreement bound.
    pub agreement_bound: f64,
    pub key_rate: f64,
    /// Largest per-run security index estimate, per channel use.
    pub s_in_per_symbol: f64,
}

pub fn feedback_sk_runs<C: FeedbackCode + Clone>(
    ch: &MacChannel,
    code: &C,
    params: PipelineParams,
    runs: u64,
) -> Result<PipelineSummary> {
    if runs == 0 {
        return invalid("at least one run is needed");
    }
    let reports = (0..runs)
        .map(|r| {
            let p = PipelineParams {
                seed: seed::derive(params.seed, seed::stream::TRIAL, r),
                ..params
            };
            feedback_sk_scheme(ch, code.clone(), p).map(|run| run.report)
        })
        .collect::<Result<Vec<_>>>()?;
    let agreeing = reports.iter().filter(|r| r.agreement == 1.0).count() as u64;
    Ok(PipelineSummary {
        agreement: agreeing as f64 / runs as f64,
        agreement_ci: wilson_interval(agreeing, runs),
        agreement_bound: reports.iter().map(|r| r.agreement_bound).fold(1.0, f64::min),
        key_rate: reports.iter().map(|r| r.key_rate).fold(f64::INFINITY, f64::min),
        s_in_per_symbol: reports.iter().map(|r| r.s_in_per_symbol).fold(0.0, f64::max),
        runs: reports,
    })
}

/// Exact security of the extracted key on a deterministic channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactSecurity {
    pub analytic: AnalyticRate,
    pub blocks: usize,
    pub key_bits: usize,
    pub comm_bits: usize,
    /// `H(K | F)` over all message choices.
    pub key_given_transcript: f64,
    pub s_in: f64,
    pub s_in_mode: Mode,
    /// The leftover-hash estimate used at scale, for comparison.
    pub s_in_estimate: f64,
    pub outcomes: u64,
}

/// Channel outputs of one symmetrized block, one symbol per paired slot, for
/// messages `[M1', M1'', M2', M2'']` on a deterministic channel.
fn block_symbols<C: FeedbackCode>(code: &C, ch: &MacChannel, msgs: &[Message; 4], bps: usize) -> Vec<u64> {
    let n = code.block_len();
    let argmax = |x1: usize, x2: usize| ch.row(x1, x2).iter().position(|&p| p == 1.0).unwrap_or(0);
    let mut odd = Vec::with_capacity(n);
    let mut even = Vec::with_capacity(n);
    let mut e1 = code.encoder(Role::First, &msgs[0]);
    let mut e2 = code.encoder(Role::Second, &msgs[2]);
    // Even uses: terminal 1 plays the second role.
    let mut f1 = code.encoder(Role::Second, &msgs[1]);
    let mut f2 = code.encoder(Role::First, &msgs[3]);
    for _ in 0..n {
        let yo = argmax(e1.input(&odd), e2.input(&odd));
        let ye = argmax(f1.input(&even), f2.input(&even));
        odd.push(yo);
        even.push(ye);
    }
    odd.iter().zip(&even).map(|(&a, &b)| ((a << bps) | b) as u64).collect()
}

/// Enumerates every message choice of every block on a deterministic
/// channel and computes `H(K | F)` exactly. Bins and key are linear in the
/// outputs, so each block contributes an XOR term to `(K, F)`.
pub fn feedback_sk_exact<C: FeedbackCode>(ch: &MacChannel, code: C, params: PipelineParams) -> Result<ExactSecurity> {
    params.validate()?;
    if !ch.is_deterministic() {
        return invalid("exact pipeline security needs a deterministic channel");
    }
    let sym = symmetrize_code(code, ch)?;
    let analytic = analyze(&sym, ch)?;
    let inner = sym.inner();
    let n = inner.block_len();
    let nb = params.blocks;
    let mb = inner.message_bits();
    let bps = symbol_bits(ch.out());
    let width = 2 * bps;
    let per_block = 4 * mb;
    if per_block * nb > MAX_EXACT_PIPELINE_BITS {
        return Err(Error::BudgetExceeded {
            needed: 1u128 << (per_block * nb).min(127),
            budget: 1 << MAX_EXACT_PIPELINE_BITS,
        });
    }
    let codes = bin_codes(&analytic, &params, width)?;
    let comm_bits: usize = codes.iter().map(SwCode::bins).sum();
    let (key_bits, leftover) = key_length(&analytic, &params, comm_bits);
    if key_bits + comm_bits > MAX_EXACT_PIPELINE_BITS {
        return Err(Error::BudgetExceeded {
            needed: 1u128 << (key_bits + comm_bits),
            budget: 1 << MAX_EXACT_PIPELINE_BITS,
        });
    }
    let in_len = nb * n * width;
    let hash = ToeplitzHash::new(key_bits, in_len, seed::derive(params.seed, seed::stream::EXTRACTOR, 0));

    // contrib[j][c]: (K, F) bits, F in the low `comm_bits`, for message
    // choice `c` in block `j`.
    let combos = 1usize << per_block;
    let mut contrib = vec![vec![0u64; combos]; nb];
    for c in 0..combos {
        let msgs: [Message; 4] = std::array::from_fn(|q| message_bits_of((c >> (q * mb)) as u64 & ((1 << mb) - 1), mb));
        let symbols = block_symbols(inner, ch, &msgs, bps);
        for (j, slot) in contrib.iter_mut().enumerate() {
            let mut z = 0u64;
            let mut offset = 0;
            for (t, sw) in codes.iter().enumerate() {
                if sw.bins() > 0 {
                    z |= sw.symbol_bin(j, symbols[t])[0] << offset;
                    offset += sw.bins();
                }
            }
            let mut x = vec![0u64; in_len.div_ceil(64)];
            for (t, &s) in symbols.iter().enumerate() {
                for b in 0..width {
                    if (s >> b) & 1 == 1 {
                        set_bit(&mut x, (j * n + t) * width + b, true);
                    }
                }
            }
            if key_bits > 0 {
                z |= hash.hash(&x)[0] << comm_bits;
            }
            slot[c] = z;
        }
    }
    let mut counts = vec![0u32; 1 << (key_bits + comm_bits)];
    fn walk(contrib: &[Vec<u64>], acc: u64, counts: &mut [u32]) {
        match contrib.split_first() {
            None => counts[acc as usize] += 1,
            Some((head, rest)) => {
                for &z in head {
                    walk(rest, acc ^ z, counts);
                }
            }
        }
    }
    walk(&contrib, 0, &mut counts);
    let outcomes = (combos as u64).pow(nb as u32);
    let total = outcomes as f64;
    let joint: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
    let mut marginal = vec![0.0; 1 << comm_bits];
    for (z, p) in joint.iter().enumerate() {
        marginal[z & ((1 << comm_bits) - 1)] += p;
    }
    let h = (entropy_of(&joint) - entropy_of(&marginal)).max(0.0);
    let s_in = (key_bits as f64 - h).max(0.0);
    Ok(ExactSecurity {
        analytic,
        blocks: nb,
        key_bits,
        comm_bits,
        key_given_transcript: h,
        s_in: if s_in < 1e-12 { 0.0 } else { s_in },
        s_in_mode: Mode::Exact,
        s_in_estimate: leak_estimate(key_bits, leftover),
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{adder_feedback_code, IdentityCode, TdmaCode};

    #[test]
    fn symbol_widths() {
        assert_eq!(symbol_bits(2), 1);
        assert_eq!(symbol_bits(3), 2);
        assert_eq!(symbol_bits(4), 2);
        assert_eq!(symbol_bits(5), 3);
    }

    #[test]
    fn adder_analytic_rate() {
        let a = feedback_rate_report(&MacChannel::adder(), adder_feedback_code(1000, 3.0).unwrap()).unwrap();
        assert_eq!(a.channel_uses, 2752);
        assert!((a.rate - 1000.0 / 1376.0).abs() < 1e-6, "{a:?}");
    }

    #[test]
    fn small_adder_run_agrees() {
        let p = PipelineParams {
            blocks: 60,
            delta_sw: 0.2,
            delta_pa: 0.1,
            seed: 5,
        };
        let run = feedback_sk_scheme(&MacChannel::adder(), adder_feedback_code(20, 2.0).unwrap(), p).unwrap();
        let r = &run.report;
        assert_eq!(r.agreement, 1.0, "{:?}", r.stage_errors);
        assert!(r.key_bits > 0);
        assert_eq!(run.estimates[0], run.key);
        assert!(r.agreement_bound > 0.9);
    }

    #[test]
    fn xor_identity_has_no_key_but_time_division_does() {
        let p = PipelineParams {
            blocks: 100,
            delta_sw: 0.1,
            delta_pa: 0.02,
            seed: 1,
        };
        let xor = MacChannel::xor();
        let id = feedback_sk_scheme(&xor, IdentityCode::new(&xor).unwrap(), p).unwrap().report;
        assert_eq!(id.analytic.mutual_information, 0.0);
        assert_eq!(id.key_bits, 0);
        let td = feedback_sk_scheme(&xor, TdmaCode::new(&xor).unwrap(), p).unwrap().report;
        assert!((td.analytic.rate - 0.5).abs() < 1e-12);
        assert_eq!(td.agreement, 1.0);
        assert!(td.key_rate > 0.44, "{td:?}");
    }

    #[test]
    fn exact_mode_matches_brute_force_on_a_toy() {
        // One block of the k=1 adder code: 16 outcomes, small enough to
        // recount by hand through the sampled path's hashing.
        let p = PipelineParams {
            blocks: 1,
            delta_sw: 0.5,
            delta_pa: 0.5,
            seed: 2,
        };
        let code = adder_feedback_code(1, 0.5).unwrap();
        let e = feedback_sk_exact(&MacChannel::adder(), code, p).unwrap();
        assert_eq!(e.outcomes, 16);
        assert!(e.s_in >= 0.0 && e.s_in <= e.key_bits as f64);
    }

    #[test]
    fn noisy_channel_rejected_in_exact_mode() {
        let ch = MacChannel::noisy_adder(0.1);
        let code = adder_feedback_code(1, 0.5).unwrap();
        assert!(feedback_sk_exact(&ch, code, PipelineParams::default()).is_err());
    }
}
