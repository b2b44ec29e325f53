use std::fmt::Write as _;
use std::path::Path;

use macsk::codes::{simulate_code as simulate, AdderFeedbackCode, TdmaCode};
use macsk::converse::{
    all_partitions, best_bound_lp, check_factorization, check_interactive_inequality, one_shot_bound,
    partition_to_fractional, random_fractional_partition, FractionalPartition, Partition,
};
use macsk::harness::{self, Level, Report, Stage, SuiteParams};
use macsk::info::MacChannel;
use macsk::protocols::{
    feedback_sk_exact, feedback_sk_runs, key_metrics_exact, key_metrics_sampled, run_protocol_trials,
    source_emulation_sk, PipelineParams, SeCode,
};
use macsk::rates::{compute_rstar, RstarOptions};
use macsk::{schema, seed, Error};
use serde_json::{json, to_value, Value};

use crate::{
    BoundArgs, CheckInteractiveArgs, CliError, CliResult, FbcodeRateArgs, RstarArgs, SimulateCodeArgs, SkFeedbackArgs,
    SkRunArgs, SkSeArgs, VerifySuiteArgs,
};

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            CliError::NotFound(path.to_path_buf())
        } else {
            CliError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })
}

fn channel(path: &Path) -> CliResult<MacChannel> {
    Ok(schema::parse_channel(&read(path)?)?)
}

fn value<T: serde::Serialize>(v: &T) -> Value {
    to_value(v).expect("report values serialize")
}

fn done(command: &str, params: Value, results: Value, seed: Option<u64>) -> Report {
    Report::new(command, params, results, seed, vec![Stage::new("run", true)])
}

/// Human-readable digest of a report: scalar results, one per line.
pub fn summary(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {:?}", r.command, r.status);
    if let Value::Object(m) = &r.results {
        for (k, v) in m {
            if v.is_number() || v.is_string() || v.is_boolean() {
                let _ = writeln!(s, "  {k}: {v}");
            }
        }
    }
    for st in r.stages.iter().filter(|s| s.status != harness::Status::Pass) {
        let _ = writeln!(s, "  failed: {}", st.name);
    }
    s
}

pub fn rstar(a: RstarArgs) -> CliResult<Report> {
    let ch = channel(&a.channel)?;
    let opts = RstarOptions {
        grid: a.grid,
        refine_iters: a.refine,
        ..RstarOptions::default()
    };
    let r = compute_rstar(&ch, &opts)?;
    Ok(done(
        "rstar",
        json!({ "channel": a.channel, "grid": a.grid, "refine": a.refine }),
        value(&r),
        None,
    ))
}

pub fn fbcode_rate(a: FbcodeRateArgs) -> CliResult<Report> {
    let code = AdderFeedbackCode::new(a.k, a.slack)?;
    let mut results = value(&code.report());
    results["threshold"] = json!(a.threshold);
    results["k0"] = json!(AdderFeedbackCode::threshold_k0(a.slack, a.threshold));
    Ok(done(
        "fbcode-rate",
        json!({ "k": a.k, "slack": a.slack, "threshold": a.threshold }),
        results,
        None,
    ))
}

pub fn simulate_code(a: SimulateCodeArgs) -> CliResult<Report> {
    let ch = channel(&a.channel)?;
    if ch.in1() != 2 || ch.in2() != 2 {
        return Err(Error::InvalidArgument("the adder feedback code needs binary inputs".into()).into());
    }
    let code = AdderFeedbackCode::new(a.k, a.slack)?;
    let est = simulate(&ch, &code, a.trials, a.seed)?;
    let report = code.report();
    Ok(done(
        "simulate-code",
        json!({ "channel": a.channel, "k": a.k, "slack": a.slack, "trials": a.trials, "seed": a.seed }),
        json!({
            "rate": report.rate,
            "uncertainty": 0.0,
            "error_prob": est.error_prob,
            "ci": est.ci,
            "errors": est.errors,
            "trials": est.trials,
            "overflow_prob": report.overflow_prob,
        }),
        Some(a.seed),
    ))
}

pub fn bound(a: BoundArgs) -> CliResult<Report> {
    let parsed = schema::parse_law(&read(&a.law)?)?;
    let m = parsed.layout.terminals.len();
    let (lam, source): (FractionalPartition, Value) = if a.partition == "lp" {
        let (lam, pen) = best_bound_lp(&parsed.law, &parsed.layout.terminals)?;
        (lam, json!({ "lp_penalty": pen }))
    } else {
        let p = Partition::parse(m, &a.partition)?;
        (partition_to_fractional(&p), json!({ "partition": p.label() }))
    };
    let b = one_shot_bound(&parsed.law, &parsed.layout, &lam, a.eps)?;
    let mut results = value(&b);
    results["weights"] = value(&lam.labeled());
    results["weights_source"] = source;
    Ok(done(
        "bound",
        json!({ "law": a.law, "partition": a.partition, "eps": a.eps }),
        results,
        None,
    ))
}

pub fn check_interactive(a: CheckInteractiveArgs) -> CliResult<Report> {
    let proto = schema::parse_interactive(&read(&a.proto)?)?;
    let law = schema::parse_observation_law(&read(&a.law)?)?;
    let m = proto.terminals();
    let mut checks = Vec::new();
    for p in all_partitions(m)? {
        let c = check_interactive_inequality(&proto, &law, &partition_to_fractional(&p))?;
        checks.push(json!({ "weights": p.label(), "lhs": c.lhs, "rhs": c.rhs, "holds": c.holds }));
    }
    if let Some(s) = a.seed {
        let mut rng = seed::rng(seed::derive(s, seed::stream::PROTOCOL, 0));
        for _ in 0..a.random_partitions {
            let lam = random_fractional_partition(m, &mut rng)?;
            let c = check_interactive_inequality(&proto, &law, &lam)?;
            checks.push(json!({ "weights": lam.labeled(), "lhs": c.lhs, "rhs": c.rhs, "holds": c.holds }));
        }
    }
    let factorization = match check_factorization(&proto, &law) {
        Ok(f) => value(&f),
        Err(Error::NotProduct(gap)) => json!({ "skipped": "observations are not independent", "product_gap": gap }),
        Err(e) => return Err(e.into()),
    };
    let holds = checks.iter().all(|c| c["holds"] == true);
    Ok(done(
        "check-interactive",
        json!({ "proto": a.proto, "law": a.law, "random_partitions": a.random_partitions, "seed": a.seed }),
        json!({ "inequality_holds": holds, "inequality": checks, "factorization": factorization }),
        a.seed,
    ))
}

pub fn sk_se(a: SkSeArgs) -> CliResult<Report> {
    let ch = channel(&a.channel)?;
    let code = match a.code.as_str() {
        "builtin" => SeCode::BuiltIn,
        "tdma" => SeCode::Tdma,
        "random" => SeCode::Random { rate: a.rate },
        other => return Err(CliError::Usage(format!("unknown code {other:?}, expected builtin, tdma or random"))),
    };
    let se = source_emulation_sk(&ch, a.n, code, a.seed.unwrap_or(0))?;
    let r = match a.trials {
        Some(t) => se.sampled(t, a.seed.expect("clap requires a seed with trials"))?,
        None => se.exact()?,
    };
    let m = &r.metrics;
    Ok(done(
        "sk-se",
        json!({ "channel": a.channel, "n": a.n, "trials": a.trials, "seed": a.seed, "code": a.code }),
        json!({
            "code": r.code,
            "messages_per_user": r.messages_per_user,
            "key_rate": r.key_rate,
            "comm_rate": r.comm_rate,
            "agreement": m.agreement,
            "agreement_ci": m.agreement_ci,
            "samples": m.samples,
            "s_in": m.s_in,
            "s_in_mode": m.s_in_mode,
            "key_bits": m.key_bits,
            "stage_errors": { "disagreement": 1.0 - m.agreement },
        }),
        a.seed,
    ))
}

pub fn sk_feedback(a: SkFeedbackArgs) -> CliResult<Report> {
    let ch = channel(&a.channel)?;
    let params = PipelineParams {
        blocks: a.blocks,
        delta_sw: a.dsw,
        delta_pa: a.dpa,
        seed: a.seed,
    };
    let echo = json!({
        "channel": a.channel, "k": a.k, "slack": a.slack, "blocks": a.blocks, "dsw": a.dsw, "dpa": a.dpa,
        "seed": a.seed, "runs": a.runs, "code": a.code, "exact": a.exact,
    });
    let results = match (a.code.as_str(), a.exact) {
        ("adder", false) => feedback_results(feedback_sk_runs(&ch, &AdderFeedbackCode::new(a.k, a.slack)?, params, a.runs)?),
        ("tdma", false) => feedback_results(feedback_sk_runs(&ch, &TdmaCode::new(&ch)?, params, a.runs)?),
        ("adder", true) => value(&feedback_sk_exact(&ch, AdderFeedbackCode::new(a.k, a.slack)?, params)?),
        ("tdma", true) => value(&feedback_sk_exact(&ch, TdmaCode::new(&ch)?, params)?),
        (other, _) => return Err(CliError::Usage(format!("unknown code {other:?}, expected adder or tdma"))),
    };
    Ok(done("sk-feedback", echo, results, Some(a.seed)))
}

fn feedback_results(s: macsk::protocols::PipelineSummary) -> Value {
    let first = &s.runs[0];
    json!({
        "analytic": first.analytic,
        "key_rate": s.key_rate,
        "agreement": s.agreement,
        "agreement_ci": s.agreement_ci,
        "agreement_bound": s.agreement_bound,
        "samples": s.runs.len(),
        "s_in": s.runs.iter().map(|r| r.s_in).fold(0.0, f64::max),
        "s_in_per_symbol": s.s_in_per_symbol,
        "s_in_mode": first.s_in_mode,
        "comm_rate": first.comm_rate,
        "key_bits": first.key_bits,
        "channel_uses": first.channel_uses,
        "stage_errors": s.runs.iter().map(|r| &r.stage_errors).collect::<Vec<_>>(),
    })
}

pub fn sk_run(a: SkRunArgs) -> CliResult<Report> {
    let p = schema::parse_ct(&read(&a.proto)?)?;
    let n = p.protocol.n();
    let m = match a.trials {
        Some(t) => {
            let traces = run_protocol_trials(&p.protocol, &p.channel, t, a.seed.expect("clap requires a seed"))?;
            key_metrics_sampled(&traces, n)
        }
        None => key_metrics_exact(&p.protocol.enumerate(&p.channel)?, n),
    };
    let comm_bits = p.protocol.comm_bits();
    Ok(done(
        "sk-run",
        json!({ "proto": a.proto, "exact": a.trials.is_none(), "trials": a.trials, "seed": a.seed }),
        json!({
            "key_rate": m.weak_rate,
            "agreement": m.agreement,
            "agreement_ci": m.agreement_ci,
            "samples": m.samples,
            "s_in": m.s_in,
            "s_in_mode": m.s_in_mode,
            "comm_rate": comm_bits / n.max(1) as f64,
            "stage_errors": { "disagreement": 1.0 - m.agreement },
        }),
        a.seed,
    ))
}

pub fn verify_suite(a: VerifySuiteArgs) -> CliResult<Report> {
    let level: Level = a.level.parse()?;
    let params = SuiteParams {
        level,
        seed: a.seed,
        inject_xor: a.inject_xor,
    };
    let r = harness::verify_suite(&params);
    let stages = r.checks.iter().map(|c| Stage::new(c.name.clone(), c.passed)).collect();
    Ok(Report::new("verify-suite", value(&params), value(&r.checks), Some(a.seed), stages))
}
