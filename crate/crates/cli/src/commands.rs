use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use superpattern::format::write_host;
use superpattern::pattern::{
    construct_repeated_identity, contains, count_distinct_patterns, is_universal, CensusOptions,
};
use superpattern::perm_encoding::{
    census_encodings, compute_widths, decode_perm, encode_perm, roundtrip_all, select_indices,
    EncodingParams, PermEncoding,
};
use superpattern::prob::{
    certify, gamma2_cdf, ks_distance, scaled_width_samples, simulate_compositions, simulate_widths,
    trivial_bounds, width_survival, CERTIFICATE_NAMES,
};
use superpattern::random::stream_rng;
use superpattern::seq_encoding::{
    census_seq_encodings, decode_seq, encode_seq, full_gaps, realizable_relpos_count, roundtrip_all_seq,
    simulate_splits, split_reports, value_indexed, verify_fullgap_lemma, LemmaThresholds, SeqEncoding,
};
use superpattern::{lift, rank_pattern, AnyHost, Error, Occurrence, Permutation, RarySequence};

use crate::input::{self, expect_perm, expect_seq, json_arg, load_host};
use crate::output::{emit, CliError, CliResult, Format, Payload, Table};
use crate::{Cli, Command, ConstructKind, HostKind, Simulation};

pub fn run(cli: &Cli) -> CliResult<()> {
    let parallelism = match cli.parallelism {
        Some(0) => return Err(CliError::Usage("--parallelism must be >= 1".into())),
        Some(p) => p,
        None => std::thread::available_parallelism().map_or(1, |p| p.get()),
    };
    // Already-initialized pools only happen in embedding tests; results do not
    // depend on the thread count.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(parallelism).build_global();
    let opts = CensusOptions {
        parallelism,
        budget: cli.budget,
    };
    let payload = dispatch(&cli.command, opts, cli.format)?;
    let body = payload.render(cli.format)?;
    emit(&body, cli.out.as_deref())
}

fn dispatch(command: &Command, opts: CensusOptions, format: Option<Format>) -> CliResult<Payload> {
    match command {
        Command::Construct { kind, k } => construct(*kind, *k),
        Command::Contains { host, alphabet, pi } => {
            let host = load_host(host, Some(alphabet))?;
            let pi = input::pattern(pi)?;
            let occ = contains(&host, &pi);
            Ok(Payload::json(&json!({
                "contained": occ.is_some(),
                "occurrence": occ.as_ref().map(Occurrence::indices),
            })))
        }
        Command::CountPatterns { host, alphabet, k, list_ranks } => {
            let host = load_host(host, Some(alphabet))?;
            let census = count_distinct_patterns(&host, *k, opts)?;
            let mut v = serde_json::to_value(census.summary()).expect("summary serializes");
            if *list_ranks {
                let ranks: Vec<u64> = census
                    .patterns()
                    .iter()
                    .map(|p| rank_pattern(p).expect("k <= 20").0)
                    .collect();
                v["present_ranks"] = json!(ranks);
            }
            Ok(Payload::from_value(v))
        }
        Command::Universal { host, alphabet, k } => {
            let host = load_host(host, Some(alphabet))?;
            Ok(Payload::json(&is_universal(&host, *k)?))
        }
        Command::EncodePerm { host, occ, params } => {
            let host = expect_perm(load_host(host, None)?)?;
            let occ = input::positional(occ)?;
            let p = EncodingParams::new(params.c, params.d, host.len(), occ.len())?;
            Ok(Payload::json(&encode_perm(&host, &occ, &p)?))
        }
        Command::DecodePerm { host, encoding, params } => {
            let host = expect_perm(load_host(host, None)?)?;
            let enc: PermEncoding = json_arg(encoding)?;
            let k = match &enc {
                PermEncoding::Case1 { indices } => indices.len(),
                PermEncoding::Case2 { selected, kept, .. } => selected.len() + kept.len(),
            };
            let p = EncodingParams::new(params.c, params.d, host.len(), k)?;
            let pi = decode_perm(&host, &enc, &p)?;
            Ok(Payload::json(&json!({ "pattern": pi })))
        }
        Command::EncodeSeq { host, alphabet, occ, value_indexed: vi, c } => {
            let seq = expect_seq(load_host(host, Some(alphabet))?)?;
            let idx = input::indices(occ)?;
            let occ = if *vi {
                Occurrence::value_indexed(idx)?
            } else {
                value_indexed(&seq, &Occurrence::positional(idx)?)?
            };
            Ok(Payload::json(&encode_seq(&seq, &occ, *c)?))
        }
        Command::DecodeSeq { host, alphabet, encoding, c } => {
            let seq = expect_seq(load_host(host, Some(alphabet))?)?;
            let enc: SeqEncoding = json_arg(encoding)?;
            let pi = decode_seq(&seq, &enc, *c)?;
            Ok(Payload::json(&json!({ "pattern": pi })))
        }
        Command::Widths { n, occ, params } => {
            let occ = input::positional(occ)?;
            let p = EncodingParams::new(params.c, params.d, *n, occ.len())?;
            let profile = compute_widths(&occ, &p)?;
            let selected = select_indices(&profile, &p);
            let mut v = serde_json::to_value(&profile).expect("profile serializes");
            v["selected_count"] = json!(p.selected_count());
            v["case"] = json!(if selected.is_some() { 2 } else { 1 });
            v["selected"] = json!(selected);
            Ok(Payload::from_value(v))
        }
        Command::Splits { host, alphabet, prefix, m, k, full_frac, common_frac } => {
            let seq = expect_seq(load_host(host, Some(alphabet))?)?;
            let prefix = input::indices(prefix)?;
            let k = k.unwrap_or(seq.alphabet_size() as usize);
            let reports = split_reports(&seq, k, &prefix, *full_frac, *common_frac)?;
            match m {
                None => Ok(Payload::json(&reports)),
                Some(m) => {
                    let report = reports
                        .into_iter()
                        .find(|r| r.m == *m)
                        .ok_or(Error::ValueOutOfRange { value: i64::from(*m), r: seq.alphabet_size() })?;
                    let mut v = serde_json::to_value(&report).expect("report serializes");
                    v["realizable_relpos"] = json!(realizable_relpos_count(&seq, *m, &prefix)?);
                    Ok(Payload::from_value(v))
                }
            }
        }
        Command::FullGaps {
            host,
            alphabet,
            m,
            k,
            full_frac,
            common_frac,
            witness_frac,
            hypothesis_frac,
        } => {
            let seq = expect_seq(load_host(host, Some(alphabet))?)?;
            match m {
                Some(m) => Ok(Payload::json(&full_gaps(&seq, *m, *full_frac)?)),
                None => {
                    let th = LemmaThresholds {
                        full_frac: *full_frac,
                        common_frac: *common_frac,
                        witness_frac: *witness_frac,
                        hypothesis_frac: *hypothesis_frac,
                    };
                    let k = k.unwrap_or(seq.alphabet_size() as usize);
                    Ok(Payload::json(&verify_fullgap_lemma(&seq, k, &th)))
                }
            }
        }
        Command::Simulate { what } => simulate(what, format),
        Command::Certify { name, params } => certify_cmd(name, params),
        Command::TrivialBounds { n, k, r } => Ok(Payload::json(&trivial_bounds(*n, *k, *r)?)),
        Command::RoundtripTest { kind, n, k, sigma, input, r, c, d } => {
            let hosts = match n {
                Some(n) => sweep_hosts(*kind, *n, *r)?,
                None => {
                    let host = input::load(sigma.as_deref(), input.as_deref(), *r)?;
                    match (kind, host) {
                        (HostKind::Perm, AnyHost::Seq(_)) => return Err(expect_perm_err()),
                        (HostKind::Seq, AnyHost::Perm(_)) => {
                            return Err(CliError::Usage("--kind seq needs --r or a `# r=` header".into()))
                        }
                        (_, h) => vec![h],
                    }
                }
            };
            Ok(Payload::json(&roundtrip_sweep(&hosts, *k, *c, *d, opts.budget)?))
        }
    }
}

fn expect_perm_err() -> CliError {
    CliError::Usage("--kind perm needs a permutation host".into())
}

fn construct(kind: ConstructKind, k: usize) -> CliResult<Payload> {
    let seq = construct_repeated_identity(k)?;
    let host = match kind {
        ConstructKind::RepeatedIdentity => AnyHost::Seq(seq),
        ConstructKind::LiftedIdentity => AnyHost::Perm(lift(&seq)),
    };
    let json = match &host {
        AnyHost::Seq(s) => json!({ "r": s.alphabet_size(), "values": s.as_slice() }),
        AnyHost::Perm(p) => json!({ "values": p.as_slice() }),
    };
    Ok(Payload {
        json,
        text: Some(write_host(&host)),
        csv: None,
        default: Format::Text,
    })
}

fn simulate(what: &Simulation, format: Option<Format>) -> CliResult<Payload> {
    let want_csv = format == Some(Format::Csv);
    match what {
        Simulation::Widths { n, k, d, trials, seed } => {
            if want_csv {
                let rows = simulate_widths(*n, *k, *d, *trials, *seed)?
                    .into_iter()
                    .map(|r| vec![r.trial.to_string(), r.i.to_string(), r.b_i.to_string(), u8::from(r.qualifies).to_string()])
                    .collect();
                return Ok(table(vec!["trial", "i", "b_i", "qualifies"], rows));
            }
            let tail = superpattern::prob::empirical_width_tail(*n, *k, *d, *trials, *seed)?;
            let scaled = scaled_width_samples(*n, *k, *trials, *seed)?;
            Ok(Payload::json(&json!({
                "n": n,
                "k": k,
                "d": d,
                "trials": trials,
                "seed": seed,
                "threshold": d * *n as f64 / *k as f64,
                "widths_per_trial": tail.widths_per_trial,
                "qualifying": tail.qualifying,
                "fraction": tail.fraction,
                "std_error": tail.std_error,
                "survival": width_survival(*d)?,
                "ks_distance": ks_distance(&scaled, gamma2_cdf),
            })))
        }
        Simulation::Composition { n, k, trials, seed } => {
            if want_csv {
                if *k == 0 || k > n {
                    return Err(Error::SubsetTooLarge { n: *n, k: *k }.into());
                }
                let rows = (0..*trials)
                    .flat_map(|t| {
                        let g = superpattern::prob::sampling::sample_composition_with(*n, *k, &mut stream_rng(*seed, t))
                            .expect("k <= n checked");
                        g.gaps
                            .into_iter()
                            .enumerate()
                            .map(move |(i, a)| vec![t.to_string(), i.to_string(), a.to_string()])
                    })
                    .collect();
                return Ok(table(vec!["trial", "i", "a_i"], rows));
            }
            let summary = simulate_compositions(*n, *k, *trials, *seed)?;
            let exact: Vec<f64> = (1..=n - k + 1).map(|j| first_gap_probability(*n, *k, j)).collect();
            let mut v = serde_json::to_value(&summary).expect("summary serializes");
            v["seed"] = json!(seed);
            v["first_gap_exact"] = json!(exact);
            Ok(Payload::from_value(v))
        }
        Simulation::Splits { host, alphabet, m, prefix_symbols, full_frac, trials, seed } => {
            let seq = expect_seq(load_host(host, Some(alphabet))?)?;
            let prefix = input::symbols(prefix_symbols)?;
            Ok(Payload::json(&simulate_splits(&seq, *m, &prefix, *full_frac, *trials, *seed)?))
        }
    }
}

fn table(header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Payload {
    Payload {
        json: serde_json::Value::Null,
        text: None,
        csv: Some(Table { header, rows }),
        default: Format::Csv,
    }
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// `P(a_0 = j) = C(n - j, k - 1) / C(n, k)`.
fn first_gap_probability(n: usize, k: usize, j: usize) -> f64 {
    (ln_binomial(n - j, k - 1) - ln_binomial(n, k)).exp()
}

fn certify_cmd(name: &str, raw: &[String]) -> CliResult<Payload> {
    let mut params = BTreeMap::new();
    for p in raw {
        let (key, value) = p
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--param expects key=value, got '{p}'")))?;
        params.insert(key.trim().to_string(), value.trim().to_string());
    }
    if name == "all" {
        if !params.is_empty() {
            return Err(CliError::Usage("--param cannot be combined with `certify all`".into()));
        }
        let certs = CERTIFICATE_NAMES
            .iter()
            .map(|n| certify(n, &params))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Payload::json(&certs));
    }
    Ok(Payload::json(&certify(name, &params)?))
}

fn sweep_hosts(kind: HostKind, n: usize, r: Option<u32>) -> CliResult<Vec<AnyHost>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()).into());
    }
    match kind {
        HostKind::Perm => Ok((1..=n as u32)
            .permutations(n)
            .map(|v| AnyHost::Perm(Permutation::new(v).expect("permutation of 1..n")))
            .collect()),
        HostKind::Seq => {
            let r = r.ok_or_else(|| CliError::Usage("--kind seq needs --r".into()))?;
            if r == 0 {
                return Err(Error::InvalidParameter("r must be >= 1".into()).into());
            }
            Ok((0..n)
                .map(|_| 1..=r)
                .multi_cartesian_product()
                .map(|v| AnyHost::Seq(RarySequence::new(v, r).expect("values in 1..r")))
                .collect())
        }
    }
}

#[derive(Debug, Default, Serialize)]
struct RoundtripSummary {
    hosts: u64,
    occurrences: u64,
    failures: u64,
    distinct_patterns: u64,
    distinct_encodings: u64,
    /// Hosts where two distinct patterns share an encoding.
    non_injective_hosts: u64,
    first_failure: Option<serde_json::Value>,
}

struct HostOutcome {
    occurrences: u64,
    failures: u64,
    first_failure: Option<Vec<usize>>,
    patterns: usize,
    encodings: usize,
}

fn roundtrip_host(host: &AnyHost, k: Option<usize>, c: f64, d: f64, budget: u64) -> CliResult<HostOutcome> {
    let opts = CensusOptions { parallelism: 1, budget };
    match host {
        AnyHost::Perm(p) => {
            let k = k.ok_or_else(|| CliError::Usage("--kind perm needs --k".into()))?;
            let params = EncodingParams::new(c, d, p.len(), k)?;
            if k > p.len() {
                return Err(Error::SubsetTooLarge { n: p.len(), k }.into());
            }
            let rt = roundtrip_all(p, &params, budget)?;
            let census = census_encodings(p, &params, opts)?;
            Ok(HostOutcome {
                occurrences: rt.occurrences,
                failures: rt.failures,
                first_failure: rt.first_failure,
                patterns: census.distinct_patterns,
                encodings: census.distinct_encodings,
            })
        }
        AnyHost::Seq(s) => {
            if k.is_some_and(|k| k != s.alphabet_size() as usize) {
                return Err(CliError::Usage("sequence roundtrips use k = r".into()));
            }
            let rt = roundtrip_all_seq(s, c, budget)?;
            let census = census_seq_encodings(s, c, opts)?;
            Ok(HostOutcome {
                occurrences: rt.occurrences,
                failures: rt.failures,
                first_failure: rt.first_failure,
                patterns: census.distinct_patterns,
                encodings: census.distinct_encodings,
            })
        }
    }
}

fn roundtrip_sweep(hosts: &[AnyHost], k: Option<usize>, c: f64, d: f64, budget: u64) -> CliResult<RoundtripSummary> {
    let outcomes: Vec<HostOutcome> = hosts
        .par_iter()
        .map(|h| roundtrip_host(h, k, c, d, budget))
        .collect::<CliResult<_>>()?;
    let mut summary = RoundtripSummary::default();
    for (host, o) in hosts.iter().zip(outcomes) {
        summary.hosts += 1;
        summary.occurrences += o.occurrences;
        summary.failures += o.failures;
        summary.distinct_patterns += o.patterns as u64;
        summary.distinct_encodings += o.encodings as u64;
        if o.patterns != o.encodings {
            summary.non_injective_hosts += 1;
        }
        if summary.first_failure.is_none() {
            if let Some(occ) = o.first_failure {
                summary.first_failure = Some(json!({ "host": host_values(host), "occurrence": occ }));
            }
        }
    }
    Ok(summary)
}

fn host_values(host: &AnyHost) -> &[u32] {
    match host {
        AnyHost::Perm(p) => p.as_slice(),
        AnyHost::Seq(s) => s.as_slice(),
    }
}
