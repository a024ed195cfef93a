//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Quantities produced by the library or the binary are compared against
//! oracles computed here from first principles.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rayon::prelude::*;
use serde_json::Value;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use superpattern::pattern::{count_distinct_patterns, CensusOptions};
use superpattern::perm_encoding::{counting_ledger, EncodingParams};
use superpattern::prob::width_survival;
use superpattern::random::random_permutation;
use superpattern::seq_encoding::{count_splits, realizable_relpos_count};
use superpattern::{Permutation, RarySequence};

const BIN: &str = env!("CARGO_BIN_EXE_superpattern");

type Outcome = Result<String, String>;

fn cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(BIN).args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "`superpattern {}` exited with {}: {}",
            args.join(" "),
            out.status,
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn cli_json(args: &[&str]) -> Result<Value, String> {
    serde_json::from_str(&cli(args)?).map_err(|e| format!("bad JSON from `{}`: {e}", args.join(" ")))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn choose(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

fn fact(k: u64) -> u128 {
    (1..=u128::from(k)).product()
}

fn u64_field(v: &Value, key: &str) -> Result<u64, String> {
    v[key].as_u64().ok_or_else(|| format!("missing integer field `{key}` in {v}"))
}

fn f64_str(v: &Value, key: &str) -> Result<f64, String> {
    v[key]
        .as_str()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| format!("missing decimal field `{key}` in {v}"))
}

/// 1. The block repetition of the identity contains all of `S_k`.
fn criterion_1(dir: &Path) -> Outcome {
    let start = Instant::now();
    for k in 2..=6usize {
        let file = dir.join(format!("rep{k}.txt"));
        let ks = k.to_string();
        cli(&["construct", "--kind", "repeated-identity", "--k", &ks, "--out", file.to_str().unwrap()])?;
        let text = std::fs::read_to_string(&file).map_err(|e| e.to_string())?;
        let expected_body = (0..k).flat_map(|_| 1..=k).join(" ");
        ensure(text == format!("# r={k}\n{expected_body}\n"), || format!("k={k}: unexpected host file {text:?}"))?;
        let rep = cli_json(&["universal", "--input", file.to_str().unwrap(), "--k", &ks])?;
        ensure(rep["universal"] == Value::Bool(true), || format!("k={k}: not universal: {rep}"))?;
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok("k = 2..6 universal".into())
}

/// 2. `distinct <= min(C(n, k), k!)` over every host in the sweep.
fn criterion_2() -> Outcome {
    let mut checked = 0u64;
    let check = |entries: &[u32], r: Option<u32>| -> Result<u64, String> {
        let n = entries.len();
        let mut local = 0;
        for k in 1..=n.min(4) {
            let census = match r {
                None => count_distinct_patterns(
                    &Permutation::new(entries.to_vec()).unwrap(),
                    k,
                    CensusOptions::default(),
                ),
                Some(r) => count_distinct_patterns(
                    &RarySequence::new(entries.to_vec(), r).unwrap(),
                    k,
                    CensusOptions::default(),
                ),
            }
            .map_err(|e| e.to_string())?;
            let binom = choose(n as u64, k as u64);
            let bound = binom.min(fact(k as u64));
            ensure(u128::from(census.distinct_count) <= bound, || {
                format!("{entries:?} k={k}: {} > {bound}", census.distinct_count)
            })?;
            ensure(census.total_subsequences.to_string() == binom.to_string(), || {
                format!("{entries:?} k={k}: binom {} != {binom}", census.total_subsequences)
            })?;
            local += 1;
        }
        Ok(local)
    };
    for n in 1..=10usize {
        let perms: Vec<Vec<u32>> = (1..=n as u32).permutations(n).collect();
        checked += perms
            .par_iter()
            .map(|p| check(p, None))
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
        for r in 2..=3u32 {
            let seqs: Vec<Vec<u32>> = (0..n).map(|_| 1..=r).multi_cartesian_product().collect();
            checked += seqs
                .par_iter()
                .map(|s| check(s, Some(r)))
                .try_reduce(|| 0, |a, b| Ok(a + b))?;
        }
    }
    Ok(format!("{checked} (host, k) censuses within min(C(n,k), k!) for n <= 10, k <= 4"))
}

/// 3. Width encoding: injective and decodable on every occurrence in `S_n`.
fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut total_occ = 0u64;
    for (c, d) in [("0.4", "2"), ("0.2", "3")] {
        for n in 5..=7u64 {
            let ns = n.to_string();
            let v = cli_json(&["roundtrip-test", "--kind", "perm", "--n", &ns, "--k", "5", "--c", c, "--d", d])?;
            let occ = u64_field(&v, "occurrences")?;
            let oracle = fact(n) * choose(n, 5);
            ensure(u128::from(occ) == oracle, || format!("n={n}: {occ} occurrences, expected {oracle}"))?;
            ensure(u64_field(&v, "failures")? == 0, || format!("(c,d)=({c},{d}) n={n}: {v}"))?;
            ensure(u64_field(&v, "non_injective_hosts")? == 0, || format!("(c,d)=({c},{d}) n={n}: {v}"))?;
            ensure(v["distinct_patterns"] == v["distinct_encodings"], || format!("{v}"))?;
            total_occ += occ;
        }
    }
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!("{total_occ} occurrences roundtrip, encodings injective per host"))
}

/// Widths `b_i = t_{i+1} - t_{i-1}` for even `i`, and the selected set.
fn oracle_selection(t: &[usize], n: usize, c: f64, d: f64) -> Option<(Vec<usize>, Vec<usize>)> {
    let k = t.len();
    let s = (c * k as f64 + 1e-9).floor() as usize;
    let wide: Vec<usize> = (2..k)
        .step_by(2)
        .filter(|&i| ((t[i] - t[i - 2]) * k) as f64 >= d * n as f64)
        .collect();
    if s == 0 || wide.len() < s {
        return None;
    }
    let chosen: Vec<usize> = wide[..s].to_vec();
    let widths = chosen.iter().map(|&i| t[i] - t[i - 2]).collect();
    Some((chosen, widths))
}

/// 4. Case 2 completions per `(I, kept)` against `prod (b_i - 1)`.
fn criterion_4() -> Outcome {
    let (n, k) = (15usize, 5usize);
    let mut summary = Vec::new();
    for (c, d) in [(0.4, 2.0), (0.2, 3.0)] {
        let mut groups: HashMap<(Vec<usize>, Vec<usize>), (u64, u64)> = HashMap::new();
        for t in (1..=n).combinations(k) {
            if let Some((chosen, widths)) = oracle_selection(&t, n, c, d) {
                let kept = (1..=k).filter(|i| !chosen.contains(i)).map(|i| t[i - 1]).collect();
                let product = widths.iter().map(|&b| b as u64 - 1).product();
                let e = groups.entry((chosen, kept)).or_insert((0, product));
                e.0 += 1;
            }
        }
        let violations = groups.values().filter(|(count, product)| count < product).count();
        ensure(!groups.is_empty(), || format!("(c,d)=({c},{d}): Case 2 never occurs"))?;
        ensure(violations == 0, || format!("(c,d)=({c},{d}): {violations} oracle violations"))?;
        let ledger = counting_ledger(&EncodingParams::new(c, d, n, k).unwrap(), 1 << 20).map_err(|e| e.to_string())?;
        let subsets: u64 = groups.values().map(|g| g.0).sum();
        ensure(
            ledger.holds() && ledger.pairs == groups.len() && ledger.case2_subsets == subsets,
            || format!("(c,d)=({c},{d}): ledger {ledger:?} vs oracle {} pairs / {subsets} subsets", groups.len()),
        )?;
        summary.push(format!("(c,d)=({c},{d}): {} pairs", groups.len()));
    }
    Ok(format!("completions >= prod(b_i - 1) for every pair; {}", summary.join(", ")))
}

/// 5. Relative-position encoding: injective and decodable over `[3]^n`.
fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut total_occ = 0u64;
    for n in 1..=7u64 {
        let ns = n.to_string();
        let v = cli_json(&["roundtrip-test", "--kind", "seq", "--r", "3", "--n", &ns, "--c", "0.4"])?;
        let occ = u64_field(&v, "occurrences")?;
        // choose 3 positions, give them distinct symbols, fill the rest freely
        let oracle = if n >= 3 { choose(n, 3) * 6 * 3u128.pow(n as u32 - 3) } else { 0 };
        ensure(u128::from(occ) == oracle, || format!("n={n}: {occ} occurrences, expected {oracle}"))?;
        ensure(u64_field(&v, "failures")? == 0, || format!("n={n}: {v}"))?;
        ensure(u64_field(&v, "non_injective_hosts")? == 0, || format!("n={n}: {v}"))?;
        total_occ += occ;
    }
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("{total_occ} occurrences roundtrip over [3]^n, n <= 7"))
}

fn gamma2_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        1.0 - (-x).exp() * (1.0 + x)
    }
}

/// 6. Width tail and width law of uniform subsets.
fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut worst_ks = 0.0f64;
    for d in [1.0f64, 2.0, 3.0] {
        let ds = d.to_string();
        let v = cli_json(&[
            "simulate", "widths", "--n", "10000", "--k", "100", "--d", &ds, "--trials", "10000", "--seed", "2024",
        ])?;
        let frac = v["fraction"].as_f64().ok_or("missing fraction")?;
        let exact = (-d).exp() * (1.0 + d);
        ensure((frac - exact).abs() <= 0.01, || format!("d={d}: fraction {frac} vs {exact}"))?;
        worst_ks = worst_ks.max(v["ks_distance"].as_f64().ok_or("missing ks_distance")?);
        parts.push(format!("d={d}: {frac:.4} vs {exact:.4}"));
    }
    // recompute the KS distance here from the raw widths
    let csv = cli(&[
        "simulate", "widths", "--n", "10000", "--k", "100", "--d", "1", "--trials", "10000", "--seed", "2024",
        "--format", "csv",
    ])?;
    let mut scaled: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap() / 100.0)
        .collect();
    scaled.sort_by(f64::total_cmp);
    let m = scaled.len() as f64;
    let mut ks = 0.0f64;
    let mut i = 0;
    while i < scaled.len() {
        let mut j = i;
        while j < scaled.len() && scaled[j] == scaled[i] {
            j += 1;
        }
        let f = gamma2_cdf(scaled[i]);
        ks = ks.max((f - i as f64 / m).abs()).max((j as f64 / m - f).abs());
        i = j;
    }
    ensure(ks <= 0.02, || format!("KS distance {ks}"))?;
    ensure((ks - worst_ks).abs() < 1e-12, || format!("binary KS {worst_ks} vs oracle {ks}"))?;
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("{}; KS {ks:.4}", parts.join(", ")))
}

/// 7. Realizable relative-position vectors equal splits + 1.
fn criterion_7() -> Outcome {
    let checked: u64 = (1..=8usize)
        .map(|n| {
            let seqs: Vec<Vec<u32>> = (0..n).map(|_| 1..=3u32).multi_cartesian_product().collect();
            seqs.par_iter()
                .map(|values| -> Result<u64, String> {
                    let seq = RarySequence::new(values.clone(), 3).unwrap();
                    let mut local = 0;
                    for m in 1..=3u32 {
                        let own: Vec<usize> = (1..=n).filter(|&p| values[p - 1] == m).collect();
                        if own.is_empty() {
                            continue;
                        }
                        let others: Vec<usize> = (1..=n).filter(|&p| values[p - 1] != m).collect();
                        for prefix in others.iter().copied().powerset() {
                            let splits = own
                                .windows(2)
                                .filter(|w| prefix.iter().any(|&p| w[0] < p && p < w[1]))
                                .count();
                            let vectors: BTreeSet<Vec<bool>> =
                                own.iter().map(|&s| prefix.iter().map(|&p| s < p).collect()).collect();
                            let lib_splits = count_splits(&seq, m, &prefix).map_err(|e| e.to_string())?;
                            let lib_real = realizable_relpos_count(&seq, m, &prefix).map_err(|e| e.to_string())?;
                            ensure(
                                vectors.len() == splits + 1 && lib_real == vectors.len() && lib_splits == splits,
                                || format!("{values:?} m={m} prefix={prefix:?}: {} vectors, {splits} splits", vectors.len()),
                            )?;
                            local += 1;
                        }
                    }
                    Ok(local)
                })
                .try_reduce(|| 0, |a, b| Ok(a + b))
        })
        .sum::<Result<u64, String>>()?;
    Ok(format!("{checked} (sequence, symbol, prefix) triples over [3]^n, n <= 8"))
}

/// 8. Every certificate holds at its defaults with the expected margins.
fn criterion_8() -> Outcome {
    let start = Instant::now();
    let all = cli_json(&["certify", "all"])?;
    let elapsed = start.elapsed();
    let certs: BTreeMap<String, Value> = all
        .as_array()
        .ok_or("certify all: not an array")?
        .iter()
        .map(|c| (c["name"].as_str().unwrap_or_default().to_string(), c.clone()))
        .collect();
    ensure(certs.len() == 9, || format!("{} certificates", certs.len()))?;
    for (name, c) in &certs {
        ensure(c["satisfied"] == Value::Bool(true), || format!("{name} not satisfied: {c}"))?;
    }
    let thm1 = f64_str(&certs["thm1"], "margin_log")?;
    ensure((thm1 + 6.1e-7).abs() <= 2e-7, || format!("thm1 margin {thm1}"))?;
    let lam = f64_str(&certs["lam_binom"], "margin_log")?;
    ensure((lam - 5.8e-9).abs() <= 1e-9, || format!("lam_binom margin {lam}"))?;
    let cap = 0.999924f64.ln();
    for (name, rate) in [("lem31_chernoff", -7.65e-5), ("lem31_binomial", -7.63e-5)] {
        let lhs = f64_str(&certs[name], "lhs_log")?;
        let rhs = f64_str(&certs[name], "rhs_log")?;
        ensure((lhs - rate).abs() < 5e-7 && lhs <= rhs && (rhs - cap).abs() < 1e-12, || {
            format!("{name}: lhs_log {lhs}, rhs_log {rhs}")
        })?;
    }
    let survival = width_survival(8.283).map_err(|e| e.to_string())?;
    let oracle = (-8.283f64).exp() * 9.283;
    ensure((survival - 2.3465e-3).abs() <= 1e-7 && survival > 0.0015 && (survival - oracle).abs() < 1e-15, || {
        format!("width survival {survival}")
    })?;
    let base = f64_str(&certs["lem52"], "lhs_log")?.exp();
    let base_oracle = 0.1f64.powf(0.01) / 0.99f64.powf(0.99);
    ensure((base - 0.98701).abs() <= 1e-5 && base <= 0.988 && (base - base_oracle).abs() < 1e-12, || {
        format!("lem52 base {base}")
    })?;
    for name in ["prop41", "thm2", "lem51_expected", "lem51_azuma"] {
        let m = f64_str(&certs[name], "margin_log")?;
        ensure(m < 0.0, || format!("{name} margin {m}"))?;
    }
    let prop41 = f64_str(&certs["prop41"], "margin_log")?;
    ensure((prop41 - (2f64.ln() - 20.0)).abs() < 1e-9, || format!("prop41 margin {prop41}"))?;
    let thm2 = f64_str(&certs["thm2"], "margin_log")?;
    ensure((thm2 - (1001f64.ln() - 400.0)).abs() < 1e-9, || format!("thm2 margin {thm2}"))?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("9/9 satisfied; thm1 {thm1:.3e}, lam_binom {lam:.3e}, lem52 base {base:.6}"))
}

/// 9. Law of the first gap `a_0` against `C(n - j, k - 1) / C(n, k)`.
fn criterion_9() -> Outcome {
    let (n, k, trials) = (12usize, 4usize, 1_000_000u64);
    let v = cli_json(&[
        "simulate", "composition", "--n", "12", "--k", "4", "--trials", "1000000", "--seed", "99",
    ])?;
    let counts: Vec<u64> = v["first_gap_counts"]
        .as_array()
        .ok_or("missing first_gap_counts")?
        .iter()
        .map(|c| c.as_u64().unwrap())
        .collect();
    // exact law by enumerating every subset
    let mut exact = vec![0u64; n - k + 1];
    for t in (1..=n).combinations(k) {
        exact[t[0] - 1] += 1;
    }
    let total: u64 = exact.iter().sum();
    ensure(counts.len() == exact.len() && counts.iter().sum::<u64>() == trials, || format!("{counts:?}"))?;
    let stat: f64 = counts
        .iter()
        .zip(&exact)
        .map(|(&o, &e)| {
            let expected = trials as f64 * e as f64 / total as f64;
            (o as f64 - expected).powi(2) / expected
        })
        .sum();
    let df = (exact.len() - 1) as f64;
    let critical = ChiSquared::new(df).unwrap().inverse_cdf(0.99);
    ensure(stat <= critical, || format!("chi-square {stat:.3} > {critical:.3}"))?;
    Ok(format!("chi-square {stat:.3} <= {critical:.3} (df {df})"))
}

/// 10. Census output does not depend on the number of workers.
fn criterion_10(dir: &Path) -> Outcome {
    let start = Instant::now();
    let host = random_permutation(28, 10).map_err(|e| e.to_string())?;
    let file = dir.join("host28.txt");
    std::fs::write(&file, format!("{host}\n")).map_err(|e| e.to_string())?;
    let outputs = [1, 4, 8]
        .iter()
        .map(|p| {
            let ps = p.to_string();
            cli(&["count-patterns", "--input", file.to_str().unwrap(), "--k", "6", "--list-ranks", "--parallelism", &ps])
        })
        .collect::<Result<Vec<_>, _>>()?;
    ensure(outputs.iter().all(|o| o == &outputs[0]), || "outputs differ across parallelism".into())?;
    let library = count_distinct_patterns(&host, 6, CensusOptions::default()).map_err(|e| e.to_string())?;
    let v: Value = serde_json::from_str(&outputs[0]).map_err(|e| e.to_string())?;
    ensure(v["distinct"].as_u64() == Some(library.distinct_count), || format!("{v}"))?;
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!(
        "{} distinct patterns, {} bytes identical at parallelism 1/4/8",
        library.distinct_count,
        outputs[0].len()
    ))
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let criteria: Vec<Criterion> = vec![
        ("universality of the k^2 construction", Box::new(|| criterion_1(dir.path()))),
        ("census within the counting bound", Box::new(criterion_2)),
        ("width encoding injective and decodable", Box::new(criterion_3)),
        ("counting ledger for Case 2", Box::new(criterion_4)),
        ("sequence encoding injective and decodable", Box::new(criterion_5)),
        ("width tail and width law", Box::new(criterion_6)),
        ("realizable vectors equal splits + 1", Box::new(criterion_7)),
        ("certificate suite", Box::new(criterion_8)),
        ("first-gap law", Box::new(criterion_9)),
        ("parallel determinism of the census", Box::new(|| criterion_10(dir.path()))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{took:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{took:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
