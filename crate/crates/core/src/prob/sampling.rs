//! Random compositions, simplex samples and width statistics.

use rand::distr::Open01;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::random::{sorted_subset, stream_rng};

/// Gaps `a_0..=a_k` of a size-`k` subset `t_1 < .. < t_k` of `1..=n`, with
/// `a_0 = t_1`, `a_i = t_{i+1} - t_i` and `a_k = n + 1 - t_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapProfile {
    pub n: usize,
    pub gaps: Vec<usize>,
}

impl GapProfile {
    pub fn from_subset(n: usize, subset: &[usize]) -> Result<GapProfile> {
        if subset.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidOccurrence("subset must be strictly increasing".into()));
        }
        if let Some(&bad) = subset.iter().find(|&&t| t == 0 || t > n) {
            return Err(Error::IndexOutOfRange { index: bad, n });
        }
        let mut gaps = Vec::with_capacity(subset.len() + 1);
        let mut prev = 0;
        for &t in subset {
            gaps.push(t - prev);
            prev = t;
        }
        gaps.push(n + 1 - prev);
        Ok(GapProfile { n, gaps })
    }

    pub fn k(&self) -> usize {
        self.gaps.len() - 1
    }

    /// `b_i = a_i + a_{i-1}` for `i = 1..=k`; entry `i - 1` holds `b_i`.
    pub fn widths(&self) -> Vec<usize> {
        self.gaps.windows(2).map(|w| w[0] + w[1]).collect()
    }

    /// `(i, b_i)` for even `i` with `2 <= i <= k - 1`.
    pub fn even_widths(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.k();
        (2..k).step_by(2).map(move |i| (i, self.gaps[i] + self.gaps[i - 1]))
    }
}

/// Uniform composition of `n + 1` into `k + 1` positive parts, read off a
/// uniform size-`k` subset of `1..=n`.
pub fn sample_composition(n: usize, k: usize, seed: u64) -> Result<GapProfile> {
    sample_composition_with(n, k, &mut stream_rng(seed, 0))
}

pub fn sample_composition_with<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<GapProfile> {
    let subset = sorted_subset(n, k, rng)?;
    GapProfile::from_subset(n, &subset)
}

/// A uniform point of the simplex `{x >= 0, sum x = n + 1}` in `R^{k+1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexSample {
    /// The rate-1 exponentials the point was built from.
    pub xi: Vec<f64>,
    pub x: Vec<f64>,
    pub floors: Vec<u64>,
    /// `B_i = X_i + X_{i-1}` for `i = 1..=k`.
    pub pair_sums: Vec<f64>,
}

pub fn sample_simplex(n: usize, k: usize, seed: u64) -> SimplexSample {
    sample_simplex_with(n, k, &mut stream_rng(seed, 0))
}

pub fn sample_simplex_with<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> SimplexSample {
    let xi: Vec<f64> = (0..=k)
        .map(|_| {
            let u: f64 = rng.sample(Open01);
            -u.ln()
        })
        .collect();
    let total: f64 = xi.iter().sum();
    let scale = (n + 1) as f64 / total;
    let mut x: Vec<f64> = xi.iter().map(|v| v * scale).collect();
    // push the rounding residue into the largest coordinate
    let residue = (n + 1) as f64 - x.iter().sum::<f64>();
    let big = (0..x.len()).max_by(|&a, &b| x[a].total_cmp(&x[b])).expect("k + 1 >= 1 entries");
    x[big] += residue;
    let floors = x.iter().map(|v| v.floor() as u64).collect();
    let pair_sums = x.windows(2).map(|w| w[0] + w[1]).collect();
    SimplexSample { xi, x, floors, pair_sums }
}

/// Pooled fraction of even-index widths reaching `d * n / k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthTail {
    pub trials: u64,
    pub widths_per_trial: u64,
    pub qualifying: u64,
    pub fraction: f64,
    /// Standard error of `fraction` from the spread of per-trial fractions.
    pub std_error: f64,
}

fn check_width_args(n: usize, k: usize, d: f64, trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if !(d.is_finite() && d >= 0.0) {
        return Err(Error::InvalidParameter(format!("d must be finite and >= 0, got {d}")));
    }
    if k < 3 {
        return Err(Error::InvalidParameter(format!("k = {k} has no even interior widths")));
    }
    if k > n {
        return Err(Error::SubsetTooLarge { n, k });
    }
    Ok(())
}

/// Per-trial count of qualifying even-index widths; trial `t` uses stream `t`.
fn qualifying_counts(n: usize, k: usize, threshold: f64, trials: u64, seed: u64) -> Vec<u64> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t);
            let g = sample_composition_with(n, k, &mut rng).expect("k <= n checked");
            g.even_widths().filter(|&(_, b)| b as f64 >= threshold).count() as u64
        })
        .collect()
}

pub fn empirical_width_tail(n: usize, k: usize, d: f64, trials: u64, seed: u64) -> Result<WidthTail> {
    check_width_args(n, k, d, trials)?;
    let per_trial = ((k - 1) / 2) as u64;
    let threshold = d * n as f64 / k as f64;
    let counts = qualifying_counts(n, k, threshold, trials, seed);
    let sum: u64 = counts.iter().sum();
    let sum_sq: u128 = counts.iter().map(|&c| u128::from(c) * u128::from(c)).sum();
    let tf = trials as f64;
    let w = per_trial as f64;
    let mean = sum as f64 / tf;
    let std_error = if trials > 1 {
        let var = (sum_sq as f64 - tf * mean * mean) / (tf - 1.0);
        (var.max(0.0) / tf).sqrt() / w
    } else {
        f64::NAN
    };
    Ok(WidthTail {
        trials,
        widths_per_trial: per_trial,
        qualifying: sum,
        fraction: sum as f64 / (tf * w),
        std_error,
    })
}

/// Fraction of trials in which fewer than `required` even-index widths reach
/// `d * n / k`, with its binomial standard error.
pub fn width_shortfall_rate(
    n: usize,
    k: usize,
    d: f64,
    required: f64,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    check_width_args(n, k, d, trials)?;
    let threshold = d * n as f64 / k as f64;
    let counts = qualifying_counts(n, k, threshold, trials, seed);
    let short = counts.iter().filter(|&&c| (c as f64) < required).count() as f64;
    let p = short / trials as f64;
    Ok((p, (p * (1.0 - p) / trials as f64).sqrt()))
}

/// One row per even-index width: `(trial, i, b_i, qualifies)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WidthRecord {
    pub trial: u64,
    pub i: usize,
    pub b_i: usize,
    pub qualifies: bool,
}

pub fn simulate_widths(n: usize, k: usize, d: f64, trials: u64, seed: u64) -> Result<Vec<WidthRecord>> {
    check_width_args(n, k, d, trials)?;
    let threshold = d * n as f64 / k as f64;
    let rows = (0..trials)
        .into_par_iter()
        .flat_map_iter(|t| {
            let mut rng = stream_rng(seed, t);
            let g = sample_composition_with(n, k, &mut rng).expect("k <= n checked");
            g.even_widths()
                .map(|(i, b)| WidthRecord {
                    trial: t,
                    i,
                    b_i: b,
                    qualifies: b as f64 >= threshold,
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(rows)
}

/// Even-index widths scaled by `k / n`, in trial order.
pub fn scaled_width_samples(n: usize, k: usize, trials: u64, seed: u64) -> Result<Vec<f64>> {
    let rows = simulate_widths(n, k, 0.0, trials, seed)?;
    let unit = n as f64 / k as f64;
    Ok(rows.into_iter().map(|r| r.b_i as f64 / unit).collect())
}

/// Aggregate of `trials` uniform compositions; trial `t` uses stream `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositionSummary {
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    /// Mean of each gap `a_0..a_k`.
    pub mean_gaps: Vec<f64>,
    /// `first_gap_counts[j - 1]` is the number of trials with `a_0 = j`,
    /// for `j = 1..=n - k + 1`.
    pub first_gap_counts: Vec<u64>,
}

pub fn simulate_compositions(n: usize, k: usize, trials: u64, seed: u64) -> Result<CompositionSummary> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if k == 0 || k > n {
        return Err(Error::SubsetTooLarge { n, k });
    }
    let zero = || (vec![0u64; k + 1], vec![0u64; n - k + 1]);
    let (sums, counts) = (0..trials)
        .into_par_iter()
        .fold(zero, |(mut sums, mut counts), t| {
            let g = sample_composition_with(n, k, &mut stream_rng(seed, t)).expect("k <= n checked");
            for (s, &a) in sums.iter_mut().zip(&g.gaps) {
                *s += a as u64;
            }
            counts[g.gaps[0] - 1] += 1;
            (sums, counts)
        })
        .reduce(zero, |(mut s1, mut c1), (s2, c2)| {
            s1.iter_mut().zip(s2).for_each(|(a, b)| *a += b);
            c1.iter_mut().zip(c2).for_each(|(a, b)| *a += b);
            (s1, c1)
        });
    Ok(CompositionSummary {
        n,
        k,
        trials,
        mean_gaps: sums.iter().map(|&s| s as f64 / trials as f64).collect(),
        first_gap_counts: counts,
    })
}

/// Kolmogorov-Smirnov distance between the empirical law of `samples` and a
/// continuous CDF. Tied samples are treated as a single jump.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let total = v.len() as f64;
    let mut worst = 0.0f64;
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        let f = cdf(v[i]);
        worst = worst
            .max((f - i as f64 / total).abs())
            .max((j as f64 / total - f).abs());
        i = j;
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::bounds::{gamma2_cdf, width_survival};

    #[test]
    fn composition_summary() {
        let s = simulate_compositions(10, 3, 20_000, 5).unwrap();
        assert_eq!(s.first_gap_counts.len(), 8);
        assert_eq!(s.first_gap_counts.iter().sum::<u64>(), 20_000);
        // gaps sum to n + 1 in every trial
        assert!((s.mean_gaps.iter().sum::<f64>() - 11.0).abs() < 1e-9);
        // E[a_0] = (n + 1) / (k + 1)
        assert!((s.mean_gaps[0] - 2.75).abs() < 0.05);
        assert_eq!(s, simulate_compositions(10, 3, 20_000, 5).unwrap());
        assert!(simulate_compositions(3, 4, 10, 0).is_err());
        assert!(simulate_compositions(3, 2, 0, 0).is_err());
    }

    #[test]
    fn composition_shapes() {
        let g = sample_composition(5, 5, 1).unwrap();
        assert_eq!(g.gaps, vec![1; 6]);
        let g = sample_composition(50, 7, 2).unwrap();
        assert_eq!(g.gaps.iter().sum::<usize>(), 51);
        assert!(g.gaps.iter().all(|&a| a >= 1));
        assert!(g.widths().iter().all(|&b| b >= 2));
        assert!(sample_composition(3, 4, 0).is_err());
    }

    #[test]
    fn gaps_match_explicit_subset() {
        let g = GapProfile::from_subset(12, &[2, 5, 6, 9, 12]).unwrap();
        assert_eq!(g.gaps, vec![2, 3, 1, 3, 3, 1]);
        let even: Vec<_> = g.even_widths().collect();
        assert_eq!(even, vec![(2, 4), (4, 6)]);
        assert!(GapProfile::from_subset(4, &[3, 2]).is_err());
        assert!(GapProfile::from_subset(4, &[5]).is_err());
    }

    #[test]
    fn composition_means_are_symmetric() {
        let (n, k, draws) = (100usize, 9usize, 100_000u64);
        let mut sums = vec![0u64; k + 1];
        let mut rng = stream_rng(77, 0);
        for _ in 0..draws {
            let g = sample_composition_with(n, k, &mut rng).unwrap();
            for (s, a) in sums.iter_mut().zip(&g.gaps) {
                *s += *a as u64;
            }
        }
        for s in sums {
            let mean = s as f64 / draws as f64;
            assert!((mean - 10.1).abs() < 0.1, "mean {mean}");
        }
    }

    #[test]
    fn simplex_sums_and_means() {
        let s = sample_simplex(40, 6, 3);
        assert!((s.x.iter().sum::<f64>() - 41.0).abs() < 1e-9);
        assert!(s.xi.iter().all(|&v| v > 0.0));
        assert_eq!(s.pair_sums.len(), 6);
        assert_eq!(s.floors.len(), 7);

        // coordinates are Beta(1, k) * (n+1): variance (n+1)^2 k / ((k+1)^2 (k+2))
        let (n, k, draws) = (100usize, 9usize, 100_000u64);
        let mut sum = vec![0f64; k + 1];
        let mut rng = stream_rng(8, 0);
        for _ in 0..draws {
            for (acc, v) in sum.iter_mut().zip(sample_simplex_with(n, k, &mut rng).x) {
                *acc += v;
            }
        }
        let var = 101f64.powi(2) * 9.0 / (100.0 * 11.0);
        let sigma = (var / draws as f64).sqrt();
        for acc in sum {
            assert!((acc / draws as f64 - 10.1).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn floors_are_dominated_in_mean() {
        let (n, k, draws) = (100usize, 9usize, 50_000u64);
        let mut rng_a = stream_rng(9, 0);
        let mut rng_b = stream_rng(9, 1);
        let (mut fa, mut ca) = (0f64, 0f64);
        let mut diffs = Vec::with_capacity(draws as usize);
        for _ in 0..draws {
            let s = sample_simplex_with(n, k, &mut rng_a);
            let g = sample_composition_with(n, k, &mut rng_b).unwrap();
            let d = g.gaps[1] as f64 - s.floors[1] as f64;
            fa += s.floors[1] as f64;
            ca += g.gaps[1] as f64;
            diffs.push(d);
        }
        let mean = diffs.iter().sum::<f64>() / draws as f64;
        let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (draws as f64 - 1.0);
        let se = (var / draws as f64).sqrt();
        assert!(fa / draws as f64 <= ca / draws as f64 + 3.0 * se);
    }

    #[test]
    fn width_tail_edges() {
        let t = empirical_width_tail(1000, 11, 0.0, 5, 1).unwrap();
        assert_eq!(t.fraction, 1.0);
        assert_eq!(t.widths_per_trial, 5);
        let t = empirical_width_tail(1000, 11, 12.0, 5, 1).unwrap();
        assert_eq!(t.fraction, 0.0);
        assert!(empirical_width_tail(1000, 11, 1.0, 0, 1).is_err());
        assert!(empirical_width_tail(1000, 11, -1.0, 1, 1).is_err());
    }

    #[test]
    fn width_tail_tracks_gamma2() {
        let t = empirical_width_tail(2000, 41, 2.0, 2000, 5).unwrap();
        let expect = width_survival(2.0).unwrap();
        assert!((t.fraction - expect).abs() < 0.02, "{} vs {expect}", t.fraction);
        assert!(t.std_error > 0.0 && t.std_error < 0.01);
    }

    #[test]
    fn width_runs_are_reproducible() {
        let a = simulate_widths(500, 9, 2.0, 50, 42).unwrap();
        let b = simulate_widths(500, 9, 2.0, 50, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 50 * 4);
        assert!(a.windows(2).all(|w| (w[0].trial, w[0].i) < (w[1].trial, w[1].i)));
    }

    #[test]
    fn ks_distance_basics() {
        let uniform = |x: f64| x.clamp(0.0, 1.0);
        assert!((ks_distance(&[0.5], uniform) - 0.5).abs() < 1e-12);
        let grid: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_distance(&grid, uniform) <= 0.0005 + 1e-12);
        // a single tied atom is one jump of size 1
        assert!((ks_distance(&[0.3, 0.3, 0.3], uniform) - 0.7).abs() < 1e-12);
        let s = scaled_width_samples(5000, 51, 200, 1).unwrap();
        assert!(ks_distance(&s, gamma2_cdf) < 0.05);
    }
}
