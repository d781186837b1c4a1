//! Seeded, block-parallel trial engine.
//!
//! Trials are partitioned into fixed-size blocks; block `b` draws from a
//! ChaCha stream selected by `set_stream(b)` off the master seed, and block
//! results are folded in index order. Estimates are therefore bit-identical
//! for any worker count, and runs with the same seed share channel draws
//! across strategies (common random numbers).

use crate::channel::{
    sample_realization, sample_realization_with_distances, target_sinr, ChannelRealization,
    SystemConfig,
};
use crate::power_alloc::{
    cpa_decide, fpa_decide, hybrid_baseline, noma_cpa_baseline, noma_fair_baseline, oma_baseline,
    pair_jain, StrategyKind, TransmissionOutcome,
};
use crate::scheduling::{select_cus, select_gus, select_rus, ScheduledPair, Scheme};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use std::hash::{DefaultHasher, Hash, Hasher};

/// Trials per RNG stream; block results reduce in index order.
pub const BLOCK_SIZE: u64 = 1 << 16;

/// Proportion estimates below this report `insufficient_trials` instead of a
/// trustworthy normal-approximation interval.
pub const PROPORTION_CI_FLOOR: f64 = 1e-4;

const Z95: f64 = 1.96;

/// One scalar estimate with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub metric: String,
    pub estimate: f64,
    pub trials: u64,
    /// `1.96·√(p(1−p)/n)` for proportions, `1.96·s/√n` for means.
    pub half_width: f64,
    pub seed: u64,
    /// Hash of config, scheme, strategy and sweep point.
    pub fingerprint: String,
    /// Set when a proportion is too small for the normal approximation.
    pub insufficient_trials: bool,
}

impl EstimateResult {
    fn proportion(metric: String, hits: u64, trials: u64, seed: u64, fingerprint: String) -> Self {
        let p = hits as f64 / trials as f64;
        EstimateResult {
            metric,
            estimate: p,
            trials,
            half_width: Z95 * (p * (1.0 - p) / trials as f64).sqrt(),
            seed,
            fingerprint,
            insufficient_trials: p < PROPORTION_CI_FLOOR,
        }
    }

    fn mean(metric: String, sum: f64, sumsq: f64, trials: u64, seed: u64, fp: String) -> Self {
        let n = trials as f64;
        let mean = sum / n;
        let var = (sumsq / n - mean * mean).max(0.0);
        EstimateResult {
            metric,
            estimate: mean,
            trials,
            half_width: Z95 * (var / n).sqrt(),
            seed,
            fingerprint: fp,
            insufficient_trials: false,
        }
    }
}

fn fingerprint(cfg: &SystemConfig, scheme: Scheme, tag: &str, power_dbm: f64, seed: u64) -> String {
    let mut h = DefaultHasher::new();
    format!(
        "{}|{}|{}|{}|{}|{:?}|{:?}|{}|{}|{}|{}",
        cfg.users,
        cfg.radius,
        cfg.alpha,
        cfg.noise_dbm,
        cfg.max_power_dbm,
        cfg.quad,
        cfg.targets,
        scheme.label(),
        tag,
        power_dbm,
        seed
    )
    .hash(&mut h);
    format!("{:016x}", h.finish())
}

fn block_rng(seed: u64, block: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Map a block function over all trial blocks in parallel; results come back
/// in block order.
fn map_blocks<A, F>(trials: u64, seed: u64, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(u64, &mut ChaCha12Rng) -> A + Sync,
{
    let blocks = trials.div_ceil(BLOCK_SIZE);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let n = BLOCK_SIZE.min(trials - b * BLOCK_SIZE);
            let mut rng = block_rng(seed, b);
            f(n, &mut rng)
        })
        .collect()
}

fn schedule(scheme: Scheme, real: &ChannelRealization, rng: &mut ChaCha12Rng) -> ScheduledPair {
    match scheme {
        Scheme::Gus => select_gus(real).expect("K >= 2 validated"),
        Scheme::Cus => select_cus(real).expect("K >= 2 validated"),
        Scheme::Rus => select_rus(real, rng).expect("K >= 2 validated"),
    }
}

/// Role assignment for the cognitive strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutageOptions {
    /// Primary user is the first-scheduled (larger criterion) user; flipping
    /// this makes the larger-gain user the splitting secondary.
    pub primary_is_first: bool,
}

impl Default for OutageOptions {
    fn default() -> Self {
        OutageOptions { primary_is_first: true }
    }
}

/// Evaluate one strategy on a scheduled pair's effective SNRs. Rates come
/// back in scheduled order `(first, second)` with outage flags against the
/// configured targets.
pub fn evaluate_strategy(
    cfg: &SystemConfig,
    strategy: StrategyKind,
    opts: &OutageOptions,
    eta_first: f64,
    eta_second: f64,
) -> TransmissionOutcome {
    match strategy {
        StrategyKind::Cpa | StrategyKind::CpaNoma => {
            let gamma_p = target_sinr(cfg.targets.primary);
            let (eta_p, eta_s) = if opts.primary_is_first {
                (eta_first, eta_second)
            } else {
                (eta_second, eta_first)
            };
            let out = if strategy == StrategyKind::Cpa {
                cpa_decide(eta_p, eta_s, gamma_p)
            } else {
                noma_cpa_baseline(eta_p, eta_s, gamma_p)
            };
            let out = out.mark_outage(cfg.targets.primary, cfg.targets.secondary);
            if opts.primary_is_first {
                out
            } else {
                // map (primary, secondary) back to scheduled order
                TransmissionOutcome {
                    rate_first: out.rate_second,
                    rate_second: out.rate_first,
                    outage_first: out.outage_second,
                    outage_second: out.outage_first,
                    ..out
                }
            }
        }
        StrategyKind::Fpa => {
            fpa_decide(eta_first, eta_second).mark_outage(cfg.targets.first, cfg.targets.second)
        }
        StrategyKind::Noma => {
            noma_fair_baseline(eta_first, eta_second)
                .mark_outage(cfg.targets.first, cfg.targets.second)
        }
        StrategyKind::Oma => {
            oma_baseline(eta_first, eta_second).mark_outage(cfg.targets.first, cfg.targets.second)
        }
        StrategyKind::Hybrid => {
            hybrid_baseline(eta_first, eta_second)
                .mark_outage(cfg.targets.first, cfg.targets.second)
        }
    }
}

/// Outage frequencies for both scheduled roles.
///
/// For the cognitive strategies the two results are (primary, secondary);
/// otherwise they are the first/second scheduled users.
pub fn estimate_outage(
    cfg: &SystemConfig,
    scheme: Scheme,
    strategy: StrategyKind,
    opts: &OutageOptions,
    power_dbm: f64,
    trials: u64,
    seed: u64,
) -> [EstimateResult; 2] {
    cfg.validate().expect("validated config");
    let rho = cfg.rho_from_dbm(power_dbm);
    let counts = map_blocks(trials, seed, |n, rng| {
        let mut first = 0u64;
        let mut second = 0u64;
        for _ in 0..n {
            let real = sample_realization(cfg, rng);
            let pair = schedule(scheme, &real, rng);
            let out = evaluate_strategy(cfg, strategy, opts, rho * pair.gain_first, rho * pair.gain_second);
            let (of, os) = if matches!(strategy, StrategyKind::Cpa | StrategyKind::CpaNoma)
                && !opts.primary_is_first
            {
                (out.outage_second, out.outage_first)
            } else {
                (out.outage_first, out.outage_second)
            };
            first += of as u64;
            second += os as u64;
        }
        (first, second)
    });
    let (first, second) = counts
        .into_iter()
        .fold((0u64, 0u64), |acc, c| (acc.0 + c.0, acc.1 + c.1));
    let tag = format!("{}-outage", strategy.label());
    let fp = fingerprint(cfg, scheme, &tag, power_dbm, seed);
    let (name_first, name_second) = if matches!(strategy, StrategyKind::Cpa | StrategyKind::CpaNoma)
    {
        ("outage_primary", "outage_secondary")
    } else {
        ("outage_first", "outage_second")
    };
    [
        EstimateResult::proportion(name_first.into(), first, trials, seed, fp.clone()),
        EstimateResult::proportion(name_second.into(), second, trials, seed, fp),
    ]
}

/// Which scalar rate the ergodic estimate averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMetric {
    /// The secondary (cognitive) or second-scheduled user's rate.
    Secondary,
    /// Sum of both scheduled users' rates.
    Sum,
}

pub fn estimate_ergodic_rate(
    cfg: &SystemConfig,
    scheme: Scheme,
    strategy: StrategyKind,
    metric: RateMetric,
    power_dbm: f64,
    trials: u64,
    seed: u64,
) -> EstimateResult {
    cfg.validate().expect("validated config");
    let rho = cfg.rho_from_dbm(power_dbm);
    let opts = OutageOptions::default();
    let sums = map_blocks(trials, seed, |n, rng| {
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let real = sample_realization(cfg, rng);
            let pair = schedule(scheme, &real, rng);
            let out =
                evaluate_strategy(cfg, strategy, &opts, rho * pair.gain_first, rho * pair.gain_second);
            let r = match metric {
                RateMetric::Secondary => out.rate_second,
                RateMetric::Sum => out.rate_first + out.rate_second,
            };
            sum += r;
            sumsq += r * r;
        }
        (sum, sumsq)
    });
    let (sum, sumsq) = sums.into_iter().fold((0.0, 0.0), |a, s| (a.0 + s.0, a.1 + s.1));
    let tag = format!("{}-ergodic", strategy.label());
    let fp = fingerprint(cfg, scheme, &tag, power_dbm, seed);
    EstimateResult::mean("ergodic_rate".into(), sum, sumsq, trials, seed, fp)
}

/// Fairness statistics of one strategy evaluated on common channel draws.
#[derive(Debug, Clone)]
pub struct FairnessStats {
    pub strategy: StrategyKind,
    pub mean_jain: EstimateResult,
    /// Pooled per-user rate CDF sampled on `rate_grid`.
    pub rate_cdf: Vec<f64>,
    /// 10th percentile of the pooled per-user rate (linear interpolation on
    /// the grid).
    pub tenth_percentile: f64,
}

#[derive(Debug, Clone)]
pub struct FairnessReport {
    pub rate_grid: Vec<f64>,
    pub per_strategy: Vec<FairnessStats>,
}

/// Rate histogram resolution for the empirical rate CDF, bits/s/Hz.
const RATE_GRID_STEP: f64 = 0.02;
const RATE_GRID_MAX: f64 = 25.0;

pub fn estimate_fairness(
    cfg: &SystemConfig,
    scheme: Scheme,
    strategies: &[StrategyKind],
    power_dbm: f64,
    trials: u64,
    seed: u64,
) -> FairnessReport {
    cfg.validate().expect("validated config");
    let rho = cfg.rho_from_dbm(power_dbm);
    let opts = OutageOptions::default();
    let bins = (RATE_GRID_MAX / RATE_GRID_STEP) as usize + 1;
    struct Acc {
        jain_sum: Vec<f64>,
        jain_sumsq: Vec<f64>,
        hist: Vec<Vec<u64>>,
    }
    let accs = map_blocks(trials, seed, |n, rng| {
        let mut acc = Acc {
            jain_sum: vec![0.0; strategies.len()],
            jain_sumsq: vec![0.0; strategies.len()],
            hist: vec![vec![0u64; bins]; strategies.len()],
        };
        for _ in 0..n {
            let real = sample_realization(cfg, rng);
            let pair = schedule(scheme, &real, rng);
            let (e1, e2) = (rho * pair.gain_first, rho * pair.gain_second);
            for (s, &strategy) in strategies.iter().enumerate() {
                let out = evaluate_strategy(cfg, strategy, &opts, e1, e2);
                let j = pair_jain(out.rate_first, out.rate_second);
                acc.jain_sum[s] += j;
                acc.jain_sumsq[s] += j * j;
                for r in [out.rate_first, out.rate_second] {
                    let idx = ((r / RATE_GRID_STEP) as usize).min(bins - 1);
                    acc.hist[s][idx] += 1;
                }
            }
        }
        acc
    });
    let mut jain_sum = vec![0.0; strategies.len()];
    let mut jain_sumsq = vec![0.0; strategies.len()];
    let mut hist = vec![vec![0u64; bins]; strategies.len()];
    for acc in accs {
        for s in 0..strategies.len() {
            jain_sum[s] += acc.jain_sum[s];
            jain_sumsq[s] += acc.jain_sumsq[s];
            for (h, a) in hist[s].iter_mut().zip(&acc.hist[s]) {
                *h += a;
            }
        }
    }
    let rate_grid: Vec<f64> = (0..bins).map(|i| (i + 1) as f64 * RATE_GRID_STEP).collect();
    let per_strategy = strategies
        .iter()
        .enumerate()
        .map(|(s, &strategy)| {
            let total = (2 * trials) as f64;
            let mut cum = 0u64;
            let mut cdf = Vec::with_capacity(bins);
            let mut tenth = 0.0;
            let mut found = false;
            for (i, &h) in hist[s].iter().enumerate() {
                let prev = cum as f64 / total;
                cum += h;
                let now = cum as f64 / total;
                cdf.push(now);
                if !found && now >= 0.1 {
                    let frac = if now > prev { (0.1 - prev) / (now - prev) } else { 0.0 };
                    tenth = (i as f64 + frac) * RATE_GRID_STEP;
                    found = true;
                }
            }
            let tag = format!("{}-jain", strategy.label());
            let fp = fingerprint(cfg, scheme, &tag, power_dbm, seed);
            FairnessStats {
                strategy,
                mean_jain: EstimateResult::mean(
                    "jain_index".into(),
                    jain_sum[s],
                    jain_sumsq[s],
                    trials,
                    seed,
                    fp,
                ),
                rate_cdf: cdf,
                tenth_percentile: tenth,
            }
        })
        .collect();
    FairnessReport { rate_grid, per_strategy }
}

/// Draw the gains `(X, Y)` of the CDF-scheduled pair over many slots, in
/// deterministic block order; the raw material for empirical joint CDFs.
pub fn sample_cus_pairs(cfg: &SystemConfig, trials: u64, seed: u64) -> Vec<(f64, f64)> {
    let blocks = map_blocks(trials, seed, |n, rng| {
        let mut pairs = Vec::with_capacity(n as usize);
        for _ in 0..n {
            let real = sample_realization(cfg, rng);
            let sel = select_cus(&real).expect("K >= 2 validated");
            pairs.push((real.gains[sel.first], real.gains[sel.second]));
        }
        pairs
    });
    blocks.into_iter().flatten().collect()
}

/// Per-user admission frequency under fixed user positions.
pub fn estimate_admission(
    cfg: &SystemConfig,
    scheme: Scheme,
    fixed_distances: &[f64],
    trials: u64,
    seed: u64,
) -> Vec<f64> {
    assert_eq!(fixed_distances.len(), cfg.users, "one distance per user");
    let counts = map_blocks(trials, seed, |n, rng| {
        let mut counts = vec![0u64; cfg.users];
        for _ in 0..n {
            let real = sample_realization_with_distances(cfg, fixed_distances, rng);
            let pair = schedule(scheme, &real, rng);
            counts[pair.first] += 1;
            counts[pair.second] += 1;
        }
        counts
    });
    let mut total = vec![0u64; cfg.users];
    for c in counts {
        for (t, v) in total.iter_mut().zip(c) {
            *t += v;
        }
    }
    total.iter().map(|&c| c as f64 / trials as f64).collect()
}
