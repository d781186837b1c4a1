//! Per-slot selection of the two transmitting users.
//!
//! Greedy scheduling (GUS) picks the two largest gains, CDF-based scheduling
//! (CUS) the two largest CDF values `U_k` — each user's gain measured against
//! its own statistics, which equalizes admission — and random scheduling
//! (RUS) a uniform pair.

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Gus,
    Cus,
    Rus,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Gus => "GUS",
            Scheme::Cus => "CUS",
            Scheme::Rus => "RUS",
        }
    }
}

/// The scheduled pair: `first` carries the larger selection criterion
/// (gain for GUS, CDF value for CUS, gain for RUS role assignment).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduledPair {
    pub first: usize,
    pub second: usize,
    pub scheme: Scheme,
    pub gain_first: f64,
    pub gain_second: f64,
}

/// Indices of the two largest values, ties broken by lower index.
fn top_two(values: &[f64]) -> Result<(usize, usize)> {
    if values.len() < 2 {
        return Err(Error::TooFewUsers { k: values.len() });
    }
    let (mut best, mut second) = if values[0] >= values[1] { (0, 1) } else { (1, 0) };
    for (k, &v) in values.iter().enumerate().skip(2) {
        if v > values[best] {
            second = best;
            best = k;
        } else if v > values[second] {
            second = k;
        }
    }
    Ok((best, second))
}

/// Greedy selection: the two largest channel gains.
pub fn select_gus(real: &ChannelRealization) -> Result<ScheduledPair> {
    let (first, second) = top_two(&real.gains)?;
    Ok(ScheduledPair {
        first,
        second,
        scheme: Scheme::Gus,
        gain_first: real.gains[first],
        gain_second: real.gains[second],
    })
}

/// CDF-based selection: the two largest CDF values.
pub fn select_cus(real: &ChannelRealization) -> Result<ScheduledPair> {
    let (first, second) = top_two(&real.cdf_values)?;
    Ok(ScheduledPair {
        first,
        second,
        scheme: Scheme::Cus,
        gain_first: real.gains[first],
        gain_second: real.gains[second],
    })
}

/// Random selection: a uniform unordered pair; the member with the larger
/// instantaneous gain takes the `first` role for the downstream strategies.
pub fn select_rus<R: Rng>(real: &ChannelRealization, rng: &mut R) -> Result<ScheduledPair> {
    let k = real.gains.len();
    if k < 2 {
        return Err(Error::TooFewUsers { k });
    }
    let pairs = k * (k - 1) / 2;
    let mut idx = rng.random_range(0..pairs);
    let mut a = 0;
    while idx >= k - 1 - a {
        idx -= k - 1 - a;
        a += 1;
    }
    let b = a + 1 + idx;
    let (first, second) = if real.gains[a] >= real.gains[b] { (a, b) } else { (b, a) };
    Ok(ScheduledPair {
        first,
        second,
        scheme: Scheme::Rus,
        gain_first: real.gains[first],
        gain_second: real.gains[second],
    })
}

/// Per-user admission frequency over a trial list; sums to 2 (two admissions
/// per slot).
pub fn admission_histogram(trials: &[ScheduledPair], k: usize) -> Result<Vec<f64>> {
    if trials.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut counts = vec![0u64; k];
    for pair in trials {
        counts[pair.first] += 1;
        counts[pair.second] += 1;
    }
    Ok(counts.iter().map(|&c| c as f64 / trials.len() as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_realization, sample_realization_with_distances, SystemConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn real_with(gains: Vec<f64>, cdf: Vec<f64>) -> ChannelRealization {
        ChannelRealization {
            distances: vec![0.0; gains.len()],
            gains,
            cdf_values: cdf,
        }
    }

    #[test]
    fn gus_picks_two_largest_gains() {
        let real = real_with(vec![0.5, 0.2, 0.9, 0.1], vec![0.0; 4]);
        let sel = select_gus(&real).unwrap();
        assert_eq!((sel.first, sel.second), (2, 0));
        assert_eq!(sel.gain_first, 0.9);
    }

    #[test]
    fn gus_ties_break_by_lower_index() {
        let real = real_with(vec![0.3; 4], vec![0.0; 4]);
        let sel = select_gus(&real).unwrap();
        assert_eq!((sel.first, sel.second), (0, 1));
    }

    #[test]
    fn cus_picks_two_largest_cdf_values() {
        let real = real_with(vec![1.0, 1.0, 1.0, 1.0], vec![0.1, 0.95, 0.4, 0.8]);
        let sel = select_cus(&real).unwrap();
        assert_eq!((sel.first, sel.second), (1, 3));
    }

    #[test]
    fn schedulers_reject_single_user() {
        let real = real_with(vec![1.0], vec![0.5]);
        assert!(select_gus(&real).is_err());
        assert!(select_cus(&real).is_err());
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        assert!(select_rus(&real, &mut rng).is_err());
    }

    #[test]
    fn cus_equals_gus_for_equal_distances() {
        let cfg = SystemConfig::default();
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let d = [250.0; 4];
        for _ in 0..1000 {
            let real = sample_realization_with_distances(&cfg, &d, &mut rng);
            let g = select_gus(&real).unwrap();
            let c = select_cus(&real).unwrap();
            assert_eq!((g.first, g.second), (c.first, c.second));
        }
    }

    #[test]
    fn cus_is_invariant_under_monotone_rescaling() {
        let cfg = SystemConfig::default();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        for _ in 0..500 {
            let real = sample_realization(&cfg, &mut rng);
            let base = select_cus(&real).unwrap();
            let mut scaled = real.clone();
            for v in &mut scaled.cdf_values {
                *v = v.powi(3); // common strictly increasing map
            }
            let after = select_cus(&scaled).unwrap();
            assert_eq!((base.first, base.second), (after.first, after.second));
        }
    }

    #[test]
    fn rus_pairs_are_uniform_and_deterministic() {
        let cfg = SystemConfig::default();
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        let trials = 120_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..trials {
            let real = sample_realization(&cfg, &mut rng);
            let sel = select_rus(&real, &mut rng).unwrap();
            let key = (sel.first.min(sel.second), sel.first.max(sel.second));
            *counts.entry(key).or_insert(0u64) += 1;
            assert!(sel.gain_first >= sel.gain_second);
        }
        assert_eq!(counts.len(), 6);
        let expect = trials as f64 / 6.0;
        let sigma = (trials as f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
        for (&pair, &n) in &counts {
            assert!(
                (n as f64 - expect).abs() <= 3.0 * sigma,
                "pair {pair:?} count {n} vs {expect}"
            );
        }
        // determinism
        let mut a = ChaCha12Rng::seed_from_u64(77);
        let mut b = ChaCha12Rng::seed_from_u64(77);
        for _ in 0..100 {
            let real = sample_realization(&cfg, &mut a);
            let real2 = sample_realization(&cfg, &mut b);
            let s1 = select_rus(&real, &mut a).unwrap();
            let s2 = select_rus(&real2, &mut b).unwrap();
            assert_eq!((s1.first, s1.second), (s2.first, s2.second));
        }
    }

    #[test]
    fn rus_two_users_always_both() {
        let mut cfg = SystemConfig::default();
        cfg.users = 2;
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..100 {
            let real = sample_realization(&cfg, &mut rng);
            let sel = select_rus(&real, &mut rng).unwrap();
            let mut ids = [sel.first, sel.second];
            ids.sort();
            assert_eq!(ids, [0, 1]);
        }
    }

    #[test]
    fn admission_histogram_counts() {
        let pair = ScheduledPair {
            first: 0,
            second: 1,
            scheme: Scheme::Gus,
            gain_first: 1.0,
            gain_second: 0.5,
        };
        let h = admission_histogram(&[pair], 4).unwrap();
        assert_eq!(h, vec![1.0, 1.0, 0.0, 0.0]);
        assert!(admission_histogram(&[], 4).is_err());
    }

    #[test]
    fn gus_admission_decreases_with_distance_and_cus_is_flat() {
        let cfg = SystemConfig::default();
        let d = [100.0, 200.0, 300.0, 400.0];
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let trials = 200_000;
        let mut gus_pairs = Vec::with_capacity(trials);
        let mut cus_pairs = Vec::with_capacity(trials);
        for _ in 0..trials {
            let real = sample_realization_with_distances(&cfg, &d, &mut rng);
            gus_pairs.push(select_gus(&real).unwrap());
            cus_pairs.push(select_cus(&real).unwrap());
        }
        let gus_hist = admission_histogram(&gus_pairs, 4).unwrap();
        for w in gus_hist.windows(2) {
            assert!(w[0] > w[1], "gus admission not decreasing: {gus_hist:?}");
        }
        let cus_hist = admission_histogram(&cus_pairs, 4).unwrap();
        for &f in &cus_hist {
            assert!((f - 0.5).abs() < 0.01, "cus admission {cus_hist:?}");
        }
    }

    #[test]
    fn gus_gain_dominates_cus_gain() {
        let cfg = SystemConfig::default();
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let mut gus_sum = 0.0;
        let mut cus_sum = 0.0;
        let trials = 100_000;
        for _ in 0..trials {
            let real = sample_realization(&cfg, &mut rng);
            gus_sum += select_gus(&real).unwrap().gain_first;
            cus_sum += select_cus(&real).unwrap().gain_first;
        }
        assert!(gus_sum >= cus_sum);
    }
}
