//! Scenario parameters and the stochastic geometry / fading layer.
//!
//! Users are dropped i.i.d. uniformly on a disc of radius `R` around the base
//! station (radial density `2r/R²`) and fade Rayleigh, so the channel gain of
//! user `k` is `|h_k|² = |ι_k|²/(1 + r_k^α)` with `|ι_k|² ~ Exp(1)`. Gains are
//! kept dimensionless; the transmit-SNR `ρ` carries the power/noise ratio and
//! effective SNR is `η = ρ|h|²`.

use crate::cus_cdf::AnalyticContext;
use crate::error::{Error, Result};
use rand::Rng;

/// Gauss-Chebyshev orders `(L, M, Q, N, B)` of the nested quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadOrders {
    pub l: usize,
    pub m: usize,
    pub q: usize,
    pub n: usize,
    pub b: usize,
}

impl Default for QuadOrders {
    fn default() -> Self {
        QuadOrders { l: 10, m: 10, q: 10, n: 10, b: 10 }
    }
}

/// Target rates in bits/s/Hz: `(primary, secondary)` for the QoS-protecting
/// strategy and `(first, second)` for the fairness strategy's scheduled pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetRates {
    pub primary: f64,
    pub secondary: f64,
    pub first: f64,
    pub second: f64,
}

impl Default for TargetRates {
    fn default() -> Self {
        TargetRates { primary: 1.0, secondary: 1.0, first: 1.0, second: 1.0 }
    }
}

/// Static scenario parameters shared by simulation and analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Number of users `K` dropped on the disc.
    pub users: usize,
    /// Disc radius `R` in meters.
    pub radius: f64,
    /// Path-loss exponent `α`.
    pub alpha: f64,
    /// AWGN power at the base station, in dBm.
    pub noise_dbm: f64,
    /// Per-user maximal transmit power, in dBm (all users share it).
    pub max_power_dbm: f64,
    pub quad: QuadOrders,
    pub targets: TargetRates,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            users: 4,
            radius: 500.0,
            alpha: 3.76,
            noise_dbm: -100.0,
            max_power_dbm: 30.0,
            quad: QuadOrders::default(),
            targets: TargetRates::default(),
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.users < 2 {
            return Err(Error::InvalidConfig(format!("users = {} < 2", self.users)));
        }
        if !(self.radius > 0.0) {
            return Err(Error::InvalidConfig(format!("radius = {} must be > 0", self.radius)));
        }
        if !(self.alpha > 2.0) {
            return Err(Error::InvalidConfig(format!("alpha = {} must be > 2", self.alpha)));
        }
        for (name, order) in [
            ("L", self.quad.l),
            ("M", self.quad.m),
            ("Q", self.quad.q),
            ("N", self.quad.n),
            ("B", self.quad.b),
        ] {
            if order == 0 {
                return Err(Error::InvalidConfig(format!("quadrature order {name} = 0")));
            }
        }
        for (name, rate) in [
            ("primary", self.targets.primary),
            ("secondary", self.targets.secondary),
            ("first", self.targets.first),
            ("second", self.targets.second),
        ] {
            if !(rate >= 0.0) {
                return Err(Error::InvalidConfig(format!("target rate {name} = {rate} < 0")));
            }
        }
        if !self.rho_max().is_finite() || self.rho_max() <= 0.0 {
            return Err(Error::InvalidConfig("transmit SNR is not positive/finite".into()));
        }
        Ok(())
    }

    /// Linear transmit SNR `ρ` for a transmit power in dBm.
    pub fn rho_from_dbm(&self, power_dbm: f64) -> f64 {
        10f64.powf((power_dbm - self.noise_dbm) / 10.0)
    }

    /// Maximal transmit SNR `ρ_m` (all users share the same one).
    pub fn rho_max(&self) -> f64 {
        self.rho_from_dbm(self.max_power_dbm)
    }
}

/// Target SINR `γ̂ = 2^R̂ − 1` for a target rate in bits/s/Hz.
pub fn target_sinr(rate: f64) -> f64 {
    (rate * std::f64::consts::LN_2).exp_m1()
}

/// Per-slot channel state of all `K` users.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Distance to the base station, meters.
    pub distances: Vec<f64>,
    /// Channel gains `|h_k|²`.
    pub gains: Vec<f64>,
    /// CDF values `U_k = F_k(|h_k|² | r_k)`, each uniform on `[0, 1)`.
    pub cdf_values: Vec<f64>,
}

/// Draw one slot: positions from the disc (radial density `2z/R²`, i.e.
/// `r = R√u`) and unit-mean exponential fading.
pub fn sample_realization<R: Rng>(cfg: &SystemConfig, rng: &mut R) -> ChannelRealization {
    let mut real = ChannelRealization {
        distances: Vec::with_capacity(cfg.users),
        gains: Vec::with_capacity(cfg.users),
        cdf_values: Vec::with_capacity(cfg.users),
    };
    for _ in 0..cfg.users {
        let r = cfg.radius * rng.random::<f64>().sqrt();
        push_user(cfg, r, &mut real, rng);
    }
    real
}

/// Same as [`sample_realization`] but with externally fixed distances
/// (admission-probability studies pin the users' positions).
pub fn sample_realization_with_distances<R: Rng>(
    cfg: &SystemConfig,
    distances: &[f64],
    rng: &mut R,
) -> ChannelRealization {
    let mut real = ChannelRealization {
        distances: Vec::with_capacity(distances.len()),
        gains: Vec::with_capacity(distances.len()),
        cdf_values: Vec::with_capacity(distances.len()),
    };
    for &r in distances {
        push_user(cfg, r, &mut real, rng);
    }
    real
}

fn push_user<R: Rng>(cfg: &SystemConfig, r: f64, real: &mut ChannelRealization, rng: &mut R) {
    let u: f64 = rng.random();
    let fading = -(-u).ln_1p(); // Exp(1) via inversion, -ln(1-u)
    real.distances.push(r);
    real.gains.push(fading / (1.0 + r.powf(cfg.alpha)));
    real.cdf_values.push(-(-fading).exp_m1());
}

/// `F_k(x | r) = 1 − e^{−(1+r^α)x}`, the Rayleigh gain CDF at distance `r`.
pub fn conditional_gain_cdf(x: f64, r: f64, alpha: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    -(-(1.0 + r.powf(alpha)) * x).exp_m1()
}

/// Series approximation of the unconditioned gain CDF, clamped to `[0, 1]`.
pub fn unordered_gain_cdf(x: f64, ctx: &AnalyticContext) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    ctx.unordered_cdf_raw(x).clamp(0.0, 1.0)
}

/// Series approximation of the unconditioned gain density.
pub fn unordered_gain_pdf(x: f64, ctx: &AnalyticContext) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    ctx.unordered_pdf_raw(x).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn cfg() -> SystemConfig {
        SystemConfig::default()
    }

    #[test]
    fn default_config_validates() {
        cfg().validate().unwrap();
    }

    #[test]
    fn config_rejects_bad_fields() {
        let mut c = cfg();
        c.users = 1;
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.alpha = 2.0;
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.quad.q = 0;
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.targets.second = -0.1;
        assert!(c.validate().is_err());
    }

    #[test]
    fn rho_conversion() {
        // 30 dBm over -100 dBm noise = 130 dB = 1e13
        assert_abs_diff_eq!(cfg().rho_from_dbm(30.0), 1e13, epsilon = 1.0);
    }

    #[test]
    fn conditional_cdf_values() {
        assert_eq!(conditional_gain_cdf(0.0, 100.0, 3.76), 0.0);
        assert_abs_diff_eq!(conditional_gain_cdf(std::f64::consts::LN_2, 0.0, 3.76), 0.5, epsilon = 1e-12);
        // strictly increasing in r at fixed x
        let mut prev = 0.0;
        for r in [10.0, 50.0, 200.0, 400.0] {
            let v = conditional_gain_cdf(1e-8, r, 3.76);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn sampled_distance_mean_matches_density() {
        let c = cfg();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let n = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += sample_realization(&c, &mut rng).distances.iter().sum::<f64>();
        }
        let mean = sum / (n as f64 * c.users as f64);
        let expect = 2.0 * c.radius / 3.0;
        assert!((mean / expect - 1.0).abs() < 0.003, "mean = {mean}");
    }

    #[test]
    fn cdf_values_are_uniform() {
        let c = cfg();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let n = 250_000;
        let mut values = Vec::with_capacity(n * c.users);
        for _ in 0..n {
            values.extend(sample_realization(&c, &mut rng).cdf_values);
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let total = values.len() as f64;
        let mut ks: f64 = 0.0;
        for (i, &v) in values.iter().enumerate() {
            ks = ks.max((v - i as f64 / total).abs()).max(((i + 1) as f64 / total - v).abs());
        }
        assert!(ks <= 0.002, "KS = {ks}");
    }

    #[test]
    fn realization_invariants_hold() {
        let c = cfg();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let real = sample_realization(&c, &mut rng);
            for k in 0..c.users {
                assert!(real.distances[k] >= 0.0 && real.distances[k] <= c.radius);
                assert!(real.gains[k] >= 0.0);
                assert!(real.cdf_values[k] >= 0.0 && real.cdf_values[k] < 1.0);
                let recomputed = conditional_gain_cdf(real.gains[k], real.distances[k], c.alpha);
                assert_abs_diff_eq!(recomputed, real.cdf_values[k], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn fixed_seed_reproduces_realizations() {
        let c = cfg();
        let mut a = ChaCha12Rng::seed_from_u64(99);
        let mut b = ChaCha12Rng::seed_from_u64(99);
        for _ in 0..100 {
            assert_eq!(sample_realization(&c, &mut a), sample_realization(&c, &mut b));
        }
    }

    #[test]
    fn fixed_distances_are_kept() {
        let c = cfg();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let d = [100.0, 200.0, 300.0, 400.0];
        let real = sample_realization_with_distances(&c, &d, &mut rng);
        assert_eq!(real.distances, d);
    }
}
