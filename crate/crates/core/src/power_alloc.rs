//! Rate-split coefficient selection, SIC stream SINRs and per-user rates for
//! the two dynamic power-allocation strategies and the comparison baselines.
//!
//! Decoding order is `s_{i1} → s_j → s_{i2}` where `i` is the splitting user;
//! `β = 0` or `β = 1` collapses the split and the transmission degrades to
//! plain NOMA with the corresponding decoding order. All strategies here sit
//! on the two-user MAC sum-capacity line, so `rate_first + rate_second =
//! log2(1 + η_first + η_second)` holds exactly.

use std::f64::consts::LN_2;

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// Which power-allocation rule produced an outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    /// RSMA with the QoS-protecting (cognitive) rule.
    Cpa,
    /// NOMA restricted to `β ∈ {0, 1}` under the same QoS protection.
    CpaNoma,
    /// RSMA with the rate-fairness rule.
    Fpa,
    /// NOMA with the stronger user decoded first.
    Noma,
    /// Orthogonal time sharing with optimal DOF split.
    Oma,
    /// Per-slot better of `Noma` and `Oma` by Jain index.
    Hybrid,
}

impl StrategyKind {
    pub fn label(self) -> &'static str {
        match self {
            StrategyKind::Cpa => "RSMA-CPA",
            StrategyKind::CpaNoma => "NOMA-CPA",
            StrategyKind::Fpa => "RSMA-FPA",
            StrategyKind::Noma => "NOMA",
            StrategyKind::Oma => "OMA",
            StrategyKind::Hybrid => "HYBRID",
        }
    }
}

/// Which scheduled user's message was split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitRole {
    First,
    Second,
    None,
}

/// Result of one slot's power allocation.
///
/// `rate_first`/`rate_second` follow the caller's role order (primary then
/// secondary for the cognitive strategies; `U_i` then `U_j` for the rest).
/// The SINR triple describes the SIC chain of the splitting user's slot and
/// is zero where a stage does not exist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionOutcome {
    pub beta: f64,
    pub strategy: StrategyKind,
    pub rate_first: f64,
    pub rate_second: f64,
    pub sinr_i1: f64,
    pub sinr_j: f64,
    pub sinr_i2: f64,
    pub outage_first: bool,
    pub outage_second: bool,
    pub splitting_user: SplitRole,
}

impl TransmissionOutcome {
    /// Outage is a strict rate-below-target comparison.
    pub fn mark_outage(mut self, target_first: f64, target_second: f64) -> Self {
        self.outage_first = self.rate_first < target_first;
        self.outage_second = self.rate_second < target_second;
        self
    }
}

/// Stream SINRs of the three-stage SIC for splitting user `i`:
/// `SINR_{i1} = βη_i/((1−β)η_i + η_j + 1)`, `SINR_j = η_j/((1−β)η_i + 1)`,
/// `SINR_{i2} = (1−β)η_i`.
pub fn sic_sinrs(eta_i: f64, eta_j: f64, beta: f64) -> (f64, f64, f64) {
    debug_assert!((0.0..=1.0).contains(&beta));
    let residual = (1.0 - beta) * eta_i;
    (
        beta * eta_i / (residual + eta_j + 1.0),
        eta_j / (residual + 1.0),
        residual,
    )
}

/// Cognitive rule: protect the primary's target SINR `γ̂_p`, then maximize
/// the secondary (splitting) user's rate.
pub fn cpa_decide(eta_p: f64, eta_s: f64, gamma_p: f64) -> TransmissionOutcome {
    let rhat_p = log2_1p(gamma_p);
    let (beta, rate_p, rate_s, split) = if eta_p < gamma_p {
        // primary fails even alone; hand the first SIC stage to the secondary
        (1.0, log2_1p(eta_p), log2_1p(eta_s / (eta_p + 1.0)), SplitRole::None)
    } else if eta_p >= gamma_p * (eta_s + 1.0) {
        // primary decodes through the secondary's full power
        (0.0, log2_1p(eta_p / (eta_s + 1.0)), log2_1p(eta_s), SplitRole::None)
    } else {
        // split so the primary sees exactly its target SINR mid-chain
        let beta = 1.0 - (eta_p - gamma_p) / (eta_s * gamma_p);
        assert!(
            (-1e-12..=1.0 + 1e-12).contains(&beta),
            "case-3 split coefficient out of range: {beta}"
        );
        let rate_s = log2_1p(eta_p + eta_s) - rhat_p;
        (beta.clamp(0.0, 1.0), rhat_p, rate_s, SplitRole::Second)
    };
    let (sinr_i1, sinr_j, sinr_i2) = sic_sinrs(eta_s, eta_p, beta);
    TransmissionOutcome {
        beta,
        strategy: StrategyKind::Cpa,
        rate_first: rate_p,
        rate_second: rate_s,
        sinr_i1,
        sinr_j,
        sinr_i2,
        outage_first: false,
        outage_second: false,
        splitting_user: split,
    }
}

/// The `β ∈ {0, 1}` degeneration of [`cpa_decide`]: plain NOMA with the best
/// decoding order for the secondary that still protects the primary.
pub fn noma_cpa_baseline(eta_p: f64, eta_s: f64, gamma_p: f64) -> TransmissionOutcome {
    let (beta, rate_p, rate_s) = if eta_p >= gamma_p * (eta_s + 1.0) {
        (0.0, log2_1p(eta_p / (eta_s + 1.0)), log2_1p(eta_s))
    } else {
        // secondary decoded first; the primary then has a clean channel,
        // which meets its target exactly when eta_p >= gamma_p
        (1.0, log2_1p(eta_p), log2_1p(eta_s / (eta_p + 1.0)))
    };
    let (sinr_i1, sinr_j, sinr_i2) = sic_sinrs(eta_s, eta_p, beta);
    TransmissionOutcome {
        beta,
        strategy: StrategyKind::CpaNoma,
        rate_first: rate_p,
        rate_second: rate_s,
        sinr_i1,
        sinr_j,
        sinr_i2,
        outage_first: false,
        outage_second: false,
        splitting_user: SplitRole::None,
    }
}

/// Fairness rule: the weaker user splits so both achieve
/// `½·log2(1 + η_i + η_j)` whenever the corner rates cross; otherwise the
/// `β = 0` corner already favors the weaker user.
pub fn fpa_decide(eta_i: f64, eta_j: f64) -> TransmissionOutcome {
    let first_is_strong = eta_i >= eta_j;
    let (strong, weak) = if first_is_strong { (eta_i, eta_j) } else { (eta_j, eta_i) };
    let (beta, rate_strong, rate_weak, split_weak) = if strong >= weak + weak * weak {
        (0.0, log2_1p(strong / (weak + 1.0)), log2_1p(weak), false)
    } else {
        // log2(1 + strong/((1−β)weak + 1)) = ½ log2(1 + strong + weak)
        let beta = 1.0 + 1.0 / weak - strong / (weak * ((1.0 + strong + weak).sqrt() - 1.0));
        assert!(
            (-1e-12..=1.0 + 1e-12).contains(&beta),
            "equal-rate split coefficient out of range: {beta}"
        );
        let half = 0.5 * log2_1p(strong + weak);
        (beta.clamp(0.0, 1.0), half, half, true)
    };
    let (sinr_i1, sinr_j, sinr_i2) = sic_sinrs(weak, strong, beta);
    let (rate_first, rate_second) = if first_is_strong {
        (rate_strong, rate_weak)
    } else {
        (rate_weak, rate_strong)
    };
    let splitting_user = if !split_weak {
        SplitRole::None
    } else if first_is_strong {
        SplitRole::Second
    } else {
        SplitRole::First
    };
    TransmissionOutcome {
        beta,
        strategy: StrategyKind::Fpa,
        rate_first,
        rate_second,
        sinr_i1,
        sinr_j,
        sinr_i2,
        outage_first: false,
        outage_second: false,
        splitting_user,
    }
}

/// Fairness-oriented NOMA: the stronger user is decoded first.
pub fn noma_fair_baseline(eta_i: f64, eta_j: f64) -> TransmissionOutcome {
    let first_is_strong = eta_i >= eta_j;
    let (strong, weak) = if first_is_strong { (eta_i, eta_j) } else { (eta_j, eta_i) };
    let rate_strong = log2_1p(strong / (weak + 1.0));
    let rate_weak = log2_1p(weak);
    let (rate_first, rate_second) = if first_is_strong {
        (rate_strong, rate_weak)
    } else {
        (rate_weak, rate_strong)
    };
    TransmissionOutcome {
        beta: 1.0,
        strategy: StrategyKind::Noma,
        rate_first,
        rate_second,
        sinr_i1: strong / (weak + 1.0),
        sinr_j: weak,
        sinr_i2: 0.0,
        outage_first: false,
        outage_second: false,
        splitting_user: SplitRole::None,
    }
}

/// Orthogonal time sharing with the optimal DOF split
/// `t_k = η_k/(η_i + η_j)`, which keeps the MAC sum rate.
pub fn oma_baseline(eta_i: f64, eta_j: f64) -> TransmissionOutcome {
    let sum = eta_i + eta_j;
    let (rate_first, rate_second) = if sum <= 0.0 {
        (0.0, 0.0)
    } else {
        let total = log2_1p(sum);
        (eta_i / sum * total, eta_j / sum * total)
    };
    TransmissionOutcome {
        beta: 0.0,
        strategy: StrategyKind::Oma,
        rate_first,
        rate_second,
        sinr_i1: 0.0,
        sinr_j: 0.0,
        sinr_i2: 0.0,
        outage_first: false,
        outage_second: false,
        splitting_user: SplitRole::None,
    }
}

/// Jain index of a two-user rate pair; `1` for equal rates, `1/2` at the
/// unfair extreme. An all-zero pair counts as perfectly fair.
pub fn pair_jain(rate_a: f64, rate_b: f64) -> f64 {
    let denom = 2.0 * (rate_a * rate_a + rate_b * rate_b);
    if denom == 0.0 {
        1.0
    } else {
        (rate_a + rate_b).powi(2) / denom
    }
}

/// Per-slot better of fairness-NOMA and OMA by Jain index; ties go to OMA.
pub fn hybrid_baseline(eta_i: f64, eta_j: f64) -> TransmissionOutcome {
    let noma = noma_fair_baseline(eta_i, eta_j);
    let oma = oma_baseline(eta_i, eta_j);
    let j_noma = pair_jain(noma.rate_first, noma.rate_second);
    let j_oma = pair_jain(oma.rate_first, oma.rate_second);
    let mut chosen = if j_noma > j_oma { noma } else { oma };
    chosen.strategy = StrategyKind::Hybrid;
    chosen
}
