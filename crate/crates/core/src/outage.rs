//! Closed-form outage probabilities for every scheduling/power-allocation
//! combination, their high-SNR polynomial limits, and diversity-order slope
//! fitting.
//!
//! The greedy-scheduling expressions are evaluated from their proof-form
//! integrals: the scheduled pair's joint density is a finite sum of
//! exponentials once the gain CDF series is raised to multinomial powers, so
//! every integral reduces to exact [`nu`]-terms. This is algebraically
//! identical to the printed closed forms (a unit test transcribes one case
//! literally and checks equality) but avoids copying the heavily indexed
//! constants. The CDF-scheduling expressions integrate the joint-CDF partial
//! derivatives with the outer Gauss-Chebyshev rule, dispatching the case
//! expression per sub-interval exactly as the breakpoint tables enumerate.

use crate::channel::target_sinr;
use crate::cus_cdf::AnalyticContext;
use crate::error::{Error, Result};

/// A probability with its pre-clamp value; quadrature error may push `raw`
/// slightly outside `[0, 1]` and tests budget how far.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageValue {
    pub value: f64,
    pub raw: f64,
}

fn clamped(raw: f64) -> OutageValue {
    OutageValue { value: raw.clamp(0.0, 1.0), raw }
}

/// Scheduled-role selector for the greedy scheme (ordered gains).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GusUser {
    /// `U_1`, the largest gain.
    First,
    /// `U_2`, the second-largest gain.
    Second,
}

/// Scheduled-role selector for the CDF-based scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CusUser {
    LargestCdf,
    SecondCdf,
}

struct CpaConsts {
    gamma_p: f64,
    gamma_s: f64,
    tau_s: f64,
    /// `τ̂_s + τ̂_p + τ̂_p γ̂_s`, the joint decodability budget.
    c: f64,
    /// `τ̂_s(1 + γ̂_p)`, the secondary-gain ceiling of the outage event.
    bound: f64,
}

fn cpa_consts(rho: f64, rhat_p: f64, rhat_s: f64) -> CpaConsts {
    let gamma_p = target_sinr(rhat_p);
    let gamma_s = target_sinr(rhat_s);
    let tau_p = gamma_p / rho;
    let tau_s = gamma_s / rho;
    CpaConsts {
        gamma_p,
        gamma_s,
        tau_s,
        c: tau_s + tau_p + tau_p * gamma_s,
        bound: tau_s * (1.0 + gamma_p),
    }
}

/// Secondary-user outage under greedy scheduling with the cognitive rule
/// (primary is the larger gain), dispatched on the three target-rate cases.
pub fn outage_cpa_gus(ctx: &AnalyticContext, rho: f64, rhat_p: f64, rhat_s: f64) -> OutageValue {
    let k = ctx.users();
    let kf = k as f64;
    let p = cpa_consts(rho, rhat_p, rhat_s);
    if p.gamma_s <= 0.0 {
        return clamped(0.0);
    }
    let f_tau = ctx.unordered_cdf_raw(p.tau_s);
    let base = kf * f_tau.powi(k as i32 - 1) - (kf - 1.0) * f_tau.powi(k as i32);
    let sub_c = ctx.base_series().substitute(-1.0, p.c);
    let weight = ctx.pdf_series().mul(ctx.cdf_power(k - 2));
    let m_i1 = p.bound.min(0.5 * p.c);
    let kk1 = kf * (kf - 1.0);
    let raw = if p.gamma_s >= 1.0 {
        base
            + kk1
                * sub_c
                    .sub(ctx.base_series())
                    .mul(&weight)
                    .integrate_region(p.tau_s, m_i1)
    } else {
        let eps5 = p.tau_s / (1.0 - p.gamma_s);
        let m_i2 = m_i1.min(eps5);
        let t_same = sub_c
            .sub(ctx.base_series())
            .mul(&weight)
            .integrate_region(p.tau_s, m_i2);
        let t_ratio = if p.gamma_p > p.gamma_s / (1.0 - p.gamma_s) {
            let sub_ratio = ctx.base_series().substitute(1.0 / p.gamma_s, -1.0 / rho);
            sub_c
                .sub(&sub_ratio)
                .mul(&weight)
                .integrate_region(eps5, p.bound)
        } else {
            0.0
        };
        base + kk1 * (t_same + t_ratio)
    };
    clamped(raw)
}

/// High-SNR limit of [`outage_cpa_gus`]: the gain CDF linearizes to `S_L·x`
/// and the integrals become polynomials. Diversity order `K − 1`.
pub fn outage_cpa_gus_highsnr(
    ctx: &AnalyticContext,
    rho: f64,
    rhat_p: f64,
    rhat_s: f64,
) -> OutageValue {
    let k = ctx.users() as i32;
    let kf = k as f64;
    let p = cpa_consts(rho, rhat_p, rhat_s);
    if p.gamma_s <= 0.0 {
        return clamped(0.0);
    }
    let s = ctx.s_l();
    let st = s * p.tau_s;
    let base = kf * st.powi(k - 1) - (kf - 1.0) * st.powi(k);
    let m_i1 = p.bound.min(0.5 * p.c);
    // ∫_a^b (c − 2x)·x^{K−2} dx
    let poly_same = |a: f64, b: f64| -> f64 {
        if b <= a {
            return 0.0;
        }
        p.c * (b.powi(k - 1) - a.powi(k - 1)) / (kf - 1.0) - 2.0 * (b.powi(k) - a.powi(k)) / kf
    };
    let raw = if p.gamma_s >= 1.0 {
        base + kf * (kf - 1.0) * s.powi(k) * poly_same(p.tau_s, m_i1)
    } else {
        let eps5 = p.tau_s / (1.0 - p.gamma_s);
        let m_i2 = m_i1.min(eps5);
        let mut acc = poly_same(p.tau_s, m_i2);
        if p.gamma_p > p.gamma_s / (1.0 - p.gamma_s) {
            // ∫_{ε5}^{bound} [(c + 1/ρ) − x(1 + 1/γ̂_s)]·x^{K−2} dx
            acc += (p.c + 1.0 / rho) * (p.bound.powi(k - 1) - eps5.powi(k - 1)) / (kf - 1.0)
                - (1.0 + p.gamma_s) / p.gamma_s * (p.bound.powi(k) - eps5.powi(k)) / kf;
        }
        base + kf * (kf - 1.0) * s.powi(k) * acc
    };
    clamped(raw)
}

/// Both users' outage under greedy scheduling with the fairness rule.
pub fn outage_fpa_gus(ctx: &AnalyticContext, rho: f64, rhat: f64, which: GusUser) -> OutageValue {
    let k = ctx.users();
    let kf = k as f64;
    let gamma = target_sinr(rhat);
    if gamma <= 0.0 {
        return clamped(0.0);
    }
    let tau = gamma / rho;
    let c = 2.0 * tau + tau * gamma;
    let b = tau * (1.0 + gamma);
    let e8 = tau + 0.5 * tau * gamma;
    match which {
        GusUser::First => {
            let pk1 = ctx.cdf_power(k - 1);
            let sub_c = pk1.substitute(-1.0, c);
            let sub_ratio = pk1.substitute(1.0 / gamma, -1.0 / rho);
            let t_hi = sub_c
                .sub(&sub_ratio)
                .mul(ctx.pdf_series())
                .integrate_region(e8, b);
            let t_lo = pk1
                .sub(&sub_ratio)
                .mul(ctx.pdf_series())
                .integrate_region(tau, e8);
            clamped(kf * (t_hi + t_lo) + ctx.unordered_cdf_raw(tau).powi(k as i32))
        }
        GusUser::Second => {
            let sub_c = ctx.base_series().substitute(-1.0, c);
            let weight = ctx.pdf_series().mul(ctx.cdf_power(k - 2));
            let t = sub_c
                .sub(ctx.base_series())
                .mul(&weight)
                .integrate_region(tau, e8);
            let f = ctx.unordered_cdf_raw(tau);
            clamped(kf * (kf - 1.0) * t + kf * f.powi(k as i32 - 1) - (kf - 1.0) * f.powi(k as i32))
        }
    }
}

fn binom(n: usize, k: usize) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// High-SNR limit of [`outage_fpa_gus`]; diversity orders `K` and `K − 1`.
pub fn outage_fpa_gus_highsnr(
    ctx: &AnalyticContext,
    rho: f64,
    rhat: f64,
    which: GusUser,
) -> OutageValue {
    let k = ctx.users();
    let ki = k as i32;
    let kf = k as f64;
    let gamma = target_sinr(rhat);
    if gamma <= 0.0 {
        return clamped(0.0);
    }
    let tau = gamma / rho;
    let s = ctx.s_l();
    let st = s * tau;
    match which {
        GusUser::First => {
            let mut term1 = 0.0;
            for k1 in 0..k {
                let sign = if k1 % 2 == 0 { 1.0 } else { -1.0 };
                term1 += binom(k - 1, k1) * (gamma + 2.0).powi(ki - 1 - k1 as i32) * sign
                    / (k1 + 1) as f64
                    * ((1.0 + gamma).powi(k1 as i32 + 1) - (1.0 + 0.5 * gamma).powi(k1 as i32 + 1));
            }
            let mut term2 = 0.0;
            for k2 in 0..k {
                let sign = if (k - 1 - k2) % 2 == 0 { 1.0 } else { -1.0 };
                term2 += binom(k - 1, k2) * gamma / (k2 + 1) as f64 * sign
                    * ((1.0 + gamma).powi(k2 as i32 + 1) - 1.0);
            }
            let raw = kf * st.powi(ki) * term1 - kf * (s / rho).powi(ki) * term2
                + st.powi(ki) * ((1.0 + 0.5 * gamma).powi(ki) - 1.0)
                + st.powi(ki);
            clamped(raw)
        }
        GusUser::Second => {
            let half = 1.0 + 0.5 * gamma;
            let raw = kf
                * (kf - 1.0)
                * st.powi(ki)
                * ((gamma + 2.0) / (kf - 1.0) * (half.powi(ki - 1) - 1.0)
                    - 2.0 / kf * (half.powi(ki) - 1.0))
                + kf * st.powi(ki - 1)
                - (kf - 1.0) * st.powi(ki);
            clamped(raw)
        }
    }
}

/// One outer-integration sub-interval with its pinned case expression;
/// `case = 0` marks a region whose integrand vanishes identically.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Segment {
    a: f64,
    b: f64,
    case: usize,
}

/// Breakpoint table for the positive (joint-decodability) integral of the
/// CDF-scheduled cognitive outage, `x(y) = c − y` over `[τ̂_s, bound]`.
fn t1_segments(ctx: &AnalyticContext, tau_s: f64, bound: f64, c: f64) -> Vec<Segment> {
    let ra1 = ctx.r_alpha() + 1.0;
    let ra2 = ctx.r_alpha() + 2.0;
    let eps1 = c / ra2;
    let eps2 = 0.5 * c;
    let eps3 = c * ra1 / ra2;
    assert!(
        eps1 < eps2 && eps2 < eps3,
        "breakpoint ordering ε1 < ε2 < ε3 violated"
    );
    if eps2 > bound {
        assert!(eps3 > bound, "ε3 below the ceiling while ε2 is above it");
        if eps1 > bound {
            vec![Segment { a: tau_s, b: bound, case: 1 }]
        } else if eps1 > tau_s {
            vec![
                Segment { a: tau_s, b: eps1, case: 1 },
                Segment { a: eps1, b: bound, case: 2 },
            ]
        } else {
            vec![Segment { a: tau_s, b: bound, case: 2 }]
        }
    } else if eps2 > tau_s {
        let mut segs = Vec::new();
        if eps1 > tau_s {
            segs.push(Segment { a: tau_s, b: eps1, case: 1 });
            segs.push(Segment { a: eps1, b: eps2, case: 2 });
        } else {
            segs.push(Segment { a: tau_s, b: eps2, case: 2 });
        }
        if eps3 < bound {
            segs.push(Segment { a: eps2, b: eps3, case: 3 });
            // beyond ε3 the ceiling argument leaves the support: case 4, zero
        } else {
            segs.push(Segment { a: eps2, b: bound, case: 3 });
        }
        segs
    } else {
        assert!(eps1 < tau_s, "ε1 above τ̂_s while ε2 is below it");
        if eps3 < tau_s {
            vec![]
        } else if eps3 < bound {
            vec![Segment { a: tau_s, b: eps3, case: 3 }]
        } else {
            vec![Segment { a: tau_s, b: bound, case: 3 }]
        }
    }
}

/// Breakpoint table for the negative (over-decodable) integral,
/// `x(y) = y/γ̂_s − 1/ρ` over `[τ̂_s, bound]`.
fn t2_segments(ctx: &AnalyticContext, gamma_s: f64, tau_s: f64, bound: f64) -> Vec<Segment> {
    let ra1 = ctx.r_alpha() + 1.0;
    if gamma_s >= ra1 {
        // x(y) stays below y/(R^α+1): always in the flat region
        return vec![];
    }
    let eps6 = ra1 * tau_s / (ra1 - gamma_s);
    assert!(eps6 > tau_s, "ε6 must exceed τ̂_s");
    if gamma_s >= 1.0 {
        if eps6 >= bound {
            vec![]
        } else {
            vec![Segment { a: eps6, b: bound, case: 3 }]
        }
    } else {
        let eps5 = tau_s / (1.0 - gamma_s);
        assert!(eps6 < eps5, "ε6 must precede ε5");
        if eps5 < bound {
            let mut segs = vec![Segment { a: eps6, b: eps5, case: 3 }];
            // ε4 exists only when x(y) can outgrow (R^α+1)y inside the window
            let denom = 1.0 - gamma_s * ra1;
            let eps4 = if denom > 0.0 { tau_s / denom } else { f64::INFINITY };
            if eps4 < bound {
                assert!(eps4 > eps5, "ε4 must follow ε5");
                segs.push(Segment { a: eps5, b: eps4, case: 2 });
                segs.push(Segment { a: eps4, b: bound, case: 1 });
            } else {
                segs.push(Segment { a: eps5, b: bound, case: 2 });
            }
            segs
        } else if eps6 >= bound {
            vec![]
        } else {
            vec![Segment { a: eps6, b: bound, case: 3 }]
        }
    }
}

fn integrate_segments_dy(
    ctx: &AnalyticContext,
    segments: &[Segment],
    x_of: impl Fn(f64) -> f64,
) -> f64 {
    segments
        .iter()
        .map(|seg| {
            if seg.case == 0 || seg.b <= seg.a {
                return 0.0;
            }
            ctx.outer_rule().integrate(seg.a, seg.b, |y| {
                let x = x_of(y);
                debug_assert!(
                    x <= 0.0 || ctx.case_of(x, y) == seg.case,
                    "table case {} disagrees with direct dispatch {} at ({x}, {y})",
                    seg.case,
                    ctx.case_of(x, y)
                );
                if x <= 0.0 {
                    0.0
                } else {
                    ctx.case_dy(seg.case, x, y)
                }
            })
        })
        .sum()
}

fn integrate_segments_dx(
    ctx: &AnalyticContext,
    segments: &[Segment],
    y_of: impl Fn(f64) -> f64,
) -> f64 {
    segments
        .iter()
        .map(|seg| {
            if seg.case == 0 || seg.b <= seg.a {
                return 0.0;
            }
            ctx.outer_rule().integrate(seg.a, seg.b, |x| {
                let y = y_of(x);
                debug_assert!(
                    y <= 0.0 || ctx.case_of(x, y) == seg.case,
                    "table case {} disagrees with direct dispatch {} at ({x}, {y})",
                    seg.case,
                    ctx.case_of(x, y)
                );
                if y <= 0.0 {
                    0.0
                } else {
                    ctx.case_dx(seg.case, x, y)
                }
            })
        })
        .sum()
}

/// Secondary-user (second-largest CDF value) outage under CDF scheduling with
/// the cognitive rule: marginal term plus the two table-dispatched integrals.
pub fn outage_cpa_cus(ctx: &AnalyticContext, rho: f64, rhat_p: f64, rhat_s: f64) -> OutageValue {
    let p = cpa_consts(rho, rhat_p, rhat_s);
    if p.gamma_s <= 0.0 {
        return clamped(0.0);
    }
    let term0 = ctx.marginal_cdf_second_raw(p.tau_s);
    let t1 = integrate_segments_dy(ctx, &t1_segments(ctx, p.tau_s, p.bound, p.c), |y| p.c - y);
    let t2 = integrate_segments_dy(
        ctx,
        &t2_segments(ctx, p.gamma_s, p.tau_s, p.bound),
        |y| y / p.gamma_s - 1.0 / rho,
    );
    clamped(term0 + t1 - t2)
}

/// The closed upper bound on the CDF-scheduled cognitive outage: the
/// second-user marginal at `τ̂_s(1+γ̂_p)` (drops the joint constraint).
pub fn cus_cpa_upper_bound(
    ctx: &AnalyticContext,
    rho: f64,
    rhat_p: f64,
    rhat_s: f64,
) -> OutageValue {
    let p = cpa_consts(rho, rhat_p, rhat_s);
    clamped(ctx.marginal_cdf_second_raw(p.bound))
}

/// Outage of either CDF-scheduled user under the fairness rule. The
/// second-CDF user reuses the cognitive machinery with both targets set to
/// its own; the largest-CDF user integrates the `x`-partials.
pub fn outage_fpa_cus(ctx: &AnalyticContext, rho: f64, rhat: f64, which: CusUser) -> OutageValue {
    match which {
        CusUser::SecondCdf => outage_cpa_cus(ctx, rho, rhat, rhat),
        CusUser::LargestCdf => {
            let gamma = target_sinr(rhat);
            if gamma <= 0.0 {
                return clamped(0.0);
            }
            let tau = gamma / rho;
            let b = tau * (1.0 + gamma);
            let c = 2.0 * tau + tau * gamma;
            let ra = ctx.r_alpha();
            let ra1 = ra + 1.0;
            let ra2 = ra + 2.0;
            let e8 = tau + 0.5 * tau * gamma;
            let term0 = ctx.marginal_cdf_first_raw(tau);
            let (t3, t4) = if ra > gamma {
                let e11 = ra1 * tau / (ra1 - gamma);
                assert!(e11 < b, "ε11 must sit inside the window when R^α > γ̂");
                let t3 = integrate_segments_dx(
                    ctx,
                    &[Segment { a: tau, b: e8, case: 3 }, Segment { a: e8, b, case: 2 }],
                    |x| c - x,
                );
                let t4 = integrate_segments_dx(
                    ctx,
                    &[Segment { a: tau, b: e11, case: 1 }, Segment { a: e11, b, case: 2 }],
                    |x| x / gamma - 1.0 / rho,
                );
                (t3, t4)
            } else {
                let e7 = c / ra2;
                let e9 = c * ra1 / ra2;
                assert!(e7 > tau && e9 < b, "small-cell breakpoints out of order");
                let t3 = integrate_segments_dx(
                    ctx,
                    &[
                        Segment { a: tau, b: e7, case: 4 },
                        Segment { a: e7, b: e8, case: 3 },
                        Segment { a: e8, b: e9, case: 2 },
                        Segment { a: e9, b, case: 1 },
                    ],
                    |x| c - x,
                );
                let t4 = integrate_segments_dx(
                    ctx,
                    &[Segment { a: tau, b, case: 1 }],
                    |x| x / gamma - 1.0 / rho,
                );
                (t3, t4)
            };
            clamped(term0 + t3 - t4)
        }
    }
}

/// Least-squares slope of `−log P` against `log ρ`: the empirical diversity
/// order of a sweep.
pub fn diversity_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::EmptyInput);
    }
    for w in points.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::InvalidConfig("sweep points must have increasing SNR".into()));
        }
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(rho, prob) in points {
        if prob <= 0.0 {
            return Err(Error::NonPositiveProbability { value: prob });
        }
        xs.push(rho.ln());
        ys.push(-prob.ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::SystemConfig;
    use crate::numerics::nu;
    use approx::assert_abs_diff_eq;

    fn ctx() -> AnalyticContext {
        AnalyticContext::new(&SystemConfig::default()).unwrap()
    }

    fn rho(cfg: &SystemConfig, dbm: f64) -> f64 {
        cfg.rho_from_dbm(dbm)
    }

    /// Literal transcription of the printed case-1 closed form (`γ̂_s ≥ 1`),
    /// constants spelled out term by term, as an independent route.
    fn theorem1_case1_literal(ctx: &AnalyticContext, rho: f64, rhat_p: f64, rhat_s: f64) -> f64 {
        let k = ctx.users();
        let mu = ctx.mu();
        let psi = ctx.psi();
        let gamma_p = crate::channel::target_sinr(rhat_p);
        let gamma_s = crate::channel::target_sinr(rhat_s);
        assert!(gamma_s >= 1.0);
        let tau_s = gamma_s / rho;
        let tau_p = gamma_p / rho;
        let c = tau_s + tau_p + tau_p * gamma_s;
        let m_i1 = (tau_s * (1.0 + gamma_p)).min(0.5 * c);
        let kf = k as f64;
        let f: f64 = -(0..mu.len()).map(|l| psi[l] * (-mu[l] * tau_s).exp()).sum::<f64>();
        let base = kf * f.powi(k as i32 - 1) - (kf - 1.0) * f.powi(k as i32);

        // enumerate (p_0, ..., p_L) with Σp = K−2
        let mut tuples: Vec<(f64, f64)> = Vec::new(); // (multinomial·ΠΨ^p, Σpμ)
        fn walk(
            psi: &[f64],
            mu: &[f64],
            idx: usize,
            rem: usize,
            coeff: f64,
            rate: f64,
            out: &mut Vec<(f64, f64)>,
        ) {
            if idx == psi.len() - 1 {
                out.push((coeff * psi[idx].powi(rem as i32), rate + rem as f64 * mu[idx]));
                return;
            }
            let mut choose = 1.0;
            let mut pw = 1.0;
            for p in 0..=rem {
                walk(psi, mu, idx + 1, rem - p, coeff * choose * pw, rate + p as f64 * mu[idx], out);
                choose *= (rem - p) as f64 / (p + 1) as f64;
                pw *= psi[idx];
            }
        }
        walk(psi, mu, 0, k - 2, 1.0, 0.0, &mut tuples);

        let sign = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
        let mut acc = 0.0;
        for l1 in 0..mu.len() {
            for l2 in 1..mu.len() {
                for &(tuple_coeff, sum_pmu) in &tuples {
                    let xi = psi[l1] * psi[l2] * mu[l2] * sign * tuple_coeff;
                    let d1 = mu[l1] - mu[l2] - sum_pmu;
                    let d2 = mu[l1] + mu[l2] + sum_pmu;
                    acc += xi
                        * ((-mu[l1] * c).exp() * nu(d1, tau_s, m_i1)
                            + ((-d2 * m_i1).exp() - (-d2 * tau_s).exp()) / d2);
                }
            }
        }
        base + kf * (kf - 1.0) * acc
    }

    #[test]
    fn proof_form_equals_literal_closed_form() {
        let c = ctx();
        let cfg = SystemConfig::default();
        for dbm in [10.0, 20.0] {
            let r = rho(&cfg, dbm);
            let ours = outage_cpa_gus(&c, r, 1.0, 1.0).raw;
            let literal = theorem1_case1_literal(&c, r, 1.0, 1.0);
            assert!(
                (ours - literal).abs() <= 1e-9 * ours.abs().max(1e-30),
                "{dbm} dBm: proof-form {ours} vs literal {literal}"
            );
        }
        // deeper in the tail both routes cancel ~8 leading digits, so only
        // the surviving digits can be compared
        let r = rho(&cfg, 30.0);
        let ours = outage_cpa_gus(&c, r, 1.0, 1.0).raw;
        let literal = theorem1_case1_literal(&c, r, 1.0, 1.0);
        assert!((ours - literal).abs() <= 1e-6 * ours.abs());
    }

    #[test]
    fn vanishing_target_means_no_outage() {
        let c = ctx();
        let cfg = SystemConfig::default();
        let r = rho(&cfg, 20.0);
        let tiny = (1e-9f64).ln_1p() / std::f64::consts::LN_2; // γ̂ = 1e−9
        assert!(outage_cpa_gus(&c, r, 1.5, tiny).value <= 1e-6);
        assert!(outage_fpa_gus(&c, r, tiny, GusUser::First).value <= 1e-6);
        assert!(outage_fpa_gus(&c, r, tiny, GusUser::Second).value <= 1e-6);
        assert!(outage_fpa_cus(&c, r, tiny, CusUser::LargestCdf).value <= 1e-6);
    }

    #[test]
    fn high_snr_forms_converge_to_exact() {
        let c = ctx();
        let cfg = SystemConfig::default();
        let r = rho(&cfg, 40.0);
        for (rp, rs) in [(1.0, 1.0), (1.5, 0.5), (0.7, 0.5)] {
            let exact = outage_cpa_gus(&c, r, rp, rs).value;
            let approx = outage_cpa_gus_highsnr(&c, r, rp, rs).value;
            assert!(
                (approx / exact - 1.0).abs() <= 0.05,
                "({rp},{rs}): exact {exact} approx {approx}"
            );
        }
        for which in [GusUser::First, GusUser::Second] {
            let exact = outage_fpa_gus(&c, r, 1.0, which).value;
            let approx = outage_fpa_gus_highsnr(&c, r, 1.0, which).value;
            assert!(
                (approx / exact - 1.0).abs() <= 0.05,
                "{which:?}: exact {exact} approx {approx}"
            );
        }
    }

    #[test]
    fn leading_term_scales_with_k_minus_one() {
        let c = ctx();
        // first term K(S_L τ̂_s)^{K−1} halves by 2^{K−1} when ρ doubles
        let k = c.users() as i32;
        let lead = |r: f64| (c.users() as f64) * (c.s_l() * 1.0 / r).powi(k - 1);
        assert_abs_diff_eq!(lead(1e12) / lead(2e12), 2f64.powi(k - 1), epsilon = 1e-9);
    }

    #[test]
    fn k_equals_two_leading_term_linear_in_tau() {
        let mut cfg = SystemConfig::default();
        cfg.users = 2;
        let c = AnalyticContext::new(&cfg).unwrap();
        let k = 2;
        let lead = |tau: f64| (k as f64) * (c.s_l() * tau).powi(k as i32 - 1);
        assert_abs_diff_eq!(lead(2e-13) / lead(1e-13), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn theorem1_cases_are_continuous_at_boundaries() {
        let c = ctx();
        let cfg = SystemConfig::default();
        let r = rho(&cfg, 20.0);
        // γ̂_s = 1 boundary between cases 1 and 2
        let rs_lo = (1.0f64 - 1e-6).ln_1p() / std::f64::consts::LN_2;
        let rs_hi = (1.0f64 + 1e-6).ln_1p() / std::f64::consts::LN_2;
        let lo = outage_cpa_gus(&c, r, 1.5, rs_lo).value;
        let hi = outage_cpa_gus(&c, r, 1.5, rs_hi).value;
        assert!((hi - lo).abs() <= 1e-3, "γ̂_s boundary jump {}", hi - lo);
        // γ̂_p = γ̂_s/(1−γ̂_s) boundary between cases 2 and 3 at γ̂_s = 0.5
        let rs = 0.5f64.ln_1p() / std::f64::consts::LN_2;
        let gp = 1.0;
        let rp_lo = (gp - 1e-6f64).ln_1p() / std::f64::consts::LN_2;
        let rp_hi = (gp + 1e-6f64).ln_1p() / std::f64::consts::LN_2;
        let lo = outage_cpa_gus(&c, r, rp_lo, rs).value;
        let hi = outage_cpa_gus(&c, r, rp_hi, rs).value;
        assert!((hi - lo).abs() <= 1e-3, "γ̂_p boundary jump {}", hi - lo);
    }

    #[test]
    fn analytic_outage_is_monotone_in_power() {
        let c = ctx();
        let cfg = SystemConfig::default();
        let evals: Vec<Box<dyn Fn(f64) -> f64>> = vec![
            Box::new(|r| outage_cpa_gus(&ctx(), r, 1.5, 0.5).value),
            Box::new(|r| outage_cpa_cus(&ctx(), r, 1.0, 1.0).value),
            Box::new(|r| outage_fpa_gus(&ctx(), r, 1.0, GusUser::First).value),
            Box::new(|r| outage_fpa_gus(&ctx(), r, 1.0, GusUser::Second).value),
            Box::new(|r| outage_fpa_cus(&ctx(), r, 1.0, CusUser::LargestCdf).value),
            Box::new(|r| outage_fpa_cus(&ctx(), r, 1.0, CusUser::SecondCdf).value),
        ];
        let _ = &c;
        for eval in &evals {
            let mut prev = f64::INFINITY;
            for i in 0..10 {
                let dbm = 10.0 + 3.0 * i as f64;
                let v = eval(rho(&cfg, dbm));
                assert!(v <= prev + 1e-12, "not monotone at {dbm} dBm: {v} > {prev}");
                prev = v;
            }
        }
    }

    #[test]
    fn theorem2_sits_between_marginal_and_upper_bound() {
        let c = ctx();
        let cfg = SystemConfig::default();
        for dbm in [10.0, 15.0, 20.0, 25.0, 30.0] {
            let r = rho(&cfg, dbm);
            let v = outage_cpa_cus(&c, r, 1.0, 1.0).value;
            let lower = c.marginal_cdf_second(crate::channel::target_sinr(1.0) / r);
            let upper = cus_cpa_upper_bound(&c, r, 1.0, 1.0).value;
            assert!(v >= lower - 1e-3, "{dbm} dBm: {v} < marginal {lower}");
            assert!(v <= upper + 1e-3, "{dbm} dBm: {v} > bound {upper}");
        }
    }

    #[test]
    fn table_two_zero_row_for_tiny_cell() {
        // R^α + 1 < γ̂_s with γ̂_s > 1 falls in the all-zero row
        let mut cfg = SystemConfig::default();
        cfg.radius = 1.1;
        cfg.alpha = 2.1;
        let c = AnalyticContext::new(&cfg).unwrap();
        let gamma_s = 3.0;
        assert!(c.r_alpha() + 1.0 < gamma_s);
        let segs = t2_segments(&c, gamma_s, 3e-10, 1.2e-9);
        assert!(segs.is_empty());
    }

    #[test]
    fn theorem4_branches_are_continuous_across_cell_size() {
        // pick α so that R^α crosses γ̂ = 1 near R = 1
        let mut cfg = SystemConfig::default();
        cfg.alpha = 3.0;
        cfg.radius = 0.999;
        let below = AnalyticContext::new(&cfg).unwrap();
        cfg.radius = 1.001;
        let above = AnalyticContext::new(&cfg).unwrap();
        let r = 1e8;
        let lo = outage_fpa_cus(&below, r, 1.0, CusUser::LargestCdf).value;
        let hi = outage_fpa_cus(&above, r, 1.0, CusUser::LargestCdf).value;
        assert!((hi - lo).abs() <= 1e-3, "branch jump {} vs {}", lo, hi);
    }

    #[test]
    fn diversity_slope_fits() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| {
            let rho = 10f64.powi(i + 3);
            (rho, rho.powi(-3))
        }).collect();
        assert_abs_diff_eq!(diversity_slope(&pts).unwrap(), 3.0, epsilon = 1e-12);
        let pts: Vec<(f64, f64)> = (0..6).map(|i| {
            let rho = 10f64.powf(3.5 + 0.2 * i as f64);
            (rho, 5.0 * rho.powi(-2) + 0.3 * rho.powi(-5))
        }).collect();
        let slope = diversity_slope(&pts).unwrap();
        assert!((slope - 2.0).abs() <= 0.05, "slope = {slope}");
        assert!(diversity_slope(&[(1.0, 0.5)]).is_err());
        assert!(diversity_slope(&[(1.0, 0.5), (2.0, 0.0)]).is_err());
        assert!(diversity_slope(&[(2.0, 0.5), (1.0, 0.1)]).is_err());
    }

    #[test]
    fn corollary_slopes_match_claimed_diversity_orders() {
        let c = ctx();
        let cfg = SystemConfig::default();
        let k = cfg.users as f64;
        let sweep: Vec<f64> = (0..6).map(|i| 35.0 + 2.0 * i as f64).collect();
        let fit = |f: &dyn Fn(f64) -> f64| {
            let pts: Vec<(f64, f64)> = sweep.iter().map(|&dbm| {
                let r = rho(&cfg, dbm);
                (r, f(r))
            }).collect();
            diversity_slope(&pts).unwrap()
        };
        let s = fit(&|r| outage_cpa_gus(&c, r, 1.5, 0.5).value);
        assert!((s - (k - 1.0)).abs() <= 0.3, "GUS-CPA slope {s}");
        let s = fit(&|r| outage_fpa_gus(&c, r, 1.0, GusUser::First).value);
        assert!((s - k).abs() <= 0.3, "GUS-FPA U1 slope {s}");
        let s = fit(&|r| outage_fpa_gus(&c, r, 1.0, GusUser::Second).value);
        assert!((s - (k - 1.0)).abs() <= 0.3, "GUS-FPA U2 slope {s}");
        let s = fit(&|r| outage_cpa_cus(&c, r, 1.0, 1.0).value);
        assert!((s - (k - 1.0)).abs() <= 0.3, "CUS-CPA slope {s}");
        let s = fit(&|r| outage_fpa_cus(&c, r, 1.0, CusUser::LargestCdf).value);
        assert!((s - k).abs() <= 0.3, "CUS-FPA Ui slope {s}");
        let s = fit(&|r| outage_fpa_cus(&c, r, 1.0, CusUser::SecondCdf).value);
        assert!((s - (k - 1.0)).abs() <= 0.3, "CUS-FPA Uj slope {s}");
    }

    #[test]
    fn remark2_high_snr_coincidence() {
        let c = ctx();
        let cfg = SystemConfig::default();
        for dbm in [40.0, 42.5, 45.0] {
            let r = rho(&cfg, dbm);
            let a = outage_cpa_gus(&c, r, 1.5, 0.5).value;
            let b = outage_cpa_gus(&c, r, 0.8, 0.5).value;
            assert!((a / b - 1.0).abs() <= 0.02, "{dbm} dBm: {a} vs {b}");
        }
    }
}
