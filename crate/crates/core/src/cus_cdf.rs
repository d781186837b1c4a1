//! Joint CDF of the CDF-scheduled pair's channel gains and its partial
//! derivatives, plus the precomputed quadrature/series context shared by all
//! closed-form expressions.
//!
//! Let `X` and `Y` be the gains of the users holding the largest and
//! second-largest CDF values. Conditioned on all distances the pair's joint
//! CDF has an exact two-case form; averaging over the disc positions and
//! applying nested Gauss-Chebyshev rules yields a four-case approximation
//! dispatched on how `x` and `y` compare against `(R^α + 1)` ratios. The four
//! cases are evaluated generically over [`Scalar`] so that the partial
//! derivatives needed by the outage integrals come from dual-number
//! evaluation of the very same expressions.

use crate::channel::SystemConfig;
use crate::error::Result;
use crate::numerics::{chebyshev_nodes, Dual, ExpSum, QuadratureTable, Scalar};

/// One mapped Gauss-Chebyshev rule: raw nodes on `(−1, 1)` and the pattern
/// weights `π√(1−ψ²)/(order·R²)`, rescaled so the rule is exact on constants.
#[derive(Debug, Clone)]
struct MappedRule {
    nodes: Vec<f64>,
    /// Pattern weight over `R²`, constant-exact normalization folded in.
    w_r2: Vec<f64>,
}

fn mapped_rule(order: usize, radius: f64) -> Result<MappedRule> {
    let table = chebyshev_nodes(order)?;
    let total: f64 = table.weights().iter().sum();
    let norm = 2.0 / total;
    Ok(MappedRule {
        nodes: table.nodes().to_vec(),
        w_r2: table.weights().iter().map(|w| w * norm / (radius * radius)).collect(),
    })
}

/// Precomputed series constants and quadrature tables for one scenario.
///
/// Holds the `(Ψ_l, μ_l)` series of the single-user gain CDF (with the
/// `Ψ_0 = −ΣΨ_l`, `μ_0 = 0` rewrite), its cached multinomial powers up to
/// `K`, and the node/weight tables of orders `(M, Q, N, B)` for the joint
/// CDF plus the order-`L` rule used for the outer outage integrals.
#[derive(Debug, Clone)]
pub struct AnalyticContext {
    cfg: SystemConfig,
    r_alpha: f64,
    /// `μ_0 = 0, μ_l = 1 + (R/2 + (R/2)ψ_l)^α`.
    mu: Vec<f64>,
    /// `Ψ_0 = −Σ_{l≥1}Ψ_l`, then the positive weights.
    psi: Vec<f64>,
    /// `S_L = Σ Ψ_l μ_l`, the slope of the gain CDF at the origin.
    s_l: f64,
    /// The CDF series as `Σ(−Ψ_l)e^{−μ_l x}`.
    base: ExpSum,
    /// The density series `ΣΨ_l μ_l e^{−μ_l x}`.
    pdf: ExpSum,
    /// `base^m` for `m = 0..=K`.
    powers: Vec<ExpSum>,
    m_rule: MappedRule,
    q_rule: MappedRule,
    n_rule: MappedRule,
    b_rule: MappedRule,
    outer: QuadratureTable,
}

impl AnalyticContext {
    pub fn new(cfg: &SystemConfig) -> Result<Self> {
        cfg.validate()?;
        let l_table = chebyshev_nodes(cfg.quad.l)?;
        let total: f64 = l_table.weights().iter().sum();
        let mut mu = vec![0.0];
        let mut psi = vec![0.0];
        for (&node, &w) in l_table.nodes().iter().zip(l_table.weights()) {
            let r = cfg.radius / 2.0 * (1.0 + node);
            mu.push(1.0 + r.powf(cfg.alpha));
            // (π/2L)√(1−ψ²)(1+ψ), rescaled to unit total mass
            psi.push(w * (1.0 + node) / total);
        }
        psi[0] = -psi[1..].iter().sum::<f64>();
        let s_l = psi[1..].iter().zip(&mu[1..]).map(|(p, m)| p * m).sum();
        let base = ExpSum::new(psi.iter().zip(&mu).map(|(&p, &m)| (-p, m)).collect());
        let pdf = ExpSum::new(psi[1..].iter().zip(&mu[1..]).map(|(&p, &m)| (p * m, m)).collect());
        let powers = (0..=cfg.users).map(|m| base.pow(m)).collect();
        Ok(AnalyticContext {
            cfg: cfg.clone(),
            r_alpha: cfg.radius.powf(cfg.alpha),
            mu,
            psi,
            s_l,
            base,
            pdf,
            powers,
            m_rule: mapped_rule(cfg.quad.m, cfg.radius)?,
            q_rule: mapped_rule(cfg.quad.q, cfg.radius)?,
            n_rule: mapped_rule(cfg.quad.n, cfg.radius)?,
            b_rule: mapped_rule(cfg.quad.b, cfg.radius)?,
            outer: chebyshev_nodes(cfg.quad.l)?,
        })
    }

    pub fn cfg(&self) -> &SystemConfig {
        &self.cfg
    }

    pub fn users(&self) -> usize {
        self.cfg.users
    }

    pub fn r_alpha(&self) -> f64 {
        self.r_alpha
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn s_l(&self) -> f64 {
        self.s_l
    }

    pub(crate) fn base_series(&self) -> &ExpSum {
        &self.base
    }

    pub(crate) fn pdf_series(&self) -> &ExpSum {
        &self.pdf
    }

    /// Cached multinomial power of the gain CDF series, `m ≤ K`.
    pub(crate) fn cdf_power(&self, m: usize) -> &ExpSum {
        &self.powers[m]
    }

    pub(crate) fn outer_rule(&self) -> &QuadratureTable {
        &self.outer
    }

    /// Unclamped series value of the single-user gain CDF.
    pub fn unordered_cdf_raw(&self, x: f64) -> f64 {
        self.psi[1..]
            .iter()
            .zip(&self.mu[1..])
            .map(|(&p, &m)| p * one_minus_exp(m * x))
            .sum()
    }

    /// Series value of the single-user gain density.
    pub fn unordered_pdf_raw(&self, x: f64) -> f64 {
        self.psi[1..]
            .iter()
            .zip(&self.mu[1..])
            .map(|(&p, &m)| p * m * (-m * x).exp())
            .sum()
    }

    /// `Σ Ψ_l (1 − e^{−μ_l v})^m`: the disc average of the conditional CDF
    /// raised to `m` (the positions couple the scheduled users, so the power
    /// sits inside the average).
    fn avg_cond_pow<T: Scalar>(&self, v: T, m: i32) -> T {
        let mut acc = T::lift(0.0);
        for (&p, &mu) in self.psi[1..].iter().zip(&self.mu[1..]) {
            acc = acc + T::lift(p) * one_minus_exp_t(T::lift(mu) * v).powi(m);
        }
        acc
    }

    /// Gain CDF of the largest-CDF-value user (also the case-4 expression).
    pub fn marginal_cdf_first_raw(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.avg_cond_pow(x, self.cfg.users as i32)
    }

    pub fn marginal_cdf_first(&self, x: f64) -> f64 {
        self.marginal_cdf_first_raw(x).clamp(0.0, 1.0)
    }

    /// Gain CDF of the second-largest-CDF-value user:
    /// `K·E[F^{K−1}] − (K−1)·E[F^K]`.
    pub fn marginal_cdf_second_raw(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let k = self.cfg.users as i32;
        k as f64 * self.avg_cond_pow(y, k - 1) - (k - 1) as f64 * self.avg_cond_pow(y, k)
    }

    pub fn marginal_cdf_second(&self, y: f64) -> f64 {
        self.marginal_cdf_second_raw(y).clamp(0.0, 1.0)
    }

    /// Which of the four case expressions governs `(x, y)`; boundaries go to
    /// the lower case index.
    pub fn case_of(&self, x: f64, y: f64) -> usize {
        let ra1 = self.r_alpha + 1.0;
        if x >= ra1 * y {
            1
        } else if x >= y {
            2
        } else if y <= ra1 * x {
            3
        } else {
            4
        }
    }

    /// Joint CDF of `(X, Y)`, clamped to `[0, 1]`.
    pub fn joint_cdf(&self, x: f64, y: f64) -> f64 {
        self.joint_cdf_raw(x, y).clamp(0.0, 1.0)
    }

    /// Joint CDF before clamping (quadrature error can leave `[0, 1]`).
    pub fn joint_cdf_raw(&self, x: f64, y: f64) -> f64 {
        self.joint_cases(x, y)
    }

    /// `∂F/∂y` of the dispatched case expression (exact dual-number value).
    pub fn joint_cdf_dy(&self, x: f64, y: f64) -> f64 {
        self.joint_cases(Dual::con(x), Dual::var(y)).d
    }

    /// `∂F/∂x` of the dispatched case expression.
    pub fn joint_cdf_dx(&self, x: f64, y: f64) -> f64 {
        self.joint_cases(Dual::var(x), Dual::con(y)).d
    }

    /// Evaluate the partial derivative of one forced case expression; used by
    /// the outage integrals whose tables pin the case per sub-interval.
    pub(crate) fn case_dy(&self, case: usize, x: f64, y: f64) -> f64 {
        self.eval_case(case, Dual::con(x), Dual::var(y)).d
    }

    pub(crate) fn case_dx(&self, case: usize, x: f64, y: f64) -> f64 {
        self.eval_case(case, Dual::var(x), Dual::con(y)).d
    }

    fn joint_cases<T: Scalar>(&self, x: T, y: T) -> T {
        if x.value() <= 0.0 || y.value() <= 0.0 {
            return T::lift(0.0);
        }
        self.eval_case(self.case_of(x.value(), y.value()), x, y)
    }

    fn eval_case<T: Scalar>(&self, case: usize, x: T, y: T) -> T {
        match case {
            1 => self.case1(x, y),
            2 => self.case23(x, y, true),
            3 => self.case23(x, y, false),
            4 => self.avg_cond_pow(x, self.cfg.users as i32),
            _ => unreachable!("case index out of range"),
        }
    }

    /// `x ≥ (R^α+1)y`: the split point never lands inside the disc, so the
    /// averages decouple.
    fn case1<T: Scalar>(&self, x: T, y: T) -> T {
        let k = self.cfg.users as i32;
        let mut lin = T::lift(0.0);
        for (&p, &mu) in self.psi[1..].iter().zip(&self.mu[1..]) {
            lin = lin + T::lift(p) * one_minus_exp_t(T::lift(mu) * x);
        }
        T::lift(k as f64) * self.avg_cond_pow(y, k - 1) * lin
            - T::lift((k - 1) as f64) * self.avg_cond_pow(y, k)
    }

    /// Cases 2 (`y ≤ x < (R^α+1)y`) and 3 (`x < y < (R^α+1)x`). The two share
    /// one body: `big`/`small` are the roles in the `a₁`, `a₂` split and the
    /// node families swap between the `x` and `y` parts.
    fn case23<T: Scalar>(&self, x: T, y: T, x_is_big: bool) -> T {
        let k = self.cfg.users as i32;
        let kf = k as f64;
        let radius = self.cfg.radius;
        let alpha = self.cfg.alpha;
        let inv_alpha = 1.0 / alpha;
        let ra1 = self.r_alpha + 1.0;
        let r2 = radius * radius;

        let (big, small) = if x_is_big { (x, y) } else { (y, x) };
        // a₁: the distance below which the other user's split point leaves the
        // disc; a₂: where the reverse ordering runs out of room.
        let a1 = pos_powf(big / small - T::lift(1.0), inv_alpha);
        let a2 = pos_powf(small / big * T::lift(ra1) - T::lift(1.0), inv_alpha);
        debug_assert!(a1.value() <= radius * (1.0 + 1e-9));
        debug_assert!(a2.value() >= 0.0);

        // I₁(z) = [(y/x)(1+z^α) − 1]^{1/α}, I₂ with x/y; literal roles.
        let y_over_x = y / x;
        let x_over_y = x / y;
        let i1 = |z: T| pos_powf(y_over_x * (T::lift(1.0) + z.powf(alpha)) - T::lift(1.0), inv_alpha);
        let i2 = |z: T| pos_powf(x_over_y * (T::lift(1.0) + z.powf(alpha)) - T::lift(1.0), inv_alpha);

        // Inner rule over [c, R] of the plain gain CDF at `v`.
        let inner = |c: T, v: T| -> T {
            let mut acc = T::lift(0.0);
            for (&node, &w) in self.n_rule.nodes.iter().zip(&self.n_rule.w_r2) {
                let phi = T::lift(0.5) * (T::lift(radius) + c) + T::lift(0.5 * node) * (T::lift(radius) - c);
                acc = acc + T::lift(w) * phi * one_minus_exp_t((T::lift(1.0) + phi.powf(alpha)) * v);
            }
            (T::lift(radius) - c) * acc
        };

        // Σ over [0, a] nodes t = (a/2)(1+φ) of w·t·(1−e^{−(1+t^α)v})^m,
        // optionally with the (1 − I(t)²/R²) room factor.
        let near_disc = |a: T, v: T, m: i32, rule: &MappedRule, room: Option<&dyn Fn(T) -> T>| -> T {
            let mut acc = T::lift(0.0);
            for (&node, &w) in rule.nodes.iter().zip(&rule.w_r2) {
                let t = T::lift(0.5) * a * T::lift(1.0 + node);
                let mut term =
                    T::lift(w) * t * one_minus_exp_t((T::lift(1.0) + t.powf(alpha)) * v).powi(m);
                if let Some(f) = room {
                    term = term * f(t);
                }
                acc = acc + term;
            }
            a * acc
        };

        // Σ over [a, R] nodes Θ = (R+a)/2 − ((R−a)/2)θ.
        let far_disc = |a: T, rule: &MappedRule, f: &dyn Fn(T) -> T| -> T {
            let mut acc = T::lift(0.0);
            for (&node, &w) in rule.nodes.iter().zip(&rule.w_r2) {
                let t = T::lift(0.5) * (T::lift(radius) + a) - T::lift(0.5 * node) * (T::lift(radius) - a);
                acc = acc + T::lift(w) * t * f(t);
            }
            (T::lift(radius) - a) * acc
        };

        let one = T::lift(1.0);
        if x_is_big {
            // small-distance y-users: split point off the disc, full x-average
            let mut lin_x = T::lift(0.0);
            for (&p, &mu) in self.psi[1..].iter().zip(&self.mu[1..]) {
                lin_x = lin_x + T::lift(p) * one_minus_exp_t(T::lift(mu) * x);
            }
            let term_a = T::lift(kf) * near_disc(a1, y, k - 1, &self.m_rule, None) * lin_x;
            let term_b = T::lift(kf)
                * far_disc(a1, &self.q_rule, &|t: T| {
                    let cut = i1(t);
                    one_minus_exp_t((one + t.powf(alpha)) * y).powi(k - 1) * inner(cut, x)
                });
            let term_c = -T::lift(kf - 1.0) * near_disc(a1, y, k, &self.m_rule, None);
            let term_d = -T::lift(kf - 1.0)
                * far_disc(a1, &self.q_rule, &|t: T| {
                    let cut = i1(t);
                    one_minus_exp_t((one + t.powf(alpha)) * y).powi(k)
                        * (one - cut * cut * T::lift(1.0 / r2))
                });
            let term_e = near_disc(
                a2,
                x,
                k,
                &self.b_rule,
                Some(&|t: T| {
                    let cut = i2(t);
                    one - cut * cut * T::lift(1.0 / r2)
                }),
            );
            term_a + term_b + term_c + term_d + term_e
        } else {
            let mut acc = T::lift(0.0);
            for (&node, &w) in self.b_rule.nodes.iter().zip(&self.b_rule.w_r2) {
                let t = T::lift(0.5) * a2 * T::lift(1.0 + node);
                acc = acc
                    + T::lift(w)
                        * t
                        * one_minus_exp_t((one + t.powf(alpha)) * y).powi(k - 1)
                        * inner(i1(t), x);
            }
            let term_a = T::lift(kf) * a2 * acc;
            let term_c = -T::lift(kf - 1.0)
                * near_disc(
                    a2,
                    y,
                    k,
                    &self.b_rule,
                    Some(&|t: T| {
                        let cut = i1(t);
                        one - cut * cut * T::lift(1.0 / r2)
                    }),
                );
            let term_d = near_disc(a1, x, k, &self.m_rule, None);
            let term_e = far_disc(a1, &self.q_rule, &|t: T| {
                let cut = i2(t);
                one_minus_exp_t((one + t.powf(alpha)) * x).powi(k)
                    * (one - cut * cut * T::lift(1.0 / r2))
            });
            term_a + term_c + term_d + term_e
        }
    }
}

/// `1 − e^{−u}` with full relative accuracy for small `u`.
fn one_minus_exp(u: f64) -> f64 {
    -(-u).exp_m1()
}

fn one_minus_exp_t<T: Scalar>(u: T) -> T {
    -((-u).exp_m1())
}

/// `max(v, 0)^p`, guarding the fractional power against tiny negative
/// arguments produced by floating-point cancellation on region boundaries.
fn pos_powf<T: Scalar>(v: T, p: f64) -> T {
    if v.value() <= 0.0 {
        T::lift(0.0)
    } else {
        v.powf(p)
    }
}
