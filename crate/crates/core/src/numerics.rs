//! Shared numerical primitives: the first-kind Gauss-Chebyshev rule used by
//! every closed-form expression in this crate, finite sums of exponentials
//! with exact integration, the multinomial power expansion of such sums, and
//! forward-mode dual numbers for the joint-CDF partial derivatives.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Nodes and pattern weights of the first-kind Gauss-Chebyshev rule.
///
/// `nodes[l] = cos((2l+1)π/(2n))` and `weights[l] = (π/n)·√(1−nodes[l]²)`.
/// The weights are the bare pattern shared by all the per-formula constants
/// (the `Ψ_l`, `w_M`, `w_Q`, `w_N`, `w_B` families); callers fold in their own
/// interval mapping and density factors.
#[derive(Debug, Clone)]
pub struct QuadratureTable {
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureTable {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrate `f` over `[a, b]` (caller guarantees `a <= b`).
    ///
    /// The pattern weights over-integrate constants by O(n^-2), so the rule is
    /// rescaled to be exact on constants; without this the order-10 rule
    /// misses even `∫1` by ~4e-3, well outside the accuracy this crate needs.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        debug_assert!(a <= b);
        if a == b {
            return 0.0;
        }
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let total: f64 = self.weights.iter().sum();
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * (b - a) / total
    }
}

/// First-kind Chebyshev nodes and pattern weights for `order` points.
pub fn chebyshev_nodes(order: usize) -> Result<QuadratureTable> {
    if order == 0 {
        return Err(Error::ZeroOrder);
    }
    let n = order as f64;
    let mut nodes = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    for l in 1..=order {
        let angle = (2 * l - 1) as f64 * PI / (2.0 * n);
        nodes.push(angle.cos());
        weights.push(PI / n * angle.sin());
    }
    Ok(QuadratureTable { order, nodes, weights })
}

/// Gauss-Chebyshev approximation of `∫_a^b f`; zero when `a == b`.
pub fn gc_integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, order: usize) -> Result<f64> {
    if a > b {
        return Err(Error::ReversedInterval { a, b });
    }
    let table = chebyshev_nodes(order)?;
    Ok(table.integrate(a, b, f))
}

/// `ν(Δ; a, b) = ∫_a^b e^{Δt} dt`, evaluated as `(e^{Δb} − e^{Δa})/Δ` with a
/// switch to the limit `b − a` for `|Δ| ≤ 10⁻¹²·max(1,|a|,|b|)`.
///
/// The `exp_m1` form keeps full relative accuracy when `Δ(b−a)` underflows
/// the naive difference.
pub fn nu(delta: f64, a: f64, b: f64) -> f64 {
    let tol = 1e-12 * a.abs().max(b.abs()).max(1.0);
    if delta.abs() <= tol {
        b - a
    } else {
        (delta * a).exp() * (delta * (b - a)).exp_m1() / delta
    }
}

/// Relative tolerance used when merging equal decay rates.
const RATE_MERGE_TOL: f64 = 1e-12;

/// A finite sum `x ↦ Σ_t c_t·e^{−r_t·x}` in rate-sorted normal form.
///
/// Rates may be negative (arguments of the form `c − x` reverse the sign), so
/// this is the workhorse behind the exact proof-form integrals: products and
/// integer powers stay in the family and `∫_a^b` is a [`nu`] sum.
#[derive(Debug, Clone, Default)]
pub struct ExpSum {
    /// `(coefficient, rate)` pairs, sorted by rate.
    terms: Vec<(f64, f64)>,
}

impl ExpSum {
    pub fn new(terms: Vec<(f64, f64)>) -> Self {
        let mut s = ExpSum { terms };
        s.normalize();
        s
    }

    pub fn constant(c: f64) -> Self {
        ExpSum { terms: vec![(c, 0.0)] }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    fn normalize(&mut self) {
        self.terms
            .sort_by(|a, b| a.1.partial_cmp(&b.1).expect("rates are finite"));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(self.terms.len());
        for &(c, r) in &self.terms {
            match merged.last_mut() {
                Some((mc, mr)) if (r - *mr).abs() <= RATE_MERGE_TOL * r.abs().max(mr.abs()).max(1.0) => {
                    *mc += c;
                }
                _ => merged.push((c, r)),
            }
        }
        self.terms = merged;
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|&(c, r)| c * (-r * x).exp()).sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        ExpSum {
            terms: self.terms.iter().map(|&(c, r)| (c * factor, r)).collect(),
        }
    }

    pub fn add(&self, other: &ExpSum) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        ExpSum::new(terms)
    }

    pub fn sub(&self, other: &ExpSum) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &ExpSum) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(c1, r1) in &self.terms {
            for &(c2, r2) in &other.terms {
                terms.push((c1 * c2, r1 + r2));
            }
        }
        ExpSum::new(terms)
    }

    /// Replace the argument: `x ↦ scale·x + shift`, i.e. each term
    /// `c·e^{−r(scale·x + shift)}` becomes `(c·e^{−r·shift})·e^{−(r·scale)x}`.
    pub fn substitute(&self, scale: f64, shift: f64) -> Self {
        ExpSum::new(
            self.terms
                .iter()
                .map(|&(c, r)| (c * (-r * shift).exp(), r * scale))
                .collect(),
        )
    }

    /// Multinomial expansion of the `m`-th power.
    ///
    /// Tuples `(p_0, …, p_L)` with `Σp = m` are enumerated lexicographically;
    /// zero coefficients prune their whole subtree.
    pub fn pow(&self, m: usize) -> Self {
        if m == 0 {
            return ExpSum::constant(1.0);
        }
        let mut out: Vec<(f64, f64)> = Vec::new();
        fn walk(
            terms: &[(f64, f64)],
            idx: usize,
            remaining: usize,
            coeff: f64,
            rate: f64,
            out: &mut Vec<(f64, f64)>,
        ) {
            if remaining == 0 {
                out.push((coeff, rate));
                return;
            }
            if idx == terms.len() {
                return;
            }
            if idx == terms.len() - 1 {
                // last term must absorb the remainder
                let (c, r) = terms[idx];
                let piece = coeff * c.powi(remaining as i32);
                if piece != 0.0 {
                    out.push((piece, rate + remaining as f64 * r));
                }
                return;
            }
            let (c, r) = terms[idx];
            let mut choose = 1.0; // C(remaining, p) built incrementally
            let mut c_pow = 1.0;
            for p in 0..=remaining {
                let piece = coeff * choose * c_pow;
                if piece != 0.0 || p == 0 {
                    walk(terms, idx + 1, remaining - p, piece, rate + p as f64 * r, out);
                }
                choose *= (remaining - p) as f64 / (p + 1) as f64;
                c_pow *= c;
            }
        }
        walk(&self.terms, 0, m, 1.0, 0.0, &mut out);
        ExpSum::new(out)
    }

    /// Exact `∫_a^b` of the sum; an empty or degenerate interval (`b ≤ a`)
    /// contributes nothing (the event region is empty).
    pub fn integrate_region(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        self.terms.iter().map(|&(c, r)| c * nu(-r, a, b)).sum()
    }
}

/// A CDF-style series `x ↦ −Σ_l coefficients[l]·e^{−exponents[l]·x}` with
/// `exponents[0] = 0` and `coefficients[0] = −Σ_{l≥1} coefficients[l]` when
/// built from the single-user gain CDF.
#[derive(Debug, Clone)]
pub struct ExponentialSeries {
    coefficients: Vec<f64>,
    exponents: Vec<f64>,
}

impl ExponentialSeries {
    pub fn new(coefficients: Vec<f64>, exponents: Vec<f64>) -> Self {
        assert_eq!(coefficients.len(), exponents.len());
        let inner = ExpSum::new(
            coefficients
                .iter()
                .zip(&exponents)
                .map(|(&c, &e)| (-c, e))
                .collect(),
        );
        ExponentialSeries::from_expsum(&inner)
    }

    fn from_expsum(sum: &ExpSum) -> Self {
        let (coefficients, exponents) = sum.terms().iter().map(|&(c, r)| (-c, r)).unzip();
        ExponentialSeries { coefficients, exponents }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn eval(&self, x: f64) -> f64 {
        -self
            .coefficients
            .iter()
            .zip(&self.exponents)
            .map(|(&c, &e)| c * (-e * x).exp())
            .sum::<f64>()
    }

    pub(crate) fn as_expsum(&self) -> ExpSum {
        ExpSum::new(
            self.coefficients
                .iter()
                .zip(&self.exponents)
                .map(|(&c, &e)| (-c, e))
                .collect(),
        )
    }
}

/// Series whose evaluation is the `m`-th power of the input's evaluation,
/// with the `(−1)^m` sign folded into the coefficients.
pub fn multinomial_power(series: &ExponentialSeries, m: usize) -> ExponentialSeries {
    ExponentialSeries::from_expsum(&series.as_expsum().pow(m))
}

/// Forward-mode dual number: value plus first derivative.
///
/// Evaluating the joint-CDF case expressions on `Dual` yields the exact
/// analytic partial derivative of the dispatched expression, chain rules
/// included, with no finite-difference step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: f64,
}

impl Dual {
    pub fn var(v: f64) -> Self {
        Dual { v, d: 1.0 }
    }

    pub fn con(v: f64) -> Self {
        Dual { v, d: 0.0 }
    }
}

impl std::ops::Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual { v: self.v + o.v, d: self.d + o.d }
    }
}

impl std::ops::Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual { v: self.v - o.v, d: self.d - o.d }
    }
}

impl std::ops::Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual { v: self.v * o.v, d: self.d * o.v + self.v * o.d }
    }
}

impl std::ops::Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        Dual {
            v: self.v / o.v,
            d: (self.d * o.v - self.v * o.d) / (o.v * o.v),
        }
    }
}

impl std::ops::Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual { v: -self.v, d: -self.d }
    }
}

/// Scalar abstraction over `f64` and [`Dual`] so the joint-CDF cases are
/// written once and differentiated by evaluation.
pub trait Scalar:
    Copy
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
{
    fn lift(v: f64) -> Self;
    fn value(self) -> f64;
    fn exp(self) -> Self;
    fn exp_m1(self) -> Self;
    fn powf(self, p: f64) -> Self;
    fn powi(self, n: i32) -> Self;
}

impl Scalar for f64 {
    fn lift(v: f64) -> Self {
        v
    }
    fn value(self) -> f64 {
        self
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn exp_m1(self) -> Self {
        f64::exp_m1(self)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

impl Scalar for Dual {
    fn lift(v: f64) -> Self {
        Dual::con(v)
    }
    fn value(self) -> f64 {
        self.v
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        Dual { v: e, d: self.d * e }
    }
    fn exp_m1(self) -> Self {
        Dual { v: self.v.exp_m1(), d: self.d * self.v.exp() }
    }
    fn powf(self, p: f64) -> Self {
        Dual {
            v: self.v.powf(p),
            d: self.d * p * self.v.powf(p - 1.0),
        }
    }
    fn powi(self, n: i32) -> Self {
        Dual {
            v: self.v.powi(n),
            d: self.d * n as f64 * self.v.powi(n - 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn chebyshev_rejects_zero_order() {
        assert_eq!(chebyshev_nodes(0).unwrap_err(), Error::ZeroOrder);
    }

    #[test]
    fn chebyshev_order_one_node_is_zero() {
        let t = chebyshev_nodes(1).unwrap();
        assert_abs_diff_eq!(t.nodes()[0], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn chebyshev_order_two_nodes() {
        let t = chebyshev_nodes(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(t.nodes()[0], s, epsilon = 1e-15);
        assert_abs_diff_eq!(t.nodes()[1], -s, epsilon = 1e-15);
    }

    #[test]
    fn chebyshev_nodes_strictly_decreasing() {
        let t = chebyshev_nodes(10).unwrap();
        for w in t.nodes().windows(2) {
            assert!(w[0] > w[1]);
        }
        assert!(t.weights().iter().all(|&w| w > 0.0));
        assert_eq!(t.nodes().len(), t.weights().len());
    }

    #[test]
    fn chebyshev_order_ten_integrates_unity() {
        let v = gc_integrate(|_| 1.0, 0.0, 1.0, 10).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn gc_constant_over_0_2() {
        let v = gc_integrate(|_| 1.0, 0.0, 2.0, 10).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-3);
    }

    #[test]
    fn gc_empty_interval_is_zero() {
        assert_eq!(gc_integrate(|x| x * x, 1.0, 1.0, 10).unwrap(), 0.0);
    }

    #[test]
    fn gc_exponential_order_twenty() {
        let v = gc_integrate(|x| (-x).exp(), 0.0, 1.0, 20).unwrap();
        let exact = 1.0 - (-1.0f64).exp();
        assert!((v - exact).abs() <= 1e-4, "gc = {v}, exact = {exact}");
    }

    #[test]
    fn gc_rejects_reversed_interval() {
        assert!(matches!(
            gc_integrate(|x| x, 1.0, 0.0, 10),
            Err(Error::ReversedInterval { .. })
        ));
    }

    /// Adaptive Simpson refinement, the independent quadrature oracle.
    fn simpson_adaptive<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
        fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
        }
        fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let left = simpson(f, a, m);
            let right = simpson(f, m, b);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, m, left, tol / 2.0, depth - 1) + rec(f, m, b, right, tol / 2.0, depth - 1)
            }
        }
        rec(&f, a, b, simpson(&f, a, b), tol, 40)
    }

    #[test]
    fn gc_order_ten_tracks_adaptive_oracle_on_smooth_integrands() {
        // integrand shapes that actually appear in the outage expressions:
        // products of exponentials and mild powers over short intervals
        // the outage integrands are smooth products over windows spanning a
        // factor of ~2, like these
        let cases: Vec<(Box<dyn Fn(f64) -> f64>, f64, f64)> = vec![
            (Box::new(|x: f64| (-3.0 * x).exp()), 0.4, 0.9),
            (Box::new(|x: f64| (1.0 - (-2.0 * x).exp()).powi(3)), 0.7, 1.4),
            (Box::new(|x: f64| x * (-x).exp() + 0.5), 1.0, 2.0),
        ];
        for (f, a, b) in cases {
            let oracle = simpson_adaptive(&*f, a, b, 1e-12);
            let gc = gc_integrate(&*f, a, b, 10).unwrap();
            assert!(
                (gc - oracle).abs() <= 1e-3 * oracle.abs().max(1e-12),
                "gc = {gc}, oracle = {oracle}"
            );
        }
    }

    #[test]
    fn nu_zero_delta_is_interval_length() {
        assert_abs_diff_eq!(nu(0.0, 1.0, 4.0), 3.0, epsilon = 1e-15);
    }

    #[test]
    fn nu_unit_delta_closed_form() {
        // ∫_0^1 e^t dt = e − 1
        assert_abs_diff_eq!(nu(1.0, 0.0, 1.0), std::f64::consts::E - 1.0, epsilon = 1e-12);
    }

    #[test]
    fn nu_tiny_delta_switches_branch() {
        assert_abs_diff_eq!(nu(1e-15, 0.0, 2.0), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn nu_continuous_at_zero() {
        let deltas = [-1e-8, -1e-10, -2e-12, 2e-12, 1e-10, 1e-8];
        let points = [(0.0, 2.0), (1.0, 4.0), (-10.0, 10.0), (3.0, 3.5)];
        for &d in &deltas {
            for &(a, b) in &points {
                assert!(
                    (nu(d, a, b) - (b - a)).abs() <= 1e-6,
                    "nu({d}, {a}, {b}) = {}",
                    nu(d, a, b)
                );
            }
        }
    }

    #[test]
    fn nu_matches_quadrature_of_exponential() {
        for &(delta, a, b) in &[(2.5, 0.1, 1.3), (-4.0, -1.0, 2.0), (0.7, -2.0, -0.5)] {
            let oracle = simpson_adaptive(|t| (delta * t).exp(), a, b, 1e-13);
            assert_abs_diff_eq!(nu(delta, a, b), oracle, epsilon = 1e-9);
        }
    }

    #[test]
    fn multinomial_identity_power() {
        let s = ExponentialSeries::new(vec![-1.0, 1.0], vec![0.0, 1.0]);
        let p = multinomial_power(&s, 1);
        assert_eq!(p.coefficients(), s.coefficients());
        assert_eq!(p.exponents(), s.exponents());
    }

    #[test]
    fn multinomial_square_of_one_minus_exp() {
        // (1 − e^{−x})² = 1 − 2e^{−x} + e^{−2x}
        let s = ExponentialSeries::new(vec![-1.0, 1.0], vec![0.0, 1.0]);
        let sq = multinomial_power(&s, 2);
        assert_eq!(sq.exponents(), &[0.0, 1.0, 2.0]);
        assert_eq!(sq.coefficients(), &[-1.0, 2.0, -1.0]);
        for &x in &[0.0, 0.3, 1.7] {
            assert_abs_diff_eq!(sq.eval(x), s.eval(x).powi(2), epsilon = 1e-14);
        }
    }

    #[test]
    fn multinomial_zero_power_is_unity() {
        let s = ExponentialSeries::new(vec![-0.4, 0.7, -0.3], vec![0.0, 0.5, 2.0]);
        let p = multinomial_power(&s, 0);
        assert_abs_diff_eq!(p.eval(0.9), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn multinomial_cube_matches_pointwise_power() {
        let s = ExponentialSeries::new(vec![-0.8, 0.35, 0.3, 0.15], vec![0.0, 0.9, 2.3, 4.1]);
        let cube = multinomial_power(&s, 3);
        let x = 0.7;
        let direct = s.eval(x).powi(3);
        assert!((cube.eval(x) - direct).abs() <= 1e-12 * direct.abs().max(1.0));
    }

    proptest! {
        #[test]
        fn multinomial_power_matches_pointwise(
            m in 0usize..=6,
            coeffs in proptest::collection::vec(-1.0f64..1.0, 1..=10),
            xs in proptest::collection::vec(0.0f64..10.0, 20),
        ) {
            let n = coeffs.len();
            let exps: Vec<f64> = (0..n).map(|i| i as f64 * 0.7).collect();
            let s = ExponentialSeries::new(coeffs, exps);
            let p = multinomial_power(&s, m);
            for &x in &xs {
                let want = s.eval(x).powi(m as i32);
                let got = p.eval(x);
                prop_assert!((got - want).abs() <= 1e-10 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn expsum_product_integrates_exactly() {
        // ∫_0^1 e^{−x}(1 − e^{−x}) dx = (1 − e^{−1}) − (1 − e^{−2})/2
        let f = ExpSum::new(vec![(1.0, 1.0)]);
        let g = ExpSum::new(vec![(1.0, 0.0), (-1.0, 1.0)]);
        let got = f.mul(&g).integrate_region(0.0, 1.0);
        let want = (1.0 - (-1.0f64).exp()) - (1.0 - (-2.0f64).exp()) / 2.0;
        assert_abs_diff_eq!(got, want, epsilon = 1e-14);
    }

    #[test]
    fn expsum_empty_region_is_zero() {
        let f = ExpSum::new(vec![(2.0, 1.0)]);
        assert_eq!(f.integrate_region(1.0, 0.5), 0.0);
    }

    #[test]
    fn expsum_substitute_reverses_argument() {
        // F(c − x) evaluated via substitution equals direct evaluation
        let f = ExpSum::new(vec![(0.3, 0.0), (-0.7, 2.0), (0.4, 5.0)]);
        let c = 1.3;
        let g = f.substitute(-1.0, c);
        for &x in &[0.0, 0.4, 1.1] {
            assert_abs_diff_eq!(g.eval(x), f.eval(c - x), epsilon = 1e-14);
        }
    }

    #[test]
    fn dual_differentiates_composites() {
        // d/dx [e^{−2x}·(1+x)^{3.5}] at x = 0.8
        let x = Dual::var(0.8);
        let y = (-(x + x)).exp() * (Dual::con(1.0) + x).powf(3.5);
        let h = 1e-7;
        let f = |x: f64| (-2.0 * x).exp() * (1.0 + x).powf(3.5);
        let fd = (f(0.8 + h) - f(0.8 - h)) / (2.0 * h);
        assert!((y.d - fd).abs() <= 1e-6 * fd.abs());
    }
}
