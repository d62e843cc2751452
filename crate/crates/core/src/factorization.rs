//! The two-parameter coefficient family and its admissibility.
//!
//! With `F(x) = ∫₀ˣ e^{-t²} dt` and `u(x) = gamma1 + F(x)`, the coefficient
//! pair on the plus branch is
//!
//! ```text
//! alpha(x) = 1 / √W(x),            W(x) = 1 - gamma2 e^{-x²} / u(x)²,
//! beta(x)  = (x + e^{-x²}/u(x)) / √W(x),
//! ```
//!
//! valid wherever `u` never vanishes and `W` stays positive on the whole
//! line. `gamma1` enters through the Riccati ratio `beta/alpha`, `gamma2`
//! through the Bernoulli equation for `alpha`. `gamma2 = 0` collapses to the
//! Mielnik family (`alpha = 1` exactly); the scaling `gamma2 = -delta·gamma1²`
//! with `|gamma1| → ∞` recovers the one-parameter `delta` family.
//!
//! Admissibility has two predicates: the closed-form inequality
//! (`|gamma1| > √π/2` and `gamma2 ≤ 0` or `gamma2 < gamma1² - 1`) and a
//! numerical scan oracle that minimizes `g(x) = u(x)² - gamma2 e^{-x²}` and
//! `|u(x)|` over the line. The oracle is the ground truth; the inequality is
//! a fast pre-filter reported alongside it.

use crate::jet::Jet;
use crate::specfun::{erf_integral, SQRT_PI_OVER_TWO};
use crate::{Error, Result};
use std::sync::OnceLock;

/// Infima below this margin count as singular.
pub const ADMISSIBILITY_MARGIN: f64 = 1e-12;

/// Outcome of the two admissibility checks for a parameter candidate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Admissibility {
    pub paper_ok: bool,
    pub oracle_ok: bool,
    pub min_g: f64,
    pub min_u: f64,
}

/// Result of the numerical admissibility scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleResult {
    pub ok: bool,
    /// Infimum of `(gamma1 + F(x))² - gamma2 e^{-x²}`.
    pub min_g: f64,
    /// Infimum of `|gamma1 + F(x)|`.
    pub min_u: f64,
}

/// Closed-form admissibility inequality:
/// `|gamma1| > √π/2` and (`gamma2 ≤ 0` or `gamma2 < gamma1² - 1`).
pub fn admissible_paper(gamma1: f64, gamma2: f64) -> bool {
    gamma1.abs() > SQRT_PI_OVER_TWO && (gamma2 <= 0.0 || gamma2 < gamma1 * gamma1 - 1.0)
}

const SCAN_HALF_WIDTH: f64 = 10.0;
const SCAN_STEP: f64 = 1e-3;

/// Precomputed scan tables for the admissibility oracle. `F` saturates to
/// `±√π/2` within 1e-44 by |x| = 10 and `e^{-x²}` is negligible there, so
/// exterior minima equal the analytic asymptotes, which are checked in
/// closed form.
struct Scanner {
    xs: Vec<f64>,
    f_vals: Vec<f64>,
    e_vals: Vec<f64>,
}

impl Scanner {
    fn new() -> Self {
        let n = (2.0 * SCAN_HALF_WIDTH / SCAN_STEP).round() as usize + 1;
        let mut xs = Vec::with_capacity(n);
        let mut f_vals = Vec::with_capacity(n);
        let mut e_vals = Vec::with_capacity(n);
        for i in 0..n {
            let x = -SCAN_HALF_WIDTH + i as f64 * SCAN_STEP;
            xs.push(x);
            f_vals.push(erf_integral(x));
            e_vals.push((-x * x).exp());
        }
        Scanner { xs, f_vals, e_vals }
    }

    fn shared() -> &'static Scanner {
        static SCANNER: OnceLock<Scanner> = OnceLock::new();
        SCANNER.get_or_init(Scanner::new)
    }

    fn check(&self, gamma1: f64, gamma2: f64) -> OracleResult {
        let g_of = |x: f64| {
            let u = gamma1 + erf_integral(x);
            u * u - gamma2 * (-x * x).exp()
        };
        // asymptotic candidates
        let u_left = gamma1 - SQRT_PI_OVER_TWO;
        let u_right = gamma1 + SQRT_PI_OVER_TWO;
        let mut min_g = (u_left * u_left).min(u_right * u_right);
        let mut min_u = u_left.abs().min(u_right.abs());
        if u_left * u_right < 0.0 || u_left == 0.0 || u_right == 0.0 {
            // u is monotone and changes sign: its infimum is zero
            min_u = 0.0;
        }
        let n = self.xs.len();
        let mut g_prev = f64::INFINITY;
        let mut g_here = {
            let u = gamma1 + self.f_vals[0];
            u * u - gamma2 * self.e_vals[0]
        };
        for i in 0..n {
            let g_next = if i + 1 < n {
                let u = gamma1 + self.f_vals[i + 1];
                u * u - gamma2 * self.e_vals[i + 1]
            } else {
                f64::INFINITY
            };
            if g_here < min_g {
                min_g = g_here;
            }
            let u = gamma1 + self.f_vals[i];
            if u.abs() < min_u {
                min_u = u.abs();
            }
            // refine interior local minima of g by golden section
            if i > 0 && i + 1 < n && g_here <= g_prev && g_here <= g_next {
                let (_, refined) = golden_min(&g_of, self.xs[i - 1], self.xs[i + 1]);
                if refined < min_g {
                    min_g = refined;
                }
            }
            g_prev = g_here;
            g_here = g_next;
        }
        let ok = min_g > ADMISSIBILITY_MARGIN && min_u > ADMISSIBILITY_MARGIN;
        OracleResult { ok, min_g, min_u }
    }
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > 1e-10 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Numerical admissibility oracle: dense scan of `g` and `|u|` on
/// `[-10, 10]` (step 1e-3) with golden-section refinement around local
/// minima, plus the analytic asymptote candidates at `x = ±∞`.
pub fn admissible_oracle(gamma1: f64, gamma2: f64) -> OracleResult {
    Scanner::shared().check(gamma1, gamma2)
}

/// An admissible `(gamma1, gamma2)` parameter point.
///
/// Construction runs both admissibility checks; every function that takes a
/// `TwoParams` can therefore assume the coefficients are finite and nonzero
/// on the whole line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoParams {
    gamma1: f64,
    gamma2: f64,
    admissibility: Admissibility,
}

impl TwoParams {
    pub fn new(gamma1: f64, gamma2: f64) -> Result<Self> {
        let oracle = admissible_oracle(gamma1, gamma2);
        if !gamma1.is_finite() || !gamma2.is_finite() || !oracle.ok {
            return Err(Error::Inadmissible {
                gamma1,
                gamma2,
                min_g: oracle.min_g,
                min_u: oracle.min_u,
            });
        }
        Ok(TwoParams {
            gamma1,
            gamma2,
            admissibility: Admissibility {
                paper_ok: admissible_paper(gamma1, gamma2),
                oracle_ok: oracle.ok,
                min_g: oracle.min_g,
                min_u: oracle.min_u,
            },
        })
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }

    pub fn admissibility(&self) -> Admissibility {
        self.admissibility
    }

    /// Jet of `u(x) = gamma1 + F(x)`.
    pub(crate) fn u_jet(&self, x: f64) -> Jet {
        let e = (-x * x).exp();
        Jet::from_derivatives([
            self.gamma1 + erf_integral(x),
            e,
            -2.0 * x * e,
            (4.0 * x * x - 2.0) * e,
        ])
    }

    /// Jet of `W(x) = 1 - gamma2 e^{-x²} / u(x)²`; equals `alpha⁻²` and half
    /// the Sturm-Liouville weight.
    pub(crate) fn w_jet(&self, x: f64) -> Jet {
        let u = self.u_jet(x);
        let xj = Jet::variable(x);
        let e = (-(xj * xj)).exp();
        1.0 - Jet::constant(self.gamma2) * e / (u * u)
    }

    /// Jet of `alpha(x) = W(x)^{-1/2}`.
    pub(crate) fn alpha_jet(&self, x: f64) -> Jet {
        self.w_jet(x).sqrt().recip()
    }

    /// Jet of the Riccati ratio `beta/alpha = x + e^{-x²}/u(x)`.
    pub(crate) fn beta_ratio_jet(&self, x: f64) -> Jet {
        let u = self.u_jet(x);
        let xj = Jet::variable(x);
        let e = (-(xj * xj)).exp();
        xj + e / u
    }

    /// Jet of `beta(x)`.
    pub(crate) fn beta_jet(&self, x: f64) -> Jet {
        self.beta_ratio_jet(x) * self.alpha_jet(x)
    }
}

/// Parameter of the one-parameter family `alpha = 1/√(1 + delta e^{-x²})`,
/// `beta = x·alpha`; requires `delta > -1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaParam {
    delta: f64,
}

impl DeltaParam {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > -1.0) || !delta.is_finite() {
            return Err(Error::DeltaRange { delta });
        }
        Ok(DeltaParam { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub(crate) fn alpha_jet(&self, x: f64) -> Jet {
        let xj = Jet::variable(x);
        (1.0 + Jet::constant(self.delta) * (-(xj * xj)).exp())
            .sqrt()
            .recip()
    }
}

/// Coefficient values `alpha`, `beta` and their first derivatives at one
/// abscissa.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoeffBundle {
    pub alpha: f64,
    pub beta: f64,
    pub alpha_prime: f64,
    pub beta_prime: f64,
}

impl CoeffBundle {
    pub(crate) fn from_jets(alpha: Jet, beta: Jet) -> Self {
        CoeffBundle {
            alpha: alpha.value(),
            beta: beta.value(),
            alpha_prime: alpha.derivative(1),
            beta_prime: beta.derivative(1),
        }
    }
}

/// Two-parameter coefficients at `x`, plus-sign branch, with closed-form
/// derivatives.
pub fn coeffs_two_param(p: &TwoParams, x: f64) -> CoeffBundle {
    CoeffBundle::from_jets(p.alpha_jet(x), p.beta_jet(x))
}

/// Delta-family coefficients at `x` with closed-form derivatives.
pub fn coeffs_delta(d: &DeltaParam, x: f64) -> CoeffBundle {
    let alpha = d.alpha_jet(x);
    let beta = Jet::variable(x) * alpha;
    CoeffBundle::from_jets(alpha, beta)
}

/// Embed a delta-family point into the two-parameter plane:
/// `(gamma1, -delta·gamma1²)`. Errors if the image is inadmissible (gamma1
/// too small for the requested delta).
pub fn delta_embedding(d: &DeltaParam, gamma1: f64) -> Result<TwoParams> {
    TwoParams::new(gamma1, -d.delta() * gamma1 * gamma1)
}

/// Residual of the Riccati equation `y' + y² = 1 + x²` for the general ratio
/// `y = x + e^{-x²}/(gamma1 + F(x))`; identically zero for exact arithmetic.
/// Requires `|gamma1| > √π/2`.
pub fn riccati_residual(gamma1: f64, x: f64) -> f64 {
    let e = (-x * x).exp();
    let u = gamma1 + erf_integral(x);
    let y = x + e / u;
    let y_prime = 1.0 + (-2.0 * x * e * u - e * e) / (u * u);
    y_prime + y * y - (1.0 + x * x)
}

/// Residual of the same Riccati equation for the particular ratio `y = x`
/// (the delta-family choice).
pub fn riccati_residual_particular(x: f64) -> f64 {
    // y = x: y' + y² = 1 + x² exactly; evaluated literally for symmetry
    1.0 + x * x - (1.0 + x * x)
}

/// Residual of the Bernoulli equation
/// `alpha' + alpha(alpha² - 1)(x + e^{-x²}/u) = 0` for the closed-form
/// `alpha`; identically zero for exact arithmetic.
pub fn bernoulli_residual(p: &TwoParams, x: f64) -> f64 {
    let alpha = p.alpha_jet(x);
    let ratio = p.beta_ratio_jet(x);
    let a0 = alpha.value();
    alpha.derivative(1) + a0 * (a0 * a0 - 1.0) * ratio.value()
}

/// Residuals of the coupled first-order system
/// `(alpha' + beta alpha² - beta,  beta' + alpha beta² - (1 + x²) alpha)`;
/// both identically zero for the closed forms.
pub fn coupled_residuals(p: &TwoParams, x: f64) -> (f64, f64) {
    let alpha = p.alpha_jet(x);
    let beta = p.beta_jet(x);
    let (a0, b0) = (alpha.value(), beta.value());
    let first = alpha.derivative(1) + b0 * a0 * a0 - b0;
    let second = beta.derivative(1) + a0 * b0 * b0 - (1.0 + x * x) * a0;
    (first, second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::richardson_derivative;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn paper_inequality_examples() {
        assert!(admissible_paper(1.0, 0.0));
        assert!(!admissible_paper(0.5, -1.0));
        assert!(!admissible_paper(2.0, 3.5));
        assert!(admissible_paper(2.0, 2.9));
        assert!(!admissible_paper(SQRT_PI_OVER_TWO, 0.0));
    }

    #[test]
    fn oracle_examples() {
        let r = admissible_oracle(2.0, 2.9);
        assert!(r.ok);
        // dense-scan oracle; hand check at x = -0.5 gives g ~ 0.109
        assert!(r.min_g > 0.09 && r.min_g < 0.12, "min_g = {}", r.min_g);

        let r = admissible_oracle(SQRT_PI_OVER_TWO, 0.0);
        assert!(!r.ok);
        assert!(r.min_u <= ADMISSIBILITY_MARGIN);

        let r = admissible_oracle(10.0, -5.0);
        assert!(r.ok);
        assert!(r.min_g >= (10.0 - SQRT_PI_OVER_TWO).powi(2) - 1e-9);
    }

    #[test]
    fn oracle_min_g_near_boundary() {
        // frozen from a high-precision interior minimization
        let r = admissible_oracle(2.0, 2.99);
        assert!(r.ok);
        assert_relative_eq!(r.min_g, 0.038_648_047_711_795_94, max_relative = 1e-9);
        let r = admissible_oracle(1.5, 1.249);
        assert_relative_eq!(r.min_g, 0.043_390_859_941_261_55, max_relative = 1e-9);
    }

    #[test]
    fn oracle_rejects_interior_zero_of_u() {
        // |gamma1| < √π/2 with gamma2 < 0: g stays positive (its infimum is
        // the left asymptote (gamma1 - √π/2)²) but u crosses zero
        let r = admissible_oracle(0.8, -1.0);
        assert!(!r.ok);
        assert!(r.min_u <= ADMISSIBILITY_MARGIN);
        let asymptote = (0.8 - SQRT_PI_OVER_TWO).powi(2);
        assert_relative_eq!(r.min_g, asymptote, max_relative = 1e-9);
    }

    #[test]
    fn two_param_coefficients_at_origin() {
        let p = TwoParams::new(1.5, 1.249).unwrap();
        let c = coeffs_two_param(&p, 0.0);
        assert_relative_eq!(c.alpha, 1.499_250_562_031_659_8, max_relative = 1e-13);
        assert_relative_eq!(c.beta, 0.999_500_374_687_773_2, max_relative = 1e-13);

        let m = TwoParams::new(-1.5, 1.249).unwrap();
        let cm = coeffs_two_param(&m, 0.0);
        assert_relative_eq!(cm.alpha, c.alpha, max_relative = 1e-13);
        assert_relative_eq!(cm.beta, -c.beta, max_relative = 1e-13);
    }

    #[test]
    fn mielnik_reduction_is_exact() {
        let p = TwoParams::new(2.0, 0.0).unwrap();
        for i in 0..=120 {
            let x = -6.0 + 0.1 * i as f64;
            let c = coeffs_two_param(&p, x);
            assert_eq!(c.alpha, 1.0);
            assert_eq!(c.alpha_prime, 0.0);
            let u = 2.0 + erf_integral(x);
            assert_relative_eq!(c.beta, x + (-x * x).exp() / u, max_relative = 1e-15);
        }
    }

    #[test]
    fn coefficient_derivatives_match_richardson() {
        let p = TwoParams::new(1.5, -2.0).unwrap();
        for &x in &[-1.1, 0.0, 0.45, 2.2] {
            let c = coeffs_two_param(&p, x);
            let a_fd = richardson_derivative(&|t| coeffs_two_param(&p, t).alpha, x, 1);
            let b_fd = richardson_derivative(&|t| coeffs_two_param(&p, t).beta, x, 1);
            assert_relative_eq!(c.alpha_prime, a_fd, max_relative = 1e-6, epsilon = 1e-9);
            assert_relative_eq!(c.beta_prime, b_fd, max_relative = 1e-6, epsilon = 1e-9);
        }
    }

    #[test]
    fn delta_family_values() {
        let d = DeltaParam::new(0.0).unwrap();
        let c = coeffs_delta(&d, 1.3);
        assert_eq!(c.alpha, 1.0);
        assert_relative_eq!(c.beta, 1.3, max_relative = 1e-15);

        let d = DeltaParam::new(3.0).unwrap();
        let c = coeffs_delta(&d, 0.0);
        assert_eq!(c.alpha, 0.5);
        assert_eq!(c.beta, 0.0);

        // alpha blows up as delta -> -1+
        let d = DeltaParam::new(-1.0 + 1e-6).unwrap();
        assert!(coeffs_delta(&d, 0.0).alpha > 900.0);

        assert!(matches!(
            DeltaParam::new(-1.0),
            Err(Error::DeltaRange { .. })
        ));
    }

    #[test]
    fn delta_embedding_values() {
        let p = delta_embedding(&DeltaParam::new(0.0).unwrap(), 1e3).unwrap();
        assert_eq!((p.gamma1(), p.gamma2()), (1e3, 0.0));

        let p = delta_embedding(&DeltaParam::new(0.5).unwrap(), 1e2).unwrap();
        assert_eq!((p.gamma1(), p.gamma2()), (100.0, -5000.0));

        let p = delta_embedding(&DeltaParam::new(-0.9).unwrap(), 1e3).unwrap();
        assert_eq!((p.gamma1(), p.gamma2()), (1e3, 9e5));
        assert!(p.admissibility().paper_ok);

        // gamma1 too small for a strongly negative delta
        assert!(delta_embedding(&DeltaParam::new(-0.99999).unwrap(), 1.0).is_err());
    }

    #[test]
    fn riccati_residual_vanishes() {
        assert_abs_diff_eq!(riccati_residual(2.0, 0.7), 0.0, epsilon = 1e-11);
        assert_abs_diff_eq!(riccati_residual(-5.0, -3.0), 0.0, epsilon = 1e-11);
        assert_abs_diff_eq!(riccati_residual_particular(0.7), 0.0, epsilon = 1e-11);
    }

    #[test]
    fn bernoulli_residual_vanishes() {
        let p = TwoParams::new(1.5, 1.249).unwrap();
        assert_abs_diff_eq!(bernoulli_residual(&p, 0.3), 0.0, epsilon = 1e-10);

        // Mielnik branch: alpha = 1 makes every term vanish identically
        let m = TwoParams::new(2.0, 0.0).unwrap();
        for &x in &[-3.0, 0.0, 1.7] {
            assert_eq!(bernoulli_residual(&m, x), 0.0);
        }

        let q = TwoParams::new(1.5, -2.0).unwrap();
        assert_abs_diff_eq!(bernoulli_residual(&q, -1.1), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn coupled_residuals_vanish() {
        let p = TwoParams::new(1.5, 1.249).unwrap();
        let (a, b) = coupled_residuals(&p, 0.0);
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-10);

        let m = TwoParams::new(2.0, 0.0).unwrap();
        let (a, b) = coupled_residuals(&m, 1.3);
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-10);

        let q = TwoParams::new(1.0, -0.5).unwrap();
        let (a, b) = coupled_residuals(&q, 2.2);
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn delta_embedding_converges_at_first_order_rate() {
        let d = DeltaParam::new(0.5).unwrap();
        let sup_dev = |gamma1: f64| -> f64 {
            let p = delta_embedding(&d, gamma1).unwrap();
            let mut sup: f64 = 0.0;
            for i in 0..=500 {
                let x = -5.0 + 0.02 * i as f64;
                let dev = (coeffs_two_param(&p, x).alpha - coeffs_delta(&d, x).alpha).abs();
                sup = sup.max(dev);
            }
            sup
        };
        let d2 = sup_dev(1e2);
        let d3 = sup_dev(1e3);
        assert!(d2 / d3 >= 8.0, "ratio {} below 8", d2 / d3);
    }

    #[test]
    fn coefficients_flatten_asymptotically() {
        for p in [
            TwoParams::new(1.5, 1.249).unwrap(),
            TwoParams::new(-2.0, -3.0).unwrap(),
        ] {
            for x in [-12.0, 12.0] {
                let c = coeffs_two_param(&p, x);
                assert!((c.alpha - 1.0).abs() < 1e-8);
                assert!((c.beta - x).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn paper_inequality_implies_oracle_on_grid() {
        // coarse sweep here; the acceptance suite runs the full 0.05 grid
        let mut disagreements = 0;
        for i in 0..=24 {
            let g1 = -3.0 + 0.25 * i as f64;
            for j in 0..=44 {
                let g2 = -3.0 + 0.25 * j as f64;
                if admissible_paper(g1, g2) && !admissible_oracle(g1, g2).ok {
                    disagreements += 1;
                }
            }
        }
        assert_eq!(disagreements, 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn parity_relations(
            g1 in 0.95f64..3.0,
            g2 in -3.0f64..0.0,
            x in -5.0f64..5.0,
        ) {
            let p = TwoParams::new(g1, g2).unwrap();
            let m = TwoParams::new(-g1, g2).unwrap();
            let c = coeffs_two_param(&p, -x);
            let cm = coeffs_two_param(&m, x);
            prop_assert!((cm.alpha - c.alpha).abs() <= 1e-12 * c.alpha.abs());
            prop_assert!((cm.beta + c.beta).abs() <= 1e-12 * c.beta.abs().max(1e-6));
        }

        #[test]
        fn mielnik_alpha_is_one(g1 in 0.9f64..50.0, x in -8.0f64..8.0) {
            let p = TwoParams::new(g1, 0.0).unwrap();
            prop_assert_eq!(coeffs_two_param(&p, x).alpha, 1.0);
        }
    }
}
