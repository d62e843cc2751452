//! The reversed factorization `B⁺B⁻ = H - 1/2` and its coefficient families.
//!
//! Asking for the reversed product instead of `B⁻B⁺ = H + 1/2` leads to a
//! Riccati equation for the product `alpha·beta` whose general solution
//! carries two constants `(kappa1, kappa2)`:
//!
//! ```text
//! alpha(x) = ±√(1 + kappa2 e^{x²} / (kappa1 - ∫₀ˣe^{t²}dt)²),
//! beta(x)  = ±(x·(kappa1 - ∫₀ˣe^{t²}dt) + e^{x²}) / √((kappa1 - ∫₀ˣe^{t²}dt)² + kappa2 e^{x²}).
//! ```
//!
//! The denominator `kappa1 - ∫₀ˣe^{t²}dt` has a zero for every finite
//! `kappa1`, so the general family is evaluate-and-detect only: this module
//! locates the singular abscissa and refuses evaluation near it, and no
//! eigenfunction machinery is built on the kappa family.
//!
//! The particular solution `alpha·beta = x` gives the everywhere-regular
//! one-parameter family
//!
//! ```text
//! alpha = √(1 + gamma3 e^{x²}),   beta = x / √(1 + gamma3 e^{x²}),   gamma3 >= 0,
//! ```
//!
//! with eigenfunctions `H_n = psi_n / alpha`, the self-adjoint operator
//! `L = (1+gamma3 e^{x²}) d² + 2 gamma3 x e^{x²} d + (gamma3 e^{x²} + gamma3² e^{2x²} - x²)/(1+gamma3 e^{x²})`
//! and weight `omega = 2(1 + gamma3 e^{x²})`. For large `gamma3` the
//! eigenvalue problem turns into the modified Hermite equation
//! `G'' + 2xG' + 2(n+1)G = 0`, solved exactly by `G_n = e^{-x²} H_n(x)` -
//! oscillator-type functions with a Gaussian factor of double width.

use crate::jet::Jet;
use crate::operators::ResidualReport;
use crate::specfun::{exp_integral, hermite_jet, psi_jet, DifferentiableFn, Grid};
use crate::{Error, Result};
use std::f64::consts::FRAC_1_SQRT_2;

pub use crate::factorization::CoeffBundle;

/// Exclusion radius around the kappa-family singular point.
pub const KAPPA_EXCLUSION_RADIUS: f64 = 1e-6;

/// Largest family index for the gamma3 eigenfunctions.
pub const MAX_GAMMA3_INDEX: usize = 32;

/// Largest `|x|` for which `e^{x²}` coefficient evaluations stay finite.
pub const GAMMA3_MAX_ARG: f64 = 26.0;

/// Parameter of the regular reversed-factorization family; `gamma3 >= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gamma3Param {
    gamma3: f64,
}

impl Gamma3Param {
    pub fn new(gamma3: f64) -> Result<Self> {
        if !(gamma3 >= 0.0) || !gamma3.is_finite() {
            return Err(Error::Gamma3Range { gamma3 });
        }
        Ok(Gamma3Param { gamma3 })
    }

    pub fn gamma3(&self) -> f64 {
        self.gamma3
    }

    /// Jet of `A(x) = 1 + gamma3 e^{x²}`.
    fn a_jet(&self, x: f64) -> Jet {
        let xj = Jet::variable(x);
        1.0 + Jet::constant(self.gamma3) * (xj * xj).exp()
    }
}

fn check_arg(x: f64) -> Result<()> {
    if !x.is_finite() || x.abs() > GAMMA3_MAX_ARG {
        return Err(Error::Overflow {
            x,
            max: GAMMA3_MAX_ARG,
        });
    }
    Ok(())
}

/// Coefficients `alpha = √A`, `beta = x/√A` of the gamma3 family; the
/// product `alpha·beta = x` holds identically.
pub fn gamma3_coeffs(g: &Gamma3Param, x: f64) -> Result<CoeffBundle> {
    check_arg(x)?;
    let alpha = g.a_jet(x).sqrt();
    let beta = Jet::variable(x) / alpha;
    Ok(CoeffBundle::from_jets(alpha, beta))
}

/// Unnormalized eigenfunction `H_n^{gamma3}(x) = psi_n(x) / √(1 + gamma3 e^{x²})`;
/// equals `B⁻ psi_{n+1} / √(n+1)` pointwise.
pub fn hn_gamma3(g: &Gamma3Param, n: usize, x: f64) -> Result<f64> {
    if n > MAX_GAMMA3_INDEX {
        return Err(Error::ModeIndex {
            n,
            max: MAX_GAMMA3_INDEX,
        });
    }
    check_arg(x)?;
    Ok(Gamma3EigenFn::new(*g, n)?.eval(x, 0))
}

/// Eigenfunction of the gamma3 family as a [`DifferentiableFn`].
#[derive(Clone, Copy, Debug)]
pub struct Gamma3EigenFn {
    param: Gamma3Param,
    n: usize,
}

impl Gamma3EigenFn {
    pub fn new(param: Gamma3Param, n: usize) -> Result<Self> {
        if n > MAX_GAMMA3_INDEX {
            return Err(Error::ModeIndex {
                n,
                max: MAX_GAMMA3_INDEX,
            });
        }
        Ok(Gamma3EigenFn { param, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

impl DifferentiableFn for Gamma3EigenFn {
    fn eval(&self, x: f64, order: usize) -> f64 {
        (psi_jet(self.n, x) / self.param.a_jet(x).sqrt()).derivative(order)
    }

    fn decay_cutoff(&self) -> f64 {
        // the alpha⁻¹ envelope sharpens the Gaussian decay to ~e^{-x²}
        8.0
    }
}

/// Coefficient jets `(u, v)` of `B⁻ = (alpha⁻¹ d/dx + beta)/√2` and
/// `B⁺ = (-alpha d/dx + beta)/√2` for the gamma3 family.
fn b_jets_gamma3(g: &Gamma3Param, x: f64) -> ((Jet, Jet), (Jet, Jet)) {
    let alpha = g.a_jet(x).sqrt();
    let beta = Jet::variable(x) / alpha;
    let v = beta * FRAC_1_SQRT_2;
    (
        (alpha.recip() * FRAC_1_SQRT_2, v),
        (-alpha * FRAC_1_SQRT_2, v),
    )
}

const BINOM: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 2.0, 1.0]];

fn first_order_tower(u: &Jet, v: &Jet, f: &[f64; 4], out_max: usize) -> [f64; 4] {
    let ud = u.derivatives();
    let vd = v.derivatives();
    let mut out = [0.0; 4];
    for (k, slot) in out.iter_mut().enumerate().take(out_max + 1) {
        let mut acc = 0.0;
        for j in 0..=k {
            acc += BINOM[k][j] * (ud[j] * f[k - j + 1] + vd[j] * f[k - j]);
        }
        *slot = acc;
    }
    out
}

/// Second-order operator `B⁻B⁺ - 1/2` of the gamma3 family in explicit form:
///
/// ```text
/// L~ f = -f''/2 - gamma3 x e^{x²}/A · f' + [ (1 + x² + gamma3 e^{x²})/(2A²) - 1/2 ] f,
/// ```
///
/// with `A = 1 + gamma3 e^{x²}`.
pub fn apply_l_tilde_gamma3(g: &Gamma3Param, f: &dyn DifferentiableFn, x: f64) -> Result<f64> {
    check_arg(x)?;
    if f.max_order() < 2 {
        return Err(Error::DerivativeOrder {
            order: 2,
            max: f.max_order(),
        });
    }
    let a = g.a_jet(x).value();
    let gamma_e = a - 1.0; // gamma3 e^{x²}
    let drift = gamma_e * x / a;
    let potential = (1.0 + x * x + gamma_e) / (2.0 * a * a) - 0.5;
    Ok(-0.5 * f.eval(x, 2) - drift * f.eval(x, 1) + potential * f.eval(x, 0))
}

/// `B⁻B⁺ - 1/2` evaluated compositionally; cross-checks
/// [`apply_l_tilde_gamma3`].
pub fn apply_l_tilde_gamma3_composed(
    g: &Gamma3Param,
    f: &dyn DifferentiableFn,
    x: f64,
) -> Result<f64> {
    check_arg(x)?;
    if f.max_order() < 2 {
        return Err(Error::DerivativeOrder {
            order: 2,
            max: f.max_order(),
        });
    }
    let fd = [f.eval(x, 0), f.eval(x, 1), f.eval(x, 2), 0.0];
    let ((um, vm), (up, vp)) = b_jets_gamma3(g, x);
    let inner = first_order_tower(&up, &vp, &fd, 1);
    let outer = first_order_tower(&um, &vm, &inner, 0);
    Ok(outer[0] - 0.5 * f.eval(x, 0))
}

/// Self-adjoint form of the gamma3 operator:
///
/// ```text
/// L f = A f'' + 2 gamma3 x e^{x²} f' + (gamma3 e^{x²} + gamma3² e^{2x²} - x²)/A · f.
/// ```
pub fn apply_l_gamma3(g: &Gamma3Param, f: &dyn DifferentiableFn, x: f64) -> Result<f64> {
    check_arg(x)?;
    if f.max_order() < 2 {
        return Err(Error::DerivativeOrder {
            order: 2,
            max: f.max_order(),
        });
    }
    let a = g.a_jet(x).value();
    let gamma_e = a - 1.0;
    let q = (gamma_e + gamma_e * gamma_e - x * x) / a;
    Ok(a * f.eval(x, 2) + 2.0 * gamma_e * x * f.eval(x, 1) + q * f.eval(x, 0))
}

/// Weight `omega = 2(1 + gamma3 e^{x²})` of the gamma3 Sturm-Liouville form.
pub fn weight_gamma3(g: &Gamma3Param, x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(2.0 * g.a_jet(x).value())
}

/// Residual of the reversed factorization identity `B⁺B⁻f = (H - 1/2)f`
/// with gamma3 coefficients over a grid.
pub fn factorization_residual_reversed(
    g: &Gamma3Param,
    f: &dyn DifferentiableFn,
    grid: Grid,
) -> Result<ResidualReport> {
    if f.max_order() < 2 {
        return Err(Error::DerivativeOrder {
            order: 2,
            max: f.max_order(),
        });
    }
    check_arg(grid.x_min())?;
    check_arg(grid.x_max())?;
    let report = ResidualReport::from_fns(
        grid,
        |x| {
            let fd = [f.eval(x, 0), f.eval(x, 1), f.eval(x, 2), 0.0];
            let ((um, vm), (up, vp)) = b_jets_gamma3(g, x);
            let inner = first_order_tower(&um, &vm, &fd, 1);
            let outer = first_order_tower(&up, &vp, &inner, 0);
            let href = 0.5 * (-fd[2] + x * x * fd[0]) - 0.5 * fd[0];
            outer[0] - href
        },
        // for the ground mode the reference (H - 1/2)f vanishes identically
        |x| 0.5 * (-f.eval(x, 2) + x * x * f.eval(x, 0)) - 0.5 * f.eval(x, 0),
    );
    Ok(report.with_zero_reference_fallback(grid, f))
}

/// Gram matrix `G_mn = ∫ H_m^{gamma3} H_n^{gamma3} omega dx` over the grid
/// window, by blind quadrature of the weighted products.
pub fn gram_matrix_gamma3(g: &Gamma3Param, n_max: usize, grid: Grid) -> Result<Vec<Vec<f64>>> {
    if n_max > MAX_GAMMA3_INDEX {
        return Err(Error::ModeIndex {
            n: n_max,
            max: MAX_GAMMA3_INDEX,
        });
    }
    let n = n_max + 1;
    let mut gram = vec![vec![0.0; n]; n];
    for m in 0..n {
        let fm = Gamma3EigenFn::new(*g, m)?;
        for k in m..n {
            let fk = Gamma3EigenFn::new(*g, k)?;
            let val = crate::specfun::integrate_interval(
                |x| fm.eval(x, 0) * fk.eval(x, 0) * 2.0 * g.a_jet(x).value(),
                grid.x_min(),
                grid.x_max(),
            )?;
            gram[m][k] = val;
            gram[k][m] = val;
        }
    }
    Ok(gram)
}

/// Residual of the modified Hermite equation `G'' + 2xG' + 2(n+1)G = 0` for
/// `G_n = e^{-x²} H_n(x)`; zero analytically, so the value measures only
/// roundoff in the derivative tower.
pub fn modified_hermite_residual(n: usize, x: f64) -> Result<f64> {
    if n > MAX_GAMMA3_INDEX {
        return Err(Error::ModeIndex {
            n,
            max: MAX_GAMMA3_INDEX,
        });
    }
    let xj = Jet::variable(x);
    let g = (-(xj * xj)).exp() * hermite_jet(n, x);
    Ok(g.derivative(2) + 2.0 * x * g.derivative(1) + 2.0 * (n as f64 + 1.0) * g.value())
}

/// The double-width mode `G_n(x) = e^{-x²} H_n(x)` solving the modified
/// Hermite equation.
pub fn modified_hermite_mode(n: usize, x: f64) -> Result<f64> {
    if n > MAX_GAMMA3_INDEX {
        return Err(Error::ModeIndex {
            n,
            max: MAX_GAMMA3_INDEX,
        });
    }
    Ok((-x * x).exp() * crate::specfun::hermite(n, x)?)
}

/// Sign choices for the two ± branches of the kappa coefficients; the
/// `(+,+)` pair is the default throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KappaBranch {
    pub alpha_plus: bool,
    pub beta_plus: bool,
}

impl Default for KappaBranch {
    fn default() -> Self {
        KappaBranch {
            alpha_plus: true,
            beta_plus: true,
        }
    }
}

/// Parameters of the general reversed-factorization family, with the
/// location of the singular abscissa (where `kappa1 = ∫₀ˣe^{t²}dt`), if it
/// is representable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KappaParams {
    kappa1: f64,
    kappa2: f64,
    singular_x: Option<f64>,
}

impl KappaParams {
    pub fn new(kappa1: f64, kappa2: f64) -> Self {
        KappaParams {
            kappa1,
            kappa2,
            singular_x: locate_kappa_singularity(kappa1),
        }
    }

    pub fn kappa1(&self) -> f64 {
        self.kappa1
    }

    pub fn kappa2(&self) -> f64 {
        self.kappa2
    }

    pub fn singular_x(&self) -> Option<f64> {
        self.singular_x
    }
}

/// Root of `∫₀ˣe^{t²}dt = kappa1`, by bisection to 1e-12; `None` when
/// `|kappa1|` exceeds the representable range of the integral. The integrand
/// is positive so the root is unique.
pub fn locate_kappa_singularity(kappa1: f64) -> Option<f64> {
    if kappa1 == 0.0 {
        return Some(0.0);
    }
    let target = kappa1.abs();
    let hi_val = exp_integral(GAMMA3_MAX_ARG).ok()?;
    if target > hi_val {
        return None;
    }
    let mut lo = 0.0f64;
    let mut hi = GAMMA3_MAX_ARG;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if exp_integral(mid).unwrap_or(f64::INFINITY) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    Some(if kappa1 < 0.0 { -root } else { root })
}

/// Kappa-family coefficients on the default `(+,+)` branch.
pub fn kappa_coeffs(k: &KappaParams, x: f64) -> Result<CoeffBundle> {
    kappa_coeffs_branch(k, x, KappaBranch::default())
}

/// Kappa-family coefficients on an explicit sign branch.
///
/// Errors when `x` falls within [`KAPPA_EXCLUSION_RADIUS`] of the singular
/// abscissa, when the radicand goes negative (possible for `kappa2 < 0`),
/// or when `e^{x²}` overflows.
pub fn kappa_coeffs_branch(k: &KappaParams, x: f64, branch: KappaBranch) -> Result<CoeffBundle> {
    check_arg(x)?;
    if let Some(xs) = k.singular_x {
        if (x - xs).abs() < KAPPA_EXCLUSION_RADIUS {
            return Err(Error::SingularPoint {
                x,
                singular_x: xs,
                radius: KAPPA_EXCLUSION_RADIUS,
            });
        }
    }
    let xj = Jet::variable(x);
    let e = (xj * xj).exp();
    let g_int = {
        let v = exp_integral(x)?;
        let e0 = (x * x).exp();
        Jet::from_derivatives([v, e0, 2.0 * x * e0, (4.0 * x * x + 2.0) * e0])
    };
    let den = Jet::constant(k.kappa1) - g_int;
    let rad = 1.0 + Jet::constant(k.kappa2) * e / (den * den);
    if rad.value() < 0.0 {
        return Err(Error::NegativeRadicand {
            x,
            radicand: rad.value(),
        });
    }
    let alpha = rad.sqrt() * if branch.alpha_plus { 1.0 } else { -1.0 };
    let beta_num = xj * den + e;
    let beta_rad = den * den + Jet::constant(k.kappa2) * e;
    if beta_rad.value() < 0.0 {
        return Err(Error::NegativeRadicand {
            x,
            radicand: beta_rad.value(),
        });
    }
    let beta = beta_num / beta_rad.sqrt() * if branch.beta_plus { 1.0 } else { -1.0 };
    Ok(CoeffBundle::from_jets(alpha, beta))
}
