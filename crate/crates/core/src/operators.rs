//! Pointwise application of the factorization operators.
//!
//! First-order operators all have the shape `L f = u·f' + v·f`:
//!
//! ```text
//! B⁻ = (alpha⁻¹ d/dx + beta)/√2       a  = (d/dx + x)/√2
//! B⁺ = (-alpha d/dx + beta)/√2        a* = (-d/dx + x)/√2
//! ```
//!
//! `B∓` reduce to `a`, `a*` when `alpha = 1`, `beta = x`. Products of
//! first-order operators are evaluated through derivative towers: applying
//! `L` to a function with `k` exact derivative orders yields `k - 1` orders,
//! so the third-order ladder compositions `A⁺ = B⁺a*B⁻` and `A = B⁺aB⁻`
//! consume exactly the three orders the [`DifferentiableFn`] contract
//! provides. Grid discretization appears only in residual reports, never in
//! the operator evaluations themselves.

use crate::factorization::TwoParams;
use crate::jet::Jet;
use crate::specfun::{DifferentiableFn, GaussianBump, Grid, PolyGaussian, Psi};
use crate::{Error, Result};
use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

/// Tags for every operator in the toolkit, with the derivative order each
/// one consumes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorTag {
    BMinus,
    BPlus,
    Annihilation,
    Creation,
    Hamiltonian,
    LTilde,
    LSelfAdjoint,
    APlus,
    AMinus,
}

impl OperatorTag {
    /// Derivative order of the argument consumed by one application.
    pub fn required_order(self) -> usize {
        match self {
            OperatorTag::BMinus
            | OperatorTag::BPlus
            | OperatorTag::Annihilation
            | OperatorTag::Creation => 1,
            OperatorTag::Hamiltonian | OperatorTag::LTilde | OperatorTag::LSelfAdjoint => 2,
            OperatorTag::APlus | OperatorTag::AMinus => 3,
        }
    }

    fn name(self) -> &'static str {
        match self {
            OperatorTag::BMinus => "B-",
            OperatorTag::BPlus => "B+",
            OperatorTag::Annihilation => "a",
            OperatorTag::Creation => "a*",
            OperatorTag::Hamiltonian => "H",
            OperatorTag::LTilde => "L~",
            OperatorTag::LSelfAdjoint => "L",
            OperatorTag::APlus => "A+",
            OperatorTag::AMinus => "A-",
        }
    }
}

/// Coefficient jets `(u, v)` of a first-order operator `u·d/dx + v` at `x`.
fn first_order_jets(tag: OperatorTag, p: Option<&TwoParams>, x: f64) -> Result<(Jet, Jet)> {
    match tag {
        OperatorTag::Annihilation => Ok((
            Jet::constant(FRAC_1_SQRT_2),
            Jet::variable(x) * FRAC_1_SQRT_2,
        )),
        OperatorTag::Creation => Ok((
            Jet::constant(-FRAC_1_SQRT_2),
            Jet::variable(x) * FRAC_1_SQRT_2,
        )),
        OperatorTag::BMinus | OperatorTag::BPlus => {
            let p = p.ok_or(Error::MissingParams { tag: tag.name() })?;
            let w = p.w_jet(x);
            let beta = p.beta_jet(x);
            let u = if tag == OperatorTag::BMinus {
                w.sqrt() * FRAC_1_SQRT_2
            } else {
                -(w.sqrt().recip()) * FRAC_1_SQRT_2
            };
            Ok((u, beta * FRAC_1_SQRT_2))
        }
        _ => Err(Error::NotFirstOrder { tag: tag.name() }),
    }
}

const BINOM: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 2.0, 1.0]];

/// Derivatives `0..=out_max` of `u·f' + v·f` by the Leibniz rule, from the
/// derivative arrays of the coefficients and the argument. Reads `f` up to
/// index `out_max + 1`.
fn first_order_tower(u: &Jet, v: &Jet, f: &[f64; 4], out_max: usize) -> [f64; 4] {
    debug_assert!(out_max <= 2);
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

fn eval_tower(f: &dyn DifferentiableFn, x: f64, up_to: usize) -> [f64; 4] {
    let mut d = [0.0; 4];
    for (k, slot) in d.iter_mut().enumerate().take(up_to + 1) {
        *slot = f.eval(x, k);
    }
    d
}

fn require_order(f: &dyn DifferentiableFn, order: usize) -> Result<()> {
    if f.max_order() < order {
        return Err(Error::DerivativeOrder {
            order,
            max: f.max_order(),
        });
    }
    Ok(())
}

/// Apply one of the first-order operators `B⁻`, `B⁺`, `a`, `a*` at `x`.
/// The `B∓` tags require parameters; `a`, `a*` ignore them.
pub fn apply_first_order(
    tag: OperatorTag,
    p: Option<&TwoParams>,
    f: &dyn DifferentiableFn,
    x: f64,
) -> Result<f64> {
    require_order(f, 1)?;
    let (u, v) = first_order_jets(tag, p, x)?;
    Ok(u.value() * f.eval(x, 1) + v.value() * f.eval(x, 0))
}

/// Oscillator Hamiltonian `H f = (-f'' + x² f)/2`.
pub fn apply_h(f: &dyn DifferentiableFn, x: f64) -> Result<f64> {
    require_order(f, 2)?;
    Ok(0.5 * (-f.eval(x, 2) + x * x * f.eval(x, 0)))
}

/// Second-order operator `B⁺B⁻ + 1/2` in its explicit form
///
/// ```text
/// L~ f = [-f'' - 2 gamma2 alpha beta e^{-x²}/u² · f'
///         + ((1 + alpha²)beta² - (1 + x²)alpha² + 1) f] / 2.
/// ```
pub fn apply_l_tilde(p: &TwoParams, f: &dyn DifferentiableFn, x: f64) -> Result<f64> {
    require_order(f, 2)?;
    let w = p.w_jet(x).value();
    let ratio = p.beta_ratio_jet(x).value();
    let drift = (1.0 - w) * ratio / w; // gamma2 alpha beta e^{-x²}/u²
    let alpha_sq = 1.0 / w;
    let beta_sq = ratio * ratio / w;
    let potential = (1.0 + alpha_sq) * beta_sq - (1.0 + x * x) * alpha_sq + 1.0;
    Ok(0.5 * (-f.eval(x, 2) - 2.0 * drift * f.eval(x, 1) + potential * f.eval(x, 0)))
}

/// First-derivative coefficient of `L~`; exactly zero on the Mielnik axis
/// `gamma2 = 0`.
pub fn l_tilde_drift(p: &TwoParams, x: f64) -> f64 {
    let w = p.w_jet(x).value();
    let ratio = p.beta_ratio_jet(x).value();
    -(1.0 - w) * ratio / w
}

/// `L~` evaluated compositionally as `B⁺(B⁻f) + f/2`; an independent code
/// path cross-checking [`apply_l_tilde`].
pub fn apply_l_tilde_composed(p: &TwoParams, f: &dyn DifferentiableFn, x: f64) -> Result<f64> {
    require_order(f, 2)?;
    let fd = eval_tower(f, x, 2);
    let (um, vm) = first_order_jets(OperatorTag::BMinus, Some(p), x)?;
    let inner = first_order_tower(&um, &vm, &fd, 1);
    let (up, vp) = first_order_jets(OperatorTag::BPlus, Some(p), x)?;
    let outer = first_order_tower(&up, &vp, &inner, 0);
    Ok(outer[0] + 0.5 * f.eval(x, 0))
}

/// Sturm-Liouville weight `omega = 2 alpha⁻²`, strictly positive for
/// admissible parameters.
pub fn weight(p: &TwoParams, x: f64) -> f64 {
    2.0 * p.w_jet(x).value()
}

/// Self-adjoint form `L f = (P f')' + q f` with `P = alpha⁻²` and
///
/// ```text
/// q = x² - (P⁻¹ + 1)·beta_M² + gamma2 e^{-x²}/u²,
/// beta_M = x + e^{-x²}/u.
/// ```
///
/// Satisfies `L f = -2 alpha⁻²·(L~ f)` pointwise, so `L~ f = lambda f` is
/// equivalent to `L f + lambda·omega·f = 0`.
pub fn apply_l_selfadjoint(p: &TwoParams, f: &dyn DifferentiableFn, x: f64) -> Result<f64> {
    require_order(f, 2)?;
    let w = p.w_jet(x);
    let ratio = p.beta_ratio_jet(x).value();
    let w0 = w.value();
    let q = x * x - (1.0 / w0 + 1.0) * ratio * ratio + (1.0 - w0);
    Ok(w0 * f.eval(x, 2) + w.derivative(1) * f.eval(x, 1) + q * f.eval(x, 0))
}

/// Third-order ladder operators `A⁺ = B⁺a*B⁻` and `A = B⁺aB⁻`, applied
/// through the derivative tower of `f` (which must supply three orders).
pub fn apply_ladder(
    tag: OperatorTag,
    p: &TwoParams,
    f: &dyn DifferentiableFn,
    x: f64,
) -> Result<f64> {
    let middle = match tag {
        OperatorTag::APlus => OperatorTag::Creation,
        OperatorTag::AMinus => OperatorTag::Annihilation,
        _ => return Err(Error::NotFirstOrder { tag: tag.name() }),
    };
    require_order(f, 3)?;
    let fd = eval_tower(f, x, 3);
    let (um, vm) = first_order_jets(OperatorTag::BMinus, Some(p), x)?;
    let h = first_order_tower(&um, &vm, &fd, 2);
    let (ua, va) = first_order_jets(middle, None, x)?;
    let g = first_order_tower(&ua, &va, &h, 1);
    let (up, vp) = first_order_jets(OperatorTag::BPlus, Some(p), x)?;
    Ok(first_order_tower(&up, &vp, &g, 0)[0])
}

/// Norms of an operator-identity residual over a grid, with the sup of the
/// reference function for relative reporting.
#[derive(Clone, Copy, Debug)]
pub struct ResidualReport {
    pub sup_norm: f64,
    pub l2_norm: f64,
    pub grid: Grid,
    /// Sup of |reference| over the grid.
    pub normalizer: f64,
}

impl ResidualReport {
    /// `sup_norm / normalizer`, falling back to the absolute sup when the
    /// reference is the zero function.
    pub fn relative(&self) -> f64 {
        if self.normalizer > 0.0 {
            self.sup_norm / self.normalizer
        } else {
            self.sup_norm
        }
    }

    pub(crate) fn from_fns(
        grid: Grid,
        residual: impl Fn(f64) -> f64,
        reference: impl Fn(f64) -> f64,
    ) -> Self {
        let mut sup: f64 = 0.0;
        let mut sum_sq = 0.0;
        let mut normalizer: f64 = 0.0;
        for x in grid.points() {
            let r = residual(x);
            sup = sup.max(r.abs());
            sum_sq += r * r;
            normalizer = normalizer.max(reference(x).abs());
        }
        ResidualReport {
            sup_norm: sup,
            l2_norm: (grid.spacing() * sum_sq).sqrt(),
            grid,
            normalizer,
        }
    }

    /// When the reference is the zero function up to roundoff (an eigenvalue
    /// hits zero, say), rescale relative reporting to the sup of |f| instead.
    pub(crate) fn with_zero_reference_fallback(
        mut self,
        grid: Grid,
        f: &dyn DifferentiableFn,
    ) -> Self {
        let sup_f = grid
            .points()
            .map(|x| f.eval(x, 0).abs())
            .fold(0.0f64, f64::max);
        if self.normalizer < 1e-10 * sup_f {
            self.normalizer = sup_f;
        }
        self
    }
}

/// Residual of the factorization identity `B⁻B⁺f = (H + 1/2)f` over a grid.
/// The identity holds for every twice-differentiable `f`, so any deviation
/// measures implementation error only.
pub fn factorization_residual(
    p: &TwoParams,
    f: &dyn DifferentiableFn,
    grid: Grid,
) -> Result<ResidualReport> {
    require_order(f, 2)?;
    let report = ResidualReport::from_fns(
        grid,
        |x| {
            let fd = eval_tower(f, x, 2);
            let (up, vp) = first_order_jets(OperatorTag::BPlus, Some(p), x).unwrap();
            let inner = first_order_tower(&up, &vp, &fd, 1);
            let (um, vm) = first_order_jets(OperatorTag::BMinus, Some(p), x).unwrap();
            let outer = first_order_tower(&um, &vm, &inner, 0);
            let href = 0.5 * (-fd[2] + x * x * fd[0]) + 0.5 * fd[0];
            outer[0] - href
        },
        |x| {
            let fd = eval_tower(f, x, 2);
            0.5 * (-fd[2] + x * x * fd[0]) + 0.5 * fd[0]
        },
    );
    Ok(report.with_zero_reference_fallback(grid, f))
}

/// The ten-function test battery used by identity checks: the first six
/// oscillator modes, two shifted Gaussians, and two polynomial-Gaussian
/// products.
pub fn standard_battery() -> Vec<Arc<dyn DifferentiableFn>> {
    let mut battery: Vec<Arc<dyn DifferentiableFn>> = Vec::with_capacity(10);
    for n in 0..=5 {
        battery.push(Arc::new(Psi::new(n).unwrap()));
    }
    battery.push(Arc::new(GaussianBump { center: 1.0 }));
    battery.push(Arc::new(GaussianBump { center: -0.7 }));
    battery.push(Arc::new(PolyGaussian::new(vec![0.0, 1.0])));
    battery.push(Arc::new(PolyGaussian::new(vec![1.0, 0.0, 1.0])));
    battery
}
