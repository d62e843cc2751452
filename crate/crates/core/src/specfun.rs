//! Special functions and quadrature primitives.
//!
//! Everything else in the crate is built from the functions here: the bounded
//! Gaussian integral `F(x) = ∫₀ˣ e^{-t²} dt`, the Dawson integral `D(x)` and
//! the growing integral `∫₀ˣ e^{t²} dt = e^{x²} D(x)`, physicists' Hermite
//! polynomials, the L²-normalized oscillator eigenfunctions `psi_n` with exact
//! derivative towers, and composite Gauss-Legendre integration over the line.

use crate::jet::Jet;
use crate::{Error, Result};
use std::sync::OnceLock;

/// `√π/2`, the supremum of `F(x) = ∫₀ˣ e^{-t²} dt`.
pub const SQRT_PI_OVER_TWO: f64 = 0.886_226_925_452_758_013_6;

/// Largest admitted Hermite/oscillator mode index.
pub const MAX_MODE_INDEX: usize = 64;

/// Largest `|x|` for which `∫₀ˣ e^{t²} dt` stays inside f64 range.
pub const EXP_INTEGRAL_MAX_ARG: f64 = 26.0;

const PI_POW_NEG_QUARTER: f64 = 0.751_125_544_464_942_48;

/// `F(x) = ∫₀ˣ e^{-t²} dt = (√π/2)·erf(x)`.
///
/// Odd, strictly increasing, bounded by `±√π/2`.
pub fn erf_integral(x: f64) -> f64 {
    SQRT_PI_OVER_TWO * libm::erf(x)
}

/// Dawson integral `D(x) = e^{-x²} ∫₀ˣ e^{t²} dt`.
pub fn dawson(x: f64) -> f64 {
    let ax = x.abs();
    let d = if ax < 1.0 {
        // Maclaurin series: sum of (-2)^k x^{2k+1} / (2k+1)!!
        let mut term = ax;
        let mut sum = ax;
        for k in 1..200 {
            term *= -2.0 * ax * ax / (2 * k + 1) as f64;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else if ax < 8.0 {
        // e^{-x²} times the all-positive series for ∫₀ˣ e^{t²} dt; no
        // cancellation, so this is stable wherever e^{x²} is representable.
        exp_integral_series(ax) * (-ax * ax).exp()
    } else {
        // asymptotic series (1/2x) · sum of (2k-1)!! / (2x²)^k
        let inv = 1.0 / (2.0 * ax * ax);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            let next = term * (2 * k - 1) as f64 * inv;
            if next >= term || next < 1e-18 * sum {
                sum += next;
                break;
            }
            term = next;
            sum += term;
        }
        sum / (2.0 * ax)
    };
    if x < 0.0 {
        -d
    } else {
        d
    }
}

fn exp_integral_series(ax: f64) -> f64 {
    // sum over k of x^{2k+1} / (k! (2k+1)); terms peak near k = x².
    let peak = ax * ax;
    let mut term = ax;
    let mut sum = ax;
    for k in 0..4000usize {
        term *= ax * ax / (k + 1) as f64 * ((2 * k + 1) as f64 / (2 * k + 3) as f64);
        sum += term;
        if (k as f64) > peak && term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// `∫₀ˣ e^{t²} dt`, evaluated as `e^{x²}·D(x)` with `D` the Dawson integral.
///
/// Errors with [`Error::Overflow`] when `|x|` exceeds
/// [`EXP_INTEGRAL_MAX_ARG`], beyond which the value leaves f64 range.
pub fn exp_integral(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > EXP_INTEGRAL_MAX_ARG {
        return Err(Error::Overflow {
            x,
            max: EXP_INTEGRAL_MAX_ARG,
        });
    }
    Ok((x * x).exp() * dawson(x))
}

/// Physicists' Hermite polynomial `H_n(x)` via the three-term recurrence
/// `H_{n+1} = 2x H_n - 2n H_{n-1}`.
pub fn hermite(n: usize, x: f64) -> Result<f64> {
    if n > MAX_MODE_INDEX {
        return Err(Error::ModeIndex {
            n,
            max: MAX_MODE_INDEX,
        });
    }
    Ok(hermite_unchecked(n, x))
}

fn hermite_unchecked(n: usize, x: f64) -> f64 {
    let mut h0 = 1.0;
    if n == 0 {
        return h0;
    }
    let mut h1 = 2.0 * x;
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Jet of `H_n` at `x`, using `H_n' = 2n H_{n-1}`.
pub(crate) fn hermite_jet(n: usize, x: f64) -> Jet {
    let mut d = [0.0; 4];
    let mut fac = 1.0;
    for (k, slot) in d.iter_mut().enumerate() {
        if k <= n {
            *slot = fac * hermite_unchecked(n - k, x);
            fac *= 2.0 * (n - k) as f64;
        }
    }
    Jet::from_derivatives(d)
}

/// Values `psi_0(x) .. psi_hi(x)` by the normalized recurrence
/// `psi_{k+1} = √(2/(k+1)) x psi_k - √(k/(k+1)) psi_{k-1}`.
fn psi_values(hi: usize, x: f64) -> Vec<f64> {
    let mut v = vec![0.0; hi + 1];
    v[0] = PI_POW_NEG_QUARTER * (-0.5 * x * x).exp();
    if hi >= 1 {
        v[1] = std::f64::consts::SQRT_2 * x * v[0];
    }
    for k in 1..hi {
        v[k + 1] = (2.0 / (k + 1) as f64).sqrt() * x * v[k]
            - (k as f64 / (k + 1) as f64).sqrt() * v[k - 1];
    }
    v
}

/// Jet of `psi_n` at `x`.
///
/// Derivatives come from repeated application of the ladder identity
/// `psi_k' = √(k/2) psi_{k-1} - √((k+1)/2) psi_{k+1}` (with `psi_{-1} = 0`),
/// so all four orders are exact.
pub(crate) fn psi_jet(n: usize, x: f64) -> Jet {
    let vals = psi_values(n + 3, x);
    let look = |k: i64| -> f64 {
        if k < 0 {
            0.0
        } else {
            vals[k as usize]
        }
    };
    let mut terms: Vec<(i64, f64)> = vec![(n as i64, 1.0)];
    let mut d = [0.0; 4];
    for slot in d.iter_mut() {
        *slot = terms.iter().map(|&(k, c)| c * look(k)).sum();
        let mut next = Vec::with_capacity(terms.len() * 2);
        for &(k, c) in &terms {
            if k >= 1 {
                next.push((k - 1, c * (k as f64 / 2.0).sqrt()));
            }
            if k >= 0 {
                next.push((k + 1, -c * ((k + 1) as f64 / 2.0).sqrt()));
            }
        }
        terms = next;
    }
    Jet::from_derivatives(d)
}

/// Oscillator eigenfunction `psi_n(x) = (2ⁿ n! √π)^{-1/2} e^{-x²/2} H_n(x)`
/// or one of its first three derivatives.
pub fn psi(n: usize, x: f64, order: usize) -> Result<f64> {
    if n > MAX_MODE_INDEX {
        return Err(Error::ModeIndex {
            n,
            max: MAX_MODE_INDEX,
        });
    }
    if order > 3 {
        return Err(Error::DerivativeOrder { order, max: 3 });
    }
    Ok(psi_jet(n, x).derivative(order))
}

/// Uniform abscissa set `x_min, x_min + h, ..., x_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min < x_max) || n_points < 3 || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid {
                x_min,
                x_max,
                n_points,
            });
        }
        Ok(Grid {
            x_min,
            x_max,
            n_points,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.point(i))
    }
}

/// A real function queryable for its value and derivatives up to order 3.
///
/// This is the contract every operator in the crate acts on. Implementations
/// must be immutable after construction; they may be shared across threads.
pub trait DifferentiableFn: Send + Sync {
    /// `order`-th derivative at `x`; `order = 0` is the value. Implementations
    /// may panic for `order > max_order()`.
    fn eval(&self, x: f64, order: usize) -> f64;

    /// Highest derivative order supported.
    fn max_order(&self) -> usize {
        3
    }

    /// Half-width beyond which the function is negligible; used to truncate
    /// line integrals.
    fn decay_cutoff(&self) -> f64 {
        12.0
    }
}

/// Oscillator eigenfunction `psi_n` as a [`DifferentiableFn`].
#[derive(Clone, Copy, Debug)]
pub struct Psi {
    n: usize,
}

impl Psi {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_MODE_INDEX {
            return Err(Error::ModeIndex {
                n,
                max: MAX_MODE_INDEX,
            });
        }
        Ok(Psi { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

impl DifferentiableFn for Psi {
    fn eval(&self, x: f64, order: usize) -> f64 {
        psi_jet(self.n, x).derivative(order)
    }
}

/// Shifted Gaussian `e^{-(x-c)²}`.
#[derive(Clone, Copy, Debug)]
pub struct GaussianBump {
    pub center: f64,
}

impl DifferentiableFn for GaussianBump {
    fn eval(&self, x: f64, order: usize) -> f64 {
        let u = Jet::variable(x) - self.center;
        (-(u * u)).exp().derivative(order)
    }
}

/// `p(x)·e^{-x²/2}` with `p` given by its coefficients (constant term first).
#[derive(Clone, Debug)]
pub struct PolyGaussian {
    coeffs: Vec<f64>,
}

impl PolyGaussian {
    pub fn new(coeffs: Vec<f64>) -> Self {
        PolyGaussian { coeffs }
    }
}

impl DifferentiableFn for PolyGaussian {
    fn eval(&self, x: f64, order: usize) -> f64 {
        let xj = Jet::variable(x);
        let mut p = Jet::constant(0.0);
        for &c in self.coeffs.iter().rev() {
            p = p * xj + c;
        }
        (p * (-(xj * xj) / 2.0).exp()).derivative(order)
    }
}

const GL_POINTS: usize = 16;
const MAX_PANELS: usize = 1024;

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static TABLE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    TABLE.get_or_init(|| gauss_legendre(GL_POINTS))
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 1..n {
                let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// `∫ₐᵇ f dx` by composite 16-point Gauss-Legendre panels, doubling the panel
/// count until the relative change drops below 1e-10.
///
/// The convergence scale is `max(|I|, 1e-3·∫|f|)` so that integrals that
/// vanish by symmetry still converge. Errors with
/// [`Error::QuadratureNonConvergence`] if the last two refinements differ by
/// more than 1e-9 relative.
pub fn integrate_interval(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    let (nodes, weights) = gl16();
    let mut prev: Option<f64> = None;
    let mut panels = 8;
    loop {
        let width = (b - a) / panels as f64;
        let mut total = 0.0;
        let mut total_abs = 0.0;
        for p in 0..panels {
            let lo = a + p as f64 * width;
            let mid = lo + 0.5 * width;
            let half = 0.5 * width;
            for (t, w) in nodes.iter().zip(weights.iter()) {
                let v = f(mid + half * t);
                total += w * half * v;
                total_abs += w * half * v.abs();
            }
        }
        if let Some(last) = prev {
            let scale = total.abs().max(1e-3 * total_abs).max(f64::MIN_POSITIVE);
            let rel_change = (total - last).abs() / scale;
            if rel_change < 1e-10 {
                return Ok(total);
            }
            if panels >= MAX_PANELS {
                if rel_change <= 1e-9 {
                    return Ok(total);
                }
                return Err(Error::QuadratureNonConvergence { rel_change, panels });
            }
        }
        prev = Some(total);
        panels *= 2;
    }
}

/// `∫ f·g dx` over the real line, truncated to the symmetric interval set by
/// the larger of the two decay cutoffs.
pub fn integrate_line(f: &dyn DifferentiableFn, g: &dyn DifferentiableFn) -> Result<f64> {
    let half = f.decay_cutoff().max(g.decay_cutoff());
    integrate_interval(|x| f.eval(x, 0) * g.eval(x, 0), -half, half)
}
