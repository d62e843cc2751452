//! Factorizations of the quantum harmonic oscillator built from pairs of
//! first-order differential operators with coefficient functions `(alpha, beta)`.
//!
//! The Hamiltonian `H = (-d²/dx² + x²)/2` (units with `hbar = m = omega = 1`)
//! admits the factorization `B⁻B⁺ = H + 1/2` with
//!
//! ```text
//! B⁻ = (alpha⁻¹ d/dx + beta) / √2,      B⁺ = (-alpha d/dx + beta) / √2,
//! ```
//!
//! where the coefficient pair solves a Riccati equation for `beta/alpha` and a
//! Bernoulli equation for `alpha`. The general solution carries two integration
//! constants `(gamma1, gamma2)`; special values reduce it to the standard
//! creation/annihilation operators, to Mielnik's one-parameter family
//! (`gamma2 = 0`), to a one-parameter `delta` family, and to the Hermite
//! operator in a scaling limit. The reversed product `B⁺B⁻ = H - 1/2` leads to
//! a different coefficient family (`gamma3`, and a two-constant `kappa` family
//! with singular points).
//!
//! The crate provides:
//!
//! - [`specfun`]: the Gaussian integral `F(x) = ∫₀ˣ e^{-t²} dt`, the Dawson
//!   integral and its growing counterpart `∫₀ˣ e^{t²} dt`, Hermite polynomials,
//!   oscillator eigenfunctions with exact derivative towers, and composite
//!   Gauss-Legendre quadrature over the line.
//! - [`factorization`]: the two-parameter coefficient family, the `delta`
//!   family, parameter admissibility (closed-form inequality and a numerical
//!   scan oracle), and residuals of the defining ODEs.
//! - [`operators`]: pointwise application of `B∓`, `a`, `a*`, `H`, the
//!   second-order operators they generate, the self-adjoint Sturm-Liouville
//!   form with its weight, and the third-order ladder operators.
//! - [`eigenfunctions`]: the modulated eigenfunction family, its zero mode,
//!   weighted Gram matrices, eigen-identity residuals, and the Hermite limit.
//! - [`altfact`]: the reversed factorization `B⁺B⁻ = H - 1/2`: the `kappa`
//!   family with singularity detection, the `gamma3` family with its
//!   self-adjoint operator and weight, and the modified Hermite identity.
//!
//! All operations are pure functions over immutable values and are safe to
//! call concurrently.

pub mod altfact;
pub mod eigenfunctions;
pub mod factorization;
pub mod fd;
pub mod jet;
pub mod operators;
pub mod specfun;

pub use altfact::{
    apply_l_gamma3, apply_l_tilde_gamma3, apply_l_tilde_gamma3_composed,
    factorization_residual_reversed, gamma3_coeffs, gram_matrix_gamma3, hn_gamma3, kappa_coeffs,
    kappa_coeffs_branch, locate_kappa_singularity, modified_hermite_mode,
    modified_hermite_residual, weight_gamma3, Gamma3EigenFn, Gamma3Param, KappaBranch, KappaParams,
};
pub use eigenfunctions::{
    eigen_residual, gram_matrix, gram_offdiagonal_max, h0, hermite_limit_profile, hn, EigenFamily,
    EigenFn,
};
pub use factorization::{
    admissible_oracle, admissible_paper, bernoulli_residual, coeffs_delta, coeffs_two_param,
    coupled_residuals, delta_embedding, riccati_residual, riccati_residual_particular,
    Admissibility, CoeffBundle, DeltaParam, OracleResult, TwoParams,
};
pub use operators::{
    apply_first_order, apply_h, apply_l_selfadjoint, apply_l_tilde, apply_l_tilde_composed,
    apply_ladder, factorization_residual, l_tilde_drift, standard_battery, weight, OperatorTag,
    ResidualReport,
};
pub use specfun::{
    dawson, erf_integral, exp_integral, hermite, integrate_interval, integrate_line, psi,
    DifferentiableFn, GaussianBump, Grid, PolyGaussian, Psi, EXP_INTEGRAL_MAX_ARG, MAX_MODE_INDEX,
    SQRT_PI_OVER_TWO,
};

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("grid needs x_min < x_max and n_points >= 3 (got [{x_min}, {x_max}] with {n_points})")]
    InvalidGrid {
        x_min: f64,
        x_max: f64,
        n_points: usize,
    },
    #[error("mode index {n} out of range (max {max})")]
    ModeIndex { n: usize, max: usize },
    #[error("derivative order {order} unsupported here (max {max})")]
    DerivativeOrder { order: usize, max: usize },
    #[error("|x| = {x} exceeds the representable range of the exp integral (max {max})")]
    Overflow { x: f64, max: f64 },
    #[error(
        "inadmissible parameters gamma1 = {gamma1}, gamma2 = {gamma2} \
         (min_g = {min_g:e}, min_u = {min_u:e})"
    )]
    Inadmissible {
        gamma1: f64,
        gamma2: f64,
        min_g: f64,
        min_u: f64,
    },
    #[error("delta = {delta} out of range (must be > -1)")]
    DeltaRange { delta: f64 },
    #[error("gamma3 = {gamma3} out of range (must be >= 0)")]
    Gamma3Range { gamma3: f64 },
    #[error("x = {x} lies within {radius:e} of the singular point x* = {singular_x}")]
    SingularPoint {
        x: f64,
        singular_x: f64,
        radius: f64,
    },
    #[error("negative radicand {radicand:e} in the kappa coefficients at x = {x}")]
    NegativeRadicand { x: f64, radicand: f64 },
    #[error("quadrature did not converge (relative change {rel_change:e} with {panels} panels)")]
    QuadratureNonConvergence { rel_change: f64, panels: usize },
    #[error("no grid points fall in the asymptotic regime (threshold {threshold})")]
    EmptyRegime { threshold: f64 },
    #[error("operator {tag} is not a first-order operator")]
    NotFirstOrder { tag: &'static str },
    #[error("operator {tag} requires two-parameter coefficients")]
    MissingParams { tag: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;
