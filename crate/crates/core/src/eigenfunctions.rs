//! The modulated eigenfunction family of the two-parameter operator.
//!
//! The excited members come from applying `B⁺` to the oscillator modes,
//! which in closed form reads
//!
//! ```text
//! H_n(x) = alpha(x) [ √n psi_n(x) + e^{-x²}/(√2 u(x)) psi_{n-1}(x) ],  n >= 1,
//! ```
//!
//! while the zero mode is not `B⁺` of anything; it is the function
//! annihilated by `B⁻`:
//!
//! ```text
//! H_0(x) = psi_0(x) / √( u(x)² - gamma2 e^{-x²} ).
//! ```
//!
//! The family solves `L H_n + lambda_n omega H_n = 0` with the oscillator
//! spectrum `lambda_n = n + 1/2` and is orthogonal under the weight
//! `omega = 2 alpha⁻²`. The raw (unnormalized) scale fixed by the closed
//! form is primary - it is what makes the ladder constants `n√n` and
//! `n√(n-1)` come out - with L²(omega) normalization available as an opt-in.
//!
//! For `gamma2 = -delta·gamma1²` with `|gamma1|` and `delta` large the
//! members approach Hermite polynomials times a fixed envelope; the
//! correlation with `H_n(x)` over the region `delta·e^{-x²} > 10` measures
//! how far into that regime a parameter point sits.

use crate::factorization::TwoParams;
use crate::jet::Jet;
use crate::operators::{apply_l_selfadjoint, weight, ResidualReport};
use crate::specfun::{hermite, integrate_interval, DifferentiableFn, Grid};
use crate::{Error, Result};
use std::f64::consts::FRAC_1_SQRT_2;

/// Largest family index.
pub const MAX_FAMILY_INDEX: usize = 32;

/// Threshold on `delta·e^{-x²}` above which the Hermite-limit regime is
/// considered reached (the envelope approximation holds to a few percent).
pub const HERMITE_REGIME_THRESHOLD: f64 = 10.0;

/// One member of the eigenfunction family as a [`DifferentiableFn`] with
/// full order-3 support.
#[derive(Clone, Copy, Debug)]
pub struct EigenFn {
    params: TwoParams,
    n: usize,
    scale: f64,
}

impl EigenFn {
    pub fn new(params: TwoParams, n: usize) -> Result<Self> {
        if n > MAX_FAMILY_INDEX {
            return Err(Error::ModeIndex {
                n,
                max: MAX_FAMILY_INDEX,
            });
        }
        Ok(EigenFn {
            params,
            n,
            scale: 1.0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn jet(&self, x: f64) -> Jet {
        let p = &self.params;
        let raw = if self.n == 0 {
            // psi_0 / sqrt(u² - gamma2 e^{-x²}) = psi_0 / (|u| sqrt(W))
            let u = p.u_jet(x);
            crate::specfun::psi_jet(0, x) / (u.abs() * p.w_jet(x).sqrt())
        } else {
            let u = p.u_jet(x);
            let xj = Jet::variable(x);
            let e = (-(xj * xj)).exp();
            let bracket = (self.n as f64).sqrt() * crate::specfun::psi_jet(self.n, x)
                + e / u * FRAC_1_SQRT_2 * crate::specfun::psi_jet(self.n - 1, x);
            p.alpha_jet(x) * bracket
        };
        raw * self.scale
    }
}

impl DifferentiableFn for EigenFn {
    fn eval(&self, x: f64, order: usize) -> f64 {
        self.jet(x).derivative(order)
    }
}

/// Zero mode `H_0(x)`, the solution of `B⁻ H_0 = 0`.
pub fn h0(p: &TwoParams, x: f64) -> f64 {
    EigenFn::new(*p, 0).unwrap().eval(x, 0)
}

/// Excited member `H_n(x)` for `n >= 1`; equals `B⁺ psi_{n-1}` pointwise.
pub fn hn(p: &TwoParams, n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::ModeIndex { n, max: 0 });
    }
    Ok(EigenFn::new(*p, n)?.eval(x, 0))
}

/// The family `H_0 .. H_{n_max}`, raw or L²(omega)-normalized.
#[derive(Clone, Debug)]
pub struct EigenFamily {
    params: TwoParams,
    n_max: usize,
    normalized: bool,
    scales: Vec<f64>,
}

impl EigenFamily {
    /// Raw family with the scale fixed by the closed form.
    pub fn new(params: TwoParams, n_max: usize) -> Result<Self> {
        if n_max > MAX_FAMILY_INDEX {
            return Err(Error::ModeIndex {
                n: n_max,
                max: MAX_FAMILY_INDEX,
            });
        }
        Ok(EigenFamily {
            params,
            n_max,
            normalized: false,
            scales: vec![1.0; n_max + 1],
        })
    }

    /// Family rescaled so that `∫ H_n² omega dx = 1` on the quadrature
    /// window.
    pub fn normalized(params: TwoParams, n_max: usize) -> Result<Self> {
        let mut fam = EigenFamily::new(params, n_max)?;
        for n in 0..=n_max {
            let f = fam.member(n);
            let half = f.decay_cutoff();
            let norm_sq = integrate_interval(
                |x| {
                    let v = f.eval(x, 0);
                    v * v * weight(&params, x)
                },
                -half,
                half,
            )?;
            fam.scales[n] = 1.0 / norm_sq.sqrt();
        }
        fam.normalized = true;
        Ok(fam)
    }

    pub fn params(&self) -> &TwoParams {
        &self.params
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn member(&self, n: usize) -> EigenFn {
        assert!(n <= self.n_max, "family index {n} beyond n_max {}", self.n_max);
        EigenFn {
            params: self.params,
            n,
            scale: self.scales[n],
        }
    }
}

/// Gram matrix `G_mn = ∫ H_m H_n omega dx` over the window of `grid`.
pub fn gram_matrix(fam: &EigenFamily, grid: Grid) -> Result<Vec<Vec<f64>>> {
    let n = fam.n_max() + 1;
    let p = *fam.params();
    let mut g = vec![vec![0.0; n]; n];
    for m in 0..n {
        let fm = fam.member(m);
        for k in m..n {
            let fk = fam.member(k);
            let val = integrate_interval(
                |x| fm.eval(x, 0) * fk.eval(x, 0) * weight(&p, x),
                grid.x_min(),
                grid.x_max(),
            )?;
            g[m][k] = val;
            g[k][m] = val;
        }
    }
    Ok(g)
}

/// Largest normalized off-diagonal entry `|G_mn| / √(G_mm G_nn)`.
pub fn gram_offdiagonal_max(g: &[Vec<f64>]) -> f64 {
    let n = g.len();
    let mut worst: f64 = 0.0;
    for m in 0..n {
        for k in 0..n {
            if m != k {
                worst = worst.max(g[m][k].abs() / (g[m][m] * g[k][k]).sqrt());
            }
        }
    }
    worst
}

/// Residual of the eigen-identity `L H_n + lambda_n omega H_n = 0` with
/// `lambda_n = n + 1/2`, reported against the reference `lambda_n omega H_n`.
pub fn eigen_residual(p: &TwoParams, n: usize, grid: Grid) -> Result<ResidualReport> {
    let f = EigenFn::new(*p, n)?;
    let lambda = n as f64 + 0.5;
    Ok(ResidualReport::from_fns(
        grid,
        |x| apply_l_selfadjoint(p, &f, x).unwrap() + lambda * weight(p, x) * f.eval(x, 0),
        |x| lambda * weight(p, x) * f.eval(x, 0),
    ))
}

/// Pearson correlation between the sampled member `H_n` and the Hermite
/// polynomial `H_n(x)` on the sub-grid where `delta_eff·e^{-x²}` exceeds
/// [`HERMITE_REGIME_THRESHOLD`], with `delta_eff = -gamma2/gamma1²`.
///
/// Errors with [`Error::EmptyRegime`] when no grid point is in the regime,
/// which includes every `gamma2 >= 0` parameter point.
pub fn hermite_limit_profile(p: &TwoParams, n: usize, grid: Grid) -> Result<f64> {
    if n == 0 || n > MAX_FAMILY_INDEX {
        return Err(Error::ModeIndex {
            n,
            max: MAX_FAMILY_INDEX,
        });
    }
    let delta_eff = -p.gamma2() / (p.gamma1() * p.gamma1());
    let member = EigenFn::new(*p, n)?;
    let mut xs = Vec::new();
    for x in grid.points() {
        if delta_eff * (-x * x).exp() > HERMITE_REGIME_THRESHOLD {
            xs.push(x);
        }
    }
    if xs.len() < 3 {
        return Err(Error::EmptyRegime {
            threshold: HERMITE_REGIME_THRESHOLD,
        });
    }
    let a: Vec<f64> = xs.iter().map(|&x| member.eval(x, 0)).collect();
    let b: Vec<f64> = xs.iter().map(|&x| hermite(n, x).unwrap()).collect();
    Ok(pearson(&a, &b))
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b.iter()) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va * vb).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::delta_embedding;
    use crate::factorization::DeltaParam;
    use crate::operators::{apply_first_order, apply_l_tilde, apply_ladder, OperatorTag};
    use crate::specfun::{psi, Psi};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn zero_mode_value_at_origin() {
        let p = TwoParams::new(1.5, 1.249).unwrap();
        assert_relative_eq!(h0(&p, 0.0), 0.750_750_263_130_267_7, max_relative = 1e-13);
    }

    #[test]
    fn zero_mode_annihilated_by_b_minus() {
        let p = TwoParams::new(2.0, -1.0).unwrap();
        let f = EigenFn::new(p, 0).unwrap();
        for i in 0..20 {
            let x = -5.7 + 0.6 * i as f64;
            let v = apply_first_order(OperatorTag::BMinus, Some(&p), &f, x).unwrap();
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn zero_mode_mielnik_large_gamma1_is_gaussian() {
        // gamma2 = 0, |gamma1| large: H_0 -> psi_0/|gamma1|
        let p = TwoParams::new(1e8, 0.0).unwrap();
        for &x in &[-2.0, 0.0, 1.3] {
            assert_relative_eq!(
                h0(&p, x) * 1e8,
                psi(0, x, 0).unwrap(),
                max_relative = 1e-7
            );
        }
    }

    #[test]
    fn excited_members_equal_b_plus_of_modes() {
        let p = TwoParams::new(1.5, 1.249).unwrap();
        let v = hn(&p, 1, 0.4).unwrap();
        assert_relative_eq!(v, 0.735_130_600_859_831_8, max_relative = 1e-13);
        let psi0 = Psi::new(0).unwrap();
        let composed = apply_first_order(OperatorTag::BPlus, Some(&p), &psi0, 0.4).unwrap();
        assert_relative_eq!(v, composed, max_relative = 1e-12);

        for n in 1..=6usize {
            let inner = Psi::new(n - 1).unwrap();
            for &x in &[-2.7, -0.3, 0.0, 1.9] {
                let closed = hn(&p, n, x).unwrap();
                let two_path =
                    apply_first_order(OperatorTag::BPlus, Some(&p), &inner, x).unwrap();
                assert_relative_eq!(closed, two_path, max_relative = 1e-12, epsilon = 1e-15);
            }
        }
        assert!(hn(&p, 0, 0.0).is_err());
    }

    #[test]
    fn standard_limit_of_excited_members() {
        // gamma2 = 0, gamma1 huge: H_n -> sqrt(n) psi_n
        let p = TwoParams::new(1e8, 0.0).unwrap();
        for n in 1..=4usize {
            for &x in &[-1.0, 0.5] {
                assert_relative_eq!(
                    hn(&p, n, x).unwrap(),
                    (n as f64).sqrt() * psi(n, x, 0).unwrap(),
                    max_relative = 1e-6
                );
            }
        }
    }

    #[test]
    fn family_parity_relation() {
        // H with (-gamma1, gamma2) equals (-1)^n H with (gamma1, gamma2) at -x
        let p = TwoParams::new(1.5, 1.249).unwrap();
        let m = TwoParams::new(-1.5, 1.249).unwrap();
        for n in 0..=5usize {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for &x in &[-2.1, -0.4, 0.8, 3.0] {
                let lhs = EigenFn::new(m, n).unwrap().eval(x, 0);
                let rhs = sign * EigenFn::new(p, n).unwrap().eval(-x, 0);
                assert_relative_eq!(lhs, rhs, max_relative = 1e-10, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn eigen_identity_residuals() {
        let grid = Grid::new(-6.0, 6.0, 601).unwrap();
        let p = TwoParams::new(1.5, 1.249).unwrap();
        for n in 0..=4 {
            let r = eigen_residual(&p, n, grid).unwrap();
            assert!(r.relative() < 1e-8, "n = {n}: relative {}", r.relative());
        }
        let m = TwoParams::new(-1.5, 1.249).unwrap();
        let r = eigen_residual(&m, 1, grid).unwrap();
        assert!(r.relative() < 1e-8);
        // near-standard regime
        let far = TwoParams::new(1e3, 990.0).unwrap();
        let r = eigen_residual(&far, 2, grid).unwrap();
        assert!(r.relative() < 1e-8);
    }

    #[test]
    fn l_tilde_eigenvalue_on_members() {
        // L~ H_n = (n + 1/2) H_n, including the zero mode
        let p = TwoParams::new(1.5, 1.249).unwrap();
        for n in 0..=3usize {
            let f = EigenFn::new(p, n).unwrap();
            for &x in &[-1.1, 0.45, 2.0] {
                let lhs = apply_l_tilde(&p, &f, x).unwrap();
                let rhs = (n as f64 + 0.5) * f.eval(x, 0);
                assert_relative_eq!(lhs, rhs, max_relative = 1e-9, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn ladder_constants() {
        let grid = Grid::new(-6.0, 6.0, 601).unwrap();
        for p in [
            TwoParams::new(2.0, -1.0).unwrap(),
            TwoParams::new(1.5, 1.249).unwrap(),
        ] {
            for n in 1..=5usize {
                let f = EigenFn::new(p, n).unwrap();
                let up = EigenFn::new(p, n + 1).unwrap();
                let c1 = n as f64 * (n as f64).sqrt();
                let mut dev: f64 = 0.0;
                let mut sup_up: f64 = 0.0;
                for x in grid.points() {
                    let raised = apply_ladder(OperatorTag::APlus, &p, &f, x).unwrap();
                    dev = dev.max((raised - c1 * up.eval(x, 0)).abs());
                    sup_up = sup_up.max(up.eval(x, 0).abs());
                }
                assert!(dev / sup_up < 1e-7, "raise n={n}: {}", dev / sup_up);

                if n >= 2 {
                    let down = EigenFn::new(p, n - 1).unwrap();
                    let c2 = n as f64 * ((n - 1) as f64).sqrt();
                    let mut dev: f64 = 0.0;
                    let mut sup_down: f64 = 0.0;
                    for x in grid.points() {
                        let lowered = apply_ladder(OperatorTag::AMinus, &p, &f, x).unwrap();
                        dev = dev.max((lowered - c2 * down.eval(x, 0)).abs());
                        sup_down = sup_down.max(down.eval(x, 0).abs());
                    }
                    assert!(dev / sup_down < 1e-7, "lower n={n}: {}", dev / sup_down);
                }
            }
            // A H_1 = 0 (c2 = 1·√0): compare against zero at the scale of H_1
            let h1 = EigenFn::new(p, 1).unwrap();
            let mut dev: f64 = 0.0;
            let mut sup_h1: f64 = 0.0;
            for x in grid.points() {
                dev = dev.max(
                    apply_ladder(OperatorTag::AMinus, &p, &h1, x)
                        .unwrap()
                        .abs(),
                );
                sup_h1 = sup_h1.max(h1.eval(x, 0).abs());
            }
            assert!(dev < 1e-9 * sup_h1, "A H_1 dev {dev}");
        }
    }

    #[test]
    fn gram_matrix_is_diagonal() {
        let p = TwoParams::new(1.5, 1.249).unwrap();
        let fam = EigenFamily::new(p, 6).unwrap();
        let grid = Grid::new(-12.0, 12.0, 601).unwrap();
        let g = gram_matrix(&fam, grid).unwrap();
        assert!(gram_offdiagonal_max(&g) < 1e-8);
        for n in 0..=6 {
            assert!(g[n][n] > 0.0);
        }
    }

    #[test]
    fn gram_standard_limit_pattern() {
        // gamma2 = 0, gamma1 = 1e8: G_nn -> 2n for n >= 1 (H_n -> sqrt(n) psi_n,
        // omega -> 2), off-diagonals vanish
        let p = TwoParams::new(1e8, 0.0).unwrap();
        let fam = EigenFamily::new(p, 4).unwrap();
        let grid = Grid::new(-12.0, 12.0, 601).unwrap();
        let g = gram_matrix(&fam, grid).unwrap();
        for n in 1..=4usize {
            assert_relative_eq!(g[n][n], 2.0 * n as f64, max_relative = 1e-6);
        }
        assert!(g[0][0] > 0.0);
        assert!(gram_offdiagonal_max(&g) < 1e-7);
    }

    #[test]
    fn normalized_family_has_unit_norms() {
        let p = TwoParams::new(1.5, 1.249).unwrap();
        let fam = EigenFamily::normalized(p, 3).unwrap();
        assert!(fam.is_normalized());
        let grid = Grid::new(-12.0, 12.0, 601).unwrap();
        let g = gram_matrix(&fam, grid).unwrap();
        for n in 0..=3 {
            assert_relative_eq!(g[n][n], 1.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn hermite_limit_reached_at_large_delta() {
        let d = DeltaParam::new(1e6).unwrap();
        let p = delta_embedding(&d, 1e3).unwrap();
        let grid = Grid::new(-2.0, 2.0, 201).unwrap();
        let c1 = hermite_limit_profile(&p, 1, grid).unwrap();
        assert!(c1 > 0.9999, "n=1 correlation {c1}");
        let c2 = hermite_limit_profile(&p, 2, grid).unwrap();
        assert!(c2 > 0.999, "n=2 correlation {c2}");
    }

    #[test]
    fn hermite_limit_out_of_regime_control() {
        // delta_eff = 1: correlation is reported but materially lower
        let d = DeltaParam::new(1.0).unwrap();
        let p = delta_embedding(&d, 1e3).unwrap();
        let grid = Grid::new(-2.0, 2.0, 201).unwrap();
        match hermite_limit_profile(&p, 1, grid) {
            Ok(c) => assert!(c < 0.9999),
            Err(Error::EmptyRegime { .. }) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn hermite_limit_empty_regime_errors() {
        let p = TwoParams::new(1.5, 1.249).unwrap(); // gamma2 > 0: no regime
        let grid = Grid::new(-2.0, 2.0, 201).unwrap();
        assert!(matches!(
            hermite_limit_profile(&p, 1, grid),
            Err(Error::EmptyRegime { .. })
        ));
    }
}
