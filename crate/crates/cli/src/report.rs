//! Residual-report assembly: every identity gets one entry with its grid,
//! measured norm, tolerance, and pass/fail.

use crate::output::ensure_finite;
use crate::CliResult;
use oscfact::*;
use serde::Serialize;

#[derive(Serialize, Clone, Copy)]
pub struct GridMeta {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl From<Grid> for GridMeta {
    fn from(g: Grid) -> Self {
        GridMeta {
            x_min: g.x_min(),
            x_max: g.x_max(),
            n_points: g.n_points(),
        }
    }
}

#[derive(Serialize)]
pub struct Entry {
    pub name: String,
    /// Measured norm; relative where a tolerance is relative, absolute for
    /// the plain ODE residuals.
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l2_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    pub grid: GridMeta,
}

impl Entry {
    fn checked(name: &str, value: f64, tolerance: f64, grid: GridMeta) -> CliResult<Self> {
        ensure_finite(value)?;
        Ok(Entry {
            name: name.into(),
            value,
            sup_norm: None,
            l2_norm: None,
            tolerance: Some(tolerance),
            pass: Some(value < tolerance),
            grid,
        })
    }

    fn informational(name: &str, value: f64, grid: GridMeta) -> CliResult<Self> {
        ensure_finite(value)?;
        Ok(Entry {
            name: name.into(),
            value,
            sup_norm: None,
            l2_norm: None,
            tolerance: None,
            pass: None,
            grid,
        })
    }

    fn from_report(
        name: &str,
        rep: &ResidualReport,
        tolerance: f64,
        grid: GridMeta,
    ) -> CliResult<Self> {
        let mut e = Entry::checked(name, rep.relative(), tolerance, grid)?;
        e.sup_norm = Some(ensure_finite(rep.sup_norm)?);
        e.l2_norm = Some(ensure_finite(rep.l2_norm)?);
        Ok(e)
    }
}

#[derive(Serialize)]
pub struct AdmissibilityMeta {
    pub paper_ok: bool,
    pub oracle_ok: bool,
    pub min_g: f64,
    pub min_u: f64,
}

pub fn admissibility_meta(p: &TwoParams) -> AdmissibilityMeta {
    let a = p.admissibility();
    AdmissibilityMeta {
        paper_ok: a.paper_ok,
        oracle_ok: a.oracle_ok,
        min_g: a.min_g,
        min_u: a.min_u,
    }
}

fn sup_over_grid(grid: Grid, f: impl Fn(f64) -> f64) -> f64 {
    grid.points().map(|x| f(x).abs()).fold(0.0, f64::max)
}

/// Entries for the `B⁻B⁺ = H + 1/2` family: ODE residuals, the
/// factorization identity over the battery, eigen-identities, orthogonality,
/// ladder constants, and the symmetry of the self-adjoint form.
pub fn two_param_entries(p: &TwoParams, n_max: usize, grid: Grid) -> CliResult<Vec<Entry>> {
    let meta = GridMeta::from(grid);
    let mut entries = Vec::new();

    entries.push(Entry::checked(
        "riccati_residual_sup",
        sup_over_grid(grid, |x| riccati_residual(p.gamma1(), x)),
        1e-10,
        meta,
    )?);
    entries.push(Entry::checked(
        "bernoulli_residual_sup",
        sup_over_grid(grid, |x| bernoulli_residual(p, x)),
        1e-10,
        meta,
    )?);
    entries.push(Entry::checked(
        "coupled_residual_first_sup",
        sup_over_grid(grid, |x| coupled_residuals(p, x).0),
        1e-10,
        meta,
    )?);
    entries.push(Entry::checked(
        "coupled_residual_second_sup",
        sup_over_grid(grid, |x| coupled_residuals(p, x).1),
        1e-10,
        meta,
    )?);
    entries.push(Entry::informational(
        "l_tilde_drift_sup",
        sup_over_grid(grid, |x| l_tilde_drift(p, x)),
        meta,
    )?);

    let battery = standard_battery();
    let mut worst = 0.0f64;
    for f in &battery {
        worst = worst.max(factorization_residual(p, f.as_ref(), grid)?.relative());
    }
    entries.push(Entry::checked(
        "factorization_identity_max_relative",
        worst,
        1e-9,
        meta,
    )?);

    for n in 0..=n_max {
        let rep = eigen_residual(p, n, grid)?;
        entries.push(Entry::from_report(
            &format!("eigen_residual_n{n}"),
            &rep,
            1e-8,
            meta,
        )?);
    }

    let fam = EigenFamily::new(*p, n_max)?;
    let quad_grid = Grid::new(-12.0, 12.0, 601)?;
    let gram = gram_matrix(&fam, quad_grid)?;
    entries.push(Entry::checked(
        "gram_offdiagonal_max",
        gram_offdiagonal_max(&gram),
        1e-8,
        GridMeta::from(quad_grid),
    )?);

    for n in 1..=5usize {
        let f = EigenFn::new(*p, n)?;
        let up = EigenFn::new(*p, n + 1)?;
        let c1 = n as f64 * (n as f64).sqrt();
        let dev = sup_over_grid(grid, |x| {
            apply_ladder(OperatorTag::APlus, p, &f, x).unwrap() - c1 * up.eval(x, 0)
        });
        let sup_up = sup_over_grid(grid, |x| up.eval(x, 0));
        entries.push(Entry::checked(
            &format!("ladder_raise_n{n}_relative"),
            dev / sup_up,
            1e-7,
            meta,
        )?);

        let dev_low = if n == 1 {
            // A H_1 = 0: absolute deviation scaled by sup |H_1|
            let sup_h1 = sup_over_grid(grid, |x| f.eval(x, 0));
            sup_over_grid(grid, |x| {
                apply_ladder(OperatorTag::AMinus, p, &f, x).unwrap()
            }) / sup_h1
        } else {
            let down = EigenFn::new(*p, n - 1)?;
            let c2 = n as f64 * ((n - 1) as f64).sqrt();
            let sup_down = sup_over_grid(grid, |x| down.eval(x, 0));
            sup_over_grid(grid, |x| {
                apply_ladder(OperatorTag::AMinus, p, &f, x).unwrap() - c2 * down.eval(x, 0)
            }) / sup_down
        };
        let tol = if n == 1 { 1e-9 } else { 1e-7 };
        entries.push(Entry::checked(
            &format!("ladder_lower_n{n}_relative"),
            dev_low,
            tol,
            meta,
        )?);
    }

    // formal self-adjointness on a battery subset
    let subset = [&battery[0], &battery[2], &battery[6], &battery[8]];
    let mut asym = 0.0f64;
    for (i, f) in subset.iter().enumerate() {
        for g in subset.iter().skip(i + 1) {
            let lf_g = integrate_interval(
                |x| apply_l_selfadjoint(p, f.as_ref(), x).unwrap() * g.eval(x, 0),
                -12.0,
                12.0,
            )?;
            let f_lg = integrate_interval(
                |x| f.eval(x, 0) * apply_l_selfadjoint(p, g.as_ref(), x).unwrap(),
                -12.0,
                12.0,
            )?;
            asym = asym.max((lf_g - f_lg).abs() / lf_g.abs().max(f_lg.abs()).max(1e-3));
        }
    }
    entries.push(Entry::checked(
        "selfadjoint_symmetry_max_relative",
        asym,
        1e-8,
        meta,
    )?);

    Ok(entries)
}

/// Entries for the reversed family `B⁺B⁻ = H - 1/2` with gamma3
/// coefficients.
pub fn gamma3_entries(g: &Gamma3Param, n_max: usize, grid: Grid) -> CliResult<Vec<Entry>> {
    let meta = GridMeta::from(grid);
    let mut entries = Vec::new();

    let battery = standard_battery();
    let mut worst = 0.0f64;
    for f in &battery {
        worst = worst.max(factorization_residual_reversed(g, f.as_ref(), grid)?.relative());
    }
    entries.push(Entry::checked(
        "reversed_factorization_identity_max_relative",
        worst,
        1e-9,
        meta,
    )?);

    let mut two_path = 0.0f64;
    for f in &battery {
        for x in grid.points().step_by(40) {
            let e = apply_l_tilde_gamma3(g, f.as_ref(), x)?;
            let c = apply_l_tilde_gamma3_composed(g, f.as_ref(), x)?;
            two_path = two_path.max((e - c).abs() / e.abs().max(1e-10));
        }
    }
    entries.push(Entry::checked(
        "l_tilde_two_path_max_relative",
        two_path,
        1e-10,
        meta,
    )?);

    for n in 0..=n_max {
        let f = Gamma3EigenFn::new(*g, n)?;
        let lambda = n as f64 + 0.5;
        let mut sup_res = 0.0f64;
        let mut sup_ref = 0.0f64;
        for x in grid.points() {
            let r = apply_l_gamma3(g, &f, x)? + lambda * weight_gamma3(g, x)? * f.eval(x, 0);
            let reference = lambda * weight_gamma3(g, x)? * f.eval(x, 0);
            sup_res = sup_res.max(r.abs());
            sup_ref = sup_ref.max(reference.abs());
        }
        entries.push(Entry::checked(
            &format!("eigen_residual_n{n}"),
            sup_res / sup_ref,
            1e-8,
            meta,
        )?);
    }

    let quad_grid = Grid::new(-8.0, 8.0, 401)?;
    let gram = gram_matrix_gamma3(g, n_max, quad_grid)?;
    entries.push(Entry::checked(
        "gram_offdiagonal_max",
        gram_offdiagonal_max(&gram),
        1e-8,
        GridMeta::from(quad_grid),
    )?);

    let mh_grid = Grid::new(-3.0, 3.0, 301)?;
    for n in 0..=8usize {
        let sup_g = sup_over_grid(mh_grid, |x| modified_hermite_mode(n, x).unwrap());
        let sup_r = sup_over_grid(mh_grid, |x| modified_hermite_residual(n, x).unwrap());
        entries.push(Entry::checked(
            &format!("modified_hermite_residual_n{n}"),
            sup_r / sup_g,
            1e-10,
            GridMeta::from(mh_grid),
        )?);
    }

    Ok(entries)
}

pub fn all_pass(entries: &[Entry]) -> bool {
    entries.iter().all(|e| e.pass.unwrap_or(true))
}
