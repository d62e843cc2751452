//! Subcommand implementations.

use crate::output::{ensure_finite, write_json, Cell, CsvWriter};
use crate::report::{
    admissibility_meta, all_pass, gamma3_entries, two_param_entries, AdmissibilityMeta, Entry,
    GridMeta,
};
use crate::{
    AltArgs, CliError, CliResult, CoeffsArgs, EigenArgs, Family, Format, LimitKind, LimitsArgs,
    RegionArgs, ReportFamily, ResidualsArgs,
};
use oscfact::*;
use serde::Serialize;

fn linspace(lo: f64, hi: f64, n: usize) -> CliResult<Vec<f64>> {
    if n < 2 || !(lo < hi) {
        return Err(CliError::Flags(format!(
            "degenerate range [{lo}, {hi}] with {n} points"
        )));
    }
    let h = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| lo + i as f64 * h).collect())
}

fn require(flag: Option<f64>, name: &str) -> CliResult<f64> {
    flag.ok_or_else(|| CliError::Flags(format!("--{name} is required for this family")))
}

#[derive(Serialize)]
struct RegionRow {
    gamma1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma1_inv: Option<f64>,
    gamma2: f64,
    paper_ok: bool,
    oracle_ok: bool,
    min_g: f64,
    min_u: f64,
}

#[derive(Serialize)]
struct BoundaryRow {
    gamma1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma1_inv: Option<f64>,
    gamma2: f64,
}

#[derive(Serialize)]
struct RegionReport {
    command: &'static str,
    g1_range: [f64; 2],
    g2_range: [f64; 2],
    row_count: usize,
    /// Grid points where the closed-form inequality accepts but the
    /// numerical oracle rejects; expected to stay empty.
    disagreements: Vec<RegionRow>,
    rows: Vec<RegionRow>,
    boundary: Vec<BoundaryRow>,
}

fn inv_or_none(g1: f64) -> Option<f64> {
    if g1 == 0.0 {
        None
    } else {
        Some(1.0 / g1)
    }
}

pub fn region(args: RegionArgs) -> CliResult<String> {
    let g1s = linspace(args.g1_min, args.g1_max, args.g1_points)?;
    let g2s = linspace(args.g2_min, args.g2_max, args.g2_points)?;
    let mut rows = Vec::with_capacity(g1s.len() * g2s.len());
    for &g1 in &g1s {
        for &g2 in &g2s {
            let oracle = admissible_oracle(g1, g2);
            rows.push(RegionRow {
                gamma1: g1,
                gamma1_inv: inv_or_none(g1),
                gamma2: g2,
                paper_ok: admissible_paper(g1, g2),
                oracle_ok: oracle.ok,
                min_g: ensure_finite(oracle.min_g)?,
                min_u: ensure_finite(oracle.min_u)?,
            });
        }
    }
    let boundary: Vec<BoundaryRow> = g1s
        .iter()
        .map(|&g1| BoundaryRow {
            gamma1: g1,
            gamma1_inv: inv_or_none(g1),
            gamma2: g1 * g1 - 1.0,
        })
        .collect();

    let written = match args.format {
        Format::Csv => {
            let mut csv = CsvWriter::new(&[
                "series",
                "gamma1",
                "gamma1_inv",
                "gamma2",
                "paper_ok",
                "oracle_ok",
                "min_g",
                "min_u",
            ]);
            for r in &rows {
                csv.row(&[
                    Cell::Text("grid".into()),
                    Cell::Float(r.gamma1),
                    r.gamma1_inv.map_or(Cell::Empty, Cell::Float),
                    Cell::Float(r.gamma2),
                    Cell::Bool(r.paper_ok),
                    Cell::Bool(r.oracle_ok),
                    Cell::Float(r.min_g),
                    Cell::Float(r.min_u),
                ])?;
            }
            for b in &boundary {
                csv.row(&[
                    Cell::Text("boundary".into()),
                    Cell::Float(b.gamma1),
                    b.gamma1_inv.map_or(Cell::Empty, Cell::Float),
                    Cell::Float(b.gamma2),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                ])?;
            }
            csv.write(&args.out)?
        }
        Format::Json => {
            let disagreements: Vec<RegionRow> = rows
                .iter()
                .filter(|r| r.paper_ok && !r.oracle_ok)
                .map(|r| RegionRow {
                    gamma1: r.gamma1,
                    gamma1_inv: r.gamma1_inv,
                    gamma2: r.gamma2,
                    paper_ok: r.paper_ok,
                    oracle_ok: r.oracle_ok,
                    min_g: r.min_g,
                    min_u: r.min_u,
                })
                .collect();
            let count = rows.len();
            let report = RegionReport {
                command: "region",
                g1_range: [args.g1_min, args.g1_max],
                g2_range: [args.g2_min, args.g2_max],
                row_count: count,
                disagreements,
                rows,
                boundary,
            };
            write_json(&args.out, &report)?;
            count
        }
    };
    Ok(format!("wrote {written} rows to {}", args.out))
}

pub fn coeffs(args: CoeffsArgs) -> CliResult<String> {
    let grid = args.x.resolve(601)?;
    let mut csv = CsvWriter::new(&["x", "alpha", "beta", "alpha_prime", "beta_prime"]);
    let bundle_at: Box<dyn Fn(f64) -> Result<CoeffBundle>> = match args.family {
        Family::TwoParam => {
            let p = TwoParams::new(
                require(args.gamma1, "gamma1")?,
                require(args.gamma2, "gamma2")?,
            )?;
            Box::new(move |x| Ok(coeffs_two_param(&p, x)))
        }
        Family::Delta => {
            let d = DeltaParam::new(require(args.delta, "delta")?)?;
            Box::new(move |x| Ok(coeffs_delta(&d, x)))
        }
        Family::Gamma3 => {
            let g = Gamma3Param::new(require(args.gamma3, "gamma3")?)?;
            Box::new(move |x| gamma3_coeffs(&g, x))
        }
        Family::Kappa => {
            let k = KappaParams::new(
                require(args.kappa1, "kappa1")?,
                require(args.kappa2, "kappa2")?,
            );
            Box::new(move |x| kappa_coeffs(&k, x))
        }
    };
    for x in grid.points() {
        let c = bundle_at(x)?;
        csv.row(&[
            Cell::Float(x),
            Cell::Float(c.alpha),
            Cell::Float(c.beta),
            Cell::Float(c.alpha_prime),
            Cell::Float(c.beta_prime),
        ])?;
    }
    let written = csv.write(&args.out)?;
    Ok(format!("wrote {written} rows to {}", args.out))
}

pub fn eigen(args: EigenArgs) -> CliResult<String> {
    if args.n_max > 16 {
        return Err(CliError::Flags(format!(
            "--n-max {} exceeds the limit 16",
            args.n_max
        )));
    }
    let grid = args.x.resolve(601)?;
    let mut header: Vec<String> = vec!["x".into()];
    for n in 0..=args.n_max {
        header.push(format!("H_{n}"));
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut csv = CsvWriter::new(&header_refs);

    match args.family {
        ReportFamily::TwoParam => {
            let p = TwoParams::new(
                require(args.gamma1, "gamma1")?,
                require(args.gamma2, "gamma2")?,
            )?;
            let fam = if args.normalized {
                EigenFamily::normalized(p, args.n_max)?
            } else {
                EigenFamily::new(p, args.n_max)?
            };
            for x in grid.points() {
                let mut cells = vec![Cell::Float(x)];
                for n in 0..=args.n_max {
                    cells.push(Cell::Float(fam.member(n).eval(x, 0)));
                }
                csv.row(&cells)?;
            }
        }
        ReportFamily::Gamma3 => {
            let g = Gamma3Param::new(require(args.gamma3, "gamma3")?)?;
            let mut scales = vec![1.0; args.n_max + 1];
            if args.normalized {
                let quad = Grid::new(-8.0, 8.0, 401).map_err(CliError::from)?;
                let gram = gram_matrix_gamma3(&g, args.n_max, quad)?;
                for (n, s) in scales.iter_mut().enumerate() {
                    *s = 1.0 / gram[n][n].sqrt();
                }
            }
            for x in grid.points() {
                let mut cells = vec![Cell::Float(x)];
                for n in 0..=args.n_max {
                    cells.push(Cell::Float(scales[n] * hn_gamma3(&g, n, x)?));
                }
                csv.row(&cells)?;
            }
        }
    }
    let written = csv.write(&args.out)?;
    Ok(format!("wrote {written} rows to {}", args.out))
}

#[derive(Serialize)]
struct ResidualsReport {
    command: &'static str,
    family: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    admissibility: Option<AdmissibilityMeta>,
    grid: GridMeta,
    n_max: usize,
    all_pass: bool,
    entries: Vec<Entry>,
}

pub fn residuals(args: ResidualsArgs) -> CliResult<String> {
    if args.n_max > 16 {
        return Err(CliError::Flags(format!(
            "--n-max {} exceeds the limit 16",
            args.n_max
        )));
    }
    let report = match args.family {
        ReportFamily::TwoParam => {
            let grid = args.x.resolve(601)?;
            let p = TwoParams::new(
                require(args.gamma1, "gamma1")?,
                require(args.gamma2, "gamma2")?,
            )?;
            let entries = two_param_entries(&p, args.n_max, grid)?;
            ResidualsReport {
                command: "residuals",
                family: "two_param",
                gamma1: Some(p.gamma1()),
                gamma2: Some(p.gamma2()),
                gamma3: None,
                admissibility: Some(admissibility_meta(&p)),
                grid: GridMeta::from(grid),
                n_max: args.n_max,
                all_pass: false,
                entries,
            }
        }
        ReportFamily::Gamma3 => {
            // e^{x²} growth balances the e^{-x²} decay of the members, so
            // the default window narrows to [-4, 4]
            let grid = if args.x.x_points.is_none() && args.x.x_min == -6.0 && args.x.x_max == 6.0
            {
                Grid::new(-4.0, 4.0, 401).map_err(CliError::from)?
            } else {
                args.x.resolve(401)?
            };
            let g = Gamma3Param::new(require(args.gamma3, "gamma3")?)?;
            let entries = gamma3_entries(&g, args.n_max, grid)?;
            ResidualsReport {
                command: "residuals",
                family: "gamma3",
                gamma1: None,
                gamma2: None,
                gamma3: Some(g.gamma3()),
                admissibility: None,
                grid: GridMeta::from(grid),
                n_max: args.n_max,
                all_pass: false,
                entries,
            }
        }
    };
    let report = ResidualsReport {
        all_pass: all_pass(&report.entries),
        ..report
    };
    write_json(&args.out, &report)?;
    let failed: Vec<&str> = report
        .entries
        .iter()
        .filter(|e| e.pass == Some(false))
        .map(|e| e.name.as_str())
        .collect();
    let summary = if failed.is_empty() {
        format!(
            "wrote {} entries to {} (all pass)",
            report.entries.len(),
            args.out
        )
    } else {
        format!(
            "wrote {} entries to {} (FAILING: {})",
            report.entries.len(),
            args.out,
            failed.join(", ")
        )
    };
    Ok(summary)
}

#[derive(Serialize)]
struct KappaMeta {
    kappa1: f64,
    kappa2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    singular_x: Option<f64>,
    exclusion_radius: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_at_origin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta_at_origin: Option<f64>,
}

#[derive(Serialize)]
struct GnConvergenceRow {
    gamma3: f64,
    n: usize,
    /// sup over [-2, 2] of |√gamma3 · c_n · H_n^{gamma3} - G_n| with
    /// c_n = (2ⁿ n! √π)^{1/2}; reported, not asserted.
    sup_dev_scaled: f64,
}

#[derive(Serialize)]
struct AltReport {
    command: &'static str,
    gamma3: f64,
    n_max: usize,
    all_pass: bool,
    entries: Vec<Entry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<KappaMeta>,
    gn_convergence: Vec<GnConvergenceRow>,
}

pub fn alt(args: AltArgs) -> CliResult<String> {
    if args.n_max > 16 {
        return Err(CliError::Flags(format!(
            "--n-max {} exceeds the limit 16",
            args.n_max
        )));
    }
    let g = Gamma3Param::new(args.gamma3)?;
    let grid = Grid::new(-4.0, 4.0, 401).map_err(CliError::from)?;
    let entries = gamma3_entries(&g, args.n_max, grid)?;

    let kappa = match (args.kappa1, args.kappa2) {
        (Some(k1), Some(k2)) => {
            let k = KappaParams::new(k1, k2);
            let at_origin = kappa_coeffs(&k, 0.0).ok();
            Some(KappaMeta {
                kappa1: k1,
                kappa2: k2,
                singular_x: k.singular_x(),
                exclusion_radius: oscfact::altfact::KAPPA_EXCLUSION_RADIUS,
                alpha_at_origin: at_origin.map(|c| c.alpha),
                beta_at_origin: at_origin.map(|c| c.beta),
            })
        }
        (None, None) => None,
        _ => {
            return Err(CliError::Flags(
                "--kappa1 and --kappa2 must be given together".into(),
            ))
        }
    };

    // convergence of the rescaled members toward the double-width modes
    let mut gn_convergence = Vec::new();
    let window = linspace(-2.0, 2.0, 201)?;
    for &gamma3 in &[1.0, 10.0, 100.0, 1000.0] {
        let gp = Gamma3Param::new(gamma3)?;
        for n in 0..=3usize {
            let cn = (2.0f64.powi(n as i32)
                * (1..=n).product::<usize>() as f64
                * std::f64::consts::PI.sqrt())
            .sqrt();
            let mut sup = 0.0f64;
            for &x in &window {
                let scaled = gamma3.sqrt() * cn * hn_gamma3(&gp, n, x)?;
                let gn = modified_hermite_mode(n, x)?;
                sup = sup.max((scaled - gn).abs());
            }
            gn_convergence.push(GnConvergenceRow {
                gamma3,
                n,
                sup_dev_scaled: ensure_finite(sup)?,
            });
        }
    }

    let report = AltReport {
        command: "alt",
        gamma3: g.gamma3(),
        n_max: args.n_max,
        all_pass: all_pass(&entries),
        entries,
        kappa,
        gn_convergence,
    };
    write_json(&args.out, &report)?;
    Ok(format!(
        "wrote reversed-factorization report to {}",
        args.out
    ))
}

pub fn limits(args: LimitsArgs) -> CliResult<String> {
    let written = match args.kind {
        LimitKind::Delta => {
            let delta = DeltaParam::new(args.delta.unwrap_or(0.5))?;
            let schedule = args.schedule.unwrap_or_else(|| vec![1e2, 1e3, 1e4]);
            let window = linspace(-5.0, 5.0, 501)?;
            let mut csv = CsvWriter::new(&[
                "gamma1",
                "gamma2",
                "sup_dev_alpha",
                "sup_dev_beta",
                "ratio_alpha",
                "ratio_beta",
            ]);
            let mut prev: Option<(f64, f64)> = None;
            for &g1 in &schedule {
                let p = delta_embedding(&delta, g1)?;
                let mut dev_a = 0.0f64;
                let mut dev_b = 0.0f64;
                for &x in &window {
                    let two = coeffs_two_param(&p, x);
                    let one = coeffs_delta(&delta, x);
                    dev_a = dev_a.max((two.alpha - one.alpha).abs());
                    dev_b = dev_b.max((two.beta - one.beta).abs());
                }
                csv.row(&[
                    Cell::Float(g1),
                    Cell::Float(p.gamma2()),
                    Cell::Float(dev_a),
                    Cell::Float(dev_b),
                    prev.map_or(Cell::Empty, |(a, _)| Cell::Float(a / dev_a)),
                    prev.map_or(Cell::Empty, |(_, b)| Cell::Float(b / dev_b)),
                ])?;
                prev = Some((dev_a, dev_b));
            }
            csv.write(&args.out)?
        }
        LimitKind::Standard => {
            let schedule = args.schedule.unwrap_or_else(|| vec![1e2, 1e3, 1e4]);
            let window = linspace(-5.0, 5.0, 501)?;
            let mut csv = CsvWriter::new(&[
                "gamma1",
                "sup_dev_alpha",
                "sup_dev_beta_minus_x",
                "ratio_beta",
            ]);
            let mut prev: Option<f64> = None;
            for &g1 in &schedule {
                let p = TwoParams::new(g1, 0.0)?;
                let mut dev_a = 0.0f64;
                let mut dev_b = 0.0f64;
                for &x in &window {
                    let c = coeffs_two_param(&p, x);
                    dev_a = dev_a.max((c.alpha - 1.0).abs());
                    dev_b = dev_b.max((c.beta - x).abs());
                }
                csv.row(&[
                    Cell::Float(g1),
                    Cell::Float(dev_a),
                    Cell::Float(dev_b),
                    prev.map_or(Cell::Empty, |b| Cell::Float(b / dev_b)),
                ])?;
                prev = Some(dev_b);
            }
            csv.write(&args.out)?
        }
        LimitKind::Hermite => {
            let delta_eff = args.delta.unwrap_or(1e6);
            let schedule = args.schedule.unwrap_or_else(|| vec![1e2, 1e3]);
            let grid = Grid::new(-2.0, 2.0, 201).map_err(CliError::from)?;
            let mut csv = CsvWriter::new(&[
                "gamma1",
                "delta_eff",
                "correlation_n1",
                "correlation_n2",
            ]);
            let d = DeltaParam::new(delta_eff)?;
            for &g1 in &schedule {
                let p = delta_embedding(&d, g1)?;
                let c1 = hermite_limit_profile(&p, 1, grid)?;
                let c2 = hermite_limit_profile(&p, 2, grid)?;
                csv.row(&[
                    Cell::Float(g1),
                    Cell::Float(delta_eff),
                    Cell::Float(c1),
                    Cell::Float(c2),
                ])?;
            }
            csv.write(&args.out)?
        }
        LimitKind::ModifiedHermite => {
            let schedule = args.schedule.unwrap_or_else(|| vec![1.0, 10.0, 100.0, 1000.0]);
            let window = linspace(-2.0, 2.0, 201)?;
            let residual_window = linspace(-3.0, 3.0, 301)?;
            let mut csv = CsvWriter::new(&[
                "gamma3",
                "n",
                "sup_dev_scaled_vs_gn",
                "gn_residual_sup",
            ]);
            for &gamma3 in &schedule {
                let g = Gamma3Param::new(gamma3)?;
                for n in 0..=3usize {
                    let cn = (2.0f64.powi(n as i32)
                        * (1..=n).product::<usize>() as f64
                        * std::f64::consts::PI.sqrt())
                    .sqrt();
                    let mut sup_dev = 0.0f64;
                    for &x in &window {
                        let scaled = gamma3.sqrt() * cn * hn_gamma3(&g, n, x)?;
                        sup_dev = sup_dev.max((scaled - modified_hermite_mode(n, x)?).abs());
                    }
                    let mut sup_res = 0.0f64;
                    for &x in &residual_window {
                        sup_res = sup_res.max(modified_hermite_residual(n, x)?.abs());
                    }
                    csv.row(&[
                        Cell::Float(gamma3),
                        Cell::Int(n as i64),
                        Cell::Float(sup_dev),
                        Cell::Float(sup_res),
                    ])?;
                }
            }
            csv.write(&args.out)?
        }
    };
    Ok(format!("wrote {written} rows to {}", args.out))
}
