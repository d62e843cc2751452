//! Cross-module identity and symmetry properties on randomized parameter
//! batteries.

use oscfact::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic battery of admissible parameter points: random within the
/// admissible region, both signs of gamma1, gamma2 on both sides of zero.
fn random_params(count: usize, seed: u64) -> Vec<TwoParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mag: f64 = rng.gen_range(0.95..3.0);
        let g1 = if rng.gen_bool(0.5) { mag } else { -mag };
        let hi = (g1 * g1 - 1.0 - 0.05).max(0.0);
        let g2 = rng.gen_range(-3.0..hi.max(1e-9));
        if let Ok(p) = TwoParams::new(g1, g2) {
            out.push(p);
        }
    }
    out
}

#[test]
fn ode_residuals_vanish_over_parameter_battery() {
    let grid = Grid::new(-6.0, 6.0, 601).unwrap();
    for p in random_params(20, 7) {
        let mut sup_riccati: f64 = 0.0;
        let mut sup_bernoulli: f64 = 0.0;
        let mut sup_coupled: f64 = 0.0;
        for x in grid.points() {
            sup_riccati = sup_riccati.max(riccati_residual(p.gamma1(), x).abs());
            sup_bernoulli = sup_bernoulli.max(bernoulli_residual(&p, x).abs());
            let (a, b) = coupled_residuals(&p, x);
            sup_coupled = sup_coupled.max(a.abs()).max(b.abs());
        }
        assert!(sup_riccati < 1e-10, "riccati {sup_riccati} at {p:?}");
        assert!(sup_bernoulli < 1e-10, "bernoulli {sup_bernoulli} at {p:?}");
        assert!(sup_coupled < 1e-10, "coupled {sup_coupled} at {p:?}");
    }
}

#[test]
fn factorization_identity_over_parameter_battery() {
    let grid = Grid::new(-6.0, 6.0, 601).unwrap();
    let battery = standard_battery();
    for p in random_params(6, 11) {
        for f in &battery {
            let rep = factorization_residual(&p, f.as_ref(), grid).unwrap();
            assert!(
                rep.relative() < 1e-9,
                "relative {} at {p:?}",
                rep.relative()
            );
        }
    }
}

#[test]
fn zero_mode_in_kernel_of_b_minus_over_battery() {
    for p in random_params(10, 23) {
        let f = EigenFn::new(p, 0).unwrap();
        let mut sup: f64 = 0.0;
        for i in 0..=120 {
            let x = -6.0 + 0.1 * i as f64;
            sup = sup.max(
                apply_first_order(OperatorTag::BMinus, Some(&p), &f, x)
                    .unwrap()
                    .abs(),
            );
        }
        assert!(sup < 1e-10, "B- H_0 sup {sup} at {p:?}");
    }
}

#[test]
fn eigen_identity_over_parameter_battery() {
    let grid = Grid::new(-6.0, 6.0, 601).unwrap();
    for p in random_params(5, 31) {
        for n in 0..=6 {
            let rep = eigen_residual(&p, n, grid).unwrap();
            assert!(
                rep.relative() < 1e-8,
                "n = {n}: relative {} at {p:?}",
                rep.relative()
            );
        }
    }
}

#[test]
fn weight_positive_over_battery() {
    for p in random_params(10, 41) {
        for i in 0..=400 {
            let x = -10.0 + 0.05 * i as f64;
            assert!(weight(&p, x) > 0.0);
        }
    }
}

#[test]
fn formal_self_adjointness_on_decaying_functions() {
    // ∫(Lf)g dx = ∫f(Lg) dx for the battery; integration by parts holds
    // because every battery member decays at Gaussian rate
    let p = TwoParams::new(1.5, 1.249).unwrap();
    let battery = standard_battery();
    for (i, f) in battery.iter().enumerate() {
        for g in battery.iter().skip(i + 1) {
            let lf_g = integrate_interval(
                |x| apply_l_selfadjoint(&p, f.as_ref(), x).unwrap() * g.eval(x, 0),
                -12.0,
                12.0,
            )
            .unwrap();
            let f_lg = integrate_interval(
                |x| f.eval(x, 0) * apply_l_selfadjoint(&p, g.as_ref(), x).unwrap(),
                -12.0,
                12.0,
            )
            .unwrap();
            let scale = lf_g.abs().max(f_lg.abs()).max(1e-3);
            assert!(
                (lf_g - f_lg).abs() / scale < 1e-8,
                "asymmetry {} vs {}",
                lf_g,
                f_lg
            );
        }
    }
}

#[test]
fn eigen_family_parity_over_battery() {
    let mut rng = ChaCha8Rng::seed_from_u64(59);
    for p in random_params(6, 59) {
        let m = TwoParams::new(-p.gamma1(), p.gamma2()).unwrap();
        for n in 0..=4usize {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for _ in 0..8 {
                let x = rng.gen_range(-4.0..4.0);
                let lhs = EigenFn::new(m, n).unwrap().eval(x, 0);
                let rhs = sign * EigenFn::new(p, n).unwrap().eval(-x, 0);
                let scale = rhs.abs().max(1e-12);
                assert!(
                    (lhs - rhs).abs() / scale < 1e-10,
                    "parity n={n} x={x} {lhs} vs {rhs}"
                );
            }
        }
    }
}

#[test]
fn differentiable_fn_contract_matches_richardson() {
    let p = TwoParams::new(1.5, 1.249).unwrap();
    let member = EigenFn::new(p, 2).unwrap();
    let bump = GaussianBump { center: 1.0 };
    let fns: [&dyn DifferentiableFn; 2] = [&member, &bump];
    for f in fns {
        for order in 1..=3 {
            for &x in &[-1.7, 0.2, 1.4] {
                let fd_est = fd::richardson_derivative(&|t| f.eval(t, 0), x, order);
                let exact = f.eval(x, order);
                let scale = exact.abs().max(1e-8);
                assert!(
                    (exact - fd_est).abs() / scale < 1e-6,
                    "order {order} at {x}: {exact} vs {fd_est}"
                );
            }
        }
    }
}

#[test]
fn gamma3_identities_over_random_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    let grid = Grid::new(-4.0, 4.0, 401).unwrap();
    for _ in 0..5 {
        let g = Gamma3Param::new(rng.gen_range(0.0..10.0)).unwrap();
        // explicit vs compositional second-order operator
        for &x in &[-2.2, 0.1, 1.8] {
            let f = Psi::new(3).unwrap();
            let e = apply_l_tilde_gamma3(&g, &f, x).unwrap();
            let c = apply_l_tilde_gamma3_composed(&g, &f, x).unwrap();
            let scale = e.abs().max(1e-10);
            assert!((e - c).abs() / scale < 1e-10);
        }
        // reversed factorization identity on a couple of battery members
        for f in standard_battery().iter().take(3) {
            let rep = factorization_residual_reversed(&g, f.as_ref(), grid).unwrap();
            assert!(rep.relative() < 1e-9, "relative {}", rep.relative());
        }
    }
}
