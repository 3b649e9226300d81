use approx::assert_relative_eq;
use cbf_core::operators::*;
use cbf_core::solver::{random_band_limited, single_mode, taylor_green};
use cbf_core::spectral::*;
use cbf_core::{CbfError, Grid, Params, Physical, Regime};
use proptest::prelude::*;

#[test]
fn stokes_operator_eigenpairs() {
    let g = Grid::new(3, 8, 1.0).unwrap();
    let k0 = 2.0 * std::f64::consts::PI;
    for mode in [[1, 0, 0], [1, 2, 0], [-2, 1, 3]] {
        let u = single_mode(&g, &mode, 0.7).unwrap();
        let au = op_a(&u).unwrap();
        let lambda = k0 * k0 * mode.iter().map(|m| (m * m) as f64).sum::<f64>();
        let diff = au.sub(&u.scale(lambda)).unwrap();
        assert!(diff.max_abs_coefficient() < 1e-12 * lambda);
        assert_relative_eq!(
            duality_pairing(&au, &u).unwrap(),
            seminorm_grad_sq(&u),
            max_relative = 1e-13
        );
    }
}

#[test]
fn operators_require_solenoidal_input() {
    let g = Grid::periodic_2pi(2, 8).unwrap();
    let grad = Physical::from_fn(&g, |x| vec![x[0].cos(), 0.0])
        .unwrap()
        .to_spectral()
        .unwrap();
    assert!(matches!(op_a(&grad), Err(CbfError::ContractViolation(_))));
    assert!(matches!(op_b(&grad, &grad), Err(CbfError::ContractViolation(_))));
    assert!(matches!(
        op_c(&grad.leray_project().unwrap(), 0.5),
        Err(CbfError::InvalidExponent(_))
    ));
}

#[test]
fn rho_reference_values() {
    let p = Params::new(1.0, 0.0, 1.0, 5.0).unwrap();
    let rho = p.rho_constant();
    assert_eq!(rho.regime, Regime::Supercritical);
    assert_relative_eq!(rho.value, 0.125, max_relative = 1e-15);
    assert_relative_eq!(p.rho_star().unwrap(), 1.0, max_relative = 1e-15);

    for (mu, beta, r) in [(0.3, 2.0, 4.0), (1.7, 0.4, 6.5)] {
        let p = Params::new(mu, 0.0, beta, r).unwrap();
        let theorem = p.rho_with(RhoVariant::Theorem).value;
        let existence = p.rho_with(RhoVariant::ExistenceProof).value;
        assert_relative_eq!(existence / theorem, 2.0 * mu, max_relative = 1e-13);
        // Independent evaluation of the closed form.
        let direct = (r - 3.0) / (2.0 * mu * (r - 1.0)) * (2.0 / (beta * mu * (r - 1.0))).powf(2.0 / (r - 3.0));
        assert_relative_eq!(theorem, direct, max_relative = 1e-14);
    }
}

#[test]
fn regimes() {
    let regime = |mu: f64, beta: f64, r: f64| Params::new(mu, 0.0, beta, r).unwrap().regime();
    assert_eq!(regime(1.0, 1.0, 3.5), Regime::Supercritical);
    assert_eq!(regime(1.0, 0.5, 3.0), Regime::CriticalMonotone);
    assert_eq!(regime(1.0, 0.4, 3.0), Regime::CriticalUncovered);
    assert_eq!(regime(1.0, 1.0, 2.0), Regime::Subcritical);
    let p = Params::new(1.0, 0.0, 1.0, 3.0).unwrap();
    assert_eq!(p.rho_constant().value, 0.0);
    assert!(matches!(p.rho_star(), Err(CbfError::NotApplicable(_))));
    let ns = Params::new(1.0, 0.0, 0.0, 5.0).unwrap();
    assert!(ns.rho_constant().value.is_infinite());
    assert!(Params::new(0.0, 0.0, 1.0, 3.0).is_err());
    assert!(Params::new(1.0, -1.0, 1.0, 3.0).is_err());
    assert!(Params::new(1.0, 0.0, 1.0, 0.5).is_err());
}

#[test]
fn taylor_green_pressure() {
    let g = Grid::periodic_2pi(2, 32).unwrap();
    let u = taylor_green(&g, 1.0).unwrap();
    let p = recover_pressure(&u, &SpectralField::zeros(&g), &Params::new(1.0, 0.0, 0.0, 3.0).unwrap())
        .unwrap()
        .to_physical()
        .unwrap();
    let exact = Physical::scalar_from_fn(&g, |x| -((2.0 * x[0]).cos() + (2.0 * x[1]).cos()) / 4.0).unwrap();
    assert!(p.max_abs_diff(&exact).unwrap() < 1e-13);
}

#[test]
fn pressure_absorbs_gradient_forcing() {
    let g = Grid::periodic_2pi(3, 8).unwrap();
    let f = Physical::from_fn(&g, |x| vec![x[0].cos() * x[1].cos(), -x[0].sin() * x[1].sin(), 0.0])
        .unwrap()
        .to_spectral()
        .unwrap();
    let zero = SpectralField::zeros(&g).certify_divergence_free().unwrap();
    let p = recover_pressure(&zero, &f, &Params::new(1.0, 0.0, 1.0, 3.0).unwrap())
        .unwrap()
        .to_physical()
        .unwrap();
    let exact = Physical::scalar_from_fn(&g, |x| x[0].sin() * x[1].cos()).unwrap();
    assert!(p.max_abs_diff(&exact).unwrap() < 1e-13);
}

#[test]
fn g_is_continuous_at_first_order() {
    let g = Grid::periodic_2pi(2, 32).unwrap();
    let params = Params::new(0.5, 0.2, 1.0, 4.0).unwrap();
    let u = random_band_limited(&g, 3, 6, 1.0, 1.0, false).unwrap();
    let w = random_band_limited(&g, 4, 6, 1.0, 1.0, false).unwrap();
    let gu = op_g(&u, &params).unwrap();
    let dist = |eps: f64| {
        let v = u.add(&w.scale(eps)).unwrap();
        norm_v_dual(&op_g(&v, &params).unwrap().sub(&gu).unwrap())
    };
    let ratios: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&e| dist(e) / e).collect();
    assert!(ratios.iter().all(|r| r.is_finite() && *r > 0.0));
    assert_relative_eq!(ratios[1], ratios[2], max_relative = 1e-2);
    assert!(dist(1e-8) < 1e-6);
}

#[test]
fn operators_struct_matches_free_functions() {
    let g = Grid::periodic_2pi(2, 16).unwrap();
    let params = Params::new(0.7, 0.1, 2.0, 5.0).unwrap();
    let ops = Operators::new(params);
    let u = random_band_limited(&g, 10, 4, 1.0, 1.0, false).unwrap();
    assert_eq!(ops.g(&u).unwrap(), op_g(&u, &params).unwrap());
    let n = ops.nonlinear(&u).unwrap();
    let sum = ops.b(&u, &u).unwrap().add(&ops.c(&u).unwrap().scale(2.0)).unwrap();
    assert!(n.sub(&sum).unwrap().max_abs_coefficient() < 1e-14);
}

fn params_strategy() -> impl Strategy<Value = (u64, f64, f64, f64, f64)> {
    (0u64..100_000, 0.05f64..3.0, 0.0f64..2.0, 0.0f64..3.0, 1.0f64..6.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn convective_term_does_no_work((seed, ..) in params_strategy(), dim in 2usize..=3) {
        let n = if dim == 2 { 32 } else { 12 };
        let g = Grid::periodic_2pi(dim, n).unwrap();
        let u = random_band_limited(&g, seed, n / 3 - 1, 1.0, 2.0, false).unwrap();
        let b = op_b(&u, &u).unwrap();
        let scale = norm_h(&b) * norm_h(&u);
        prop_assert!(duality_pairing(&b, &u).unwrap().abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn damping_pairing_is_the_lr1_norm((seed, _, _, _, r) in params_strategy()) {
        let g = Grid::periodic_2pi(2, 32).unwrap();
        let u = random_band_limited(&g, seed, 10, 1.0, 1.5, false).unwrap();
        let c = op_c(&u, r).unwrap();
        let lhs = duality_pairing(&c, &u).unwrap();
        let rhs = norm_lp(&u, r + 1.0).unwrap().powf(r + 1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn g_pairing_decomposes((seed, mu, alpha, beta, r) in params_strategy()) {
        let g = Grid::periodic_2pi(2, 24).unwrap();
        let params = Params::new(mu, alpha, beta, r).unwrap();
        let u = random_band_limited(&g, seed, 7, 1.0, 1.0, false).unwrap();
        let total = duality_pairing(&op_g(&u, &params).unwrap(), &u).unwrap();
        let (a, d, b, c) = g_pairing_decomposed(&Operators::new(params), &u).unwrap();
        let expected = mu * seminorm_grad_sq(&u) + alpha * norm_h_sq(&u)
            + beta * norm_lp(&u, r + 1.0).unwrap().powf(r + 1.0);
        prop_assert!((total - (a + d + b + c)).abs() <= 1e-12 * total.abs().max(1.0));
        prop_assert!((total - expected).abs() <= 1e-11 * expected.max(1.0));
    }
}
