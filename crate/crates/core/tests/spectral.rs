use std::f64::consts::PI;

use approx::assert_relative_eq;
use cbf_core::operators::op_b;
use cbf_core::solver::random_band_limited;
use cbf_core::spectral::snapshot::{
    read_snapshot, read_snapshot_from, write_snapshot, write_snapshot_to, SnapshotHeader,
};
use cbf_core::spectral::*;
use cbf_core::{CbfError, Grid, Physical, Spectral};
use num_complex::Complex;
use proptest::prelude::*;

fn grid(dim: usize, n: usize) -> Grid {
    Grid::periodic_2pi(dim, n).unwrap()
}

/// u(x_j) = Σ_k û(k) e^{ik·x_j} summed term by term.
fn direct_synthesis(u: &Spectral, c: usize) -> Vec<f64> {
    let g = u.grid();
    (0..g.len())
        .map(|j| {
            let x = g.point(j);
            let mut acc = Complex::new(0.0, 0.0);
            for flat in 0..g.len() {
                let k = g.wavevector(flat);
                let phase: f64 = (0..g.dim()).map(|a| k[a] * x[a]).sum();
                acc += u.component(c)[flat] * Complex::from_polar(1.0, phase);
            }
            acc.re
        })
        .collect()
}

#[test]
fn inverse_transform_matches_direct_fourier_sum() {
    let g = grid(2, 8);
    let u = random_band_limited(&g, 11, 3, 1.0, 1.0, false).unwrap();
    let p = u.to_physical().unwrap();
    for c in 0..2 {
        let direct = direct_synthesis(&u, c);
        for (a, b) in p.component(c).iter().zip(&direct) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }
}

#[test]
fn forward_transform_of_trig_polynomial() {
    let g = grid(2, 16);
    let p = Physical::from_fn(&g, |x| vec![3.0 * (2.0 * x[0]).cos() + (x[1] - x[0]).sin(), 0.5]).unwrap();
    let s = p.to_spectral().unwrap();
    assert_relative_eq!(s.mode(0, &[2, 0]).re, 1.5, epsilon = 1e-14);
    assert_relative_eq!(s.mode(0, &[-2, 0]).re, 1.5, epsilon = 1e-14);
    // sin θ = (e^{iθ} − e^{−iθ})/2i with θ = −x + y.
    assert_relative_eq!(s.mode(0, &[-1, 1]).im, -0.5, epsilon = 1e-14);
    assert_relative_eq!(s.mode(0, &[1, -1]).im, 0.5, epsilon = 1e-14);
    assert_relative_eq!(s.mode(1, &[0, 0]).re, 0.5, epsilon = 1e-14);
    let total: f64 = s.component(0).iter().map(|z| z.norm_sqr()).sum();
    assert_relative_eq!(total, 2.0 * 1.5f64.powi(2) + 2.0 * 0.25, epsilon = 1e-13);
}

/// Sixth-order centered difference of an analytic function.
fn fd6(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let c = [3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
    (1..=3)
        .map(|j| c[j - 1] * (f(x + j as f64 * h) - f(x - j as f64 * h)))
        .sum::<f64>()
        / h
}

#[test]
fn spectral_gradient_matches_sixth_order_differences() {
    let g = grid(2, 32);
    let f = |x: f64, y: f64| x.sin().exp() * (2.0 * y).cos();
    let p = Physical::from_fn(&g, |x| vec![f(x[0], x[1]), 0.0]).unwrap();
    let grad = p.to_spectral().unwrap().gradient();
    let dx = grad[0].to_physical().unwrap();
    let dy = grad[1].to_physical().unwrap();
    let h = 1e-3;
    for flat in 0..g.len() {
        let x = g.point(flat);
        let ex = fd6(|s| f(s, x[1]), x[0], h);
        let ey = fd6(|s| f(x[0], s), x[1], h);
        assert!((dx.component(0)[flat] - ex).abs() < 1e-10);
        assert!((dy.component(0)[flat] - ey).abs() < 1e-10);
    }
}

#[test]
fn l4_norm_of_sine_field() {
    let g = grid(2, 16);
    let u = Physical::from_fn(&g, |x| vec![x[0].sin(), 0.0]).unwrap();
    // ∫∫ sin⁴x dx dy = (3π/4)(2π).
    assert_relative_eq!(
        lp_integral_physical(&u, 4.0).unwrap(),
        1.5 * PI * PI,
        max_relative = 1e-14
    );
    assert!(matches!(
        lp_integral_physical(&u, 0.5),
        Err(CbfError::InvalidExponent(_))
    ));
}

/// (u·∇)v by explicit convolution of Fourier coefficients, then dealiased
/// and projected.
fn convolution_b(u: &Spectral, v: &Spectral) -> Vec<Vec<Complex<f64>>> {
    let g = u.grid();
    let dim = g.dim();
    let cutoff = g.dealias_cutoff() as i64;
    let mut out = vec![vec![Complex::new(0.0, 0.0); g.len()]; dim];
    for p in 0..g.len() {
        for q in 0..g.len() {
            let (mp, mq) = (g.modes(p), g.modes(q));
            let m: Vec<i64> = (0..dim).map(|a| mp[a] + mq[a]).collect();
            if m.iter().any(|x| x.abs() > cutoff) {
                continue;
            }
            let target = g.index_of_mode(&m);
            let kq = g.wavevector(q);
            let mut adv = Complex::new(0.0, 0.0);
            for j in 0..dim {
                adv += u.component(j)[p] * Complex::new(0.0, kq[j]);
            }
            for c in 0..dim {
                out[c][target] += adv * v.component(c)[q];
            }
        }
    }
    for flat in 0..g.len() {
        let k = g.wavevector(flat);
        let k2 = g.k_sq(flat);
        if k2 == 0.0 {
            continue;
        }
        let dot: Complex<f64> = (0..dim).map(|a| out[a][flat] * k[a]).sum();
        for c in 0..dim {
            out[c][flat] -= dot * (k[c] / k2);
        }
    }
    out
}

#[test]
fn convective_term_matches_direct_convolution() {
    let g = grid(2, 16);
    let u = random_band_limited(&g, 1, 3, 1.0, 1.0, false).unwrap();
    let v = random_band_limited(&g, 2, 3, 1.0, 1.0, false).unwrap();
    let fast = op_b(&u, &v).unwrap();
    let slow = convolution_b(&u, &v);
    for c in 0..2 {
        for (a, b) in fast.component(c).iter().zip(&slow[c]) {
            assert!((a - b).norm() < 1e-13, "{a} vs {b}");
        }
    }
}

#[test]
fn leray_removes_gradients_and_keeps_solenoidal_part() {
    let g = grid(3, 8);
    let grad = Physical::from_fn(&g, |x| vec![x[0].cos() * x[1].sin(), x[0].sin() * x[1].cos(), 0.0]).unwrap();
    let p = grad.to_spectral().unwrap().leray_project().unwrap();
    assert!(p.max_abs_coefficient() < 1e-15);
    let tg = cbf_core::solver::taylor_green(&g, 1.0).unwrap();
    let again = tg.leray_project().unwrap();
    assert!(tg.sub(&again).unwrap().max_abs_coefficient() < 1e-16);
}

#[test]
fn non_hermitian_coefficients_are_rejected() {
    let g = grid(2, 8);
    let mut s = Spectral::zeros(&g);
    let idx = g.index_of_mode(&[1, 0]);
    s.coefficients_mut()[0][idx] = Complex::new(1.0, 0.0);
    assert!(matches!(s.to_physical(), Err(CbfError::SymmetryViolation { .. })));
    s.symmetrize();
    assert!(s.to_physical().is_ok());
}

#[test]
fn exp_filter_single_mode_residual() {
    let g = grid(2, 16);
    let u = cbf_core::solver::single_mode(&g, &[0, 2], 1.0).unwrap();
    let filtered = exp_filter(&u, 4000.0).unwrap();
    let ratio = u.sub(&filtered).unwrap().norm_h() / u.norm_h();
    assert_relative_eq!(ratio, 1.0 - (-0.001f64).exp(), max_relative = 1e-12);
    assert!(ratio <= 1e-3);
    // Modes with |k|² ≥ n² are removed outright.
    assert_eq!(exp_filter(&u, 2.0).unwrap().max_abs_coefficient(), 0.0);
}

#[test]
fn box_and_ball_truncation() {
    let g = grid(2, 16);
    let u = random_band_limited(&g, 5, 7, 0.0, 1.0, false).unwrap();
    let boxed = truncate_with(&u, 3, TruncationShape::Box);
    let ball = truncate_with(&u, 3, TruncationShape::Ball);
    for flat in 0..g.len() {
        let m = g.modes(flat);
        let in_box = m[0].abs() <= 3 && m[1].abs() <= 3;
        let in_ball = m[0] * m[0] + m[1] * m[1] <= 9;
        assert_eq!(
            boxed.component(0)[flat] != Complex::new(0.0, 0.0),
            in_box && u.component(0)[flat].norm() > 0.0
        );
        if !in_ball {
            assert_eq!(ball.component(1)[flat].norm(), 0.0);
        }
    }
    assert!(ball.norm_h() <= boxed.norm_h());
}

#[test]
fn snapshot_round_trip_is_bitwise() {
    let g = grid(2, 16);
    let u = random_band_limited(&g, 9, 5, 1.5, 2.0, false).unwrap();
    let header = SnapshotHeader {
        dim: 2,
        n_points: 16,
        period: 2.0 * PI,
        time: 0.5,
        r: 3.0,
        mu: 1.0,
        alpha: 0.0,
        beta: 1.0,
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.snap");
    write_snapshot(&path, &header, &u).unwrap();
    let (h, back) = read_snapshot::<f64>(&path).unwrap();
    assert_eq!(h, header);
    for c in 0..2 {
        for (a, b) in u.component(c).iter().zip(back.component(c)) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }
}

#[test]
fn snapshot_corruption_is_rejected() {
    let g = grid(2, 8);
    let u = random_band_limited(&g, 1, 2, 1.0, 1.0, false).unwrap();
    let header = SnapshotHeader {
        dim: 2,
        n_points: 8,
        period: 2.0 * PI,
        time: 0.0,
        r: 3.0,
        mu: 1.0,
        alpha: 0.0,
        beta: 1.0,
    };
    let mut bytes = Vec::new();
    write_snapshot_to(&mut bytes, &header, &u).unwrap();
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(matches!(
        read_snapshot_from::<f64>(&bad[..]),
        Err(CbfError::SnapshotFormat(_))
    ));
    assert!(matches!(
        read_snapshot_from::<f64>(&bytes[..bytes.len() - 3]),
        Err(CbfError::SnapshotFormat(_))
    ));
    let mut long = bytes.clone();
    long.push(0);
    assert!(matches!(
        read_snapshot_from::<f64>(&long[..]),
        Err(CbfError::SnapshotFormat(_))
    ));
    assert!(read_snapshot_from::<f64>(&bytes[..]).is_ok());
}

#[test]
fn f32_fields_round_trip() {
    let g = cbf_core::f32_types::Grid::periodic_2pi(2, 16).unwrap();
    let p = PhysicalField::from_fn(&g, |x| vec![x[0].cos(), x[1].sin()]).unwrap();
    let back = p.to_spectral().unwrap().to_physical().unwrap();
    assert!(p.max_abs_diff(&back).unwrap() < 1e-6);
}

fn field_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 2 * n * n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn physical_spectral_round_trip(values in field_strategy(8)) {
        let g = grid(2, 8);
        let p = Physical::new(g.clone(), vec![values[..64].to_vec(), values[64..].to_vec()]).unwrap();
        let back = p.to_spectral().unwrap().to_physical().unwrap();
        prop_assert!(p.max_abs_diff(&back).unwrap() < 1e-12);
    }

    #[test]
    fn parseval_matches_quadrature(values in field_strategy(8)) {
        let g = grid(2, 8);
        let p = Physical::new(g.clone(), vec![values[..64].to_vec(), values[64..].to_vec()]).unwrap();
        let spectral = p.to_spectral().unwrap().norm_h_sq();
        let quadrature = lp_integral_physical(&p, 2.0).unwrap();
        prop_assert!((spectral - quadrature).abs() <= 1e-12 * quadrature.max(1.0));
    }

    #[test]
    fn leray_is_an_idempotent_contraction(values in field_strategy(8)) {
        let g = grid(2, 8);
        let s = Physical::new(g.clone(), vec![values[..64].to_vec(), values[64..].to_vec()]).unwrap().to_spectral().unwrap();
        let p = s.leray_project().unwrap();
        prop_assert!(p.is_divergence_free());
        prop_assert!(p.max_divergence() <= 1e-12 * p.coefficient_l2().max(1.0));
        prop_assert!(p.norm_h() <= s.norm_h() * (1.0 + 1e-14));
        let pp = p.leray_project().unwrap();
        prop_assert!(pp.sub(&p).unwrap().max_abs_coefficient() <= 1e-14 * p.max_abs_coefficient().max(1.0));
        prop_assert!(p.hermitian_defect() == 0.0);
    }

    #[test]
    fn trilinear_form_is_antisymmetric(seed in 0u64..10_000) {
        let g = grid(2, 32);
        let u = random_band_limited(&g, seed, 8, 1.0, 1.0, false).unwrap();
        let v = random_band_limited(&g, seed + 1, 8, 1.0, 1.0, false).unwrap();
        let w = random_band_limited(&g, seed + 2, 8, 1.0, 1.0, false).unwrap();
        let a = cbf_core::operators::trilinear_b(&u, &v, &w).unwrap();
        let b = cbf_core::operators::trilinear_b(&u, &w, &v).unwrap();
        prop_assert!((a + b).abs() <= 1e-12 * (a.abs() + 1.0));
        prop_assert!(cbf_core::operators::trilinear_b(&u, &v, &v).unwrap().abs() < 1e-12);
    }

    #[test]
    fn filter_is_non_expansive(seed in 0u64..10_000, n in 0.1f64..1e4) {
        let g = grid(2, 16);
        let u = random_band_limited(&g, seed, 6, 0.5, 1.0, false).unwrap();
        let f = exp_filter(&u, n).unwrap();
        prop_assert!(f.norm_h() <= u.norm_h());
        prop_assert!(f.is_divergence_free());
    }

    #[test]
    fn seminorm_matches_gradient_quadrature(seed in 0u64..10_000) {
        let g = grid(2, 16);
        let u = random_band_limited(&g, seed, 5, 1.0, 1.0, false).unwrap();
        let quad: f64 = u.gradient().iter().map(|d| lp_integral_physical(&d.to_physical().unwrap(), 2.0).unwrap()).sum();
        prop_assert!((quad - seminorm_grad_sq(&u)).abs() <= 1e-12 * quad.max(1.0));
        prop_assert!((norm_v_sq(&u) - seminorm_grad_sq(&u) - norm_h_sq(&u)).abs() <= 1e-12 * norm_v_sq(&u));
        prop_assert!(norm_v_dual(&u) <= norm_h(&u));
    }
}
