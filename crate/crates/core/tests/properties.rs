use std::f64::consts::PI;

use proptest::prelude::*;

use ckuramoto::complex::{self, matexp, CMatrix, Complex64};
use ckuramoto::control::{self, ControllerSpec};
use ckuramoto::dynamics::{self, ComplexState};
use ckuramoto::metrics;
use ckuramoto::network::{self, OscParams};

fn c64() -> impl Strategy<Value = Complex64> {
    (-1e3..1e3f64, -1e3..1e3f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn nonzero_c64() -> impl Strategy<Value = Complex64> {
    (1e-6..1e3f64, -PI..PI).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

fn small_matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |v| {
        CMatrix::from_rows(n, v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap()
    })
}

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    a.sub(b).norm_fro() / b.norm_fro().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn signum_has_unit_modulus_and_reconstructs(z in nonzero_c64()) {
        let s = complex::csign_scalar(z);
        prop_assert!((s.norm() - 1.0).abs() <= 1e-15);
        prop_assert!((s * z.norm() - z).norm() <= 1e-12 * z.norm());
    }

    #[test]
    fn smoothed_signum_stays_inside_disc(z in c64(), delta in 0.0..10.0f64) {
        let s = complex::csign_smoothed(z, delta);
        prop_assert!(s.norm() <= 1.0 + 1e-15);
        prop_assert!((complex::principal_arg(s) - complex::principal_arg(z)).abs() <= 1e-12 || z.norm() == 0.0);
    }

    #[test]
    fn modulus_and_argument_rebuild_the_vector(x in prop::collection::vec(c64(), 1..20)) {
        let (m, a) = complex::modarg(&x);
        for ((z, r), phi) in x.iter().zip(&m).zip(&a) {
            prop_assert!((-PI..=PI).contains(phi));
            prop_assert!((Complex64::from_polar(*r, *phi) - z).norm() <= 1e-12 * z.norm().max(1.0));
        }
    }

    #[test]
    fn matexp_semigroup(m in small_matrix(5), s in 0.0..2.0f64, t in 0.0..2.0f64) {
        let lhs = matexp(&m, s + t).unwrap();
        let rhs = matexp(&m, s).unwrap().matmul(&matexp(&m, t).unwrap());
        prop_assert!(rel(&lhs, &rhs) <= 1e-10);
    }

    #[test]
    fn matexp_inverse(m in small_matrix(4), t in 0.0..3.0f64) {
        let prod = matexp(&m, t).unwrap().matmul(&matexp(&m, -t).unwrap());
        prop_assert!(rel(&prod, &CMatrix::identity(4)) <= 1e-10);
    }

    #[test]
    fn matexp_of_diagonal(d in prop::collection::vec((-5.0..1.0f64, -20.0..20.0f64), 1..8), t in 0.0..2.0f64) {
        let d: Vec<Complex64> = d.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        let e = matexp(&CMatrix::from_diag(&d), t).unwrap();
        let exact = CMatrix::from_diag(&d.iter().map(|z| (z * t).exp()).collect::<Vec<_>>());
        prop_assert!(rel(&e, &exact) <= 1e-10);
    }

    #[test]
    fn open_loop_field_is_linear(
        seed in any::<u64>(),
        a in prop::collection::vec(c64(), 12),
        b in prop::collection::vec(c64(), 12),
        k in -3.0..3.0f64,
    ) {
        let net = network::erdos_renyi(12, 0.4, seed).unwrap();
        let params = OscParams::new((0..12).map(|i| i as f64 * 0.3).collect(), 0.7).unwrap();
        let combo: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * k + y).collect();
        let fa = dynamics::rhs_complex_open(&a, &net, &params).unwrap();
        let fb = dynamics::rhs_complex_open(&b, &net, &params).unwrap();
        let fc = dynamics::rhs_complex_open(&combo, &net, &params).unwrap();
        for i in 0..12 {
            let expect = fa[i] * k + fb[i];
            prop_assert!((fc[i] - expect).norm() <= 1e-9 * (1.0 + expect.norm()));
        }
    }

    #[test]
    fn polar_rates_match_cartesian_field(
        seed in any::<u64>(),
        x in prop::collection::vec(nonzero_c64(), 10),
        u in prop::collection::vec(c64(), 10),
    ) {
        let net = network::erdos_renyi(10, 0.5, seed).unwrap();
        let params = OscParams::new(vec![1.5; 10], 0.4).unwrap();
        let dx = dynamics::rhs_complex_controlled(&x, &u, &net, &params).unwrap();
        let (dr, dphi) = dynamics::radial_and_angular_rates(&x, &u, &net, &params).unwrap();
        for k in 0..10 {
            // d|x|/dt = Re(conj(x) dx)/|x|, dphi/dt = Im(conj(x) dx)/|x|^2
            let w = x[k].conj() * dx[k];
            let r = x[k].norm();
            let scale = 1.0 + dx[k].norm() / r;
            prop_assert!((dr[k] - w.re / r).abs() <= 1e-9 * scale * r);
            prop_assert!((dphi[k] - w.im / (r * r)).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn switched_feedforward_keeps_unit_circle_tangent(seed in any::<u64>(), theta in prop::collection::vec(-PI..PI, 15)) {
        let net = network::erdos_renyi(15, 0.3, seed).unwrap();
        let params = OscParams::new(vec![2.0 * PI; 15], 0.25).unwrap();
        let x = ComplexState::from_phases(&theta).x;
        let u = control::u_switched_ff(&x, &net, &params).unwrap();
        let (dr, dphi) = dynamics::radial_and_angular_rates(&x, &u, &net, &params).unwrap();
        let real = dynamics::rhs_real(&theta, &net, &params).unwrap();
        for k in 0..15 {
            prop_assert!(dr[k].abs() <= 1e-12);
            prop_assert!((dphi[k] - real[k]).abs() <= 1e-12);
        }
    }

    #[test]
    fn order_parameter_bounded_and_rotation_covariant(theta in prop::collection::vec(-10.0..10.0f64, 1..50), shift in -PI..PI) {
        let r = metrics::order_parameter(&theta);
        prop_assert!(r.norm() <= 1.0 + 1e-12);
        let shifted: Vec<f64> = theta.iter().map(|t| t + shift).collect();
        let rs = metrics::order_parameter(&shifted);
        prop_assert!((rs.norm() - r.norm()).abs() <= 1e-12);
        prop_assert!((rs - r * Complex64::from_polar(1.0, shift)).norm() <= 1e-12);
    }

    #[test]
    fn mean_abs_error_is_a_metric(
        a in prop::collection::vec(-50.0..50.0f64, 1..30),
        db in prop::collection::vec(-5.0..5.0f64, 30),
        dc in prop::collection::vec(-5.0..5.0f64, 30),
    ) {
        let b: Vec<f64> = a.iter().zip(&db).map(|(x, d)| x + d).collect();
        let c: Vec<f64> = a.iter().zip(&dc).map(|(x, d)| x + d).collect();
        let ab = metrics::mean_abs_error(&a, &b).unwrap();
        prop_assert_eq!(metrics::mean_abs_error(&a, &a).unwrap(), 0.0);
        prop_assert!((ab - metrics::mean_abs_error(&b, &a).unwrap()).abs() <= 1e-12);
        prop_assert!(ab <= metrics::mean_abs_error(&a, &c).unwrap() + metrics::mean_abs_error(&c, &b).unwrap() + 1e-12);
    }

    #[test]
    fn reaching_bounds_shrink_with_gain(x0 in prop::collection::vec(nonzero_c64(), 1..20), g in 0.1..100.0f64, k in 1.0..10.0f64) {
        let a = metrics::reaching_bound_ff_smc(&x0, g).unwrap();
        let b = metrics::reaching_bound_ff_smc(&x0, g * k).unwrap();
        prop_assert!(b <= a);
        let c = metrics::reaching_bound_complex_smc(&x0, g).unwrap();
        let d = metrics::reaching_bound_complex_smc(&x0, g * k).unwrap();
        prop_assert!(d <= c);
    }

    #[test]
    fn reset_is_idempotent_and_phase_preserving(x in prop::collection::vec(nonzero_c64(), 1..20)) {
        let state = ComplexState::new(x.clone());
        let (once, _) = control::hybrid_reset_jump(&state);
        let (twice, _) = control::hybrid_reset_jump(&once);
        for (k, z) in once.x.iter().enumerate() {
            prop_assert!((z.norm() - 1.0).abs() <= 1e-15);
            let jump = dynamics::wrapped_delta(complex::principal_arg(x[k]), complex::principal_arg(*z));
            prop_assert!(jump.abs() <= 4.0 * f64::EPSILON * PI);
            prop_assert!((twice.x[k] - z).norm() <= 2.0 * f64::EPSILON);
        }
    }

    #[test]
    fn equivalent_control_respects_threshold(
        seed in any::<u64>(),
        theta in prop::collection::vec(-PI..PI, 20),
        omega in prop::collection::vec(0.0..3.0f64, 20),
        sigma in 0.01..1.0f64,
        omega_bar in 0.0..20.0f64,
        t in 0.0..5.0f64,
    ) {
        let net = network::erdos_renyi(20, 0.5, seed).unwrap();
        let params = OscParams::new(omega, sigma).unwrap();
        let x = ComplexState::from_phases(&theta).x;
        let u = control::equivalent_control(&x, t, &net, &params, omega_bar).unwrap();
        let bound = control::gain_threshold(&params, 20, omega_bar);
        for (uk, bk) in u.iter().zip(&bound) {
            prop_assert!(uk.norm() <= bk * (1.0 + 1e-12));
        }
    }
}

#[test]
fn signum_of_zero_is_zero() {
    assert_eq!(complex::csign_scalar(Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
    assert_eq!(complex::csign_smoothed(Complex64::new(0.0, 0.0), 0.5), Complex64::new(0.0, 0.0));
}

#[test]
fn controller_validation_rejects_bad_parameters() {
    assert!(ControllerSpec::FfSmc { alpha: 0.0 }.validate(3).is_err());
    assert!(ControllerSpec::HybridReset { window: -1.0 }.validate(3).is_err());
    assert!(ControllerSpec::ComplexSmc {
        gains: vec![1.0; 2],
        omega_bar: 1.0
    }
    .validate(3)
    .is_err());
}
