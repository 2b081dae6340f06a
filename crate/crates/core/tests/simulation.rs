use std::f64::consts::PI;

use ckuramoto::complex::{matexp, CMatrix, Complex64};
use ckuramoto::control::ControllerSpec;
use ckuramoto::dynamics::{self, ComplexState};
use ckuramoto::network::{self, Network, OscParams};
use ckuramoto::rng::SplitMix64;
use ckuramoto::sim::{self, EventKind, SimConfig, Surface};

fn taylor_exp(m: &CMatrix, t: f64) -> CMatrix {
    let a = m.scale(Complex64::new(t, 0.0));
    let mut term = CMatrix::identity(m.n());
    let mut sum = term.clone();
    for k in 1..80 {
        term = term.matmul(&a).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
    }
    sum
}

#[test]
fn matexp_agrees_with_taylor_series() {
    let mut g = SplitMix64::new(3);
    for n in [1, 3, 6] {
        let data = (0..n * n).map(|_| Complex64::new(g.uniform(-1.0, 1.0), g.uniform(-1.0, 1.0))).collect();
        let m = CMatrix::from_rows(n, data).unwrap();
        for t in [0.0, 0.3, 1.7] {
            let diff = matexp(&m, t).unwrap().sub(&taylor_exp(&m, t)).norm_fro();
            assert!(diff < 1e-12 * taylor_exp(&m, t).norm_fro(), "n={n} t={t} diff={diff}");
        }
    }
}

#[test]
fn rk4_error_falls_with_fourth_power() {
    let net = Network::empty(1);
    let params = OscParams::new(vec![1.0], 1.0).unwrap();
    let err = |h: f64| {
        let traj = sim::run_complex(&[Complex64::new(1.0, 0.0)], &net, &params, &ControllerSpec::None, &SimConfig::new(h, 10.0)).unwrap();
        (traj.states.last().unwrap().x[0] - Complex64::from_polar(1.0, 10.0)).norm()
    };
    let order = (err(0.1) / err(0.05)).log2();
    assert!((3.7..=4.3).contains(&order), "{order}");
}

#[test]
fn uncoupled_rotation_is_exact_enough() {
    let net = Network::empty(1);
    let params = OscParams::new(vec![2.0 * PI], 1.0).unwrap();
    let traj = sim::run_complex(&[Complex64::new(1.0, 0.0)], &net, &params, &ControllerSpec::None, &SimConfig::new(1e-3, 1.0)).unwrap();
    assert!((traj.states.last().unwrap().x[0] - 1.0).norm() < 1e-8);
}

#[test]
fn switched_feedforward_tracks_real_model() {
    let net = network::erdos_renyi(30, 0.3, 2).unwrap();
    let params = OscParams::new(vec![2.0 * PI; 30], 0.25).unwrap();
    let mut g = SplitMix64::new(8);
    let theta0: Vec<f64> = (0..30).map(|_| g.uniform(-PI, PI)).collect();
    let x0 = ComplexState::from_phases(&theta0).x;
    let cfg = SimConfig::new(1e-3, 2.0);
    let c = sim::run_complex(&x0, &net, &params, &ControllerSpec::SwitchedFf, &cfg).unwrap();
    let r = sim::run_real(&theta0, &net, &params, &cfg).unwrap();
    assert_eq!(c.times, r.times);
    for (cs, rs) in c.states.iter().zip(&r.states) {
        for (z, th) in cs.x.iter().zip(rs) {
            assert!((z.norm() - 1.0).abs() < 1e-9);
            assert!((z - Complex64::from_polar(1.0, *th)).norm() < 1e-6);
        }
    }
}

#[test]
fn sliding_mode_reaches_unit_circle() {
    let net = network::erdos_renyi(20, 0.3, 4).unwrap();
    let params = OscParams::new(vec![2.0 * PI; 20], 0.25).unwrap();
    let mut g = SplitMix64::new(5);
    let x0: Vec<Complex64> = (0..20).map(|_| Complex64::from_polar(g.uniform(0.1, 2.0), g.uniform(-PI, PI))).collect();
    let alpha = 10.0;
    let cfg = SimConfig::new(1e-3, 2.0);
    let traj = sim::run_complex(&x0, &net, &params, &ControllerSpec::FfSmc { alpha }, &cfg).unwrap();
    let tol = sim::default_reaching_tol(alpha, cfg.dt);
    let reach = sim::detect_reaching(&traj, Surface::UnitModulus, tol).expect("reached");
    let bound = ckuramoto::metrics::reaching_bound_ff_smc(&x0, alpha).unwrap();
    assert!(reach <= bound, "{reach} > {bound}");
}

#[test]
fn hybrid_resets_land_on_unit_circle() {
    let net = network::erdos_renyi(15, 0.3, 6).unwrap();
    let params = OscParams::new(vec![2.0 * PI; 15], 0.25).unwrap();
    let mut g = SplitMix64::new(1);
    let theta0: Vec<f64> = (0..15).map(|_| g.uniform(-PI, PI)).collect();
    let x0 = ComplexState::from_phases(&theta0).x;
    let traj = sim::run_complex(&x0, &net, &params, &ControllerSpec::HybridReset { window: 0.1 }, &SimConfig::new(1e-3, 1.0)).unwrap();
    let resets: Vec<_> = traj.events_of(EventKind::Reset).collect();
    assert_eq!(resets.len(), 10);
    for ev in resets {
        let k = traj.times.iter().position(|t| (t - ev.time).abs() < 1e-9).unwrap();
        for z in &traj.states[k].x {
            assert!((z.norm() - 1.0).abs() <= 2.0 * f64::EPSILON);
        }
    }
}

#[test]
fn hybrid_window_must_align_with_step() {
    let net = Network::complete(3);
    let params = OscParams::new(vec![1.0; 3], 0.1).unwrap();
    let x0 = vec![Complex64::new(1.0, 0.0); 3];
    let res = sim::run_complex(&x0, &net, &params, &ControllerSpec::HybridReset { window: 0.00015 }, &SimConfig::new(1e-4, 1.0));
    assert!(res.is_err());
}

#[test]
fn invalid_step_is_rejected() {
    assert!(SimConfig::new(0.0, 1.0).validate().is_err());
    assert!(SimConfig::new(-1e-3, 1.0).validate().is_err());
    assert!(SimConfig::new(f64::NAN, 1.0).validate().is_err());
}

#[test]
fn recording_stride_subsamples() {
    let net = Network::complete(4);
    let params = OscParams::new(vec![1.0; 4], 0.2).unwrap();
    let theta0 = [0.1, 0.2, 0.3, 0.4];
    let full = sim::run_real(&theta0, &net, &params, &SimConfig::new(1e-2, 1.0)).unwrap();
    let thin = sim::run_real(&theta0, &net, &params, &SimConfig::new(1e-2, 1.0).with_stride(10)).unwrap();
    assert_eq!(full.times.len(), 101);
    assert_eq!(thin.times.len(), 11);
    assert_eq!(thin.states.last().unwrap(), full.states.last().unwrap());
}

#[test]
fn unwrapping_continues_past_pi() {
    let args = dynamics::unwrap_step(&[3.1], &[-3.1]).unwrap();
    assert!((args[0] - (2.0 * PI - 3.1)).abs() < 1e-12);
    assert!(dynamics::unwrap_step(&[0.0], &[3.0]).is_err());
}
