//! Fixed-step integration of the real and complex models.
//!
//! The complex closed loop is advanced with classical RK4, re-evaluating the
//! control law (including any explicit time dependence) at every stage. The
//! hybrid reset baseline is not integrated: its linear flow is propagated
//! with a cached matrix exponential and the reset map is applied at every
//! window boundary.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::{self, adjacency_product_into, matexp, DEGENERATE_MODULUS};
use crate::control::{control_from_product, hybrid_reset_jump, ControllerSpec};
use crate::dynamics::{open_from_product, rhs_real_into, system_matrix, wrapped_delta, ComplexState, UNWRAP_LIMIT};
use crate::error::{Error, Result};
use crate::network::{Network, OscParams};

pub const DEFAULT_DT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Step size, seconds.
    pub dt: f64,
    /// Horizon, seconds.
    pub t_end: f64,
    /// Record every k-th step.
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    /// Boundary-layer width for the discontinuous laws; 0 is the exact signum.
    #[serde(default)]
    pub boundary_layer_delta: f64,
}

fn default_stride() -> usize {
    1
}

impl SimConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self {
            dt,
            t_end,
            record_stride: 1,
            boundary_layer_delta: 0.0,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= self.dt) || !self.t_end.is_finite() {
            return Err(Error::Config(format!("t_end = {} must be at least dt = {}", self.t_end, self.dt)));
        }
        if self.record_stride == 0 {
            return Err(Error::Config("record_stride must be at least 1".into()));
        }
        if !(self.boundary_layer_delta >= 0.0) {
            return Err(Error::Config("boundary_layer_delta must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Reset,
    Reach,
    GuardTrip,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    /// Oscillator involved, if any.
    pub index: Option<usize>,
    /// Largest principal-argument change across a reset (ideally 0).
    pub phase_jump: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub controls: Option<Vec<Vec<Complex64>>>,
    pub events: Vec<Event>,
}

pub type ComplexTrajectory = Trajectory<ComplexState>;
pub type RealTrajectory = Trajectory<Vec<f64>>;

impl<S> Default for Trajectory<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S> Trajectory<S> {
    pub fn new() -> Self {
        Self {
            times: Vec::new(),
            states: Vec::new(),
            controls: None,
            events: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0) - self.times.first().copied().unwrap_or(0.0)
    }

    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.kind == kind)
    }
}

pub trait Component: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn is_finite(&self) -> bool;
}

impl Component for f64 {
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Component for Complex64 {
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// One classical Runge-Kutta step of `y' = rhs(t, y)`.
pub fn rk4_step<E, F>(mut rhs: F, y: &[E], t: f64, dt: f64) -> Result<Vec<E>>
where
    E: Component,
    F: FnMut(f64, &[E]) -> Result<Vec<E>>,
{
    let stage = |base: &[E], k: &[E], h: f64| -> Vec<E> { base.iter().zip(k).map(|(&b, &d)| b + d * h).collect() };
    let k1 = rhs(t, y)?;
    let k2 = rhs(t + 0.5 * dt, &stage(y, &k1, 0.5 * dt))?;
    let k3 = rhs(t + 0.5 * dt, &stage(y, &k2, 0.5 * dt))?;
    let k4 = rhs(t + dt, &stage(y, &k3, dt))?;
    let out: Vec<E> = (0..y.len())
        .map(|i| y[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0))
        .collect();
    if out.iter().all(Component::is_finite) {
        Ok(out)
    } else {
        Err(Error::NonFinite { time: t + dt })
    }
}

/// Integrates the controlled complex system from `x0`.
pub fn run_complex(
    x0: &[Complex64],
    net: &Network,
    params: &OscParams,
    ctrl: &ControllerSpec,
    cfg: &SimConfig,
) -> Result<ComplexTrajectory> {
    complex::check_sizes(x0, net, params)?;
    cfg.validate()?;
    ctrl.validate(net.n())?;
    if !x0.iter().all(Component::is_finite) {
        return Err(Error::NonFinite { time: 0.0 });
    }
    match ctrl {
        ControllerSpec::HybridReset { window } => run_hybrid(x0, net, params, *window, cfg),
        _ => run_closed_loop(x0, net, params, ctrl, cfg),
    }
}

fn run_closed_loop(
    x0: &[Complex64],
    net: &Network,
    params: &OscParams,
    ctrl: &ControllerSpec,
    cfg: &SimConfig,
) -> Result<ComplexTrajectory> {
    let n = net.n();
    let adjacency = net.adjacency();
    let delta = cfg.boundary_layer_delta;
    let mut ax = vec![Complex64::new(0.0, 0.0); n];
    let mut u = vec![Complex64::new(0.0, 0.0); n];

    let mut rhs = |t: f64, y: &[Complex64]| -> Result<Vec<Complex64>> {
        adjacency_product_into(n, adjacency, y, &mut ax);
        control_from_product(ctrl, y, &ax, t, params, delta, &mut u)?;
        let mut dy = open_from_product(y, &ax, params);
        for (d, uk) in dy.iter_mut().zip(&u) {
            *d += uk;
        }
        Ok(dy)
    };
    let control_at = |t: f64, y: &[Complex64]| -> Result<Vec<Complex64>> {
        let mut ax = vec![Complex64::new(0.0, 0.0); n];
        let mut u = vec![Complex64::new(0.0, 0.0); n];
        adjacency_product_into(n, adjacency, y, &mut ax);
        control_from_product(ctrl, y, &ax, t, params, delta, &mut u)?;
        Ok(u)
    };

    let mut traj = Trajectory::new();
    let mut controls = Vec::new();
    let mut state = ComplexState::new(x0.to_vec());
    traj.times.push(0.0);
    controls.push(control_at(0.0, &state.x)?);
    traj.states.push(state.clone());

    let steps = cfg.steps();
    for i in 0..steps {
        let t = i as f64 * cfg.dt;
        let next = rk4_step(&mut rhs, &state.x, t, cfg.dt)?;
        let t_next = (i + 1) as f64 * cfg.dt;
        advance_unwrapped(&mut state, next, t_next, &mut traj.events)?;
        if (i + 1) % cfg.record_stride == 0 || i + 1 == steps {
            traj.times.push(t_next);
            controls.push(control_at(t_next, &state.x)?);
            traj.states.push(state.clone());
        }
    }
    traj.controls = Some(controls);
    Ok(traj)
}

fn run_hybrid(
    x0: &[Complex64],
    net: &Network,
    params: &OscParams,
    window: f64,
    cfg: &SimConfig,
) -> Result<ComplexTrajectory> {
    let steps_per_window = (window / cfg.dt).round() as usize;
    if steps_per_window == 0 || ((steps_per_window as f64) * cfg.dt - window).abs() > 1e-9 * window.max(1.0) {
        return Err(Error::Config(format!(
            "hybrid window {window} must be a positive multiple of dt = {}",
            cfg.dt
        )));
    }
    let mut propagator = WindowPropagator::new(system_matrix(net, params)?);
    let step = propagator.get(cfg.dt)?.clone();

    let mut traj = Trajectory::new();
    let mut state = ComplexState::new(x0.to_vec());
    traj.times.push(0.0);
    traj.states.push(state.clone());

    let steps = cfg.steps();
    for i in 0..steps {
        let next = step.matvec(&state.x);
        let t_next = (i + 1) as f64 * cfg.dt;
        if !next.iter().all(Component::is_finite) {
            return Err(Error::NonFinite { time: t_next });
        }
        advance_unwrapped(&mut state, next, t_next, &mut traj.events)?;
        if (i + 1) % steps_per_window == 0 {
            let before = complex::modarg(&state.x).1;
            let (jumped, zeros) = hybrid_reset_jump(&state);
            let after = complex::modarg(&jumped.x).1;
            let phase_jump = before
                .iter()
                .zip(&after)
                .zip(&jumped.x)
                .filter(|(_, z)| z.norm() > 0.0)
                .map(|((a, b), _)| wrapped_delta(*a, *b).abs())
                .fold(0.0, f64::max);
            traj.events.push(Event {
                time: t_next,
                kind: EventKind::Reset,
                index: None,
                phase_jump: Some(phase_jump),
            });
            if zeros > 0 {
                for k in (0..jumped.n()).filter(|&k| jumped.x[k].norm() == 0.0) {
                    traj.events.push(Event {
                        time: t_next,
                        kind: EventKind::GuardTrip,
                        index: Some(k),
                        phase_jump: None,
                    });
                }
            }
            state = jumped;
        }
        if (i + 1) % cfg.record_stride == 0 || i + 1 == steps {
            traj.times.push(t_next);
            traj.states.push(state.clone());
        }
    }
    Ok(traj)
}

/// Replaces `state.x` with `next` and extends the continuous phase lift.
///
/// A per-step change of `UNWRAP_LIMIT` or more is an error unless the step
/// passes close to the origin (chord longer than the smaller modulus), where
/// the argument genuinely swings; that case and degenerate moduli are
/// recorded as guard trips.
fn advance_unwrapped(state: &mut ComplexState, next: Vec<Complex64>, t: f64, events: &mut Vec<Event>) -> Result<()> {
    for (k, &new) in next.iter().enumerate() {
        let old = state.x[k];
        let r_new = new.norm();
        if r_new < DEGENERATE_MODULUS {
            events.push(Event {
                time: t,
                kind: EventKind::GuardTrip,
                index: Some(k),
                phase_jump: None,
            });
            continue;
        }
        let d = wrapped_delta(state.unwrapped_args[k], complex::principal_arg(new));
        if d.abs() >= UNWRAP_LIMIT {
            let chord = (new - old).norm();
            if old.norm().min(r_new) > chord {
                return Err(Error::UnwrapAmbiguity { index: k, step: d });
            }
            events.push(Event {
                time: t,
                kind: EventKind::GuardTrip,
                index: Some(k),
                phase_jump: Some(d),
            });
        }
        state.unwrapped_args[k] += d;
    }
    state.x = next;
    Ok(())
}

/// Cache of `exp(M tau)` keyed by the exact bit pattern of `tau`.
#[derive(Debug, Clone)]
pub struct WindowPropagator {
    matrix: complex::CMatrix,
    cache: Vec<(u64, complex::CMatrix)>,
}

impl WindowPropagator {
    pub fn new(matrix: complex::CMatrix) -> Self {
        Self {
            matrix,
            cache: Vec::new(),
        }
    }

    pub fn get(&mut self, tau: f64) -> Result<&complex::CMatrix> {
        let key = tau.to_bits();
        if let Some(pos) = self.cache.iter().position(|(k, _)| *k == key) {
            return Ok(&self.cache[pos].1);
        }
        let e = matexp(&self.matrix, tau)?;
        self.cache.push((key, e));
        Ok(&self.cache.last().expect("just pushed").1)
    }

    pub fn propagate(&mut self, x: &[Complex64], tau: f64) -> Result<Vec<Complex64>> {
        Ok(self.get(tau)?.matvec(x))
    }
}

/// Integrates the real phase model.
pub fn run_real(theta0: &[f64], net: &Network, params: &OscParams, cfg: &SimConfig) -> Result<RealTrajectory> {
    params.check_size(net)?;
    if theta0.len() != net.n() {
        return Err(Error::LengthMismatch {
            expected: net.n(),
            actual: theta0.len(),
        });
    }
    cfg.validate()?;
    if !theta0.iter().all(|t| t.is_finite()) {
        return Err(Error::NonFinite { time: 0.0 });
    }
    let n = net.n();
    let rhs = |_t: f64, y: &[f64]| -> Result<Vec<f64>> {
        let mut out = vec![0.0; n];
        rhs_real_into(y, net, params, &mut out);
        Ok(out)
    };
    let mut traj = Trajectory::new();
    let mut theta = theta0.to_vec();
    traj.times.push(0.0);
    traj.states.push(theta.clone());
    let steps = cfg.steps();
    for i in 0..steps {
        theta = rk4_step(rhs, &theta, i as f64 * cfg.dt, cfg.dt)?;
        if (i + 1) % cfg.record_stride == 0 || i + 1 == steps {
            traj.times.push((i + 1) as f64 * cfg.dt);
            traj.states.push(theta.clone());
        }
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Surface {
    /// `|x| = 1`
    UnitModulus,
    /// `x = e^{i wbar t} 1`
    PrescribedLock { omega_bar: f64 },
}

impl Surface {
    pub fn residual(&self, x: &[Complex64], t: f64) -> f64 {
        match *self {
            Surface::UnitModulus => x.iter().fold(0.0, |m, z| m.max((z.norm() - 1.0).abs())),
            Surface::PrescribedLock { omega_bar } => {
                let target = Complex64::from_polar(1.0, omega_bar * t);
                x.iter().fold(0.0, |m, z| m.max((z - target).norm()))
            }
        }
    }
}

/// Default reaching tolerance `max(1e-3, 2 gain dt)`; the exact-signum
/// chattering band scales with `gain * dt`.
pub fn default_reaching_tol(gain: f64, dt: f64) -> f64 {
    (2.0 * gain * dt).max(1e-3)
}

/// First sample time after which the surface residual stays within `tol`.
pub fn detect_reaching(traj: &ComplexTrajectory, surface: Surface, tol: f64) -> Option<f64> {
    let residuals: Vec<f64> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, s)| surface.residual(&s.x, t))
        .collect();
    reaching_index(&residuals, tol).map(|i| traj.times[i])
}

pub(crate) fn reaching_index(residuals: &[f64], tol: f64) -> Option<usize> {
    match residuals.iter().rposition(|&r| !(r <= tol)) {
        None if residuals.is_empty() => None,
        None => Some(0),
        Some(last) if last + 1 < residuals.len() => Some(last + 1),
        Some(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rk4_rotation_step() {
        let next = rk4_step(|_, y: &[Complex64]| Ok(vec![y[0] * c(0.0, 1.0)]), &[c(1.0, 0.0)], 0.0, 0.1).unwrap();
        // Series oracle for e^{0.1 i}.
        let mut term = c(1.0, 0.0);
        let mut series = c(1.0, 0.0);
        for k in 1..30 {
            term = term * c(0.0, 0.1) / k as f64;
            series += term;
        }
        assert!((next[0] - series).norm() <= 1e-7);
    }

    #[test]
    fn rk4_trivial_fields() {
        let y = [1.5, -2.0];
        assert_eq!(rk4_step(|_, _| Ok(vec![0.0, 0.0]), &y, 0.0, 0.3).unwrap(), y.to_vec());
        let out = rk4_step(|_, _| Ok(vec![2.0, -1.0]), &y, 0.0, 0.25).unwrap();
        assert_eq!(out, vec![2.0, -2.25]);
    }

    #[test]
    fn rk4_nonfinite() {
        let r = rk4_step(|_, _| Ok(vec![f64::INFINITY]), &[0.0], 0.0, 0.1);
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(0.0, 1.0).validate().is_err());
        assert!(SimConfig::new(0.1, 0.01).validate().is_err());
        assert!(SimConfig::new(0.1, 1.0).with_stride(0).validate().is_err());
        assert_eq!(SimConfig::new(1e-3, 10.0).steps(), 10_000);
    }

    #[test]
    fn uncoupled_rotation() {
        let net = Network::empty(1);
        let p = OscParams::new(vec![TAU], 1.0).unwrap();
        let cfg = SimConfig::new(1e-3, 1.0);
        let traj = run_complex(&[c(1.0, 0.0)], &net, &p, &ControllerSpec::None, &cfg).unwrap();
        let last = traj.states.last().unwrap();
        assert!((last.x[0] - c(1.0, 0.0)).norm() <= 1e-8);
        assert!((last.unwrapped_args[0] - TAU).abs() <= 1e-8);
        assert_eq!(traj.times.len(), 1001);
    }

    #[test]
    fn stride_keeps_endpoint() {
        let net = Network::empty(2);
        let p = OscParams::new(vec![1.0, 2.0], 1.0).unwrap();
        let cfg = SimConfig::new(0.1, 1.05).with_stride(3);
        let traj = run_real(&[0.0, 0.0], &net, &p, &cfg).unwrap();
        assert_eq!(traj.times.first(), Some(&0.0));
        assert!((traj.times.last().unwrap() - 1.1).abs() < 1e-12 || (traj.times.last().unwrap() - 1.0).abs() < 1e-12);
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn real_model_examples() {
        let net = Network::empty(3);
        let p = OscParams::new(vec![1.0; 3], 1.0).unwrap();
        let traj = run_real(&[0.1, 0.2, 0.3], &net, &p, &SimConfig::new(1e-3, 2.0)).unwrap();
        let last = traj.states.last().unwrap();
        for (a, b) in last.iter().zip([2.1, 2.2, 2.3]) {
            assert!((a - b).abs() <= 1e-10);
        }

        let k2 = Network::complete(2);
        let p = OscParams::new(vec![0.0, 0.0], 1.0).unwrap();
        let traj = run_real(&[0.0, PI - 0.1], &k2, &p, &SimConfig::new(1e-3, 1.0).with_stride(10)).unwrap();
        let gaps: Vec<f64> = traj.states.iter().map(|s| (s[1] - s[0]).abs()).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));

        let traj = run_real(&[0.0, PI], &k2, &p, &SimConfig::new(1e-3, 1.0)).unwrap();
        for s in &traj.states {
            assert!(s[0].abs() <= 1e-9 && (s[1] - PI).abs() <= 1e-9);
        }
    }

    #[test]
    fn hybrid_resets_to_unit_circle() {
        let net = crate::network::erdos_renyi(10, 0.4, 2).unwrap();
        let p = OscParams::new(vec![TAU; 10], 0.25).unwrap();
        let x0: Vec<Complex64> = (0..10).map(|k| Complex64::from_polar(1.0, 0.6 * k as f64)).collect();
        let cfg = SimConfig::new(1e-3, 1.0);
        let traj = run_complex(&x0, &net, &p, &ControllerSpec::HybridReset { window: 0.1 }, &cfg).unwrap();
        let resets: Vec<&Event> = traj.events_of(EventKind::Reset).collect();
        assert_eq!(resets.len(), 10);
        for e in resets {
            let idx = traj.times.iter().position(|&t| (t - e.time).abs() < 1e-12).unwrap();
            for z in &traj.states[idx].x {
                assert!((z.norm() - 1.0).abs() <= 1e-15);
            }
            assert!(e.phase_jump.unwrap() <= 4.0 * f64::EPSILON * PI);
        }
        let bad = run_complex(&x0, &net, &p, &ControllerSpec::HybridReset { window: 0.0105 }, &cfg);
        assert!(matches!(bad, Err(Error::Config(_))));
    }

    #[test]
    fn window_semigroup() {
        let net = crate::network::erdos_renyi(12, 0.3, 9).unwrap();
        let p = OscParams::new(vec![TAU; 12], 0.25).unwrap();
        let mut prop = WindowPropagator::new(system_matrix(&net, &p).unwrap());
        let x: Vec<Complex64> = (0..12).map(|k| Complex64::from_polar(1.0, k as f64)).collect();
        let whole = prop.propagate(&x, 0.5).unwrap();
        let half = prop.propagate(&x, 0.25).unwrap();
        let twice = prop.propagate(&half, 0.25).unwrap();
        let scale = complex::norm_2(&whole);
        let err: f64 = whole.iter().zip(&twice).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(err <= 1e-9 * scale);
    }

    #[test]
    fn reaching_detection() {
        assert_eq!(reaching_index(&[0.0, 0.0], 0.1), Some(0));
        let mut r = vec![1.0; 50];
        r.extend(vec![0.01; 10]);
        assert_eq!(reaching_index(&r, 0.1), Some(50));
        let dip = [1.0, 0.05, 1.0, 0.05, 0.05];
        assert_eq!(reaching_index(&dip, 0.1), Some(3));
        assert_eq!(reaching_index(&[0.0, 1.0], 0.1), None);
        assert_eq!(reaching_index(&[], 0.1), None);
    }

    #[test]
    fn reaching_tolerance_default() {
        assert_eq!(default_reaching_tol(10.0, 1e-3), 0.02);
        assert_eq!(default_reaching_tol(0.1, 1e-3), 1e-3);
    }
}
