//! Control laws for the input-driven complex network.
//!
//! * switched feedforward: cancels the radial drift so unit moduli stay unit,
//! * feedforward + sliding mode: adds a radial push `-alpha sign(|x|-1)`,
//! * complex sliding mode: drives `s = x - e^{i wbar t} 1` to zero,
//! * diagonal state feedback `u = -diag(mu) x`,
//! * periodic hybrid reset onto the unit circle.
//!
//! The two feedforward laws are evaluated in product form
//! (`-f_k e^{i phi_k}`, `-alpha sign(|x_k|-1) e^{i phi_k}`), which equals the
//! modulus/phase assembly without its branch jump at `f_k = 0`.

use num_complex::Complex64;
use serde::Serialize;

use crate::complex::{
    self, adjacency_product, check_nondegenerate, check_sizes, csign_smoothed, eigen_spectrum, rsign, CMatrix,
};
use crate::dynamics::{system_matrix, ComplexState};
use crate::error::{Error, Result};
use crate::network::{Network, OscParams};

#[derive(Debug, Clone, PartialEq)]
pub enum ControllerSpec {
    None,
    SwitchedFf,
    FfSmc { alpha: f64 },
    ComplexSmc { gains: Vec<f64>, omega_bar: f64 },
    Roberts { mu: Vec<f64> },
    HybridReset { window: f64 },
}

impl ControllerSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            ControllerSpec::FfSmc { alpha } if !(*alpha > 0.0) => {
                Err(Error::Config(format!("ff_smc alpha must be positive, got {alpha}")))
            }
            ControllerSpec::HybridReset { window } if !(*window > 0.0) => {
                Err(Error::Config(format!("hybrid_reset window must be positive, got {window}")))
            }
            ControllerSpec::ComplexSmc { gains, omega_bar } => {
                if gains.len() != n {
                    return Err(Error::LengthMismatch {
                        expected: n,
                        actual: gains.len(),
                    });
                }
                if gains.iter().any(|k| !(*k > 0.0)) {
                    return Err(Error::Config("complex_smc gains must be positive".into()));
                }
                if !omega_bar.is_finite() {
                    return Err(Error::Config("complex_smc omega_bar must be finite".into()));
                }
                Ok(())
            }
            ControllerSpec::Roberts { mu } if mu.len() != n => Err(Error::LengthMismatch {
                expected: n,
                actual: mu.len(),
            }),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ControllerSpec::None => "none",
            ControllerSpec::SwitchedFf => "switched_ff",
            ControllerSpec::FfSmc { .. } => "ff_smc",
            ControllerSpec::ComplexSmc { .. } => "complex_smc",
            ControllerSpec::Roberts { .. } => "roberts",
            ControllerSpec::HybridReset { .. } => "hybrid_reset",
        }
    }
}

/// Feedforward term `u1_k = -f_k(x) e^{i phi_k}`; zeroes the radial rate.
pub fn u_switched_ff(x: &[Complex64], net: &Network, params: &OscParams) -> Result<Vec<Complex64>> {
    check_sizes(x, net, params)?;
    check_nondegenerate(x)?;
    let ax = adjacency_product(net, x);
    Ok(switched_ff_from_product(x, &ax, params.sigma()))
}

fn switched_ff_from_product(x: &[Complex64], ax: &[Complex64], sigma: f64) -> Vec<Complex64> {
    // -f_k x_k/|x_k| with f_k = sigma Re(conj(x_k)(Ax)_k)/|x_k|
    x.iter()
        .zip(ax)
        .map(|(xk, axk)| -xk * (sigma * (xk.conj() * axk).re / xk.norm_sqr()))
        .collect()
}

/// Feedforward plus sliding-mode term `-alpha sign(|x_k| - 1) e^{i phi_k}`.
pub fn u_ff_smc(x: &[Complex64], net: &Network, params: &OscParams, alpha: f64) -> Result<Vec<Complex64>> {
    u_ff_smc_smoothed(x, net, params, alpha, 0.0)
}

/// [`u_ff_smc`] with a boundary-layer signum of width `delta`.
pub fn u_ff_smc_smoothed(
    x: &[Complex64],
    net: &Network,
    params: &OscParams,
    alpha: f64,
    delta: f64,
) -> Result<Vec<Complex64>> {
    if !(alpha > 0.0) {
        return Err(Error::Precondition(format!("alpha must be positive, got {alpha}")));
    }
    check_sizes(x, net, params)?;
    check_nondegenerate(x)?;
    let ax = adjacency_product(net, x);
    Ok(ff_smc_from_product(x, &ax, params.sigma(), alpha, delta))
}

fn ff_smc_from_product(x: &[Complex64], ax: &[Complex64], sigma: f64, alpha: f64, delta: f64) -> Vec<Complex64> {
    x.iter()
        .zip(ax)
        .map(|(xk, axk)| {
            let r = xk.norm();
            let f = sigma * (xk.conj() * axk).re / r;
            -xk * ((f + alpha * rsign(r - 1.0, delta)) / r)
        })
        .collect()
}

/// Prescribed-frequency switching function `s(x, t) = x - e^{i wbar t} 1`.
pub fn switching_function(x: &[Complex64], t: f64, omega_bar: f64) -> Vec<Complex64> {
    let target = Complex64::from_polar(1.0, omega_bar * t);
    x.iter().map(|xk| xk - target).collect()
}

/// Generic sliding-mode law `u = -diag(K) sign(s)` for any switching value.
pub fn sliding_control(s: &[Complex64], gains: &[f64], delta: f64) -> Vec<Complex64> {
    s.iter().zip(gains).map(|(sk, k)| -csign_smoothed(*sk, delta) * *k).collect()
}

/// Complex sliding mode toward `e^{i wbar t} 1`.
pub fn u_complex_smc(x: &[Complex64], t: f64, gains: &[f64], omega_bar: f64) -> Result<Vec<Complex64>> {
    u_complex_smc_smoothed(x, t, gains, omega_bar, 0.0)
}

pub fn u_complex_smc_smoothed(
    x: &[Complex64],
    t: f64,
    gains: &[f64],
    omega_bar: f64,
    delta: f64,
) -> Result<Vec<Complex64>> {
    if gains.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: gains.len(),
        });
    }
    Ok(sliding_control(&switching_function(x, t, omega_bar), gains, delta))
}

/// Equivalent control keeping `s` stationary:
/// `u_eq = i wbar e^{i wbar t} 1 - (i diag(omega) + sigma A) x`.
pub fn equivalent_control(
    x: &[Complex64],
    t: f64,
    net: &Network,
    params: &OscParams,
    omega_bar: f64,
) -> Result<Vec<Complex64>> {
    let drift = crate::dynamics::rhs_complex_open(x, net, params)?;
    let ds_dt = Complex64::new(0.0, omega_bar) * Complex64::from_polar(1.0, omega_bar * t);
    Ok(drift.iter().map(|d| ds_dt - d).collect())
}

/// Sufficient gain per oscillator: `omega_i + wbar + sigma (N - 1)`.
pub fn gain_threshold(params: &OscParams, n: usize, omega_bar: f64) -> Vec<f64> {
    let tail = omega_bar + params.sigma() * (n as f64 - 1.0);
    params.omega().iter().map(|w| w + tail).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SmcDiagnostics {
    /// `s(x0, 0)`, empty when no initial state was given.
    #[serde(skip)]
    pub s: Vec<Complex64>,
    pub u_eq_bound: Vec<f64>,
    pub epsilon2: f64,
    /// Upper bound on the reaching time; `None` without an initial state or
    /// when the margin is not positive.
    pub reaching_bound: Option<f64>,
    pub violated: bool,
}

/// Margin `eps2 = min K_i - (||omega||_inf + wbar + sigma (N - 1))` and the
/// reaching bound `sqrt(2)/eps2 ||x0 - 1||_2`.
pub fn gain_margin(
    gains: &[f64],
    params: &OscParams,
    n: usize,
    omega_bar: f64,
    x0: Option<&[Complex64]>,
) -> SmcDiagnostics {
    let k_min = gains.iter().copied().fold(f64::INFINITY, f64::min);
    let epsilon2 = k_min - (params.omega_inf_norm() + omega_bar + params.sigma() * (n as f64 - 1.0));
    let violated = !(epsilon2 > 0.0);
    let s = x0.map(|x| switching_function(x, 0.0, omega_bar)).unwrap_or_default();
    let reaching_bound = match x0 {
        Some(_) if !violated => Some(2f64.sqrt() / epsilon2 * complex::norm_2(&s)),
        _ => None,
    };
    SmcDiagnostics {
        s,
        u_eq_bound: gain_threshold(params, n, omega_bar),
        epsilon2,
        reaching_bound,
        violated,
    }
}

/// Diagonal state feedback `u = -diag(mu) x`.
pub fn u_roberts(x: &[Complex64], mu: &[f64]) -> Result<Vec<Complex64>> {
    if mu.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: mu.len(),
        });
    }
    Ok(x.iter().zip(mu).map(|(xk, m)| -xk * *m).collect())
}

/// `mu = sigma * degrees`, turning the closed loop into `i omega I - sigma L`.
/// Valid only for identical frequencies on a connected graph.
pub fn roberts_mu_degree(net: &Network, params: &OscParams) -> Result<Vec<f64>> {
    params.check_size(net)?;
    let w0 = params.omega()[0];
    if params.omega().iter().any(|w| (w - w0).abs() > 1e-12) {
        return Err(Error::Precondition(
            "degree-based feedback gains require identical natural frequencies".into(),
        ));
    }
    if !net.is_connected() {
        return Err(Error::Precondition("degree-based feedback gains require a connected graph".into()));
    }
    Ok(net.degrees().iter().map(|&d| params.sigma() * d as f64).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct RobertsSpectrum {
    pub valid: bool,
    pub marginal_count: usize,
    /// Eigenvalue closest to the imaginary axis, as `[re, im]`.
    #[serde(serialize_with = "ser_complex")]
    pub marginal_eigenvalue: Complex64,
    /// `max |v_k| - min |v_k|` over its eigenvector.
    pub modulus_spread: f64,
    /// Largest real part among the remaining eigenvalues.
    pub max_other_re: f64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// Closed-loop matrix `i diag(omega) - diag(mu) + sigma A`.
pub fn roberts_matrix(net: &Network, params: &OscParams, mu: &[f64]) -> Result<CMatrix> {
    if mu.len() != net.n() {
        return Err(Error::LengthMismatch {
            expected: net.n(),
            actual: mu.len(),
        });
    }
    let mut m = system_matrix(net, params)?;
    for (k, &mk) in mu.iter().enumerate() {
        m[(k, k)] -= mk;
    }
    Ok(m)
}

/// Checks for exactly one eigenvalue with `|Re| <= tol` whose eigenvector has
/// equal-modulus entries (spread `<= tol`), all others having `Re < -tol`.
pub fn verify_roberts_spectrum(net: &Network, params: &OscParams, mu: &[f64], tol: f64) -> Result<RobertsSpectrum> {
    let m = roberts_matrix(net, params, mu)?;
    let pairs = eigen_spectrum(&m, 1e-8)?;
    let closest = pairs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.re.abs().total_cmp(&b.1.value.re.abs()))
        .map(|(i, _)| i)
        .expect("nonempty spectrum");
    let marginal_count = pairs.iter().filter(|p| p.value.re.abs() <= tol).count();
    let moduli: Vec<f64> = pairs[closest].vector.iter().map(|v| v.norm()).collect();
    let modulus_spread = moduli.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - moduli.iter().copied().fold(f64::INFINITY, f64::min);
    let max_other_re = pairs
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != closest)
        .map(|(_, p)| p.value.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let valid = marginal_count == 1 && modulus_spread <= tol && (pairs.len() == 1 || max_other_re < -tol);
    Ok(RobertsSpectrum {
        valid,
        marginal_count,
        marginal_eigenvalue: pairs[closest].value,
        modulus_spread,
        max_other_re,
    })
}

/// Reset map `x+ = sign(x)`: unit moduli, phases and unwrapped arguments kept.
/// Returns the new state and the number of components that were exactly 0.
pub fn hybrid_reset_jump(state: &ComplexState) -> (ComplexState, usize) {
    let zeros = state.x.iter().filter(|z| z.norm() == 0.0).count();
    let x = complex::csign(&state.x);
    (
        ComplexState {
            x,
            unwrapped_args: state.unwrapped_args.clone(),
        },
        zeros,
    )
}

/// Control evaluation inside the integrator, reusing a precomputed `A x`.
pub(crate) fn control_from_product(
    spec: &ControllerSpec,
    x: &[Complex64],
    ax: &[Complex64],
    t: f64,
    params: &OscParams,
    delta: f64,
    out: &mut [Complex64],
) -> Result<()> {
    match spec {
        ControllerSpec::None | ControllerSpec::HybridReset { .. } => {
            out.iter_mut().for_each(|u| *u = Complex64::new(0.0, 0.0));
        }
        ControllerSpec::SwitchedFf => {
            check_nondegenerate(x)?;
            out.copy_from_slice(&switched_ff_from_product(x, ax, params.sigma()));
        }
        ControllerSpec::FfSmc { alpha } => {
            check_nondegenerate(x)?;
            out.copy_from_slice(&ff_smc_from_product(x, ax, params.sigma(), *alpha, delta));
        }
        ControllerSpec::ComplexSmc { gains, omega_bar } => {
            let target = Complex64::from_polar(1.0, omega_bar * t);
            for ((u, xk), k) in out.iter_mut().zip(x).zip(gains) {
                *u = -csign_smoothed(xk - target, delta) * *k;
            }
        }
        ControllerSpec::Roberts { mu } => {
            for ((u, xk), m) in out.iter_mut().zip(x).zip(mu) {
                *u = -xk * *m;
            }
        }
    }
    Ok(())
}
