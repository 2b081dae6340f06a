//! Right-hand sides of the real phase model, the open-loop complex linear
//! embedding, and the input-driven complex system; plus phase unwrapping.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::complex::{self, adjacency_product, check_nondegenerate, check_sizes, CMatrix};
use crate::error::{Error, Result};
use crate::network::{Network, OscParams};

/// Complex state together with a continuous lift of its arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexState {
    pub x: Vec<Complex64>,
    pub unwrapped_args: Vec<f64>,
}

impl ComplexState {
    /// Lifts `x` using principal arguments as the initial branch.
    pub fn new(x: Vec<Complex64>) -> Self {
        let (_, args) = complex::modarg(&x);
        Self { x, unwrapped_args: args }
    }

    pub fn from_phases(theta: &[f64]) -> Self {
        Self {
            x: theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect(),
            unwrapped_args: theta.to_vec(),
        }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.x.iter().map(|z| z.norm()).collect()
    }
}

/// `theta_k' = omega_k + sigma * sum_j a_kj sin(theta_j - theta_k)`.
pub fn rhs_real(theta: &[f64], net: &Network, params: &OscParams) -> Result<Vec<f64>> {
    params.check_size(net)?;
    if theta.len() != net.n() {
        return Err(Error::LengthMismatch {
            expected: net.n(),
            actual: theta.len(),
        });
    }
    let mut out = vec![0.0; theta.len()];
    rhs_real_into(theta, net, params, &mut out);
    Ok(out)
}

pub(crate) fn rhs_real_into(theta: &[f64], net: &Network, params: &OscParams, out: &mut [f64]) {
    // sin(t_j - t_k) = sin t_j cos t_k - cos t_j sin t_k, so one pass over A
    // with precomputed sines and cosines suffices.
    let n = theta.len();
    let (s, c): (Vec<f64>, Vec<f64>) = theta.iter().map(|t| t.sin_cos()).unzip();
    let a = net.adjacency();
    for k in 0..n {
        let row = &a[k * n..(k + 1) * n];
        let (mut ss, mut cs) = (0.0, 0.0);
        for ((&akj, sj), cj) in row.iter().zip(&s).zip(&c) {
            ss += akj * sj;
            cs += akj * cj;
        }
        out[k] = params.omega()[k] + params.sigma() * (ss * c[k] - cs * s[k]);
    }
}

/// System matrix `i diag(omega) + sigma A` of the open-loop embedding.
pub fn system_matrix(net: &Network, params: &OscParams) -> Result<CMatrix> {
    params.check_size(net)?;
    let n = net.n();
    let mut m = CMatrix::from_real(n, net.adjacency())?.scale(Complex64::new(params.sigma(), 0.0));
    for k in 0..n {
        m[(k, k)] += Complex64::new(0.0, params.omega()[k]);
    }
    Ok(m)
}

/// `(i diag(omega) + sigma A) x`.
pub fn rhs_complex_open(x: &[Complex64], net: &Network, params: &OscParams) -> Result<Vec<Complex64>> {
    check_sizes(x, net, params)?;
    let ax = adjacency_product(net, x);
    Ok(open_from_product(x, &ax, params))
}

pub(crate) fn open_from_product(x: &[Complex64], ax: &[Complex64], params: &OscParams) -> Vec<Complex64> {
    x.iter()
        .zip(ax)
        .zip(params.omega())
        .map(|((xk, axk), wk)| Complex64::new(0.0, *wk) * xk + axk * params.sigma())
        .collect()
}

/// Open-loop right-hand side plus the input `u`.
pub fn rhs_complex_controlled(
    x: &[Complex64],
    u: &[Complex64],
    net: &Network,
    params: &OscParams,
) -> Result<Vec<Complex64>> {
    if u.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: u.len(),
        });
    }
    let mut dx = rhs_complex_open(x, net, params)?;
    for (d, uk) in dx.iter_mut().zip(u) {
        *d += uk;
    }
    Ok(dx)
}

/// Magnitude and argument rates under input `u`:
/// `d|x_k|/dt = f_k + |u_k| cos(phi_u - phi_x)`,
/// `d(phi_k)/dt = g_k + |u_k|/|x_k| sin(phi_u - phi_x)`.
pub fn radial_and_angular_rates(
    x: &[Complex64],
    u: &[Complex64],
    net: &Network,
    params: &OscParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_sizes(x, net, params)?;
    if u.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: u.len(),
        });
    }
    check_nondegenerate(x)?;
    let ax = adjacency_product(net, x);
    let f = complex::radial_field(x, &ax, params.sigma());
    let g = complex::angular_field(x, &ax, params);
    let mut radial = Vec::with_capacity(x.len());
    let mut angular = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        let r = x[k].norm();
        // |u| e^{i(phi_u - phi_x)} = u conj(x) / |x|
        let rel = u[k] * x[k].conj() / r;
        radial.push(f[k] + rel.re);
        angular.push(g[k] + rel.im / r);
    }
    Ok((radial, angular))
}

/// Per-step change above which the direction of rotation is ambiguous.
pub const UNWRAP_LIMIT: f64 = 0.9 * PI;

/// Wrapped difference `new - prev` in `(-pi, pi]`.
pub fn wrapped_delta(prev: f64, new: f64) -> f64 {
    let d = (new - prev).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Representative of `new_principal` (mod 2 pi) nearest to `prev_args`.
pub fn unwrap_step(prev_args: &[f64], new_principal: &[f64]) -> Result<Vec<f64>> {
    if prev_args.len() != new_principal.len() {
        return Err(Error::LengthMismatch {
            expected: prev_args.len(),
            actual: new_principal.len(),
        });
    }
    prev_args
        .iter()
        .zip(new_principal)
        .enumerate()
        .map(|(index, (&p, &q))| {
            let d = wrapped_delta(p, q);
            if d.abs() >= UNWRAP_LIMIT {
                Err(Error::UnwrapAmbiguity { index, step: d })
            } else {
                Ok(p + d)
            }
        })
        .collect()
}
