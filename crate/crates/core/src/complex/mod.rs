//! Complex vector primitives: the componentwise complex signum, polar
//! views, and the radial/angular coupling fields of the complex network.

mod eigen;
mod expm;
mod matrix;

pub use eigen::{eigen_spectrum, EigenPair, MAX_DIM as EIGEN_MAX_DIM};
pub use expm::matexp;
pub use matrix::CMatrix;
pub use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::{Network, OscParams};

/// Magnitudes below this leave the argument ill-defined.
pub const DEGENERATE_MODULUS: f64 = 1e-12;

/// `z / |z|`, or 0 at the origin.
pub fn csign_scalar(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        z / r
    }
}

/// Componentwise complex signum.
pub fn csign(w: &[Complex64]) -> Vec<Complex64> {
    w.iter().copied().map(csign_scalar).collect()
}

/// Boundary-layer signum `z / (|z| + delta)`; `delta = 0` is the exact signum.
pub fn csign_smoothed(z: Complex64, delta: f64) -> Complex64 {
    if delta == 0.0 {
        csign_scalar(z)
    } else {
        z / (z.norm() + delta)
    }
}

/// Real signum with `sign(0) = 0`, optionally smoothed as `v / (|v| + delta)`.
pub fn rsign(v: f64, delta: f64) -> f64 {
    if delta > 0.0 {
        v / (v.abs() + delta)
    } else if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Principal argument in `(-pi, pi]`, with `arg(0) = 0`.
pub fn principal_arg(z: Complex64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        return 0.0;
    }
    let a = z.im.atan2(z.re);
    // atan2 returns -pi for (negative, -0.0); keep the branch upper-closed.
    if a == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        a
    }
}

/// Moduli and principal arguments.
pub fn modarg(x: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    x.iter().map(|z| (z.norm(), principal_arg(*z))).unzip()
}

pub fn check_nondegenerate(x: &[Complex64]) -> Result<()> {
    match x.iter().position(|z| z.norm() < DEGENERATE_MODULUS) {
        Some(index) => Err(Error::DegenerateMagnitude {
            index,
            modulus: x[index].norm(),
        }),
        None => Ok(()),
    }
}

/// `A x` for the 0/1 adjacency of `net`.
pub fn adjacency_product(net: &Network, x: &[Complex64]) -> Vec<Complex64> {
    let n = net.n();
    let a = net.adjacency();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    adjacency_product_into(n, a, x, &mut out);
    out
}

pub(crate) fn adjacency_product_into(n: usize, a: &[f64], x: &[Complex64], out: &mut [Complex64]) {
    for (k, o) in out.iter_mut().enumerate() {
        let row = &a[k * n..(k + 1) * n];
        let (mut re, mut im) = (0.0, 0.0);
        for (&akj, xj) in row.iter().zip(x) {
            re += akj * xj.re;
            im += akj * xj.im;
        }
        *o = Complex64::new(re, im);
    }
}

/// Radial drift `f_k(x) = sigma * sum_j a_kj |x_j| cos(phi_j - phi_k)`,
/// evaluated as `sigma * Re(conj(x_k) (A x)_k) / |x_k|`.
pub fn coupling_f(x: &[Complex64], net: &Network, params: &OscParams) -> Result<Vec<f64>> {
    check_sizes(x, net, params)?;
    check_nondegenerate(x)?;
    let ax = adjacency_product(net, x);
    Ok(radial_field(x, &ax, params.sigma()))
}

/// Angular field `g_k(x) = omega_k + sigma * sum_j a_kj |x_j|/|x_k| sin(phi_j - phi_k)`,
/// evaluated as `omega_k + sigma * Im(conj(x_k) (A x)_k) / |x_k|^2`.
pub fn coupling_g(x: &[Complex64], net: &Network, params: &OscParams) -> Result<Vec<f64>> {
    check_sizes(x, net, params)?;
    check_nondegenerate(x)?;
    let ax = adjacency_product(net, x);
    Ok(angular_field(x, &ax, params))
}

pub(crate) fn radial_field(x: &[Complex64], ax: &[Complex64], sigma: f64) -> Vec<f64> {
    x.iter()
        .zip(ax)
        .map(|(xk, axk)| sigma * (xk.conj() * axk).re / xk.norm())
        .collect()
}

pub(crate) fn angular_field(x: &[Complex64], ax: &[Complex64], params: &OscParams) -> Vec<f64> {
    x.iter()
        .zip(ax)
        .zip(params.omega())
        .map(|((xk, axk), wk)| wk + params.sigma() * (xk.conj() * axk).im / xk.norm_sqr())
        .collect()
}

pub(crate) fn check_sizes(x: &[Complex64], net: &Network, params: &OscParams) -> Result<()> {
    params.check_size(net)?;
    if x.len() != net.n() {
        return Err(Error::LengthMismatch {
            expected: net.n(),
            actual: x.len(),
        });
    }
    Ok(())
}

pub fn norm_2(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm_inf(x: &[Complex64]) -> f64 {
    x.iter().fold(0.0, |m, z| m.max(z.norm()))
}
