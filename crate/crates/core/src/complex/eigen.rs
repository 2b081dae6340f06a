//! Dense complex eigen-decomposition: Householder reduction to upper
//! Hessenberg form, shifted QR iteration to complex Schur form `T = Z* M Z`,
//! then eigenvectors by back-substitution on `T`.

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub const MAX_DIM: usize = 2048;
const MAX_SWEEPS_PER_EIGENVALUE: usize = 30;

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: Complex64,
    /// Unit 2-norm.
    pub vector: Vec<Complex64>,
}

/// Eigenpairs of `m`, sorted by decreasing real part. Every pair is checked
/// to satisfy `||M v - lambda v||_2 <= tol * ||M||_F`.
pub fn eigen_spectrum(m: &CMatrix, tol: f64) -> Result<Vec<EigenPair>> {
    let n = m.n();
    if n > MAX_DIM {
        return Err(Error::Precondition(format!("dense eigensolver limited to n <= {MAX_DIM}, got {n}")));
    }
    if !m.is_finite() {
        return Err(Error::Precondition("matrix has non-finite entries".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut t, mut z) = hessenberg(m);
    schur(&mut t, &mut z)?;
    let mut pairs = triangular_eigenvectors(&t, &z);

    let scale = m.norm_fro().max(f64::MIN_POSITIVE);
    for pair in &pairs {
        let mv = m.matvec(&pair.vector);
        let res: f64 = mv
            .iter()
            .zip(&pair.vector)
            .map(|(a, v)| (a - pair.value * v).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if res > tol * scale {
            return Err(Error::Convergence { iterations: 0 });
        }
    }
    pairs.sort_by(|a, b| b.value.re.total_cmp(&a.value.re).then(b.value.im.total_cmp(&a.value.im)));
    Ok(pairs)
}

/// Returns `(H, Q)` with `H = Q* M Q` upper Hessenberg and `Q` unitary.
fn hessenberg(m: &CMatrix) -> (CMatrix, CMatrix) {
    let n = m.n();
    let mut h = m.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let norm: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        // H <- (I - 2 v v*) H on rows k+1..n
        for j in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(r, vr)| vr.conj() * h[(k + 1 + r, j)]).sum();
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= vr * dot * 2.0;
            }
        }
        // H <- H (I - 2 v v*) and Q <- Q (I - 2 v v*) on columns k+1..n
        for mat in [&mut h, &mut q] {
            for i in 0..n {
                let dot: Complex64 = v.iter().enumerate().map(|(r, vr)| mat[(i, k + 1 + r)] * vr).sum();
                for (r, vr) in v.iter().enumerate() {
                    mat[(i, k + 1 + r)] -= dot * vr.conj() * 2.0;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

/// Complex Schur form by explicitly shifted QR with Givens rotations and
/// Wilkinson shifts. Overwrites `h` with upper-triangular `T` and
/// accumulates the transformation into `z`.
fn schur(h: &mut CMatrix, z: &mut CMatrix) -> Result<()> {
    let n = h.n();
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut sweeps = 0usize;
    let mut total = 0usize;
    let budget = MAX_SWEEPS_PER_EIGENVALUE * n;
    let mut rotations: Vec<(Complex64, Complex64)> = Vec::with_capacity(n);

    while hi > 0 {
        // Locate the start of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let floor = if diag == 0.0 { f64::MIN_POSITIVE } else { eps * diag };
            if sub <= floor {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            sweeps = 0;
            continue;
        }
        if total >= budget {
            return Err(Error::Convergence { iterations: total });
        }
        sweeps += 1;
        total += 1;

        let shift = if sweeps.is_multiple_of(10) {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + h[(hi, hi - 1)].norm() * 0.75
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for k in lo..=hi {
            h[(k, k)] -= shift;
        }
        rotations.clear();
        for k in lo..hi {
            let a = h[(k, k)];
            let b = h[(k + 1, k)];
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 { (ONE, ZERO) } else { (a / r, b / r) };
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = c.conj() * x + s.conj() * y;
                h[(k + 1, j)] = -s * x + c * y;
            }
            rotations.push((c, s));
        }
        for (offset, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + offset;
            let rows = (k + 2).min(hi) + 1;
            for i in 0..rows {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s;
                h[(i, k + 1)] = -x * s.conj() + y * c.conj();
            }
            for i in 0..n {
                let x = z[(i, k)];
                let y = z[(i, k + 1)];
                z[(i, k)] = x * c + y * s;
                z[(i, k + 1)] = -x * s.conj() + y * c.conj();
            }
        }
        for k in lo..=hi {
            h[(k, k)] += shift;
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(())
}

/// Eigenvalue of the trailing 2x2 block `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_diff = (a - d) * 0.5;
    let disc = (half_diff * half_diff + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn triangular_eigenvectors(t: &CMatrix, z: &CMatrix) -> Vec<EigenPair> {
    let n = t.n();
    let tnorm = t.norm_fro();
    let smin = (f64::EPSILON * tnorm).max(f64::MIN_POSITIVE * 1e3);
    const BIG: f64 = 1e100;

    (0..n)
        .map(|k| {
            let lambda = t[(k, k)];
            let mut y = vec![ZERO; k + 1];
            y[k] = ONE;
            for i in (0..k).rev() {
                let acc: Complex64 = (i + 1..=k).map(|j| t[(i, j)] * y[j]).sum();
                let mut denom = t[(i, i)] - lambda;
                if denom.norm() < smin {
                    denom = Complex64::new(smin, 0.0);
                }
                y[i] = -acc / denom;
                if y[i].norm() > BIG {
                    let s = y[i].norm();
                    for v in &mut y[i..] {
                        *v /= s;
                    }
                }
            }
            let mut v: Vec<Complex64> = (0..n)
                .map(|r| (0..=k).map(|j| z[(r, j)] * y[j]).sum())
                .collect();
            let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            for c in &mut v {
                *c /= norm;
            }
            EigenPair { value: lambda, vector: v }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_matrix() {
        let m = CMatrix::from_diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let pairs = eigen_spectrum(&m, 1e-10).unwrap();
        assert!((pairs[0].value - c(2.0, 0.0)).norm() < 1e-14);
        assert!((pairs[1].value - c(1.0, 0.0)).norm() < 1e-14);
        assert!((pairs[0].vector[1].norm() - 1.0).abs() < 1e-14);
        assert!((pairs[1].vector[0].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rotation_block_has_imaginary_pair() {
        let m = CMatrix::from_real(2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
        let pairs = eigen_spectrum(&m, 1e-10).unwrap();
        let mut ims: Vec<f64> = pairs.iter().map(|p| p.value.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-12 && (ims[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_normal_upper_triangular() {
        let m = CMatrix::from_rows(3, vec![
            c(1.0, 0.0), c(5.0, 1.0), c(-2.0, 0.0),
            c(0.0, 0.0), c(2.0, 1.0), c(3.0, 0.0),
            c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.5),
        ])
        .unwrap();
        let pairs = eigen_spectrum(&m, 1e-10).unwrap();
        let vals: Vec<Complex64> = pairs.iter().map(|p| p.value).collect();
        for expect in [c(1.0, 0.0), c(2.0, 1.0), c(-1.0, 0.5)] {
            assert!(vals.iter().any(|v| (v - expect).norm() < 1e-12));
        }
    }

    #[test]
    fn repeated_eigenvalues() {
        // Laplacian of K4: eigenvalues 0 and 4 (x3).
        let mut data = vec![-1.0; 16];
        for k in 0..4 {
            data[k * 5] = 3.0;
        }
        let m = CMatrix::from_real(4, &data).unwrap();
        let pairs = eigen_spectrum(&m, 1e-10).unwrap();
        let mut re: Vec<f64> = pairs.iter().map(|p| p.value.re).collect();
        re.sort_by(f64::total_cmp);
        assert!(re[0].abs() < 1e-12);
        for r in &re[1..] {
            assert!((r - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_limit() {
        let m = CMatrix::zeros(MAX_DIM + 1);
        assert!(matches!(eigen_spectrum(&m, 1e-8), Err(Error::Precondition(_))));
    }
}
