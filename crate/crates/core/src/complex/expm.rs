//! Dense matrix exponential by scaling and squaring with a diagonal [13/13]
//! Padé approximant (Higham 2005). The approximant is always order 13; the
//! scaling exponent is chosen so that `||A / 2^s||_1 <= THETA_13`.

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

const THETA_13: f64 = 5.371_920_351_148_152;

/// `exp(m * t)`.
pub fn matexp(m: &CMatrix, t: f64) -> Result<CMatrix> {
    if !m.is_finite() || !t.is_finite() {
        return Err(Error::Overflow { stage: "input" });
    }
    let n = m.n();
    if n == 0 {
        return Ok(CMatrix::zeros(0));
    }
    let a = m.scale(Complex64::new(t, 0.0));
    let norm = a.norm_1();
    if norm == 0.0 {
        return Ok(CMatrix::identity(n));
    }
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scale(Complex64::new(2f64.powi(-squarings), 0.0));
    let mut r = pade13(&scaled)?;
    if !r.is_finite() {
        return Err(Error::Overflow { stage: "pade" });
    }
    for _ in 0..squarings {
        r = r.matmul(&r);
        if !r.is_finite() {
            return Err(Error::Overflow { stage: "squaring" });
        }
    }
    Ok(r)
}

fn pade13(a: &CMatrix) -> Result<CMatrix> {
    let b = &PADE_13;
    let n = a.n();
    let ident = CMatrix::identity(n);
    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);

    let u_inner = a6.scale(b[13].into()).axpy(b[11], &a4).axpy(b[9], &a2);
    let u_poly = a6
        .matmul(&u_inner)
        .axpy(b[7], &a6)
        .axpy(b[5], &a4)
        .axpy(b[3], &a2)
        .axpy(b[1], &ident);
    let u = a.matmul(&u_poly);

    let v_inner = a6.scale(b[12].into()).axpy(b[10], &a4).axpy(b[8], &a2);
    let v = a6
        .matmul(&v_inner)
        .axpy(b[6], &a6)
        .axpy(b[4], &a4)
        .axpy(b[2], &a2)
        .axpy(b[0], &ident);

    v.sub(&u).solve(&v.add(&u))
}
