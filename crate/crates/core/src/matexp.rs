//! Dense matrix exponential kernels.
//!
//! `expm` is scaling and squaring around a degree-13 diagonal Padé
//! approximant, with the scaling exponent chosen from the 1-norm of `A t`.
//! Everything else (`exp_action`, `integral_action`) is expressed through it.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type DenseMatrix = DMatrix<f64>;

/// Largest dimension the kernels accept.
pub const MAX_DIM: usize = 64;

// Padé 13 numerator coefficients; the denominator uses the same values with
// alternating signs.
const PADE13: [f64; 14] = [
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

// Largest 1-norm for which the unscaled degree-13 approximant meets unit roundoff.
const THETA13: f64 = 5.371_920_351_148_152;

fn one_norm(a: &DenseMatrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn check_square(a: &DenseMatrix, limit: usize) -> Result<usize> {
    let d = a.nrows();
    if a.ncols() != d {
        return Err(Error::Dimension {
            expected: d,
            got: a.ncols(),
        });
    }
    if d > limit {
        return Err(Error::invalid(
            "matrix",
            format!("dimension {d} exceeds {limit}"),
        ));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("matrix", "non-finite entry"));
    }
    Ok(d)
}

/// `e^{A t}`. Returns the identity exactly when `t == 0`.
pub fn expm(a: &DenseMatrix, t: f64) -> Result<DenseMatrix> {
    check_square(a, MAX_DIM)?;
    expm_unchecked(a, t)
}

// The augmented form of `integral_action` needs one row beyond `MAX_DIM`.
fn expm_unchecked(a: &DenseMatrix, t: f64) -> Result<DenseMatrix> {
    let d = a.nrows();
    if t < 0.0 || !t.is_finite() {
        return Err(Error::invalid("time", format!("t = {t} must be finite and >= 0")));
    }
    if t == 0.0 || d == 0 {
        return Ok(DenseMatrix::identity(d, d));
    }
    let at = a * t;
    let norm = one_norm(&at);
    if !norm.is_finite() {
        return Err(Error::NumericRange("A t has unbounded norm".into()));
    }
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = at * 2f64.powi(-squarings);

    let ident = DenseMatrix::identity(d, d);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;

    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &ident * b[1];
    let u = &scaled * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &ident * b[0];

    let numer = &v + &u;
    let denom = v - u;
    let mut result = denom
        .lu()
        .solve(&numer)
        .ok_or_else(|| Error::NumericRange("Padé denominator is singular".into()))?;

    for _ in 0..squarings {
        result = &result * &result;
        if result.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericRange("matrix exponential overflowed".into()));
        }
    }
    if result.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericRange("matrix exponential overflowed".into()));
    }
    Ok(result)
}

/// `e^{A t} w`.
pub fn exp_action(a: &DenseMatrix, w: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
    if w.len() != a.nrows() {
        return Err(Error::Dimension {
            expected: a.nrows(),
            got: w.len(),
        });
    }
    Ok(expm(a, t)? * w)
}

/// `∫_0^T e^{B s} y ds`, read off the exponential of the block matrix
/// `[[B, y], [0, 0]]` so that `B` is never inverted.
pub fn integral_action(b: &DenseMatrix, y: &DVector<f64>, horizon: f64) -> Result<DVector<f64>> {
    let d = check_square(b, MAX_DIM)?;
    if y.len() != d {
        return Err(Error::Dimension {
            expected: d,
            got: y.len(),
        });
    }
    if horizon == 0.0 {
        return Ok(DVector::zeros(d));
    }
    let mut aug = DenseMatrix::zeros(d + 1, d + 1);
    aug.view_mut((0, 0), (d, d)).copy_from(b);
    aug.view_mut((0, d), (d, 1)).copy_from(y);
    let e = expm_unchecked(&aug, horizon)?;
    Ok(e.view((0, d), (d, 1)).column(0).into_owned())
}
