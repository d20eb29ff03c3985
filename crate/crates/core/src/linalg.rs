//! Small dense matrices over complex doubles.
//!
//! Every field value in the crate is an `m x m` [`Mat`]. Real-valued fields
//! keep their imaginary parts at zero; the [`ScalarKind`](crate::ScalarKind)
//! tag on the owning field records which interpretation applies.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type Scalar = Complex64;
pub type Mat = DMatrix<Complex64>;

/// Determinant threshold below which a matrix is treated as singular.
pub const INVERTIBILITY_TOL: f64 = 1e-12;

pub fn identity(m: usize) -> Mat {
    Mat::identity(m, m)
}

pub fn zeros(m: usize) -> Mat {
    Mat::zeros(m, m)
}

pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Mat {
    Mat::from_row_iterator(rows, cols, data.iter().map(|&v| Complex64::new(v, 0.0)))
}

pub fn scalar(v: Complex64) -> Mat {
    Mat::from_element(1, 1, v)
}

/// Chebyshev norm: largest entry modulus.
pub fn max_abs(a: &Mat) -> f64 {
    a.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "matrix shapes differ");
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// True when `|det a|` exceeds the invertibility threshold scaled by the
/// magnitude of the entries.
pub fn is_invertible(a: &Mat) -> bool {
    let m = a.nrows() as i32;
    let scale = max_abs(a).max(1.0).powi(m);
    let det = a.clone().lu().determinant().norm();
    det.is_finite() && det > INVERTIBILITY_TOL * scale
}

/// LU inverse with partial pivoting, `None` when the matrix is singular.
pub fn inverse(a: &Mat) -> Option<Mat> {
    if !is_invertible(a) {
        return None;
    }
    a.clone().lu().try_inverse()
}

/// Forces imaginary parts to `+0.0`.
pub fn realify(a: &mut Mat) {
    for z in a.iter_mut() {
        z.im = 0.0;
    }
}

pub fn is_real(a: &Mat) -> bool {
    a.iter().all(|z| z.im == 0.0)
}
