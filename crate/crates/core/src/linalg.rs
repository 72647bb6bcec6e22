//! Small complex linear algebra helpers shared by the determinant formulas
//! and the Bethe-equation solver. Everything is LU with partial pivoting via
//! nalgebra; the matrices here never exceed a handful of rows.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Determinant together with a crude conditioning proxy
/// (`max |entry| * dim / |det|`; large values flag cancellation).
pub fn det_with_hint(matrix: &DMatrix<Complex64>) -> (Complex64, f64) {
    let dim = matrix.nrows();
    if dim == 0 {
        return (Complex64::ONE, 1.0);
    }
    let scale = matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let det = matrix.clone().lu().determinant();
    let hint = scale * dim as f64 / det.norm().max(f64::MIN_POSITIVE);
    (det, hint)
}

/// Build a dense matrix from an entry closure.
pub fn matrix_from_fn(
    rows: usize,
    cols: usize,
    f: impl FnMut(usize, usize) -> Complex64,
) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, f)
}

/// Solve `A x = b`, reporting failure instead of NaN when A is singular.
pub fn solve(
    a: DMatrix<Complex64>,
    b: DVector<Complex64>,
    context: &'static str,
) -> Result<DVector<Complex64>> {
    a.lu().solve(&b).ok_or(Error::SingularSystem(context))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_by_two_determinant_matches_cofactor_formula() {
        let m = matrix_from_fn(2, 2, |i, j| c64((i + 1) as f64, (2 * j) as f64 - 0.5));
        let (det, hint) = det_with_hint(&m);
        let direct = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        assert!((det - direct).norm() < 1e-14);
        assert!(hint.is_finite());
    }

    #[test]
    fn empty_determinant_is_one() {
        let m = DMatrix::<Complex64>::zeros(0, 0);
        assert_eq!(det_with_hint(&m).0, Complex64::ONE);
    }

    #[test]
    fn solve_recovers_known_vector() {
        let a = matrix_from_fn(3, 3, |i, j| {
            c64(
                1.0 / (1.0 + i as f64 + j as f64),
                (i as f64 - j as f64) * 0.2,
            )
        });
        let x = DVector::from_vec(vec![c64(1.0, 1.0), c64(-0.5, 0.0), c64(0.0, 2.0)]);
        let b = &a * &x;
        let got = solve(a, b, "test").unwrap();
        assert!((got - x).norm() < 1e-12);
    }

    #[test]
    fn singular_solve_is_an_error() {
        let a = matrix_from_fn(2, 2, |i, _| c64(i as f64 + 1.0, 0.0));
        let b = DVector::from_vec(vec![Complex64::ONE, Complex64::ONE]);
        assert!(matches!(
            solve(a, b, "test"),
            Err(Error::SingularSystem("test"))
        ));
    }
}
