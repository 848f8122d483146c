//! Thin wrappers over `nalgebra` for the handful of dense operations the
//! crate needs.

use nalgebra::{DMatrix, DVector};

use crate::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Determinant via LU with partial pivoting.
pub fn det(m: &CMatrix) -> Complex64 {
    m.clone().lu().determinant()
}

pub fn real_det(m: &DMatrix<f64>) -> f64 {
    m.clone().lu().determinant()
}

/// Least-squares solution of `a·x ≈ b`: Householder QR when `a` has full
/// column rank, minimum-norm SVD solution otherwise.
pub fn lstsq(a: &CMatrix, b: &CMatrix) -> CMatrix {
    if a.nrows() >= a.ncols() && a.ncols() > 0 {
        let qr = a.clone().qr();
        let r = qr.r();
        let d: Vec<f64> = r.diagonal().iter().map(|z| z.norm()).collect();
        let dmax = d.iter().cloned().fold(0.0, f64::max);
        let dmin = d.iter().cloned().fold(f64::INFINITY, f64::min);
        if dmax > 0.0 && dmin > 1e-10 * dmax {
            if let Some(x) = r.solve_upper_triangular(&(qr.q().adjoint() * b)) {
                return x;
            }
        }
    }
    let svd = a.clone().svd(true, true);
    let eps = f64::EPSILON * a.nrows().max(a.ncols()) as f64 * svd.singular_values.max();
    svd.solve(b, eps).expect("SVD computed with both factors")
}

/// Right singular vector of the smallest singular value, together with
/// `σ_min / σ_max`.
pub fn null_vector(a: &CMatrix) -> (CVector, f64) {
    let cols = a.ncols();
    // Pad to at least square so the full right basis is available.
    let a = if a.nrows() < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^*");
    let s = &svd.singular_values;
    let (imin, smin) = s
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &x)| if x < acc.1 { (i, x) } else { acc });
    let smax = s.max();
    let row = v_t.row(imin);
    let v = CVector::from_iterator(cols, row.iter().map(|z| z.conj()));
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    (v, ratio)
}

/// Maximum entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    #[test]
    fn det_of_triangular() {
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(5.0, 1.0), c(0.0, 0.0), c(0.0, 3.0)]);
        assert!((det(&m) - c(0.0, 6.0)).norm() < 1e-14);
    }

    #[test]
    fn lstsq_recovers_exact_solution() {
        let a = CMatrix::from_fn(6, 3, |i, j| c(((i + 1) * (j + 1) * (j + 1)) as f64, (i * i + j) as f64 * 0.5));
        let x = CMatrix::from_column_slice(3, 1, &[c(1.0, -1.0), c(0.5, 2.0), c(-3.0, 0.0)]);
        let b = &a * &x;
        let got = lstsq(&a, &b);
        assert!(max_abs(&(got - x)) < 1e-10);
    }

    #[test]
    fn null_vector_of_rank_deficient() {
        let a = CMatrix::from_row_slice(2, 3, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let (v, ratio) = null_vector(&a);
        assert!(ratio < 1e-14);
        assert!((&a * &v).iter().all(|z| z.norm() < 1e-14));
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }
}
