//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::tolerances;

/// Singular values of `m`, sorted in decreasing order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank: singular values below `rel_tol * sigma_max` count as zero.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        None => 0,
        Some(0.0) => 0,
        Some(&smax) => s.iter().filter(|&&v| v > rel_tol * smax).count(),
    }
}

/// Ratio of smallest to largest singular value (0 for singular input).
pub fn inverse_condition(m: &DMatrix<f64>) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&a), Some(&b)) if a > 0.0 => b / a,
        _ => 0.0,
    }
}

/// Minimum-norm least-squares solution of `a x = b` via the SVD.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = (tolerances::RANK * smax).max(f64::MIN_POSITIVE);
    svd.solve(b, eps).expect("SVD computed with both U and V")
}

/// Moore-Penrose pseudo-inverse.
pub fn pseudo_inverse(a: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = (tolerances::RANK * smax).max(f64::MIN_POSITIVE);
    svd.pseudo_inverse(eps).expect("SVD computed with both U and V")
}

/// Fits every column of `targets` in the column span of `basis` by least squares and
/// returns the largest entrywise residual over all columns.
pub fn span_fit_residual(basis: &DMatrix<f64>, targets: &DMatrix<f64>) -> f64 {
    let svd = basis.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = (tolerances::RANK * smax).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for c in 0..targets.ncols() {
        let t = targets.column(c).into_owned();
        let coef = svd.solve(&t, eps).expect("SVD computed with both U and V");
        let r = basis * coef - t;
        worst = worst.max(r.amax());
    }
    worst
}

/// Solves a square system by LU with partial pivoting.
pub fn solve_square(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    a.clone().lu().solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_rank_one_matrix() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, -1.0, -2.0, -3.0]);
        assert_eq!(numerical_rank(&m, 1e-10), 1);
    }

    #[test]
    fn lstsq_picks_minimum_norm() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let b = DVector::from_vec(vec![2.0]);
        let x = lstsq(&a, &b);
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn span_fit_detects_membership() {
        let basis = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let inside = DMatrix::from_row_slice(3, 1, &[3.0, -2.0, 0.0]);
        let outside = DMatrix::from_row_slice(3, 1, &[0.0, 0.0, 1.0]);
        assert!(span_fit_residual(&basis, &inside) < 1e-14);
        assert!((span_fit_residual(&basis, &outside) - 1.0).abs() < 1e-14);
    }
}
