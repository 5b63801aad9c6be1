//! Dense complex linear algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `e^{iθ}`.
#[inline]
pub fn phase(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

pub fn kron_vec(a: &Vector, b: &Vector) -> Vector {
    a.kronecker(b)
}

pub fn commutator(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

pub fn conj_mat(m: &Mat) -> Mat {
    m.map(|z| z.conj())
}

pub fn conj_vec(v: &Vector) -> Vector {
    v.map(|z| z.conj())
}

/// Spectral norm (largest singular value).
pub fn op_norm(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

pub fn frobenius(m: &Mat) -> f64 {
    m.norm()
}

/// `(a|b)`, antilinear in the first slot.
pub fn inner(a: &Vector, b: &Vector) -> C64 {
    a.dotc(b)
}

pub fn basis_vector(dim: usize, index: usize) -> Vector {
    let mut v = Vector::zeros(dim);
    v[index] = real(1.0);
    v
}

pub fn is_hermitian(m: &Mat, tol: f64) -> bool {
    (m - m.adjoint()).norm() <= tol
}

/// Singular values sorted in decreasing order.
pub fn singular_values_desc(m: &Mat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Numerical rank with a threshold relative to the largest singular value.
pub fn rank(m: &Mat, rel_tol: f64) -> usize {
    let s = singular_values_desc(m);
    match s.first() {
        None => 0,
        Some(&0.0) => 0,
        Some(&top) => s.iter().filter(|&&x| x > rel_tol * top).count(),
    }
}

/// Orthonormal basis of the column space, one column per retained direction.
pub fn column_basis(m: &Mat, rel_tol: f64) -> Mat {
    let rows = m.nrows();
    if m.ncols() == 0 {
        return Mat::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let top = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| top > 0.0 && svd.singular_values[i] > rel_tol * top)
        .collect();
    let mut out = Mat::zeros(rows, keep.len());
    for (j, &i) in keep.iter().enumerate() {
        out.set_column(j, &u.column(i));
    }
    out
}

/// Orthonormal basis of the null space of `m`, read off the right singular
/// vectors whose singular value is below `abs_tol`.
pub fn null_space(m: &Mat, abs_tol: f64) -> Mat {
    let n = m.ncols();
    // Pad to at least square so that the SVD exposes every right singular vector.
    let padded = if m.nrows() < n {
        let mut p = Mat::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let kept: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= abs_tol)
        .collect();
    let mut out = Mat::zeros(n, kept.len());
    for (j, &i) in kept.iter().enumerate() {
        let row = v_t.row(i).adjoint();
        out.set_column(j, &row);
    }
    out
}

/// Least-squares solution of `a x ≈ b` and its residual norm.
pub fn least_squares(a: &Mat, b: &Vector, rel_tol: f64) -> (Vector, f64) {
    let svd = a.clone().svd(true, true);
    let eps = rel_tol * svd.singular_values.max().max(f64::MIN_POSITIVE);
    let x = svd.solve(b, eps).expect("both factors computed");
    let residual = (a * &x - b).norm();
    (x, residual)
}

/// Moore–Penrose pseudo-inverse with a relative cutoff.
pub fn pseudo_inverse(a: &Mat, rel_tol: f64) -> Mat {
    let svd = a.clone().svd(true, true);
    let eps = rel_tol * svd.singular_values.max().max(f64::MIN_POSITIVE);
    svd.pseudo_inverse(eps).expect("cutoff is non-negative")
}

/// Function of a Hermitian matrix through its eigendecomposition.
pub fn hermitian_function(m: &Mat, f: impl Fn(f64) -> C64) -> Mat {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut out = Mat::zeros(n, n);
    for k in 0..n {
        let v = eig.eigenvectors.column(k);
        let fk = f(eig.eigenvalues[k]);
        out += v * v.adjoint() * fk;
    }
    out
}

/// Deterministic pairwise (tree) summation; the grouping depends only on the
/// length of the input, so reruns are bit-identical.
pub fn pairwise_sum(values: &[C64]) -> C64 {
    match values.len() {
        0 => C64::new(0.0, 0.0),
        1 => values[0],
        n if n <= 8 => values.iter().fold(C64::new(0.0, 0.0), |acc, &v| acc + v),
        n => {
            let (lo, hi) = values.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

pub fn pairwise_sum_real(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (lo, hi) = values.split_at(n / 2);
            pairwise_sum_real(lo) + pairwise_sum_real(hi)
        }
    }
}

/// Order-preserving map, parallel when the `parallel` feature is on.
pub fn ordered_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_rank_one() {
        let m = Mat::from_row_slice(1, 2, &[real(1.0), real(1.0)]);
        let ns = null_space(&m, 1e-10);
        assert_eq!(ns.ncols(), 1);
        assert!((m * ns).norm() < 1e-12);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let v: Vec<C64> = (0..5).map(|k| real(k as f64)).collect();
        assert_eq!(pairwise_sum(&v), real(10.0));
        let w: Vec<C64> = (0..100).map(|k| real(k as f64)).collect();
        assert_eq!(pairwise_sum(&w), real(4950.0));
    }

    #[test]
    fn least_squares_recovers_exact_solution() {
        let a = Mat::from_row_slice(
            3,
            2,
            &[
                real(1.0),
                real(0.0),
                real(0.0),
                real(1.0),
                real(1.0),
                real(1.0),
            ],
        );
        let x = Vector::from_vec(vec![c(1.0, 2.0), c(-0.5, 0.0)]);
        let b = &a * &x;
        let (sol, res) = least_squares(&a, &b, 1e-12);
        assert!((sol - x).norm() < 1e-12);
        assert!(res < 1e-12);
    }
}
