//! Dense complex linear algebra helpers shared by every other module.
//!
//! Multi-partite operators use row-major tensor ordering: for factors with
//! dimensions `[d0, d1, ...]` the first factor is the most significant digit
//! of the flat index.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{shape, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Matrix unit `|i><j|` of size `rows x cols`.
pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(rows, cols);
    m[(i, j)] = ONE;
    m
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn trace(a: &CMat) -> C64 {
    a.diagonal().iter().sum()
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()) * c(0.5, 0.0)
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues in ascending
/// order. Only the Hermitian part of `h` is used.
pub fn eigh(h: &CMat) -> (DVector<f64>, CMat) {
    let n = h.nrows();
    let eig = SymmetricEigen::new(hermitian_part(h));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn eigvalsh(h: &CMat) -> DVector<f64> {
    eigh(h).0
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_fn(h: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (w, v) = eigh(h);
    let fd = CMat::from_diagonal(&w.map(|x| c(f(x), 0.0)));
    &v * fd * v.adjoint()
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian(h: &CMat) -> f64 {
    eigvalsh(h).iter().map(|x| x.abs()).sum()
}

/// Largest singular value.
pub fn op_norm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().singular_values().max()
}

/// Partial trace over every factor not listed in `keep`.
///
/// `keep` is given in any order; the kept factors stay in their original
/// relative order.
pub fn partial_trace(m: &CMat, dims: &[usize], keep: &[usize]) -> Result<CMat> {
    let n: usize = dims.iter().product();
    if m.nrows() != n || m.ncols() != n {
        return shape(format!(
            "operator is {}x{}, factor dimensions {:?} multiply to {}",
            m.nrows(),
            m.ncols(),
            dims,
            n
        ));
    }
    if let Some(&k) = keep.iter().find(|&&k| k >= dims.len()) {
        return shape(format!("factor index {k} out of range for {} factors", dims.len()));
    }
    let kept: Vec<bool> = (0..dims.len()).map(|k| keep.contains(&k)).collect();
    let dk: usize = dims.iter().zip(&kept).filter(|(_, &k)| k).map(|(d, _)| d).product();
    let dt = n / dk;

    // full[k * dt + t] is the flat index whose kept digits spell k and traced digits spell t
    let mut full = vec![0usize; n];
    for idx in 0..n {
        let (mut rem, mut k, mut t) = (idx, 0usize, 0usize);
        let mut digits = vec![0usize; dims.len()];
        for f in (0..dims.len()).rev() {
            digits[f] = rem % dims[f];
            rem /= dims[f];
        }
        for f in 0..dims.len() {
            if kept[f] {
                k = k * dims[f] + digits[f];
            } else {
                t = t * dims[f] + digits[f];
            }
        }
        full[k * dt + t] = idx;
    }

    let mut out = CMat::zeros(dk, dk);
    for r in 0..dk {
        for col in 0..dk {
            let mut acc = ZERO;
            for t in 0..dt {
                acc += m[(full[r * dt + t], full[col * dt + t])];
            }
            out[(r, col)] = acc;
        }
    }
    Ok(out)
}

/// Reorders tensor factors: factor `perm[k]` of the input becomes factor `k`
/// of the output. Returns the permutation matrix `P` with `P |x> = |x'>`.
pub fn permutation_operator(dims: &[usize], perm: &[usize]) -> CMat {
    let n: usize = dims.iter().product();
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut p = CMat::zeros(n, n);
    let mut digits = vec![0usize; dims.len()];
    for idx in 0..n {
        let mut rem = idx;
        for f in (0..dims.len()).rev() {
            digits[f] = rem % dims[f];
            rem /= dims[f];
        }
        let mut target = 0usize;
        for (k, &src) in perm.iter().enumerate() {
            target = target * new_dims[k] + digits[src];
        }
        p[(target, idx)] = ONE;
    }
    p
}

/// Real symmetric embedding `[[Re H, -Im H], [Im H, Re H]]` of a complex matrix.
pub fn real_embedding(h: &CMat) -> DMatrix<f64> {
    let n = h.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            out[(i, j)] = z.re;
            out[(i + n, j + n)] = z.re;
            out[(i, j + n)] = -z.im;
            out[(i + n, j)] = z.im;
        }
    }
    out
}

/// Inverse of [`real_embedding`] for an arbitrary symmetric block: returns the
/// Hermitian matrix whose embedding is closest to `x` in Frobenius norm.
pub fn from_real_embedding(x: &DMatrix<f64>) -> CMat {
    let n = x.nrows() / 2;
    CMat::from_fn(n, n, |i, j| {
        let re = 0.5 * (x[(i, j)] + x[(i + n, j + n)]);
        let im = 0.5 * (x[(i + n, j)] - x[(i, j + n)]);
        c(re, im)
    })
}

/// Row-major vectorisation: `vec(A)[i * cols + j] = A[i, j]`.
pub fn vec_row_major(a: &CMat) -> DVector<C64> {
    DVector::from_iterator(a.len(), (0..a.nrows()).flat_map(|i| (0..a.ncols()).map(move |j| a[(i, j)])))
}

pub fn unvec_row_major(v: &DVector<C64>, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |i, j| v[i * cols + j])
}
