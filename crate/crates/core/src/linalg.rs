//! Small dense linear-algebra helpers shared across modules.

use std::ops::{AddAssign, Mul};

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

use crate::C64;

pub type CMatrix = DMatrix<C64>;
pub type RMatrix = DMatrix<f64>;

pub fn identity2() -> CMatrix {
    CMatrix::identity(2, 2)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C64::zero(), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::zero()])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C64::zero(), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::zero()])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::zero(), C64::zero(), C64::new(-1.0, 0.0)])
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn max_abs_diff_c(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff_r(a: &RMatrix, b: &RMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Deviation of `u` from unitarity, `max |U†U − I|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    if u.ncols() != n {
        return f64::INFINITY;
    }
    max_abs_diff_c(&(u.adjoint() * u), &CMatrix::identity(n, n))
}

/// Applies `mat` (`m_out × m_in`, row-major) along mode `mode` of a tensor
/// with the given mode sizes. Modes are ordered most-significant first.
pub fn mode_product<T>(x: &[T], dims: &[usize], mode: usize, mat: &[T], m_out: usize) -> Vec<T>
where
    T: Copy + Zero + Mul<Output = T> + AddAssign,
{
    let m_in = dims[mode];
    debug_assert_eq!(mat.len(), m_out * m_in);
    let post: usize = dims[mode + 1..].iter().product();
    let pre: usize = dims[..mode].iter().product();
    debug_assert_eq!(x.len(), pre * m_in * post);
    let mut out = vec![T::zero(); pre * m_out * post];
    for p in 0..pre {
        let xin = &x[p * m_in * post..(p + 1) * m_in * post];
        let xo = &mut out[p * m_out * post..(p + 1) * m_out * post];
        for o in 0..m_out {
            let row = &mat[o * m_in..(o + 1) * m_in];
            let dst = &mut xo[o * post..(o + 1) * post];
            for (i, &c) in row.iter().enumerate() {
                let src = &xin[i * post..(i + 1) * post];
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d += c * s;
                }
            }
        }
    }
    out
}

/// Applies `mat^{⊗n}` to a tensor with `n` modes of size `m_in`.
pub fn apply_tensor_power<T>(x: &[T], n: usize, m_in: usize, mat: &[T], m_out: usize) -> Vec<T>
where
    T: Copy + Zero + Mul<Output = T> + AddAssign,
{
    let mut dims = vec![m_in; n];
    let mut cur = x.to_vec();
    for mode in 0..n {
        cur = mode_product(&cur, &dims, mode, mat, m_out);
        dims[mode] = m_out;
    }
    cur
}

pub fn row_major(m: &RMatrix) -> Vec<f64> {
    let mut v = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            v.push(m[(i, j)]);
        }
    }
    v
}

/// Moore–Penrose pseudoinverse of a real symmetric matrix from its spectral
/// decomposition. Eigenvalues below `rtol · max|λ|` are treated as zero.
pub fn pinv_symmetric(t: &RMatrix, rtol: f64) -> RMatrix {
    let n = t.nrows();
    let sym = (t + t.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    let cutoff = rtol * lmax;
    let mut out = RMatrix::zeros(n, n);
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l.abs() > cutoff {
            let v = eig.eigenvectors.column(k);
            out += (v * v.transpose()) / l;
        }
    }
    out
}

/// Numerical rank from singular values above `rtol · s_max`.
pub fn rank_r(m: &RMatrix, rtol: f64) -> usize {
    let s = m.clone().svd(false, false).singular_values;
    let smax = s.iter().fold(0.0f64, |a, &x| a.max(x));
    s.iter().filter(|&&x| x > rtol * smax.max(f64::MIN_POSITIVE)).count()
}

/// Thin SVD with singular values sorted in descending order.
pub fn svd_sorted(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap_or(std::cmp::Ordering::Equal));
    let k = s.len();
    let mut us = CMatrix::zeros(u.nrows(), k);
    let mut vts = CMatrix::zeros(k, vt.ncols());
    let mut ss = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        us.set_column(dst, &u.column(src));
        vts.set_row(dst, &vt.row(src));
        ss.push(s[src]);
    }
    (us, ss, vts)
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut vecs = CMatrix::zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
        vals.push(eig.eigenvalues[src]);
    }
    (vals, vecs)
}

/// Square root of a positive semidefinite matrix (negative eigenvalues
/// clipped to zero).
pub fn psd_sqrt(h: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(h);
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|&l| C64::new(l.max(0.0).sqrt(), 0.0)));
    &vecs * CMatrix::from_diagonal(&d) * vecs.adjoint()
}

/// Root fidelity `Tr √(√σ ρ √σ)`.
pub fn root_fidelity(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let s = psd_sqrt(sigma);
    let m = &s * rho * &s;
    let (vals, _) = hermitian_eigen(&m);
    vals.iter().map(|&l| l.max(0.0).sqrt()).sum()
}

/// Trace distance `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let (vals, _) = hermitian_eigen(&(rho - sigma));
    0.5 * vals.iter().map(|l| l.abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_product_matches_kronecker() {
        // (A ⊗ B) x with A, B 2x2 on a 2-mode tensor
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [0.5, -1.0, 2.0, 0.0];
        let x = [1.0, -2.0, 0.5, 3.0];
        let y = mode_product(&x, &[2, 2], 0, &a, 2);
        let y = mode_product(&y, &[2, 2], 1, &b, 2);
        let am = RMatrix::from_row_slice(2, 2, &a);
        let bm = RMatrix::from_row_slice(2, 2, &b);
        let k = am.kronecker(&bm) * nalgebra::DVector::from_row_slice(&x);
        for i in 0..4 {
            assert!((y[i] - k[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn pinv_of_rank_one() {
        let t = RMatrix::from_element(2, 2, 0.5);
        let p = pinv_symmetric(&t, 1e-12);
        assert!(max_abs_diff_r(&p, &RMatrix::from_element(2, 2, 0.5)) < 1e-14);
    }

    #[test]
    fn svd_is_sorted_and_reconstructs() {
        let m = CMatrix::from_fn(3, 4, |i, j| C64::new((i * 4 + j) as f64 * 0.3 - 1.0, (i as f64) - (j as f64) * 0.7));
        let (u, s, vt) = svd_sorted(&m);
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
        let d = CMatrix::from_diagonal(&DVector::from_iterator(s.len(), s.iter().map(|&x| C64::new(x, 0.0))));
        assert!(max_abs_diff_c(&(u * d * vt), &m) < 1e-12);
    }

    #[test]
    fn fidelity_of_identical_pure_states_is_one() {
        let v = DVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        let rho = &v * v.adjoint();
        assert!((root_fidelity(&rho, &rho) - 1.0).abs() < 1e-7);
        assert!(trace_distance(&rho, &rho) < 1e-12);
    }
}
