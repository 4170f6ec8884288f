//! Minimal row-major dense tensor used inside the tensor-network code.

use crate::linalg::CMatrix;
use crate::C64;

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Tensor {
    pub dims: Vec<usize>,
    pub data: Vec<C64>,
}

impl Tensor {
    pub fn zeros(dims: &[usize]) -> Self {
        Tensor { dims: dims.to_vec(), data: vec![C64::new(0.0, 0.0); dims.iter().product()] }
    }

    pub fn from_data(dims: &[usize], data: Vec<C64>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), data.len());
        Tensor { dims: dims.to_vec(), data }
    }

    fn strides(dims: &[usize]) -> Vec<usize> {
        let mut s = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * dims[i + 1];
        }
        s
    }

    /// Output axis `i` is input axis `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Tensor {
        let in_strides = Self::strides(&self.dims);
        let out_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let src_strides: Vec<usize> = perm.iter().map(|&p| in_strides[p]).collect();
        let total = self.data.len();
        let mut out = Vec::with_capacity(total);
        let rank = out_dims.len();
        let mut idx = vec![0usize; rank];
        let mut src = 0usize;
        for _ in 0..total {
            out.push(self.data[src]);
            for ax in (0..rank).rev() {
                idx[ax] += 1;
                src += src_strides[ax];
                if idx[ax] < out_dims[ax] {
                    break;
                }
                src -= src_strides[ax] * out_dims[ax];
                idx[ax] = 0;
            }
        }
        Tensor { dims: out_dims, data: out }
    }

    /// Matrix with rows = first `split` axes, columns = the rest.
    pub fn to_matrix(&self, split: usize) -> CMatrix {
        let rows: usize = self.dims[..split].iter().product();
        let cols: usize = self.dims[split..].iter().product();
        CMatrix::from_row_slice(rows, cols, &self.data)
    }

    pub fn from_matrix(m: &CMatrix, dims: &[usize]) -> Tensor {
        debug_assert_eq!(m.nrows() * m.ncols(), dims.iter().product::<usize>());
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push(m[(i, j)]);
            }
        }
        Tensor { dims: dims.to_vec(), data }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scale(&mut self, f: f64) {
        for c in &mut self.data {
            *c *= f;
        }
    }
}
