//! Dense row-major f64 matrix with the small set of kernels the training
//! loops need.
//!
//! Summation order inside every kernel is fixed (8-lane partial sums folded
//! left to right), so results are bit-reproducible across runs and thread
//! counts.

use crate::error::{Result, SmieError};

#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(SmieError::Validation(format!(
                "matrix data length {} does not match shape {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Dot product with a fixed 8-lane accumulation order.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 8];
    let mut ai = a.chunks_exact(8);
    let mut bi = b.chunks_exact(8);
    for (a8, b8) in ai.by_ref().zip(bi.by_ref()) {
        for l in 0..8 {
            acc[l] += a8[l] * b8[l];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ai.remainder().iter().zip(bi.remainder()) {
        tail += x * y;
    }
    ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail
}

/// y <- y + a * x
#[inline]
pub fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// x (B x in) times w^T (w stored out x in) -> B x out.
///
/// Rows of both operands are contiguous, so each output element is one
/// `dot`. Outputs are produced in blocks of four to reuse the x row.
pub fn matmul_nt(x: &Mat, w: &Mat) -> Mat {
    assert_eq!(x.cols, w.cols, "matmul_nt inner dimension mismatch");
    let (b, out, inner) = (x.rows, w.rows, w.cols);
    let mut y = Mat::zeros(b, out);
    for r in 0..b {
        let xr = x.row(r);
        let yr = y.row_mut(r);
        let mut o = 0;
        while o + 4 <= out {
            let w0 = w.row(o);
            let w1 = w.row(o + 1);
            let w2 = w.row(o + 2);
            let w3 = w.row(o + 3);
            let mut a0 = [0.0f64; 4];
            let mut a1 = [0.0f64; 4];
            let mut a2 = [0.0f64; 4];
            let mut a3 = [0.0f64; 4];
            let chunks = inner / 4;
            for i in 0..chunks {
                let base = i * 4;
                for l in 0..4 {
                    let xv = xr[base + l];
                    a0[l] += xv * w0[base + l];
                    a1[l] += xv * w1[base + l];
                    a2[l] += xv * w2[base + l];
                    a3[l] += xv * w3[base + l];
                }
            }
            let mut t = [0.0f64; 4];
            for i in chunks * 4..inner {
                let xv = xr[i];
                t[0] += xv * w0[i];
                t[1] += xv * w1[i];
                t[2] += xv * w2[i];
                t[3] += xv * w3[i];
            }
            yr[o] = (a0[0] + a0[1]) + (a0[2] + a0[3]) + t[0];
            yr[o + 1] = (a1[0] + a1[1]) + (a1[2] + a1[3]) + t[1];
            yr[o + 2] = (a2[0] + a2[1]) + (a2[2] + a2[3]) + t[2];
            yr[o + 3] = (a3[0] + a3[1]) + (a3[2] + a3[3]) + t[3];
            o += 4;
        }
        while o < out {
            yr[o] = dot(xr, w.row(o));
            o += 1;
        }
    }
    y
}

/// dy (B x out) times w (out x in) -> B x in, by row accumulation.
pub fn matmul_nn(dy: &Mat, w: &Mat) -> Mat {
    assert_eq!(dy.cols, w.rows, "matmul_nn inner dimension mismatch");
    let (b, out, inner) = (dy.rows, w.rows, w.cols);
    let mut dx = Mat::zeros(b, inner);
    for r in 0..b {
        let dyr = dy.row(r);
        let dxr = dx.row_mut(r);
        for o in 0..out {
            let c = dyr[o];
            if c != 0.0 {
                axpy(dxr, c, w.row(o));
            }
        }
    }
    dx
}

/// dw (out x in) += dy^T (B x out) times x (B x in), accumulated row by row.
pub fn accumulate_gram(dw: &mut Mat, dy: &Mat, x: &Mat) {
    assert_eq!(dy.rows, x.rows, "accumulate_gram batch mismatch");
    assert_eq!(dw.rows, dy.cols, "accumulate_gram output mismatch");
    assert_eq!(dw.cols, x.cols, "accumulate_gram input mismatch");
    for r in 0..dy.rows {
        let dyr = dy.row(r);
        let xr = x.row(r);
        for o in 0..dw.rows {
            let c = dyr[o];
            if c != 0.0 {
                axpy(dw.row_mut(o), c, xr);
            }
        }
    }
}

/// Column sums (bias gradients).
pub fn col_sums(m: &Mat) -> Vec<f64> {
    let mut out = vec![0.0; m.cols];
    for r in 0..m.rows {
        for (acc, v) in out.iter_mut().zip(m.row(r)) {
            *acc += v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_matmul_nt(x: &Mat, w: &Mat) -> Mat {
        let mut y = Mat::zeros(x.rows(), w.rows());
        for r in 0..x.rows() {
            for o in 0..w.rows() {
                let mut s = 0.0;
                for i in 0..x.cols() {
                    s += x.get(r, i) * w.get(o, i);
                }
                y.set(r, o, s);
            }
        }
        y
    }

    #[test]
    fn dot_matches_naive() {
        let a: Vec<f64> = (0..37).map(|i| i as f64 * 0.25 - 3.0).collect();
        let b: Vec<f64> = (0..37).map(|i| (i as f64).sin()).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-9);
    }

    #[test]
    fn matmul_nt_matches_naive() {
        let x = Mat::from_vec(3, 7, (0..21).map(|i| (i as f64 * 0.37).cos()).collect()).unwrap();
        let w = Mat::from_vec(6, 7, (0..42).map(|i| (i as f64 * 0.11).sin()).collect()).unwrap();
        let fast = matmul_nt(&x, &w);
        let slow = naive_matmul_nt(&x, &w);
        for r in 0..3 {
            for c in 0..6 {
                assert!((fast.get(r, c) - slow.get(r, c)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matmul_nn_is_transpose_consistent() {
        // dy * w == dy * (w^T)^T, checked against matmul_nt on the transpose.
        let dy = Mat::from_vec(4, 5, (0..20).map(|i| i as f64 * 0.1).collect()).unwrap();
        let w = Mat::from_vec(5, 3, (0..15).map(|i| (i as f64).sqrt()).collect()).unwrap();
        let mut wt = Mat::zeros(3, 5);
        for r in 0..5 {
            for c in 0..3 {
                wt.set(c, r, w.get(r, c));
            }
        }
        let a = matmul_nn(&dy, &w);
        let b = matmul_nt(&dy, &wt);
        for r in 0..4 {
            for c in 0..3 {
                assert!((a.get(r, c) - b.get(r, c)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn from_vec_rejects_bad_length() {
        assert!(Mat::from_vec(2, 3, vec![0.0; 5]).is_err());
    }

    #[test]
    fn accumulate_gram_matches_naive() {
        let dy = Mat::from_vec(3, 2, vec![1.0, 2.0, 0.5, -1.0, 0.0, 3.0]).unwrap();
        let x = Mat::from_vec(3, 4, (0..12).map(|i| i as f64).collect()).unwrap();
        let mut dw = Mat::zeros(2, 4);
        accumulate_gram(&mut dw, &dy, &x);
        for o in 0..2 {
            for i in 0..4 {
                let mut s = 0.0;
                for r in 0..3 {
                    s += dy.get(r, o) * x.get(r, i);
                }
                assert!((dw.get(o, i) - s).abs() < 1e-12);
            }
        }
    }
}
