//! Minimal dense row-major matrix used by the generators and eigensolvers.
//!
//! The toolkit works at desk scale (a few hundred vertices), so a plain
//! `Vec<f64>` backing with O(n^3) kernels is sufficient and keeps the solver
//! stack dependency-free.

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix {
            rows: r,
            cols: c,
            data,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// `self * v` for a column vector `v`.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![0.0; self.rows];
        for r in 0..self.rows {
            let row = self.row(r);
            let mut acc = 0.0;
            for c in 0..self.cols {
                acc += row[c] * v[c];
            }
            out[r] = acc;
        }
        out
    }

    /// `v * self` for a row vector `v` (left action, used by random walks).
    pub fn vec_mat(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for r in 0..self.rows {
            let row = self.row(r);
            let vr = v[r];
            if vr == 0.0 {
                continue;
            }
            for c in 0..self.cols {
                out[c] += vr * row[c];
            }
        }
        out
    }

    pub fn row_sum(&self, r: usize) -> f64 {
        self.row(r).iter().sum()
    }

    pub fn col_sum(&self, c: usize) -> f64 {
        (0..self.rows).map(|r| self.get(r, c)).sum()
    }

    /// Row sums of absolute values (unsigned degrees).
    pub fn abs_row_sum(&self, r: usize) -> f64 {
        self.row(r).iter().map(|x| x.abs()).sum()
    }

    pub fn abs_col_sum(&self, c: usize) -> f64 {
        (0..self.rows).map(|r| self.get(r, c).abs()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Largest |a_ij - a_ji| over all pairs; zero for symmetric matrices.
    pub fn max_asymmetry(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in (r + 1)..self.cols {
                worst = worst.max((self.get(r, c) - self.get(c, r)).abs());
            }
        }
        worst
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols && self.max_asymmetry() <= tol
    }

    pub fn trace(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn insert_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c));
            }
        }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        out
    }
}

/// LU factorization with partial pivoting, stored in-place.
pub struct Lu {
    n: usize,
    lu: Matrix,
    pivots: Vec<usize>,
}

impl Lu {
    /// Factors `a` (square). Returns `None` when a pivot collapses to zero,
    /// i.e. the matrix is singular to working precision.
    pub fn factor(a: &Matrix) -> Option<Lu> {
        assert_eq!(a.rows(), a.cols());
        let n = a.rows();
        let mut lu = a.clone();
        let mut pivots = vec![0usize; n];
        for k in 0..n {
            let mut p = k;
            let mut best = lu.get(k, k).abs();
            for r in (k + 1)..n {
                let v = lu.get(r, k).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 {
                return None;
            }
            pivots[k] = p;
            if p != k {
                for c in 0..n {
                    let t = lu.get(k, c);
                    lu.set(k, c, lu.get(p, c));
                    lu.set(p, c, t);
                }
            }
            let inv_pivot = 1.0 / lu.get(k, k);
            for r in (k + 1)..n {
                let f = lu.get(r, k) * inv_pivot;
                lu.set(r, k, f);
                if f != 0.0 {
                    for c in (k + 1)..n {
                        lu.set(r, c, lu.get(r, c) - f * lu.get(k, c));
                    }
                }
            }
        }
        Some(Lu { n, lu, pivots })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut x = b.to_vec();
        for k in 0..self.n {
            x.swap(k, self.pivots[k]);
            for r in (k + 1)..self.n {
                x[r] -= self.lu.get(r, k) * x[k];
            }
        }
        for k in (0..self.n).rev() {
            for c in (k + 1)..self.n {
                x[k] -= self.lu.get(k, c) * x[c];
            }
            x[k] /= self.lu.get(k, k);
        }
        x
    }
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn normalize(v: &mut [f64]) {
    let n = norm2(v);
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}
