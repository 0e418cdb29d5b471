//! Small dense linear algebra: row-major matrices and Cholesky factorisation.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::LengthMismatch {
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| crate::scalar::dot(self.row(i), v))
            .collect()
    }

    /// `selfᵀ v`
    pub fn tr_matvec(&self, v: &[S]) -> Vec<S> {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = vec![S::zero(); self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        out
    }

    /// `selfᵀ self`
    pub fn gram(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.cols);
        for i in 0..self.rows {
            let r = self.row(i);
            for a in 0..self.cols {
                for b in 0..self.cols {
                    out[(a, b)] += r[a] * r[b];
                }
            }
        }
        out
    }

    pub fn quad_form(&self, v: &[S]) -> S {
        crate::scalar::dot(v, &self.matvec(v))
    }

    pub fn max_abs_asymmetry(&self) -> S {
        let mut worst = S::zero();
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }
}

impl<S> std::ops::Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Matrix<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower-triangular Cholesky factor `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky<S> {
    l: Matrix<S>,
    /// Diagonal jitter that was added before factorising.
    jitter: S,
}

impl<S: Scalar> Cholesky<S> {
    /// Factorises `a + jitter·I`. Fails if a pivot is not strictly positive.
    pub fn new(a: &Matrix<S>, jitter: S) -> Option<Self> {
        Self::with_pivot_floor(a, jitter, S::zero())
    }

    /// Like [`new`](Self::new), but also fails on any pivot `≤ floor`.
    pub fn with_pivot_floor(a: &Matrix<S>, jitter: S, floor: S) -> Option<Self> {
        let n = a.rows();
        debug_assert_eq!(n, a.cols());
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut diag = a[(j, j)] + jitter;
            for k in 0..j {
                diag -= l[(j, k)] * l[(j, k)];
            }
            if !(diag > floor) || !diag.is_finite() {
                return None;
            }
            let ljj = diag.sqrt();
            l[(j, j)] = ljj;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / ljj;
            }
        }
        Some(Self { l, jitter })
    }

    /// Tries jitters from `ladder` in order and returns the first success.
    /// A pivot below `n·ε·max_j a_jj` is lost in the rounding of the
    /// elimination and counts as a failure. A zero rung additionally needs
    /// every pivot to reach the next rung's jitter; below that the unjittered
    /// solve is less stable than the regularised one.
    pub fn with_jitter_ladder(a: &Matrix<S>, ladder: &[S]) -> Result<Self> {
        let n = a.rows();
        let max_diag = (0..n).map(|j| a[(j, j)]).fold(S::zero(), |m, v| m.max(v));
        let roundoff = S::lit(n as f64) * S::epsilon() * max_diag;
        for (i, &j) in ladder.iter().enumerate() {
            let floor = match ladder.get(i + 1) {
                Some(&next) if j == S::zero() => roundoff.max(next),
                _ => roundoff,
            };
            if let Some(c) = Self::with_pivot_floor(a, j, floor) {
                return Ok(c);
            }
        }
        Err(Error::IllConditioned {
            size: a.rows(),
            condition_estimate: condition_estimate(a),
        })
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn jitter(&self) -> S {
        self.jitter
    }

    pub fn factor(&self) -> &Matrix<S> {
        &self.l
    }

    /// Solves `L y = b`.
    pub fn solve_lower(&self, b: &[S]) -> Vec<S> {
        let n = self.dim();
        let mut y = b.to_vec();
        for i in 0..n {
            let row = self.l.row(i);
            let mut s = y[i];
            for k in 0..i {
                s -= row[k] * y[k];
            }
            y[i] = s / row[i];
        }
        y
    }

    /// Solves `Lᵀ x = y`.
    pub fn solve_upper(&self, y: &[S]) -> Vec<S> {
        let n = self.dim();
        let mut x = y.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.l[(k, i)] * x[k];
            }
            x[i] = s / self.l[(i, i)];
        }
        x
    }

    /// Solves `(A + jitter·I) x = b`.
    pub fn solve(&self, b: &[S]) -> Vec<S> {
        self.solve_upper(&self.solve_lower(b))
    }

    pub fn log_det(&self) -> S {
        (0..self.dim())
            .map(|i| self.l[(i, i)].ln())
            .sum::<S>()
            * S::lit(2.0)
    }

    /// Appends one row/column to the factored matrix. `cross` holds the new
    /// off-diagonal entries and `diag` the new diagonal entry (jitter is
    /// added automatically). Returns `false` when the extension is not
    /// positive definite; the factor is then left unchanged.
    pub fn push(&mut self, cross: &[S], diag: S) -> bool {
        let n = self.dim();
        debug_assert_eq!(cross.len(), n);
        let a = self.solve_lower(cross);
        let schur = diag + self.jitter - crate::scalar::dot(&a, &a);
        if !(schur > S::zero()) || !schur.is_finite() {
            return false;
        }
        let mut l = Matrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..=i {
                l[(i, j)] = self.l[(i, j)];
            }
        }
        for (j, &v) in a.iter().enumerate() {
            l[(n, j)] = v;
        }
        l[(n, n)] = schur.sqrt();
        self.l = l;
        true
    }
}

/// Ratio of the largest to smallest diagonal pivot magnitude of a symmetric
/// matrix after Gershgorin-style bounding; a cheap order-of-magnitude proxy.
pub fn condition_estimate<S: Scalar>(a: &Matrix<S>) -> f64 {
    let n = a.rows();
    if n == 0 {
        return 1.0;
    }
    let mut hi = 0.0f64;
    let mut lo = f64::INFINITY;
    for i in 0..n {
        let d = a[(i, i)].to_f64_lossy();
        let off: f64 = (0..n)
            .filter(|&j| j != i)
            .map(|j| a[(i, j)].to_f64_lossy().abs())
            .sum();
        hi = hi.max(d + off);
        lo = lo.min(d - off);
    }
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}
