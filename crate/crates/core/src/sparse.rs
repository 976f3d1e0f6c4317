//! Compressed sparse row matrices and a direct solver backed by faer.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};

/// Residual level below which a solve is not refined.
const REFINE_BELOW: f64 = 1e-14;
/// Cap on extra-precise refinement sweeps.
const MAX_PRECISE_STEPS: usize = 8;

/// Row-compressed sparse matrix with sorted, duplicate-free columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Accumulates `(row, col, value)` entries; duplicates are summed.
#[derive(Debug, Clone, Default)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.nrows && j < self.ncols);
        if v != 0.0 {
            self.entries.push((i, j, v));
        }
    }

    /// Adds `block` with its origin at `(r0, c0)`.
    pub fn push_block(&mut self, r0: usize, c0: usize, block: &SparseMatrix) {
        for (i, j, v) in block.iter() {
            self.push(r0 + i, c0 + j, v);
        }
    }

    pub fn build(mut self) -> SparseMatrix {
        self.entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; self.nrows + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last = None;
        for (i, j, v) in self.entries {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        }
    }
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        TripletBuilder::new(nrows, ncols).build()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (i, self.col_idx[p], self.values[p]))
        })
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (self.col_idx[p], self.values[p]))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let cols = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        cols.binary_search(&j)
            .map(|p| self.values[self.row_ptr[i] + p])
            .unwrap_or(0.0)
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut b = TripletBuilder::new(self.ncols, self.nrows);
        b.entries = self.iter().map(|(i, j, v)| (j, i, v)).collect();
        b.build()
    }

    pub fn scaled(&self, s: f64) -> SparseMatrix {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= s);
        m
    }

    /// `self + other`; shapes must agree.
    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut b = TripletBuilder::new(self.nrows, self.ncols);
        b.entries = self.iter().chain(other.iter()).collect();
        b.build()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// `yᵀ A x`.
    pub fn bilinear(&self, y: &[f64], x: &[f64]) -> f64 {
        y.iter().zip(self.mul_vec(x)).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest entrywise difference `max |A_ij - B_ij|`.
    pub fn max_abs_diff(&self, other: &SparseMatrix) -> f64 {
        self.add(&other.scaled(-1.0)).max_abs()
    }

    /// `self · other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut b = TripletBuilder::new(self.nrows, other.ncols);
        let mut acc = vec![0.0; other.ncols];
        let mut touched = Vec::new();
        for i in 0..self.nrows {
            for (k, a) in self.row(i) {
                for (j, v) in other.row(k) {
                    if acc[j] == 0.0 {
                        touched.push(j);
                    }
                    acc[j] += a * v;
                }
            }
            for j in touched.drain(..) {
                b.push(i, j, acc[j]);
                acc[j] = 0.0;
            }
        }
        b.build()
    }

    /// Inverse of a square matrix whose connected blocks have at most
    /// `max_block` rows, computed block by block.
    pub fn block_inverse(&self, max_block: usize) -> Result<SparseMatrix> {
        if self.nrows != self.ncols {
            return Err(Error::Solver(format!("matrix is {}x{}, expected square", self.nrows, self.ncols)));
        }
        let n = self.nrows;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for (i, j, _) in self.iter() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..n {
            let r = find(&mut parent, i);
            blocks.entry(r).or_default().push(i);
        }
        let mut out = TripletBuilder::new(n, n);
        for idx in blocks.values() {
            let m = idx.len();
            if m > max_block {
                return Err(Error::Solver(format!("block of size {m} exceeds {max_block}")));
            }
            let local = nalgebra::DMatrix::from_fn(m, m, |a, b| self.get(idx[a], idx[b]));
            let inv = local
                .try_inverse()
                .ok_or_else(|| Error::Solver(format!("singular diagonal block at row {}", idx[0])))?;
            for a in 0..m {
                for b in 0..m {
                    out.push(idx[a], idx[b], inv[(a, b)]);
                }
            }
        }
        Ok(out.build())
    }

    /// Rows and columns selected by the masks, renumbered densely.
    pub fn select(&self, rows: &[Option<usize>], cols: &[Option<usize>], nr: usize, nc: usize) -> SparseMatrix {
        let mut b = TripletBuilder::new(nr, nc);
        for (i, j, v) in self.iter() {
            if let (Some(r), Some(c)) = (rows[i], cols[j]) {
                b.push(r, c, v);
            }
        }
        b.build()
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let trip: Vec<Triplet<usize, usize, f64>> =
            self.iter().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &trip)
            .map_err(|e| Error::Solver(format!("matrix construction failed: {e:?}")))
    }
}

/// Sparse LU factorization with partial pivoting; factor once, solve many.
pub struct SparseLu {
    n: usize,
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    matrix: SparseMatrix,
    row_norm: f64,
}

impl std::fmt::Debug for SparseLu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseLu").field("n", &self.n).finish()
    }
}

impl SparseLu {
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        if a.nrows != a.ncols {
            return Err(Error::Solver(format!(
                "matrix is {}x{}, expected square",
                a.nrows, a.ncols
            )));
        }
        let lu = a
            .to_faer()?
            .sp_lu()
            .map_err(|e| Error::Solver(format!("LU factorization failed: {e:?}")))?;
        let row_norm = (0..a.nrows)
            .map(|i| a.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        Ok(Self {
            n: a.nrows,
            lu,
            matrix: a.clone(),
            row_norm,
        })
    }

    /// Solves `A x = b` and checks the relative residual against `tol`.
    pub fn solve(&self, b: &[f64], tol: f64) -> Result<Vec<f64>> {
        assert_eq!(b.len(), self.n);
        let mut rhs = Mat::<f64>::from_fn(self.n, 1, |i, _| b[i]);
        self.lu.solve_in_place(rhs.as_mut());
        let mut x: Vec<f64> = (0..self.n).map(|i| rhs[(i, 0)]).collect();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Solver("solution contains non-finite values (singular system?)".into()));
        }
        // one step of iterative refinement unless already at round-off
        let r = self.residual(&x, b);
        if self.scaled_residual(&r, &x, b) <= REFINE_BELOW {
            return Ok(x);
        }
        let mut corr = Mat::<f64>::from_fn(self.n, 1, |i, _| r[i]);
        self.lu.solve_in_place(corr.as_mut());
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += corr[(i, 0)];
        }
        let rel = self.relative_residual(&x, b);
        if !(rel <= tol) {
            return Err(Error::Solver(format!(
                "relative residual {rel:.3e} exceeds tolerance {tol:.1e}"
            )));
        }
        Ok(x)
    }

    /// Like [`solve`](Self::solve), but refines with residuals accumulated in
    /// double-double arithmetic until the correction stalls. Components that
    /// are small next to the rest of the solution come out accurate relative
    /// to their own size rather than to `‖x‖`.
    pub fn solve_precise(&self, b: &[f64], tol: f64) -> Result<Vec<f64>> {
        let mut x = self.solve(b, tol)?;
        let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let mut last = f64::INFINITY;
        for _ in 0..MAX_PRECISE_STEPS {
            let r = self.precise_residual(&x, b);
            let mut corr = Mat::<f64>::from_fn(self.n, 1, |i, _| r[i]);
            self.lu.solve_in_place(corr.as_mut());
            let c: Vec<f64> = (0..self.n).map(|i| corr[(i, 0)]).collect();
            let size = inf(&c);
            if !size.is_finite() || size >= 0.5 * last {
                break;
            }
            for (xi, ci) in x.iter_mut().zip(&c) {
                *xi += ci;
            }
            last = size;
            if size <= f64::EPSILON * inf(&x) * 1e-3 {
                break;
            }
        }
        let rel = self.relative_residual(&x, b);
        if !(rel <= tol) {
            return Err(Error::Solver(format!(
                "relative residual {rel:.3e} exceeds tolerance {tol:.1e}"
            )));
        }
        Ok(x)
    }

    /// `b - A x` with every row summed in double-double arithmetic.
    fn precise_residual(&self, x: &[f64], b: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let (mut hi, mut lo) = (b[i], 0.0);
                for (j, a) in self.matrix.row(i) {
                    let p = -a * x[j];
                    let pe = (-a).mul_add(x[j], -p);
                    let s = hi + p;
                    let bb = s - hi;
                    let e = (hi - (s - bb)) + (p - bb);
                    hi = s;
                    lo += e + pe;
                }
                hi + lo
            })
            .collect()
    }

    fn residual(&self, x: &[f64], b: &[f64]) -> Vec<f64> {
        let ax = self.matrix.mul_vec(x);
        b.iter().zip(ax).map(|(bi, ai)| bi - ai).collect()
    }

    /// `‖b - A x‖ / (‖A‖‖x‖ + ‖b‖)` in the max norm.
    pub fn relative_residual(&self, x: &[f64], b: &[f64]) -> f64 {
        self.scaled_residual(&self.residual(x, b), x, b)
    }

    fn scaled_residual(&self, r: &[f64], x: &[f64], b: &[f64]) -> f64 {
        let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let denom = self.row_norm * inf(x) + inf(b);
        if denom == 0.0 {
            0.0
        } else {
            inf(r) / denom
        }
    }
}
