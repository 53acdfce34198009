//! Sparse exact linear algebra over the rationals.
//!
//! Vectors and matrices store only nonzero entries, so structural equality is
//! mathematical equality. Elimination uses a deterministic pivot rule: within
//! each column the first row (in basis order) holding a nonzero entry is
//! chosen. Every derived basis (kernels, images) is therefore reproducible.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::scalar::{self, Scalar};
use crate::error::{Error, Result};

/// Sparse vector indexed by basis position.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseVec {
    entries: BTreeMap<usize, Scalar>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis(i: usize) -> Self {
        let mut v = Self::new();
        v.entries.insert(i, Scalar::one());
        v
    }

    pub fn from_entries<I: IntoIterator<Item = (usize, Scalar)>>(it: I) -> Self {
        let mut v = Self::new();
        for (i, x) in it {
            v.add_at(i, &x);
        }
        v
    }

    pub fn from_dense(xs: &[Scalar]) -> Self {
        Self::from_entries(xs.iter().cloned().enumerate())
    }

    pub fn to_dense(&self, len: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); len];
        for (&i, x) in &self.entries {
            out[i] = x.clone();
        }
        out
    }

    pub fn get(&self, i: usize) -> Scalar {
        self.entries.get(&i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.entries.iter().map(|(&i, x)| (i, x))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Position of the last nonzero entry.
    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    pub fn add_at(&mut self, i: usize, x: &Scalar) {
        if x.is_zero() {
            return;
        }
        let slot = self.entries.entry(i).or_insert_with(Scalar::zero);
        *slot += x;
        if slot.is_zero() {
            self.entries.remove(&i);
        }
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: &Scalar, other: &SparseVec) {
        if c.is_zero() {
            return;
        }
        for (i, x) in other.iter() {
            self.add_at(i, &(c * x));
        }
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.axpy(&Scalar::one(), other);
        out
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.axpy(&-Scalar::one(), other);
        out
    }

    pub fn scale(&self, c: &Scalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(&i, x)| (i, x * c)).collect(),
        }
    }

    pub fn neg(&self) -> SparseVec {
        self.scale(&-Scalar::one())
    }

    pub fn dot(&self, other: &SparseVec) -> Scalar {
        let mut acc = Scalar::zero();
        for (i, x) in self.iter() {
            if let Some(y) = other.entries.get(&i) {
                acc += x * y;
            }
        }
        acc
    }

    /// Keeps only entries for which `keep(index)` holds.
    pub fn filter(&self, mut keep: impl FnMut(usize) -> bool) -> SparseVec {
        SparseVec {
            entries: self
                .entries
                .iter()
                .filter(|(&i, _)| keep(i))
                .map(|(&i, x)| (i, x.clone()))
                .collect(),
        }
    }
}

/// Row-major sparse matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            rows: vec![SparseVec::new(); nrows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i] = SparseVec::basis(i);
        }
        m
    }

    pub fn from_triplets<I>(nrows: usize, ncols: usize, it: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Scalar)>,
    {
        let mut m = Self::zeros(nrows, ncols);
        for (r, c, x) in it {
            if r >= nrows || c >= ncols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({r}, {c}) outside {nrows}x{ncols}"
                )));
            }
            m.rows[r].add_at(c, &x);
        }
        Ok(m)
    }

    /// Builds a matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(nrows: usize, cols: &[SparseVec]) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter() {
                m.rows[i].add_at(j, x);
            }
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Scalar>], ncols: usize) -> Self {
        Self {
            nrows: rows.len(),
            ncols,
            rows: rows.iter().map(|r| SparseVec::from_dense(r)).collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        self.rows.iter().map(|r| r.to_dense(self.ncols)).collect()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.rows[i]
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.rows[r].get(c)
    }

    pub fn add_entry(&mut self, r: usize, c: usize, x: &Scalar) {
        self.rows[r].add_at(c, x);
    }

    pub fn set(&mut self, r: usize, c: usize, x: Scalar) {
        let cur = self.rows[r].get(c);
        self.rows[r].add_at(c, &(x - cur));
    }

    /// Nonzero entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, x)| (r, c, x)))
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(SparseVec::nnz).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(SparseVec::is_zero)
    }

    pub fn column(&self, c: usize) -> SparseVec {
        SparseVec::from_entries(
            self.rows
                .iter()
                .enumerate()
                .map(|(r, row)| (r, row.get(c))),
        )
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t = Self::zeros(self.ncols, self.nrows);
        for (r, c, x) in self.triplets() {
            t.rows[c].add_at(r, x);
        }
        t
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut out = Self::zeros(self.nrows, other.ncols);
        for (r, row) in self.rows.iter().enumerate() {
            let mut acc = SparseVec::new();
            for (k, a) in row.iter() {
                acc.axpy(a, &other.rows[k]);
            }
            out.rows[r] = acc;
        }
        Ok(out)
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        SparseVec::from_entries(
            self.rows
                .iter()
                .enumerate()
                .map(|(r, row)| (r, row.dot(v))),
        )
    }

    fn check_same_shape(&self, other: &SparseMatrix) -> Result<()> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.check_same_shape(other)?;
        Ok(Self {
            nrows: self.nrows,
            ncols: self.ncols,
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.check_same_shape(other)?;
        Ok(Self {
            nrows: self.nrows,
            ncols: self.ncols,
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    pub fn scale(&self, c: &Scalar) -> SparseMatrix {
        Self {
            nrows: self.nrows,
            ncols: self.ncols,
            rows: self.rows.iter().map(|r| r.scale(c)).collect(),
        }
    }

    pub fn neg(&self) -> SparseMatrix {
        self.scale(&-Scalar::one())
    }

    /// Submatrix on the given row and column positions (in the given order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let col_pos: BTreeMap<usize, usize> =
            cols.iter().enumerate().map(|(j, &c)| (c, j)).collect();
        let mut out = Self::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (c, x) in self.rows[r].iter() {
                if let Some(&j) = col_pos.get(&c) {
                    out.rows[i].add_at(j, x);
                }
            }
        }
        out
    }
}

/// Result of Gauss–Jordan elimination on a dense copy.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// Reduced row echelon form; rows below `pivots.len()` are zero.
    pub rref: Vec<Vec<Scalar>>,
    /// Pivot column of each nonzero row, increasing.
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

/// Gauss–Jordan elimination with the first-nonzero pivot rule.
pub fn echelon(m: &SparseMatrix) -> Echelon {
    let mut a = m.to_dense();
    let nrows = m.nrows();
    let ncols = m.ncols();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..nrows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..ncols {
                    if !a[r][j].is_zero() {
                        let t = &f * &a[r][j];
                        a[i][j] -= t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Echelon { rref: a, pivots, ncols }
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Kernel basis: one vector per free column, with a 1 in that column.
    pub fn kernel(&self) -> Vec<SparseVec> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = SparseVec::basis(f);
                for (row, &p) in self.pivots.iter().enumerate() {
                    v.add_at(p, &-self.rref[row][f].clone());
                }
                v
            })
            .collect()
    }
}

pub fn rank(m: &SparseMatrix) -> usize {
    echelon(m).rank()
}

/// Kernel and image bases of `m`.
///
/// The image basis consists of the pivot columns of `m` itself.
pub fn kernel_image(m: &SparseMatrix) -> (Vec<SparseVec>, Vec<SparseVec>) {
    let e = echelon(m);
    let image = e.pivots.iter().map(|&c| m.column(c)).collect();
    (e.kernel(), image)
}

/// Outcome of [`solve_linear`].
#[derive(Clone, Debug, PartialEq)]
pub enum Solution {
    /// A particular solution (free variables set to zero) and a kernel basis.
    Solved {
        x: SparseVec,
        kernel: Vec<SparseVec>,
    },
    NoSolution,
}

/// Solves `m x = b` exactly.
pub fn solve_linear(m: &SparseMatrix, b: &SparseVec) -> Result<Solution> {
    if let Some(i) = b.max_index() {
        if i >= m.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "target index {i} outside {} rows",
                m.nrows()
            )));
        }
    }
    let n = m.ncols();
    let mut aug = m.clone();
    aug.ncols = n + 1;
    for (i, x) in b.iter() {
        aug.rows[i].add_at(n, x);
    }
    let e = echelon(&aug);
    if e.pivots.last() == Some(&n) {
        return Ok(Solution::NoSolution);
    }
    let mut x = SparseVec::new();
    for (row, &p) in e.pivots.iter().enumerate() {
        x.add_at(p, &e.rref[row][n]);
    }
    let kernel = echelon(m).kernel();
    Ok(Solution::Solved { x, kernel })
}

/// Exact inverse of a square matrix.
pub fn inverse(m: &SparseMatrix) -> Result<SparseMatrix> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "inverse of non-square {}x{}",
            n,
            m.ncols()
        )));
    }
    let mut aug = SparseMatrix::zeros(n, 2 * n);
    for (r, c, x) in m.triplets() {
        aug.rows[r].add_at(c, x);
    }
    for i in 0..n {
        aug.rows[i].add_at(n + i, &Scalar::one());
    }
    let e = echelon(&aug);
    if e.pivots.len() < n || e.pivots[n - 1] >= n {
        return Err(Error::Singular);
    }
    let rows: Vec<Vec<Scalar>> = e.rref.iter().map(|r| r[n..].to_vec()).collect();
    Ok(SparseMatrix::from_dense(&rows, n))
}

/// Determinant by exact Gaussian elimination.
pub fn determinant(m: &SparseMatrix) -> Result<Scalar> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch("determinant of non-square matrix".into()));
    }
    let mut a = m.to_dense();
    let mut det = Scalar::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Ok(Scalar::zero());
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        let inv = a[c][c].recip();
        for i in (c + 1)..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] * &inv;
                for j in c..n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    Ok(det)
}

/// Sylvester's criterion on a symmetric matrix.
pub fn is_positive_definite(m: &SparseMatrix) -> Result<bool> {
    if m != &m.transpose() {
        return Ok(false);
    }
    for k in 1..=m.nrows() {
        let idx: Vec<usize> = (0..k).collect();
        if determinant(&m.select(&idx, &idx))? <= scalar::zero() {
            return Ok(false);
        }
    }
    Ok(true)
}
