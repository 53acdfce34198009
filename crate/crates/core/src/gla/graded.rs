//! Graded vector spaces, homogeneous maps and the Koszul sign rule.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::linalg::{SparseMatrix, SparseVec};
use super::scalar::{self, Scalar};
use crate::error::{Error, Result};

/// Things that form a vector space over [`Scalar`]; used by the series
/// containers to stay agnostic of what they hold.
pub trait Linear: Clone + PartialEq + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, c: &Scalar) -> Self;
    fn is_zero(&self) -> bool;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-scalar::one()))
    }
}

impl Linear for Scalar {
    fn zero_like(&self) -> Self {
        Scalar::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, c: &Scalar) -> Self {
        self * c
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Linear for SparseVec {
    fn zero_like(&self) -> Self {
        SparseVec::new()
    }
    fn add(&self, other: &Self) -> Self {
        SparseVec::add(self, other)
    }
    fn scale(&self, c: &Scalar) -> Self {
        SparseVec::scale(self, c)
    }
    fn is_zero(&self) -> bool {
        SparseVec::is_zero(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub label: String,
    pub degree: i32,
}

/// Finite graded basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    basis: Vec<BasisElement>,
    index: BTreeMap<String, usize>,
}

impl GradedSpace {
    pub fn new(basis: Vec<BasisElement>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, b) in basis.iter().enumerate() {
            if index.insert(b.label.clone(), i).is_some() {
                return Err(Error::Schema {
                    location: "basis".into(),
                    message: format!("duplicate label `{}`", b.label),
                });
            }
        }
        Ok(Self { basis, index })
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, i32)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(l, d)| BasisElement {
                    label: l.into(),
                    degree: d,
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.basis[i].degree
    }

    pub fn parity(&self, i: usize) -> i32 {
        self.basis[i].degree.rem_euclid(2)
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i].label
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Basis positions of degree `d`, in basis order.
    pub fn indices_in_degree(&self, d: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degree(i) == d).collect()
    }

    /// Distinct degrees, ascending.
    pub fn degrees(&self) -> Vec<i32> {
        let mut ds: Vec<i32> = self.basis.iter().map(|b| b.degree).collect();
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    pub fn min_degree(&self) -> i32 {
        self.basis.iter().map(|b| b.degree).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> i32 {
        self.basis.iter().map(|b| b.degree).max().unwrap_or(0)
    }

    /// `max_degree - min_degree`
    pub fn degree_span(&self) -> i32 {
        self.max_degree() - self.min_degree()
    }

    /// True if every nonzero entry of `v` has degree `d`.
    pub fn is_homogeneous(&self, v: &SparseVec, d: i32) -> bool {
        v.iter().all(|(i, _)| self.degree(i) == d)
    }

    /// Human-readable rendering of a vector, e.g. `2*e1e3 - e2`.
    pub fn render(&self, v: &SparseVec) -> String {
        if v.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (i, x)) in v.iter().enumerate() {
            let neg = scalar::is_negative(x);
            let abs = if neg { -x.clone() } else { x.clone() };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if abs != scalar::one() {
                out.push_str(&scalar::format(&abs));
                out.push('*');
            }
            out.push_str(self.label(i));
        }
        out
    }
}

/// Koszul sign of reordering graded elements.
///
/// `permutation[k]` is the original position of the element placed at
/// position `k`. Returns `(-1)^e` where `e` sums `deg(x) * deg(y)` over all
/// pairs whose relative order is inverted.
pub fn koszul_sign(permutation: &[usize], degrees: &[i32]) -> Result<Scalar> {
    if permutation.len() != degrees.len() {
        return Err(Error::LengthMismatch {
            expected: degrees.len(),
            got: permutation.len(),
        });
    }
    let mut seen = vec![false; degrees.len()];
    for &p in permutation {
        if p >= degrees.len() || seen[p] {
            return Err(Error::InvalidPermutation(permutation.to_vec()));
        }
        seen[p] = true;
    }
    let mut e: i64 = 0;
    for k in 0..permutation.len() {
        for l in (k + 1)..permutation.len() {
            if permutation[k] > permutation[l] {
                e += i64::from(degrees[permutation[k]]) * i64::from(degrees[permutation[l]]);
            }
        }
    }
    Ok(scalar::sign(e))
}

/// Degree-homogeneous linear map between graded spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedMap {
    source: Arc<GradedSpace>,
    target: Arc<GradedSpace>,
    degree: i32,
    matrix: SparseMatrix,
}

fn same_space(a: &Arc<GradedSpace>, b: &Arc<GradedSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl GradedMap {
    /// Checks that every nonzero entry connects basis elements whose degrees
    /// differ by exactly `degree`.
    pub fn new(
        source: Arc<GradedSpace>,
        target: Arc<GradedSpace>,
        degree: i32,
        matrix: SparseMatrix,
    ) -> Result<Self> {
        if matrix.nrows() != target.dim() || matrix.ncols() != source.dim() {
            return Err(Error::DimensionMismatch(format!(
                "matrix {}x{} for map {} -> {}",
                matrix.nrows(),
                matrix.ncols(),
                source.dim(),
                target.dim()
            )));
        }
        if let Some((row, col, _)) = matrix
            .triplets()
            .find(|&(r, c, _)| target.degree(r) != source.degree(c) + degree)
        {
            return Err(Error::NotHomogeneous { degree, row, col });
        }
        Ok(Self {
            source,
            target,
            degree,
            matrix,
        })
    }

    pub fn zero(source: Arc<GradedSpace>, target: Arc<GradedSpace>, degree: i32) -> Self {
        let m = SparseMatrix::zeros(target.dim(), source.dim());
        Self {
            source,
            target,
            degree,
            matrix: m,
        }
    }

    pub fn identity(space: Arc<GradedSpace>) -> Self {
        let m = SparseMatrix::identity(space.dim());
        Self {
            source: space.clone(),
            target: space,
            degree: 0,
            matrix: m,
        }
    }

    pub fn source(&self) -> &Arc<GradedSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GradedSpace> {
        &self.target
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// `self ∘ other`; degrees add.
    pub fn compose(&self, other: &GradedMap) -> Result<GradedMap> {
        if !same_space(&other.target, &self.source) {
            return Err(Error::DimensionMismatch(
                "composition of maps with mismatched spaces".into(),
            ));
        }
        let out = GradedMap {
            source: other.source.clone(),
            target: self.target.clone(),
            degree: self.degree + other.degree,
            matrix: self.matrix.mul(&other.matrix)?,
        };
        debug_assert!(out.check_homogeneous());
        Ok(out)
    }

    fn check_homogeneous(&self) -> bool {
        self.matrix
            .triplets()
            .all(|(r, c, _)| self.target.degree(r) == self.source.degree(c) + self.degree)
    }

    fn check_compatible(&self, other: &GradedMap) -> Result<()> {
        if !same_space(&self.source, &other.source) || !same_space(&self.target, &other.target) {
            return Err(Error::DimensionMismatch("maps between different spaces".into()));
        }
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::DegreeInconsistency(format!(
                "adding maps of degree {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &GradedMap) -> Result<GradedMap> {
        self.check_compatible(other)?;
        let degree = if self.is_zero() { other.degree } else { self.degree };
        Ok(GradedMap {
            source: self.source.clone(),
            target: self.target.clone(),
            degree,
            matrix: self.matrix.add(&other.matrix)?,
        })
    }

    pub fn try_sub(&self, other: &GradedMap) -> Result<GradedMap> {
        self.try_add(&other.scale(&-scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> GradedMap {
        GradedMap {
            matrix: self.matrix.scale(c),
            ..self.clone()
        }
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        self.matrix.apply(v)
    }

    /// Graded commutator `[self, other] = self∘other - (-1)^{|self||other|} other∘self`.
    pub fn commutator(&self, other: &GradedMap) -> Result<GradedMap> {
        let ab = self.compose(other)?;
        let ba = other.compose(self)?;
        let s = scalar::sign(i64::from(self.degree) * i64::from(other.degree));
        ab.try_sub(&ba.scale(&s))
    }
}

impl Linear for GradedMap {
    fn zero_like(&self) -> Self {
        GradedMap::zero(self.source.clone(), self.target.clone(), self.degree)
    }
    fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("adding incompatible graded maps")
    }
    fn scale(&self, c: &Scalar) -> Self {
        GradedMap::scale(self, c)
    }
    fn is_zero(&self) -> bool {
        GradedMap::is_zero(self)
    }
}
