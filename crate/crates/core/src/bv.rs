//! Commutative BV∞ algebras: product, operator family Δ₀ = d, Δ₁, …, Δ_K,
//! and their validators.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gla::scalar::{self, Scalar};
use crate::gla::{GradedMap, GradedSpace, HbarSeries, SparseMatrix, SparseVec};
use crate::report::{Check, CheckList};

#[derive(Clone, Debug, PartialEq)]
pub struct BvAlgebra {
    space: Arc<GradedSpace>,
    unit: usize,
    /// Products of basis elements, absent when zero.
    mult: BTreeMap<(usize, usize), SparseVec>,
    deltas: Vec<GradedMap>,
    trace: Option<SparseVec>,
}

impl BvAlgebra {
    /// `mult` lists structure constants `e_i · e_j = Σ c e_k` as `(i, j, k, c)`.
    /// `deltas[k]` must have degree `1 - 2k`.
    pub fn new(
        space: Arc<GradedSpace>,
        unit: usize,
        mult: impl IntoIterator<Item = (usize, usize, usize, Scalar)>,
        deltas: Vec<GradedMap>,
        trace: Option<SparseVec>,
    ) -> Result<Self> {
        let n = space.dim();
        if unit >= n {
            return Err(Error::DimensionMismatch(format!("unit index {unit} out of range")));
        }
        let mut table: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
        for (i, j, k, c) in mult {
            if i >= n || j >= n || k >= n {
                return Err(Error::DimensionMismatch(format!(
                    "product entry ({i}, {j}, {k}) out of range"
                )));
            }
            if space.degree(k) != space.degree(i) + space.degree(j) {
                return Err(Error::DegreeInconsistency(format!(
                    "{} * {} -> {} does not add degrees",
                    space.label(i),
                    space.label(j),
                    space.label(k)
                )));
            }
            table.entry((i, j)).or_default().add_at(k, &c);
        }
        table.retain(|_, v| !v.is_zero());
        if deltas.is_empty() {
            return Err(Error::DimensionMismatch("operator family needs d".into()));
        }
        for (k, dk) in deltas.iter().enumerate() {
            if dk.source().as_ref() != space.as_ref() || dk.target().as_ref() != space.as_ref() {
                return Err(Error::DimensionMismatch(format!("delta {k} acts on another space")));
            }
        }
        if let Some(t) = &trace {
            if t.max_index().is_some_and(|m| m >= n) {
                return Err(Error::DimensionMismatch("trace vector too long".into()));
            }
        }
        let mut deltas = deltas;
        while deltas.len() > 1 && deltas.last().is_some_and(GradedMap::is_zero) {
            deltas.pop();
        }
        Ok(Self {
            space,
            unit,
            mult: table,
            deltas,
            trace,
        })
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn unit_vector(&self) -> SparseVec {
        SparseVec::basis(self.unit)
    }

    pub fn trace(&self) -> Option<&SparseVec> {
        self.trace.as_ref()
    }

    pub fn with_trace(&self, trace: Option<SparseVec>) -> Self {
        Self {
            trace,
            ..self.clone()
        }
    }

    /// Replaces the operator family (used by perturbers and generators).
    pub fn with_deltas(&self, deltas: Vec<GradedMap>) -> Result<Self> {
        Self::new(
            self.space.clone(),
            self.unit,
            self.mult_entries(),
            deltas,
            self.trace.clone(),
        )
    }

    /// Structure constants as `(i, j, k, c)`, sorted.
    pub fn mult_entries(&self) -> Vec<(usize, usize, usize, Scalar)> {
        self.mult
            .iter()
            .flat_map(|(&(i, j), v)| v.iter().map(move |(k, c)| (i, j, k, c.clone())))
            .collect()
    }

    /// Highest index K with Δ_K ≠ 0 (0 when only d is present).
    pub fn k_max(&self) -> usize {
        self.deltas.len() - 1
    }

    pub fn deltas(&self) -> &[GradedMap] {
        &self.deltas
    }

    /// Δ_k, zero for k > K.
    pub fn delta(&self, k: usize) -> GradedMap {
        self.deltas.get(k).cloned().unwrap_or_else(|| {
            GradedMap::zero(self.space.clone(), self.space.clone(), 1 - 2 * k as i32)
        })
    }

    pub fn d(&self) -> &GradedMap {
        &self.deltas[0]
    }

    pub fn basis_product(&self, i: usize, j: usize) -> SparseVec {
        self.mult.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn multiply(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, x) in a.iter() {
            for (j, y) in b.iter() {
                if let Some(p) = self.mult.get(&(i, j)) {
                    out.axpy(&(x * y), p);
                }
            }
        }
        out
    }

    /// Left multiplication by a basis element.
    pub fn left_mult(&self, i: usize) -> GradedMap {
        let n = self.dim();
        let cols: Vec<SparseVec> = (0..n).map(|j| self.basis_product(i, j)).collect();
        GradedMap::new(
            self.space.clone(),
            self.space.clone(),
            self.space.degree(i),
            SparseMatrix::from_columns(n, &cols),
        )
        .expect("products respect degrees")
    }

    /// Tr(a), zero when no trace is attached.
    pub fn tr(&self, a: &SparseVec) -> Scalar {
        self.trace.as_ref().map_or_else(scalar::zero, |t| t.dot(a))
    }

    /// Degree in which the trace is supported, if it is supported in one.
    pub fn trace_degree(&self) -> Option<i32> {
        let t = self.trace.as_ref()?;
        let mut degs = t.iter().map(|(i, _)| self.space.degree(i));
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    pub fn render(&self, v: &SparseVec) -> String {
        self.space.render(v)
    }
}

/// Unitality, graded commutativity and associativity on all basis tuples.
pub fn validate_algebra(a: &BvAlgebra) -> CheckList {
    let sp = a.space();
    let n = a.dim();
    let mut unit = Check::new("unit");
    for j in 0..n {
        let e = SparseVec::basis(j);
        unit.expect(a.basis_product(a.unit(), j) == e, || {
            format!("1 * {} != {}", sp.label(j), sp.label(j))
        });
        unit.expect(a.basis_product(j, a.unit()) == e, || {
            format!("{} * 1 != {}", sp.label(j), sp.label(j))
        });
    }
    let mut comm = Check::new("commutativity");
    for i in 0..n {
        for j in i..n {
            let s = scalar::sign(i64::from(sp.degree(i)) * i64::from(sp.degree(j)));
            comm.expect(a.basis_product(i, j) == a.basis_product(j, i).scale(&s), || {
                format!("({}, {})", sp.label(i), sp.label(j))
            });
        }
    }
    let mut assoc = Check::new("associativity");
    for i in 0..n {
        for j in 0..n {
            let ij = a.basis_product(i, j);
            for k in 0..n {
                let left = a.multiply(&ij, &SparseVec::basis(k));
                let right = a.multiply(&SparseVec::basis(i), &a.basis_product(j, k));
                assoc.expect(left == right, || {
                    format!("({}, {}, {})", sp.label(i), sp.label(j), sp.label(k))
                });
            }
        }
    }
    let mut out = CheckList::default();
    out.push(unit);
    out.push(comm);
    out.push(assoc);
    out
}

/// Whether `D` has order at most `r`: every (r+1)-fold iterated graded
/// commutator with left multiplications vanishes.
///
/// Commutators with left multiplications graded-commute with each other in a
/// graded commutative algebra, so only non-decreasing index tuples are
/// enumerated.
pub fn operator_order(a: &BvAlgebra, dop: &GradedMap, r: i64) -> Result<bool> {
    if r < 0 {
        return Err(Error::NegativeOrder(r));
    }
    let mults: Vec<GradedMap> = (0..a.dim()).map(|i| a.left_mult(i)).collect();
    let mut level: Vec<(usize, GradedMap)> = vec![(0, dop.clone())];
    for _ in 0..=r {
        let mut next = Vec::new();
        for (start, x) in &level {
            for (i, l) in mults.iter().enumerate().skip(*start) {
                let c = x.commutator(l)?;
                if !c.is_zero() {
                    next.push((i, c));
                }
            }
        }
        if next.is_empty() {
            return Ok(true);
        }
        level = next;
    }
    Ok(false)
}

/// Σ_{i=0}^{k} Δ_i Δ_{k-i}.
pub fn relation(a: &BvAlgebra, k: usize) -> Result<GradedMap> {
    let mut acc = GradedMap::zero(a.space().clone(), a.space().clone(), 2 - 2 * k as i32);
    for i in 0..=k {
        let (x, y) = (a.delta(i), a.delta(k - i));
        if x.is_zero() || y.is_zero() {
            continue;
        }
        acc = acc.try_add(&x.compose(&y)?)?;
    }
    Ok(acc)
}

/// Default depth for [`validate_bv`]: 2K covers every relation with a
/// nonzero term.
pub fn default_k_check(a: &BvAlgebra) -> usize {
    2 * a.k_max()
}

/// Degree, unit, order and relation checks for every k ≤ `k_check`.
pub fn validate_bv(a: &BvAlgebra, k_check: usize) -> Result<CheckList> {
    let mut out = CheckList::default();
    let sp = a.space();
    for k in 0..=k_check {
        let dk = a.delta(k);
        let mut deg = Check::new(format!("degree[{k}]"));
        deg.expect(dk.degree() == 1 - 2 * k as i32, || {
            format!("delta {k} has degree {}", dk.degree())
        });
        out.push(deg);

        let mut unit = Check::new(format!("unit[{k}]"));
        let du = dk.apply(&a.unit_vector());
        unit.expect(du.is_zero(), || format!("delta {k}(1) = {}", sp.render(&du)));
        out.push(unit);

        let mut order = Check::new(format!("order[{k}]"));
        order.expect(operator_order(a, &dk, k as i64 + 1)?, || {
            format!("delta {k} has order > {}", k + 1)
        });
        out.push(order);

        let mut rel = Check::new(format!("relation[{k}]"));
        let r = relation(a, k)?;
        for (row, col, x) in r.matrix().triplets() {
            rel.violation(format!(
                "coefficient {} of {} in image of {}",
                scalar::format(x),
                sp.label(row),
                sp.label(col)
            ));
        }
        out.push(rel);
    }
    Ok(out)
}

/// Δ = Σ ħ^k Δ_k truncated at ħ^M; exact once M ≥ K.
pub fn delta_total(a: &BvAlgebra, m: usize) -> HbarSeries<GradedMap> {
    let coeffs = (0..=m).map(|k| a.delta(k)).collect();
    HbarSeries::new(coeffs, m >= a.k_max())
}

/// Flattened operator Σ_k Δ_k: acts on the A-components of a homogeneous
/// element of A((ħ)) with one fixed total degree.
pub fn delta_flat(a: &BvAlgebra) -> SparseMatrix {
    let mut m = SparseMatrix::zeros(a.dim(), a.dim());
    for dk in a.deltas() {
        m = m.add(dk.matrix()).expect("same shape");
    }
    m
}
