//! Cohomology of (A, d) through harmonic representatives, and special
//! homotopy retracts (ι, p, h) built from an inner product.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bv::BvAlgebra;
use crate::error::{Error, Result};
use crate::gla::linalg::{echelon, inverse, is_positive_definite};
use crate::gla::scalar::{self, Scalar};
use crate::gla::{GradedMap, GradedSpace, SparseMatrix, SparseVec};
use crate::report::{Check, CheckList};

/// Symmetric positive-definite Gram matrix, block diagonal by degree.
#[derive(Clone, Debug, PartialEq)]
pub struct InnerProduct {
    space: Arc<GradedSpace>,
    gram: SparseMatrix,
}

impl InnerProduct {
    /// Basis-orthonormal inner product.
    pub fn orthonormal(space: Arc<GradedSpace>) -> Self {
        let gram = SparseMatrix::identity(space.dim());
        Self { space, gram }
    }

    /// Validates block structure, symmetry and positive-definiteness.
    pub fn from_gram(space: Arc<GradedSpace>, gram: SparseMatrix) -> Result<Self> {
        if gram.nrows() != space.dim() || gram.ncols() != space.dim() {
            return Err(Error::DimensionMismatch("Gram matrix has wrong size".into()));
        }
        if let Some((r, c, _)) = gram
            .triplets()
            .find(|&(r, c, _)| space.degree(r) != space.degree(c))
        {
            return Err(Error::NotHomogeneous { degree: 0, row: r, col: c });
        }
        for d in space.degrees() {
            let idx = space.indices_in_degree(d);
            if !is_positive_definite(&gram.select(&idx, &idx))? {
                return Err(Error::NotPositiveDefinite { degree: d });
            }
        }
        Ok(Self { space, gram })
    }

    /// Seeded random inner product: per degree block `MᵀM + I` with small
    /// integer entries in M.
    pub fn random(space: Arc<GradedSpace>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gram = SparseMatrix::zeros(space.dim(), space.dim());
        for d in space.degrees() {
            let idx = space.indices_in_degree(d);
            let k = idx.len();
            let m: Vec<Vec<i64>> = (0..k)
                .map(|_| (0..k).map(|_| rng.gen_range(-2..=2)).collect())
                .collect();
            for a in 0..k {
                for b in 0..k {
                    let mut x: i64 = (0..k).map(|r| m[r][a] * m[r][b]).sum();
                    if a == b {
                        x += 1;
                    }
                    gram.set(idx[a], idx[b], scalar::int(x));
                }
            }
        }
        Self { space, gram }
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    pub fn gram(&self) -> &SparseMatrix {
        &self.gram
    }

    pub fn pair(&self, a: &SparseVec, b: &SparseVec) -> Scalar {
        a.dot(&self.gram.apply(b))
    }

    pub fn is_orthonormal(&self) -> bool {
        self.gram == SparseMatrix::identity(self.space.dim())
    }
}

/// Inverse of a degree-preserving matrix, computed block by block.
pub fn block_inverse(space: &GradedSpace, m: &SparseMatrix) -> Result<SparseMatrix> {
    let mut out = SparseMatrix::zeros(space.dim(), space.dim());
    for d in space.degrees() {
        let idx = space.indices_in_degree(d);
        let inv = inverse(&m.select(&idx, &idx))?;
        for (r, c, x) in inv.triplets() {
            out.set(idx[r], idx[c], x.clone());
        }
    }
    Ok(out)
}

/// Harmonic representatives of H(A, d).
#[derive(Clone, Debug, PartialEq)]
pub struct Cohomology {
    pub space: Arc<GradedSpace>,
    /// `reps[i]` represents the i-th basis class.
    pub reps: Vec<SparseVec>,
    /// Index of the class of the unit, when it is nonzero.
    pub unit_class: Option<usize>,
    /// Formal adjoint d* with respect to the inner product.
    pub d_adjoint: SparseMatrix,
    pub laplacian: SparseMatrix,
}

impl Cohomology {
    /// (degree, dimension) pairs, ascending in degree.
    pub fn betti(&self) -> Vec<(i32, usize)> {
        self.space
            .degrees()
            .into_iter()
            .map(|d| (d, self.space.indices_in_degree(d).len()))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }
}

/// Harmonic representatives: the kernel of d d* + d* d per degree.
pub fn cohomology(a: &BvAlgebra, ip: &InnerProduct) -> Result<Cohomology> {
    let sp = a.space();
    for d in sp.degrees() {
        let idx = sp.indices_in_degree(d);
        if !is_positive_definite(&ip.gram().select(&idx, &idx))? {
            return Err(Error::NotPositiveDefinite { degree: d });
        }
    }
    let dm = a.d().matrix();
    let g = ip.gram();
    let g_inv = block_inverse(sp, g)?;
    let d_adj = g_inv.mul(&dm.transpose())?.mul(g)?;
    let lap = dm.mul(&d_adj)?.add(&d_adj.mul(dm)?)?;

    let unit = a.unit_vector();
    let mut pairs: Vec<(String, i32)> = Vec::new();
    let mut reps = Vec::new();
    let mut unit_class = None;
    for d in sp.degrees() {
        let idx = sp.indices_in_degree(d);
        let block = lap.select(&idx, &idx);
        let kernel: Vec<SparseVec> = echelon(&block)
            .kernel()
            .into_iter()
            .map(|v| SparseVec::from_entries(v.iter().map(|(i, x)| (idx[i], x.clone()))))
            .collect();
        let mut chosen: Vec<SparseVec> = Vec::new();
        if d == sp.degree(a.unit()) && !kernel.is_empty() {
            let proj = project_onto(&kernel, &unit, ip)?;
            if !proj.is_zero() {
                unit_class = Some(reps.len());
                chosen.push(proj);
            }
        }
        for v in kernel {
            let mut trial = chosen.clone();
            trial.push(v.clone());
            if independent(&trial) {
                chosen = trial;
            }
        }
        let mut used = BTreeSet::new();
        for (k, v) in chosen.iter().enumerate() {
            let lead = v.iter().map(|(i, _)| i).find(|i| !used.contains(i));
            let label = match lead {
                Some(i) => {
                    used.insert(i);
                    format!("[{}]", sp.label(i))
                }
                None => format!("[h{d}_{k}]"),
            };
            pairs.push((label, d));
        }
        reps.extend(chosen);
    }
    Ok(Cohomology {
        space: Arc::new(GradedSpace::from_pairs(pairs)?),
        reps,
        unit_class,
        d_adjoint: d_adj,
        laplacian: lap,
    })
}

fn independent(vs: &[SparseVec]) -> bool {
    let n = vs.iter().filter_map(SparseVec::max_index).max().map_or(0, |m| m + 1);
    let m = SparseMatrix::from_columns(n, vs);
    echelon(&m).rank() == vs.len()
}

/// Orthogonal projection of `x` onto span(basis).
fn project_onto(basis: &[SparseVec], x: &SparseVec, ip: &InnerProduct) -> Result<SparseVec> {
    let k = basis.len();
    let mut gram = SparseMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram.set(i, j, ip.pair(&basis[i], &basis[j]));
        }
    }
    let rhs: Vec<Scalar> = basis.iter().map(|b| ip.pair(b, x)).collect();
    let coeffs = inverse(&gram)?.apply(&SparseVec::from_dense(&rhs));
    let mut out = SparseVec::new();
    for (i, c) in coeffs.iter() {
        out.axpy(c, &basis[i]);
    }
    Ok(out)
}

/// Special homotopy retract from A onto H(A).
#[derive(Clone, Debug, PartialEq)]
pub struct Retract {
    pub iota: GradedMap,
    pub p: GradedMap,
    pub h: GradedMap,
}

impl Retract {
    pub fn h_space(&self) -> &Arc<GradedSpace> {
        self.iota.source()
    }
}

/// ι = inclusion of harmonics, p = orthogonal projection, h = -d* G with G
/// the Green operator (L + ιp)⁻¹ - ιp.
pub fn build_retract(a: &BvAlgebra, ip: &InnerProduct) -> Result<(Cohomology, Retract)> {
    let coh = cohomology(a, ip)?;
    let retract = retract_from(a, ip, &coh)?;
    Ok((coh, retract))
}

pub fn retract_from(a: &BvAlgebra, ip: &InnerProduct, coh: &Cohomology) -> Result<Retract> {
    let sp = a.space();
    let n = sp.dim();
    let b = SparseMatrix::from_columns(n, &coh.reps);
    let g = ip.gram();
    let bt_g = b.transpose().mul(g)?;
    let p_mat = if coh.dim() == 0 {
        SparseMatrix::zeros(0, n)
    } else {
        inverse(&bt_g.mul(&b)?)?.mul(&bt_g)?
    };
    let iota = GradedMap::new(coh.space.clone(), sp.clone(), 0, b.clone())?;
    let p = GradedMap::new(sp.clone(), coh.space.clone(), 0, p_mat.clone())?;
    let proj = b.mul(&p_mat)?;
    let green = block_inverse(sp, &coh.laplacian.add(&proj)?)?.sub(&proj)?;
    let h_mat = coh.d_adjoint.mul(&green)?.neg();
    let h = GradedMap::new(sp.clone(), sp.clone(), -1, h_mat)?;
    Ok(Retract { iota, p, h })
}

fn zero_check(name: &str, m: &GradedMap, row: &GradedSpace, col: &GradedSpace) -> Check {
    let mut c = Check::new(name);
    for (r, k, x) in m.matrix().triplets() {
        c.violation(format!(
            "entry ({}, {}) = {}",
            row.label(r),
            col.label(k),
            scalar::format(x)
        ));
    }
    c
}

/// pι = id, hd + dh = ιp - id, h² = hι = ph = 0, dι = 0, pd = 0.
pub fn verify_retract(a: &BvAlgebra, r: &Retract) -> Result<CheckList> {
    let sp = a.space();
    let hs = r.h_space();
    let d = a.d();
    let id_a = GradedMap::identity(sp.clone());
    let id_h = GradedMap::identity(hs.clone());
    let mut out = CheckList::default();
    out.push(zero_check("p_iota", &r.p.compose(&r.iota)?.try_sub(&id_h)?, hs, hs));
    let homotopy = r
        .h
        .compose(d)?
        .try_add(&d.compose(&r.h)?)?
        .try_sub(&r.iota.compose(&r.p)?.try_sub(&id_a)?)?;
    out.push(zero_check("homotopy", &homotopy, sp, sp));
    out.push(zero_check("h_h", &r.h.compose(&r.h)?, sp, sp));
    out.push(zero_check("h_iota", &r.h.compose(&r.iota)?, sp, hs));
    out.push(zero_check("p_h", &r.p.compose(&r.h)?, hs, sp));
    out.push(zero_check("d_iota", &d.compose(&r.iota)?, sp, hs));
    out.push(zero_check("p_d", &r.p.compose(d)?, hs, sp));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ce::CeModel;

    #[test]
    fn zero_differential_gives_trivial_retract() {
        let a = CeModel::abelian(2).cdga().unwrap();
        let (coh, r) = build_retract(&a, &InnerProduct::orthonormal(a.space().clone())).unwrap();
        assert_eq!(coh.dim(), 4);
        assert!(r.h.is_zero());
        assert!(verify_retract(&a, &r).unwrap().passed());
        assert_eq!(coh.unit_class, Some(0));
    }

    #[test]
    fn heisenberg_retract() {
        let a = CeModel::heisenberg().cdga().unwrap();
        let sp = a.space().clone();
        let (coh, r) = build_retract(&a, &InnerProduct::orthonormal(sp.clone())).unwrap();
        let betti: Vec<usize> = coh.betti().into_iter().map(|(_, b)| b).collect();
        assert_eq!(betti, [1, 2, 2, 1]);
        assert!(verify_retract(&a, &r).unwrap().passed());
        let e12 = SparseVec::basis(sp.index_of("e1e2").unwrap());
        let e3 = SparseVec::basis(sp.index_of("e3").unwrap());
        // de3 = -e1e2, so h(e1e2) = e3 here
        assert_eq!(r.h.apply(&e12), e3);
    }

    #[test]
    fn random_inner_products_keep_betti_numbers() {
        let a = CeModel::heisenberg().cdga().unwrap();
        let base = cohomology(&a, &InnerProduct::orthonormal(a.space().clone())).unwrap();
        for seed in 0..3 {
            let ip = InnerProduct::random(a.space().clone(), seed);
            let (coh, r) = build_retract(&a, &ip).unwrap();
            assert_eq!(coh.betti(), base.betti());
            assert!(verify_retract(&a, &r).unwrap().passed());
        }
    }

    #[test]
    fn sign_flipped_h_breaks_homotopy() {
        let a = CeModel::heisenberg().cdga().unwrap();
        let (_, mut r) = build_retract(&a, &InnerProduct::orthonormal(a.space().clone())).unwrap();
        r.h = r.h.scale(&scalar::int(-1));
        let rep = verify_retract(&a, &r).unwrap();
        assert!(!rep.get("homotopy").unwrap().passed);
    }
}
