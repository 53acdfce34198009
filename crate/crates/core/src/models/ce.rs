//! Chevalley–Eilenberg models: exterior algebras on dual generators with the
//! differential induced by a Lie bracket, contractions by multivectors, the
//! Hodge star and the top-coefficient trace.
//!
//! Generators are numbered from 1 in labels (`e1`, `e2e3`) and from 0 in
//! code. Basis elements are ordered by degree, then lexicographically.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bv::BvAlgebra;
use crate::error::{Error, Result};
use crate::gla::scalar::{self, Scalar};
use crate::gla::{GradedMap, GradedSpace, SparseMatrix, SparseVec};
use crate::retract::InnerProduct;

/// Exterior algebra Λ(e_1, …, e_n) with its subset basis.
#[derive(Clone, Debug)]
pub struct Exterior {
    n: usize,
    masks: Vec<u64>,
    index: BTreeMap<u64, usize>,
    space: Arc<GradedSpace>,
}

impl Exterior {
    pub fn new(n: usize) -> Self {
        assert!(n < 64, "too many generators");
        let mut masks: Vec<u64> = (0..(1u64 << n)).collect();
        masks.sort_by_key(|&m| (m.count_ones(), subset(m)));
        let index = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let space = GradedSpace::from_pairs(masks.iter().map(|&m| (label(m), m.count_ones() as i32)))
            .expect("labels are distinct");
        Self {
            n,
            masks,
            index,
            space: Arc::new(space),
        }
    }

    pub fn generators(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.masks.len()
    }

    pub fn mask(&self, i: usize) -> u64 {
        self.masks[i]
    }

    pub fn index_of_mask(&self, m: u64) -> usize {
        self.index[&m]
    }

    pub fn generator(&self, g: usize) -> usize {
        self.index[&(1u64 << g)]
    }

    pub fn top(&self) -> usize {
        self.dim() - 1
    }

    /// e_A ∧ e_B as (sign, mask), or `None` when they overlap.
    pub fn wedge_masks(a: u64, b: u64) -> Option<(Scalar, u64)> {
        if a & b != 0 {
            return None;
        }
        let mut inversions = 0i64;
        for i in subset(a) {
            inversions += i64::from((b & ((1u64 << i) - 1)).count_ones());
        }
        Some((scalar::sign(inversions), a | b))
    }

    /// Structure constants of the wedge product.
    pub fn mult_entries(&self) -> Vec<(usize, usize, usize, Scalar)> {
        let mut out = Vec::new();
        for (i, &a) in self.masks.iter().enumerate() {
            for (j, &b) in self.masks.iter().enumerate() {
                if let Some((s, m)) = Self::wedge_masks(a, b) {
                    out.push((i, j, self.index[&m], s));
                }
            }
        }
        out
    }

    pub fn wedge(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, x) in a.iter() {
            for (j, y) in b.iter() {
                if let Some((s, m)) = Self::wedge_masks(self.masks[i], self.masks[j]) {
                    out.add_at(self.index[&m], &(s * x * y));
                }
            }
        }
        out
    }

    /// Contraction ι_{X_g}: odd derivation with ι_{X_g} e_h = δ_gh.
    pub fn contraction(&self, g: usize) -> GradedMap {
        let bit = 1u64 << g;
        let triplets = self.masks.iter().enumerate().filter_map(|(c, &m)| {
            if m & bit == 0 {
                return None;
            }
            let before = (m & (bit - 1)).count_ones();
            Some((self.index[&(m & !bit)], c, scalar::sign(i64::from(before))))
        });
        let mat = SparseMatrix::from_triplets(self.dim(), self.dim(), triplets)
            .expect("indices in range");
        GradedMap::new(self.space.clone(), self.space.clone(), -1, mat).expect("degree -1")
    }

    /// ι_w for w = Σ c X_{g_1} ∧ ⋯ ∧ X_{g_k}, with ι_{u∧v} = ι_u ∘ ι_v.
    pub fn multivector_contraction(&self, terms: &[(Vec<usize>, Scalar)], k: usize) -> Result<GradedMap> {
        let mut acc = GradedMap::zero(self.space.clone(), self.space.clone(), -(k as i32));
        for (gens, c) in terms {
            if gens.len() != k {
                return Err(Error::DegreeInconsistency(format!(
                    "expected a {k}-vector term, got {} generators",
                    gens.len()
                )));
            }
            if let Some(&g) = gens.iter().find(|&&g| g >= self.n) {
                return Err(Error::DimensionMismatch(format!("generator X{} out of range", g + 1)));
            }
            let mut op = GradedMap::identity(self.space.clone());
            for &g in gens.iter().rev() {
                op = self.contraction(g).compose(&op)?;
            }
            acc = acc.try_add(&op.scale(c))?;
        }
        Ok(acc)
    }

    /// Orthonormal Hodge star: ★e_I = ε e_{I^c} with e_I ∧ ★e_I = e_1⋯e_n.
    pub fn star(&self) -> SparseMatrix {
        let full = (1u64 << self.n) - 1;
        let triplets = self.masks.iter().enumerate().map(|(c, &m)| {
            let (s, _) = Self::wedge_masks(m, full & !m).expect("disjoint");
            (self.index[&(full & !m)], c, s)
        });
        SparseMatrix::from_triplets(self.dim(), self.dim(), triplets).expect("indices in range")
    }

    /// Coefficient of e_1⋯e_n.
    pub fn top_trace(&self) -> SparseVec {
        SparseVec::basis(self.top())
    }
}

fn subset(m: u64) -> Vec<usize> {
    (0..64).filter(|i| m & (1u64 << i) != 0).collect()
}

fn label(m: u64) -> String {
    if m == 0 {
        return "1".into();
    }
    subset(m).iter().map(|i| format!("e{}", i + 1)).collect()
}

/// Lie algebra on X_1..X_n given by [X_i, X_j] = Σ_k c^k_ij X_k.
#[derive(Clone, Debug, PartialEq)]
pub struct CeModel {
    pub dim: usize,
    /// Entries (i, j, k, c^k_ij) with i < j, zero-based.
    pub brackets: Vec<(usize, usize, usize, Scalar)>,
}

impl CeModel {
    pub fn abelian(dim: usize) -> Self {
        Self {
            dim,
            brackets: Vec::new(),
        }
    }

    /// Heisenberg algebra [X_1, X_2] = X_3.
    pub fn heisenberg() -> Self {
        Self {
            dim: 3,
            brackets: vec![(0, 1, 2, scalar::one())],
        }
    }

    pub fn exterior(&self) -> Exterior {
        Exterior::new(self.dim)
    }

    /// de_k = -Σ_{i<j} c^k_ij e_i e_j, extended as a derivation.
    pub fn differential(&self, ext: &Exterior) -> Result<GradedMap> {
        let mut gen_images = vec![SparseVec::new(); self.dim];
        for (i, j, k, c) in &self.brackets {
            let sign = if i < j { -scalar::one() } else { scalar::one() };
            let (i, j) = if i < j { (*i, *j) } else { (*j, *i) };
            if j >= self.dim || *k >= self.dim || i == j {
                return Err(Error::DimensionMismatch(format!(
                    "bracket entry ({}, {}, {}) invalid",
                    i + 1,
                    j + 1,
                    k + 1
                )));
            }
            let e = ext.index_of_mask((1u64 << i) | (1u64 << j));
            gen_images[*k].add_at(e, &(sign * c));
        }
        let mut cols = vec![SparseVec::new(); ext.dim()];
        for (c, col) in cols.iter_mut().enumerate() {
            let m = ext.mask(c);
            // d(e_{g1} ∧ … ∧ e_{gr}) = Σ_p (-1)^p e_{g1} ∧ … ∧ d e_{gp} ∧ …
            for (p, g) in subset(m).into_iter().enumerate() {
                let below = m & ((1u64 << g) - 1);
                let above = m & !((1u64 << (g + 1)) - 1);
                let left = SparseVec::basis(ext.index_of_mask(below));
                let right = SparseVec::basis(ext.index_of_mask(above));
                let term = ext.wedge(&ext.wedge(&left, &gen_images[g]), &right);
                col.axpy(&scalar::sign(p as i64), &term);
            }
        }
        GradedMap::new(
            ext.space().clone(),
            ext.space().clone(),
            1,
            SparseMatrix::from_columns(ext.dim(), &cols),
        )
    }

    /// The model with d only and the top-coefficient trace.
    pub fn cdga(&self) -> Result<BvAlgebra> {
        self.jacobi_model(&[], &[])
    }

    /// Δ₀ = d, Δ₁ = ι_π d - d ι_π, Δ₂ = ι_{η∧π}.
    pub fn jacobi_model(
        &self,
        pi: &[(usize, usize, Scalar)],
        eta: &[(usize, Scalar)],
    ) -> Result<BvAlgebra> {
        let ext = self.exterior();
        let d = self.differential(&ext)?;
        let pi_terms: Vec<(Vec<usize>, Scalar)> =
            pi.iter().map(|(i, j, c)| (vec![*i, *j], c.clone())).collect();
        let ip = ext.multivector_contraction(&pi_terms, 2)?;
        let d1 = ip.compose(&d)?.try_sub(&d.compose(&ip)?)?;
        let mut ep_terms = Vec::new();
        for (k, a) in eta {
            for (i, j, c) in pi {
                ep_terms.push((vec![*k, *i, *j], a * c));
            }
        }
        let d2 = ext.multivector_contraction(&ep_terms, 3)?;
        BvAlgebra::new(
            ext.space().clone(),
            0,
            ext.mult_entries(),
            vec![d, d1, d2],
            Some(ext.top_trace()),
        )
    }
}

/// ⟨a, b⟩ = Tr(a · ★b) for the orthonormal star; the identity on the wedge
/// basis.
pub fn star_inner_product(model: &CeModel) -> Result<InnerProduct> {
    let ext = model.exterior();
    let star = ext.star();
    let trace = ext.top_trace();
    let n = ext.dim();
    let mut gram = SparseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let x = trace.dot(&ext.wedge(&SparseVec::basis(i), &star.apply(&SparseVec::basis(j))));
            gram.set(i, j, x);
        }
    }
    InnerProduct::from_gram(ext.space().clone(), gram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bv::{operator_order, validate_algebra, validate_bv};
    use crate::gla::scalar::int;

    #[test]
    fn star_gram_is_identity() {
        let ip = star_inner_product(&CeModel::heisenberg()).unwrap();
        assert!(ip.is_orthonormal());
    }

    #[test]
    fn basis_order_and_labels() {
        let e = Exterior::new(3);
        let labels: Vec<&str> = (0..e.dim()).map(|i| e.space().label(i)).collect();
        assert_eq!(labels, ["1", "e1", "e2", "e3", "e1e2", "e1e3", "e2e3", "e1e2e3"]);
    }

    #[test]
    fn exterior_algebra_validates() {
        let a = CeModel::abelian(3).cdga().unwrap();
        assert!(validate_algebra(&a).passed());
        let sp = a.space();
        let (e1, e2, e3) = (sp.index_of("e1").unwrap(), sp.index_of("e2").unwrap(), sp.index_of("e3").unwrap());
        let b = |i| SparseVec::basis(i);
        assert_eq!(a.multiply(&b(e1), &b(e2)), a.multiply(&b(e2), &b(e1)).neg());
        let l = a.multiply(&a.multiply(&b(e1), &b(e2)), &b(e3));
        let r = a.multiply(&b(e1), &a.multiply(&b(e2), &b(e3)));
        assert_eq!(l, r);
        assert_eq!(l, b(sp.index_of("e1e2e3").unwrap()));
    }

    #[test]
    fn heisenberg_differential() {
        let m = CeModel::heisenberg();
        let a = m.cdga().unwrap();
        let sp = a.space();
        let de3 = a.d().apply(&SparseVec::basis(sp.index_of("e3").unwrap()));
        assert_eq!(de3, SparseVec::basis(sp.index_of("e1e2").unwrap()).neg());
        assert!(a.d().compose(a.d()).unwrap().is_zero());
        assert!(operator_order(&a, a.d(), 1).unwrap());
        assert!(validate_bv(&a, 0).unwrap().passed());
    }

    #[test]
    fn contraction_of_wedge_composes() {
        let e = Exterior::new(3);
        for u in 0..3 {
            for v in 0..3 {
                let lhs = e.multivector_contraction(&[(vec![u, v], int(1))], 2).unwrap();
                let rhs = e.contraction(u).compose(&e.contraction(v)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        let iu = e.contraction(1);
        assert!(iu.compose(&iu).unwrap().is_zero());
    }

    #[test]
    fn star_squares_to_sign() {
        let e = Exterior::new(4);
        let s = e.star();
        let s2 = s.mul(&s).unwrap();
        for i in 0..e.dim() {
            let k = i64::from(e.mask(i).count_ones());
            assert_eq!(s2.get(i, i), scalar::sign(k * (4 - k)));
        }
        assert_eq!(s.get(e.top(), 0), int(1));
    }
}
