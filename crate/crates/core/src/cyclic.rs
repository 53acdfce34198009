//! Trace pairings, cyclicity, compatibility of h with the pairing, good
//! bases and the residue condition for the opposite filtration.

use crate::bv::BvAlgebra;
use crate::error::{Error, Result};
use crate::gla::linalg::rank;
use crate::gla::scalar::{self, Scalar};
use crate::gla::{GradedMap, HbarSeries, Linear, SparseMatrix, SparseVec};
use crate::models::ce::Exterior;
use crate::report::{Check, CheckList};
use crate::retract::{Cohomology, Retract};

/// (x, y) = Tr(x · y).
pub fn pairing(a: &BvAlgebra, x: &SparseVec, y: &SparseVec) -> Scalar {
    a.tr(&a.multiply(x, y))
}

/// K⁽⁰⁾(a_i, a_j) = Tr(ι a_i · ι a_j) on the cohomology basis.
pub fn k0_matrix(a: &BvAlgebra, coh: &Cohomology) -> SparseMatrix {
    let mu = coh.dim();
    let mut m = SparseMatrix::zeros(mu, mu);
    for i in 0..mu {
        for j in 0..mu {
            m.set(i, j, pairing(a, &coh.reps[i], &coh.reps[j]));
        }
    }
    m
}

/// Trace support, graded symmetry, the sign rule for every Δ_k, Tr∘d = 0
/// and perfectness of the induced pairing on cohomology.
pub fn validate_cyclic(a: &BvAlgebra, coh: &Cohomology) -> Result<CheckList> {
    let sp = a.space();
    let n = a.dim();
    let mut out = CheckList::default();
    let mut support = Check::new("trace_support");
    let tdeg = a.trace_degree();
    if a.trace().is_none_or(SparseVec::is_zero) {
        support.violation("trace is zero or missing");
    } else if tdeg.is_none() {
        support.violation("trace is supported in several degrees");
    }
    out.push(support);
    let cyc_dim = tdeg.unwrap_or(0);

    let mut sym = Check::new("pairing_symmetry");
    for i in 0..n {
        for j in i..n {
            let s = scalar::sign(i64::from(sp.degree(i)) * i64::from(sp.degree(j)));
            let (x, y) = (SparseVec::basis(i), SparseVec::basis(j));
            sym.expect(pairing(a, &x, &y) == s * pairing(a, &y, &x), || {
                format!("({}, {})", sp.label(i), sp.label(j))
            });
        }
    }
    out.push(sym);

    let mut stokes = Check::new("trace_closed");
    for j in 0..n {
        let v = a.tr(&a.d().apply(&SparseVec::basis(j)));
        stokes.expect(v.is_zero(), || format!("Tr(d {}) = {}", sp.label(j), scalar::format(&v)));
    }
    out.push(stokes);

    for k in 0..=a.k_max() {
        let dk = a.delta(k);
        let mut c = Check::new(format!("cyclic_sign[{k}]"));
        for i in 0..n {
            let x = SparseVec::basis(i);
            let dx = dk.apply(&x);
            for j in 0..n {
                if sp.degree(i) + sp.degree(j) + dk.degree() != cyc_dim {
                    continue;
                }
                let y = SparseVec::basis(j);
                let lhs = pairing(a, &dx, &y);
                let s = scalar::sign(i64::from(sp.degree(i)) + k as i64 + 1);
                let rhs = s * pairing(a, &x, &dk.apply(&y));
                c.expect(lhs == rhs, || format!("({}, {})", sp.label(i), sp.label(j)));
            }
        }
        out.push(c);
    }

    let mut perfect = Check::new("perfect");
    let k0 = k0_matrix(a, coh);
    let hs = &coh.space;
    for d in hs.degrees() {
        let rows = hs.indices_in_degree(d);
        let cols = hs.indices_in_degree(cyc_dim - d);
        let r = rank(&k0.select(&rows, &cols));
        perfect.expect(r == rows.len() && r == cols.len(), || {
            format!(
                "pairing block H^{d} x H^{} has rank {r}, Betti numbers {} and {}",
                cyc_dim - d,
                rows.len(),
                cols.len()
            )
        });
    }
    out.push(perfect);
    Ok(out)
}

/// Total degree of an A-valued ħ-series (coefficient m has A-degree D - 2m),
/// `None` for the zero series.
pub fn series_degree(a: &BvAlgebra, s: &HbarSeries<SparseVec>) -> Result<Option<i32>> {
    let sp = a.space();
    let mut found = None;
    for (m, c) in s.coeffs().iter().enumerate() {
        for (i, _) in c.iter() {
            let d = sp.degree(i) + 2 * m as i32;
            match found {
                None => found = Some(d),
                Some(e) if e != d => {
                    return Err(Error::DegreeInconsistency(format!(
                        "series mixes total degrees {e} and {d}"
                    )))
                }
                _ => {}
            }
        }
    }
    Ok(found)
}

/// K(α, β) = Σ_m ħ^m Σ_{i+j=m} (-1)^j (α_i, β_j).
///
/// The result is homogeneous of degree |α| + |β| - n, so its ħ^m coefficient
/// can only be nonzero when |α| + |β| = n + 2m; odd differences are rejected.
pub fn k_pairing(
    a: &BvAlgebra,
    alpha: &HbarSeries<SparseVec>,
    beta: &HbarSeries<SparseVec>,
) -> Result<HbarSeries<Scalar>> {
    if let (Some(da), Some(db), Some(n)) = (
        series_degree(a, alpha)?,
        series_degree(a, beta)?,
        a.trace_degree(),
    ) {
        if (da + db - n).rem_euclid(2) != 0 {
            return Err(Error::DegreeInconsistency(format!(
                "pairing series of total degrees {da} and {db} with trace in degree {n}"
            )));
        }
    }
    Ok(alpha.mul_with(&beta.bar(), |x, y| pairing(a, x, y)))
}

/// T: ħ⁰ coefficient.
pub fn evaluate_at_zero(alpha: &HbarSeries<SparseVec>) -> SparseVec {
    alpha.at_zero().clone()
}

/// (h a, b) = (-1)^{|a|} (a, h b) on all basis pairs with |a| + |b| = n + 1.
pub fn h_compatibility(a: &BvAlgebra, r: &Retract) -> Check {
    let sp = a.space();
    let n = a.trace_degree().unwrap_or(0);
    let mut c = Check::new("h_compatible");
    for i in 0..a.dim() {
        let x = SparseVec::basis(i);
        let hx = r.h.apply(&x);
        for j in 0..a.dim() {
            if sp.degree(i) + sp.degree(j) != n + 1 {
                continue;
            }
            let y = SparseVec::basis(j);
            let lhs = pairing(a, &hx, &y);
            let rhs = scalar::sign(i64::from(sp.degree(i))) * pairing(a, &x, &r.h.apply(&y));
            c.expect(lhs == rhs, || format!("({}, {})", sp.label(i), sp.label(j)));
        }
    }
    c
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoodBasis {
    /// α_i = S ι a_i.
    pub alphas: Vec<HbarSeries<SparseVec>>,
    pub checks: CheckList,
}

/// α_i = S(ι a_i) from the splitting map, with K(α_i, α_j) checked to be
/// ħ-free up to the series order and the two orthogonality identities
/// (ι a, h b) = (h b, h c) = 0.
pub fn good_basis(
    a: &BvAlgebra,
    r: &Retract,
    coh: &Cohomology,
    splitting: &HbarSeries<GradedMap>,
) -> Result<GoodBasis> {
    let mu = coh.dim();
    let alphas: Vec<HbarSeries<SparseVec>> = (0..mu)
        .map(|i| splitting.map(|m| m.apply(&SparseVec::basis(i))))
        .collect();
    let sp = a.space();
    let n = a.dim();
    let mut checks = CheckList::default();

    let mut orth = Check::new("iota_h_orthogonal");
    for i in 0..mu {
        for j in 0..n {
            let v = pairing(a, &coh.reps[i], &r.h.apply(&SparseVec::basis(j)));
            orth.expect(v.is_zero(), || format!("(iota {}, h {})", coh.space.label(i), sp.label(j)));
        }
    }
    checks.push(orth);
    let mut hh = Check::new("h_h_orthogonal");
    let hb: Vec<SparseVec> = (0..n).map(|j| r.h.apply(&SparseVec::basis(j))).collect();
    for j in 0..n {
        for k in 0..n {
            let v = pairing(a, &hb[j], &hb[k]);
            hh.expect(v.is_zero(), || format!("(h {}, h {})", sp.label(j), sp.label(k)));
        }
    }
    checks.push(hh);

    let k0 = k0_matrix(a, coh);
    let mut good = Check::new("hbar_free_pairing");
    let mut at_zero = Check::new("pairing_at_zero");
    for i in 0..mu {
        for j in 0..mu {
            if !pairable(a, coh, i, j) {
                continue;
            }
            let kij = k_pairing(a, &alphas[i], &alphas[j])?;
            at_zero.expect(kij.at_zero() == &k0.get(i, j), || {
                format!("K(alpha_{i}, alpha_{j}) at hbar = 0")
            });
            for m in kij.higher_support() {
                good.violation(format!("K(alpha_{i}, alpha_{j}) has a hbar^{m} term"));
            }
        }
    }
    checks.push(at_zero);
    checks.push(good);
    Ok(GoodBasis { alphas, checks })
}

/// Residues of K(ħ^{-s} α_i, ħ^{-t} α_j) for 1 ≤ s, t with s + t - 1 within
/// the series order, plus the direct-sum condition at ħ = 0.
pub fn opposite_filtration_check(
    a: &BvAlgebra,
    coh: &Cohomology,
    p: &GradedMap,
    alphas: &[HbarSeries<SparseVec>],
    window: usize,
) -> Result<CheckList> {
    let mut out = CheckList::default();
    let mut res = Check::new("residue");
    for (i, ai) in alphas.iter().enumerate() {
        for (j, aj) in alphas.iter().enumerate() {
            if !pairable(a, coh, i, j) {
                continue;
            }
            let kij = k_pairing(a, ai, aj)?;
            // K(ħ^{-s}x, ħ^{-t}y) = (-1)^t ħ^{-s-t} K(x, y)
            for s in 1..=window {
                for t in 1..=window {
                    let e = s + t - 1;
                    if e > kij.order() {
                        continue;
                    }
                    let r = kij.coeff(e)?;
                    res.expect(r.is_zero(), || {
                        format!("residue of K(hbar^-{s} alpha_{i}, hbar^-{t} alpha_{j}) = {}", scalar::format(&r))
                    });
                }
            }
        }
    }
    out.push(res);
    let mut shift = Check::new("shift_closed");
    shift.expect(window >= 1, || "empty window".into());
    out.push(shift);
    let mut direct = Check::new("direct_sum");
    let mu = coh.dim();
    let cols: Vec<SparseVec> = alphas.iter().map(|x| p.apply(x.at_zero())).collect();
    let m = SparseMatrix::from_columns(mu, &cols);
    direct.expect(rank(&m) == mu && alphas.len() == mu, || {
        "classes of the basis at hbar = 0 are not a basis of H".into()
    });
    out.push(direct);
    Ok(out)
}

/// Tr((ι_w x) ∧ y) = (-1)^{k(|x|+1)} Tr(x ∧ ι_w y) for all basis pairs with
/// |x| + |y| = n + k, where w is a k-vector.
pub fn contraction_adjoint_check(
    ext: &Exterior,
    w: &[(Vec<usize>, Scalar)],
    k: usize,
) -> Result<Check> {
    let iw = ext.multivector_contraction(w, k)?;
    let sp = ext.space();
    let n = ext.generators() as i32;
    let tr = ext.top_trace();
    let mut c = Check::new(format!("contraction_adjoint[{k}]"));
    for i in 0..ext.dim() {
        let x = SparseVec::basis(i);
        let ix = iw.apply(&x);
        for j in 0..ext.dim() {
            if sp.degree(i) + sp.degree(j) != n + k as i32 {
                continue;
            }
            let y = SparseVec::basis(j);
            let lhs = tr.dot(&ext.wedge(&ix, &y));
            let s = scalar::sign(k as i64 * (i64::from(sp.degree(i)) + 1));
            let rhs = s * tr.dot(&ext.wedge(&x, &iw.apply(&y)));
            c.expect(lhs == rhs, || format!("({}, {})", sp.label(i), sp.label(j)));
        }
    }
    Ok(c)
}

/// Whether classes i and j have total degrees whose pairing lands in an
/// even degree (otherwise K vanishes identically).
fn pairable(a: &BvAlgebra, coh: &Cohomology, i: usize, j: usize) -> bool {
    let n = a.trace_degree().unwrap_or(0);
    (coh.space.degree(i) + coh.space.degree(j) - n).rem_euclid(2) == 0
}

/// True when the check list contains no failing check whose name starts
/// with `prefix`.
pub fn passed_with_prefix(list: &CheckList, prefix: &str) -> bool {
    list.checks
        .iter()
        .filter(|c| c.name.starts_with(prefix))
        .all(|c| c.passed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degeneration::splitting_map;
    use crate::gla::scalar::int;
    use crate::models::ce::CeModel;
    use crate::retract::{build_retract, InnerProduct};

    #[test]
    fn k_pairing_bar_involution() {
        let a = CeModel::abelian(2).cdga().unwrap();
        let sp = a.space();
        let x = SparseVec::basis(sp.index_of("e1").unwrap());
        let y = SparseVec::basis(sp.index_of("e2").unwrap());
        let zero = SparseVec::new();
        let alpha = HbarSeries::new(vec![x.clone(), zero.clone()], true);
        let beta = HbarSeries::new(vec![y.clone(), zero.clone()], true);
        let base = k_pairing(&a, &alpha, &beta).unwrap();
        assert_eq!(base.at_zero(), &int(1));
        let hbar_alpha = HbarSeries::new(vec![zero.clone(), x], true);
        let hbar_beta = HbarSeries::new(vec![zero, y], true);
        let k1 = k_pairing(&a, &hbar_alpha, &beta).unwrap();
        let k2 = k_pairing(&a, &alpha, &hbar_beta).unwrap();
        assert_eq!(k1.coeff(1).unwrap(), int(1));
        assert_eq!(k2.coeff(1).unwrap(), int(-1));
    }

    #[test]
    fn torus_is_cyclic_and_good() {
        let a = CeModel::abelian(2).cdga().unwrap();
        let (coh, r) = build_retract(&a, &InnerProduct::orthonormal(a.space().clone())).unwrap();
        assert!(validate_cyclic(&a, &coh).unwrap().passed());
        assert!(h_compatibility(&a, &r).passed);
        let s = splitting_map(&a, &r, 6).unwrap();
        let gb = good_basis(&a, &r, &coh, &s).unwrap();
        assert!(gb.checks.passed());
        assert!(opposite_filtration_check(&a, &coh, &r.p, &gb.alphas, 3).unwrap().passed());
    }

    #[test]
    fn perturbed_basis_violates_residue_condition() {
        // On T³ the top class pairs with degree-2 classes into degree 5 = 3 + 2,
        // so an ħ·e1 perturbation of the top class shows up at ħ¹.
        let a = CeModel::abelian(3).cdga().unwrap();
        let (coh, r) = build_retract(&a, &InnerProduct::orthonormal(a.space().clone())).unwrap();
        let s = splitting_map(&a, &r, 2).unwrap();
        let mut alphas = good_basis(&a, &r, &coh, &s).unwrap().alphas;
        let good = opposite_filtration_check(&a, &coh, &r.p, &alphas, 2).unwrap();
        assert!(good.passed());
        let e1 = SparseVec::basis(a.space().index_of("e1").unwrap());
        let top = coh.dim() - 1;
        let bump = HbarSeries::new(vec![SparseVec::new(), e1, SparseVec::new()], false);
        alphas[top] = alphas[top].add(&bump);
        let rep = opposite_filtration_check(&a, &coh, &r.p, &alphas, 2).unwrap();
        assert!(!rep.get("residue").unwrap().passed);
    }

    #[test]
    fn stokes_and_perfectness_on_heisenberg() {
        let a = CeModel::heisenberg().cdga().unwrap();
        let (coh, _) = build_retract(&a, &InnerProduct::orthonormal(a.space().clone())).unwrap();
        assert!(validate_cyclic(&a, &coh).unwrap().passed());
        let broken = a.with_trace(Some(SparseVec::basis(a.space().index_of("e1e2").unwrap())));
        let rep = validate_cyclic(&broken, &coh).unwrap();
        assert!(!rep.get("perfect").unwrap().passed);
    }

    #[test]
    fn contraction_lemma_signs() {
        let ext = Exterior::new(4);
        let w1 = [(vec![0], int(1))];
        assert!(contraction_adjoint_check(&ext, &w1, 1).unwrap().passed);
        let w3 = [(vec![0, 1, 2], int(1))];
        assert!(contraction_adjoint_check(&ext, &w3, 3).unwrap().passed);
        assert!(contraction_adjoint_check(&ext, &[], 2).unwrap().passed);
    }
}
