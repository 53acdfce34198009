//! Hodge-to-de Rham degeneration, the splitting operator S with ΔS = Sd, and
//! the perturbed retract of (A[[ħ]], Δ) onto H(A)[[ħ]].

use crate::bv::{delta_total, BvAlgebra};
use crate::error::Result;
use crate::gla::scalar;
use crate::gla::{GradedMap, HbarSeries, SparseMatrix};
use crate::report::{Check, CheckList};
use crate::retract::Retract;

/// W_k = Σ Δ_{j₁} h Δ_{j₂} h ⋯ h Δ_{j_l} ι over compositions of k, built by
/// the suffix recursion W_k = Δ_k ι + Σ_{j<k} Δ_j h W_{k-j}. `w[0]` is unused.
fn words(a: &BvAlgebra, r: &Retract, k_max: usize) -> Result<Vec<GradedMap>> {
    let mut w: Vec<GradedMap> = vec![r.iota.clone()];
    for k in 1..=k_max {
        let mut acc = a.delta(k).compose(&r.iota)?;
        for j in 1..k {
            let dj = a.delta(j);
            if dj.is_zero() || w[k - j].is_zero() {
                continue;
            }
            acc = acc.try_add(&dj.compose(&r.h.compose(&w[k - j])?)?)?;
        }
        w.push(acc);
    }
    Ok(w)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferredOperators {
    /// `t[k-1]` is T_k = p W_k, an operator on H(A) of degree 1 - 2k.
    pub t: Vec<GradedMap>,
}

impl TransferredOperators {
    /// Degeneration holds up to the computed order iff every T_k vanishes.
    pub fn degenerates(&self) -> bool {
        self.t.iter().all(GradedMap::is_zero)
    }

    /// Orders k with T_k ≠ 0.
    pub fn nonzero_orders(&self) -> Vec<usize> {
        (0..self.t.len())
            .filter(|&i| !self.t[i].is_zero())
            .map(|i| i + 1)
            .collect()
    }
}

pub fn transferred_operators(a: &BvAlgebra, r: &Retract, k_max: usize) -> Result<TransferredOperators> {
    let w = words(a, r, k_max)?;
    let t = w[1..]
        .iter()
        .map(|wk| r.p.compose(wk))
        .collect::<Result<_>>()?;
    Ok(TransferredOperators { t })
}

fn zero_check(name: String, m: &GradedMap) -> Check {
    let mut c = Check::new(name);
    let (src, tgt) = (m.source(), m.target());
    for (row, col, x) in m.matrix().triplets() {
        c.violation(format!(
            "entry ({}, {}) = {}",
            tgt.label(row),
            src.label(col),
            scalar::format(x)
        ));
    }
    c
}

/// d W_k p = 0 for k = 1..=k_max.
pub fn closed_check(a: &BvAlgebra, r: &Retract, k_max: usize) -> Result<CheckList> {
    let w = words(a, r, k_max)?;
    let mut out = CheckList::default();
    for (k, wk) in w.iter().enumerate().skip(1) {
        let m = a.d().compose(wk)?.compose(&r.p)?;
        out.push(zero_check(format!("closed[{k}]"), &m));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplittingOperator {
    /// `s[0]` is the identity; `s[k]` = -Δ_k h + h W_k p.
    pub s: Vec<GradedMap>,
    /// The equation for S at each k < M, and ΔS - Sd mod ħ^{M+1}.
    pub checks: CheckList,
}

impl SplittingOperator {
    pub fn series(&self) -> HbarSeries<GradedMap> {
        HbarSeries::new(self.s.clone(), false)
    }

    pub fn order(&self) -> usize {
        self.s.len() - 1
    }
}

pub fn splitting_operator(a: &BvAlgebra, r: &Retract, m: usize) -> Result<SplittingOperator> {
    let w = words(a, r, m)?;
    let mut s = vec![GradedMap::identity(a.space().clone())];
    for (k, wk) in w.iter().enumerate().skip(1) {
        let sk = r
            .h
            .compose(wk)?
            .compose(&r.p)?
            .try_sub(&a.delta(k).compose(&r.h)?)?;
        s.push(sk);
    }
    let mut checks = CheckList::default();
    let d = a.d();
    for k in 0..m {
        // Σ_{i=1}^{k} Δ_i s_{k+1-i} + Δ_{k+1} - (s_{k+1} d - d s_{k+1})
        let mut lhs = a.delta(k + 1);
        for i in 1..=k {
            lhs = lhs.try_add(&a.delta(i).compose(&s[k + 1 - i])?)?;
        }
        let rhs = s[k + 1].compose(d)?.try_sub(&d.compose(&s[k + 1])?)?;
        checks.push(zero_check(format!("equation_for_s[{k}]"), &lhs.try_sub(&rhs)?));
    }
    let series = HbarSeries::new(s.clone(), false);
    let delta = delta_total(a, m);
    let d_series = HbarSeries::constant(d.clone(), 0);
    let diff = delta.compose(&series)?.sub(&series.compose(&d_series)?);
    let mut c = Check::new("delta_s_minus_s_d");
    for (k, coeff) in diff.coeffs().iter().enumerate().take(m + 1) {
        if !coeff.is_zero() {
            c.violation(format!("nonzero coefficient of hbar^{k}"));
        }
    }
    checks.push(c);
    Ok(SplittingOperator { s, checks })
}

/// a ↦ S ι a as an operator series H(A) → A[[ħ]].
pub fn splitting_map(a: &BvAlgebra, r: &Retract, m: usize) -> Result<HbarSeries<GradedMap>> {
    let s = splitting_operator(a, r, m)?;
    let iota = HbarSeries::constant(r.iota.clone(), 0);
    s.series().compose(&iota)
}

/// Perturbed retract (I′, P′, H′) of (A[[ħ]], Δ), truncated at ħ^M.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbedRetract {
    pub i: HbarSeries<GradedMap>,
    pub p: HbarSeries<GradedMap>,
    pub h: HbarSeries<GradedMap>,
}

/// Flattened perturbed retract: Σ over all ħ-orders of each component,
/// acting on A-components of homogeneous elements of A((ħ)).
#[derive(Clone, Debug, PartialEq)]
pub struct FlatRetract {
    pub i: SparseMatrix,
    pub p: SparseMatrix,
    pub h: SparseMatrix,
}

/// Order beyond which every coefficient of I′, P′, H′ vanishes for degree
/// reasons (the ħ^m coefficient has degree -2m or -1-2m).
pub fn saturation_order(a: &BvAlgebra) -> usize {
    (a.space().degree_span().max(0) as usize) / 2 + 1
}

pub fn perturbed_retract(a: &BvAlgebra, r: &Retract, m: usize) -> Result<PerturbedRetract> {
    let mut i = vec![r.iota.clone()];
    let mut p = vec![r.p.clone()];
    let mut h = vec![r.h.clone()];
    for n in 1..=m {
        let mut ii = GradedMap::zero(r.iota.source().clone(), a.space().clone(), -2 * n as i32);
        let mut pp = GradedMap::zero(a.space().clone(), r.p.target().clone(), -2 * n as i32);
        let mut hh = GradedMap::zero(a.space().clone(), a.space().clone(), -1 - 2 * n as i32);
        for j in 1..=n {
            let dj = a.delta(j);
            if dj.is_zero() {
                continue;
            }
            let h_dj = r.h.compose(&dj)?;
            ii = ii.try_add(&h_dj.compose(&i[n - j])?)?;
            hh = hh.try_add(&h_dj.compose(&h[n - j])?)?;
            pp = pp.try_add(&p[n - j].compose(&dj.compose(&r.h)?)?)?;
        }
        i.push(ii);
        p.push(pp);
        h.push(hh);
    }
    Ok(PerturbedRetract {
        i: HbarSeries::new(i, false),
        p: HbarSeries::new(p, false),
        h: HbarSeries::new(h, false),
    })
}

impl PerturbedRetract {
    pub fn order(&self) -> usize {
        self.i.order()
    }

    /// Sum of all coefficients; exact when the order reaches
    /// [`saturation_order`].
    pub fn flat(&self) -> FlatRetract {
        let sum = |s: &HbarSeries<GradedMap>| {
            s.coeffs()
                .iter()
                .fold(SparseMatrix::zeros(s.coeffs()[0].matrix().nrows(), s.coeffs()[0].matrix().ncols()), |acc, c| {
                    acc.add(c.matrix()).expect("same shape")
                })
        };
        FlatRetract {
            i: sum(&self.i),
            p: sum(&self.p),
            h: sum(&self.h),
        }
    }
}

/// P′I′ = id, ΔH′ + H′Δ = I′P′ - id, ΔI′ = 0, P′Δ = 0 and P′ΔI′ = 0, all
/// mod ħ^{M+1}.
pub fn verify_perturbed(a: &BvAlgebra, pr: &PerturbedRetract) -> Result<CheckList> {
    let m = pr.order();
    let delta = delta_total(a, m);
    let id_a = HbarSeries::constant(GradedMap::identity(a.space().clone()), 0);
    let id_h = HbarSeries::constant(GradedMap::identity(pr.i.coeffs()[0].source().clone()), 0);
    let check = |name: &str, s: HbarSeries<GradedMap>| {
        let mut c = Check::new(name);
        for (k, coeff) in s.coeffs().iter().enumerate().take(m + 1) {
            if !coeff.is_zero() {
                c.violation(format!("nonzero coefficient of hbar^{k}"));
            }
        }
        c
    };
    let mut out = CheckList::default();
    out.push(check("p_i", pr.p.compose(&pr.i)?.sub(&id_h)));
    let homotopy = delta
        .compose(&pr.h)?
        .add(&pr.h.compose(&delta)?)
        .sub(&pr.i.compose(&pr.p)?.sub(&id_a));
    out.push(check("homotopy", homotopy));
    out.push(check("delta_i", delta.compose(&pr.i)?));
    out.push(check("p_delta", pr.p.compose(&delta)?));
    out.push(check("transferred", pr.p.compose(&delta)?.compose(&pr.i)?));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ce::CeModel;
    use crate::retract::{build_retract, InnerProduct};

    #[test]
    fn no_higher_operators_degenerate_trivially() {
        let a = CeModel::heisenberg().cdga().unwrap();
        let (_, r) = build_retract(&a, &InnerProduct::orthonormal(a.space().clone())).unwrap();
        let t = transferred_operators(&a, &r, 6).unwrap();
        assert!(t.degenerates());
        let s = splitting_operator(&a, &r, 6).unwrap();
        assert!(s.checks.passed());
        assert!(s.s[1..].iter().all(GradedMap::is_zero));
        let pr = perturbed_retract(&a, &r, 6).unwrap();
        assert_eq!(pr.h.coeffs()[0], r.h);
        assert!(verify_perturbed(&a, &pr).unwrap().passed());
    }
}
