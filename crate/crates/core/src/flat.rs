//! Flattened representation of homogeneous elements of V((ħ)) for a
//! finite-dimensional graded space V.
//!
//! With ħ of degree 2, a homogeneous element of total degree D is determined
//! by its V-components: the component along a basis vector of degree j sits
//! at ħ^{(D-j)/2}. Series in τ with such coefficients are stored as
//! `TauSeries<SparseVec>` whose total degree D is tracked by the series, so
//! ħ-arithmetic is exact and never truncated. Operators Σ ħ^k O_k act as the
//! plain matrix Σ O_k.

use crate::bv::{delta_flat, BvAlgebra};
use crate::degeneration::{perturbed_retract, saturation_order, PerturbedRetract};
use crate::error::{Error, Result};
use crate::gla::{GradedSpace, HbarSeries, LaurentSeries, Linear, Monomial, SparseMatrix, SparseVec, TauSeries};
use crate::retract::Retract;

/// Flattened Δ together with the flattened perturbed retract.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatOps {
    pub delta: SparseMatrix,
    pub i: SparseMatrix,
    pub p: SparseMatrix,
    pub h: SparseMatrix,
    pub perturbed: PerturbedRetract,
}

impl FlatOps {
    /// Builds the perturbed retract up to the order where every further
    /// coefficient vanishes for degree reasons, so the flattening is exact.
    pub fn new(a: &BvAlgebra, r: &Retract, m: usize) -> Result<Self> {
        let pr = perturbed_retract(a, r, m.max(saturation_order(a)))?;
        let f = pr.flat();
        Ok(Self {
            delta: delta_flat(a),
            i: f.i,
            p: f.p,
            h: f.h,
            perturbed: pr,
        })
    }
}

/// ħ-exponent of a component of degree `j` in a coefficient of degree `d`.
pub fn hbar_exponent(d: i32, j: i32) -> Result<i32> {
    if (d - j).rem_euclid(2) != 0 {
        return Err(Error::DegreeInconsistency(format!(
            "component of degree {j} in a coefficient of degree {d}"
        )));
    }
    Ok((d - j) / 2)
}

/// Multiplication by ħ^k.
pub fn hbar_shift<C: Linear>(x: &TauSeries<C>, k: i32) -> TauSeries<C> {
    x.map_with(x.degree() + 2 * k, |_, _, c| c.clone())
}

/// Applies a matrix to every coefficient; `shift` is the operator's degree.
pub fn apply(x: &TauSeries<SparseVec>, m: &SparseMatrix, shift: i32) -> TauSeries<SparseVec> {
    x.map(shift, |c| m.apply(c))
}

pub fn mul(a: &BvAlgebra, x: &TauSeries<SparseVec>, y: &TauSeries<SparseVec>) -> Result<TauSeries<SparseVec>> {
    x.mul_with(y, |u, v| a.multiply(u, v))
}

/// exp(x) for x of total degree 0 without τ-constant term.
pub fn exp(a: &BvAlgebra, x: &TauSeries<SparseVec>) -> Result<TauSeries<SparseVec>> {
    x.exp_with(a.unit_vector(), |u, v| a.multiply(u, v))
}

/// First component with a negative ħ-exponent, if any.
pub fn negative_power(space: &GradedSpace, x: &TauSeries<SparseVec>) -> Result<Option<(Monomial, usize)>> {
    for (m, c) in x.terms() {
        let d = x.coeff_degree(m);
        for (j, _) in c.iter() {
            if hbar_exponent(d, space.degree(j))? < 0 {
                return Ok(Some((m.clone(), j)));
            }
        }
    }
    Ok(None)
}

/// Checks that every component has an integral ħ-exponent.
pub fn check_homogeneous(space: &GradedSpace, x: &TauSeries<SparseVec>) -> Result<()> {
    for (m, c) in x.terms() {
        let d = x.coeff_degree(m);
        for (j, _) in c.iter() {
            hbar_exponent(d, space.degree(j))?;
        }
    }
    Ok(())
}

/// Components with ħ-exponent exactly `e`.
pub fn hbar_part(space: &GradedSpace, x: &TauSeries<SparseVec>, e: i32) -> TauSeries<SparseVec> {
    x.map_with(x.degree(), |_, d, c| c.filter(|j| (d - space.degree(j)) == 2 * e))
}

/// Keeps components with ħ-exponent at least `e`.
pub fn hbar_at_least(space: &GradedSpace, x: &TauSeries<SparseVec>, e: i32) -> TauSeries<SparseVec> {
    x.map_with(x.degree(), |_, d, c| c.filter(|j| (d - space.degree(j)) >= 2 * e))
}

/// Expands into explicit ħ-series up to ħ^M (no negative powers allowed).
pub fn to_hbar(space: &GradedSpace, x: &TauSeries<SparseVec>, order: usize) -> Result<TauSeries<HbarSeries<SparseVec>>> {
    let mut out = TauSeries::zero(x.ring().clone(), x.degree(), x.order());
    for (m, c) in x.terms() {
        let d = x.coeff_degree(m);
        let mut coeffs = vec![SparseVec::new(); order + 1];
        let mut exact = true;
        for (j, v) in c.iter() {
            let e = hbar_exponent(d, space.degree(j))?;
            if e < 0 {
                return Err(Error::NegativePower {
                    order: m.len(),
                    monomial: m.to_string(),
                });
            }
            match coeffs.get_mut(e as usize) {
                Some(slot) => slot.add_at(j, v),
                None => exact = false,
            }
        }
        out.insert(m.clone(), HbarSeries::new(coeffs, exact));
    }
    Ok(out)
}

/// Laurent expansion with every coefficient exact.
pub fn to_laurent(space: &GradedSpace, x: &TauSeries<SparseVec>) -> Result<TauSeries<LaurentSeries<SparseVec>>> {
    let mut out = TauSeries::zero(x.ring().clone(), x.degree(), x.order());
    for (m, c) in x.terms() {
        let d = x.coeff_degree(m);
        let mut acc = LaurentSeries::zero(SparseVec::new());
        for (j, v) in c.iter() {
            let e = hbar_exponent(d, space.degree(j))?;
            acc = acc.add(&LaurentSeries::monomial(SparseVec::from_entries([(j, v.clone())]), e));
        }
        out.insert(m.clone(), acc);
    }
    Ok(out)
}

/// Sums the ħ-coefficients back into flattened form.
pub fn from_hbar(x: &TauSeries<HbarSeries<SparseVec>>) -> TauSeries<SparseVec> {
    x.map(0, |h| h.coeffs().iter().fold(SparseVec::new(), |acc, c| acc.add(c)))
}
