//! Order-by-order solution of the quantum master equation Δ e^{Γ/ħ} = 0.
//!
//! Γ has total degree 2 with |τ^i| = 2 - |a_i|. The linear part is Σ α_i τ^i
//! with α_i = I′ a_i; at τ-order n the equation reads ΔΓ⁽ⁿ⁾ = R_n with
//! R_n = -ħ Δ P_n, where P_n is the order-n part of exp(Γ_{<n}/ħ). The
//! solver sets Γ⁽ⁿ⁾ = -H′ R_n after checking ΔR_n = 0, that R_n has no
//! negative ħ-powers, and that the obstruction P′R_n vanishes.

use std::sync::Arc;

use serde::Serialize;

use crate::bv::{delta_total, BvAlgebra};
use crate::error::{Error, Result};
use crate::flat::{self, FlatOps};
use crate::gla::scalar;
use crate::gla::{HbarSeries, LaurentSeries, Monomial, SparseVec, TauRing, TauSeries};
use crate::report::{Check, CheckList};
use crate::retract::Cohomology;

#[derive(Clone, Debug, PartialEq)]
pub struct QmeSolution {
    pub mu: usize,
    /// Flattened Γ (total degree 2), exact in ħ.
    pub gamma: TauSeries<SparseVec>,
    /// Γ⁽ⁿ⁾ for n = 1..=N (index 0 unused and zero).
    pub layers: Vec<TauSeries<SparseVec>>,
    pub tau_order: usize,
    pub hbar_order: usize,
    pub steps: Vec<StepInfo>,
}

/// Bookkeeping for one induction step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepInfo {
    pub order: usize,
    pub rhs_terms: usize,
    pub solution_terms: usize,
}

impl QmeSolution {
    /// Γ as τ-series of explicit ħ-series truncated at ħ^M.
    pub fn gamma_hbar(&self, a: &BvAlgebra, m: usize) -> Result<TauSeries<HbarSeries<SparseVec>>> {
        flat::to_hbar(a.space(), &self.gamma, m)
    }

    pub fn ring(&self) -> &Arc<TauRing> {
        self.gamma.ring()
    }
}

/// Γ⁽¹⁾ = Σ τ^i α_i with α_i = I′a_i. Moving α_i to the left of τ^i costs
/// (-1)^{|τ^i|}, as |α_i| + |τ^i| = 2.
pub fn linear_part(ring: &Arc<TauRing>, ops: &FlatOps, coh: &Cohomology, n: usize) -> TauSeries<SparseVec> {
    let mut g = TauSeries::zero(ring.clone(), 2, n);
    for i in 0..coh.dim() {
        let alpha = ops.i.apply(&SparseVec::basis(i));
        g.insert(Monomial::var(i), alpha.scale(&scalar::sign(ring.parity(i))));
    }
    g
}

pub fn solve_qme(
    a: &BvAlgebra,
    coh: &Cohomology,
    ops: &FlatOps,
    tau_order: usize,
    hbar_order: usize,
) -> Result<QmeSolution> {
    let ring = Arc::new(TauRing::dual_to(&(0..coh.dim()).map(|i| coh.space.degree(i)).collect::<Vec<_>>()));
    let n_max = tau_order;
    let lin = linear_part(&ring, ops, coh, n_max);
    let mut layers = vec![TauSeries::zero(ring.clone(), 2, n_max), lin.clone()];
    let mut gamma = lin;
    let mut steps = Vec::new();
    for n in 2..=n_max {
        let e = flat::exp(a, &flat::hbar_shift(&gamma.truncate(n), -1))?;
        let p_n = e.homogeneous_part(n);
        // R_n = -ħ Δ P_n: degree 0 + 1 + 2
        let r_n = flat::hbar_shift(&flat::apply(&p_n, &ops.delta, 1), 1).scale(&-scalar::one());
        if !flat::apply(&r_n, &ops.delta, 1).is_zero() {
            return Err(Error::Verification(format!("Delta R_{n} != 0")));
        }
        if let Some((m, _)) = flat::negative_power(a.space(), &r_n)? {
            return Err(Error::NegativePower {
                order: n,
                monomial: ring.render(&m),
            });
        }
        let obstruction = flat::apply(&r_n, &ops.p, 0);
        if let Some((m, _)) = obstruction.terms().next() {
            return Err(Error::Obstruction {
                order: n,
                monomial: ring.render(m),
            });
        }
        // homogeneous of τ-order n, so exact at every truncation order
        let layer = flat::apply(&r_n, &ops.h, -1)
            .scale(&-scalar::one())
            .with_order(n_max);
        steps.push(StepInfo {
            order: n,
            rhs_terms: r_n.num_terms(),
            solution_terms: layer.num_terms(),
        });
        gamma = gamma.try_add(&layer)?;
        layers.push(layer);
    }
    Ok(QmeSolution {
        mu: coh.dim(),
        gamma,
        layers,
        tau_order,
        hbar_order,
        steps,
    })
}

/// Residual of the master equation computed with explicit Laurent series
/// and trusted windows.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub series: TauSeries<LaurentSeries<SparseVec>>,
    /// Trusted window (lowest exponent, highest trusted exponent) per τ-order.
    pub windows: Vec<(usize, i32, i32)>,
}

impl Residual {
    /// (τ-order, monomial, exponent) of nonzero trusted coefficients.
    pub fn nonzero(&self) -> Vec<(usize, String, i32)> {
        let mut out = Vec::new();
        for (m, c) in self.series.terms() {
            for e in c.nonzero_exponents() {
                out.push((m.len(), self.series.ring().render(m), e));
            }
        }
        out
    }
}

/// Δ exp(Γ/ħ) with Γ given as explicit ħ-series truncated at ħ^M.
pub fn qme_residual(
    a: &BvAlgebra,
    gamma: &TauSeries<HbarSeries<SparseVec>>,
    tau_order: usize,
) -> Result<Residual> {
    if gamma.constant_term().is_some() {
        return Err(Error::ExpOfConstant);
    }
    let m = gamma
        .terms()
        .map(|(_, c)| c.order())
        .min()
        .unwrap_or(0);
    let over_hbar = gamma
        .map(-2, |c| LaurentSeries::from_hbar(c).shift(-1))
        .truncate(tau_order);
    let one = LaurentSeries::monomial(a.unit_vector(), 0);
    let e = over_hbar.exp_with(one, |x, y| x.mul_with(y, SparseVec::new(), |u, v| a.multiply(u, v)))?;
    let delta = delta_total(a, m.max(a.k_max()));
    let series = e.map(1, |c| c.apply_operator(&delta));
    let mut windows = Vec::new();
    for n in 0..=tau_order {
        let lo = -(n as i32);
        let hi = m as i32 - n as i32;
        if hi < lo {
            return Err(Error::WindowUnderflow { order: n });
        }
        windows.push((n, lo, hi));
    }
    Ok(Residual { series, windows })
}

/// Residual recomputed two ways, gauge condition, homogeneity and the shape
/// of the linear part.
pub fn verify_qme(
    a: &BvAlgebra,
    coh: &Cohomology,
    ops: &FlatOps,
    sol: &QmeSolution,
) -> Result<CheckList> {
    let mut out = CheckList::default();
    let mut hom = Check::new("homogeneous");
    if let Err(e) = flat::check_homogeneous(a.space(), &sol.gamma) {
        hom.violation(e.to_string());
    }
    if let Ok(Some((m, _))) = flat::negative_power(a.space(), &sol.gamma) {
        hom.violation(format!("negative hbar power at {}", sol.ring().render(&m)));
    }
    if sol.gamma.degree() != 2 {
        hom.violation(format!("total degree {}", sol.gamma.degree()));
    }
    let hom_ok = hom.passed;
    out.push(hom);

    let mut flat_res = Check::new("residual_exact");
    if hom_ok {
        let e = flat::exp(a, &flat::hbar_shift(&sol.gamma, -1))?;
        let r = flat::apply(&e, &ops.delta, 1);
        for (m, _) in r.terms() {
            flat_res.violation(format!("nonzero at {}", sol.ring().render(m)));
        }
    } else {
        flat_res.violation("skipped: inhomogeneous input");
    }
    out.push(flat_res);

    let mut win = Check::new("residual_window");
    if hom_ok {
        let g = sol.gamma_hbar(a, sol.hbar_order)?;
        let res = qme_residual(a, &g, sol.tau_order)?;
        for (n, m, e) in res.nonzero() {
            win.violation(format!("tau-order {n}, {m}, hbar^{e}"));
        }
    } else {
        win.violation("skipped: inhomogeneous input");
    }
    out.push(win);

    let mut gauge = Check::new("gauge");
    for (n, layer) in sol.layers.iter().enumerate().skip(2) {
        let hl = flat::apply(layer, &ops.h, -1);
        gauge.expect(hl.is_zero(), || format!("H' Gamma^({n}) != 0"));
    }
    out.push(gauge);

    let mut lin = Check::new("linear_part");
    let expected = linear_part(sol.ring(), ops, coh, sol.tau_order);
    lin.expect(sol.gamma.homogeneous_part(1) == expected, || {
        "linear part differs from sum of alpha_i tau^i".into()
    });
    lin.expect(sol.gamma.constant_term().is_none(), || "nonzero constant term".into());
    out.push(lin);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ce::CeModel;
    use crate::retract::{build_retract, InnerProduct};

    #[test]
    fn torus_solution_is_linear() {
        let a = CeModel::abelian(2).cdga().unwrap();
        let (coh, r) = build_retract(&a, &InnerProduct::orthonormal(a.space().clone())).unwrap();
        let ops = FlatOps::new(&a, &r, 6).unwrap();
        let sol = solve_qme(&a, &coh, &ops, 4, 6).unwrap();
        assert!(sol.layers[2..].iter().all(TauSeries::is_zero));
        let rep = verify_qme(&a, &coh, &ops, &sol).unwrap();
        assert!(rep.passed(), "{:?}", rep.failed().collect::<Vec<_>>());
    }

    #[test]
    fn perturbed_gamma_is_detected() {
        let a = CeModel::abelian(2).cdga().unwrap();
        let (coh, r) = build_retract(&a, &InnerProduct::orthonormal(a.space().clone())).unwrap();
        let ops = FlatOps::new(&a, &r, 6).unwrap();
        let mut sol = solve_qme(&a, &coh, &ops, 3, 6).unwrap();
        // add an inhomogeneous term
        sol.gamma.insert(Monomial::var(0), SparseVec::basis(1));
        let rep = verify_qme(&a, &coh, &ops, &sol).unwrap();
        assert!(!rep.get("homogeneous").unwrap().passed);
    }
}
