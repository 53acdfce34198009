//! Flat coordinates, tangent frame, structure constants, metric and potential
//! of the formal Frobenius manifold attached to a solution of the master
//! equation, with checks of the Frobenius axioms.
//!
//! Everything is computed in flattened form (see [`crate::flat`]); a scalar
//! τ-series of total degree D carries ħ^{(D - |τ^I|)/2} on its τ^I term.
//! The opposite filtration L is spanned by ħ^{-s} α_i (s ≥ 1), which in
//! cohomology coordinates is the strictly negative ħ-part, so the projection
//! π along L keeps the components with nonnegative ħ-exponent.

use std::sync::Arc;

use crate::bv::BvAlgebra;
use crate::cyclic::k0_matrix;
use crate::error::{Error, Result};
use crate::flat::{self, FlatOps};
use crate::gla::scalar::{self, Scalar};
use crate::gla::tau::{invert_coordinates, Substitution};
use crate::gla::{GradedSpace, SparseMatrix, SparseVec, TauRing, TauSeries};
use crate::qme::QmeSolution;
use crate::report::{Check, CheckList};
use crate::retract::Cohomology;

/// P′x for a Δ-closed flattened element, after checking closedness and the
/// homotopy identity x - I′P′x = Δ(-H′x).
pub fn cohomology_class(ops: &FlatOps, x: &TauSeries<SparseVec>) -> Result<TauSeries<SparseVec>> {
    if !flat::apply(x, &ops.delta, 1).is_zero() {
        return Err(Error::Verification("cohomology_class: input not closed".into()));
    }
    let class = flat::apply(x, &ops.p, 0);
    let back = flat::apply(&class, &ops.i, 0);
    let exact = flat::apply(&flat::apply(x, &ops.h, -1), &ops.delta, 1);
    if x.try_sub(&back)?.try_add(&exact)? != TauSeries::zero(x.ring().clone(), x.degree(), x.order()) {
        return Err(Error::Verification("cohomology_class: homotopy identity fails".into()));
    }
    Ok(class)
}

/// The scalar series f_l with x = Σ_l f_l a_l (functions to the left of the
/// basis vectors).
fn component(space: &GradedSpace, x: &TauSeries<SparseVec>, l: usize) -> TauSeries<Scalar> {
    let ring = x.ring().clone();
    let pl = i64::from(space.degree(l).rem_euclid(2));
    x.map_with(x.degree() - space.degree(l), |m, _, c| {
        c.get(l) * scalar::sign(ring.mono_parity(m) * pl)
    })
}

fn ring_identity(ring: &Arc<TauRing>, order: usize) -> Vec<TauSeries<Scalar>> {
    (0..ring.len())
        .map(|i| TauSeries::linear(ring.clone(), ring.degree(i), order, i, scalar::one()))
        .collect()
}

/// Nonnegative ħ-part of a cohomology-valued series.
fn project(coh: &Cohomology, x: &TauSeries<SparseVec>) -> TauSeries<SparseVec> {
    flat::hbar_at_least(&coh.space, x, 0)
}

/// ħ⁰ part of a flattened scalar series.
fn hbar_zero(x: &TauSeries<Scalar>) -> TauSeries<Scalar> {
    let ring = x.ring().clone();
    x.filter(|m| ring.mono_degree(m) == x.degree())
}

/// J = [ħ e^{Γ/ħ} - ħ] in cohomology coordinates.
pub fn j_function(a: &BvAlgebra, ops: &FlatOps, gamma: &TauSeries<SparseVec>) -> Result<TauSeries<SparseVec>> {
    let e = flat::exp(a, &flat::hbar_shift(gamma, -1))?;
    let shifted = flat::hbar_shift(&e.filter(|m| !m.is_empty()), 1);
    cohomology_class(ops, &shifted)
}

/// ħ-dependent coordinate change τ(t) with π(J(τ(t))) = Σ a_i t^i, its
/// inverse, and the ħ⁰ part T(τ) of the components of π(J).
#[derive(Clone, Debug, PartialEq)]
pub struct FlatCoordinates {
    pub tau_of_t: Vec<TauSeries<Scalar>>,
    pub t_of_tau: Vec<TauSeries<Scalar>>,
    pub hbar_zero_map: Vec<TauSeries<Scalar>>,
    pub iterations: usize,
    /// Γ re-expanded in the flat coordinates.
    pub gamma: TauSeries<SparseVec>,
    pub checks: CheckList,
}

pub fn flat_coordinates(
    a: &BvAlgebra,
    coh: &Cohomology,
    ops: &FlatOps,
    sol: &QmeSolution,
) -> Result<FlatCoordinates> {
    let ring = sol.ring().clone();
    let n = sol.tau_order;
    let space = &coh.space;
    let j = j_function(a, ops, &sol.gamma)?;
    let ids = ring_identity(&ring, n);
    for (l, id) in ids.iter().enumerate() {
        if component(space, &project(coh, &j), l).homogeneous_part(1) != *id {
            return Err(Error::Verification(format!("linear part of J is not t{l}")));
        }
    }
    let hbar_zero_map = (0..ring.len())
        .map(|l| component(space, &flat::hbar_part(space, &j, 0), l))
        .collect();

    let mut tau = ids.clone();
    let mut iterations = 0;
    loop {
        let jt = Substitution::new(&tau, ring.clone(), n).apply(&j)?;
        let pj = project(coh, &jt);
        let errors: Vec<TauSeries<Scalar>> = ids
            .iter()
            .enumerate()
            .map(|(l, id)| component(space, &pj, l).try_sub(id))
            .collect::<Result<_>>()?;
        if errors.iter().all(TauSeries::is_zero) {
            break;
        }
        if iterations > n {
            return Err(Error::Decomposition("flat coordinates did not converge".into()));
        }
        let corr: Vec<TauSeries<Scalar>> = ids
            .iter()
            .zip(&errors)
            .map(|(id, e)| id.try_sub(e))
            .collect::<Result<_>>()?;
        let mut sub = Substitution::new(&corr, ring.clone(), n);
        tau = tau.iter().map(|x| sub.apply(x)).collect::<Result<_>>()?;
        iterations += 1;
    }
    let t_of_tau = invert_coordinates(&tau)?;
    let gamma = Substitution::new(&tau, ring.clone(), n).apply(&sol.gamma)?;

    let mut checks = CheckList::default();
    let mut inv = Check::new("inverse_composition");
    let mut there = Substitution::new(&t_of_tau, ring.clone(), n);
    let mut back = Substitution::new(&tau, ring.clone(), n);
    for (i, id) in ids.iter().enumerate() {
        let x = there.apply(&tau[i])?;
        let y = back.apply(&t_of_tau[i])?;
        inv.expect(x == *id && y == *id, || format!("composition differs from identity in t{i}"));
    }
    checks.push(inv);
    let mut norm = Check::new("flat_normalization");
    let pj = project(coh, &j_function(a, ops, &gamma)?);
    for (l, id) in ids.iter().enumerate() {
        norm.expect(component(space, &pj, l) == *id, || format!("component {l} of pi(J)"));
    }
    checks.push(norm);
    let mut qme = Check::new("transformed_qme");
    let e = flat::exp(a, &flat::hbar_shift(&gamma, -1))?;
    qme.expect(flat::apply(&e, &ops.delta, 1).is_zero(), || "Delta exp(Gamma/hbar) != 0".into());
    checks.push(qme);
    Ok(FlatCoordinates {
        tau_of_t: tau,
        t_of_tau,
        hbar_zero_map,
        iterations,
        gamma,
        checks,
    })
}

/// Sections ħ∂_i e^{Γ/ħ} as elements of A((ħ)) and their classes σ_i.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentFrame {
    pub sections: Vec<TauSeries<SparseVec>>,
    pub sigma: Vec<TauSeries<SparseVec>>,
    pub checks: CheckList,
}

pub fn tangent_frame(
    a: &BvAlgebra,
    coh: &Cohomology,
    ops: &FlatOps,
    coords: &FlatCoordinates,
) -> Result<TangentFrame> {
    let e = flat::exp(a, &flat::hbar_shift(&coords.gamma, -1))?;
    let mu = coh.dim();
    let sections: Vec<_> = (0..mu).map(|i| flat::hbar_shift(&e.derivative(i), 1)).collect();
    let sigma: Vec<_> = sections
        .iter()
        .map(|s| cohomology_class(ops, s))
        .collect::<Result<_>>()?;
    let mut checks = CheckList::default();
    let mut at_zero = Check::new("frame_at_zero");
    for (i, s) in sigma.iter().enumerate() {
        let c = s.constant_term().cloned().unwrap_or_default();
        at_zero.expect(c == SparseVec::basis(i), || format!("sigma_{i}(0) != a_{i}"));
    }
    checks.push(at_zero);
    Ok(TangentFrame {
        sections,
        sigma,
        checks,
    })
}

/// `a[i][j][k]` is A^k_ij, the coefficient of ∂_k in ∂_i ∘ ∂_j.
pub type Structure = Vec<Vec<Vec<TauSeries<Scalar>>>>;

#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    /// ħ⁰ parts.
    pub a: Structure,
    /// Full expansion coefficients in the σ-frame.
    pub full: Structure,
    pub checks: CheckList,
}

/// Expands [ħ∂_iσ_j] in the σ-frame modulo L[[τ]].
pub fn structure_constants(
    coh: &Cohomology,
    ops: &FlatOps,
    frame: &TangentFrame,
) -> Result<StructureConstants> {
    let mu = coh.dim();
    let space = &coh.space;
    let mut full = Vec::with_capacity(mu);
    let mut hbar_free = Check::new("hbar_free");
    let mut closed = Check::new("frame_closed");
    for i in 0..mu {
        let mut row = Vec::with_capacity(mu);
        for j in 0..mu {
            let x = cohomology_class(ops, &flat::hbar_shift(&frame.sections[j].derivative(i), 1))?;
            let mut coeffs: Vec<TauSeries<Scalar>> = (0..mu)
                .map(|k| TauSeries::zero(x.ring().clone(), x.degree() - space.degree(k), x.order()))
                .collect();
            let mut rounds = 0;
            let rem = loop {
                let mut y = TauSeries::zero(x.ring().clone(), x.degree(), x.order());
                for (c, s) in coeffs.iter().zip(&frame.sigma) {
                    y = y.try_add(&c.mul_with(s, |u, v| v.scale(u))?)?;
                }
                let rem = x.try_sub(&y)?;
                let p = project(coh, &rem);
                if p.is_zero() {
                    break rem;
                }
                if rounds > 2 * (space.degree_span().max(0) as usize + x.order() + 2) {
                    return Err(Error::Decomposition(format!("[hbar d_{i} sigma_{j}]")));
                }
                for (k, c) in coeffs.iter_mut().enumerate() {
                    *c = c.try_add(&component(space, &p, k))?;
                }
                rounds += 1;
            };
            closed.expect(rem.is_zero(), || format!("remainder in L for ({i},{j})"));
            for (k, c) in coeffs.iter().enumerate() {
                hbar_free.expect(hbar_zero(c) == *c, || format!("A^{k}_{i}{j} depends on hbar"));
            }
            row.push(coeffs);
        }
        full.push(row);
    }
    let a = full
        .iter()
        .map(|row| row.iter().map(|cs| cs.iter().map(hbar_zero).collect()).collect())
        .collect();
    let mut checks = CheckList::default();
    checks.push(hbar_free);
    checks.push(closed);
    Ok(StructureConstants { a, full, checks })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusData {
    pub degrees: Vec<i32>,
    pub unit: usize,
    /// g(i, j) = K⁽⁰⁾(a_i, a_j).
    pub metric: SparseMatrix,
    pub a: Structure,
    /// c(i, j, k) = Σ_l A^l_ij g(l, k).
    pub c: Structure,
    /// No terms of τ-order below 3.
    pub potential: TauSeries<Scalar>,
    /// τ-order up to which the structure constants are exact.
    pub order: usize,
}

impl FrobeniusData {
    pub fn mu(&self) -> usize {
        self.degrees.len()
    }

    fn parity(&self, i: usize) -> i64 {
        i64::from(self.degrees[i].rem_euclid(2))
    }

    pub fn ring(&self) -> &Arc<TauRing> {
        self.potential.ring()
    }
}

pub fn metric_and_potential(
    a: &BvAlgebra,
    coh: &Cohomology,
    sc: &StructureConstants,
) -> Result<FrobeniusData> {
    let mu = coh.dim();
    let unit = coh
        .unit_class
        .ok_or_else(|| Error::Verification("unit is exact in cohomology".into()))?;
    let g = k0_matrix(a, coh);
    let ring = sc.a[0][0][0].ring().clone();
    let order = sc.a[0][0][0].order();
    let mut c = Vec::with_capacity(mu);
    for i in 0..mu {
        let mut row = Vec::with_capacity(mu);
        for j in 0..mu {
            let mut cs = Vec::with_capacity(mu);
            for k in 0..mu {
                let deg = coh.space.degree(i) + coh.space.degree(j) + coh.space.degree(k)
                    - a.trace_degree().unwrap_or(0);
                let mut acc = TauSeries::zero(ring.clone(), deg, order);
                for l in 0..mu {
                    let glk = g.get(l, k);
                    if !num_traits::Zero::is_zero(&glk) {
                        acc = acc.try_add(&sc.a[i][j][l].scale(&glk))?;
                    }
                }
                cs.push(acc);
            }
            row.push(cs);
        }
        c.push(row);
    }
    let degrees: Vec<i32> = (0..mu).map(|i| coh.space.degree(i)).collect();
    let pot_degree = 6 - a.trace_degree().unwrap_or(0);
    let mut potential = TauSeries::zero(ring.clone(), pot_degree, order + 3);
    let lin: Vec<_> = ring_identity(&ring, order + 3);
    for (i, row) in c.iter().enumerate() {
        for (j, cs) in row.iter().enumerate() {
            for (k, cijk) in cs.iter().enumerate() {
                let x = lin[k].mul(&lin[j].mul(&lin[i].mul(&cijk.clone().with_order(order + 3))?)?)?;
                for (m, v) in x.terms() {
                    let n = m.len() as i64;
                    let w = scalar::frac(1, n * (n - 1) * (n - 2));
                    potential.insert(m.clone(), v * &w);
                }
            }
        }
    }
    Ok(FrobeniusData {
        degrees,
        unit,
        metric: g,
        a: sc.a.clone(),
        c,
        potential,
        order,
    })
}

fn series_check(name: &str, pairs: impl Iterator<Item = (String, bool)>) -> Check {
    let mut c = Check::new(name);
    for (what, ok) in pairs {
        c.expect(ok, || what);
    }
    c
}

/// Unit axiom, graded commutativity, WDVV, graded symmetry of c and the
/// reconstruction ∂_i∂_j∂_kΦ = c(i, j, k).
pub fn verify_frobenius(data: &FrobeniusData) -> Result<CheckList> {
    let mu = data.mu();
    let ring = data.ring().clone();
    let n = data.order;
    let mut out = CheckList::default();
    let one = TauSeries::constant(ring.clone(), 0, n, scalar::one());

    let mut unit = Check::new("unit");
    for j in 0..mu {
        for k in 0..mu {
            let x = &data.a[data.unit][j][k];
            let ok = if j == k { *x == one } else { x.is_zero() };
            unit.expect(ok, || format!("A^{k}_{u}{j}", u = data.unit));
        }
    }
    out.push(unit);

    let sign = |p: i64| scalar::sign(p);
    let mut comm = Vec::new();
    for i in 0..mu {
        for j in 0..mu {
            for k in 0..mu {
                let lhs = &data.a[i][j][k];
                let rhs = data.a[j][i][k].scale(&sign(data.parity(i) * data.parity(j)));
                comm.push((format!("A^{k}_{i}{j}"), *lhs == rhs));
            }
        }
    }
    out.push(series_check("commutativity", comm.into_iter()));

    let mut wdvv = Check::new("wdvv");
    for i in 0..mu {
        for j in 0..mu {
            for k in 0..mu {
                for m in 0..mu {
                    let mut diff = TauSeries::zero(
                        ring.clone(),
                        data.degrees[i] + data.degrees[j] + data.degrees[k] - data.degrees[m],
                        n,
                    );
                    for l in 0..mu {
                        let left = data.a[i][j][l].mul(&data.a[l][k][m])?;
                        let p = i64::from((data.degrees[j] + data.degrees[k] - data.degrees[l]).rem_euclid(2));
                        let right = data.a[j][k][l].mul(&data.a[i][l][m])?.scale(&sign(data.parity(i) * p));
                        diff = diff.try_add(&left)?;
                        diff = diff.try_sub(&right)?;
                    }
                    wdvv.expect(diff.is_zero(), || format!("(i,j,k,m) = ({i},{j},{k},{m})"));
                }
            }
        }
    }
    out.push(wdvv);

    let mut sym = Vec::new();
    for i in 0..mu {
        for j in 0..mu {
            for k in 0..mu {
                let c = &data.c[i][j][k];
                let swap_ij = data.c[j][i][k].scale(&sign(data.parity(i) * data.parity(j)));
                let swap_jk = data.c[i][k][j].scale(&sign(data.parity(j) * data.parity(k)));
                sym.push((format!("c({i},{j},{k})"), *c == swap_ij && *c == swap_jk));
            }
        }
    }
    out.push(series_check("c_symmetry", sym.into_iter()));

    let mut pot = Vec::new();
    for i in 0..mu {
        for j in 0..mu {
            for k in 0..mu {
                let d3 = data.potential.derivative(k).derivative(j).derivative(i).truncate(n);
                pot.push((format!("d{i}d{j}d{k} Phi"), d3 == data.c[i][j][k]));
            }
        }
    }
    out.push(series_check("potential", pot.into_iter()));
    Ok(out)
}

/// Σ_l A^l_ij(0) g(l, k) against Tr(ιa_i · ιa_j · ιa_k) computed directly.
pub fn cup_product_anchor(a: &BvAlgebra, coh: &Cohomology, data: &FrobeniusData) -> Check {
    let mu = data.mu();
    let mut c = Check::new("cup_product_anchor");
    for i in 0..mu {
        for j in 0..mu {
            let prod = a.multiply(&coh.reps[i], &coh.reps[j]);
            for k in 0..mu {
                let direct = a.tr(&a.multiply(&prod, &coh.reps[k]));
                let mut via = scalar::zero();
                for l in 0..mu {
                    if let Some(x) = data.a[i][j][l].constant_term() {
                        via += x * data.metric.get(l, k);
                    }
                }
                c.expect(via == direct, || {
                    format!("({i},{j},{k}): {} vs {}", scalar::format(&via), scalar::format(&direct))
                });
            }
        }
    }
    c
}

/// K(ħ∂_i e^{Γ/ħ}, ħ∂_j e^{Γ/ħ}) = g(i, j) with no τ- or ħ-dependence. A
/// computable stand-in for flatness of the pairing on sections.
pub fn flatness_surrogate(a: &BvAlgebra, frame: &TangentFrame, metric: &SparseMatrix) -> Result<Check> {
    let sp = a.space();
    let n = a.trace_degree().unwrap_or(0);
    let mut c = Check::new("flatness_surrogate");
    for (i, si) in frame.sections.iter().enumerate() {
        for (j, sj) in frame.sections.iter().enumerate() {
            let bar = sj.map_with(sj.degree(), |_, d, v| {
                SparseVec::from_entries(v.iter().map(|(l, x)| {
                    let e = i64::from((d - sp.degree(l)) / 2);
                    (l, x * scalar::sign(e))
                }))
            });
            let k = si
                .mul_with(&bar, |x, y| a.multiply(x, y))?
                .map(-n, |v| a.tr(v));
            let expected = TauSeries::constant(k.ring().clone(), k.degree(), k.order(), metric.get(i, j));
            c.expect(k == expected, || format!("K(sigma_{i}, sigma_{j})"));
        }
    }
    Ok(c)
}
