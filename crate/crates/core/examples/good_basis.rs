//! The splitting map S and the good basis α_i = S ι a_i of the Jacobi
//! Heisenberg model, with the ħ-freeness of K(α_i, α_j).

use bv_frobenius::cyclic::{good_basis, opposite_filtration_check};
use bv_frobenius::degeneration::splitting_map;
use bv_frobenius::gla::scalar::int;
use bv_frobenius::models::ce::CeModel;
use bv_frobenius::retract::{build_retract, InnerProduct};

fn main() -> bv_frobenius::error::Result<()> {
    let a = CeModel::heisenberg().jacobi_model(&[(0, 1, int(1))], &[(2, int(-1))])?;
    let (coh, r) = build_retract(&a, &InnerProduct::orthonormal(a.space().clone()))?;
    let m = 4;
    let s = splitting_map(&a, &r, m)?;
    let gb = good_basis(&a, &r, &coh, &s)?;
    for (i, alpha) in gb.alphas.iter().enumerate() {
        let terms: Vec<String> = (0..=m)
            .filter_map(|k| alpha.coeffs().get(k).filter(|v| !v.is_zero()).map(|v| format!("hbar^{k} ({})", a.render(v))))
            .collect();
        println!("alpha_{i} = {}", terms.join(" + "));
    }
    for c in gb.checks.checks.iter() {
        println!("{:<24} {}", c.name, c.passed);
    }
    let opp = opposite_filtration_check(&a, &coh, &r.p, &gb.alphas, m)?;
    println!("opposite filtration: {}", opp.passed());
    Ok(())
}
