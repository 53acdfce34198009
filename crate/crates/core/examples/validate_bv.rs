//! Builds the Chevalley-Eilenberg BV algebra of the Heisenberg algebra with
//! a Jacobi pair and checks the BV axioms, then breaks Δ₁ and checks again.
//!
//! ```text
//! cargo run --example validate_bv
//! ```

use bv_frobenius::bv::{default_k_check, validate_algebra, validate_bv};
use bv_frobenius::gla::scalar::int;
use bv_frobenius::models::ce::CeModel;
use bv_frobenius::models::description::AlgebraDescription;
use bv_frobenius::models::perturb::{flip, Target};

fn main() -> bv_frobenius::error::Result<()> {
    let h3 = CeModel::heisenberg();
    // pi = X1 ^ X2, eta = -X3
    let a = h3.jacobi_model(&[(0, 1, int(1))], &[(2, int(-1))])?;
    println!("dimension {}, operators Δ_0..Δ_{}", a.dim(), a.k_max());

    let alg = validate_algebra(&a);
    println!("algebra passed: {}", alg.passed());
    let k = default_k_check(&a);
    let bv = validate_bv(&a, k)?;
    for c in bv.checks.iter() {
        println!("  {:<12} {}", c.name, if c.passed { "ok" } else { "FAIL" });
    }

    let d = AlgebraDescription::generated("h3_jacobi", &h3, &[(0, 1, int(1))], &[(2, int(-1))]);
    let broken = flip(&d, Target::Delta(1), 0)?.algebra()?;
    let bv = validate_bv(&broken, k)?;
    let failed: Vec<_> = bv.failed().map(|c| c.name.clone()).collect();
    println!("after negating one entry of Δ_1, failed: {failed:?}");
    Ok(())
}
