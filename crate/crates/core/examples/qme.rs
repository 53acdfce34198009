//! Solves the quantum master equation order by order in τ for the Jacobi
//! Heisenberg model and prints the solution.

use bv_frobenius::flat::FlatOps;
use bv_frobenius::gla::scalar::int;
use bv_frobenius::models::ce::CeModel;
use bv_frobenius::pipeline::render_flat;
use bv_frobenius::qme::{solve_qme, verify_qme};
use bv_frobenius::retract::{build_retract, InnerProduct};

fn main() -> bv_frobenius::error::Result<()> {
    let a = CeModel::heisenberg().jacobi_model(&[(0, 1, int(1))], &[(2, int(-1))])?;
    let (coh, r) = build_retract(&a, &InnerProduct::orthonormal(a.space().clone()))?;
    let ops = FlatOps::new(&a, &r, 6)?;
    let sol = solve_qme(&a, &coh, &ops, 4, 6)?;
    for s in &sol.steps {
        println!("order {}: {} rhs terms, {} correction terms", s.order, s.rhs_terms, s.solution_terms);
    }
    println!("{}", serde_json::to_string_pretty(&render_flat(a.space(), &sol.gamma)).unwrap());
    for c in verify_qme(&a, &coh, &ops, &sol)?.checks.iter() {
        println!("{:<18} {}", c.name, c.passed);
    }
    Ok(())
}
