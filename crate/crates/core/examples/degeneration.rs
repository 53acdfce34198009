//! Transferred operators on cohomology. The Poisson bivector X1∧X3 and the
//! Jacobi pair (X1∧X2, -X3) give models whose transferred operators vanish;
//! the bivector X1∧X2 alone does not, and the spectral sequence fails to
//! degenerate.

use bv_frobenius::degeneration::{closed_check, transferred_operators};
use bv_frobenius::gla::scalar::int;
use bv_frobenius::models::ce::CeModel;
use bv_frobenius::retract::{build_retract, InnerProduct};

fn main() -> bv_frobenius::error::Result<()> {
    let h3 = CeModel::heisenberg();
    let cases = [
        ("poisson X1^X3", h3.jacobi_model(&[(0, 2, int(1))], &[])?),
        ("jacobi X1^X2, -X3", h3.jacobi_model(&[(0, 1, int(1))], &[(2, int(-1))])?),
        ("bivector X1^X2 alone", h3.jacobi_model(&[(0, 1, int(1))], &[])?),
    ];
    for (name, a) in cases {
        let (_, r) = build_retract(&a, &InnerProduct::orthonormal(a.space().clone()))?;
        let t = transferred_operators(&a, &r, 6)?;
        println!("{name}: degenerates = {}, nonzero orders {:?}", t.degenerates(), t.nonzero_orders());
        let closed = closed_check(&a, &r, 6)?;
        let failed: Vec<_> = closed.failed().map(|c| c.name.clone()).collect();
        println!("  failed closedness checks: {failed:?}");
    }
    Ok(())
}
