//! Harmonic cohomology and the deformation retract (ι, p, h) of the
//! Heisenberg nilmanifold, for the orthonormal and a seeded random inner
//! product.

use bv_frobenius::models::ce::CeModel;
use bv_frobenius::retract::{build_retract, verify_retract, InnerProduct};

fn main() -> bv_frobenius::error::Result<()> {
    let a = CeModel::heisenberg().cdga()?;
    for (name, ip) in [
        ("orthonormal", InnerProduct::orthonormal(a.space().clone())),
        ("random seed 7", InnerProduct::random(a.space().clone(), 7)),
    ] {
        let (coh, r) = build_retract(&a, &ip)?;
        println!("{name}: betti {:?}", coh.betti());
        for i in 0..coh.dim() {
            println!("  a_{i} = {}", a.render(&r.iota.apply(&bv_frobenius::gla::SparseVec::basis(i))));
        }
        let checks = verify_retract(&a, &r)?;
        println!("  retract identities hold: {}", checks.passed());
    }
    Ok(())
}
