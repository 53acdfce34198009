//! Checks that contraction by a k-vector is, up to sign, adjoint to itself
//! under the top-degree trace, for every basis k-vector on Λ(R^5).

use bv_frobenius::cyclic::contraction_adjoint_check;
use bv_frobenius::gla::scalar;
use bv_frobenius::models::ce::Exterior;

fn main() -> bv_frobenius::error::Result<()> {
    let ext = Exterior::new(5);
    for k in 1..=3 {
        let mut ok = 0;
        let mut total = 0;
        for mask in 0u32..32 {
            if mask.count_ones() as usize != k {
                continue;
            }
            let w: Vec<usize> = (0..5).filter(|i| mask & (1 << i) != 0).collect();
            total += 1;
            if contraction_adjoint_check(&ext, &[(w, scalar::one())], k)?.passed {
                ok += 1;
            }
        }
        println!("k = {k}: {ok}/{total} basis k-vectors satisfy the identity");
    }
    Ok(())
}
