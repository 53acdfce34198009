//! The Frobenius manifold of the 3-torus: flat metric from the trace pairing
//! and a cubic potential given by the cup product.

use bv_frobenius::gla::scalar;
use bv_frobenius::models::corpus;
use bv_frobenius::pipeline::{run_with_artifacts, Overrides};

fn main() {
    let inst = corpus::load_dir(&corpus::default_dir())
        .expect("corpus loads")
        .into_iter()
        .map(|(_, i)| i)
        .find(|i| i.description.name == "torus3")
        .expect("torus3 is built in");
    let (report, art) = run_with_artifacts(&inst, "frobenius", &Overrides::default());
    println!("passed: {}", report.passed);
    let data = art.frobenius.expect("frobenius ran");
    println!("degrees {:?}, unit index {}", data.degrees, data.unit);
    println!("Phi = {}", data.potential.render(scalar::format));
}
