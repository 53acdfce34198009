//! Full pipeline on the Jacobi Heisenberg instance, printed as Markdown.

use bv_frobenius::models::corpus;
use bv_frobenius::pipeline::{run, Overrides};

fn main() {
    let inst = corpus::load_dir(&corpus::default_dir())
        .expect("corpus loads")
        .into_iter()
        .map(|(_, i)| i)
        .find(|i| i.description.name == "heisenberg_jacobi")
        .expect("built in");
    let report = run(&inst, "pipeline", &Overrides { tau_order: Some(3), ..Overrides::default() });
    print!("{}", report.to_markdown());
}
