//! Runs every built-in instance in parallel and prints a one-line verdict
//! per instance.

use bv_frobenius::cli::run_corpus;
use bv_frobenius::models::corpus;
use bv_frobenius::pipeline::Overrides;

fn main() -> bv_frobenius::error::Result<()> {
    let report = run_corpus(&corpus::default_dir(), &Overrides::default())?;
    print!("{}", report.to_markdown());
    Ok(())
}
