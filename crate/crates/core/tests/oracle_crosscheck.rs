//! The library against the dense oracle on every corpus file.

mod oracle;

use std::collections::BTreeSet;

use bv_frobenius::bv::{default_k_check, validate_algebra, validate_bv};
use bv_frobenius::degeneration::transferred_operators;
use bv_frobenius::gla::GradedMap;
use bv_frobenius::models::corpus;
use bv_frobenius::models::description::Instance;
use bv_frobenius::pipeline::{self, Overrides};
use bv_frobenius::report::CheckList;
use bv_frobenius::retract::build_retract;
use oracle::{Dense, DenseRetract};

fn failed(list: &CheckList) -> BTreeSet<String> {
    list.failed().map(|c| c.name.clone()).collect()
}

fn dense(m: &GradedMap) -> oracle::Mat {
    m.matrix().to_dense()
}

fn corpus_instances() -> Vec<Instance> {
    corpus::load_dir(&corpus::default_dir())
        .expect("corpus loads")
        .into_iter()
        .map(|(_, i)| i)
        .collect()
}

#[test]
fn algebra_and_bv_verdicts_agree() {
    for inst in corpus_instances() {
        let name = &inst.description.name;
        let o = Dense::from_description(&inst.description);
        let lib = failed(&validate_algebra(&inst.algebra));
        assert_eq!(lib, o.algebra_failures(), "{name}: algebra");
        if !lib.is_empty() {
            continue;
        }
        let k = default_k_check(&inst.algebra);
        let lib = failed(&validate_bv(&inst.algebra, k).unwrap());
        assert_eq!(lib, o.bv_failures(k), "{name}: bv");
    }
}

#[test]
fn cohomology_and_retracts_agree() {
    for inst in corpus_instances() {
        let name = &inst.description.name;
        let o = Dense::from_description(&inst.description);
        if !o.algebra_failures().is_empty() {
            continue;
        }
        let (coh, r) = build_retract(&inst.algebra, &inst.inner_product).unwrap();
        assert_eq!(coh.betti(), oracle::betti(&o), "{name}: betti");
        let lib = DenseRetract {
            iota: dense(&r.iota),
            p: dense(&r.p),
            h: dense(&r.h),
            mu: coh.dim(),
            degrees: (0..coh.dim()).map(|i| coh.space.degree(i)).collect(),
        };
        assert!(oracle::retract_failures(&o, &lib).is_empty(), "{name}: library retract");
        let own = oracle::echelon_retract(&o);
        assert!(oracle::retract_failures(&o, &own).is_empty(), "{name}: oracle retract");
    }
}

#[test]
fn degeneration_verdicts_agree() {
    for inst in corpus_instances() {
        let name = &inst.description.name;
        let rep = pipeline::run(&inst, "degeneration", &Overrides::default());
        if rep.gate("degeneration").map(|g| g.status) == Some(pipeline::Status::Skipped) {
            continue;
        }
        let o = Dense::from_description(&inst.description);
        let (_, r) = build_retract(&inst.algebra, &inst.inner_product).unwrap();
        let lib = transferred_operators(&inst.algebra, &r, 6).unwrap();
        let own = oracle::nonzero_transferred(&o, &oracle::echelon_retract(&o), 6);
        assert_eq!(lib.degenerates(), own.is_empty(), "{name}: {:?} vs {own:?}", lib.nonzero_orders());
    }
}

#[test]
fn perfectness_agrees() {
    for inst in corpus_instances() {
        let rep = pipeline::run(&inst, "cyclic", &Overrides::default());
        let Some(g) = rep.gate("cyclic").filter(|g| g.status != pipeline::Status::Skipped) else {
            continue;
        };
        let lib = g.checks.iter().find(|c| c.name == "perfect").expect("perfect check").passed;
        let o = Dense::from_description(&inst.description);
        assert_eq!(lib, oracle::pairing_perfect(&o), "{}", inst.description.name);
    }
}

#[test]
fn oracle_detects_a_bad_retract() {
    let inst = corpus_instances()
        .into_iter()
        .find(|i| i.description.name == "heisenberg")
        .unwrap();
    let o = Dense::from_description(&inst.description);
    let mut r = oracle::echelon_retract(&o);
    let n = o.n();
    let (row, col) = (0..n)
        .flat_map(|c| (0..n).map(move |r| (r, c)))
        .find(|&(row, col)| o.deg[row] + 1 == o.deg[col])
        .unwrap();
    r.h[row][col] += oracle::q(1);
    assert!(!oracle::retract_failures(&o, &r).is_empty());
}
