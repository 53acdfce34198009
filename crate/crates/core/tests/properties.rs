//! Property tests for the series, linear algebra and operator-order layers.

mod oracle;

use std::sync::Arc;

use bv_frobenius::bv::operator_order;
use bv_frobenius::gla::linalg::{kernel_image, rank};
use bv_frobenius::gla::scalar::{self, int, Scalar};
use bv_frobenius::gla::{GradedMap, SparseMatrix, TauRing, TauSeries};
use bv_frobenius::models::ce::CeModel;
use bv_frobenius::models::description::AlgebraDescription;
use bv_frobenius::retract::{build_retract, InnerProduct};
use oracle::Dense;
use proptest::prelude::*;

fn ring() -> Arc<TauRing> {
    Arc::new(TauRing::new(vec![1, -1, 2, 0]))
}

/// Degree-0 series without constant term, coefficients in -3..=3.
fn even_series(coeffs: &[i64], order: usize) -> TauSeries<Scalar> {
    let r = ring();
    let monos: Vec<_> = r
        .monomials(order)
        .into_iter()
        .filter(|m| !m.is_empty() && r.mono_degree(m) == 0)
        .collect();
    let mut s = TauSeries::zero(r, 0, order);
    for (m, c) in monos.into_iter().zip(coeffs.iter().cycle()) {
        if *c != 0 {
            s.insert(m, int(*c));
        }
    }
    s
}

fn dense(rows: &[Vec<i64>]) -> Vec<Vec<Scalar>> {
    rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exp_of_negative_is_inverse(coeffs in prop::collection::vec(-3i64..=3, 1..12), order in 1usize..5) {
        let x = even_series(&coeffs, order);
        let one = TauSeries::constant(x.ring().clone(), 0, order, scalar::one());
        let e = x.exp_with(scalar::one(), |a, b| a * b).unwrap();
        let f = x.scale(&-scalar::one()).exp_with(scalar::one(), |a, b| a * b).unwrap();
        prop_assert_eq!(e.mul(&f).unwrap(), one);
    }

    #[test]
    fn derivative_is_a_left_derivation(a in prop::collection::vec(-2i64..=2, 1..8), b in prop::collection::vec(-2i64..=2, 1..8), k in 0usize..4) {
        // both factors have degree 0, so no sign appears in the Leibniz rule
        let (x, y) = (even_series(&a, 4), even_series(&b, 4));
        let lhs = x.mul(&y).unwrap().derivative(k);
        let rhs = x.derivative(k).mul(&y.truncate(3)).unwrap()
            .try_add(&x.truncate(3).mul(&y.derivative(k)).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rank_nullity_matches_oracle(rows in prop::collection::vec(prop::collection::vec(-2i64..=2, 5), 1..6)) {
        let d = dense(&rows);
        let m = SparseMatrix::from_dense(&d, 5);
        let r = rank(&m);
        prop_assert_eq!(r, oracle::rank(&d, 5));
        let (ker, img) = kernel_image(&m);
        prop_assert_eq!(ker.len() + r, 5);
        prop_assert_eq!(img.len(), r);
        for v in &ker {
            prop_assert!(m.apply(v).is_zero());
        }
    }

    #[test]
    fn scalars_round_trip(p in -1000i64..1000, q in 1i64..1000) {
        let x = Scalar::new(p.into(), q.into());
        prop_assert_eq!(scalar::parse(&scalar::format(&x)).unwrap(), x);
    }

    #[test]
    fn random_inner_products_keep_cohomology(seed in 0u64..1000) {
        let a = CeModel::heisenberg().cdga().unwrap();
        let (c0, _) = build_retract(&a, &InnerProduct::orthonormal(a.space().clone())).unwrap();
        let (c1, _) = build_retract(&a, &InnerProduct::random(a.space().clone(), seed)).unwrap();
        prop_assert_eq!(c0.betti(), c1.betti());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Random degree -1 operators on Λ(e1, e2, e3): the order test is
    /// monotone in r and agrees with the Koszul-bracket oracle.
    #[test]
    fn operator_order_is_monotone_and_matches_oracle(entries in prop::collection::vec((0usize..8, 0usize..8, -2i64..=2), 0..6)) {
        let a = CeModel::abelian(3).cdga().unwrap();
        let sp = a.space().clone();
        let mut m = SparseMatrix::zeros(8, 8);
        for (r, c, x) in entries {
            if sp.degree(r) == sp.degree(c) - 1 {
                m.add_entry(r, c, &int(x));
            }
        }
        let op = GradedMap::new(sp.clone(), sp, -1, m.clone()).unwrap();
        let o = Dense::from_description(&AlgebraDescription::explicit("l3", &a));
        let dm = m.to_dense();
        let mut prev = false;
        for r in 0..4 {
            let lib = operator_order(&a, &op, r as i64).unwrap();
            prop_assert_eq!(lib, o.order_at_most(&dm, r));
            prop_assert!(!prev || lib, "order <= {} but not <= {}", r - 1, r);
            prev = lib;
        }
        // every operator on Λ(3) has order at most 3
        prop_assert!(prev);
    }

    /// Contraction by a k-vector has order at most k.
    #[test]
    fn contractions_have_order_k(k in 1usize..=3, pick in 0usize..8) {
        let model = CeModel::abelian(4);
        let ext = model.exterior();
        let a = model.cdga().unwrap();
        let subsets: Vec<Vec<usize>> = (0u32..16)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..4).filter(|i| m & (1 << i) != 0).collect())
            .collect();
        let w = &subsets[pick % subsets.len()];
        let iw = ext.multivector_contraction(&[(w.clone(), scalar::one())], k).unwrap();
        prop_assert!(operator_order(&a, &iw, k as i64).unwrap());
        prop_assert!(!operator_order(&a, &iw, k as i64 - 1).unwrap());
    }
}
