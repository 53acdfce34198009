//! Dense reference implementation used to cross-check the library.
//!
//! Everything here works on `Vec<Vec<Q>>` with schoolbook algorithms and
//! reads only the explicit data of a description (basis, product table,
//! operator matrices, trace). The retract is built from echelon complements
//! rather than a Laplacian, operator order is tested with Koszul brackets
//! rather than commutators, and transferred operators are summed over
//! explicit compositions.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::str::FromStr;

use bv_frobenius::models::description::AlgebraDescription;
use bv_frobenius::models::perturb::to_explicit;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;
pub type Mat = Vec<Vec<Q>>;

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![Q::zero(); c]; r]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Q::one();
    }
    m
}

pub fn cols(m: &Mat) -> usize {
    m.first().map_or(0, Vec::len)
}

pub fn mul(a: &Mat, b: &Mat, inner: usize, bc: usize) -> Mat {
    let mut out = zeros(a.len(), bc);
    for (i, row) in a.iter().enumerate() {
        for k in 0..inner {
            if row[k].is_zero() {
                continue;
            }
            for j in 0..bc {
                if !b[k][j].is_zero() {
                    out[i][j] += &row[k] * &b[k][j];
                }
            }
        }
    }
    out
}

/// a · b with explicit shapes (a is r×k, b is k×c).
pub fn matmul(a: &Mat, b: &Mat, k: usize, c: usize) -> Mat {
    mul(a, b, k, c)
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u + v).collect())
        .collect()
}

pub fn sub(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u - v).collect())
        .collect()
}

pub fn is_zero(a: &Mat) -> bool {
    a.iter().all(|r| r.iter().all(Zero::is_zero))
}

pub fn transpose(a: &Mat, c: usize) -> Mat {
    (0..c).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn apply(m: &Mat, v: &[Q]) -> Vec<Q> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(Q::zero(), |acc, (x, y)| acc + x * y))
        .collect()
}

/// Reduced row echelon form and pivot columns.
pub fn rref(a: &Mat, c: usize) -> (Mat, Vec<usize>) {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..c {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Q::one() / &m[r][col];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..c {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    (m, pivots)
}

pub fn rank(a: &Mat, c: usize) -> usize {
    rref(a, c).1.len()
}

/// Basis of the null space of a (columns = c), as vectors.
pub fn kernel(a: &Mat, c: usize) -> Vec<Vec<Q>> {
    let (m, piv) = rref(a, c);
    let free: Vec<usize> = (0..c).filter(|j| !piv.contains(j)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); c];
            v[f] = Q::one();
            for (r, &p) in piv.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

pub fn inverse(a: &Mat) -> Option<Mat> {
    let n = a.len();
    let aug: Mat = a
        .iter()
        .zip(identity(n))
        .map(|(r, i)| r.iter().cloned().chain(i).collect())
        .collect();
    let (m, piv) = rref(&aug, 2 * n);
    if piv.len() < n || piv[n - 1] >= n {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn parse(s: &str) -> Q {
    Q::from_str(s).unwrap_or_else(|_| panic!("oracle cannot parse `{s}`"))
}

/// Dense copy of the explicit data of an instance.
#[derive(Clone, Debug)]
pub struct Dense {
    pub labels: Vec<String>,
    pub deg: Vec<i32>,
    pub unit: usize,
    /// `mult[i][j]` is the product e_i e_j.
    pub mult: Vec<Vec<Vec<Q>>>,
    pub deltas: Vec<Mat>,
    pub trace: Vec<Q>,
}

impl Dense {
    pub fn from_description(d: &AlgebraDescription) -> Self {
        // the inner product is not part of the algebra data
        let mut d = d.clone();
        d.inner_product = None;
        let e = to_explicit(&d).expect("explicit form");
        let basis = e.basis.expect("basis");
        let labels: Vec<String> = basis.iter().map(|b| b.label.clone()).collect();
        let deg = basis.iter().map(|b| b.degree).collect();
        let n = labels.len();
        let ix = |l: &str| labels.iter().position(|x| x == l).expect("label");
        let mut mult = vec![vec![vec![Q::zero(); n]; n]; n];
        for (a, b, c, x) in e.multiplication.unwrap_or_default() {
            mult[ix(&a)][ix(&b)][ix(&c)] += parse(&x);
        }
        let deltas = e
            .deltas
            .unwrap_or_default()
            .iter()
            .map(|entries| {
                let mut m = zeros(n, n);
                for (s, t, x) in entries {
                    m[ix(t)][ix(s)] += parse(x);
                }
                m
            })
            .collect();
        let mut trace = vec![Q::zero(); n];
        for (l, x) in e.trace.unwrap_or_default() {
            trace[ix(&l)] += parse(&x);
        }
        let unit = ix(e.unit.as_deref().expect("unit"));
        Self {
            labels,
            deg,
            unit,
            mult,
            deltas,
            trace,
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn delta(&self, k: usize) -> Mat {
        self.deltas.get(k).cloned().unwrap_or_else(|| zeros(self.n(), self.n()))
    }

    /// Highest k with Δ_k ≠ 0.
    pub fn k_top(&self) -> usize {
        (0..self.deltas.len()).rev().find(|&k| !is_zero(&self.deltas[k])).unwrap_or(0)
    }

    pub fn d(&self) -> Mat {
        self.delta(0)
    }

    pub fn product(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let n = self.n();
        let mut out = vec![Q::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let c = &x[i] * &y[j];
                for k in 0..n {
                    if !self.mult[i][j][k].is_zero() {
                        out[k] += &c * &self.mult[i][j][k];
                    }
                }
            }
        }
        out
    }

    pub fn basis(&self, i: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.n()];
        v[i] = Q::one();
        v
    }

    fn vdeg(&self, v: &[Q]) -> Option<i32> {
        v.iter().enumerate().find(|(_, x)| !x.is_zero()).map(|(i, _)| self.deg[i])
    }

    /// Names of failing algebra checks.
    pub fn algebra_failures(&self) -> BTreeSet<String> {
        let n = self.n();
        let mut out = BTreeSet::new();
        for j in 0..n {
            let e = self.basis(j);
            if self.product(&self.basis(self.unit), &e) != e || self.product(&e, &self.basis(self.unit)) != e {
                out.insert("unit".to_string());
            }
        }
        for i in 0..n {
            for j in 0..n {
                let s = if (self.deg[i] * self.deg[j]).rem_euclid(2) == 1 { q(-1) } else { q(1) };
                let ba: Vec<Q> = self.mult[j][i].iter().map(|x| x * &s).collect();
                if self.mult[i][j] != ba {
                    out.insert("commutativity".to_string());
                }
                for k in 0..n {
                    let l = self.product(&self.mult[i][j], &self.basis(k));
                    let r = self.product(&self.basis(i), &self.mult[j][k]);
                    if l != r {
                        out.insert("associativity".to_string());
                    }
                }
            }
        }
        out
    }

    /// Koszul bracket Φ_m(a_1..a_m) = Σ_S (-1)^{m-|S|} ε(S) D(a_S) a_{S^c}.
    pub fn koszul(&self, dop: &Mat, args: &[usize]) -> Vec<Q> {
        let m = args.len();
        let n = self.n();
        let mut out = vec![Q::zero(); n];
        for mask in 0u32..(1 << m) {
            let inside: Vec<usize> = (0..m).filter(|t| mask & (1 << t) != 0).collect();
            let outside: Vec<usize> = (0..m).filter(|t| mask & (1 << t) == 0).collect();
            // sign of moving the chosen arguments to the front
            let mut eps = 0i32;
            for &o in &outside {
                for &s in &inside {
                    if s > o {
                        eps += self.deg[args[s]] * self.deg[args[o]];
                    }
                }
            }
            let mut a_s = self.basis(self.unit);
            for &s in &inside {
                a_s = self.product(&a_s, &self.basis(args[s]));
            }
            let mut term = apply(dop, &a_s);
            for &o in &outside {
                term = self.product(&term, &self.basis(args[o]));
            }
            let sign = (m - inside.len()) as i32 + eps;
            let s = if sign.rem_euclid(2) == 1 { q(-1) } else { q(1) };
            for (x, t) in out.iter_mut().zip(term) {
                *x += t * &s;
            }
        }
        out
    }

    /// Order ≤ r iff Φ_{r+1} vanishes on all multisets of basis elements.
    pub fn order_at_most(&self, dop: &Mat, r: usize) -> bool {
        if is_zero(dop) {
            return true;
        }
        let n = self.n();
        let mut stack: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        while let Some(t) = stack.pop() {
            if t.len() == r + 1 {
                if self.koszul(dop, &t).iter().any(|x| !x.is_zero()) {
                    return false;
                }
                continue;
            }
            let last = *t.last().expect("nonempty");
            for i in last..n {
                let mut u = t.clone();
                u.push(i);
                stack.push(u);
            }
        }
        true
    }

    /// Names of failing BV checks for k ≤ k_check, with the library's naming.
    pub fn bv_failures(&self, k_check: usize) -> BTreeSet<String> {
        let n = self.n();
        let mut out = BTreeSet::new();
        for k in 0..=k_check {
            let dk = self.delta(k);
            for c in 0..n {
                for r in 0..n {
                    if !dk[r][c].is_zero() && self.deg[r] != self.deg[c] + 1 - 2 * k as i32 {
                        out.insert(format!("degree[{k}]"));
                    }
                }
            }
            if apply(&dk, &self.basis(self.unit)).iter().any(|x| !x.is_zero()) {
                out.insert(format!("unit[{k}]"));
            }
            if !self.order_at_most(&dk, k + 1) {
                out.insert(format!("order[{k}]"));
            }
            let mut rel = zeros(n, n);
            for i in 0..=k {
                rel = add(&rel, &mul(&self.delta(i), &self.delta(k - i), n, n));
            }
            if !is_zero(&rel) {
                out.insert(format!("relation[{k}]"));
            }
        }
        out
    }
}

/// A special retract given by matrices: ι (n×μ), p (μ×n), h (n×n).
#[derive(Clone, Debug)]
pub struct DenseRetract {
    pub iota: Mat,
    pub p: Mat,
    pub h: Mat,
    pub mu: usize,
    pub degrees: Vec<i32>,
}

/// Retract from the splitting V = B ⊕ H ⊕ C in each degree: B = im d,
/// H a complement of B in ker d picked greedily, C a complement of ker d
/// picked from standard basis vectors, h = -(d|_C)⁻¹ on B.
pub fn echelon_retract(a: &Dense) -> DenseRetract {
    let n = a.n();
    let d = a.d();
    let mut degs: Vec<i32> = a.deg.clone();
    degs.sort_unstable();
    degs.dedup();
    // complements C_j (as vectors in V) per degree, computed first
    let mut comp: Vec<(i32, Vec<Vec<Q>>)> = Vec::new();
    let mut kers: Vec<(i32, Vec<Vec<Q>>)> = Vec::new();
    for &j in &degs {
        let idx: Vec<usize> = (0..n).filter(|&i| a.deg[i] == j).collect();
        // d restricted to degree j, as a matrix on the idx coordinates
        let dj: Mat = (0..n).map(|r| idx.iter().map(|&c| d[r][c].clone()).collect()).collect();
        let kj: Vec<Vec<Q>> = kernel(&dj, idx.len())
            .into_iter()
            .map(|v| {
                let mut full = vec![Q::zero(); n];
                for (t, &i) in idx.iter().enumerate() {
                    full[i] = v[t].clone();
                }
                full
            })
            .collect();
        let mut span = kj.clone();
        let mut cj = Vec::new();
        for &i in &idx {
            let mut cand = span.clone();
            cand.push(a.basis(i));
            if rank(&cand, n) > span.len() {
                span.push(a.basis(i));
                cj.push(a.basis(i));
            }
        }
        comp.push((j, cj));
        kers.push((j, kj));
    }
    let mut basis_cols: Vec<Vec<Q>> = Vec::new();
    let mut kinds: Vec<(char, i32, usize)> = Vec::new();
    let mut iota_cols = Vec::new();
    let mut degrees = Vec::new();
    let mut preimages: Vec<Vec<Q>> = Vec::new();
    for &j in &degs {
        let prev: Vec<Vec<Q>> = comp
            .iter()
            .find(|(dj, _)| *dj == j - 1)
            .map(|(_, c)| c.clone())
            .unwrap_or_default();
        let bj: Vec<Vec<Q>> = prev.iter().map(|c| apply(&d, c)).collect();
        let kj = kers.iter().find(|(dj, _)| *dj == j).map(|(_, k)| k.clone()).unwrap_or_default();
        let mut span = bj.clone();
        let mut hj = Vec::new();
        for z in kj {
            let mut cand = span.clone();
            cand.push(z.clone());
            if rank(&cand, n) > span.len() {
                span.push(z.clone());
                hj.push(z);
            }
        }
        for (t, b) in bj.into_iter().enumerate() {
            basis_cols.push(b);
            kinds.push(('b', j, t));
            preimages.push(prev[t].clone());
        }
        for v in hj {
            basis_cols.push(v.clone());
            kinds.push(('h', j, 0));
            preimages.push(Vec::new());
            iota_cols.push(v);
            degrees.push(j);
        }
        let cj = comp.iter().find(|(dj, _)| *dj == j).map(|(_, c)| c.clone()).unwrap_or_default();
        for v in cj {
            basis_cols.push(v);
            kinds.push(('c', j, 0));
            preimages.push(Vec::new());
        }
    }
    assert_eq!(basis_cols.len(), n, "splitting is not a basis");
    let m = transpose(&basis_cols, n);
    let minv = inverse(&m).expect("splitting basis is invertible");
    let mu = iota_cols.len();
    let iota = transpose(&iota_cols, n);
    let mut p = Vec::new();
    let mut h = zeros(n, n);
    for (t, (kind, _, _)) in kinds.iter().enumerate() {
        match kind {
            'h' => p.push(minv[t].clone()),
            'b' => {
                for r in 0..n {
                    if preimages[t][r].is_zero() {
                        continue;
                    }
                    for c in 0..n {
                        h[r][c] -= &preimages[t][r] * &minv[t][c];
                    }
                }
            }
            _ => {}
        }
    }
    DenseRetract {
        iota,
        p,
        h,
        mu,
        degrees,
    }
}

/// Failing identities among pι = id, hd + dh = ιp - id, h² = hι = ph = 0,
/// dι = 0, pd = 0.
pub fn retract_failures(a: &Dense, r: &DenseRetract) -> BTreeSet<String> {
    let n = a.n();
    let mu = r.mu;
    let d = a.d();
    let mut out = BTreeSet::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            out.insert(name.to_string());
        }
    };
    check("p_iota", mul(&r.p, &r.iota, n, mu) == identity(mu));
    let lhs = add(&mul(&r.h, &d, n, n), &mul(&d, &r.h, n, n));
    let rhs = sub(&mul(&r.iota, &r.p, mu, n), &identity(n));
    check("homotopy", lhs == rhs);
    check("h_h", is_zero(&mul(&r.h, &r.h, n, n)));
    check("h_iota", is_zero(&mul(&r.h, &r.iota, n, mu)));
    check("p_h", is_zero(&mul(&r.p, &r.h, n, n)));
    check("d_iota", is_zero(&mul(&d, &r.iota, n, mu)));
    check("p_d", is_zero(&mul(&r.p, &d, n, n)));
    out
}

/// Compositions of k into positive parts.
pub fn compositions(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=k {
        for mut rest in compositions(k - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Orders k ≤ k_max with p Σ Δ_{j₁} h ⋯ h Δ_{j_l} ι ≠ 0.
pub fn nonzero_transferred(a: &Dense, r: &DenseRetract, k_max: usize) -> Vec<usize> {
    let n = a.n();
    let mu = r.mu;
    let mut out = Vec::new();
    for k in 1..=k_max {
        let mut total = zeros(mu, mu);
        for comp in compositions(k) {
            if comp.iter().any(|&j| j > a.k_top()) {
                continue;
            }
            let mut m = r.p.clone();
            for (t, &j) in comp.iter().enumerate() {
                if t > 0 {
                    m = mul(&m, &r.h, n, n);
                }
                m = mul(&m, &a.delta(j), n, n);
            }
            total = add(&total, &mul(&m, &r.iota, n, mu));
        }
        if !is_zero(&total) {
            out.push(k);
        }
    }
    out
}

/// Betti numbers as (degree, dimension), ascending.
pub fn betti(a: &Dense) -> Vec<(i32, usize)> {
    let r = echelon_retract(a);
    let mut out: Vec<(i32, usize)> = Vec::new();
    for &d in &r.degrees {
        match out.last_mut() {
            Some((x, c)) if *x == d => *c += 1,
            _ => out.push((d, 1)),
        }
    }
    out
}

/// Whether Tr(x·y) on the cohomology basis of the echelon retract is
/// nondegenerate.
pub fn pairing_perfect(a: &Dense) -> bool {
    let r = echelon_retract(a);
    let n = a.n();
    let reps: Vec<Vec<Q>> = transpose(&r.iota, r.mu);
    let gram: Mat = reps
        .iter()
        .map(|x| {
            reps.iter()
                .map(|y| {
                    let xy = a.product(x, y);
                    (0..n).fold(Q::zero(), |acc, i| acc + &xy[i] * &a.trace[i])
                })
                .collect()
        })
        .collect();
    r.mu > 0 && a.trace.iter().any(|x| !x.is_zero()) && inverse(&gram).is_some()
}

/// Tr(x · y · z) by three dense products.
pub fn triple_trace(a: &Dense, x: &[Q], y: &[Q], z: &[Q]) -> Q {
    let xyz = a.product(&a.product(x, y), z);
    xyz.iter().zip(&a.trace).fold(Q::zero(), |acc, (u, t)| acc + u * t)
}

pub fn abs_max(m: &Mat) -> Q {
    m.iter()
        .flatten()
        .map(|x| x.abs())
        .fold(Q::zero(), |a, b| if b > a { b } else { a })
}
