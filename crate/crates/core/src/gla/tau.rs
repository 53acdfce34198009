//! Truncated power series in graded formal variables τ⁰, …, τ^{μ-1}.
//!
//! Coefficients sit to the left of monomials. Monomials are stored sorted by
//! variable index; odd variables appear at most once. A series carries its
//! total degree `D`, so the coefficient of τ^I has degree `D - |τ^I|` and its
//! parity is known without inspecting it.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::graded::Linear;
use super::scalar::{self, Scalar};
use crate::error::{Error, Result};

/// Variable degrees (and parities) for a τ-ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauRing {
    degrees: Vec<i32>,
    prefix: String,
}

impl TauRing {
    pub fn new(degrees: Vec<i32>) -> Self {
        Self::named(degrees, "t")
    }

    pub fn named(degrees: Vec<i32>, prefix: &str) -> Self {
        Self {
            degrees,
            prefix: prefix.to_string(),
        }
    }

    /// Ring dual to a graded basis: |τ^i| = 2 - |a_i|.
    pub fn dual_to(basis_degrees: &[i32]) -> Self {
        Self::new(basis_degrees.iter().map(|d| 2 - d).collect())
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn parity(&self, i: usize) -> i64 {
        i64::from(self.degrees[i].rem_euclid(2))
    }

    pub fn mono_degree(&self, m: &Monomial) -> i32 {
        m.0.iter().map(|&i| self.degrees[i]).sum()
    }

    pub fn mono_parity(&self, m: &Monomial) -> i64 {
        i64::from(self.mono_degree(m).rem_euclid(2))
    }

    /// Sorts a word of variables, returning the Koszul sign, or `None` when
    /// an odd variable repeats.
    pub fn normalize(&self, mut vars: Vec<usize>) -> Option<(Scalar, Monomial)> {
        let mut odd_swaps = 0i64;
        for i in 1..vars.len() {
            let mut j = i;
            while j > 0 && vars[j - 1] > vars[j] {
                odd_swaps += self.parity(vars[j - 1]) * self.parity(vars[j]);
                vars.swap(j - 1, j);
                j -= 1;
            }
        }
        if vars
            .windows(2)
            .any(|w| w[0] == w[1] && self.parity(w[0]) == 1)
        {
            return None;
        }
        Some((scalar::sign(odd_swaps), Monomial(vars)))
    }

    /// Product of two sorted monomials with its sign.
    pub fn merge(&self, a: &Monomial, b: &Monomial) -> Option<(Scalar, Monomial)> {
        let mut odd_pairs = 0i64;
        for &x in &a.0 {
            if self.parity(x) == 0 {
                continue;
            }
            for &y in &b.0 {
                if y == x {
                    return None;
                }
                if y < x {
                    odd_pairs += self.parity(y);
                }
            }
        }
        let mut vars = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.0.len() || j < b.0.len() {
            if j == b.0.len() || (i < a.0.len() && a.0[i] <= b.0[j]) {
                vars.push(a.0[i]);
                i += 1;
            } else {
                vars.push(b.0[j]);
                j += 1;
            }
        }
        Some((scalar::sign(odd_pairs), Monomial(vars)))
    }

    /// All admissible monomials of exactly `order` factors, in sorted order.
    pub fn monomials(&self, order: usize) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.monomials_rec(order, 0, &mut cur, &mut out);
        out
    }

    fn monomials_rec(&self, left: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Monomial>) {
        if left == 0 {
            out.push(Monomial(cur.clone()));
            return;
        }
        for i in start..self.len() {
            if self.parity(i) == 1 && cur.last() == Some(&i) {
                continue;
            }
            cur.push(i);
            self.monomials_rec(left - 1, i, cur, out);
            cur.pop();
        }
    }

    pub fn render(&self, m: &Monomial) -> String {
        if m.0.is_empty() {
            return "1".into();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut k = 0;
        while k < m.0.len() {
            let v = m.0[k];
            let mut e = 1;
            while k + e < m.0.len() && m.0[k + e] == v {
                e += 1;
            }
            parts.push(if e == 1 {
                format!("{}{}", self.prefix, v)
            } else {
                format!("{}{}^{}", self.prefix, v, e)
            });
            k += e;
        }
        parts.join("*")
    }
}

/// Sorted multi-index of variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<usize>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        Self(vec![i])
    }

    pub fn vars(&self) -> &[usize] {
        &self.0
    }

    /// Number of factors (τ-order).
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn multiplicity(&self, i: usize) -> usize {
        self.0.iter().filter(|&&v| v == i).count()
    }

    /// Monomial with one occurrence of `i` removed.
    pub fn without(&self, i: usize) -> Option<Self> {
        let pos = self.0.iter().position(|&v| v == i)?;
        let mut v = self.0.clone();
        v.remove(pos);
        Some(Self(v))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let s: Vec<String> = self.0.iter().map(|v| format!("t{v}")).collect();
        write!(f, "{}", s.join("*"))
    }
}

/// Homogeneous series `Σ c_I τ^I` of total degree `degree`, truncated at
/// τ-order `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct TauSeries<C> {
    ring: Arc<TauRing>,
    degree: i32,
    order: usize,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Linear> TauSeries<C> {
    pub fn zero(ring: Arc<TauRing>, degree: i32, order: usize) -> Self {
        Self {
            ring,
            degree,
            order,
            terms: BTreeMap::new(),
        }
    }

    /// `c · 1`.
    pub fn constant(ring: Arc<TauRing>, degree: i32, order: usize, c: C) -> Self {
        let mut s = Self::zero(ring, degree, order);
        s.insert(Monomial::one(), c);
        s
    }

    /// `c τ^i`; the series degree is `|c| + |τ^i|`.
    pub fn linear(ring: Arc<TauRing>, degree: i32, order: usize, i: usize, c: C) -> Self {
        let mut s = Self::zero(ring, degree, order);
        s.insert(Monomial::var(i), c);
        s
    }

    pub fn ring(&self) -> &Arc<TauRing> {
        &self.ring
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Degree of the coefficient of `m`.
    pub fn coeff_degree(&self, m: &Monomial) -> i32 {
        self.degree - self.ring.mono_degree(m)
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&C> {
        self.terms.get(m)
    }

    /// Adds `c` to the coefficient of `m` (dropped if beyond the order).
    pub fn insert(&mut self, m: Monomial, c: C) {
        if m.len() > self.order || c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let sum = old.add(&c);
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *old = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Part of exactly τ-order `n`.
    pub fn homogeneous_part(&self, n: usize) -> Self {
        self.filter(|m| m.len() == n)
    }

    /// Part of τ-order below `n`.
    pub fn below(&self, n: usize) -> Self {
        self.filter(|m| m.len() < n)
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        Self {
            ring: self.ring.clone(),
            degree: self.degree,
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn constant_term(&self) -> Option<&C> {
        self.terms.get(&Monomial::one())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut s = self.filter(|m| m.len() <= order);
        s.order = order.min(self.order);
        s
    }

    /// Same terms with a new truncation order (callers vouch for the extra
    /// orders being zero).
    pub fn with_order(mut self, order: usize) -> Self {
        self.terms.retain(|m, _| m.len() <= order);
        self.order = order;
        self
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::DimensionMismatch("series over different tau rings".into()));
        }
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::DegreeInconsistency(format!(
                "adding tau series of degree {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self {
            ring: self.ring.clone(),
            degree: if self.is_zero() { other.degree } else { self.degree },
            order: self.order.min(other.order),
            terms: BTreeMap::new(),
        };
        for (m, c) in self.terms.iter().chain(other.terms.iter()) {
            out.insert(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(&-scalar::one()))
    }

    pub fn scale(&self, x: &Scalar) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.degree, self.order);
        for (m, c) in &self.terms {
            out.insert(m.clone(), c.scale(x));
        }
        out
    }

    /// Applies `f` to every coefficient; `f` must be linear and shift
    /// degrees by `shift`.
    pub fn map<U: Linear>(&self, shift: i32, f: impl Fn(&C) -> U) -> TauSeries<U> {
        let mut out = TauSeries::zero(self.ring.clone(), self.degree + shift, self.order);
        for (m, c) in &self.terms {
            out.insert(m.clone(), f(c));
        }
        out
    }

    /// Like [`map`](Self::map) but `f` also sees the monomial and the
    /// coefficient degree.
    pub fn map_with<U: Linear>(
        &self,
        degree: i32,
        f: impl Fn(&Monomial, i32, &C) -> U,
    ) -> TauSeries<U> {
        let mut out = TauSeries::zero(self.ring.clone(), degree, self.order);
        for (m, c) in &self.terms {
            out.insert(m.clone(), f(m, self.coeff_degree(m), c));
        }
        out
    }

    /// Product `(Σ a_I τ^I)(Σ b_J τ^J) = Σ ± f(a_I, b_J) τ^I τ^J`, where the
    /// sign accounts for moving τ^I past b_J and sorting τ^I τ^J.
    pub fn mul_with<U: Linear, V: Linear>(
        &self,
        other: &TauSeries<U>,
        f: impl Fn(&C, &U) -> V,
    ) -> Result<TauSeries<V>> {
        if self.ring != other.ring {
            return Err(Error::DimensionMismatch("series over different tau rings".into()));
        }
        let order = self.order.min(other.order);
        let mut out = TauSeries::zero(self.ring.clone(), self.degree + other.degree, order);
        for (i, a) in &self.terms {
            let pi = self.ring.mono_parity(i);
            for (j, b) in &other.terms {
                if i.len() + j.len() > order {
                    continue;
                }
                let Some((s, m)) = self.ring.merge(i, j) else {
                    continue;
                };
                let pb = i64::from(other.coeff_degree(j).rem_euclid(2));
                let sign = s * scalar::sign(pi * pb);
                out.insert(m, f(a, b).scale(&sign));
            }
        }
        Ok(out)
    }

    /// `exp(x) = Σ x^n / n!` truncated at the series order; `x` must have no
    /// τ-constant term and degree 0.
    pub fn exp_with(&self, one: C, mul: impl Fn(&C, &C) -> C) -> Result<Self> {
        if self.constant_term().is_some() {
            return Err(Error::ExpOfConstant);
        }
        if self.degree != 0 {
            return Err(Error::DegreeInconsistency(format!(
                "exponential of a series of degree {}",
                self.degree
            )));
        }
        let mut result = Self::constant(self.ring.clone(), 0, self.order, one.clone());
        let mut power = result.clone();
        for n in 1..=self.order {
            power = power.mul_with(self, &mul)?.scale(&Scalar::new(1.into(), (n as i64).into()));
            if power.is_zero() {
                break;
            }
            result = result.try_add(&power)?;
        }
        Ok(result)
    }

    /// Left derivative ∂/∂τ^k.
    pub fn derivative(&self, k: usize) -> Self {
        let pk = self.ring.parity(k);
        let mut out = Self::zero(
            self.ring.clone(),
            self.degree - self.ring.degree(k),
            self.order.saturating_sub(1),
        );
        for (m, c) in &self.terms {
            let mult = m.multiplicity(k);
            if mult == 0 {
                continue;
            }
            let pc = i64::from(self.coeff_degree(m).rem_euclid(2));
            let before: i64 = m
                .vars()
                .iter()
                .take_while(|&&v| v < k)
                .map(|&v| self.ring.parity(v))
                .sum();
            let sign = scalar::sign(pc * pk + pk * before) * scalar::int(mult as i64);
            out.insert(m.without(k).expect("present"), c.scale(&sign));
        }
        out
    }

    /// Largest τ-order with a nonzero term.
    pub fn max_order_present(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::len).max()
    }

    pub fn render(&self, fmt_coeff: impl Fn(&C) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(m, c)| format!("({})*{}", fmt_coeff(c), self.ring.render(m)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl<C: Linear> Linear for TauSeries<C> {
    fn zero_like(&self) -> Self {
        Self::zero(self.ring.clone(), self.degree, self.order)
    }
    fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("adding incompatible tau series")
    }
    fn scale(&self, c: &Scalar) -> Self {
        TauSeries::scale(self, c)
    }
    fn is_zero(&self) -> bool {
        TauSeries::is_zero(self)
    }
}

impl TauSeries<Scalar> {
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_with(other, |a, b| a * b)
    }
}

/// Products of substituted variables, memoized by monomial.
pub struct Substitution<'a> {
    images: &'a [TauSeries<Scalar>],
    cache: BTreeMap<Monomial, TauSeries<Scalar>>,
    target: Arc<TauRing>,
    order: usize,
}

impl<'a> Substitution<'a> {
    /// `images[i]` is the series substituted for τ^i; each must have degree
    /// `|τ^i|` and no constant term.
    pub fn new(images: &'a [TauSeries<Scalar>], target: Arc<TauRing>, order: usize) -> Self {
        Self {
            images,
            cache: BTreeMap::new(),
            target,
            order,
        }
    }

    /// Image of the sorted monomial `m`.
    pub fn monomial(&mut self, m: &Monomial) -> Result<TauSeries<Scalar>> {
        if let Some(s) = self.cache.get(m) {
            return Ok(s.clone());
        }
        let s = match m.vars().split_first() {
            None => TauSeries::constant(self.target.clone(), 0, self.order, scalar::one()),
            Some((&first, rest)) => {
                let tail = self.monomial(&Monomial(rest.to_vec()))?;
                self.images[first].clone().with_order(self.order).mul(&tail)?
            }
        };
        self.cache.insert(m.clone(), s.clone());
        Ok(s)
    }

    /// Substitutes into a series whose coefficients are to the left of the
    /// variables: `Σ c_I τ^I ↦ Σ c_I · (image of τ^I)`.
    pub fn apply<C: Linear>(&mut self, x: &TauSeries<C>) -> Result<TauSeries<C>> {
        let mut out = TauSeries::zero(self.target.clone(), x.degree(), self.order);
        for (m, c) in x.terms() {
            let img = self.monomial(m)?;
            for (j, s) in img.terms() {
                out.insert(j.clone(), c.scale(s));
            }
        }
        Ok(out)
    }
}

/// Inverse of a coordinate change `τ^i = t^i + Q^i(t)` with `Q = O(t²)`,
/// computed by fixed-point iteration to the series order.
pub fn invert_coordinates(forward: &[TauSeries<Scalar>]) -> Result<Vec<TauSeries<Scalar>>> {
    let Some(first) = forward.first() else {
        return Ok(Vec::new());
    };
    let ring = first.ring().clone();
    let order = first.order();
    let ids: Vec<TauSeries<Scalar>> = (0..ring.len())
        .map(|i| TauSeries::linear(ring.clone(), ring.degree(i), order, i, scalar::one()))
        .collect();
    for (i, f) in forward.iter().enumerate() {
        let lin = f.homogeneous_part(1);
        if f.constant_term().is_some() || lin != ids[i].clone() {
            return Err(Error::Verification(format!(
                "coordinate change is not identity to first order in variable {i}"
            )));
        }
    }
    let corrections: Vec<TauSeries<Scalar>> = forward
        .iter()
        .zip(&ids)
        .map(|(f, id)| f.try_sub(id))
        .collect::<Result<_>>()?;
    let mut inv = ids.clone();
    for _ in 0..order {
        let mut sub = Substitution::new(&inv, ring.clone(), order);
        let next: Vec<TauSeries<Scalar>> = corrections
            .iter()
            .zip(&ids)
            .map(|(q, id)| id.try_sub(&sub.apply(q)?))
            .collect::<Result<_>>()?;
        if next == inv {
            break;
        }
        inv = next;
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gla::scalar::{frac, int};

    fn ring(degs: &[i32]) -> Arc<TauRing> {
        Arc::new(TauRing::new(degs.to_vec()))
    }

    #[test]
    fn odd_variables_square_to_zero() {
        let r = ring(&[1, 0]);
        assert!(r.normalize(vec![0, 0]).is_none());
        assert_eq!(r.normalize(vec![1, 1]).unwrap().1.vars(), &[1, 1]);
        let r2 = ring(&[1, 1]);
        let (s, m) = r2.normalize(vec![1, 0]).unwrap();
        assert_eq!(s, int(-1));
        assert_eq!(m.vars(), &[0, 1]);
    }

    #[test]
    fn exp_of_odd_linear_term() {
        let r = ring(&[1]);
        // degree-0 series: coefficient of degree -1 times odd τ
        let x = TauSeries::linear(r.clone(), 0, 3, 0, int(5));
        let e = x.exp_with(int(1), |a, b| a * b).unwrap();
        assert_eq!(e.num_terms(), 2);
        assert_eq!(e.coeff(&Monomial::var(0)), Some(&int(5)));
    }

    #[test]
    fn exp_of_even_variable() {
        let r = ring(&[0]);
        let x = TauSeries::linear(r, 0, 4, 0, int(1));
        let e = x.exp_with(int(1), |a, b| a * b).unwrap();
        let m = r_mono(&[0, 0, 0, 0]);
        assert_eq!(e.coeff(&m), Some(&frac(1, 24)));
    }

    fn r_mono(v: &[usize]) -> Monomial {
        Monomial(v.to_vec())
    }

    #[test]
    fn exp_rejects_constant_term() {
        let r = ring(&[0]);
        let x = TauSeries::constant(r, 0, 2, int(1));
        assert!(matches!(x.exp_with(int(1), |a, b| a * b), Err(Error::ExpOfConstant)));
    }

    #[test]
    fn left_derivative_signs() {
        let r = ring(&[1, 1]);
        // τ0 τ1 with a scalar (degree 0) coefficient; series degree 2
        let mut x = TauSeries::zero(r.clone(), 2, 2);
        x.insert(r_mono(&[0, 1]), int(1));
        assert_eq!(x.derivative(0).coeff(&Monomial::var(1)), Some(&int(1)));
        assert_eq!(x.derivative(1).coeff(&Monomial::var(0)), Some(&int(-1)));
        let mut y = TauSeries::zero(r, 0, 2);
        y.insert(r_mono(&[0, 0]).clone(), int(0));
        assert!(y.is_zero());
    }

    #[test]
    fn even_derivative_counts_multiplicity() {
        let r = ring(&[2]);
        let mut x = TauSeries::zero(r, 6, 3);
        x.insert(r_mono(&[0, 0, 0]), int(1));
        assert_eq!(x.derivative(0).coeff(&r_mono(&[0, 0])), Some(&int(3)));
    }

    #[test]
    fn coordinate_inversion_round_trip() {
        let r = ring(&[0, 0]);
        let mut f0 = TauSeries::linear(r.clone(), 0, 3, 0, int(1));
        f0.insert(r_mono(&[0, 1]), int(2));
        f0.insert(r_mono(&[1, 1, 1]), int(-1));
        let mut f1 = TauSeries::linear(r.clone(), 0, 3, 1, int(1));
        f1.insert(r_mono(&[0, 0]), frac(1, 2));
        let fwd = vec![f0, f1];
        let inv = invert_coordinates(&fwd).unwrap();
        let mut sub = Substitution::new(&inv, r.clone(), 3);
        for (i, f) in fwd.iter().enumerate() {
            let comp = sub.apply(f).unwrap();
            assert_eq!(comp, TauSeries::linear(r.clone(), 0, 3, i, int(1)));
        }
    }
}
