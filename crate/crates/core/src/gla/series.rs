//! Truncated power series and Laurent series in the formal parameter ħ.
//!
//! ħ has degree 2. An [`HbarSeries`] stores coefficients `0..=order`; past
//! the order a coefficient is either known to vanish (`exact`) or unknown.
//! A [`LaurentSeries`] additionally has a lowest exponent (everything below
//! it is zero) and a trusted window `[lo, hi]`; reading above `hi` is an
//! error rather than a silent zero.

use super::graded::{GradedMap, Linear};
use super::linalg::SparseVec;
use super::scalar::{self, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct HbarSeries<T> {
    coeffs: Vec<T>,
    exact: bool,
}

impl<T: Linear> HbarSeries<T> {
    /// `coeffs[m]` is the coefficient of ħ^m. Panics on an empty vector.
    pub fn new(coeffs: Vec<T>, exact: bool) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        Self { coeffs, exact }
    }

    /// `x` as a series with all higher coefficients zero.
    pub fn constant(x: T, order: usize) -> Self {
        let z = x.zero_like();
        let mut coeffs = vec![x];
        coeffs.resize(order + 1, z);
        Self { coeffs, exact: true }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> Result<T> {
        match self.coeffs.get(m) {
            Some(c) => Ok(c.clone()),
            None if self.exact => Ok(self.coeffs[0].zero_like()),
            None => Err(Error::OutsideWindow {
                exponent: m as i32,
                lo: 0,
                hi: self.order() as i32,
            }),
        }
    }

    /// Value at ħ = 0.
    pub fn at_zero(&self) -> &T {
        &self.coeffs[0]
    }

    /// Keeps coefficients up to `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        for m in 0..=order {
            coeffs.push(match self.coeffs.get(m) {
                Some(c) => c.clone(),
                None => self.coeffs[0].zero_like(),
            });
        }
        let dropped_nonzero = self.coeffs.iter().skip(order + 1).any(|c| !c.is_zero());
        let exact = self.exact && !dropped_nonzero;
        if order > self.order() && !self.exact {
            coeffs.truncate(self.order() + 1);
        }
        Self { coeffs, exact }
    }

    fn combined_order(&self, other: &Self) -> (usize, bool) {
        match (self.exact, other.exact) {
            (true, true) => (self.order().max(other.order()), true),
            (true, false) => (other.order(), false),
            (false, true) => (self.order(), false),
            (false, false) => (self.order().min(other.order()), false),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (order, exact) = self.combined_order(other);
        let coeffs = (0..=order)
            .map(|m| {
                self.coeff(m)
                    .expect("within window")
                    .add(&other.coeff(m).expect("within window"))
            })
            .collect();
        Self { coeffs, exact }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect(),
            exact: self.exact,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Linear::is_zero)
    }

    /// Cauchy product with a bilinear `f`, truncated at the known order.
    pub fn mul_with<U: Linear, V: Linear>(
        &self,
        other: &HbarSeries<U>,
        f: impl Fn(&T, &U) -> V,
    ) -> HbarSeries<V> {
        let order = match (self.exact, other.exact) {
            (true, true) => self.order() + other.order(),
            (true, false) => other.order(),
            (false, true) => self.order(),
            (false, false) => self.order().min(other.order()),
        };
        let exact = self.exact && other.exact;
        let zero = f(&self.coeffs[0], &other.coeffs[0]).zero_like();
        let mut coeffs = vec![zero; order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&f(a, b));
                }
            }
        }
        HbarSeries { coeffs, exact }
    }

    /// ħ ↦ -ħ.
    pub fn bar(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(m, x)| x.scale(&scalar::sign(m as i64)))
                .collect(),
            exact: self.exact,
        }
    }

    pub fn map<U: Linear>(&self, f: impl Fn(&T) -> U) -> HbarSeries<U> {
        HbarSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
            exact: self.exact,
        }
    }

    /// Indices `m >= 1` with a nonzero coefficient.
    pub fn higher_support(&self) -> Vec<usize> {
        (1..self.coeffs.len())
            .filter(|&m| !self.coeffs[m].is_zero())
            .collect()
    }
}

impl<T: Linear> Linear for HbarSeries<T> {
    fn zero_like(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(Linear::zero_like).collect(),
            exact: self.exact,
        }
    }
    fn add(&self, other: &Self) -> Self {
        HbarSeries::add(self, other)
    }
    fn scale(&self, c: &Scalar) -> Self {
        HbarSeries::scale(self, c)
    }
    fn is_zero(&self) -> bool {
        HbarSeries::is_zero(self)
    }
}

impl HbarSeries<GradedMap> {
    /// Composition of operator series.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let err = std::cell::RefCell::new(None);
        let out = self.mul_with(other, |a, b| match a.compose(b) {
            Ok(m) => m,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                a.zero_like()
            }
        });
        match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    pub fn apply(&self, v: &HbarSeries<SparseVec>) -> HbarSeries<SparseVec> {
        self.mul_with(v, |a, x| a.apply(x))
    }
}

/// Laurent series with a lowest exponent and a trusted upper bound.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries<T> {
    lo: i32,
    /// Upper end of the trusted window; `None` when the series is exact.
    hi: Option<i32>,
    /// Coefficients of ħ^lo, ħ^(lo+1), ...
    coeffs: Vec<T>,
    zero: T,
}

impl<T: Linear> LaurentSeries<T> {
    pub fn from_hbar(h: &HbarSeries<T>) -> Self {
        Self {
            lo: 0,
            hi: if h.is_exact() { None } else { Some(h.order() as i32) },
            coeffs: h.coeffs().to_vec(),
            zero: h.coeffs()[0].zero_like(),
        }
    }

    /// Single term `x ħ^e`, exact.
    pub fn monomial(x: T, e: i32) -> Self {
        Self {
            lo: e,
            hi: None,
            zero: x.zero_like(),
            coeffs: vec![x],
        }
    }

    pub fn zero(zero: T) -> Self {
        Self {
            lo: 0,
            hi: None,
            coeffs: Vec::new(),
            zero,
        }
    }

    pub fn lowest(&self) -> i32 {
        self.lo
    }

    /// Trusted window `[lo, hi]`; `hi = None` means every coefficient is known.
    pub fn window(&self) -> (i32, Option<i32>) {
        (self.lo, self.hi)
    }

    pub fn coeff(&self, e: i32) -> Result<T> {
        if let Some(hi) = self.hi {
            if e > hi {
                return Err(Error::OutsideWindow {
                    exponent: e,
                    lo: self.lo,
                    hi,
                });
            }
        }
        if e < self.lo {
            return Ok(self.zero.clone());
        }
        Ok(self
            .coeffs
            .get((e - self.lo) as usize)
            .cloned()
            .unwrap_or_else(|| self.zero.clone()))
    }

    /// Largest exponent with a stored coefficient (or `lo - 1`).
    fn stored_top(&self) -> i32 {
        self.lo + self.coeffs.len() as i32 - 1
    }

    /// Exponents that are both trusted and possibly nonzero.
    pub fn exponents(&self) -> std::ops::RangeInclusive<i32> {
        let top = match self.hi {
            Some(hi) => hi.min(self.stored_top()),
            None => self.stored_top(),
        };
        self.lo..=top
    }

    /// Multiplication by ħ^k.
    pub fn shift(&self, k: i32) -> Self {
        Self {
            lo: self.lo + k,
            hi: self.hi.map(|h| h + k),
            coeffs: self.coeffs.clone(),
            zero: self.zero.clone(),
        }
    }

    fn build(lo: i32, hi: Option<i32>, zero: T, mut get: impl FnMut(i32) -> T, top: i32) -> Self {
        let end = match hi {
            Some(h) => h.min(top),
            None => top,
        };
        let coeffs = if end < lo {
            Vec::new()
        } else {
            (lo..=end).map(&mut get).collect()
        };
        Self { lo, hi, coeffs, zero }
    }

    pub fn add(&self, other: &Self) -> Self {
        let lo = self.lo.min(other.lo);
        let hi = min_opt(self.hi, other.hi);
        let top = self.stored_top().max(other.stored_top());
        Self::build(
            lo,
            hi,
            self.zero.clone(),
            |e| {
                self.coeff(e)
                    .expect("trusted")
                    .add(&other.coeff(e).expect("trusted"))
            },
            top,
        )
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self {
            lo: self.lo,
            hi: self.hi,
            coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect(),
            zero: self.zero.clone(),
        }
    }

    /// Product with window propagation: the result is trusted up to
    /// `min(hi_a + lo_b, hi_b + lo_a)`.
    pub fn mul_with<U: Linear, V: Linear>(
        &self,
        other: &LaurentSeries<U>,
        zero: V,
        f: impl Fn(&T, &U) -> V,
    ) -> LaurentSeries<V> {
        let lo = self.lo + other.lo;
        let hi = min_opt(
            self.hi.map(|h| h + other.lo),
            other.hi.map(|h| h + self.lo),
        );
        let top = self.stored_top() + other.stored_top();
        let end = match hi {
            Some(h) => h.min(top),
            None => top,
        };
        let len = if end < lo { 0 } else { (end - lo + 1) as usize };
        let mut coeffs = vec![zero.clone(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= len {
                    break;
                }
                if !b.is_zero() {
                    coeffs[k] = coeffs[k].add(&f(a, b));
                }
            }
        }
        LaurentSeries { lo, hi, coeffs, zero }
    }

    pub fn is_zero_on_window(&self) -> bool {
        self.coeffs.iter().all(Linear::is_zero)
    }

    /// Exponents in the trusted window carrying a nonzero coefficient.
    pub fn nonzero_exponents(&self) -> Vec<i32> {
        self.exponents()
            .filter(|&e| !self.coeff(e).expect("trusted").is_zero())
            .collect()
    }

    /// Narrows the trusted window to `[lo, hi]`.
    pub fn limit(&self, hi: i32) -> Self {
        let hi = min_opt(self.hi, Some(hi));
        let top = self.stored_top();
        Self::build(self.lo, hi, self.zero.clone(), |e| self.coeff(e).expect("trusted"), top)
    }
}

impl<T: Linear> Linear for LaurentSeries<T> {
    fn zero_like(&self) -> Self {
        LaurentSeries::zero(self.zero.clone())
    }
    fn add(&self, other: &Self) -> Self {
        LaurentSeries::add(self, other)
    }
    fn scale(&self, c: &Scalar) -> Self {
        LaurentSeries::scale(self, c)
    }
    fn is_zero(&self) -> bool {
        self.is_zero_on_window()
    }
}

impl LaurentSeries<SparseVec> {
    /// Applies an operator series `Σ ħ^k D_k` coefficientwise.
    pub fn apply_operator(&self, op: &HbarSeries<GradedMap>) -> Self {
        let hi = if op.is_exact() {
            self.hi
        } else {
            min_opt(self.hi, Some(self.lo + op.order() as i32))
        };
        let top = self.stored_top() + op.order() as i32;
        Self::build(
            self.lo,
            hi,
            SparseVec::new(),
            |e| {
                let mut acc = SparseVec::new();
                for (k, d) in op.coeffs().iter().enumerate() {
                    let src = e - k as i32;
                    if src < self.lo {
                        break;
                    }
                    acc = acc.add(&d.apply(&self.coeff(src).expect("trusted")));
                }
                acc
            },
            top,
        )
    }
}

fn min_opt(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gla::scalar::int;

    fn s(xs: &[i64], exact: bool) -> HbarSeries<Scalar> {
        HbarSeries::new(xs.iter().map(|&x| int(x)).collect(), exact)
    }

    #[test]
    fn bar_flips_odd_coefficients() {
        assert_eq!(s(&[1, 2, 3], true).bar(), s(&[1, -2, 3], true));
    }

    #[test]
    fn product_respects_truncation() {
        let a = s(&[1, 1], false);
        let b = s(&[1, -1, 0, 0], true);
        let p = a.mul_with(&b, |x, y| x * y);
        assert_eq!(p.order(), 1);
        assert!(!p.is_exact());
        assert_eq!(p.coeffs(), &[int(1), int(0)]);
        assert!(p.coeff(2).is_err());
    }

    #[test]
    fn laurent_window_propagation() {
        // (ħ^-1 + ? ...) known up to ħ^1 times ħ^-1 known up to ħ^0
        let a = LaurentSeries::from_hbar(&s(&[1, 2, 3], false)).shift(-1);
        let b = LaurentSeries::from_hbar(&s(&[1, 1], false)).shift(-1);
        let p = a.mul_with(&b, int(0), |x, y| x * y);
        assert_eq!(p.window(), (-2, Some(-1)));
        assert_eq!(p.coeff(-2).unwrap(), int(1));
        assert_eq!(p.coeff(-1).unwrap(), int(3));
        assert!(p.coeff(0).is_err());
        assert_eq!(p.coeff(-5).unwrap(), int(0));
    }

    #[test]
    fn exact_series_read_past_order_as_zero() {
        let a = s(&[1, 1], true);
        assert_eq!(a.coeff(7).unwrap(), int(0));
        let l = LaurentSeries::from_hbar(&a);
        assert_eq!(l.coeff(7).unwrap(), int(0));
    }
}
