//! Truncated univariate Taylor arithmetic ("jets").
//!
//! A jet stores the coefficients c_m of f(t) = sum_m c_m t^m up to a fixed
//! truncation order. Products, quotients, exp, and composition propagate
//! derivatives exactly (to rounding), which is what the closed-form Wigner
//! evaluators need: their generating-function representation requires exact
//! high-order derivatives at a point, not numerical differences.
//!
//! Coefficients are generic so the same machinery runs over f64 and over
//! Complex64 (the error-function factor has complex Taylor coefficients even
//! though the final result is real).

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::SpecFunError;

/// Scalar types jets can carry.
pub trait JetScalar:
    Copy
    + PartialEq
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(v: f64) -> Self;
    fn exp(self) -> Self;
    fn is_zero(self) -> bool;
}

impl JetScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn is_zero(self) -> bool {
        self == 0.0
    }
}

impl JetScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn is_zero(self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

/// Dense truncated Taylor series; `coeff[m]` is f^(m)(0)/m!.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorJet<T> {
    coeff: Vec<T>,
}

impl<T: JetScalar> TaylorJet<T> {
    /// The constant series c + 0 t + ...
    pub fn constant(c: T, order: usize) -> Self {
        let mut coeff = vec![T::zero(); order + 1];
        coeff[0] = c;
        TaylorJet { coeff }
    }

    /// The series c + t (the expansion variable itself, offset by c).
    pub fn variable(c: T, order: usize) -> Self {
        let mut jet = Self::constant(c, order);
        if order >= 1 {
            jet.coeff[1] = T::one();
        }
        jet
    }

    pub fn from_coeffs(coeff: Vec<T>) -> Self {
        assert!(!coeff.is_empty(), "a jet needs at least the constant term");
        TaylorJet { coeff }
    }

    /// Truncation order (highest retained power).
    pub fn order(&self) -> usize {
        self.coeff.len() - 1
    }

    pub fn coeff(&self, m: usize) -> T {
        if m < self.coeff.len() {
            self.coeff[m]
        } else {
            T::zero()
        }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeff
    }

    /// m-th derivative at the expansion point: m! * coeff[m].
    pub fn derivative(&self, m: usize) -> T {
        self.coeff(m) * T::from_f64(super::factorial(m))
    }

    pub fn scale(&self, s: T) -> Self {
        TaylorJet {
            coeff: self.coeff.iter().map(|&c| c * s).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip_same_order(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip_same_order(rhs, |a, b| a - b)
    }

    fn zip_same_order(&self, rhs: &Self, op: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.order(), rhs.order(), "jet order mismatch");
        TaylorJet {
            coeff: self
                .coeff
                .iter()
                .zip(&rhs.coeff)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        }
    }

    /// Cauchy product truncated to the common order.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.order(), rhs.order(), "jet order mismatch");
        let n = self.coeff.len();
        let mut out = vec![T::zero(); n];
        for i in 0..n {
            if self.coeff[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                out[i + j] = out[i + j] + self.coeff[i] * rhs.coeff[j];
            }
        }
        TaylorJet { coeff: out }
    }

    /// Quotient q with q * rhs = self; requires rhs to be invertible
    /// (nonzero constant term).
    pub fn div(&self, rhs: &Self) -> Result<Self, SpecFunError> {
        assert_eq!(self.order(), rhs.order(), "jet order mismatch");
        if rhs.coeff[0].is_zero() {
            return Err(SpecFunError::Domain {
                function: "TaylorJet::div",
                message: "division by a jet with zero constant term".into(),
            });
        }
        let n = self.coeff.len();
        let mut q = vec![T::zero(); n];
        for m in 0..n {
            let mut acc = self.coeff[m];
            for i in 0..m {
                acc = acc - q[i] * rhs.coeff[m - i];
            }
            q[m] = acc / rhs.coeff[0];
        }
        Ok(TaylorJet { coeff: q })
    }

    /// exp of the jet via the standard convolution recurrence
    /// e_m = (1/m) sum_{i=1..m} i a_i e_{m-i}.
    pub fn exp(&self) -> Self {
        let n = self.coeff.len();
        let mut e = vec![T::zero(); n];
        e[0] = self.coeff[0].exp();
        for m in 1..n {
            let mut acc = T::zero();
            for i in 1..=m {
                acc = acc + T::from_f64(i as f64) * self.coeff[i] * e[m - i];
            }
            e[m] = acc / T::from_f64(m as f64);
        }
        TaylorJet { coeff: e }
    }

    /// Composition sum_m outer[m] * inner^m by Horner's scheme. The inner
    /// jet must have zero constant term (expansion about the same point).
    pub fn compose(outer: &[T], inner: &Self) -> Result<Self, SpecFunError> {
        if !inner.coeff[0].is_zero() {
            return Err(SpecFunError::Domain {
                function: "TaylorJet::compose",
                message: "inner jet must have zero constant term".into(),
            });
        }
        let order = inner.order();
        let mut acc = Self::constant(outer.last().copied().unwrap_or_else(T::zero), order);
        for &c in outer.iter().rev().skip(1) {
            acc = acc.mul(inner);
            acc.coeff[0] = acc.coeff[0] + c;
        }
        Ok(acc)
    }

    /// Jet of the l-th derivative of this series (about the same point),
    /// truncated to `order`: coefficient m becomes c_{m+l} (m+l)!/m!.
    pub fn derivative_jet(&self, l: usize, order: usize) -> Self {
        let mut out = vec![T::zero(); order + 1];
        for (m, slot) in out.iter_mut().enumerate() {
            if m + l < self.coeff.len() {
                let mut fac = 1.0;
                for r in 1..=l {
                    fac *= (m + r) as f64;
                }
                *slot = self.coeff[m + l] * T::from_f64(fac);
            }
        }
        TaylorJet { coeff: out }
    }

    /// Shorten to a lower truncation order.
    pub fn truncated(&self, order: usize) -> Self {
        assert!(order <= self.order());
        TaylorJet {
            coeff: self.coeff[..=order].to_vec(),
        }
    }
}

impl TaylorJet<Complex64> {
    /// Coefficient-wise real part. Valid when the expansion variable is
    /// real, so Re and d/dt commute.
    pub fn real_part(&self) -> TaylorJet<f64> {
        TaylorJet {
            coeff: self.coeff.iter().map(|c| c.re).collect(),
        }
    }
}

/// Coefficients of (1 + t)^p to the requested order (binomial series,
/// real exponent p).
pub fn pow_one_plus(p: f64, order: usize) -> TaylorJet<f64> {
    let mut coeff = vec![0.0; order + 1];
    coeff[0] = 1.0;
    for m in 0..order {
        coeff[m + 1] = coeff[m] * (p - m as f64) / (m as f64 + 1.0);
    }
    TaylorJet::from_coeffs(coeff)
}

/// Coefficients of (1 - t)^{-beta} to the requested order.
pub fn inv_pow_one_minus(beta: f64, order: usize) -> TaylorJet<f64> {
    let mut coeff = vec![0.0; order + 1];
    coeff[0] = 1.0;
    for m in 0..order {
        coeff[m + 1] = coeff[m] * (beta + m as f64) / (m as f64 + 1.0);
    }
    TaylorJet::from_coeffs(coeff)
}

/// Jet of mu(z) = (1+z)/(1-z) about z = 0: coefficients [1, 2, 2, ...].
pub fn moebius_ratio(order: usize) -> TaylorJet<f64> {
    let mut coeff = vec![2.0; order + 1];
    coeff[0] = 1.0;
    TaylorJet::from_coeffs(coeff)
}
