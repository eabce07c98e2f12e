//! Dense truncated power series over `ℚ`.
//!
//! A series of order `N` stores exactly the coefficients of `λ^0 .. λ^{N-1}`;
//! arithmetic never reads or writes coefficients at or above the order.
//! The truncation order is explicit on every constructor and mixed-order
//! binary arithmetic is a usage error (a panic), never a silent truncation.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::ArithError;
use crate::poly::Poly;
use crate::rational::{rational_to_string, Rational};

/// Truncated power series: coefficients of `λ^k` for `k < order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncSeries {
    order: usize,
    coeffs: Vec<Rational>,
}

impl TruncSeries {
    /// Build from explicit coefficients, padding with zeros up to `order`.
    /// Coefficients beyond `order` are rejected rather than dropped.
    pub fn new(coeffs: Vec<Rational>, order: usize) -> Self {
        assert!(
            coeffs.len() <= order,
            "got {} coefficients for series of order {order}",
            coeffs.len()
        );
        let mut coeffs = coeffs;
        coeffs.resize(order, Rational::zero());
        TruncSeries { order, coeffs }
    }

    pub fn zero(order: usize) -> Self {
        TruncSeries::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        TruncSeries::monomial(Rational::one(), 0, order)
    }

    /// `c · λ^k`, or zero if `k ≥ order`.
    pub fn monomial(c: Rational, k: usize, order: usize) -> Self {
        let mut s = TruncSeries::zero(order);
        if k < order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> Rational) -> Self {
        TruncSeries {
            order,
            coeffs: (0..order).map(f).collect(),
        }
    }

    pub fn from_poly(p: &Poly, order: usize) -> Self {
        TruncSeries::from_fn(order, |k| p.coeff(k))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        assert!(k < self.order, "coefficient {k} beyond order {}", self.order);
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn eval0(&self) -> Rational {
        self.coeffs.first().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn check_order(&self, rhs: &TruncSeries, op: &str) {
        assert_eq!(
            self.order, rhs.order,
            "mixed truncation orders in series {op}: {} vs {}",
            self.order, rhs.order
        );
    }

    pub fn add(&self, rhs: &TruncSeries) -> TruncSeries {
        self.check_order(rhs, "addition");
        TruncSeries::from_fn(self.order, |k| &self.coeffs[k] + &rhs.coeffs[k])
    }

    pub fn sub(&self, rhs: &TruncSeries) -> TruncSeries {
        self.check_order(rhs, "subtraction");
        TruncSeries::from_fn(self.order, |k| &self.coeffs[k] - &rhs.coeffs[k])
    }

    pub fn neg(&self) -> TruncSeries {
        TruncSeries {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> TruncSeries {
        TruncSeries {
            order: self.order,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Cauchy product truncated to the common order.
    pub fn mul(&self, rhs: &TruncSeries) -> TruncSeries {
        self.check_order(rhs, "multiplication");
        let mut coeffs = vec![Rational::zero(); self.order];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(self.order - i).enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = &coeffs[i + j] + a * b;
                }
            }
        }
        TruncSeries {
            order: self.order,
            coeffs,
        }
    }

    /// Multiply by a polynomial. A polynomial factor is exactly known, so
    /// the result is exact to the same order as `self`.
    pub fn mul_poly(&self, p: &Poly) -> TruncSeries {
        let mut coeffs = vec![Rational::zero(); self.order];
        for (i, a) in p.coeffs().iter().enumerate() {
            if a.is_zero() || i >= self.order {
                continue;
            }
            for (j, b) in self.coeffs.iter().take(self.order - i).enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = &coeffs[i + j] + a * b;
                }
            }
        }
        TruncSeries {
            order: self.order,
            coeffs,
        }
    }

    /// Multiplicative inverse to the same order; requires a unit constant
    /// term.
    pub fn inverse(&self) -> Result<TruncSeries, ArithError> {
        let a0 = self.eval0();
        if a0.is_zero() {
            return Err(ArithError::NonUnitSeries);
        }
        let a0_inv = a0.recip();
        let mut coeffs = vec![Rational::zero(); self.order];
        if self.order > 0 {
            coeffs[0] = a0_inv.clone();
        }
        for k in 1..self.order {
            // a0·b_k = -Σ_{j=1..k} a_j b_{k-j}
            let mut acc = Rational::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc += &self.coeffs[j] * &coeffs[k - j];
                }
            }
            coeffs[k] = -acc * &a0_inv;
        }
        Ok(TruncSeries {
            order: self.order,
            coeffs,
        })
    }

    /// `d/dλ`; the result order drops by one.
    pub fn derive(&self) -> TruncSeries {
        let order = self.order.saturating_sub(1);
        TruncSeries::from_fn(order, |k| {
            &self.coeffs[k + 1] * Rational::from_integer(((k + 1) as i64).into())
        })
    }

    /// `λ d/dλ`; no precision is lost.
    pub fn theta(&self) -> TruncSeries {
        TruncSeries::from_fn(self.order, |k| {
            &self.coeffs[k] * Rational::from_integer((k as i64).into())
        })
    }

    pub fn truncate(&self, order: usize) -> TruncSeries {
        assert!(order <= self.order, "cannot extend a truncated series");
        TruncSeries {
            order,
            coeffs: self.coeffs[..order].to_vec(),
        }
    }

    /// Multiply by `λ^k`, keeping the order (top coefficients fall off).
    pub fn shift_up(&self, k: usize) -> TruncSeries {
        TruncSeries::from_fn(self.order, |i| {
            if i >= k {
                self.coeffs[i - k].clone()
            } else {
                Rational::zero()
            }
        })
    }

    /// Exact division by `λ^k`. The top `k` coefficients are unknown after
    /// the shift, so the order drops by `k`.
    pub fn shift_down(&self, k: usize) -> Result<TruncSeries, ArithError> {
        if self.coeffs.iter().take(k).any(|c| !c.is_zero()) {
            return Err(ArithError::NotDivisible { power: k });
        }
        Ok(TruncSeries {
            order: self.order - k,
            coeffs: self.coeffs[k..].to_vec(),
        })
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Substitute `λ ↦ λ^p`. Exactness demands `self` to carry every needed
    /// source coefficient: `p·(order−1) ≥ target_order−1`.
    pub fn dilate(&self, p: usize, target_order: usize) -> TruncSeries {
        assert!(p >= 1);
        assert!(
            p * self.order >= target_order,
            "dilation by {p} to order {target_order} needs source order ≥ {}",
            target_order.div_ceil(p)
        );
        TruncSeries::from_fn(target_order, |k| {
            if k % p == 0 {
                self.coeffs[k / p].clone()
            } else {
                Rational::zero()
            }
        })
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let negative = c < &Rational::zero();
            let magnitude = if negative { -c } else { c.clone() };
            if wrote {
                write!(f, "{}", if negative { " - " } else { " + " })?;
            } else if negative {
                write!(f, "-")?;
            }
            match k {
                0 => write!(f, "{}", rational_to_string(&magnitude))?,
                _ => {
                    if magnitude.is_one() {
                        write!(f, "λ")?;
                    } else {
                        write!(f, "{}·λ", rational_to_string(&magnitude))?;
                    }
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        write!(f, " + O(λ^{})", self.order)
    }
}
