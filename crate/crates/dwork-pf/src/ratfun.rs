//! Univariate rational functions over `ℚ`, always stored reduced.
//!
//! These carry the coefficients of companion matrices and the solutions of
//! the ideal-membership systems: denominators such as `λ^a (1 - λ^d)^b` are
//! first-class citizens here.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::ArithError;
use crate::poly::Poly;
use crate::rational::Rational;
use crate::series::TruncSeries;

/// Fraction of polynomials with monic denominator and `gcd(num, den) = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RationalFunction {
                num,
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let lead = den.leading().unwrap().clone();
        if !lead.is_one() {
            let inv = lead.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RationalFunction { num, den }
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFunction {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        RationalFunction::from_poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        RationalFunction::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        RationalFunction::from_poly(Poly::one())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    /// Order of vanishing at 0 (negative for a pole); `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(self.num.valuation() as i64 - self.den.valuation() as i64)
    }

    /// Value at 0; errors when there is a pole there.
    pub fn eval0(&self) -> Result<Rational, ArithError> {
        let dv = self.den.valuation();
        if dv > 0 && self.num.valuation() < dv {
            return Err(ArithError::PoleAtOrigin {
                order: dv - self.num.valuation(),
            });
        }
        // gcd-reduced, so a regular value means den(0) ≠ 0 unless num shares
        // the λ power — which reduction already removed.
        Ok(self.num.eval0() / self.den.eval0())
    }

    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    pub fn derivative(&self) -> Self {
        let n = &self.num.derivative() * &self.den;
        let d = &self.num * &self.den.derivative();
        RationalFunction::new(&n - &d, &self.den * &self.den)
    }

    /// Expand as a power series; errors when there is a pole at 0.
    pub fn to_series(&self, order: usize) -> Result<TruncSeries, ArithError> {
        let dv = self.den.valuation();
        if dv > 0 {
            if self.num.valuation() < dv {
                return Err(ArithError::PoleAtOrigin {
                    order: dv - self.num.valuation(),
                });
            }
            let reduced = RationalFunction {
                num: self.num.shift_down(dv),
                den: self.den.shift_down(dv),
            };
            return reduced.to_series(order);
        }
        let den = TruncSeries::from_poly(&self.den, order)
            .inverse()
            .expect("unit denominator");
        Ok(TruncSeries::from_poly(&self.num, order).mul(&den))
    }

    /// Substitute `λ ↦ λ^p`.
    pub fn dilate_poly_power(&self, p: u32) -> Self {
        fn subst(poly: &Poly, p: u32) -> Poly {
            let mut out = Poly::zero();
            for (k, c) in poly.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    out = &out + &Poly::monomial(c.clone(), k * p as usize);
                }
            }
            out
        }
        RationalFunction::new(subst(&self.num, p), subst(&self.den, p))
    }

    pub fn display(&self, var: &str) -> String {
        if self.is_polynomial() {
            self.num.display(var)
        } else {
            format!("({}) / ({})", self.num.display(var), self.den.display(var))
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display("x"))
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        // Cross-reduce first to keep the quadratic gcd small.
        let a = RationalFunction::new(self.num.clone(), rhs.den.clone());
        let b = RationalFunction::new(rhs.num.clone(), self.den.clone());
        RationalFunction {
            num: &a.num * &b.num,
            den: &a.den * &b.den,
        }
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        self * &rhs.recip()
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_int;

    fn p(cs: &[i64]) -> Poly {
        Poly::new(cs.iter().map(|&c| rat_int(c)).collect())
    }

    #[test]
    fn reduction_invariants() {
        // (x^2 - 1)/(2x - 2) = (x + 1)/2, monic denominator.
        let f = RationalFunction::new(p(&[-1, 0, 1]), p(&[-2, 2]));
        assert_eq!(f.den(), &Poly::one());
        assert_eq!(
            f.num(),
            &Poly::new(vec![crate::rational::rat(1, 2), crate::rational::rat(1, 2)])
        );
    }

    #[test]
    fn arithmetic() {
        let x = RationalFunction::from_poly(p(&[0, 1]));
        let one = RationalFunction::one();
        let f = &one / &(&one - &x); // 1/(1-x)
        let g = &f - &one; // x/(1-x)
        assert_eq!(&g / &f, x);
        assert_eq!((&f * &f).den(), &(&p(&[-1, 1]) * &p(&[-1, 1])).into_monic());
    }

    #[test]
    fn series_expansion() {
        let f = RationalFunction::new(p(&[1]), p(&[1, -1])); // 1/(1-x)... den monic: (x-1) → -1/(x-1)
        let s = f.to_series(5).unwrap();
        assert_eq!(s, TruncSeries::new(vec![rat_int(1); 5], 5));
        // λ pole is rejected.
        let g = RationalFunction::new(p(&[1]), p(&[0, 1]));
        assert!(g.to_series(3).is_err());
        // λ-divisible numerator is fine.
        let h = RationalFunction::new(p(&[0, 0, 3]), p(&[0, 1]));
        assert_eq!(h.to_series(3).unwrap(), TruncSeries::new(vec![rat_int(0), rat_int(3)], 3));
        assert_eq!(h.valuation(), Some(1));
    }

    #[test]
    fn derivative_quotient_rule() {
        // d/dx [x/(1-x)] = 1/(1-x)^2
        let f = RationalFunction::new(p(&[0, 1]), p(&[1, -1]));
        let expect = RationalFunction::new(p(&[1]), &p(&[1, -1]) * &p(&[1, -1]));
        assert_eq!(f.derivative(), expect);
    }

    #[test]
    fn dilation() {
        let f = RationalFunction::new(p(&[0, 2]), p(&[1, -1]));
        let g = f.dilate_poly_power(3);
        assert_eq!(g, RationalFunction::new(p(&[0, 0, 0, 2]), p(&[1, 0, 0, -1])));
    }
}
