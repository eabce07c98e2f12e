//! Dense univariate polynomials over `ℚ`.
//!
//! These are the coefficient polynomials `c_j(λ)` of differential operators
//! and the building blocks of [`crate::ratfun::RationalFunction`]. Degrees
//! stay small here; no asymptotically fast multiplication is provided.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::rational::{rational_to_string, Rational};

/// Polynomial in one variable, coefficients from lowest power upward.
/// Invariant: no trailing zero coefficients (zero = empty vector).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// `c · x^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Constant term (value at 0).
    pub fn eval0(&self) -> Rational {
        self.coeff(0)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * Rational::from_integer((i as i64 + 1).into()))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiply by `x^k`.
    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Largest `k` with `x^k | self`; 0 for the zero polynomial.
    pub fn valuation(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(0)
    }

    /// Exact division by `x^k`; panics if not divisible.
    pub fn shift_down(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        assert!(
            self.valuation() >= k,
            "polynomial not divisible by x^{k}"
        );
        Poly {
            coeffs: self.coeffs[k..].to_vec(),
        }
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let dd = divisor.degree().unwrap();
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() / &lead;
            if !factor.is_zero() {
                for (i, c) in divisor.coeffs.iter().enumerate() {
                    let t = c * &factor;
                    rem[k + i] = &rem[k + i] - t;
                }
                quot[k] = factor;
            }
            rem.pop();
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// Monic gcd via the Euclidean algorithm.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.into_monic()
    }

    /// Scale so the leading coefficient is 1 (zero stays zero).
    pub fn into_monic(self) -> Poly {
        match self.leading() {
            None => self,
            Some(l) if l.is_one() => self,
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Substitute `x ↦ x^factor`.
    pub fn stretch(&self, factor: usize) -> Poly {
        assert!(factor >= 1);
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs =
            vec![Rational::zero(); (self.coeffs.len() - 1) * factor + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[k * factor] = c.clone();
            }
        }
        Poly { coeffs }
    }

    /// Substitute `x ↦ c·x` (used for `λ ↦ λ^p` style rescalings elsewhere,
    /// and for sign flips here).
    pub fn scale_argument(&self, c: &Rational) -> Poly {
        let mut pow = Rational::one();
        Poly::new(
            self.coeffs
                .iter()
                .map(|a| {
                    let v = a * &pow;
                    pow = &pow * c;
                    v
                })
                .collect(),
        )
    }

    /// Render with the given variable name, highest power first.
    pub fn display(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let one = Rational::one();
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c < &Rational::zero();
            let magnitude = if negative { -c } else { c.clone() };
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let cs = rational_to_string(&magnitude);
            match k {
                0 => out.push_str(&cs),
                _ => {
                    if magnitude == one {
                        out.push_str(var);
                    } else {
                        out.push_str(&format!("{cs}·{var}"));
                    }
                    if k > 1 {
                        out.push_str(&format!("^{k}"));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display("x"))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| self.coeff(k) + rhs.coeff(k))
                .collect(),
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| self.coeff(k) - rhs.coeff(k))
                .collect(),
        )
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs =
            vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = &coeffs[i + j] + a * b;
                }
            }
        }
        Poly::new(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn p(cs: &[i64]) -> Poly {
        Poly::new(cs.iter().map(|&c| rat_int(c)).collect())
    }

    #[test]
    fn arithmetic_basics() {
        let a = p(&[1, 2]); // 1 + 2x
        let b = p(&[3, 0, 1]); // 3 + x^2
        assert_eq!(&a + &b, p(&[4, 2, 1]));
        assert_eq!(&a * &b, p(&[3, 6, 1, 2]));
        assert_eq!((&a - &a), Poly::zero());
        assert_eq!(a.degree(), Some(1));
        assert_eq!(Poly::zero().degree(), None);
    }

    #[test]
    fn division_and_gcd() {
        let a = p(&[-1, 0, 0, 0, 1]); // x^4 - 1
        let b = p(&[-1, 1]); // x - 1
        let (q, r) = a.div_rem(&b);
        assert!(r.is_zero());
        assert_eq!(&q * &b, a);
        let g = a.gcd(&p(&[-1, 0, 1])); // gcd(x^4-1, x^2-1) = x^2-1
        assert_eq!(g, p(&[-1, 0, 1]));
    }

    #[test]
    fn derivative_and_eval() {
        let a = p(&[5, -3, 0, 2]); // 5 - 3x + 2x^3
        assert_eq!(a.derivative(), p(&[-3, 0, 6]));
        assert_eq!(a.eval(&rat_int(2)), rat_int(5 - 6 + 16));
        assert_eq!(a.eval0(), rat_int(5));
    }

    #[test]
    fn valuation_and_shifts() {
        let a = p(&[0, 0, 3, 1]);
        assert_eq!(a.valuation(), 2);
        assert_eq!(a.shift_down(2), p(&[3, 1]));
        assert_eq!(p(&[3, 1]).shift_up(2), a);
    }

    #[test]
    fn monic_and_pow() {
        let a = p(&[2, 4]);
        assert_eq!(a.into_monic(), Poly::new(vec![rat(1, 2), rat_int(1)]));
        assert_eq!(p(&[1, 1]).pow(2), p(&[1, 2, 1]));
        assert_eq!(p(&[1, 1]).pow(0), Poly::one());
    }
}
