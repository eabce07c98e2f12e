//! Homogeneous polynomials in `X_1, ..., X_n` with coefficients in `ℚ(λ)`.
//!
//! These carry the numerators of the pole-order representation
//! `A / Q_λ^p · Ω` used by the verification oracle. Monomials are exponent
//! vectors of a fixed total degree, kept in graded-lexicographic order
//! (within one degree that is plain lexicographic order on the exponent
//! vector), which makes every monomial basis deterministic.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use crate::poly::Poly;
use crate::ratfun::RationalFunction;
use crate::rational::Rational;

/// Exponent vector; the total degree is the context's invariant.
pub type Monomial = Vec<u32>;

/// Homogeneous polynomial: every stored exponent vector sums to `degree`,
/// zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogPoly {
    n: usize,
    degree: u32,
    terms: BTreeMap<Monomial, RationalFunction>,
}

impl HomogPoly {
    pub fn zero(n: usize, degree: u32) -> Self {
        HomogPoly {
            n,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(n: usize, degree: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, RationalFunction)>,
    {
        let mut poly = HomogPoly::zero(n, degree);
        for (m, c) in terms {
            poly.add_term(m, c);
        }
        poly
    }

    /// Single monomial with coefficient 1.
    pub fn monomial(n: usize, exponents: Monomial) -> Self {
        let degree = exponents.iter().sum();
        HomogPoly::from_terms(n, degree, [(exponents, RationalFunction::one())])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &RationalFunction)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> RationalFunction {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(RationalFunction::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: RationalFunction) {
        assert_eq!(m.len(), self.n, "monomial arity mismatch");
        assert_eq!(
            m.iter().sum::<u32>(),
            self.degree,
            "monomial degree mismatch"
        );
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, rhs: &HomogPoly) -> HomogPoly {
        assert_eq!(self.degree, rhs.degree, "degree mismatch in addition");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &RationalFunction) -> HomogPoly {
        if c.is_zero() {
            return HomogPoly::zero(self.n, self.degree);
        }
        HomogPoly {
            n: self.n,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v * c))
                .collect(),
        }
    }

    /// Multiply by a polynomial in λ (a coefficient-only operation).
    pub fn scale_lambda_poly(&self, p: &Poly) -> HomogPoly {
        self.scale(&RationalFunction::from_poly(p.clone()))
    }

    /// Multiply every monomial by `X^shift` and every coefficient by `c`.
    pub fn mul_monomial(&self, shift: &Monomial, c: &RationalFunction) -> HomogPoly {
        let degree = self.degree + shift.iter().sum::<u32>();
        HomogPoly::from_terms(
            self.n,
            degree,
            self.terms.iter().map(|(m, v)| {
                let mono: Monomial =
                    m.iter().zip(shift).map(|(&a, &b)| a + b).collect();
                (mono, v * c)
            }),
        )
    }

    /// `∂/∂X_i`; the degree drops by one.
    pub fn partial(&self, i: usize) -> HomogPoly {
        assert!(self.degree > 0, "cannot differentiate degree 0");
        HomogPoly::from_terms(
            self.n,
            self.degree - 1,
            self.terms.iter().filter(|(m, _)| m[i] > 0).map(|(m, v)| {
                let mut mono = m.clone();
                mono[i] -= 1;
                let e = Rational::from_integer((m[i] as i64).into());
                (mono, v * &RationalFunction::constant(e))
            }),
        )
    }

    /// Apply `λ d/dλ` to every coefficient.
    pub fn theta_lambda(&self) -> HomogPoly {
        let lam = RationalFunction::from_poly(Poly::monomial(Rational::one(), 1));
        HomogPoly::from_terms(
            self.n,
            self.degree,
            self.terms
                .iter()
                .map(|(m, v)| (m.clone(), &v.derivative() * &lam)),
        )
    }
}

impl fmt::Display for HomogPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mono: String = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        if e == 1 {
                            format!("X{}", i + 1)
                        } else {
                            format!("X{}^{}", i + 1, e)
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("·");
                if mono.is_empty() {
                    format!("({})", c.display("λ"))
                } else {
                    format!("({})·{}", c.display("λ"), mono)
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// All monomials of the given total degree in `n` variables, in
/// lexicographic order.
pub fn monomials_of_degree(n: usize, degree: u32) -> Vec<Monomial> {
    fn rec(n: usize, degree: u32, acc: &mut Monomial, out: &mut Vec<Monomial>) {
        if n == 1 {
            acc.push(degree);
            out.push(acc.clone());
            acc.pop();
            return;
        }
        for e in (0..=degree).rev() {
            acc.push(e);
            rec(n - 1, degree - e, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, degree, &mut Vec::new(), &mut out);
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_int;

    fn c(k: i64) -> RationalFunction {
        RationalFunction::constant(rat_int(k))
    }

    #[test]
    fn add_and_cancel() {
        let m = vec![1u32, 2, 0];
        let a = HomogPoly::from_terms(3, 3, [(m.clone(), c(2))]);
        let b = HomogPoly::from_terms(3, 3, [(m.clone(), c(-2))]);
        assert!(a.add(&b).is_zero());
        assert_eq!(a.coeff(&m), c(2));
    }

    #[test]
    fn partial_derivative() {
        // ∂/∂X1 of X1²X2 = 2·X1X2
        let a = HomogPoly::monomial(2, vec![2, 1]);
        let da = a.partial(0);
        assert_eq!(da.degree(), 2);
        assert_eq!(da.coeff(&vec![1, 1]), c(2));
    }

    #[test]
    fn monomial_multiplication() {
        let a = HomogPoly::monomial(2, vec![1, 0]);
        let b = a.mul_monomial(&vec![1, 2], &c(3));
        assert_eq!(b.degree(), 4);
        assert_eq!(b.coeff(&vec![2, 2]), c(3));
    }

    #[test]
    fn theta_on_coefficients() {
        // λ·d/dλ of λ² is 2λ².
        let lam_sq = RationalFunction::from_poly(Poly::monomial(rat_int(1), 2));
        let a = HomogPoly::from_terms(2, 1, [(vec![1, 0], lam_sq)]);
        let t = a.theta_lambda();
        assert_eq!(
            t.coeff(&vec![1, 0]),
            RationalFunction::from_poly(Poly::monomial(rat_int(2), 2))
        );
    }

    #[test]
    fn monomial_enumeration() {
        let ms = monomials_of_degree(3, 2);
        assert_eq!(ms.len(), 6);
        assert!(ms.windows(2).all(|w| w[0] < w[1]), "sorted lexicographically");
        assert!(ms.iter().all(|m| m.iter().sum::<u32>() == 2));
        assert_eq!(monomials_of_degree(2, 0), vec![vec![0, 0]]);
    }
}
