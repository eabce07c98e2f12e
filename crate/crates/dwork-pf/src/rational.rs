//! Exact rational scalars and their string form.
//!
//! Everything in this crate is computed over `ℚ`. Rationals serialize as
//! `"num/den"` with the denominator omitted when it is 1; this convention is
//! shared by every JSON surface of the crate.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always stored reduced with positive
/// denominator (guaranteed by `num-rational`).
pub type Rational = num_rational::BigRational;

/// Shorthand for small literals.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for integers.
pub fn rat_int(num: i64) -> Rational {
    Rational::from_integer(BigInt::from(num))
}

/// Render as `"num/den"`, or `"num"` when the denominator is 1.
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `"num"` or `"num/den"`.
pub fn rational_from_str(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let den: BigInt = den.parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rational::new(num, den))
}

/// True when `r` is an integer.
pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

/// True when `r - s` is an integer (congruence mod ℤ).
pub fn congruent_mod_z(r: &Rational, s: &Rational) -> bool {
    is_integer(&(r - s))
}

/// True when `r` is an integer ≤ 0.
pub fn is_nonpositive_integer(r: &Rational) -> bool {
    is_integer(r) && !r.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_round_trip() {
        for (n, d, s) in [(1, 2, "1/2"), (-3, 4, "-3/4"), (5, 1, "5"), (0, 7, "0")] {
            let r = rat(n, d);
            assert_eq!(rational_to_string(&r), s);
            assert_eq!(rational_from_str(s).unwrap(), r);
        }
        assert!(rational_from_str("1/0").is_err());
        assert!(rational_from_str("x").is_err());
    }

    #[test]
    fn congruences() {
        assert!(congruent_mod_z(&rat(7, 2), &rat(1, 2)));
        assert!(!congruent_mod_z(&rat(1, 2), &rat(1, 3)));
        assert!(is_nonpositive_integer(&rat_int(0)));
        assert!(is_nonpositive_integer(&rat_int(-4)));
        assert!(!is_nonpositive_integer(&rat_int(2)));
        assert!(!is_nonpositive_integer(&rat(-1, 2)));
    }
}
