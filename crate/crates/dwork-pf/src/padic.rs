//! Reduction of exact rational data modulo `p^N`.
//!
//! Everything upstream is computed over `ℚ`; this module is the final
//! reporting step. A vector of rationals reduces to mantissas in `[0, p^N)`
//! together with one global `denominator_valuation`: the smallest `p`-adic
//! valuation occurring in the data (at most 0), so that
//! `value = p^denominator_valuation · mantissa` for every entry.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ArithError;
use crate::rational::Rational;

/// Square matrix of residues mod `p^N` with a shared power of `p` cleared
/// from denominators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicMatrix {
    pub p: u64,
    pub precision: u32,
    pub size: usize,
    /// Row-major entries, each reduced to `[0, p^N)`.
    pub entries: Vec<BigUint>,
    /// `v ≤ 0` with `p^{-v}·entry` integral for every original entry.
    pub denominator_valuation: i64,
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn valuation(n: &BigInt, p: &BigInt) -> u32 {
    let mut n = n.abs();
    let mut v = 0;
    while !n.is_zero() {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            break;
        }
        n = q;
        v += 1;
    }
    v
}

/// `p`-adic valuation of a nonzero rational (negative when `p` divides the
/// denominator).
fn rational_valuation(r: &Rational, p: &BigInt) -> i64 {
    valuation(r.numer(), p) as i64 - valuation(r.denom(), p) as i64
}

fn mod_inverse(a: &BigInt, modulus: &BigInt) -> BigInt {
    let e = a.extended_gcd(modulus);
    assert!(e.gcd.is_one(), "not invertible mod p^N");
    e.x.mod_floor(modulus)
}

/// Reduce a coefficient vector mod `p^N`. Returns the global denominator
/// valuation `v = min(0, min_k val_p(c_k))` and the mantissas of
/// `p^{-v}·c_k` in `[0, p^N)`.
pub fn reduce_coeffs(
    coeffs: &[Rational],
    p: u64,
    precision: u32,
) -> Result<(i64, Vec<BigUint>), ArithError> {
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    assert!(precision >= 1, "precision must be at least 1");
    let pb = BigInt::from(p);
    let v = coeffs
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| rational_valuation(c, &pb))
        .min()
        .unwrap_or(0)
        .min(0);
    let modulus = pb.pow(precision);
    let mantissas = coeffs
        .iter()
        .map(|c| {
            if c.is_zero() {
                return BigUint::zero();
            }
            // Split off the p-power so the remaining denominator is a unit.
            let vn = valuation(c.numer(), &pb);
            let vd = valuation(c.denom(), &pb);
            let unit_num = c.numer() / pb.pow(vn);
            let unit_den = c.denom() / pb.pow(vd);
            let shift = vn as i64 - vd as i64 - v;
            debug_assert!(shift >= 0);
            let scaled = (unit_num * pb.pow(shift.min(precision as i64) as u32))
                .mod_floor(&modulus);
            let den_inv = mod_inverse(&unit_den.mod_floor(&modulus), &modulus);
            (scaled * den_inv)
                .mod_floor(&modulus)
                .to_biguint()
                .expect("mod_floor is nonnegative")
        })
        .collect();
    Ok((v, mantissas))
}

impl PadicMatrix {
    /// Reduce a row-major square matrix of rationals.
    pub fn from_rationals(
        entries: &[Rational],
        size: usize,
        p: u64,
        precision: u32,
    ) -> Result<Self, ArithError> {
        assert_eq!(entries.len(), size * size);
        let (denominator_valuation, entries) = reduce_coeffs(entries, p, precision)?;
        Ok(PadicMatrix {
            p,
            precision,
            size,
            entries,
            denominator_valuation,
        })
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigUint {
        &self.entries[i * self.size + j]
    }

    pub fn entries_u64(&self) -> Vec<u64> {
        self.entries
            .iter()
            .map(|e| e.to_u64().expect("entry fits in u64"))
            .collect()
    }
}
