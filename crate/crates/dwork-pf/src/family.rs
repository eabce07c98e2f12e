//! Combinatorics of the family `w_1 X_1^d + ... + w_n X_n^d - dλ X^W = 0`.
//!
//! A family is the validated triple `(n, d, W)` with `Σw_i = d`,
//! `gcd(w_1, ..., w_n) = 1` and `d ≥ n ≥ 3`, together with two derived
//! quantities: `d_W = lcm(w_i)·d` and a Bézout vector `b` with
//! `Σ b_i w_i = 1`. Character vectors `V ∈ (ℤ/d)^n` with zero coordinate sum
//! select the eigencomponents of the cohomology of the fibers; all of the
//! arithmetic of components (rank, the index sets governing operator
//! reduction, Frobenius pullback `V ↦ p^{-1}V`) lives here.

use num_integer::Integer;

use crate::error::FamilyError;

/// Validated family data. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyData {
    n: usize,
    d: u64,
    w: Vec<u64>,
    /// lcm(w_1, ..., w_n) · d
    d_w: u64,
    /// Deterministic Bézout vector: Σ b_i w_i = 1.
    b: Vec<i64>,
}

/// A character class `V` with zero coordinate sum, stored through its
/// canonical lifts `ṽ_i ∈ {0, ..., d-1}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CharVector {
    tilde: Vec<u64>,
    /// deg V = (Σ ṽ_i)/d, an exact integer.
    deg: u64,
    /// N = Σ b_i ṽ_i for the family's b.
    n_shift: i64,
}

impl CharVector {
    pub fn lifts(&self) -> &[u64] {
        &self.tilde
    }

    pub fn deg(&self) -> u64 {
        self.deg
    }

    /// The integer `N = Σ b_i ṽ_i` used by the descent to the coordinate
    /// `t = λ^{-d}`.
    pub fn n_shift(&self) -> i64 {
        self.n_shift
    }

    /// True when every coordinate is nonzero mod d.
    pub fn is_totally_nonzero(&self) -> bool {
        self.tilde.iter().all(|&v| v != 0)
    }

    fn first_zero(&self) -> Option<usize> {
        self.tilde.iter().position(|&v| v == 0)
    }
}

/// Extended gcd: returns `(g, x, y)` with `a·x + b·y = g`.
fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = extended_gcd(b, a.rem_euclid(b));
        (g, y, x - (a / b) * y)
    }
}

impl FamilyData {
    /// Validate `(n, d, W)` and derive `d_W` and the Bézout vector `b`.
    ///
    /// `b` is computed by folding extended Euclid over the weights from the
    /// left, at each step taking the Bézout coefficient of the new weight
    /// with minimal absolute value; a tie picks the sign that keeps the
    /// accumulated coefficients (in particular `b_1`) nonnegative.
    pub fn new(n: usize, d: u64, w: Vec<u64>) -> Result<Self, FamilyError> {
        if w.len() != n {
            return Err(FamilyError::BadLength {
                got: w.len(),
                want: n,
            });
        }
        if w.contains(&0) {
            return Err(FamilyError::NonPositiveWeight);
        }
        if n < 3 || d < n as u64 {
            return Err(FamilyError::SizeOrder { n, d });
        }
        let sum: u64 = w.iter().sum();
        if sum != d {
            return Err(FamilyError::WeightSum { sum, d });
        }
        let gcd = w.iter().fold(0u64, |g, &wi| g.gcd(&wi));
        if gcd != 1 {
            return Err(FamilyError::WeightGcd(gcd));
        }
        let lcm = w.iter().fold(1u64, |l, &wi| l.lcm(&wi));
        let d_w = lcm * d;

        let mut b: Vec<i128> = vec![1];
        let mut g = w[0] as i128;
        for &wi in &w[1..] {
            let wi = wi as i128;
            let (g_new, _, y0) = extended_gcd(g, wi);
            // y is unique mod g/g_new; take the centered representative,
            // breaking the even tie toward the negative side so that
            // x = (g_new - y·w)/g stays nonnegative.
            let m = g / g_new;
            let mut y = y0.rem_euclid(m);
            if 2 * y >= m {
                y -= m;
            }
            let x = (g_new - y * wi) / g;
            for c in &mut b {
                *c *= x;
            }
            b.push(y);
            g = g_new;
        }
        debug_assert_eq!(g, 1);
        let b: Vec<i64> = b.into_iter().map(|c| i64::try_from(c).unwrap()).collect();
        debug_assert_eq!(
            b.iter().zip(&w).map(|(&bi, &wi)| bi * wi as i64).sum::<i64>(),
            1
        );
        Ok(FamilyData { n, d, w, d_w, b })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn weights(&self) -> &[u64] {
        &self.w
    }

    pub fn d_w(&self) -> u64 {
        self.d_w
    }

    pub fn bezout(&self) -> &[i64] {
        &self.b
    }

    /// Build a character vector from coordinates (any integers; reduced
    /// mod d). Requires Σv ≡ 0 mod d.
    pub fn char_vector(&self, v: &[i64]) -> Result<CharVector, FamilyError> {
        if v.len() != self.n {
            return Err(FamilyError::BadLength {
                got: v.len(),
                want: self.n,
            });
        }
        let tilde: Vec<u64> = v
            .iter()
            .map(|&vi| vi.rem_euclid(self.d as i64) as u64)
            .collect();
        let sum: u64 = tilde.iter().sum();
        if !sum.is_multiple_of(self.d) {
            return Err(FamilyError::CoordinateSum {
                rem: sum % self.d,
                d: self.d,
            });
        }
        let n_shift = tilde
            .iter()
            .zip(&self.b)
            .map(|(&t, &bi)| t as i64 * bi)
            .sum();
        Ok(CharVector {
            deg: sum / self.d,
            tilde,
            n_shift,
        })
    }

    fn char_vector_from_lifts(&self, tilde: Vec<u64>) -> CharVector {
        let sum: u64 = tilde.iter().sum();
        debug_assert!(sum.is_multiple_of(self.d));
        let n_shift = tilde
            .iter()
            .zip(&self.b)
            .map(|(&t, &bi)| t as i64 * bi)
            .sum();
        CharVector {
            deg: sum / self.d,
            tilde,
            n_shift,
        }
    }

    /// Translate by `r·W` mod d.
    pub fn translate(&self, v: &CharVector, r: u64) -> CharVector {
        let tilde = v
            .tilde
            .iter()
            .zip(&self.w)
            .map(|(&t, &wi)| (t + r * wi) % self.d)
            .collect();
        self.char_vector_from_lifts(tilde)
    }

    /// Rank of the component of `V`: the number of `r ∈ ℤ/d` with `V + rW`
    /// totally nonzero, by direct enumeration.
    pub fn rank(&self, v: &CharVector) -> usize {
        (0..self.d)
            .filter(|&r| self.translate(v, r).is_totally_nonzero())
            .count()
    }

    fn require_totally_nonzero(&self, v: &CharVector) -> Result<(), FamilyError> {
        match v.first_zero() {
            Some(index) => Err(FamilyError::NotTotallyNonzero { index }),
            None => Ok(()),
        }
    }

    /// `J(V, W) = {r ∈ {0..d-1} : ṽ_i + r·w_i ≡ 0 mod d for some i}`.
    pub fn index_set_j(&self, v: &CharVector) -> Result<Vec<u64>, FamilyError> {
        self.require_totally_nonzero(v)?;
        Ok((0..self.d)
            .filter(|&r| {
                v.tilde
                    .iter()
                    .zip(&self.w)
                    .any(|(&t, &wi)| (t + r * wi) % self.d == 0)
            })
            .collect())
    }

    /// `I(V, W)`: the integers among `d - (ṽ_i + j·d)/w_i` for all `i` and
    /// `0 ≤ j < w_i`, deduplicated and sorted.
    pub fn index_set_i(&self, v: &CharVector) -> Result<Vec<u64>, FamilyError> {
        self.require_totally_nonzero(v)?;
        let mut out: Vec<u64> = Vec::new();
        for (&t, &wi) in v.tilde.iter().zip(&self.w) {
            for j in 0..wi {
                let num = t + j * self.d;
                if num.is_multiple_of(wi) {
                    out.push(self.d - num / wi);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Frobenius pullback `V ↦ p^{-1}·V` (componentwise, mod d).
    pub fn frobenius_pullback(
        &self,
        v: &CharVector,
        p: u64,
    ) -> Result<CharVector, FamilyError> {
        let d = self.d as i128;
        let (g, x, _) = extended_gcd(p as i128, d);
        if g != 1 {
            return Err(FamilyError::PNotCoprime { p, d: self.d });
        }
        let p_inv = x.rem_euclid(d) as u64;
        let tilde = v.tilde.iter().map(|&t| (t * p_inv) % self.d).collect();
        Ok(self.char_vector_from_lifts(tilde))
    }

    /// One representative per orbit of totally nonzero classes under
    /// `V ↦ V + rW`: the lexicographically least totally nonzero member,
    /// sorted lexicographically.
    pub fn representatives(&self) -> Vec<CharVector> {
        let mut reps: Vec<Vec<u64>> = Vec::new();
        let mut current = vec![0u64; self.n];
        loop {
            let sum: u64 = current.iter().sum();
            if sum.is_multiple_of(self.d) && current.iter().all(|&t| t != 0) {
                let mut least = current.clone();
                for r in 1..self.d {
                    let shifted: Vec<u64> = current
                        .iter()
                        .zip(&self.w)
                        .map(|(&t, &wi)| (t + r * wi) % self.d)
                        .collect();
                    if shifted.iter().all(|&t| t != 0) && shifted < least {
                        least = shifted;
                    }
                }
                if least == current {
                    reps.push(current.clone());
                }
            }
            // Odometer over (ℤ/d)^n.
            let mut i = self.n;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                current[i] += 1;
                if current[i] < self.d {
                    break;
                }
                current[i] = 0;
            }
            if current.iter().all(|&t| t == 0) {
                break;
            }
        }
        reps.sort_unstable();
        reps.into_iter()
            .map(|t| self.char_vector_from_lifts(t))
            .collect()
    }

    /// Group the orbit representatives by the symmetry of the family:
    /// coordinate permutations that preserve the weight vector give
    /// isomorphic components with identical operators. Returns, per class,
    /// the lexicographically least representative and the number of orbit
    /// representatives it stands for.
    pub fn symmetry_classes(&self) -> Vec<(CharVector, usize)> {
        // Canonical key: minimum over translations of the vector with
        // equal-weight blocks sorted.
        let key = |tilde: &[u64]| -> Vec<u64> {
            let mut best: Option<Vec<u64>> = None;
            for r in 0..self.d {
                let shifted: Vec<u64> = tilde
                    .iter()
                    .zip(&self.w)
                    .map(|(&t, &wi)| (t + r * wi) % self.d)
                    .collect();
                let mut blocks: Vec<(u64, Vec<u64>)> = Vec::new();
                for (&wi, &t) in self.w.iter().zip(&shifted) {
                    match blocks.iter_mut().find(|(bw, _)| *bw == wi) {
                        Some((_, vals)) => vals.push(t),
                        None => blocks.push((wi, vec![t])),
                    }
                }
                let mut canon: Vec<u64> = Vec::with_capacity(self.n);
                for (_, mut vals) in blocks {
                    vals.sort_unstable();
                    canon.append(&mut vals);
                }
                if best.as_ref().is_none_or(|b| &canon < b) {
                    best = Some(canon);
                }
            }
            best.unwrap()
        };
        let mut classes: Vec<(Vec<u64>, CharVector, usize)> = Vec::new();
        for rep in self.representatives() {
            let k = key(&rep.tilde);
            match classes.iter_mut().find(|(ck, _, _)| *ck == k) {
                Some((_, _, count)) => *count += 1,
                None => classes.push((k, rep, 1)),
            }
        }
        classes.sort_by(|a, b| a.1.cmp(&b.1));
        classes.into_iter().map(|(_, rep, c)| (rep, c)).collect()
    }
}

/// All ordered positive compositions of `d` into `n` parts (test support).
#[cfg(test)]
pub(crate) fn compositions(d: u64, n: usize) -> Vec<Vec<u64>> {
    fn rec(rest: u64, slots: usize, acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if slots == 1 {
            if rest >= 1 {
                acc.push(rest);
                out.push(acc.clone());
                acc.pop();
            }
            return;
        }
        for v in 1..=rest.saturating_sub(slots as u64 - 1) {
            acc.push(v);
            rec(rest - v, slots - 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, n, &mut Vec::new(), &mut out);
    out
}
