//! Differential operators in `D = λ d/dλ` (or `D = t d/dt`) and the
//! operator constructions attached to a family component.
//!
//! Operators live in the algebra `ℚ[λ]⟨D⟩` with the rewrite
//! `D·λ^m = λ^m (D + m)` and are kept in left normal form
//! `Σ_j c_j(λ) D^j`, polynomial coefficients on the left. The central
//! constructions for a totally nonzero class `V` are
//!
//! * `P'(V, W) = Π_{k=0}^{d-1}(D - k) - λ^d Π_{i,j}(D + (ṽ_i + jd)/w_i)`,
//!   an order-`d` annihilator of the class `ω_V`;
//! * its reduction `P(V, W)`: for every `k` in the index set `I(V, W)` the
//!   factor `(D - k)` leaves the left product and the matching `(D + d - k)`
//!   leaves the right product, dropping the order to the rank of the
//!   component.
//!
//! On the descent coordinate `t = λ^{-d}` the same data appears as a
//! hypergeometric operator `Hyp(α; β; t) = Π(D_t + β_i - 1) - t Π(D_t + α_i)`
//! whose parameter multisets come from [`build_hyp_prime`] and are trimmed
//! by [`HypParams::cancel`].

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{ArithError, FamilyError};
use crate::family::{CharVector, FamilyData};
use crate::poly::Poly;
use crate::ratfun::RationalFunction;
use crate::rational::{congruent_mod_z, rat_int, rational_to_string, Rational};
use crate::series::TruncSeries;

/// Which coordinate an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Lambda,
    T,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::Lambda => "lambda",
            Var::T => "t",
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Var::Lambda => "λ",
            Var::T => "t",
        }
    }
}

/// `λ d/dλ` acting on a polynomial coefficient.
fn theta_poly(p: &Poly) -> Poly {
    Poly::new(
        p.coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c * rat_int(k as i64))
            .collect(),
    )
}

/// Coefficients of `Π_i (X + shifts_i)`.
fn expand_linear_product(shifts: &[Rational]) -> Vec<Rational> {
    let mut coeffs = vec![Rational::one()];
    for s in shifts {
        let mut next = vec![Rational::zero(); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] = &next[k + 1] + c;
            next[k] = &next[k] + &(c * s);
        }
        coeffs = next;
    }
    coeffs
}

/// Differential operator `Σ_j c_j D^j` in left normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffOperator {
    var: Var,
    /// coeffs[j] multiplies D^j; no trailing zero coefficient.
    coeffs: Vec<Poly>,
}

impl DiffOperator {
    pub fn new(var: Var, mut coeffs: Vec<Poly>) -> Self {
        while coeffs.last().is_some_and(Poly::is_zero) {
            coeffs.pop();
        }
        DiffOperator { var, coeffs }
    }

    pub fn zero(var: Var) -> Self {
        DiffOperator {
            var,
            coeffs: Vec::new(),
        }
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Order in `D`, or `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, j: usize) -> Poly {
        self.coeffs.get(j).cloned().unwrap_or_else(Poly::zero)
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    /// Largest λ-degree appearing in any coefficient.
    pub fn lambda_degree(&self) -> usize {
        self.coeffs
            .iter()
            .filter_map(Poly::degree)
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, rhs: &DiffOperator) -> DiffOperator {
        assert_eq!(self.var, rhs.var, "mixed-variable operator arithmetic");
        let n = self.coeffs.len().max(rhs.coeffs.len());
        DiffOperator::new(
            self.var,
            (0..n).map(|j| &self.coeff(j) + &rhs.coeff(j)).collect(),
        )
    }

    pub fn sub(&self, rhs: &DiffOperator) -> DiffOperator {
        self.add(&rhs.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> DiffOperator {
        DiffOperator::new(self.var, self.coeffs.iter().map(|p| p.scale(c)).collect())
    }

    /// Left-multiply by a polynomial coefficient.
    pub fn mul_poly_left(&self, p: &Poly) -> DiffOperator {
        DiffOperator::new(self.var, self.coeffs.iter().map(|c| c * p).collect())
    }

    /// Noncommutative product, via `D·c(λ) = c(λ)·D + θ(c)(λ)`.
    pub fn mul(&self, rhs: &DiffOperator) -> DiffOperator {
        assert_eq!(self.var, rhs.var, "mixed-variable operator arithmetic");
        let mut result = DiffOperator::zero(self.var);
        // cur = D^j ∘ rhs, built incrementally.
        let mut cur: Vec<Poly> = rhs.coeffs.clone();
        for (j, a) in self.coeffs.iter().enumerate() {
            if j > 0 {
                let mut next = vec![Poly::zero(); cur.len() + 1];
                for (k, b) in cur.iter().enumerate() {
                    next[k + 1] = &next[k + 1] + b;
                    next[k] = &next[k] + &theta_poly(b);
                }
                cur = next;
            }
            if !a.is_zero() {
                let term =
                    DiffOperator::new(self.var, cur.iter().map(|b| b * a).collect());
                result = result.add(&term);
            }
        }
        result
    }

    /// Build `Π_i (D - roots_i)` (λ-free coefficients).
    pub fn from_left_roots(var: Var, roots: &[Rational]) -> DiffOperator {
        let shifts: Vec<Rational> = roots.iter().map(|r| -r).collect();
        DiffOperator::new(
            var,
            expand_linear_product(&shifts)
                .into_iter()
                .map(Poly::constant)
                .collect(),
        )
    }

    /// Exact action of `Σ c_j(λ) (λ d/dλ)^j` on a truncated series. The
    /// result order shrinks by the λ-degree of the coefficients — the margin
    /// within which the truncated tail of the input would be felt.
    pub fn apply_series(&self, s: &TruncSeries) -> TruncSeries {
        let margin = self.lambda_degree();
        assert!(s.order() > margin, "series order too small for operator");
        let mut acc = TruncSeries::zero(s.order());
        let mut pow = s.clone();
        for (j, c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                pow = pow.theta();
            }
            if !c.is_zero() {
                acc = acc.add(&pow.mul_poly(c));
            }
        }
        acc.truncate(s.order() - margin)
    }

    /// Substitute `D ↦ D + shift`, the effect of conjugating by a power of
    /// the variable.
    pub fn conjugate_shift(&self, shift: &Rational) -> DiffOperator {
        let n = self.coeffs.len();
        let mut out = vec![Poly::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // coefficient of D^m in (D + shift)^j is C(j, m)·shift^{j-m}
            let mut binom = Rational::one();
            let mut power = Rational::one();
            for m in (0..=j).rev() {
                out[m] = &out[m] + &c.scale(&(&binom * &power));
                if m > 0 {
                    binom = binom * rat_int(m as i64) / rat_int((j - m + 1) as i64);
                    power = &power * shift;
                }
            }
        }
        DiffOperator::new(self.var, out)
    }

    pub fn display(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let var = self.var.symbol();
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| {
                let cs = format!("({})", c.display(var));
                match j {
                    0 => cs,
                    1 => format!("{cs}·D"),
                    _ => format!("{cs}·D^{j}"),
                }
            })
            .collect();
        terms.join(" + ")
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

/// Left roots `{0, ..., d-1}` and right parameters `(ṽ_i + jd)/w_i` of
/// `P'(V, W)`.
fn raw_parts(
    family: &FamilyData,
    v: &CharVector,
) -> Result<(Vec<Rational>, Vec<Rational>), FamilyError> {
    if let Some(index) = v.lifts().iter().position(|&t| t == 0) {
        return Err(FamilyError::NotTotallyNonzero { index });
    }
    let d = family.d();
    let left: Vec<Rational> = (0..d).map(|k| rat_int(k as i64)).collect();
    let mut right = Vec::with_capacity(d as usize);
    for (&t, &wi) in v.lifts().iter().zip(family.weights()) {
        for j in 0..wi {
            right.push(Rational::new(
                ((t + j * d) as i64).into(),
                (wi as i64).into(),
            ));
        }
    }
    Ok((left, right))
}

/// `Π(D - left_i) - λ^d Π(D + right_j)` in normal form.
fn assemble(d: u64, left: &[Rational], right: &[Rational]) -> DiffOperator {
    let neg: Vec<Rational> = left.iter().map(|k| -k).collect();
    let lhs = expand_linear_product(&neg);
    let rhs = expand_linear_product(right);
    let n = lhs.len().max(rhs.len());
    let coeffs = (0..n)
        .map(|j| {
            let a = lhs.get(j).cloned().unwrap_or_else(Rational::zero);
            let b = rhs.get(j).cloned().unwrap_or_else(Rational::zero);
            &Poly::constant(a) - &Poly::monomial(b, d as usize)
        })
        .collect();
    DiffOperator::new(Var::Lambda, coeffs)
}

/// `P'(V, W)`: the order-`d` annihilator of the class of `V`.
pub fn build_p_prime(
    family: &FamilyData,
    v: &CharVector,
) -> Result<DiffOperator, FamilyError> {
    let (left, right) = raw_parts(family, v)?;
    Ok(assemble(family.d(), &left, &right))
}

/// Left exponents and right parameters of the reduced operator `P(V, W)`:
/// for each `k ∈ I(V, W)`, `(D - k)` leaves the left product and one copy of
/// `(D + d - k)` leaves the right product. Both returned lists are sorted
/// and have length `rank(V)`.
pub fn reduced_parts(
    family: &FamilyData,
    v: &CharVector,
) -> Result<(Vec<u64>, Vec<Rational>), FamilyError> {
    let (_, mut right) = raw_parts(family, v)?;
    let index_set = family.index_set_i(v)?;
    let d = family.d();
    let left: Vec<u64> = (0..d).filter(|k| !index_set.contains(k)).collect();
    for &k in &index_set {
        let target = rat_int((d - k) as i64);
        let pos = right
            .iter()
            .position(|a| *a == target)
            .expect("matching right factor exists for every k in I(V, W)");
        right.remove(pos);
    }
    right.sort();
    Ok((left, right))
}

/// The reduced Picard-Fuchs operator `P(V, W)`, of order `rank(V)`.
pub fn reduce_p(family: &FamilyData, v: &CharVector) -> Result<DiffOperator, FamilyError> {
    let (left, right) = reduced_parts(family, v)?;
    let left: Vec<Rational> = left.into_iter().map(|k| rat_int(k as i64)).collect();
    Ok(assemble(family.d(), &left, &right))
}

/// Hypergeometric parameter multisets on the descent coordinate `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypParams {
    alphas: Vec<Rational>,
    betas: Vec<Rational>,
}

impl HypParams {
    pub fn new(mut alphas: Vec<Rational>, mut betas: Vec<Rational>) -> Self {
        assert_eq!(alphas.len(), betas.len(), "|alphas| must equal |betas|");
        alphas.sort();
        betas.sort();
        HypParams { alphas, betas }
    }

    pub fn alphas(&self) -> &[Rational] {
        &self.alphas
    }

    pub fn betas(&self) -> &[Rational] {
        &self.betas
    }

    pub fn size(&self) -> usize {
        self.alphas.len()
    }

    /// Remove pairs `(α, β)` with `α ≡ β mod ℤ` until none remain. Exactly
    /// equal pairs go first; for the parameters of a Dwork family every
    /// congruent pair is exactly equal, so the result is the multiset
    /// difference.
    pub fn cancel(&self) -> HypParams {
        let mut alphas = self.alphas.clone();
        let mut betas = self.betas.clone();
        'outer: loop {
            for (i, a) in alphas.iter().enumerate() {
                if let Some(j) = betas.iter().position(|b| b == a) {
                    alphas.remove(i);
                    betas.remove(j);
                    continue 'outer;
                }
            }
            for (i, a) in alphas.iter().enumerate() {
                if let Some(j) = betas.iter().position(|b| congruent_mod_z(a, b)) {
                    alphas.remove(i);
                    betas.remove(j);
                    continue 'outer;
                }
            }
            break;
        }
        HypParams { alphas, betas }
    }

    /// True when no `α_i ≡ β_j mod ℤ`: the irreducibility criterion for the
    /// associated hypergeometric module.
    pub fn is_irreducible(&self) -> bool {
        self.alphas
            .iter()
            .all(|a| self.betas.iter().all(|b| !congruent_mod_z(a, b)))
    }

    /// Expand `Π(D_t + β_i - 1) - t Π(D_t + α_i)` into normal form.
    pub fn to_operator(&self) -> DiffOperator {
        let beta_shifts: Vec<Rational> =
            self.betas.iter().map(|b| b - Rational::one()).collect();
        let lhs = expand_linear_product(&beta_shifts);
        let rhs = expand_linear_product(&self.alphas);
        let n = lhs.len().max(rhs.len());
        let coeffs = (0..n)
            .map(|j| {
                let a = lhs.get(j).cloned().unwrap_or_else(Rational::zero);
                let b = rhs.get(j).cloned().unwrap_or_else(Rational::zero);
                &Poly::constant(a) - &Poly::monomial(b, 1)
            })
            .collect();
        DiffOperator::new(Var::T, coeffs)
    }

    /// Paper-style layout `Hyp(α_1, ...; β_1, ...; t)`.
    pub fn display(&self) -> String {
        let fmt_list = |xs: &[Rational]| {
            xs.iter()
                .map(rational_to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!(
            "Hyp({}; {}; t)",
            fmt_list(&self.alphas),
            fmt_list(&self.betas)
        )
    }
}

impl fmt::Display for HypParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

/// Parameters of `Hyp'(V, W, b)`, the descent of `P'(V, W)` through
/// `t = λ^{-d}`: with `N = Σ b_i ṽ_i`,
/// `α = {k/d + N/d : 0 ≤ k < d}` and
/// `β = {((w_i - j)d - ṽ_i)/(w_i d) + N/d : 1 ≤ i ≤ n, 0 ≤ j < w_i}`.
pub fn build_hyp_prime(
    family: &FamilyData,
    v: &CharVector,
) -> Result<HypParams, FamilyError> {
    if let Some(index) = v.lifts().iter().position(|&t| t == 0) {
        return Err(FamilyError::NotTotallyNonzero { index });
    }
    let d = family.d() as i64;
    let shift = Rational::new(v.n_shift().into(), d.into());
    let alphas = (0..d)
        .map(|k| Rational::new(k.into(), d.into()) + &shift)
        .collect();
    let mut betas = Vec::with_capacity(d as usize);
    for (&t, &wi) in v.lifts().iter().zip(family.weights()) {
        for j in 0..wi {
            let num = ((wi - j) * family.d() - t) as i64;
            betas.push(Rational::new(num.into(), (wi as i64 * d).into()) + &shift);
        }
    }
    Ok(HypParams::new(alphas, betas))
}

/// Conjugate an operator in `λ` by `λ^N` (sending `D ↦ D - N`), pass to the
/// descent coordinate `t = λ^{-d}` (sending `D_λ ↦ -d·D_t` and
/// `λ^d ↦ t^{-1}`), clear the `t` powers, and normalize so the `t`-free part
/// of the leading coefficient is 1. On `P'(V, W)` this is exactly the
/// expansion of `Hyp'(V, W, b)`.
pub fn conjugate_and_rescale(
    op: &DiffOperator,
    n_shift: i64,
    d: u64,
) -> Result<DiffOperator, ArithError> {
    assert_eq!(op.var(), Var::Lambda, "input must act on λ");
    if op.is_zero() {
        return Err(ArithError::ZeroOperator);
    }
    let conj = op.conjugate_shift(&rat_int(-n_shift));
    // Coefficients must live in ℚ[λ^d] for the substitution to stay
    // polynomial in t.
    let d = d as usize;
    let mut max_m = 0usize;
    for c in conj.coeffs() {
        for (k, a) in c.coeffs().iter().enumerate() {
            if !a.is_zero() {
                if k % d != 0 {
                    return Err(ArithError::NotDivisible { power: d });
                }
                max_m = max_m.max(k / d);
            }
        }
    }
    let minus_d = rat_int(-(d as i64));
    let mut coeffs: Vec<Poly> = Vec::with_capacity(conj.coeffs().len());
    let mut scale = Rational::one();
    for (j, c) in conj.coeffs().iter().enumerate() {
        if j > 0 {
            scale = &scale * &minus_d;
        }
        // λ^{dm} ↦ t^{-m}, then clear by t^{max_m} on the left.
        let mut t_coeffs = vec![Rational::zero(); max_m + 1];
        for (k, a) in c.coeffs().iter().enumerate() {
            if !a.is_zero() {
                t_coeffs[max_m - k / d] = a * &scale;
            }
        }
        coeffs.push(Poly::new(t_coeffs));
    }
    let out = DiffOperator::new(Var::T, coeffs);
    let lead = out.coeffs().last().expect("nonzero operator").eval0();
    if lead.is_zero() {
        return Err(ArithError::NonUnitSeries);
    }
    Ok(out.scale(&lead.recip()))
}

/// Companion matrix of the monic form of an operator in `d/dλ`.
///
/// Subdiagonal entries are 1 and only the last column is nontrivial; the
/// entries are rational functions regular wherever `λ(1 - λ^d) ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompanionMatrix {
    size: usize,
    entries: Vec<Vec<RationalFunction>>,
}

impl CompanionMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, i: usize, j: usize) -> &RationalFunction {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<RationalFunction>] {
        &self.entries
    }

    /// Last column `(-c_0, ..., -c_{r-1})` of the monic equation
    /// `y^{(r)} + c_{r-1} y^{(r-1)} + ... + c_0 y = 0`.
    pub fn last_column(&self) -> Vec<RationalFunction> {
        self.entries
            .iter()
            .map(|row| row[self.size - 1].clone())
            .collect()
    }
}

/// Stirling numbers of the second kind up to `n`, for rewriting powers of
/// `D = λ d/dλ` as `Σ_m S(j, m) λ^m (d/dλ)^m`.
fn stirling_second(n: usize) -> Vec<Vec<Rational>> {
    let mut table = vec![vec![Rational::zero(); n + 1]; n + 1];
    table[0][0] = Rational::one();
    for j in 1..=n {
        for m in 1..=j {
            let t = &table[j - 1][m] * rat_int(m as i64);
            table[j][m] = &t + &table[j - 1][m - 1];
        }
    }
    table
}

/// Convert to the companion matrix of the monic equation in `d/dλ`.
pub fn to_companion(op: &DiffOperator) -> Result<CompanionMatrix, ArithError> {
    if op.is_zero() {
        return Err(ArithError::ZeroOperator);
    }
    let r = op.order().unwrap();
    let stirling = stirling_second(r);
    // γ_m(λ) = λ^m Σ_{j≥m} S(j, m) c_j(λ); the operator is Σ γ_m (d/dλ)^m.
    let mut gamma = vec![Poly::zero(); r + 1];
    for m in 0..=r {
        let mut acc = Poly::zero();
        for (j, row) in stirling.iter().enumerate().take(r + 1).skip(m) {
            let s = &row[m];
            if !s.is_zero() {
                acc = &acc + &op.coeff(j).scale(s);
            }
        }
        gamma[m] = acc.shift_up(m);
    }
    let lead = RationalFunction::from_poly(gamma[r].clone());
    if lead.is_zero() {
        return Err(ArithError::NonUnitSeries);
    }
    let mut entries = vec![vec![RationalFunction::zero(); r]; r];
    for i in 0..r {
        if i > 0 {
            entries[i][i - 1] = RationalFunction::one();
        }
        entries[i][r - 1] = &(-&RationalFunction::from_poly(gamma[i].clone())) / &lead;
    }
    Ok(CompanionMatrix { size: r, entries })
}
