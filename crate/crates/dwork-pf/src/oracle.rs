//! Brute-force cohomological verification of annihilation claims.
//!
//! A class is stored as a finite sum of terms `A_p / Q_λ^p · Ω` with `A_p`
//! homogeneous of degree `p·d - n` over `ℚ(λ)`. Three symbolic operations
//! decide whether an operator kills the class of a component:
//!
//! * `D_λ = λ d/dλ` acts termwise:
//!   `A/Q^p ↦ (λ ∂A/∂λ)/Q^p + (p·d·λ·X^W·A)/Q^{p+1}`;
//! * the pole-lowering rule `p·B_i·∂Q/∂X_i / Q^{p+1} ≡ ∂B_i/∂X_i / Q^p`
//!   (valid as cohomology classes of the complement) rewrites a top
//!   numerator `A_p = Σ B_i ∂Q/∂X_i` as a pole-order `p-1` term — when the
//!   membership system has no solution the class is provably nonzero;
//! * a pole-order-1 class vanishes iff its numerator does: the Jacobian
//!   ideal contains nothing below degree `d-1`.
//!
//! Ideal membership is decided per degree by exact sparse linear algebra
//! over `ℚ(λ)`. Two structural facts keep the systems small: monomials can
//! be graded by `(ℤ/d)^n` classes twisted by the λ-power (the partials
//! `∂Q/∂X_i` are homogeneous of class `-e_i` for this grading), so every
//! class coming from `ω_V` stays in a single twisted class, and on each
//! twisted class the λ-dependence collapses onto the variable `u = λ^d`.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::rc::Rc;

use crate::error::{FamilyError, OracleError};
use crate::family::{CharVector, FamilyData};
use crate::linalg::{linsolve_sparse, SparseRow};
use crate::multipoly::{monomials_of_degree, HomogPoly, Monomial};
use crate::operators::{DiffOperator, Var};
use crate::poly::Poly;
use crate::ratfun::RationalFunction;
use crate::rational::{rat_int, Rational};

/// Finite sum of pole-order terms `A_p / Q_λ^p · Ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomClass {
    family: FamilyData,
    /// pole order → numerator of degree `p·d - n`; empty numerators are
    /// never stored.
    terms: BTreeMap<usize, HomogPoly>,
}

impl CohomClass {
    pub fn zero(family: &FamilyData) -> Self {
        CohomClass {
            family: family.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn family(&self) -> &FamilyData {
        &self.family
    }

    pub fn is_zero_representation(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn top_pole(&self) -> Option<usize> {
        self.terms.keys().next_back().copied()
    }

    pub fn numerator(&self, pole: usize) -> Option<&HomogPoly> {
        self.terms.get(&pole)
    }

    pub fn poles(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.keys().copied()
    }

    fn insert(&mut self, pole: usize, numerator: HomogPoly) {
        debug_assert_eq!(
            numerator.degree() as u64,
            pole as u64 * self.family.d() - self.family.n() as u64
        );
        if numerator.is_zero() {
            return;
        }
        match self.terms.get_mut(&pole) {
            Some(existing) => {
                let sum = existing.add(&numerator);
                if sum.is_zero() {
                    self.terms.remove(&pole);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(pole, numerator);
            }
        }
    }

    pub fn add(&self, rhs: &CohomClass) -> CohomClass {
        assert_eq!(self.family, rhs.family, "classes from different families");
        let mut out = self.clone();
        for (&p, a) in &rhs.terms {
            out.insert(p, a.clone());
        }
        out
    }

    pub fn neg(&self) -> CohomClass {
        let minus = RationalFunction::constant(-Rational::from_integer(1.into()));
        CohomClass {
            family: self.family.clone(),
            terms: self
                .terms
                .iter()
                .map(|(&p, a)| (p, a.scale(&minus)))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &CohomClass) -> CohomClass {
        self.add(&rhs.neg())
    }

    /// Multiply every numerator coefficient by a polynomial in λ.
    pub fn scale_lambda_poly(&self, p: &Poly) -> CohomClass {
        if p.is_zero() {
            return CohomClass::zero(&self.family);
        }
        CohomClass {
            family: self.family.clone(),
            terms: self
                .terms
                .iter()
                .map(|(&q, a)| (q, a.scale_lambda_poly(p)))
                .collect(),
        }
    }

    /// Apply `D_λ = λ d/dλ` termwise:
    /// `A/Q^p ↦ (λ ∂A/∂λ)/Q^p + (p·d·λ·X^W·A)/Q^{p+1}`.
    pub fn apply_d_lambda(&self) -> CohomClass {
        let family = &self.family;
        let d = family.d();
        let w_mono: Monomial = family.weights().iter().map(|&w| w as u32).collect();
        let lambda = Poly::monomial(Rational::from_integer(1.into()), 1);
        let mut out = CohomClass::zero(family);
        for (&p, a) in &self.terms {
            out.insert(p, a.theta_lambda());
            let scale = RationalFunction::from_poly(
                lambda.scale(&rat_int((p as u64 * d) as i64)),
            );
            out.insert(p + 1, a.mul_monomial(&w_mono, &scale));
        }
        out
    }

    /// Apply a normal-form operator in `D_λ` to the class.
    pub fn apply_operator(&self, op: &DiffOperator) -> CohomClass {
        assert_eq!(op.var(), Var::Lambda, "operators on classes act on λ");
        let mut out = CohomClass::zero(&self.family);
        let mut power = self.clone();
        for (j, c) in op.coeffs().iter().enumerate() {
            if j > 0 {
                power = power.apply_d_lambda();
            }
            if !c.is_zero() {
                out = out.add(&power.scale_lambda_poly(c));
            }
        }
        out
    }

}

/// Twisted class of `λ^shift · X^mono`: `(mono - shift·W) mod d`.
fn twisted_class(family: &FamilyData, mono: &Monomial, shift: u64) -> Monomial {
    let d = family.d() as i64;
    mono.iter()
        .zip(family.weights())
        .map(|(&a, &w)| (a as i64 - (shift * w) as i64).rem_euclid(d) as u32)
        .collect()
}

/// Normalize a reduced rational function so its denominator lies in
/// `ℚ[λ^d]`, then split the numerator by λ-exponent residue. Returns pairs
/// `(residue, value-part)`. The denominator of anything produced by this
/// module has a single exponent residue class, which is all this handles.
fn split_residues(
    c: &RationalFunction,
    d: usize,
) -> Result<Vec<(u64, RationalFunction)>, OracleError> {
    if c.is_zero() {
        return Ok(Vec::new());
    }
    let den_residues: Vec<usize> = residues(c.den(), d);
    if den_residues.len() != 1 {
        return Err(OracleError::UnsupportedCoefficient(format!(
            "coefficient denominator {} mixes λ-residues mod {d}",
            c.den()
        )));
    }
    let shift = (d - den_residues[0]) % d;
    let num = c.num().shift_up(shift);
    let den = c.den().shift_up(shift);
    let mut parts: BTreeMap<usize, Vec<Rational>> = BTreeMap::new();
    for (k, a) in num.coeffs().iter().enumerate() {
        if !num_is_zero(a) {
            parts
                .entry(k % d)
                .or_insert_with(|| vec![Rational::from_integer(0.into()); num.coeffs().len()])
                [k] = a.clone();
        }
    }
    Ok(parts
        .into_iter()
        .map(|(r, coeffs)| {
            (
                r as u64,
                RationalFunction::new(Poly::new(coeffs), den.clone()),
            )
        })
        .collect())
}

fn num_is_zero(r: &Rational) -> bool {
    num_traits::Zero::is_zero(r)
}

/// λ-exponent residues mod `d` present in a polynomial.
fn residues(p: &Poly, d: usize) -> Vec<usize> {
    let mut out: Vec<usize> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !num_is_zero(c))
        .map(|(k, _)| k % d)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// The primitive form of a component: a single term at pole order
/// `p = deg V` with numerator `Π X_i^{ṽ_i - 1}`.
pub fn omega_class(
    family: &FamilyData,
    v: &CharVector,
) -> Result<CohomClass, FamilyError> {
    if let Some(index) = v.lifts().iter().position(|&t| t == 0) {
        return Err(FamilyError::NotTotallyNonzero { index });
    }
    let mono: Monomial = v.lifts().iter().map(|&t| (t - 1) as u32).collect();
    let mut class = CohomClass::zero(family);
    class.insert(v.deg() as usize, HomogPoly::monomial(family.n(), mono));
    Ok(class)
}

/// Per-degree membership systems for the multiplication map
/// `(B_1, ..., B_n) ↦ Σ B_i ∂Q/∂X_i`, restricted to one twisted class and
/// compressed onto the variable `u = λ^d`.
pub struct JacobianBasisCache {
    family: FamilyData,
    /// Hard bound on membership-system rows; exceeding it aborts with a
    /// resource-cap error instead of thrashing.
    row_cap: usize,
    systems: RefCell<BTreeMap<(u32, Monomial), Rc<MembershipSystem>>>,
}

struct MembershipSystem {
    rows: Vec<Monomial>,
    row_index: BTreeMap<Monomial, usize>,
    /// λ-shift ρ(ν) of each row relative to the anchor class.
    row_shift: Vec<u64>,
    /// Column description: variable index, multiplier monomial, λ-shift.
    cols: Vec<(usize, Monomial, u64)>,
    /// Sparse matrix over ℚ(u).
    sparse: Vec<SparseRow>,
}

impl JacobianBasisCache {
    pub fn new(family: &FamilyData) -> Self {
        JacobianBasisCache::with_row_cap(family, 20_000)
    }

    pub fn with_row_cap(family: &FamilyData, row_cap: usize) -> Self {
        JacobianBasisCache {
            family: family.clone(),
            row_cap,
            systems: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn family(&self) -> &FamilyData {
        &self.family
    }

    /// Shift of a monomial relative to the anchor: the unique `r` with
    /// `ν ≡ anchor + rW mod d`, if it exists.
    fn shift_of(&self, anchor: &Monomial, mono: &Monomial) -> Option<u64> {
        let d = self.family.d() as i64;
        let r: i64 = mono
            .iter()
            .zip(anchor)
            .zip(self.family.bezout())
            .map(|((&m, &a), &b)| b * (m as i64 - a as i64))
            .sum();
        let r = r.rem_euclid(d) as u64;
        let matches = mono
            .iter()
            .zip(anchor)
            .zip(self.family.weights())
            .all(|((&m, &a), &w)| {
                (m as i64 - a as i64 - (r * w) as i64).rem_euclid(d) == 0
            });
        matches.then_some(r)
    }

    fn system(
        &self,
        degree: u32,
        anchor: &Monomial,
    ) -> Result<Rc<MembershipSystem>, OracleError> {
        let key = (degree, anchor.clone());
        if let Some(sys) = self.systems.borrow().get(&key) {
            return Ok(Rc::clone(sys));
        }
        let sys = Rc::new(self.build_system(degree, anchor)?);
        self.systems.borrow_mut().insert(key, Rc::clone(&sys));
        Ok(sys)
    }

    fn build_system(
        &self,
        degree: u32,
        anchor: &Monomial,
    ) -> Result<MembershipSystem, OracleError> {
        let n = self.family.n();
        let d = self.family.d() as u32;
        let enumeration = binomial(degree as u128 + n as u128 - 1, n as u128 - 1);
        if enumeration > 5_000_000 {
            return Err(OracleError::ResourceCap(format!(
                "degree {degree} monomial basis has {enumeration} elements"
            )));
        }
        let mut rows = Vec::new();
        let mut row_shift = Vec::new();
        for mono in monomials_of_degree(n, degree) {
            if let Some(r) = self.shift_of(anchor, &mono) {
                rows.push(mono);
                row_shift.push(r);
            }
        }
        if rows.len() > self.row_cap {
            return Err(OracleError::ResourceCap(format!(
                "membership system at degree {degree} needs {} rows (cap {})",
                rows.len(),
                self.row_cap
            )));
        }
        let row_index: BTreeMap<Monomial, usize> = rows
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();

        let mut cols = Vec::new();
        let mut sparse: Vec<SparseRow> = vec![BTreeMap::new(); rows.len()];
        if degree + 1 >= d {
            let u = Poly::monomial(Rational::from_integer(1.into()), 1);
            for i in 0..n {
                let wi = self.family.weights()[i];
                let coef = rat_int((self.family.d() * wi) as i64);
                for mu in monomials_of_degree(n, degree + 1 - d) {
                    // Row hit by the X_i^{d-1} part of ∂Q/∂X_i.
                    let mut nu1 = mu.clone();
                    nu1[i] += d - 1;
                    let Some(&r1) = row_index.get(&nu1) else { continue };
                    let shift = row_shift[r1];
                    let col = cols.len();
                    cols.push((i, mu.clone(), shift));
                    sparse[r1].insert(col, RationalFunction::constant(coef.clone()));
                    // Row hit by the -dλw_i X^{W - e_i} part.
                    let mut nu2: Monomial = mu
                        .iter()
                        .zip(self.family.weights())
                        .map(|(&m, &w)| m + w as u32)
                        .collect();
                    nu2[i] -= 1;
                    let r2 = row_index[&nu2];
                    let shift2 = row_shift[r2];
                    // λ^{shift+1} relative to the row's λ^{shift2}: a clean
                    // factor of u exactly when the shift wraps past d.
                    let u_pow = (shift + 1 - shift2) / self.family.d();
                    debug_assert!((shift + 1 - shift2) % self.family.d() == 0);
                    let entry = if u_pow == 0 {
                        Poly::constant(-coef.clone())
                    } else {
                        u.scale(&-coef.clone())
                    };
                    sparse[r2].insert(col, RationalFunction::from_poly(entry));
                }
            }
        }
        Ok(MembershipSystem {
            rows,
            row_index,
            row_shift,
            cols,
            sparse,
        })
    }

    /// Solve `Σ B_i ∂Q/∂X_i = numerator` over ℚ(λ) within the twisted
    /// class of the numerator. Returns the multipliers `B_i` or `None`.
    fn solve_membership(
        &self,
        anchor: &Monomial,
        numerator: &HomogPoly,
    ) -> Result<Option<Vec<HomogPoly>>, OracleError> {
        let n = self.family.n();
        let d = self.family.d() as usize;
        let sys = self.system(numerator.degree(), anchor)?;
        let mut rhs = vec![RationalFunction::zero(); sys.rows.len()];
        for (mono, coef) in numerator.terms() {
            let idx = *sys
                .row_index
                .get(mono)
                .expect("numerator monomial outside its twisted class");
            rhs[idx] = compress(coef, sys.row_shift[idx], d);
        }
        let Some(solution) = linsolve_sparse(sys.sparse.clone(), rhs, sys.cols.len())
        else {
            return Ok(None);
        };
        let mut multipliers =
            vec![HomogPoly::zero(n, numerator.degree() + 1 - self.family.d() as u32); n];
        for (value, (i, mu, shift)) in solution.into_iter().zip(&sys.cols) {
            if !value.is_zero() {
                multipliers[*i].add_term(mu.clone(), decompress(&value, *shift, d));
            }
        }
        Ok(Some(multipliers))
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Rewrite `λ^shift · f(λ^d)` as `f(u)`. The input must be twisted-pure;
/// anything produced inside this module is.
fn compress(c: &RationalFunction, shift: u64, d: usize) -> RationalFunction {
    if c.is_zero() {
        return RationalFunction::zero();
    }
    let den_res = residues(c.den(), d);
    assert_eq!(den_res.len(), 1, "denominator mixes λ-residues");
    let clear = (d - den_res[0]) % d;
    let num = c.num().shift_up(clear);
    let den = c.den().shift_up(clear);
    let take = |p: &Poly, offset: usize| -> Poly {
        let mut coeffs = Vec::new();
        for (k, a) in p.coeffs().iter().enumerate() {
            if !num_is_zero(a) {
                assert_eq!(k % d, offset % d, "coefficient is not twisted-pure");
            }
        }
        let mut k = offset;
        while k < p.coeffs().len() {
            coeffs.push(p.coeff(k));
            k += d;
        }
        Poly::new(coeffs)
    };
    let num_u = take(&num, shift as usize);
    let den_u = take(&den, 0);
    RationalFunction::new(num_u, den_u)
}

/// Rewrite `f(u)` back as `λ^shift · f(λ^d)`.
fn decompress(x: &RationalFunction, shift: u64, d: usize) -> RationalFunction {
    let num = x.num().stretch(d).shift_up(shift as usize);
    let den = x.den().stretch(d);
    RationalFunction::new(num, den)
}

/// Outcome of one pole-lowering step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReduceOutcome {
    Reduced(CohomClass),
    /// The top numerator is not in the Jacobian ideal over ℚ(λ): the class
    /// is nonzero in cohomology.
    NotInIdeal { pole_order: usize },
}

/// One Griffiths step on the top pole order (which must be ≥ 2): solve
/// `A_p = Σ B_i ∂Q/∂X_i` and replace the term by
/// `(1/(p-1)) Σ ∂B_i/∂X_i` at pole order `p - 1`.
///
/// The membership map is block-diagonal across twisted components (it is
/// `ℚ(λ^d)`-linear and each component `λ^ρ X^ν` lands in a single block),
/// so the numerator is split by twisted class and each piece is solved in
/// its own compressed system; `A_p` is in the ideal iff every piece is.
pub fn griffiths_reduce_step(
    cache: &JacobianBasisCache,
    class: &CohomClass,
) -> Result<ReduceOutcome, OracleError> {
    let Some(p) = class.top_pole() else {
        return Ok(ReduceOutcome::Reduced(class.clone()));
    };
    assert!(p >= 2, "top pole order must be at least 2 to reduce");
    let numerator = class.numerator(p).expect("top pole has a numerator");
    let d = cache.family.d() as usize;

    // Group the numerator's (monomial, λ-residue) terms by twisted class.
    let mut pieces: BTreeMap<Monomial, HomogPoly> = BTreeMap::new();
    for (mono, coef) in numerator.terms() {
        for (shift, part) in split_residues(coef, d)? {
            let anchor = twisted_class(&cache.family, mono, shift);
            pieces
                .entry(anchor)
                .or_insert_with(|| HomogPoly::zero(numerator.n(), numerator.degree()))
                .add_term(mono.clone(), part);
        }
    }

    let mut correction = HomogPoly::zero(
        cache.family.n(),
        numerator.degree() - (cache.family.d() as u32 - 1) - 1,
    );
    for (anchor, piece) in &pieces {
        match cache.solve_membership(anchor, piece)? {
            None => return Ok(ReduceOutcome::NotInIdeal { pole_order: p }),
            Some(multipliers) => {
                for (i, b) in multipliers.iter().enumerate() {
                    if !b.is_zero() {
                        correction = correction.add(&b.partial(i));
                    }
                }
            }
        }
    }
    let scale = RationalFunction::constant(Rational::new(1.into(), (p as i64 - 1).into()));
    let mut out = class.clone();
    out.terms.remove(&p);
    out.insert(p - 1, correction.scale(&scale));
    Ok(ReduceOutcome::Reduced(out))
}

/// Decide whether the class vanishes in the cohomology of the complement:
/// reduce from the top pole order downward; the class is zero iff every
/// membership solve succeeds and the final pole-order-1 numerator is
/// identically zero (the Jacobian ideal is zero in degree `d - n` since
/// the partials have degree `d - 1`).
pub fn is_zero_class(
    cache: &JacobianBasisCache,
    class: &CohomClass,
) -> Result<bool, OracleError> {
    let mut current = class.clone();
    while let Some(p) = current.top_pole() {
        if p < 2 {
            break;
        }
        match griffiths_reduce_step(cache, &current)? {
            ReduceOutcome::Reduced(next) => current = next,
            ReduceOutcome::NotInIdeal { .. } => return Ok(false),
        }
    }
    Ok(current.is_zero_representation())
}

/// Result of an annihilation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub annihilates: bool,
    /// Top pole order of `op·ω_V` before reduction.
    pub top_pole_order: usize,
}

/// Apply the operator to `ω_V` and decide vanishing with the reduction
/// oracle. This trusts nothing about how the operator was constructed.
pub fn verify_annihilation(
    cache: &JacobianBasisCache,
    v: &CharVector,
    op: &DiffOperator,
) -> Result<Verdict, OracleError> {
    let omega = omega_class(&cache.family, v)
        .expect("verify_annihilation requires a totally nonzero class");
    let image = omega.apply_operator(op);
    let top_pole_order = image.top_pole().unwrap_or(0);
    let annihilates = is_zero_class(cache, &image)?;
    Ok(Verdict {
        annihilates,
        top_pole_order,
    })
}
