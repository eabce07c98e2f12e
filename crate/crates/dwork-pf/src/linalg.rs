//! Exact linear algebra over `ℚ(x)` and over `ℚ`.
//!
//! The rational-function solver is the workhorse of the Griffiths-Dwork
//! oracle. Its systems are large but extremely sparse (the multiplication
//! map by the partials has two nonzero entries per column), so elimination
//! is sparse-first: rows never touched by a pivot are never rewritten, and
//! pivots are chosen Markowitz-style to limit fill-in. Entries stay reduced
//! fractions throughout, which bounds the intermediate growth that dense
//! fraction-free schemes pay for with full-matrix rescaling.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::poly::Poly;
use crate::ratfun::RationalFunction;
use crate::rational::Rational;

/// Sparse row: column index → nonzero entry.
pub type SparseRow = BTreeMap<usize, RationalFunction>;

/// Solve `M x = rhs` exactly over `ℚ(x)`, for a rectangular `M` given as
/// dense rows. Returns any solution (free variables are set to zero), or
/// `None` when the system is inconsistent.
pub fn linsolve_ratfun(
    matrix: &[Vec<RationalFunction>],
    rhs: &[RationalFunction],
) -> Option<Vec<RationalFunction>> {
    assert_eq!(matrix.len(), rhs.len(), "matrix/rhs row count mismatch");
    let ncols = matrix.first().map_or(0, Vec::len);
    let rows: Vec<SparseRow> = matrix
        .iter()
        .map(|row| {
            assert_eq!(row.len(), ncols, "ragged matrix");
            row.iter()
                .enumerate()
                .filter(|(_, e)| !e.is_zero())
                .map(|(j, e)| (j, e.clone()))
                .collect()
        })
        .collect();
    linsolve_sparse(rows, rhs.to_vec(), ncols)
}

/// Sparse-row variant of [`linsolve_ratfun`].
pub fn linsolve_sparse(
    mut rows: Vec<SparseRow>,
    mut rhs: Vec<RationalFunction>,
    ncols: usize,
) -> Option<Vec<RationalFunction>> {
    let nrows = rows.len();
    // Clear denominators row by row so elimination starts from polynomials.
    for (row, b) in rows.iter_mut().zip(rhs.iter_mut()) {
        let mut lcm = Poly::one();
        for entry in row.values().chain(std::iter::once(&*b)) {
            let den = entry.den();
            let g = lcm.gcd(den);
            lcm = (&lcm.div_rem(&g).0 * den).into_monic();
        }
        if lcm.degree() != Some(0) {
            let scale = RationalFunction::from_poly(lcm);
            for entry in row.values_mut() {
                *entry = &*entry * &scale;
            }
            *b = &*b * &scale;
        }
    }

    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); ncols];
    for (i, row) in rows.iter().enumerate() {
        for &j in row.keys() {
            col_rows[j].push(i);
        }
    }
    let mut row_active = vec![true; nrows];
    let mut col_active = vec![true; ncols];
    let mut pivots: Vec<(usize, usize)> = Vec::new();

    loop {
        // Markowitz pivot: minimize (row_nnz - 1)(col_nnz - 1); ties go to
        // the smallest (col, row) for determinism. col_rows may hold stale
        // or duplicate indices after cancellations, so membership is
        // re-checked against the row itself.
        let mut best: Option<(usize, usize, usize)> = None;
        for (j, col) in col_rows.iter_mut().enumerate() {
            if !col_active[j] {
                continue;
            }
            col.sort_unstable();
            col.dedup();
            col.retain(|&i| row_active[i] && rows[i].contains_key(&j));
            let live = col.len();
            if live == 0 {
                continue;
            }
            for &i in col.iter() {
                let score = (rows[i].len() - 1) * (live - 1);
                if best.is_none_or(|(s, bj, bi)| (score, j, i) < (s, bj, bi)) {
                    best = Some((score, j, i));
                }
            }
        }
        let Some((_, pc, pr)) = best else { break };

        let pivot_val = rows[pr][&pc].clone();
        let pivot_row = rows[pr].clone();
        let pivot_rhs = rhs[pr].clone();
        let targets: Vec<usize> = col_rows[pc]
            .iter()
            .copied()
            .filter(|&i| i != pr)
            .collect();
        for i in targets {
            let factor = &rows[i][&pc] / &pivot_val;
            rows[i].remove(&pc);
            for (&j, v) in &pivot_row {
                if j == pc {
                    continue;
                }
                let delta = v * &factor;
                match rows[i].get_mut(&j) {
                    Some(e) => {
                        let updated = &*e - &delta;
                        if updated.is_zero() {
                            rows[i].remove(&j);
                        } else {
                            *e = updated;
                        }
                    }
                    None => {
                        rows[i].insert(j, -&delta);
                        col_rows[j].push(i);
                    }
                }
            }
            rhs[i] = &rhs[i] - &(&pivot_rhs * &factor);
        }
        row_active[pr] = false;
        col_active[pc] = false;
        pivots.push((pr, pc));
    }

    // Any remaining active row is all zeros; it must have zero rhs.
    for i in 0..nrows {
        if row_active[i] && !rhs[i].is_zero() {
            return None;
        }
    }

    let mut solution = vec![RationalFunction::zero(); ncols];
    for &(r, c) in pivots.iter().rev() {
        let mut acc = rhs[r].clone();
        for (&j, v) in &rows[r] {
            if j != c && !solution[j].is_zero() {
                acc = &acc - &(v * &solution[j]);
            }
        }
        solution[c] = &acc / &rows[r][&c];
    }
    Some(solution)
}

/// Multiply dense rational matrices.
pub fn qmat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Rational::zero();
                    for l in 0..k {
                        if !a[i][l].is_zero() && !b[l][j].is_zero() {
                            acc += &a[i][l] * &b[l][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn qmat_identity(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::from_integer(1.into())
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Invert a square rational matrix by Gauss-Jordan; `None` when singular.
pub fn qmat_inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut inv = qmat_identity(n);
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let d = &a[col][j] * &f;
                a[r][j] = &a[r][j] - d;
                let d = &inv[col][j] * &f;
                inv[r][j] = &inv[r][j] - d;
            }
        }
    }
    Some(inv)
}

/// True when `m^n = 0` for the `n×n` matrix `m`.
pub fn qmat_is_nilpotent(m: &[Vec<Rational>]) -> bool {
    let n = m.len();
    let mut acc = m.to_vec();
    for _ in 1..n {
        if acc.iter().all(|row| row.iter().all(Zero::is_zero)) {
            return true;
        }
        acc = qmat_mul(&acc, m);
    }
    acc.iter().all(|row| row.iter().all(Zero::is_zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn rf_poly(cs: &[i64]) -> RationalFunction {
        RationalFunction::from_poly(Poly::new(cs.iter().map(|&c| rat_int(c)).collect()))
    }

    fn rf(n: i64) -> RationalFunction {
        RationalFunction::constant(rat_int(n))
    }

    #[test]
    fn identity_system() {
        let m = vec![vec![rf(1), rf(0)], vec![rf(0), rf(1)]];
        let sol = linsolve_ratfun(&m, &[rf(1), rf(0)]).unwrap();
        assert_eq!(sol, vec![rf(1), rf(0)]);
    }

    #[test]
    fn back_substitution_example() {
        // [[x, 1], [0, x]]·(0, 1) = (1, x)
        let m = vec![
            vec![rf_poly(&[0, 1]), rf(1)],
            vec![rf(0), rf_poly(&[0, 1])],
        ];
        let sol = linsolve_ratfun(&m, &[rf(1), rf_poly(&[0, 1])]).unwrap();
        assert_eq!(sol, vec![rf(0), rf(1)]);
    }

    #[test]
    fn inconsistent_system() {
        let m = vec![vec![rf(0)]];
        assert!(linsolve_ratfun(&m, &[rf(1)]).is_none());
    }

    #[test]
    fn underdetermined_picks_some_solution() {
        // x + y = 2 with two unknowns: verify M·sol = rhs.
        let m = vec![vec![rf(1), rf(1)]];
        let rhs = [rf(2)];
        let sol = linsolve_ratfun(&m, &rhs).unwrap();
        let check = &(&m[0][0] * &sol[0]) + &(&m[0][1] * &sol[1]);
        assert_eq!(check, rhs[0]);
    }

    #[test]
    fn random_square_systems_verify() {
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as i64 % 5 - 2
        };
        for _ in 0..20 {
            let n = 4;
            let m: Vec<Vec<RationalFunction>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            RationalFunction::from_poly(Poly::new(vec![
                                rat_int(next()),
                                rat_int(next()),
                            ]))
                        })
                        .collect()
                })
                .collect();
            let rhs: Vec<RationalFunction> = (0..n)
                .map(|_| RationalFunction::constant(rat(next(), 1)))
                .collect();
            if let Some(sol) = linsolve_ratfun(&m, &rhs) {
                for i in 0..n {
                    let mut acc = RationalFunction::zero();
                    for j in 0..n {
                        acc = &acc + &(&m[i][j] * &sol[j]);
                    }
                    assert_eq!(acc, rhs[i], "residual in row {i}");
                }
            }
        }
    }

    #[test]
    fn rational_matrix_inverse() {
        let m = vec![
            vec![rat_int(2), rat_int(1)],
            vec![rat_int(1), rat_int(1)],
        ];
        let inv = qmat_inverse(&m).unwrap();
        assert_eq!(qmat_mul(&m, &inv), qmat_identity(2));
        let singular = vec![
            vec![rat_int(1), rat_int(2)],
            vec![rat_int(2), rat_int(4)],
        ];
        assert!(qmat_inverse(&singular).is_none());
    }

    #[test]
    fn nilpotence() {
        let n = vec![
            vec![rat_int(0), rat_int(1)],
            vec![rat_int(0), rat_int(0)],
        ];
        assert!(qmat_is_nilpotent(&n));
        let m = vec![
            vec![rat_int(1), rat_int(0)],
            vec![rat_int(0), rat_int(0)],
        ];
        assert!(!qmat_is_nilpotent(&m));
    }
}
