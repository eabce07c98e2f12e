//! Assemble Frobenius matrices F(λ) = A(λ)^{-1} F(0) A(λ^p) for components
//! of the quartic K3 pencil, check the horizontality equation
//! dF/dλ + C·F = p λ^{p-1} F C(λ^p) exactly, and reduce the result mod p^N.
//!
//! F(0) — the Frobenius on the λ = 0 fiber — is an external input; this
//! example uses sample rational matrices of the right size.
//!
//! Run with `cargo run --example frobenius_lift`.

use dwork_pf::deformation::{
    connection_series, frobenius_for_component, horizontality_residual, SeriesMatrix,
};
use dwork_pf::family::FamilyData;
use dwork_pf::rational::{rat, rational_to_string, Rational};

fn main() {
    let family = FamilyData::new(4, 4, vec![1, 1, 1, 1]).unwrap();
    let order = 20;
    let p = 3u64;

    for (v, _) in family.symmetry_classes() {
        let rank = family.rank(&v);
        // A sample F(0) with entries i + j + 1/2 on the diagonal band.
        let f0: Vec<Vec<Rational>> = (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|j| {
                        if i == j {
                            rat(2 * i as i64 + 1, 2)
                        } else {
                            rat(i as i64 - j as i64, 3)
                        }
                    })
                    .collect()
            })
            .collect();

        let out = frobenius_for_component(&family, &v, &f0, p, order).unwrap();
        println!(
            "V = {:?} → V⁽¹⁾ = {:?} (rank {rank}, p = {p})",
            v.lifts(),
            out.v1.lifts()
        );
        println!("  F(0) = F0 recovered: {}", out.result.f.eval0() == f0);

        // Horizontality holds identically over ℚ.
        let c_v = connection_series(&family, &v, out.correction_v.as_ref(), order - 1)
            .unwrap();
        let c_v1 = connection_series(
            &family,
            &out.v1,
            out.correction_v1.as_ref(),
            (order - 1).div_ceil(p as usize),
        )
        .unwrap();
        let residual = horizontality_residual(&out.result.f, &c_v, &c_v1, p);
        let zero = residual == SeriesMatrix::zero(rank, order - 1);
        println!("  horizontality residual identically zero: {zero}");
        assert!(zero);

        // First coefficients of F(λ) and the p-adic view mod p³.
        println!(
            "  F[0][0] coefficients (λ^0, ..., λ^7): {:?}",
            (0..8.min(order))
                .map(|k| rational_to_string(out.result.f.entry(0, 0).coeff(k)))
                .collect::<Vec<_>>()
        );
        let view = out.result.reduce_mod(3).unwrap();
        println!(
            "  mod p^3: denominator valuation {}, coeff(λ^0) = {:?}",
            view.denominator_valuation,
            view.coeffs[0].entries_u64(),
        );
        println!();
    }
}
