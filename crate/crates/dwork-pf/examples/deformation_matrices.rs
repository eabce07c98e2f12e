//! Deformation matrices A(λ) with A(0) = I for the quartic K3 pencil,
//! including the rank-2 class whose derivative basis degenerates at λ = 0
//! and needs the canonical-extension correction A = W·B.
//!
//! Run with `cargo run --example deformation_matrices`.

use dwork_pf::deformation::{
    connection_series, deformation_matrix, deformation_matrix_any, fundamental_solutions,
    SeriesMatrix,
};
use dwork_pf::error::DeformationError;
use dwork_pf::family::FamilyData;
use dwork_pf::operators::reduce_p;

fn main() {
    let family = FamilyData::new(4, 4, vec![1, 1, 1, 1]).unwrap();
    let order = 16;

    for (v, _) in family.symmetry_classes() {
        println!("V = {:?} (rank {})", v.lifts(), family.rank(&v));

        // Hypergeometric fundamental system of the reduced operator.
        let basis = fundamental_solutions(&family, &v, order).unwrap();
        println!("  solution exponents k_i = {:?}", basis.exponents());
        for (i, w) in basis.solutions().iter().enumerate() {
            println!("    w_{i} = {w}");
        }
        let p = reduce_p(&family, &v).unwrap();
        for w in basis.solutions() {
            assert!(p.apply_series(w).is_zero(), "P annihilates each w_i");
        }

        // A(λ): cyclic construction, or the corrected one.
        match deformation_matrix(&family, &v, order) {
            Ok(a) => {
                println!("  cyclic basis holds; A(λ) = W(0)⁻¹·W(λ):");
                print_matrix(&a);
            }
            Err(DeformationError::CyclicBasisFails { exponents, .. }) => {
                println!(
                    "  cyclic basis fails (exponents {exponents:?} ≠ initial segment); \
                     applying the canonical correction"
                );
                let (a, change) = deformation_matrix_any(&family, &v, order).unwrap();
                let change = change.unwrap();
                println!("  basis change B(λ):");
                for row in &change.matrix {
                    let cells: Vec<String> =
                        row.iter().map(|e| e.display("λ")).collect();
                    println!("    [{}]", cells.join(", "));
                }
                println!("  A(λ) = W(λ)·B(λ):");
                print_matrix(&a);
                println!("  residue of the transformed connection (nilpotent):");
                for row in &change.residue {
                    println!("    {row:?}");
                }
                // A solves the transformed system dA = A·C̃.
                let c = connection_series(&family, &v, Some(&change), order - 1).unwrap();
                let residual = a.derive().sub(&a.truncate(order - 1).mul(&c));
                assert_eq!(residual, SeriesMatrix::zero(a.size(), order - 1));
            }
            Err(e) => panic!("unexpected failure: {e}"),
        }
        println!();
    }
}

fn print_matrix(a: &SeriesMatrix) {
    for i in 0..a.size() {
        for j in 0..a.size() {
            println!("    A[{i}][{j}] = {}", a.entry(i, j));
        }
    }
}
