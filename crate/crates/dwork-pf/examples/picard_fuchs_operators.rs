//! Construct the annihilating operators of every component of the quartic
//! K3 pencil: the order-d operator P'(V, W), its reduction P(V, W) to the
//! rank of the component, and the hypergeometric form on the descent
//! coordinate t = λ^{-d}.
//!
//! Run with `cargo run --example picard_fuchs_operators`.

use dwork_pf::family::FamilyData;
use dwork_pf::operators::{
    build_hyp_prime, build_p_prime, conjugate_and_rescale, reduce_p, to_companion,
};

fn main() {
    let family = FamilyData::new(4, 4, vec![1, 1, 1, 1]).unwrap();

    for (v, _) in family.symmetry_classes() {
        println!("V = {:?} (rank {})", v.lifts(), family.rank(&v));

        let p_prime = build_p_prime(&family, &v).unwrap();
        println!("  P'(V, W) = {p_prime}");

        // Factors (D - k), k in I(V, W), leave from the left; the matching
        // (D + d - k) leave the λ^d product.
        let index_set = family.index_set_i(&v).unwrap();
        let p = reduce_p(&family, &v).unwrap();
        println!("  I(V, W) = {index_set:?}");
        println!("  P(V, W)  = {p}");

        // The same operator on t = λ^{-d}, as hypergeometric parameters.
        let hyp = build_hyp_prime(&family, &v).unwrap();
        let cancelled = hyp.cancel();
        println!("  {}", hyp);
        println!("  cancels to {}", cancelled);
        assert_eq!(cancelled.size(), family.rank(&v));
        assert!(cancelled.is_irreducible());

        // Cross-check: conjugating P' by λ^N and substituting D ↦ -d·D_t
        // reproduces the expansion of Hyp'(V, W, b) exactly.
        let descended = conjugate_and_rescale(&p_prime, v.n_shift(), family.d()).unwrap();
        assert_eq!(descended, hyp.to_operator());

        // Companion matrix of the monic form in d/dλ.
        let companion = to_companion(&p).unwrap();
        println!("  companion last column:");
        for (i, entry) in companion.last_column().iter().enumerate() {
            println!("    C[{i}][{}] = {}", companion.size() - 1, entry.display("λ"));
        }
        println!();
    }
}
