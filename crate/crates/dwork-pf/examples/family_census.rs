//! Census of a one-parameter hypersurface family: validate `(n, d, W)`,
//! derive `d_W` and the Bézout vector, and enumerate the character
//! components with their ranks and index sets.
//!
//! Run with `cargo run --example family_census`.

use dwork_pf::family::FamilyData;

fn describe(family: &FamilyData) {
    println!(
        "family: {} variables, degree {}, weights {:?}",
        family.n(),
        family.d(),
        family.weights()
    );
    println!("  d_W = {}, b = {:?} (Σ b_i w_i = 1)", family.d_w(), family.bezout());
    println!(
        "  {} translation orbits of totally nonzero classes",
        family.representatives().len()
    );
    for (v, class_size) in family.symmetry_classes() {
        let i_set = family.index_set_i(&v).unwrap();
        let j_set = family.index_set_j(&v).unwrap();
        println!(
            "  V = {:?}: deg {}, rank {}, I = {:?}, J = {:?}  (×{} up to symmetry)",
            v.lifts(),
            v.deg(),
            family.rank(&v),
            i_set,
            j_set,
            class_size,
        );
    }
    println!();
}

fn main() {
    // The quartic K3 pencil: three component classes of ranks 3, 2, 1.
    describe(&FamilyData::new(4, 4, vec![1, 1, 1, 1]).unwrap());

    // The Hesse cubic pencil: a single rank-2 class.
    describe(&FamilyData::new(3, 3, vec![1, 1, 1]).unwrap());

    // A weighted example.
    describe(&FamilyData::new(3, 4, vec![1, 1, 2]).unwrap());

    // Validation failures name the violated condition.
    for (n, d, w) in [(3, 4, vec![1, 1, 1]), (3, 6, vec![2, 2, 2]), (3, 4, vec![2, 2, 0])] {
        match FamilyData::new(n, d, w.clone()) {
            Ok(_) => unreachable!(),
            Err(e) => println!("rejected (n={n}, d={d}, W={w:?}): {e}"),
        }
    }
}
