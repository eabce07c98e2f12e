//! Verify annihilation claims without trusting the operator construction:
//! apply the operator to the primitive class A/Q^p·Ω symbolically and
//! decide vanishing by pole-order reduction through the Jacobian ideal.
//!
//! Run with `cargo run --release --example griffiths_verification`.

use std::time::Instant;

use dwork_pf::family::FamilyData;
use dwork_pf::operators::{build_p_prime, reduce_p, DiffOperator, Var};
use dwork_pf::oracle::{omega_class, verify_annihilation, JacobianBasisCache};
use dwork_pf::poly::Poly;
use dwork_pf::rational::rat_int;

fn main() {
    for (n, d, w) in [
        (3usize, 3u64, vec![1u64, 1, 1]),
        (3, 4, vec![1, 1, 2]),
        (4, 4, vec![1, 1, 1, 1]),
    ] {
        let family = FamilyData::new(n, d, w.clone()).unwrap();
        let cache = JacobianBasisCache::new(&family);
        println!("family W = {w:?}, d = {d}");
        for v in family.representatives() {
            for (name, op) in [
                ("P'", build_p_prime(&family, &v).unwrap()),
                ("P ", reduce_p(&family, &v).unwrap()),
            ] {
                let start = Instant::now();
                let verdict = verify_annihilation(&cache, &v, &op).unwrap();
                println!(
                    "  {name} on V = {:?}: annihilates = {} (top pole {}, {:?})",
                    v.lifts(),
                    verdict.annihilates,
                    verdict.top_pole_order,
                    start.elapsed(),
                );
                assert!(verdict.annihilates);
            }
        }
        println!();
    }

    // The oracle is a real decision procedure: ω itself is nonzero, and a
    // slightly wrong operator fails.
    let family = FamilyData::new(4, 4, vec![1, 1, 1, 1]).unwrap();
    let cache = JacobianBasisCache::new(&family);
    let v = family.char_vector(&[1, 1, 1, 1]).unwrap();

    let omega = omega_class(&family, &v).unwrap();
    println!(
        "is ω_V zero in cohomology? {}",
        dwork_pf::oracle::is_zero_class(&cache, &omega).unwrap()
    );

    let bumped = reduce_p(&family, &v).unwrap().add(&DiffOperator::new(
        Var::Lambda,
        vec![Poly::constant(rat_int(1))],
    ));
    let verdict = verify_annihilation(&cache, &v, &bumped).unwrap();
    println!("does P + 1 annihilate ω_V? {}", verdict.annihilates);
    assert!(!verdict.annihilates);
}
