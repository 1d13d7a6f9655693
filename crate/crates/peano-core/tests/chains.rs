//! Interval and circle chain classification through the public API.

use num_rational::BigRational;
use peano_core::{
    are_equivalent, circle_reduce, conjugating_homeo, is_generic, structure_of, CircleChain,
    PLChain,
};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn chain(pts: &[(i64, i64, i64, i64)]) -> PLChain {
    PLChain::new(pts.iter().map(|&(a, b, c, d)| (q(a, b), q(c, d))).collect()).unwrap()
}

#[test]
fn staircases_conjugate_exactly() {
    let a = chain(&[(1, 2, 1, 2), (1, 2, 3, 4), (1, 4, 3, 4), (0, 1, 1, 1)]);
    let b = chain(&[(1, 3, 1, 3), (1, 3, 1, 2), (1, 5, 1, 2), (0, 1, 1, 1)]);
    assert_eq!(structure_of(&a).to_string(), "[V, H, S]");
    assert!(are_equivalent(&a, &b));
    let h = conjugating_homeo(&a, &b).unwrap();
    assert_eq!(a.act(&h), b);
    assert_eq!(b.act(&h.inverse()), a);
}

#[test]
fn order_of_moves_separates_chains() {
    let vh = chain(&[(1, 2, 1, 2), (1, 2, 3, 4), (1, 4, 3, 4), (0, 1, 1, 1)]);
    let hv = chain(&[(1, 2, 1, 2), (1, 4, 1, 2), (1, 4, 3, 4), (0, 1, 1, 1)]);
    assert!(!are_equivalent(&vh, &hv));
    assert!(conjugating_homeo(&vh, &hv).is_err());
}

#[test]
fn symmetric_chain_is_generic_and_equals_even_circle_chain() {
    let c0 = PLChain::symmetric();
    assert!(is_generic(&c0));
    let even = CircleChain::new(q(1, 3), vec![(q(0, 1), q(0, 1)), (q(1, 2), q(1, 2))]).unwrap();
    assert!(are_equivalent(&circle_reduce(&even), &c0));
    assert_eq!(circle_reduce(&even.rotate(&q(7, 5))), circle_reduce(&even));
}
