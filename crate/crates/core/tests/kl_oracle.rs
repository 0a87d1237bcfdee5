mod common;

use common::KlOracle;
use soergel::coxeter::preset;
use soergel::hecke::{Hecke, Laurent};

#[test]
fn kl_basis_matches_classical_recursion() {
    for name in ["A2", "B2", "A3", "universal3", "affine-A2"] {
        let g = preset(name).unwrap();
        let h = Hecke::new(&g);
        let mut oracle = KlOracle::new(&g);
        for w in g.ball(5) {
            for x in g.interval(&w).iter() {
                assert_eq!(h.kl_coeff(x, &w), oracle.h(x, &w), "{name}: h({}, {})", g.format(x), g.format(&w));
            }
        }
    }
}

#[test]
fn universal_stustu_identity_coefficient() {
    let g = preset("universal3").unwrap();
    let w = g.element(&[0, 1, 2, 0, 1, 2]);
    let mut oracle = KlOracle::new(&g);
    let expected = oracle.h(&g.identity(), &w);
    assert_eq!(expected, Laurent::from_terms(&[(4, 3), (6, 1)]));
    assert_eq!(Hecke::new(&g).kl_coeff(&g.identity(), &w), expected);
}

#[test]
fn a3_singular_element_has_nontrivial_polynomial() {
    // s2 s1 s3 s2 in A3: P_{e,w} = 1 + q
    let g = preset("A3").unwrap();
    let w = g.element(&[1, 0, 2, 1]);
    let mut oracle = KlOracle::new(&g);
    assert_eq!(oracle.p(&g.identity(), &w), vec![1, 1]);
    assert_eq!(Hecke::new(&g).kl_coeff(&g.identity(), &w), Laurent::from_terms(&[(2, 1), (4, 1)]));
}
