use proptest::prelude::*;

use soergel::bimodule::BottSamelson;
use soergel::coxeter::preset;
use soergel::hecke::{pairing, Hecke, Laurent};
use soergel::linalg::{mat_mul, Matrix};
use soergel::poly::{Monomial, Poly};
use soergel::rational::Q;
use soergel::smod::BarBuilder;
use soergel::structure::Structure;

fn poly3() -> impl Strategy<Value = Poly> {
    prop::collection::vec(((0u32..3, 0u32..3, 0u32..3), -5i64..6), 0..5).prop_map(|terms| {
        let mut p = Poly::zero(3);
        for ((a, b, c), k) in terms {
            p.add_assign_ref(&Poly::monomial(3, Monomial::from_exponents(&[a, b, c]), Q::from_integer(k.into())));
        }
        p
    })
}

fn word(rank: u8, max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0..rank, 0..=max)
}

fn laurent() -> impl Strategy<Value = Laurent> {
    prop::collection::vec((-4i32..5, -3i64..4), 0..5).prop_map(|t| Laurent::from_terms(&t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polynomial_ring_laws(a in poly3(), b in poly3(), c in poly3()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        if !b.is_zero() {
            prop_assert_eq!((&a * &b).div_exact(&b), Some(a));
        }
    }

    #[test]
    fn laurent_bar_is_an_involutive_ring_map(a in laurent(), b in laurent()) {
        prop_assert_eq!(a.bar().bar(), a.clone());
        prop_assert_eq!(a.mul(&b).bar(), a.bar().mul(&b.bar()));
    }

    #[test]
    fn reduction_respects_length_and_inverse(w in word(3, 7)) {
        let g = preset("universal3").unwrap();
        let x = g.reduce(&w);
        prop_assert!(x.length() <= w.len());
        prop_assert_eq!(x.length() % 2, w.len() % 2);
        prop_assert!(g.multiply(&x, &g.inverse(&x)).is_identity());
        prop_assert!(g.bruhat_leq(&g.identity(), &x));
    }

    #[test]
    fn kl_basis_is_bar_invariant(w in word(2, 5)) {
        let g = preset("B2").unwrap();
        let h = Hecke::new(&g);
        let b = h.kl_basis(&g.reduce(&w));
        prop_assert_eq!(h.bar(&b), (*b).clone());
    }

    #[test]
    fn bs_pairing_is_symmetric_up_to_bar(u in word(2, 3), v in word(2, 3)) {
        let g = preset("A2").unwrap();
        let h = Hecke::new(&g);
        let (bu, bv) = (h.bs_character(&u), h.bs_character(&v));
        prop_assert_eq!(pairing(&h.bar(&bu), &bv), pairing(&h.bar(&bv), &bu));
    }

    #[test]
    fn p_products_satisfy_edge_congruences(x in word(3, 3), y in word(3, 3)) {
        let g = preset("universal3").unwrap();
        let st = Structure::new(&g);
        let omega = g.ball(4);
        let z = st.p(&g.reduce(&x), &omega).mul(&st.p(&g.reduce(&y), &omega));
        prop_assert!(st.validate_gkm(&z));
        let coeffs = st.straighten(&z).unwrap();
        prop_assert_eq!(st.combine(&coeffs, &omega), z);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn zbar_action_is_graded_and_commutes_with_right_action(w in word(3, 4)) {
        let g = preset("universal3").unwrap();
        let m = BarBuilder::new(&g).bar_bs(&w).unwrap();
        let commute = |a: &Matrix, b: &Matrix| mat_mul(a, b) == mat_mul(b, a);
        for (x, a) in &m.zbar {
            for (i, row) in a.iter().enumerate() {
                for (j, c) in row.iter().enumerate() {
                    if *c != Q::from_integer(0.into()) {
                        prop_assert_eq!(m.degrees[i], m.degrees[j] + 2 * x.length() as i64);
                    }
                }
            }
            for r in &m.right {
                prop_assert!(commute(a, r));
            }
        }
    }

    #[test]
    fn one_tensor_generates_hw_of_full_rank(w in word(3, 4)) {
        let g = preset("universal3").unwrap();
        let bs = BottSamelson::new(&g, &w);
        let hw = bs.hw_basis().unwrap();
        prop_assert_eq!(hw.len(), bs.omega().len());
        for (x, p) in &hw {
            prop_assert_eq!(p.degree(), Some(2 * x.length() as i64 - w.len() as i64));
        }
    }
}
