//! Property tests for the algebraic invariants: ring axioms, substitution
//! associativity, truncation as a ring map, n-series additivity, and
//! confluence of the derived rewrite systems under random strategies.

use std::collections::BTreeMap;

use proptest::prelude::*;

use opcalc_core::coeff::{CoeffElement, Ring, RingSpec};
use opcalc_core::coop::{CoopElement, CoopKey};
use opcalc_core::fgl::FormalGroupLaw;
use opcalc_core::relations::{derive_relations, reduce, reduce_with_choice};
use opcalc_core::series::{Monomial, Series};

fn test_ring() -> Ring {
    Ring::new(RingSpec::new(5, vec![("a", 2, false), ("u", -2, true)])).unwrap()
}

fn coeff_strategy(ring: Ring) -> impl Strategy<Value = CoeffElement> {
    proptest::collection::vec(((0u32..3, -2i64..3), 0i64..5), 0..4).prop_map(move |terms| {
        let mut acc = ring.zero();
        for ((a, u), scalar) in terms {
            let mono = ring.monomial(&[("a", a as i64), ("u", u)], scalar).unwrap();
            acc = acc.add(&mono).unwrap();
        }
        acc
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(
        x in coeff_strategy(test_ring()),
        y in coeff_strategy(test_ring()),
        z in coeff_strategy(test_ring()),
    ) {
        // commutativity, associativity, distributivity
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        prop_assert_eq!(
            x.mul(&y).unwrap().mul(&z).unwrap(),
            x.mul(&y.mul(&z).unwrap()).unwrap()
        );
        prop_assert_eq!(
            x.mul(&y.add(&z).unwrap()).unwrap(),
            x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()
        );
        // canonical form: subtraction of equals is the stored-empty zero
        prop_assert!(x.sub(&x).unwrap().is_zero());
        prop_assert_eq!(x.add(&y).unwrap().sub(&y).unwrap(), x.clone());
    }

    #[test]
    fn frobenius_additivity(
        x in coeff_strategy(test_ring()),
        y in coeff_strategy(test_ring()),
    ) {
        let lhs = x.add(&y).unwrap().pow(5);
        let rhs = x.pow(5).add(&y.pow(5)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

fn series_strategy(
    ring: Ring,
    precision: u32,
    zero_constant: bool,
) -> impl Strategy<Value = Series> {
    let lo = if zero_constant { 1u32 } else { 0 };
    proptest::collection::vec((lo..=precision, 0i64..5), 0..6).prop_map(move |terms| {
        let mut s = Series::zero(&ring, &["x"], precision);
        for (d, c) in terms {
            s.add_term_pub(Monomial::new(vec![d]), ring.scalar_i64(c));
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn substitution_is_associative(
        f in series_strategy(Ring::prime_field(5).unwrap(), 8, false),
        g in series_strategy(Ring::prime_field(5).unwrap(), 8, true),
        h in series_strategy(Ring::prime_field(5).unwrap(), 8, true),
    ) {
        let sub = |a: &Series, b: &Series| {
            let mut m = BTreeMap::new();
            m.insert("x".to_string(), b.clone());
            a.substitute(&m).unwrap()
        };
        prop_assert_eq!(sub(&sub(&f, &g), &h), sub(&f, &sub(&g, &h)));
    }

    #[test]
    fn truncation_is_a_ring_homomorphism(
        a in series_strategy(Ring::prime_field(5).unwrap(), 10, false),
        b in series_strategy(Ring::prime_field(5).unwrap(), 10, false),
        cut in 0u32..10,
    ) {
        let lhs = a.mul(&b).unwrap().truncate(cut);
        let rhs = a.truncate(cut).mul(&b.truncate(cut)).unwrap().truncate(cut);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn n_series_adds(m in -3i64..=4, n in -3i64..=4) {
        let f = FormalGroupLaw::multiplicative(5, 10).unwrap();
        let lhs = f.n_series(m + n).unwrap();
        let rhs = f
            .plus(&f.n_series(m).unwrap(), &f.n_series(n).unwrap())
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn p_series_linear_term_vanishes_exactly_in_char_p() {
    // over F_p the linear coefficient of [p] is p = 0; over Q it is p
    let mod_p = FormalGroupLaw::multiplicative(3, 8).unwrap();
    let linear = mod_p.n_series(3).unwrap().coefficient(&[1]).unwrap();
    assert!(linear.is_zero());
    let rational = FormalGroupLaw::multiplicative(0, 8).unwrap();
    let linear = rational.n_series(3).unwrap().coefficient(&[1]).unwrap();
    assert_eq!(linear, rational.ring().scalar_i64(3));
}

fn coop_strategy(ring: Ring, n: u32) -> impl Strategy<Value = CoopElement> {
    proptest::collection::vec(((0u32..4, 0u32..16, 0u32..3, 0u32..3), 1i64..5), 1..4).prop_map(
        move |terms| {
            let mut acc = CoopElement::zero(&ring);
            for ((e, b1, b2, v), scalar) in terms {
                let key = CoopKey::e(e)
                    .mul(&CoopKey::b(1, b1))
                    .mul(&CoopKey::b(2, b2))
                    .mul(&CoopKey::v(n, v));
                acc.add_term(key, ring.scalar_i64(scalar));
            }
            acc
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rewriting_is_confluent_on_random_strategies(
        x in derive_relations(3, 2, 9)
            .map(|d| d.relations.ring.clone())
            .map(|ring| coop_strategy(ring, 2))
            .unwrap(),
        seed1 in 0u64..1000,
        seed2 in 0u64..1000,
    ) {
        let d = derive_relations(3, 2, 9).unwrap();
        let rules = &d.relations.rules;
        let mut s1 = seed1;
        let mut pick1 = move |k: usize| {
            s1 = s1.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s1 >> 33) as usize % k
        };
        let mut s2 = seed2;
        let mut pick2 = move |k: usize| {
            s2 = s2.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s2 >> 33) as usize % k
        };
        let a = reduce_with_choice(&x, rules, &mut pick1);
        let b = reduce_with_choice(&x, rules, &mut pick2);
        let c = reduce(&x, rules);
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(&a, &c);
        // normal forms are irreducible
        prop_assert_eq!(reduce(&a, rules), a.clone());
    }
}
