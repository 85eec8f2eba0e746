use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::prelude::*;

use torus_orbits::arith::{bits_for, torus_distance, Rat, TorusPoint};
use torus_orbits::construct::{in_rhombus_set, Membership, RhombusSet};
use torus_orbits::geometry::{apply_matrix, UniMatrix};
use torus_orbits::smooth::{ExpTriple, Generators};

fn rat() -> impl Strategy<Value = Rat> {
    (1u64..2000).prop_flat_map(|q| (0..q).prop_map(move |p| Rat::small(p, q)))
}

fn point() -> impl Strategy<Value = TorusPoint> {
    (rat(), rat()).prop_map(|(x, y)| TorusPoint::exact(x, y))
}

fn exps() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..12, 3)
}

fn unimodular() -> impl Strategy<Value = UniMatrix> {
    // products of the elementary shears generate SL(2, Z)
    prop::collection::vec((any::<bool>(), -3i64..=3), 1..5).prop_map(|steps| {
        steps.into_iter().fold(UniMatrix::new(1, 0, 0, 1).unwrap(), |acc, (upper, t)| {
            let s = if upper {
                UniMatrix::new(1, t, 0, 1).unwrap()
            } else {
                UniMatrix::new(1, 0, t, 1).unwrap()
            };
            let [[a, b], [c, d]] = acc.entries();
            let [[e, f], [g, h]] = s.entries();
            UniMatrix::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h).unwrap()
        })
    })
}

fn as_big(r: &Rat) -> BigRational {
    r.to_big_rational()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn semigroup_action_is_associative(p in point(), a in exps(), b in exps()) {
        let g = Generators::default();
        let ta = ExpTriple::new(a.clone(), &g).unwrap();
        let tb = ExpTriple::new(b.clone(), &g).unwrap();
        let sum: Vec<u32> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let tab = ExpTriple::new(sum, &g).unwrap();
        let two_steps = p.mul_int(ta.multiplier()).unwrap().mul_int(tb.multiplier()).unwrap();
        prop_assert_eq!(two_steps, p.mul_int(tab.multiplier()).unwrap());
    }

    #[test]
    fn fixed_tracks_exact(p in point(), e in exps()) {
        let g = Generators::default();
        let t = ExpTriple::new(e, &g).unwrap();
        let bits = bits_for(t.multiplier(), 1e-15);
        let exact = p.mul_int(t.multiplier()).unwrap();
        let fixed = p.to_fixed(bits).unwrap().mul_int(t.multiplier()).unwrap();
        let d = torus_distance(&exact.to_fixed(bits).unwrap(), &fixed).unwrap();
        let (ex, ey) = exact.as_rats().unwrap();
        for (f, r) in [(fixed.x(), ex), (fixed.y(), ey)] {
            let diff = f.as_fixed().unwrap().value() - as_big(r);
            let off = Rat::from_big_rational(&diff).dist_to_int();
            prop_assert!(off <= fixed.error_bound());
        }
        prop_assert!(d.lo() <= BigRational::from_integer(BigInt::from(1)) / BigInt::from(1u64 << 40));
    }

    #[test]
    fn distance_is_symmetric(a in point(), b in point()) {
        let ab = torus_distance(&a, &b).unwrap();
        let ba = torus_distance(&b, &a).unwrap();
        prop_assert_eq!(ab.mid, ba.mid);
        prop_assert_eq!(ab.rad, ba.rad);
    }

    #[test]
    fn distance_triangle_inequality(a in point(), b in point(), c in point()) {
        let ac = torus_distance(&a, &c).unwrap();
        let ab = torus_distance(&a, &b).unwrap();
        let bc = torus_distance(&b, &c).unwrap();
        prop_assert!(ac.lo() <= ab.hi() + bc.hi());
    }

    #[test]
    fn matrix_commutes_with_multiplication(p in point(), m in unimodular(), k in 2u64..40) {
        let lhs = apply_matrix(&m, &p.mul_u64(k).unwrap()).unwrap();
        let rhs = apply_matrix(&m, &p).unwrap().mul_u64(k).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn preimage_property_is_exact(
        i in 0u64..=1000,
        neg in any::<bool>(),
        y in rat(),
        n in 1u64..=12,
        k in prop::sample::select(vec![2u64, 3, 5]),
    ) {
        // ||x|| <= delta = 1e-5
        let num = if neg { 100_000_000 - i } else { i };
        let x = Rat::small(num % 100_000_000, 100_000_000);
        let e = RhombusSet::new(Rat::small(1, 100_000), n).unwrap();
        let a = TorusPoint::exact(x, y);
        if in_rhombus_set(&e, &a) == Membership::Outside {
            prop_assert_eq!(in_rhombus_set(&e, &a.mul_u64(k).unwrap()), Membership::Outside);
        }
    }

    #[test]
    fn membership_is_periodic_and_symmetric(p in 0u64..5000, q in 1u64..5000, y in rat(), n in 1u64..=12) {
        let e = RhombusSet::wide(Rat::small(1, 20), n).unwrap();
        let x = Rat::small(p % q, q);
        let a = TorusPoint::exact(x.clone(), y.clone());
        let neg = TorusPoint::exact(x.neg(), y.neg());
        // a lift differing by an integer reduces to the same residue
        let lifted = TorusPoint::exact(Rat::new(BigInt::from(p % q + 3 * q), BigInt::from(q)).unwrap(), y.clone());
        let here = in_rhombus_set(&e, &a);
        prop_assert_eq!(here, in_rhombus_set(&e, &neg));
        prop_assert_eq!(here, in_rhombus_set(&e, &lifted));
        // shifting y by 1/N leaves ||Ny|| unchanged
        let shifted = TorusPoint::exact(x, y.add(&Rat::small(1, n)));
        prop_assert_eq!(here, in_rhombus_set(&e, &shifted));
    }
}

#[test]
fn multiplier_matches_integer_power() {
    let g = Generators::default();
    let t = ExpTriple::new(vec![3, 2, 1], &g).unwrap();
    assert_eq!(t.multiplier(), &BigUint::from(8u32 * 9 * 5));
}
