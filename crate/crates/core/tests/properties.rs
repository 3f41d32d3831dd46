use hermlocal::hermitian::jordan_decompose;
use hermlocal::padic::{
    rat, HermMatrix, OkElement, OkMatrix, PrimeContext, QuatElement, RationalPoly, Valuation,
};
use proptest::prelude::*;

fn ok(c: PrimeContext, a: i64, b: i64) -> OkElement {
    OkElement::new(c, a as i128, b as i128)
}

fn ctx_strategy() -> impl Strategy<Value = PrimeContext> {
    prop_oneof![Just(3u64), Just(5), Just(7)].prop_map(|p| PrimeContext::new(p, 5).unwrap())
}

proptest! {
    #[test]
    fn norm_is_multiplicative(c in ctx_strategy(), a in any::<i32>(), b in any::<i32>(), x in any::<i32>(), y in any::<i32>()) {
        let u = ok(c, a as i64, b as i64);
        let v = ok(c, x as i64, y as i64);
        prop_assert_eq!((u * v).norm(), c.mul(u.norm(), v.norm()));
        prop_assert_eq!(u.conj().conj(), u);
        prop_assert_eq!(u * u.conj(), OkElement::from_residues(c, u.norm(), 0));
        prop_assert_eq!((u * v).conj(), u.conj() * v.conj());
    }

    #[test]
    fn quaternion_valuation_is_additive(c in ctx_strategy(),
                                        a in (0i64..40, 0i64..40), b in (0i64..40, 0i64..40),
                                        x in (0i64..40, 0i64..40), y in (0i64..40, 0i64..40)) {
        let q1 = QuatElement::new(ok(c, a.0, a.1), ok(c, b.0, b.1));
        let q2 = QuatElement::new(ok(c, x.0, x.1), ok(c, y.0, y.1));
        if let (Valuation::Finite(v1), Valuation::Finite(v2)) = (q1.valuation(), q2.valuation()) {
            // Stay well inside the carried precision.
            if v1 + v2 < 2 * c.precision() - 2 {
                prop_assert_eq!((q1 * q2).valuation(), Valuation::Finite(v1 + v2));
            }
        }
    }

    #[test]
    fn jordan_recovers_diagonal_profile(exps in prop::collection::vec(0u32..4, 1..5),
                                        seed in prop::collection::vec((any::<i16>(), any::<i16>()), 16)) {
        // Precision above Σ exps keeps the determinant visible.
        let c = PrimeContext::new(3, 14).unwrap();
        let n = exps.len();
        // Unipotent upper-triangular times a unit diagonal: always invertible.
        let mut u = OkMatrix::identity(c, n);
        let mut k = 0;
        for i in 0..n {
            for j in 0..n {
                let (a, b) = seed[k % seed.len()];
                k += 1;
                if j > i {
                    u.set(i, j, ok(c, a as i64, b as i64));
                } else if i == j && (a as i64).rem_euclid(3) != 0 {
                    u.set(i, i, ok(c, a as i64, 0));
                }
            }
        }
        let d = HermMatrix::diagonal_powers(c, &exps);
        let t = d.congruence(&u.transpose()).unwrap();
        let dec = jordan_decompose(&t).unwrap();
        let mut want = exps.clone();
        want.sort();
        prop_assert_eq!(&dec.exponents, &want);
        let back = t.congruence(&dec.change_of_basis).unwrap();
        prop_assert_eq!(back, HermMatrix::diagonal_powers(c, &dec.exponents));
    }

    #[test]
    fn poly_evaluation_is_a_ring_map(f in prop::collection::vec(-9i64..9, 0..5),
                                     g in prop::collection::vec(-9i64..9, 0..5),
                                     xn in -7i64..7, xd in 1i64..6) {
        let f = RationalPoly::new(f.iter().map(|&c| rat(c, 1)).collect());
        let g = RationalPoly::new(g.iter().map(|&c| rat(c, 2)).collect());
        let x = rat(xn, xd);
        prop_assert_eq!((&f * &g).eval(&x), f.eval(&x) * g.eval(&x));
        prop_assert_eq!((&f + &g).eval(&x), f.eval(&x) + g.eval(&x));
    }
}
