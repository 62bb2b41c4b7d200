use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use robba::operators::{gamma_act, phi, psi, GammaGenerator};
use robba::parse::{parse_character, parse_series, SeriesContext};
use robba::rankone::{exact_precision, Character};
use robba::{PadicScalar, TruncatedLaurent};

const N: i32 = 10;

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![3u32, 5, 7])
}

fn nonzero() -> impl Strategy<Value = i64> {
    (-5000i64..5000).prop_filter("nonzero", |n| *n != 0)
}

fn series(p: u32, seed: u64, lo: i32, hi: i32) -> TruncatedLaurent {
    TruncatedLaurent::random(&mut ChaCha8Rng::seed_from_u64(seed), p, N, lo, hi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Field operations agree with exact rational arithmetic.
    #[test]
    fn scalars_follow_rationals(p in prime(), a in nonzero(), b in nonzero(), c in nonzero(), d in nonzero()) {
        let q = |n: i64, m: i64| PadicScalar::from_rational(p, n, m, N).unwrap();
        let (x, y) = (q(a, b), q(c, d));
        prop_assert!((x * y).eq_at_prec(&q(a * c, b * d)));
        prop_assert!((x + y).eq_at_prec(&q(a * d + c * b, b * d)));
        prop_assert!((x - y).eq_at_prec(&q(a * d - c * b, b * d)));
        prop_assert!(x.try_div(&y).unwrap().eq_at_prec(&q(a * d, b * c)));
    }

    // Absolute precision: sums keep the smaller, products lose the other
    // factor's valuation.
    #[test]
    fn precision_bookkeeping(p in prime(), u in nonzero(), w in nonzero(), v1 in -3i32..4, v2 in -3i32..4, n1 in 6i32..12, n2 in 6i32..12) {
        let x = PadicScalar::from_parts(p, v1, u, n1);
        let y = PadicScalar::from_parts(p, v2, w, n2);
        prop_assert_eq!((x + y).prec(), n1.min(n2));
        let m = x * y;
        prop_assert_eq!(m.prec(), (x.val() + n2).min(y.val() + n1).min(x.val() + y.val() + robba::padic::max_relative_precision(p)));
        prop_assert_eq!(m.val(), x.val() + y.val());
        prop_assert!(x.inv().unwrap().try_mul(&x).unwrap().eq_at_prec(&PadicScalar::one(p, N)));
    }

    #[test]
    fn derivation_is_a_derivation(p in prime(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let f = series(p, s1, -4, 30);
        let g = series(p, s2, -4, 30);
        let lhs = f.try_mul(&g).unwrap().partial();
        let rhs = f.partial().try_mul(&g).unwrap().try_add(&f.try_mul(&g.partial()).unwrap()).unwrap();
        prop_assert!(lhs.agrees(&rhs));
        prop_assert!(f.partial().res().unwrap().is_zero());
    }

    #[test]
    fn frobenius_identities(p in prime(), s in any::<u64>()) {
        let f = series(p, s, -6, 40);
        let g = GammaGenerator::default_for(p);
        let pf = phi(&f).unwrap();
        prop_assert!(psi(&pf).unwrap().agrees(&f));
        prop_assert!(phi(&gamma_act(&f, &g, 1).unwrap()).unwrap().agrees(&gamma_act(&pf, &g, 1).unwrap()));
        prop_assert!(pf.res().unwrap().eq_at_prec(&f.res().unwrap()));
    }

    #[test]
    fn displayed_series_parse_back(p in prime(), s in any::<u64>()) {
        let f = series(p, s, -5, 12);
        let ctx = SeriesContext { p, prec: N, hi: 12 };
        let text = f.to_string();
        if !text.is_empty() && text != "0" {
            prop_assert!(parse_series(&text, ctx).unwrap().agrees(&f));
        }
    }

    #[test]
    fn characters_form_a_group(p in prime(), i in -3i64..4, j in -3i64..4, u in 1i64..50) {
        let ex = exact_precision(p);
        let ur = Character::unramified(PadicScalar::from_i64(p, u * p as i64 + 1, ex)).unwrap();
        let a = Character::omega_x_pow(p, ex, i).mul(&ur);
        let b = Character::x_pow(p, ex, j);
        let ab = a.mul(&b);
        prop_assert_eq!(ab.module().degree, a.module().degree + b.module().degree);
        prop_assert_eq!(parse_character(&ab.to_string(), p).unwrap().to_string(), ab.to_string());
    }
}
