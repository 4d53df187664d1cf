use num_bigint::BigInt;
use proptest::prelude::*;
use subtile::algebra::Q;
use subtile::conjugacy::convert_point;
use subtile::io::parse_poly;
use subtile::subst::population_vector;
use subtile::{LengthVector, Scalar, Substitution};

const RULES: [&str; 4] =
    ["a -> b, b -> ab", "a -> abab, b -> bbba", "a -> aaaabb, b -> babbba", "a -> ab, b -> ca, c -> a"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn population_is_functorial(r in 0..RULES.len(), w in proptest::collection::vec(0u8..3, 0..60), k in 1usize..3) {
        let s = Substitution::parse(RULES[r]).unwrap();
        let w: Vec<u8> = w.into_iter().map(|a| a % s.n() as u8).collect();
        let image = s.apply(&w, k).unwrap();
        let mut want = population_vector(&w, s.n());
        for _ in 0..k {
            want = want.mapped(&s.matrix());
        }
        prop_assert_eq!(population_vector(&image, s.n()), want);
    }

    #[test]
    fn point_conversion_round_trips(a in 0u8..2, num in 0i64..1000, l in proptest::collection::vec(1i64..20, 2), l2 in proptest::collection::vec(1i64..20, 2)) {
        let (l, l2) = (LengthVector::from_ints(&l).unwrap(), LengthVector::from_ints(&l2).unwrap());
        let t = Scalar::rational(Q::new(BigInt::from(num), BigInt::from(1000))) * l.get(a as usize);
        let there = convert_point(a, &t, &l, &l2).unwrap();
        prop_assert_eq!(convert_point(a, &there, &l2, &l).unwrap(), t);
    }

    #[test]
    fn polynomials_print_and_reparse(c in proptest::collection::vec(-9i64..10, 1..5), d in 1i64..7) {
        let text: Vec<String> = c.iter().enumerate().map(|(i, v)| format!("({v}/{d})*x^{i}")).collect();
        let p = parse_poly(&text.join(" + ")).unwrap();
        prop_assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
    }
}
