use proptest::prelude::*;
use rand::Rng;

use sepcodes::agcodes::{first_points, product_compat_check, EvalCodeSpec};
use sepcodes::codes::{check_sep21, rng_from_seed, Caps, Code};
use sepcodes::curves::{Curve, Divisor};
use sepcodes::gf::{Fe, Gf};
use sepcodes::io::{parse_code, parse_divisor, write_code, write_divisor};

const FIELDS: [(u32, u32); 7] = [(2, 1), (7, 1), (2, 2), (2, 3), (3, 2), (5, 2), (11, 2)];

fn field() -> impl Strategy<Value = Gf> {
    (0..FIELDS.len()).prop_map(|i| Gf::new(FIELDS[i].0, FIELDS[i].1).unwrap())
}

fn field_and_elems(count: usize) -> impl Strategy<Value = (Gf, Vec<Fe>)> {
    field().prop_flat_map(move |gf| {
        let q = gf.q() as u64;
        (Just(gf), prop::collection::vec(0..q, count))
    })
    .prop_map(|(gf, encs)| {
        let v = encs.iter().map(|&e| gf.elem(e).unwrap()).collect();
        (gf, v)
    })
}

fn small_curve(i: usize) -> Curve {
    match i {
        0 => Curve::projective_line(Gf::new(2, 2).unwrap()),
        1 => Curve::hermitian(Gf::new(2, 2).unwrap()).unwrap(),
        _ => Curve::hermitian(Gf::new(3, 2).unwrap()).unwrap(),
    }
}

/// Brute-force separation: every ordered triple of distinct words.
fn oracle_separating(words: &[Vec<Fe>]) -> bool {
    let m = words.len();
    (0..m).all(|i| {
        (0..m).all(|j| {
            (0..m).all(|k| {
                i == j
                    || j == k
                    || i == k
                    || words[j].iter().enumerate().any(|(c, &b)| b != words[i][c] && b != words[k][c])
            })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms((gf, v) in field_and_elems(3)) {
        let (a, b, c) = (v[0], v[1], v[2]);
        prop_assert_eq!(gf.add(a, b), gf.add(b, a));
        prop_assert_eq!(gf.mul(a, b), gf.mul(b, a));
        prop_assert_eq!(gf.add(gf.add(a, b), c), gf.add(a, gf.add(b, c)));
        prop_assert_eq!(gf.mul(gf.mul(a, b), c), gf.mul(a, gf.mul(b, c)));
        prop_assert_eq!(gf.mul(a, gf.add(b, c)), gf.add(gf.mul(a, b), gf.mul(a, c)));
        prop_assert_eq!(gf.add(a, gf.neg(a)), Fe::ZERO);
        prop_assert_eq!(gf.sub(gf.add(a, b), b), a);
        prop_assert_eq!(gf.pow(a, gf.q() as u64), a);
        if a.is_zero() {
            prop_assert!(gf.inv(a).is_err());
        } else {
            prop_assert_eq!(gf.mul(a, gf.inv(a).unwrap()), gf.from_int(1));
            prop_assert_eq!(gf.mul(gf.div(b, a).unwrap(), a), b);
        }
        // Frobenius is additive
        let p = gf.p() as u64;
        prop_assert_eq!(gf.pow(gf.add(a, b), p), gf.add(gf.pow(a, p), gf.pow(b, p)));
    }

    #[test]
    fn listed_code_file_round_trip(
        (gf, n, words) in field().prop_flat_map(|gf| {
            let q = gf.q() as u64;
            (Just(gf), 1usize..6).prop_flat_map(move |(gf, n)| {
                (Just(gf), Just(n), prop::collection::btree_set(prop::collection::vec(0..q, n), 1..12))
            })
        })
    ) {
        let words: Vec<Vec<Fe>> =
            words.into_iter().map(|w| w.into_iter().map(|e| gf.elem(e).unwrap()).collect()).collect();
        let code = Code::listed(gf, n, words).unwrap();
        let text = write_code(&code);
        prop_assert_eq!(parse_code(&text).unwrap(), code);
    }

    #[test]
    fn sep21_agrees_with_brute_force(
        n in 1usize..5,
        raw in prop::collection::btree_set(prop::collection::vec(0u64..3, 4), 3..14)
    ) {
        let gf = Gf::new(3, 1).unwrap();
        let words: Vec<Vec<Fe>> = raw.into_iter().map(|w| w[..n].iter().map(|&e| gf.elem(e).unwrap()).collect()).collect();
        let mut uniq = words.clone();
        uniq.sort();
        uniq.dedup();
        let code = Code::listed(gf, n, uniq.clone()).unwrap();
        let v = check_sep21(&code, Caps::unlimited()).unwrap();
        prop_assert_eq!(v.passed(), oracle_separating(&uniq));
        if let Some(w) = v.witness {
            prop_assert!(w.y.iter().enumerate().all(|(c, b)| *b == w.x[c] || *b == w.z[c]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn divisor_arithmetic(curve_i in 0usize..3, seed in any::<u64>()) {
        let c = small_curve(curve_i);
        let mut rng = rng_from_seed(seed);
        let (e1, e2) = (rng.gen_range(-4..=6), rng.gen_range(-4..=6));
        let a = c.random_divisor(&mut rng, e1);
        let b = c.random_divisor(&mut rng, e2);
        prop_assert_eq!((&a + &b).degree(), a.degree() + b.degree());
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert!((&a + &(-&a)).is_zero());
        prop_assert_eq!(a.scale(3).degree(), 3 * a.degree());
        let text = write_divisor(&c, &a).unwrap();
        let (c2, a2) = parse_divisor(&text).unwrap();
        prop_assert_eq!(c2.num_points(), c.num_points());
        prop_assert_eq!(a2, a);
    }

    #[test]
    fn riemann_roch_identity(curve_i in 0usize..3, seed in any::<u64>()) {
        let c = small_curve(curve_i);
        let g = c.genus() as i64;
        let omega = c.canonical_divisor();
        let mut rng = rng_from_seed(seed);
        let deg = rng.gen_range(-3..=3 * g + 4);
        let d = c.random_divisor(&mut rng, deg);
        let lhs = c.l_dim(&d).unwrap() as i64 - c.l_dim(&(&omega - &d)).unwrap() as i64;
        prop_assert_eq!(lhs, deg + 1 - g);
    }

    #[test]
    fn elements_respect_their_divisor(curve_i in 0usize..3, seed in any::<u64>()) {
        let c = small_curve(curve_i);
        let mut rng = rng_from_seed(seed);
        let deg = rng.gen_range(0..=2 * c.genus() as i64 + 3);
        let d = c.random_divisor(&mut rng, deg);
        let space = c.riemann_roch(&d, &[]).unwrap();
        let f = c.random_element(&mut rng, &space);
        if !f.is_zero() {
            let div = c.principal_divisor(&f).unwrap();
            // zeros at non-rational places are not counted
            prop_assert!(div.degree() <= 0);
            prop_assert!((&div + &d).is_effective());
        }
    }

    #[test]
    fn evaluation_is_multiplicative(curve_i in 0usize..3, seed in any::<u64>()) {
        let c = small_curve(curve_i);
        let mut rng = rng_from_seed(seed);
        let pts = first_points(&c, c.num_points()).unwrap();
        let max = pts.len() as i64 / 2;
        let d1 = { let e = rng.gen_range(0..=max); c.random_divisor(&mut rng, e) };
        let d2 = { let e = rng.gen_range(0..=max); c.random_divisor(&mut rng, e) };
        let f1 = c.random_element(&mut rng, &c.riemann_roch(&d1, &[]).unwrap());
        let f2 = c.random_element(&mut rng, &c.riemann_roch(&d2, &[]).unwrap());
        let s1 = EvalCodeSpec::new(&c, pts.clone(), d1).unwrap();
        let s2 = EvalCodeSpec::new(&c, pts, d2).unwrap();
        prop_assert!(product_compat_check(&c, &s1, &s2, &f1, &f2).unwrap());
    }
}

#[test]
fn divisor_reduced_has_unit_multiplicities() {
    let d = Divisor::reduced(&[3, 1, 5]);
    assert!(d.support().all(|(_, m)| m == 1));
    assert_eq!(d.degree(), 3);
    assert_eq!(Divisor::reduced(&[3, 3]).mult(3), 2);
}
