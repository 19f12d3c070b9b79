use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;

use profinite::group::{make_group, GroupSpec};
use profinite::integral::characters::characters;
use profinite::integral::path_integral::{path_integral_with_workers, Mode};
use profinite::integral::{partition_function, ActionFunctional, CylinderMeasure};
use profinite::matrioshka::{block_decode, block_encode, build_partition_tree, Decoded, EncodingConvention};
use profinite::metric::{cantor_distance, hamming, neighbors, subcube, Word};
use profinite::tower::{make_tower, CoherentElement, Tower, TowerSpec};

const TOWERS: [&str; 7] = [
    "binary depth=6",
    "padic p=3 depth=4",
    "padic p=5 depth=3",
    "cyclotomic p=3 depth=4",
    "cyclotomic p=7 depth=2",
    "f2ab depth=3",
    "aut_f2ab depth=2",
];

fn tower(line: &str) -> Arc<Tower> {
    make_tower(&TowerSpec::parse_line(line).unwrap()).unwrap()
}

fn word(n: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec(any::<bool>(), n).prop_map(|b| Word::new(b).unwrap())
}

fn words_same_len() -> impl Strategy<Value = (Word, Word, Word)> {
    (1usize..40).prop_flat_map(|n| (word(n), word(n), word(n)))
}

proptest! {
    #[test]
    fn codes_round_trip(which in 0usize..TOWERS.len(), pick in any::<usize>()) {
        let t = tower(TOWERS[which]);
        let tree = build_partition_tree(&t, &EncodingConvention::default()).unwrap();
        let x = CoherentElement::lift(&t, pick % t.order(t.depth())).unwrap();
        let code = tree.encode(&x).unwrap();
        match tree.decode(&code).unwrap() {
            Decoded::Element(y) => prop_assert_eq!(y, x.clone()),
            Decoded::Cell(_) => prop_assert!(false, "full code decoded to a cell"),
        }
        // every proper prefix is a cell containing x
        for len in 0..code.len() {
            match tree.decode_bits(&code.bits()[..len]).unwrap() {
                Decoded::Cell(cell) => prop_assert!(cell.contains(&x)),
                Decoded::Element(_) => prop_assert!(false, "prefix decoded to an element"),
            }
        }
        let again = build_partition_tree(&t, &EncodingConvention::default()).unwrap();
        prop_assert_eq!(again.encode(&x).unwrap(), code);
    }

    #[test]
    fn block_codes_round_trip(which in 0usize..TOWERS.len(), pick in any::<usize>()) {
        let t = tower(TOWERS[which]);
        let x = CoherentElement::lift(&t, pick % t.order(t.depth())).unwrap();
        let code = block_encode(&t, &x).unwrap();
        for (k, (&w, &m)) in code.widths().iter().zip(code.m_values()).enumerate() {
            prop_assert_eq!(code.blocks()[k].len(), w);
            prop_assert!(w >= profinite::arith::ceil_log2(m));
        }
        prop_assert_eq!(block_decode(&t, code.blocks()).unwrap(), x);
    }

    #[test]
    fn strong_triangle((x, y, z) in words_same_len()) {
        let dxz = cantor_distance(&x, &z).unwrap();
        let bound = cantor_distance(&x, &y).unwrap().max(cantor_distance(&y, &z).unwrap());
        prop_assert!(dxz <= bound);
        prop_assert!(dxz.to_rational() <= bound.to_rational());
    }

    #[test]
    fn hamming_is_a_metric((x, y, z) in words_same_len()) {
        let d = |a: &Word, b: &Word| hamming(a, b).unwrap();
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert_eq!(d(&x, &y) == 0, x == y);
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
        let ns = neighbors(&x);
        prop_assert_eq!(ns.len(), x.len());
        prop_assert!(ns.iter().all(|n| d(n, &x) == 1));
    }

    #[test]
    fn subcube_is_sound(n in 1usize..16, count in 1usize..6, seed in any::<u64>()) {
        let words: Vec<Word> = (0..count)
            .map(|i| Word::from_index(seed.rotate_left(i as u32 * 7) & ((1u64 << n) - 1), n))
            .collect();
        let s = subcube(&words).unwrap();
        let p = s.prefix_len();
        prop_assert!(words.iter().all(|w| s.contains(w)));
        if p < n {
            let first = words[0].get(p);
            prop_assert!(words.iter().any(|w| w.get(p) != first));
        }
        prop_assert_eq!(s.vertex_count(), Some(1u128 << (n - p)));
    }

    #[test]
    fn unitarity_bound(n in 1usize..10, seed in any::<u64>()) {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 41) as i64 - 20
        };
        let mut q = vec![Rational64::from_integer(0); n * n];
        for i in 0..n {
            for j in i..n {
                q[i * n + j] = Rational64::new(next(), 7);
                q[j * n + i] = q[i * n + j];
            }
        }
        let w: Vec<f64> = (0..n).map(|_| next() as f64 / 3.0).collect();
        let s = ActionFunctional::new(q, w, 0.7).unwrap();
        let mu = CylinderMeasure::cantor(n).unwrap();
        let r = path_integral_with_workers(&mu, &s, Mode::Exact, n, 1).unwrap();
        prop_assert!(r.value.norm() <= 1.0 + 1e-12);
        let parallel = path_integral_with_workers(&mu, &s, Mode::Exact, n, 5).unwrap();
        prop_assert_eq!(r.value, parallel.value);
    }

    #[test]
    fn separable_closed_form(w in proptest::collection::vec(-10.0f64..10.0, 1..14), hbar in 0.1f64..5.0) {
        let n = w.len();
        let product = w.iter().fold(Complex64::new(1.0, 0.0), |acc, &wk| {
            acc * (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, wk / hbar)) / 2.0
        });
        let s = ActionFunctional::new(vec![], w, hbar).unwrap();
        let r = path_integral_with_workers(&CylinderMeasure::cantor(n).unwrap(), &s, Mode::Exact, n, 1).unwrap();
        prop_assert!((r.value - product).norm() <= 1e-12 * product.norm().max(1e-3));
    }

    #[test]
    fn partition_decreases(lambda in 0.0f64..5.0, step in 0.01f64..2.0, which in 0usize..3) {
        let t = tower(["cyclotomic p=3 depth=2", "cyclotomic p=5 depth=2", "cyclotomic p=2 depth=4"][which]);
        let a = partition_function(&t, lambda).unwrap();
        let b = partition_function(&t, lambda + step).unwrap();
        prop_assert!(b < a);
        prop_assert!(b > 0.0);
    }
}

#[test]
fn group_axioms_hold_for_every_kind() {
    let specs = [
        GroupSpec::Cyclic(12),
        GroupSpec::Units(20),
        GroupSpec::Gl2 { k: 2 },
        GroupSpec::Bits(4),
        GroupSpec::Product(Box::new(GroupSpec::Cyclic(4)), Box::new(GroupSpec::Units(9))),
    ];
    for spec in specs {
        let g = make_group(&spec).unwrap();
        let n = g.order();
        for a in 0..n {
            assert_eq!(g.mul(a, g.identity()), a);
            assert_eq!(g.mul(a, g.inverse(a)), g.identity());
            for b in 0..n {
                for c in 0..n {
                    assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)), "{spec}");
                }
            }
        }
    }
}

#[test]
fn characters_are_multiplicative_roots_of_unity() {
    for n in [7, 12, 15, 32] {
        let g = make_group(&GroupSpec::Units(n)).unwrap();
        let exponent = (0..g.order()).map(|x| g.element_order(x)).fold(1, num_integer::lcm);
        for chi in characters(&g).unwrap() {
            assert_eq!(exponent % chi.order(), 0);
            for a in 0..g.order() {
                let v = chi.value(a);
                assert!((v.norm() - 1.0).abs() < 1e-12);
                let turn = *chi.turn(a).numer() as f64 / *chi.turn(a).denom() as f64;
                assert!((v - Complex64::from_polar(1.0, TAU * turn)).norm() < 1e-12);
                for b in 0..g.order() {
                    assert!((chi.value(g.mul(a, b)) - v * chi.value(b)).norm() < 1e-12);
                }
            }
        }
    }
}
