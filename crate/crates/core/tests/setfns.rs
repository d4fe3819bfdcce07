use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thompson_core::harmonic::{canonical_phi_u, phi_family, Perturbed};
use thompson_core::lamplighter::*;
use thompson_core::minfn::*;
use thompson_core::value::{int, pow2, ratio};
use thompson_core::{Config, Dyadic, Gen, Orientation, SchreierGraph, Value};

fn graph() -> Arc<SchreierGraph> {
    Arc::new(SchreierGraph::default())
}

/// Brute force over all 5^n letter sequences.
fn naive_iterate(f: &dyn SetFn, e: &Config, n: usize) -> Value {
    if n == 0 {
        return f.eval(e).unwrap();
    }
    let s: Value = Letter::ALL.iter().map(|&l| naive_iterate(f, &apply_letter(e, l), n - 1)).sum();
    s / int(5)
}

fn samples(g: &SchreierGraph, count: usize, max_size: usize, radius: u32, seed: u64) -> Vec<Config> {
    let ball = g.ball(&Dyadic::root(), radius).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| {
        let k = rng.random_range(0..=max_size);
        random_config(&mut rng, &ball, k)
    }).collect()
}

#[test]
fn dp_matches_naive_enumeration() {
    let g = graph();
    let f = minfun(g.clone(), canonical_phi_u());
    let caps = Caps::default();
    let p = Config::singleton(Dyadic::root());
    assert_eq!(markov_iterate(&f, &p, 3, &caps).unwrap(), naive_iterate(&f, &p, 3));
    for (i, e) in samples(&g, 100, 4, 5, 1).iter().enumerate() {
        let n = i % 5;
        assert_eq!(markov_iterate(&f, e, n, &caps).unwrap(), naive_iterate(&f, e, n), "{e} n={n}");
    }
    assert_eq!(markov_iterate(&f, &p, 1, &caps).unwrap(), markov_apply_set(&f, &p).unwrap());
    assert!(markov_iterate(&f, &p, 9, &caps).is_err());
}

#[test]
fn markov_powers_decrease_for_superharmonic_f() {
    let g = graph();
    let f = minfun(g.clone(), canonical_phi_u());
    let caps = Caps::default();
    for e in samples(&g, 10, 3, 4, 2) {
        let vals: Vec<Value> = (0..=4).map(|n| markov_iterate(&f, &e, n, &caps).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] <= w[0]), "{e}");
    }
}

#[test]
fn orbit_sizes_non_decreasing() {
    let caps = Caps::default();
    let o = orbit_enumerate(&Config::singleton(Dyadic::root()), 5, &caps).unwrap();
    assert!(o.layer_end.windows(2).all(|w| w[0] <= w[1]));
    for (c, w) in o.iter() {
        assert!(w.len() <= 5);
        assert_eq!(&apply_word(&Config::singleton(Dyadic::root()), w), c);
    }
    let tight = Caps { word_len: 8, orbit_size: 10 };
    assert!(orbit_enumerate(&Config::empty(), 5, &tight).is_err());
}

#[test]
fn apply_word_switch_example() {
    // b a^2 σ applied to ∅ lands on b a^2 · p
    let w: LampWord = "baas".parse().unwrap();
    let x = Gen::B.apply(&Gen::A.apply(&Gen::A.apply(&Dyadic::root())));
    assert_eq!(apply_word(&Config::empty(), &w), Config::singleton(x));
}

#[test]
fn t_operator_below_f_for_min_functions() {
    let g = graph();
    let fs: Vec<MinFn> = vec![
        minfun(g.clone(), canonical_phi_u()),
        minfun(g.clone(), phi_family(0, Orientation::Lr)),
        minfun(g.clone(), phi_family(2, Orientation::Lr)),
    ];
    let alphas = [ratio(1, 4), ratio(1, 2), ratio(3, 4)];
    for e in samples(&g, 300, 6, 8, 3) {
        for f in &fs {
            let v = f.eval(&e).unwrap();
            // the switch part is the identity on min-functions
            assert_eq!(f.eval(&apply_letter(&e, Letter::Switch)).unwrap(), v);
            for a in &alphas {
                assert!(t_operator(f, &e, a).unwrap() <= v, "{} at {e}", f.label());
            }
        }
    }
    assert!(t_operator(&fs[0], &Config::empty(), &int(1)).is_err());
}

#[test]
fn weighted_sums_and_markov_images_stay_superharmonic() {
    let g = graph();
    let caps = Caps::default();
    let a: SharedSetFn = Arc::new(minfun(g.clone(), canonical_phi_u()));
    let b: SharedSetFn = Arc::new(minfun(g.clone(), phi_family(1, Orientation::Lr)));
    let sum = weighted_sum(vec![a.clone(), b.clone()], vec![int(2), ratio(1, 3)]).unwrap();
    assert_eq!(sum.eval(&Config::empty()).unwrap(), int(8) + ratio(1, 6));
    let img = markov_image(a.clone(), 2, caps).unwrap();
    let ss = samples(&g, 40, 3, 5, 4);
    assert!(set_superharmonic_check(&sum, &ss).unwrap().ok());
    assert!(set_superharmonic_check(&img, &ss).unwrap().ok());
    let single = weighted_sum(vec![a.clone()], vec![int(1)]).unwrap();
    for e in &ss {
        assert_eq!(single.eval(e).unwrap(), a.eval(e).unwrap());
    }
    assert!(markov_image(a, 0, caps).unwrap().eval(&Config::empty()).unwrap() == int(4));
}

#[test]
fn countable_sum_within_certified_error() {
    let g = graph();
    let coarse = phi_family_countable(g.clone(), pow2(-8)).unwrap();
    let fine = phi_family_countable(g.clone(), pow2(-16)).unwrap();
    for e in samples(&g, 60, 5, 8, 5) {
        let (c, f) = (coarse.eval(&e).unwrap(), fine.eval(&e).unwrap());
        assert!(c <= f && &f - &c < coarse.eps, "{e}");
        assert!(f > int(0) && f < int(2));
    }
}

#[test]
fn generalized_min_functions() {
    let g = graph();
    let ss = samples(&g, 200, 5, 6, 6);
    let plain = minfun(g.clone(), canonical_phi_u());
    let k1 = generalized_minfun(r_family_kmean(1, 3).unwrap(), canonical_phi_u(), g.clone()).unwrap();
    for e in &ss {
        assert_eq!(k1.eval(e).unwrap(), plain.eval(e).unwrap());
    }
    for (k, m) in [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3)] {
        let f = generalized_minfun(r_family_kmean(k, m).unwrap(), canonical_phi_u(), g.clone()).unwrap();
        assert!(switch_invariant_check(&f, &ss).unwrap().invariant());
        assert!(set_superharmonic_check(&f, &ss).unwrap().ok(), "kmean {k} {m}");
    }
}

#[test]
fn switch_invariance_of_min_functions() {
    let g = graph();
    let ss = samples(&g, 100, 4, 6, 7);
    let f = minfun(g.clone(), canonical_phi_u());
    assert!(f.claims_switch_invariant());
    assert!(switch_invariant_check(&f, &ss).unwrap().invariant());
    assert!(!switch_invariant_check(&Cardinality, &ss).unwrap().invariant());
}

#[test]
fn transfer_margin_matches_vertex_side() {
    let g = graph();
    let q = Gen::B.apply(&Dyadic::root());
    let at = g.classify(&q).unwrap();
    let phi = Arc::new(Perturbed { inner: canonical_phi_u(), at, value: ratio(1, 2) });
    let rep = non_superharmonic_transfer(&g, phi, &q).unwrap();
    assert!(rep.violated());
    assert_eq!(rep.margin, rep.vertex_side);
}

fn positive() -> impl Strategy<Value = Value> {
    (1i64..1000, 1i64..1000).prop_map(|(n, d)| ratio(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn ratio_of_mins_stays_bracketed(pairs in prop::collection::vec((positive(), positive()), 1..6)) {
        let (a, b): (Vec<Value>, Vec<Value>) = pairs.into_iter().unzip();
        let qs: Vec<Value> = a.iter().zip(&b).map(|(x, y)| x / y).collect();
        let lo = qs.iter().min().unwrap() - ratio(1, 1000);
        let hi = qs.iter().max().unwrap() + ratio(1, 1000);
        prop_assert!(min_ratio_bracketed(&a, &b, &lo, &hi));
    }

    #[test]
    fn kmean_lipschitz_and_monotone(k in 1usize..4, extra in 0usize..2, seed in any::<u64>()) {
        let r = r_family_kmean(k, k + extra).unwrap();
        prop_assert!(lipschitz_probe(&r, 50, seed) <= int(1));
        prop_assert!(r.self_test(50, seed).is_ok());
    }
}
