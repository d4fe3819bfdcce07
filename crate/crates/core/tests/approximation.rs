use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thompson_core::approx::*;
use thompson_core::harmonic::{canonical_phi_u, phi_family, SharedFn};
use thompson_core::lamplighter::{random_config, Caps, SetFn};
use thompson_core::minfn::{generalized_minfun, minfun, r_family_kmean, weighted_sum, PhiFamilySum};
use thompson_core::value::{int, pow2};
use thompson_core::{Config, Dyadic, Orientation, SchreierGraph, Value};

fn graph() -> Arc<SchreierGraph> {
    Arc::new(SchreierGraph::default())
}

#[test]
fn explicit_sets_have_zero_deviation() {
    let g = graph();
    let f = PhiFamilySum::new(g.clone());
    for n in 2..=5 {
        let e = explicit_en_hairs(&g, n).unwrap();
        assert_eq!(e.len(), n as usize);
        let rep = strong_verify(&f, &e, n as usize, BetaSchedule::InvPow2, &Caps::default()).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.worst_deviation, Value::from_integer(0.into()));
        // each member φ_i, i ≤ 2n, is individually unchanged
        for i in 0..=2 * n {
            let fi = minfun(g.clone(), phi_family(i, Orientation::Lr));
            let r = strong_verify(&fi, &e, n as usize, BetaSchedule::InvN, &Caps::default()).unwrap();
            assert_eq!(r.worst_deviation, int(0), "i = {i}, n = {n}");
        }
    }
}

#[test]
fn single_and_sum_constructors_pass() {
    let g = graph();
    let caps = Caps::default();
    for n in 4..=5u32 {
        let e = construct_en_single(&g, canonical_phi_u(), n).unwrap();
        let f = minfun(g.clone(), canonical_phi_u());
        assert!(strong_verify(&f, &e, n as usize, BetaSchedule::InvN, &caps).unwrap().pass);

        let phis: Vec<SharedFn> = vec![canonical_phi_u(), canonical_phi_u()];
        let lambdas = vec![int(1), int(2)];
        let e = construct_en_sum(&g, &phis, &lambdas, n).unwrap();
        assert_eq!(e.len(), 2);
        let terms = phis.iter().map(|p| Arc::new(minfun(g.clone(), p.clone())) as _).collect();
        let f = weighted_sum(terms, lambdas).unwrap();
        assert!(strong_verify(&f, &e, n as usize, BetaSchedule::InvN, &caps).unwrap().pass);
    }
}

#[test]
fn markov_constructor_with_zero_powers_matches_sum() {
    let g = graph();
    let phis: Vec<SharedFn> = vec![canonical_phi_u(), phi_family(1, Orientation::Lr)];
    let lambdas = vec![int(1), int(1)];
    let (_, e) = construct_en_markov(&g, &phis, &lambdas, &[0, 0], 4, &Caps::default()).unwrap();
    assert_eq!(e, construct_en_sum(&g, &phis, &lambdas, 4).unwrap());
    let (f, e) = construct_en_markov(&g, &phis, &lambdas, &[1, 0], 4, &Caps::default()).unwrap();
    assert!(strong_verify(f.as_ref(), &e, 4, BetaSchedule::InvN, &Caps::default()).unwrap().pass);
    assert!(construct_en_markov(&g, &phis, &lambdas, &[5, 0], 4, &Caps::default()).is_err());
}

#[test]
fn countable_construction_grows_with_n() {
    let g = graph();
    let c4 = construct_en_countable(&g, 4).unwrap();
    let c5 = construct_en_countable(&g, 5).unwrap();
    assert_eq!(c4.last_index, 17);
    assert_eq!(c4.delta, pow2(-13));
    assert!(c5.set.len() > c4.set.len());
    for x in &c4.set {
        assert_eq!(g.classify(x).unwrap().offset(), 64);
    }
}

#[test]
fn small_sets_are_refuted_and_explicit_sets_are_not() {
    let g = graph();
    let f = PhiFamilySum::new(g.clone());
    let ball = g.ball(&Dyadic::root(), 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 4..=6u32 {
        for _ in 0..50 {
            let size = rng.random_range(0..=(n - 2) as usize);
            let e = random_config(&mut rng, &ball, size);
            let w = golden_witness(&g, &f, &e, n).unwrap().expect("small set must be refuted");
            assert!(w.deviation >= pow2(-(n as i64)), "{e}: {:?}", w);
            assert!(w.word.len() <= n as usize);
        }
        assert!(golden_witness(&g, &f, &explicit_en_hairs(&g, n).unwrap(), n).unwrap().is_none());
    }
}

#[test]
fn strong_pass_implies_weak_pass() {
    let g = graph();
    let f = minfun(g.clone(), canonical_phi_u());
    let e = construct_en_single(&g, canonical_phi_u(), 4).unwrap();
    let s = strong_verify(&f, &e, 4, BetaSchedule::InvN, &Caps::default()).unwrap();
    assert!(s.pass);
    assert!(weak_verify(&f, &e, &s.beta).unwrap().pass);
    // shorter words are a sub-orbit
    for k in 1..4 {
        assert!(strong_verify(&f, &e, k, BetaSchedule::InvN, &Caps::default()).unwrap().pass);
    }
}

#[test]
fn weak_verify_deep_hair_singleton() {
    let g = graph();
    let f = minfun(g.clone(), canonical_phi_u());
    let x = g.hair_point(&Dyadic::root(), 30).unwrap();
    assert!(weak_verify(&f, &Config::singleton(x), &pow2(-10)).unwrap().pass);
}

#[test]
fn generalized_search() {
    let g = graph();
    let caps = Caps::default();
    let f = generalized_minfun(r_family_kmean(2, 2).unwrap(), canonical_phi_u(), g.clone()).unwrap();
    let (e, rep) = generalized_en_search(&g, &f, 4, 4, &caps).unwrap();
    assert!(rep.pass);
    assert_eq!(e.len(), 2);
    assert!(generalized_en_search(&g, &f, 4, 0, &caps).is_err());
    let one = generalized_minfun(r_family_kmean(1, 1).unwrap(), canonical_phi_u(), g.clone()).unwrap();
    let (e, _) = generalized_en_search(&g, &one, 4, 4, &caps).unwrap();
    assert_eq!(e.len(), 1);
    assert!(f.eval(&e).unwrap() > int(0));
}

#[test]
fn hair_estimate_on_constructed_instance() {
    let g = graph();
    let e = construct_en_single(&g, canonical_phi_u(), 4).unwrap();
    let z = hair_base(&g, &e.points()[0]).unwrap();
    assert!(hair_estimate_check(&g, canonical_phi_u().as_ref(), &z, 4).unwrap().holds);
}
