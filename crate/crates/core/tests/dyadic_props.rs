use proptest::prelude::*;
use thompson_core::word::{g0_apply, g0_inv_apply, g1_apply, g1_inv_apply};
use thompson_core::{cocycle_eval, cocycle_identity_check, kernel_sample, word_to_pl, Dyadic, FWord, Gen, PLMap};

fn dyadic_in_unit() -> impl Strategy<Value = Dyadic> {
    (1u32..20).prop_flat_map(|e| (1u64..(1u64 << e)).prop_map(move |k| Dyadic::new(k as i64, e)))
}

fn word(max: usize) -> impl Strategy<Value = FWord> {
    prop::collection::vec(prop::sample::select(Gen::ALL.to_vec()), 0..=max).prop_map(FWord)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn generator_round_trips(x in dyadic_in_unit()) {
        prop_assert_eq!(g0_inv_apply(&g0_apply(&x)), x.clone());
        prop_assert_eq!(g1_inv_apply(&g1_apply(&x)), x.clone());
        for g in Gen::ALL {
            prop_assert_eq!(g.inverse().apply(&g.apply(&x)), x.clone());
        }
    }

    #[test]
    fn words_act_on_vertices(w in word(10), x in dyadic_in_unit()) {
        let f = word_to_pl(&w);
        let y = f.apply(&x);
        prop_assert!(y.is_vertex());
        prop_assert_eq!(&y, &w.apply(&x));
        prop_assert_eq!(word_to_pl(&w.inverse()).apply(&y), x);
        f.validate().unwrap();
    }

    #[test]
    fn cocycle_identity(g in word(8), h in word(8), x in dyadic_in_unit()) {
        prop_assert!(cocycle_identity_check(&word_to_pl(&g), &word_to_pl(&h), &x));
    }

    #[test]
    fn compose_and_invert(g in word(6), h in word(6)) {
        let (f, k) = (word_to_pl(&g), word_to_pl(&h));
        prop_assert_eq!(f.invert().invert(), f.clone());
        prop_assert_eq!(f.compose(&PLMap::identity()), f.clone());
        prop_assert!(f.compose(&f.invert()).is_identity());
        prop_assert_eq!(f.compose(&k), word_to_pl(&g.concat(&h)));
    }

    #[test]
    fn nonidentity_elements_show_a_nonzero_cocycle(g in word(10)) {
        let f = word_to_pl(&g);
        let s = kernel_sample(&f);
        if !f.is_identity() {
            prop_assert!(s.has_breakpoint);
            prop_assert!(s.nonzero_at.is_some());
        } else {
            prop_assert_eq!(s.nonzero_at, None);
        }
    }
}

#[test]
fn spec_values() {
    let p = Dyadic::root();
    assert_eq!(g0_apply(&p).to_string(), "3/2^3");
    let q: Dyadic = "1/4".parse().unwrap();
    assert_eq!(g1_apply(&q), q);
    assert_eq!(thompson_core::gen_a().apply(&p).to_string(), "11/2^4");
    assert_eq!(thompson_core::gen_b().apply(&p).to_string(), "9/2^4");
    assert_eq!(cocycle_eval(&PLMap::g0(), &"1/2".parse().unwrap()), 1);
    assert!(word_to_pl(&"aA".parse().unwrap()).is_identity());
    assert!(word_to_pl(&FWord::empty()).is_identity());
}
