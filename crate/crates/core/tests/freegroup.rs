use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thompson_core::freegroup::*;
use thompson_core::value::ratio;

#[test]
fn every_sample_is_refuted() {
    let ball = z_ball(10);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let e = random_zset(&mut rng, &ball, 6);
        let w = witness_word(&e);
        assert!(w.word.len() <= 2);
        assert!(w.ratio <= ratio(1, 3), "{e:?}");
        assert!(witness_unspoiled(&e, &w));
    }
}

#[test]
fn min_function_is_superharmonic_on_samples() {
    let ball = z_ball(6);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let e = random_zset(&mut rng, &ball, 4);
        assert!(markov_apply_z(&e) <= minfun_z(&e), "{e:?}");
    }
}

#[test]
fn tail_segments_are_folner() {
    for l in [10u64, 100, 1000] {
        assert!(tail_folner(l).ratio <= ratio(2, l as i64));
    }
}
