//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p thompson-core --test acceptance --release`.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thompson_core::approx::*;
use thompson_core::freegroup::{random_zset, tail_folner, witness_unspoiled, witness_word, z_ball};
use thompson_core::harmonic::{canonical_phi_u, golden_path_values, phi_family, shift_to_zero_inf, SharedFn};
use thompson_core::lamplighter::{random_config, switch_invariant_check, Caps, SetFn, SharedSetFn};
use thompson_core::minfn::*;
use thompson_core::value::{int, pow2, ratio, to_f64};
use thompson_core::walk::*;
use thompson_core::{
    cocycle_identity_check, word_to_pl, Config, Dyadic, FWord, Gen, Orientation, SchreierGraph, Value,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn graph() -> Arc<SchreierGraph> {
    Arc::new(SchreierGraph::default())
}

fn samples(g: &SchreierGraph, count: usize, max_size: usize, radius: u32, seed: u64) -> Vec<Config> {
    let ball = g.ball(&Dyadic::root(), radius).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let k = rng.random_range(0..=max_size);
            random_config(&mut rng, &ball, k)
        })
        .collect()
}

fn c1_delta() -> Outcome {
    let t = Instant::now();
    let rep = delta_check_phi_u(&graph(), 12).map_err(err)?;
    let took = t.elapsed();
    ensure(rep.nonzero_elsewhere.is_empty(), || format!("nonzero margin at {:?}", rep.nonzero_elsewhere))?;
    ensure(rep.margin_at_root == int(1), || format!("margin at p = {}", rep.margin_at_root))?;
    ensure(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("{} interior vertices, margin at p = {}, {took:.1?}", rep.checked, rep.margin_at_root))
}

fn c2_green() -> Outcome {
    let t = Instant::now();
    let g = graph();
    let p = Dyadic::root();
    let series = pn_series(&g, &p, &p, 30).map_err(err)?;
    let mut acc = Value::from_integer(0.into());
    for (n, pn) in series.iter().enumerate() {
        let next = &acc + pn;
        ensure(next >= acc && next < int(4), || format!("partial sum {} at N = {n}", to_f64(&next)))?;
        acc = next;
    }
    let cfg = WalkConfig { seed: 7, cap: 10_000, trials: 100_000 };
    let est = green_mc(&g, &p, &p, &cfg).map_err(err)?;
    ensure((3.5..=4.05).contains(&est.mean), || format!("MC mean {} outside [3.5, 4.05]", est.mean))?;
    let took = t.elapsed();
    ensure(took < Duration::from_secs(300), || format!("took {took:?}"))?;
    Ok(format!("G_30 = {:.6}, MC = {:.4} ± {:.4}, {took:.1?}", to_f64(&acc), est.mean, est.stderr))
}

fn c3_return() -> Outcome {
    let rep = return_prob(&graph(), &Dyadic::root(), 30).map_err(err)?;
    ensure(rep.partial.windows(2).all(|w| w[0] <= w[1]), || "partial sums decrease".into())?;
    ensure(rep.partial.iter().all(|u| *u < ratio(3, 4)), || "partial sum reaches 3/4".into())?;
    let u30 = &rep.partial[30];
    Ok(format!("U_30 = {:.9} (exact {u30})", to_f64(u30)))
}

fn c4_t_operator() -> Outcome {
    let g = graph();
    let mut phis: Vec<SharedFn> = vec![shift_to_zero_inf(canonical_phi_u())];
    phis.extend((0..=4).map(|i| phi_family(i, Orientation::Lr)));
    let fs: Vec<MinFn> = phis.into_iter().map(|phi| minfun(g.clone(), phi)).collect();
    let alphas = [ratio(1, 4), ratio(1, 2), ratio(3, 4)];
    let configs = samples(&g, 10_000, 6, 8, 0xacc4);
    let violations: usize = configs
        .par_iter()
        .map(|e| {
            let mut bad = 0;
            for f in &fs {
                let v = f.eval(e).unwrap();
                for a in &alphas {
                    if t_operator(f, e, a).unwrap() > v {
                        bad += 1;
                    }
                }
            }
            bad
        })
        .sum();
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok(format!("{} configs × {} functions × 3 α, 0 violations", configs.len(), fs.len()))
}

fn c5_explicit() -> Outcome {
    let t = Instant::now();
    let g = graph();
    let exact = PhiFamilySum::new(g.clone());
    let truncated = phi_family_countable(g.clone(), pow2(-20)).map_err(err)?;
    let caps = Caps::default();
    let mut sizes = Vec::new();
    for n in 2..=7u32 {
        let e = explicit_en_hairs(&g, n).map_err(err)?;
        for f in [&exact as &dyn SetFn, &truncated] {
            let rep = strong_verify(f, &e, n as usize, BetaSchedule::InvN, &caps).map_err(err)?;
            ensure(rep.worst_deviation == int(0), || {
                format!("{} n = {n}: deviation {} via {}", rep.function, rep.worst_deviation, rep.worst_word)
            })?;
            if f.label() == exact.label() {
                sizes.push(rep.examined);
            }
        }
    }
    let took = t.elapsed();
    ensure(took < Duration::from_secs(600), || format!("took {took:?}"))?;
    Ok(format!("n = 2..7 deviation 0, orbit sizes {sizes:?}, {took:.1?}"))
}

fn c6_refute() -> Outcome {
    let g = graph();
    let f = PhiFamilySum::new(g.clone());
    let ball = g.ball(&Dyadic::root(), 8).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc6);
    let mut least = int(1);
    for n in 4..=7u32 {
        for k in 0..200 {
            let size = rng.random_range(0..=(n - 2) as usize);
            let e = random_config(&mut rng, &ball, size);
            let w = golden_witness(&g, &f, &e, n)
                .map_err(err)?
                .ok_or_else(|| format!("n = {n}, sample {k}: {e} not refuted"))?;
            ensure(w.deviation >= pow2(-(n as i64)), || format!("n = {n}: {e} only deviates {}", w.deviation))?;
            ensure(w.word.len() <= n as usize, || format!("witness {} longer than {n}", w.word))?;
            let scaled = &w.deviation * pow2(n as i64);
            if scaled < least {
                least = scaled;
            }
        }
    }
    Ok(format!("800 configs refuted, min deviation·2^n = {least}"))
}

fn c7_constructors() -> Outcome {
    let g = graph();
    let caps = Caps::default();
    let o = Orientation::Lr;
    let verify = |f: &dyn SetFn, e: &Config, n: u32, what: &str| -> Result<(), String> {
        let rep = strong_verify(f, e, n as usize, BetaSchedule::InvN, &caps).map_err(err)?;
        ensure(rep.pass, || format!("{what} n = {n}: deviation {} via {}", rep.worst_deviation, rep.worst_word))
    };
    let mut checked = 0;
    for n in 4..=6u32 {
        for phi in [canonical_phi_u(), phi_family(2, o)] {
            let e = construct_en_single(&g, phi.clone(), n).map_err(err)?;
            verify(&minfun(g.clone(), phi), &e, n, "single")?;
            checked += 1;
        }

        let phis: Vec<SharedFn> = vec![canonical_phi_u(), phi_family(1, o), phi_family(3, o)];
        let lambdas = vec![int(1), ratio(1, 2), int(2)];
        let e = construct_en_sum(&g, &phis, &lambdas, n).map_err(err)?;
        let terms: Vec<SharedSetFn> = phis.iter().map(|p| Arc::new(minfun(g.clone(), p.clone())) as _).collect();
        verify(&weighted_sum(terms, lambdas.clone()).map_err(err)?, &e, n, "sum")?;
        checked += 1;

        let (f, e) = construct_en_markov(&g, &phis[..2], &lambdas[..2], &[1, 0], n, &caps).map_err(err)?;
        verify(f.as_ref(), &e, n, "markov")?;
        checked += 1;

        let c = construct_en_countable(&g, n).map_err(err)?;
        verify(&PhiFamilySum::new(g.clone()), &c.set, n, "countable")?;
        checked += 1;
    }
    Ok(format!("{checked} constructions pass at β = 1/n"))
}

fn c8_generalized() -> Outcome {
    let g = graph();
    let caps = Caps::default();
    let configs = samples(&g, 10_000, 6, 8, 0xacc8);
    let mut found = Vec::new();
    for m in 1..=3usize {
        for k in 1..=m {
            let r = r_family_kmean(k, m).map_err(err)?;
            r.self_test(10_000, 0xacc8 + (k * 10 + m) as u64).map_err(err)?;
            let f = generalized_minfun(r, canonical_phi_u(), g.clone()).map_err(err)?;
            let sw = switch_invariant_check(&f, &configs).map_err(err)?;
            ensure(sw.invariant(), || format!("kmean({k},{m}): {} switch failures", sw.failures.len()))?;
            let sh = set_superharmonic_check(&f, &configs).map_err(err)?;
            ensure(sh.ok(), || format!("kmean({k},{m}): {} superharmonic violations", sh.violations.len()))?;
            let (e, rep) = generalized_en_search(&g, &f, 4, 8, &caps).map_err(err)?;
            ensure(rep.pass, || format!("kmean({k},{m}): search returned a failing set"))?;
            found.push(format!("({k},{m}):|E|={}", e.len()));
        }
    }
    Ok(format!("6 functions × 10^4 samples clean; n = 4 sets {}", found.join(" ")))
}

fn c9_free_group() -> Outcome {
    let ball = z_ball(10);
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc9);
    let mut worst = Value::from_integer(0.into());
    for k in 0..1000 {
        let e = random_zset(&mut rng, &ball, 8);
        let w = witness_word(&e);
        ensure(w.word.len() <= 2 && w.ratio <= ratio(1, 3), || format!("sample {k}: ratio {} via {}", w.ratio, w.word_str))?;
        ensure(witness_unspoiled(&e, &w), || format!("sample {k}: witness spoiled"))?;
        if w.ratio > worst {
            worst = w.ratio;
        }
    }
    let mut rows = Vec::new();
    for l in [10u64, 100, 1000] {
        let row = tail_folner(l);
        ensure(row.ratio <= ratio(2, l as i64), || format!("L = {l}: ratio {}", row.ratio))?;
        rows.push(format!("{}", row.ratio));
    }
    Ok(format!("1000 sets refuted, worst ratio {worst}; Følner {}", rows.join(", ")))
}

fn random_word<R: Rng>(rng: &mut R, max_len: usize) -> FWord {
    let len = rng.random_range(0..=max_len);
    FWord((0..len).map(|_| Gen::ALL[rng.random_range(0..4)]).collect())
}

fn c10_cocycle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacca);
    let mut failures = 0;
    let mut at_breaks = 0;
    for _ in 0..1000 {
        let (g, h) = (word_to_pl(&random_word(&mut rng, 8)), word_to_pl(&random_word(&mut rng, 8)));
        // half the points are breakpoints of h, where the identity has content
        let inner = h.interior_breakpoints();
        let x = if !inner.is_empty() && rng.random_bool(0.5) {
            at_breaks += 1;
            inner[rng.random_range(0..inner.len())].clone()
        } else {
            let exp = rng.random_range(1..=12u32);
            Dyadic::new(2 * rng.random_range(0..(1i64 << (exp - 1))) + 1, exp)
        };
        if !cocycle_identity_check(&g, &h, &x) {
            failures += 1;
        }
    }
    ensure(failures == 0, || format!("{failures} failures"))?;
    Ok(format!("1000 triples, {at_breaks} at breakpoints of h, 0 failures"))
}

fn c11_structure() -> Outcome {
    let g = graph();
    let ball = g.ball(&Dyadic::root(), 10).map_err(err)?;
    let mut skeleton = 0;
    for x in &ball.vertices {
        let a = g.classify(x).map_err(err)?;
        if !a.is_skeleton() || ball.dist_of(x) == Some(10) {
            continue;
        }
        skeleton += 1;
        let nbrs: Vec<_> = g.neighbors(x).iter().map(|(_, y)| g.classify(y)).collect::<Result<_, _>>().map_err(err)?;
        let hairs = nbrs.iter().filter(|b| b.offset() == 1).count();
        let children = nbrs.iter().filter(|b| b.is_skeleton() && b.depth() == a.depth() + 1).count();
        let want = if a.is_root() { 2 } else { 1 };
        ensure(hairs == want && children == 2, || format!("{x} = {a}: {hairs} hairs, {children} children"))?;
    }
    ensure(skeleton == (1 << 10) - 1, || format!("{skeleton} skeleton vertices"))?;
    for i in 0..=4u32 {
        let vals = golden_path_values(&g, phi_family(i, Orientation::Lr).as_ref(), i).map_err(err)?;
        let (last, rest) = vals.split_last().unwrap();
        ensure(rest.iter().all(|v| *v == pow2(-(i as i64))) && *last == pow2(-(i as i64) - 1), || {
            format!("golden path values for i = {i}: {vals:?}")
        })?;
    }
    Ok(format!("{skeleton} skeleton vertices, golden pattern i ≤ 4"))
}

fn c12_decay() -> Outcome {
    let t = Instant::now();
    let f = minfun(graph(), canonical_phi_u());
    let cfg = WalkConfig { seed: 7, cap: 10_000, trials: 500 };
    let rep = potential_decay_experiment(&f, &cfg, &DECAY_CHECKPOINTS).map_err(err)?;
    ensure(rep.supermartingale_violations == 0, || format!("{} violations", rep.supermartingale_violations))?;
    ensure(rep.decayed == Some(true), || format!("medians {:?}", rep.rows.iter().map(|r| r.quantiles[2]).collect::<Vec<_>>()))?;
    let med: Vec<String> = rep.rows.iter().map(|r| format!("{}:{:.3e}", r.step, r.quantiles[2])).collect();
    Ok(format!("medians {}, {} states checked, {:.1?}", med.join(" "), rep.states_checked, t.elapsed()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("green identity f - Pf = delta_p", c1_delta),
        ("green function value", c2_green),
        ("return probability", c3_return),
        ("min-function T-operator", c4_t_operator),
        ("explicit E_n exactness", c5_explicit),
        ("small-set refutation", c6_refute),
        ("constructor soundness", c7_constructors),
        ("generalized min-functions", c8_generalized),
        ("free-group counterexample", c9_free_group),
        ("cocycle identity", c10_cocycle),
        ("structural fidelity", c11_structure),
        ("potential decay", c12_decay),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match out {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{:.1?}]", k + 1, t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{:.1?}]", k + 1, t.elapsed());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
