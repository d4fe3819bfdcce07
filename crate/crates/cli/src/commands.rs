use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thompson_core::approx::{construct_en_countable, golden_witness, strong_verify, weak_verify, BetaSchedule};
use thompson_core::freegroup::{random_zset, tail_folner, witness_unspoiled, witness_word, z_ball};
use thompson_core::harmonic::is_superharmonic_on;
use thompson_core::lamplighter::{random_config, switch_invariant_check, Caps};
use thompson_core::minfn::set_superharmonic_check;
use thompson_core::registry::{set_fn, vertex_fn};
use thompson_core::value::{to_f64, Value};
use thompson_core::walk::{green_mc, pn_series, potential_decay_experiment, return_prob, WalkConfig, DECAY_CHECKPOINTS};
use thompson_core::{Config, Dyadic, Error, Orientation, SchreierGraph};

use crate::sets::{resolve_fn, SetSpec};
use crate::settings::Overrides;
use crate::{Abort, ApproxCmd, Cmd, CxCmd, FnCmd, GraphCmd, Output, WalkCmd};

type Run = Result<Output, Abort>;

pub fn defaults(cmd: Cmd) -> Overrides {
    let mut d = Overrides { orientation: Some("lr".into()), ..Default::default() };
    match cmd {
        Cmd::Graph(_) => d.radius = Some(6),
        Cmd::Fn(_) => {
            d.func = Some("minfun:phi_u".into());
            d.samples = Some(1000);
            d.radius = Some(8);
            d.seed = Some(7);
        }
        Cmd::Approx(c) => {
            d.n = Some(4);
            d.beta = Some("inv_n".into());
            d.word_len = Some(Caps::default().word_len);
            d.orbit_size = Some(Caps::default().orbit_size);
            if matches!(c, ApproxCmd::Refute) {
                d.func = Some("sum:phi_family".into());
            }
        }
        Cmd::Walk(c) => {
            d.seed = Some(7);
            d.x = Some("p".into());
            match c {
                WalkCmd::Green => {
                    d.y = Some("p".into());
                    d.cap = Some(10_000);
                    d.trials = Some(100_000);
                    d.n = Some(30);
                }
                WalkCmd::Return => d.n = Some(30),
                WalkCmd::Decay => {
                    d.func = Some("minfun:phi_u".into());
                    d.cap = Some(10_000);
                    d.trials = Some(500);
                }
            }
        }
        Cmd::Cx(_) => {
            d.samples = Some(1000);
            d.radius = Some(10);
            d.seed = Some(7);
            d.n = Some(8);
        }
    }
    d
}

fn need<T: Clone>(v: &Option<T>, flag: &str) -> Result<T, Abort> {
    v.clone().ok_or_else(|| Abort::Usage(format!("--{flag} is required")))
}

fn graph(s: &Overrides) -> Result<Arc<SchreierGraph>, Abort> {
    let o: Orientation = need(&s.orientation, "orientation")?.parse()?;
    Ok(Arc::new(SchreierGraph::with_orientation(o)))
}

fn caps(s: &Overrides) -> Caps {
    let d = Caps::default();
    Caps { word_len: s.word_len.unwrap_or(d.word_len), orbit_size: s.orbit_size.unwrap_or(d.orbit_size) }
}

fn vertex(s: &Option<String>, flag: &str) -> Result<Dyadic, Abort> {
    let x: Dyadic = need(s, flag)?.parse()?;
    if !x.is_vertex() {
        return Err(Abort::Usage(format!("--{flag} {x} is not a dyadic in (0,1)")));
    }
    Ok(x)
}

fn to_json<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("reports are plain data")
}

fn samples(g: &SchreierGraph, count: usize, radius: u32, seed: u64) -> Result<Vec<Config>, Abort> {
    let ball = g.ball(&Dyadic::root(), radius)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let k = rng.random_range(0..=6);
            random_config(&mut rng, &ball, k)
        })
        .collect())
}

pub fn run(cmd: Cmd, s: &Overrides) -> Run {
    match cmd {
        Cmd::Graph(GraphCmd::Explore) => graph_explore(s),
        Cmd::Fn(FnCmd::Check) => fn_check(s),
        Cmd::Approx(c) => approx(c, s),
        Cmd::Walk(WalkCmd::Green) => walk_green(s),
        Cmd::Walk(WalkCmd::Return) => walk_return(s),
        Cmd::Walk(WalkCmd::Decay) => walk_decay(s),
        Cmd::Cx(CxCmd::Scan) => cx_scan(s),
    }
}

fn graph_explore(s: &Overrides) -> Run {
    let g = graph(s)?;
    let radius = need(&s.radius, "radius")?;
    let ball = g.ball(&Dyadic::root(), radius)?;
    let mut per: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
    for (x, &d) in ball.vertices.iter().zip(&ball.dist) {
        let e = per.entry(d).or_default();
        if g.classify(x)?.is_skeleton() {
            e.0 += 1;
        } else {
            e.1 += 1;
        }
    }
    let mut csv = String::from("dist,skeleton,hair\n");
    for (d, (sk, h)) in &per {
        let _ = writeln!(csv, "{d},{sk},{h}");
    }
    let skeleton: usize = per.values().map(|v| v.0).sum();
    let report = json!({
        "orientation": g.orientation().to_string(),
        "radius": radius,
        "vertices": ball.len(),
        "skeleton": skeleton,
        "hair": ball.len() - skeleton,
        "ball": ball.to_json(),
    });
    Ok(Output { report, series: Some(csv), pass: true })
}

fn fn_check(s: &Overrides) -> Run {
    let g = graph(s)?;
    let name = need(&s.func, "fn")?;
    let radius = need(&s.radius, "radius")?;
    match set_fn(&name, &g, &caps(s)) {
        Ok(f) => {
            let configs = samples(&g, need(&s.samples, "samples")?, radius, need(&s.seed, "seed")?)?;
            let sw = switch_invariant_check(f.as_ref(), &configs)?;
            let sh = set_superharmonic_check(f.as_ref(), &configs)?;
            let pass = sw.invariant() && sh.ok();
            let report = json!({
                "function": name,
                "kind": "set",
                "samples": configs.len(),
                "switch_invariant": sw.invariant(),
                "switch_failures": to_json(&sw.failures),
                "superharmonic": sh.ok(),
                "superharmonic_violations": to_json(&sh.violations),
                "pass": pass,
            });
            Ok(Output { report, series: None, pass })
        }
        Err(Error::Parse(set_err)) => {
            let phi = vertex_fn(&name, &g).map_err(|_| Abort::Usage(set_err))?;
            let ball = g.ball(&Dyadic::root(), radius)?;
            let rep = is_superharmonic_on(&g, phi.as_ref(), &ball, &Value::default())?;
            let report = json!({
                "function": name,
                "kind": "vertex",
                "radius": radius,
                "checked": rep.checked,
                "margin_at_p": rep.margin_at(&Dyadic::root()).map(|v| v.to_string()),
                "violations": rep.violations.iter().map(|&i| rep.rows[i].vertex.to_string()).collect::<Vec<_>>(),
                "pass": rep.ok(),
            });
            Ok(Output { report, series: Some(rep.to_csv()), pass: rep.ok() })
        }
        Err(e) => Err(e.into()),
    }
}

fn approx(cmd: ApproxCmd, s: &Overrides) -> Run {
    let g = graph(s)?;
    let caps = caps(s);
    let spec = SetSpec::parse(&need(&s.set, "set")?)?;
    let n = need(&s.n, "n")?;
    let beta: BetaSchedule = need(&s.beta, "beta")?.parse()?;
    if matches!(cmd, ApproxCmd::Construct) && !spec.is_constructive() {
        return Err(Abort::Usage("construct needs explicit:, single:, sum: or countable:".into()));
    }
    spec.check(&g)?;
    let (fn_name, f) = resolve_fn(s.func.as_deref(), &spec, &g, &caps)?;
    let e = spec.build(&g)?;

    if let ApproxCmd::Refute = cmd {
        let w = golden_witness(&g, f.as_ref(), &e, n)?;
        let refuted = w.as_ref().is_some_and(|w| w.deviation >= beta.at(n as usize));
        let report = json!({
            "function": fn_name,
            "set": e,
            "size": e.len(),
            "n": n,
            "beta": beta.at(n as usize).to_string(),
            "refuted": refuted,
            "witness": w.as_ref().map(to_json),
        });
        return Ok(Output { report, series: None, pass: refuted });
    }

    let strong = strong_verify(f.as_ref(), &e, n as usize, beta, &caps)?;
    let weak = weak_verify(f.as_ref(), &e, &strong.beta)?;
    let mut report = json!({
        "function": fn_name,
        "set": e,
        "size": e.len(),
        "strong": to_json(&strong),
        "weak": to_json(&weak),
        "pass": strong.pass,
    });
    if let (ApproxCmd::Construct, SetSpec::Countable(k)) = (cmd, &spec) {
        report["construction"] = to_json(&construct_en_countable(&g, *k)?);
    }
    Ok(Output { report, series: None, pass: strong.pass })
}

fn walk_green(s: &Overrides) -> Run {
    let g = graph(s)?;
    let (x, y) = (vertex(&s.x, "x")?, vertex(&s.y, "y")?);
    let n = need(&s.n, "n")? as usize;
    let cfg = WalkConfig { seed: need(&s.seed, "seed")?, cap: need(&s.cap, "cap")?, trials: need(&s.trials, "trials")? };
    let series = pn_series(&g, &x, &y, n)?;
    let mut csv = String::from("n,p_n,partial,p_n_exact,partial_exact\n");
    let mut acc = Value::default();
    for (k, p) in series.iter().enumerate() {
        acc += p;
        let _ = writeln!(csv, "{k},{},{},{p},{acc}", to_f64(p), to_f64(&acc));
    }
    let mc = green_mc(&g, &x, &y, &cfg)?;
    let report = json!({
        "x": x,
        "y": y,
        "exact_terms": n,
        "green_partial": acc.to_string(),
        "green_partial_f64": to_f64(&acc),
        "mc": to_json(&mc),
    });
    Ok(Output { report, series: Some(csv), pass: true })
}

fn walk_return(s: &Overrides) -> Run {
    let g = graph(s)?;
    let x = vertex(&s.x, "x")?;
    let n = need(&s.n, "n")? as usize;
    let rep = return_prob(&g, &x, n)?;
    let mut csv = String::from("n,p_n,f_n,partial,partial_exact\n");
    for k in 0..=n {
        let _ = writeln!(csv, "{k},{},{},{},{}", to_f64(&rep.p[k]), to_f64(&rep.first_return[k]), to_f64(&rep.partial[k]), rep.partial[k]);
    }
    let monotone = rep.partial.windows(2).all(|w| w[0] <= w[1]);
    let last = &rep.partial[n];
    let report = json!({
        "x": x,
        "n": n,
        "return_partial": last.to_string(),
        "return_partial_f64": to_f64(last),
        "monotone": monotone,
        "series": to_json(&rep),
    });
    Ok(Output { report, series: Some(csv), pass: monotone })
}

fn walk_decay(s: &Overrides) -> Run {
    let g = graph(s)?;
    let f = set_fn(&need(&s.func, "fn")?, &g, &caps(s))?;
    let cfg = WalkConfig { seed: need(&s.seed, "seed")?, cap: need(&s.cap, "cap")?, trials: need(&s.trials, "trials")? };
    // the horizon is always a checkpoint, so short runs still compare two medians
    let mut cps: Vec<usize> = DECAY_CHECKPOINTS.into_iter().filter(|&c| c < cfg.cap).collect();
    cps.push(cfg.cap);
    let rep = potential_decay_experiment(f.as_ref(), &cfg, &cps)?;
    Ok(Output { series: Some(rep.to_csv()), pass: rep.ok(), report: to_json(&rep) })
}

fn cx_scan(s: &Overrides) -> Run {
    let count = need(&s.samples, "samples")?;
    let ball = z_ball(need(&s.radius, "radius")? as u64);
    let max_size = need(&s.n, "n")? as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(need(&s.seed, "seed")?);
    let third = Value::new(1.into(), 3.into());
    let mut csv = String::from("sample,size,case,word,ratio\n");
    let mut refuted = 0;
    let mut failures = Vec::new();
    let mut worst = Value::default();
    for k in 0..count {
        let e = random_zset(&mut rng, &ball, max_size);
        let w = witness_word(&e);
        let ok = w.word.len() <= 2 && w.ratio <= third && witness_unspoiled(&e, &w);
        if ok {
            refuted += 1;
        } else {
            failures.push(json!({"sample": k, "set": e.iter().map(|v| v.to_string()).collect::<Vec<_>>()}));
        }
        if w.ratio > worst {
            worst = w.ratio.clone();
        }
        let _ = writeln!(csv, "{k},{},{},{},{}", e.len(), w.case, w.word_str, w.ratio);
    }
    let folner: Vec<_> = [10, 100, 1000].map(tail_folner).iter().map(to_json).collect();
    let report = json!({
        "convention": "right notation: the leftmost letter acts first",
        "samples": count,
        "refuted": refuted,
        "worst_ratio": worst.to_string(),
        "failures": failures,
        "folner": folner,
    });
    Ok(Output { report, series: Some(csv), pass: refuted == count })
}
