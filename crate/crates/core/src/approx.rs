//! Strong and weak approximation verifiers, the E_n constructors, and the
//! golden-path refuter.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::Serialize;

use crate::address::{SkeletonPath, StructuralAddress};
use crate::config::Config;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::harmonic::{check_level_preconditions, level_min_unchecked, shift_to_zero_inf, SharedFn, LEVEL_PROBE_RADIUS};
use crate::lamplighter::{apply_word, markov_apply_set, orbit_enumerate, Caps, LampWord, Letter, SetFn, SharedSetFn};
use crate::minfn::{markov_image, minfun, weighted_sum, GeneralizedMinFn};
use crate::schreier::SchreierGraph;
use crate::value::{int, pow2, ratio, Value};
use crate::word::{FWord, Gen};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaSchedule {
    /// 1/n
    #[default]
    InvN,
    /// 1/(2n)
    Inv2N,
    /// 1/2^n
    InvPow2,
}

impl BetaSchedule {
    pub fn at(self, n: usize) -> Value {
        let n = n.max(1) as i64;
        match self {
            BetaSchedule::InvN => ratio(1, n),
            BetaSchedule::Inv2N => ratio(1, 2 * n),
            BetaSchedule::InvPow2 => pow2(-n),
        }
    }
}

impl fmt::Display for BetaSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BetaSchedule::InvN => "inv_n",
            BetaSchedule::Inv2N => "inv_2n",
            BetaSchedule::InvPow2 => "inv_pow2",
        })
    }
}

impl FromStr for BetaSchedule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inv_n" => Ok(BetaSchedule::InvN),
            "inv_2n" => Ok(BetaSchedule::Inv2N),
            "inv_pow2" => Ok(BetaSchedule::InvPow2),
            _ => Err(Error::Parse(format!("unknown beta schedule {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub function: String,
    pub set: Config,
    pub n: usize,
    #[serde(with = "crate::value::as_str")]
    pub beta: Value,
    pub pass: bool,
    #[serde(with = "crate::value::as_str")]
    pub base_value: Value,
    /// max over the orbit of `|F(wE)/F(E) − 1|`
    #[serde(with = "crate::value::as_str")]
    pub worst_deviation: Value,
    pub worst_word: LampWord,
    pub worst_config: Config,
    /// Distinct configurations examined after dedup.
    pub examined: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Every configuration reachable by a word of length ≤ n must satisfy
/// `|F(wE)/F(E) − 1| < β(n)`.
pub fn strong_verify(f: &dyn SetFn, e: &Config, n: usize, beta: BetaSchedule, caps: &Caps) -> Result<VerifyReport> {
    let start = Instant::now();
    let base = f.eval(e)?;
    if !base.is_positive() {
        return Err(Error::ZeroBase);
    }
    let orbit = orbit_enumerate(e, n, caps)?;
    let devs = orbit
        .configs
        .par_iter()
        .map(|c| Ok(((f.eval(c)? / &base) - Value::one()).abs()))
        .collect::<Result<Vec<Value>>>()?;
    // first index attaining the maximum, so ties resolve to the shortest word
    let mut worst = 0;
    for (i, d) in devs.iter().enumerate() {
        if *d > devs[worst] {
            worst = i;
        }
    }
    let beta_n = beta.at(n);
    Ok(VerifyReport {
        function: f.label(),
        set: e.clone(),
        n,
        pass: devs[worst] < beta_n,
        beta: beta_n,
        base_value: base,
        worst_deviation: devs[worst].clone(),
        worst_word: orbit.witness[worst].clone(),
        worst_config: orbit.configs[worst].clone(),
        examined: orbit.len(),
        elapsed: start.elapsed(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakReport {
    pub function: String,
    pub set: Config,
    #[serde(with = "crate::value::as_str")]
    pub ratio: Value,
    #[serde(with = "crate::value::as_str")]
    pub deviation: Value,
    #[serde(with = "crate::value::as_str")]
    pub tol: Value,
    pub pass: bool,
}

/// `|PF(E)/F(E) − 1| < tol`.
pub fn weak_verify(f: &dyn SetFn, e: &Config, tol: &Value) -> Result<WeakReport> {
    let base = f.eval(e)?;
    if !base.is_positive() {
        return Err(Error::ZeroBase);
    }
    let ratio = markov_apply_set(f, e)? / base;
    let deviation = (&ratio - Value::one()).abs();
    Ok(WeakReport { function: f.label(), set: e.clone(), pass: deviation < *tol, ratio, deviation, tol: tol.clone() })
}

/// Deepest skeleton level scanned by the constructors.
pub const LEVEL_SEARCH_CAP: u32 = 256;

/// Smallest N ≥ `from` whose level-N minimum is below `threshold`, with its witness.
fn first_level_below(phi: &SharedFn, from: u32, threshold: &Value) -> Result<(u32, SkeletonPath)> {
    for depth in from..=LEVEL_SEARCH_CAP {
        let (v, path) = crate::harmonic::level_minimum(phi.as_ref(), depth)?;
        if v < *threshold {
            return Ok((depth, path));
        }
    }
    Err(Error::SearchExhausted {
        frontier: LEVEL_SEARCH_CAP,
        reason: format!("no level of {} below {threshold}", phi.label()),
    })
}

fn is_constant_near_root(graph: &SchreierGraph, phi: &SharedFn) -> Result<bool> {
    let top = phi.value(&StructuralAddress::root());
    for x in &graph.ball(&Dyadic::root(), 3)?.vertices {
        if phi.value(&graph.classify(x)?) != top {
            return Ok(false);
        }
    }
    Ok(true)
}

fn hair_point_of(graph: &SchreierGraph, base: &SkeletonPath, offset: u32) -> Dyadic {
    graph.realize(&graph.hair_address(base, offset))
}

/// Singleton `{q_N^{(+n²)}}` with `φ(q_N) < r_n/(4n²)` after shifting φ to infimum 0.
pub fn construct_en_single(graph: &SchreierGraph, phi: SharedFn, n: u32) -> Result<Config> {
    if n < 4 {
        return Err(Error::PreconditionFailed(format!("n = {n} < 4")));
    }
    if is_constant_near_root(graph, &phi)? {
        return Ok(Config::singleton(Dyadic::root()));
    }
    let phi = shift_to_zero_inf(phi);
    check_level_preconditions(graph, phi.as_ref(), LEVEL_PROBE_RADIUS)?;
    let r_n = level_min_unchecked(phi.as_ref(), n)?.value;
    let threshold = r_n / int(4 * (n as i64).pow(2));
    let (_, q) = first_level_below(&phi, n, &threshold)?;
    Ok(Config::singleton(hair_point_of(graph, &q, n * n)))
}

/// `{x_1^{(+n²)}, …, x_k^{(+n²)}}` with `φ_i(x_i) < ε/(4n²)`, ε the smallest
/// level minimum of the φ_i over levels ≤ n. Witnesses already taken by an
/// earlier index are skipped so that `|E| = k`.
pub fn construct_en_sum(graph: &SchreierGraph, phis: &[SharedFn], lambdas: &[Value], n: u32) -> Result<Config> {
    if phis.is_empty() || phis.len() != lambdas.len() {
        return Err(Error::PreconditionFailed("need equal nonempty lists of functions and weights".into()));
    }
    if n < 4 {
        return Err(Error::PreconditionFailed(format!("n = {n} < 4")));
    }
    let phis: Vec<SharedFn> = phis.iter().cloned().map(shift_to_zero_inf).collect();
    let mut eps: Option<Value> = None;
    for phi in &phis {
        check_level_preconditions(graph, phi.as_ref(), LEVEL_PROBE_RADIUS)?;
        let r = level_min_unchecked(phi.as_ref(), n)?.value;
        if eps.as_ref().is_none_or(|e| r < *e) {
            eps = Some(r);
        }
    }
    let eps = eps.expect("nonempty");
    if !eps.is_positive() {
        return Err(Error::PreconditionFailed("a function vanishes within distance n of p".into()));
    }
    let threshold = eps / int(4 * (n as i64).pow(2));
    let mut used: Vec<SkeletonPath> = Vec::new();
    for phi in &phis {
        let mut from = n;
        loop {
            let (depth, x) = first_level_below(phi, from, &threshold)?;
            if !used.contains(&x) {
                used.push(x);
                break;
            }
            from = depth + 1;
        }
    }
    Ok(Config::new(used.iter().map(|x| hair_point_of(graph, x, n * n))))
}

/// `Σ λ_i P^{n_i} minfun(φ_i)` together with an E_n built at the inflated length `n + max n_i`.
pub fn construct_en_markov(
    graph: &Arc<SchreierGraph>,
    phis: &[SharedFn],
    lambdas: &[Value],
    powers: &[usize],
    n: u32,
    caps: &Caps,
) -> Result<(SharedSetFn, Config)> {
    if powers.len() != phis.len() {
        return Err(Error::PreconditionFailed("one Markov power per function".into()));
    }
    let m = n as usize + powers.iter().copied().max().unwrap_or(0);
    if m > caps.word_len {
        return Err(Error::CapExceeded { what: "inflated word length", requested: m, cap: caps.word_len });
    }
    let e = construct_en_sum(graph, phis, lambdas, m as u32)?;
    let mut terms: Vec<SharedSetFn> = Vec::with_capacity(phis.len());
    for (phi, &k) in phis.iter().zip(powers) {
        let f: SharedSetFn = Arc::new(minfun(graph.clone(), phi.clone()));
        terms.push(if k == 0 { f } else { Arc::new(markov_image(f, k, *caps)?) });
    }
    let f: SharedSetFn = Arc::new(weighted_sum(terms, lambdas.to_vec())?);
    Ok((f, e))
}

#[derive(Clone, Debug, Serialize)]
pub struct CountableConstruction {
    pub set: Config,
    /// Index of the last family member with its own point.
    pub last_index: u32,
    #[serde(with = "crate::value::as_str")]
    pub delta: Value,
    pub hair_offset: u32,
}

/// The countable-sum recipe for the φ family: `z_i` with `φ_i(z_i) < ε_i/(16n²)`
/// (ε_i = min of φ_i within distance n), `δ = φ_0(z_0)`, N with
/// `Σ_{i>N} φ_i(p) < δ/(3n)`, and one point `z_i^{(+4n²)}` for each i ≤ N.
pub fn construct_en_countable(graph: &SchreierGraph, n: u32) -> Result<CountableConstruction> {
    if n < 4 {
        return Err(Error::PreconditionFailed(format!("n = {n} < 4")));
    }
    let o = graph.orientation();
    let member = |i: u32| crate::harmonic::phi_family(i, o);
    let scale = int(16 * (n as i64).pow(2));
    let mut z = Vec::new();
    let pick = |i: u32| -> Result<(Value, SkeletonPath)> {
        let phi = member(i);
        let eps_i = level_min_unchecked(phi.as_ref(), n)?.value;
        let (_, x) = first_level_below(&phi, n, &(eps_i / &scale))?;
        Ok((phi.value(&StructuralAddress::Skeleton(x.clone())), x))
    };
    let (delta, z0) = pick(0)?;
    z.push(z0);
    let bound = &delta / int(3 * n as i64);
    // tail Σ_{i>N} 2^{-i} = 2^{-N}
    let mut last = 0u32;
    while pow2(-(last as i64)) >= bound {
        last += 1;
    }
    for i in 1..=last {
        z.push(pick(i)?.1);
    }
    let offset = 4 * n * n;
    Ok(CountableConstruction {
        set: Config::new(z.iter().map(|x| hair_point_of(graph, x, offset))),
        last_index: last,
        delta,
        hair_offset: offset,
    })
}

/// `{a^{-n} b^n a^j · p : 0 ≤ j < n}`, with the structural postcondition that
/// the points sit at hair offset n, one in each of T_0, …, T_{n−1}.
pub fn explicit_en_hairs(graph: &SchreierGraph, n: u32) -> Result<Config> {
    if n == 0 {
        return Err(Error::PreconditionFailed("n must be positive".into()));
    }
    let o = graph.orientation();
    let mut pts = Vec::with_capacity(n as usize);
    let mut seen = vec![false; n as usize];
    for j in 0..n {
        let mut w = vec![Gen::AInv; n as usize];
        w.extend(std::iter::repeat_n(Gen::B, n as usize));
        w.extend(std::iter::repeat_n(Gen::A, j as usize));
        let x = FWord(w).apply(&Dyadic::root());
        let addr = graph.classify(&x)?;
        let t = addr.t_index(o);
        if addr.offset() != n || addr.is_skeleton() {
            return Err(Error::StructuralAssertFailed(format!("{x} = {addr} is not at hair offset {n}")));
        }
        match t {
            Some(t) if t < n && !seen[t as usize] => seen[t as usize] = true,
            _ => {
                return Err(Error::StructuralAssertFailed(format!(
                    "{x} = {addr} has T-index {t:?}; orientation {o} does not place the points one per T_0..T_{}",
                    n - 1
                )))
            }
        }
        pts.push(x);
    }
    Ok(Config::new(pts))
}

#[derive(Clone, Debug, Serialize)]
pub struct GoldenWitness {
    pub word: LampWord,
    /// The empty subtree T_i that the word reaches.
    pub i: u32,
    #[serde(with = "crate::value::as_str")]
    pub deviation: Value,
}

/// Refutes E at length n for the φ-family sum: find the first empty T_i with
/// i ≤ n−2 and push a point onto its root b a^i·p.
pub fn golden_witness(graph: &SchreierGraph, f: &dyn SetFn, e: &Config, n: u32) -> Result<Option<GoldenWitness>> {
    if n < 2 {
        return Err(Error::PreconditionFailed("n must be at least 2".into()));
    }
    let o = graph.orientation();
    let mut met = vec![false; n as usize - 1];
    for x in e {
        if let Some(t) = graph.classify(x)?.t_index(o) {
            if t <= n - 2 {
                met[t as usize] = true;
            }
        }
    }
    let Some(i) = met.iter().position(|m| !m).map(|i| i as u32) else {
        return Ok(None);
    };
    let golden = graph.golden_path(i);
    let (l, r) = (Letter::Gen(o.left_gen()), Letter::Gen(o.right_gen()));
    // largest j ≤ i with a^j·p ∈ E; ties toward the nearest golden point
    let j = (0..=i).rev().find(|&j| e.contains(&golden[j as usize]));
    let mut word = vec![r];
    match j {
        Some(j) => word.extend(std::iter::repeat_n(l, (i - j) as usize)),
        None => {
            word.extend(std::iter::repeat_n(l, i as usize));
            word.push(Letter::Switch);
        }
    }
    let word = LampWord(word);
    let base = f.eval(e)?;
    if !base.is_positive() {
        return Err(Error::ZeroBase);
    }
    let deviation = (f.eval(&apply_word(e, &word))? / base - Value::one()).abs();
    Ok(Some(GoldenWitness { word, i, deviation }))
}

/// Verification-driven search for generalized min-functions: candidate c puts
/// the m left-first vertices of level n+1+c on their hairs at offset n², and
/// the first candidate passing `strong_verify` at β = 1/n is returned.
pub fn generalized_en_search(
    graph: &SchreierGraph,
    f: &GeneralizedMinFn,
    n: u32,
    budget: usize,
    caps: &Caps,
) -> Result<(Config, VerifyReport)> {
    let m = f.r.arity;
    for c in 0..budget {
        let depth = n + 1 + c as u32;
        if depth > LEVEL_SEARCH_CAP {
            break;
        }
        let bases = lowest_vertices(f.phi.as_ref(), graph.orientation(), depth, m)?;
        let e = Config::new(bases.iter().map(|b| hair_point_of(graph, b, n * n)));
        let rep = strong_verify(f, &e, n as usize, BetaSchedule::InvN, caps)?;
        if rep.pass {
            return Ok((e, rep));
        }
    }
    Err(Error::NotFound(format!("no passing configuration for {} at n = {n} within budget {budget}", SetFn::label(f))))
}

/// The `count` vertices of a level with smallest φ, ties left-first.
fn lowest_vertices(phi: &dyn crate::harmonic::VertexFn, o: crate::address::Orientation, depth: u32, count: usize) -> Result<Vec<SkeletonPath>> {
    if depth <= crate::harmonic::LEVEL_ENUM_CAP {
        let mut all: Vec<(Value, usize, SkeletonPath)> = crate::harmonic::level_paths(depth, o)
            .enumerate()
            .map(|(k, p)| (phi.value(&StructuralAddress::Skeleton(p.clone())), k, p))
            .collect();
        all.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        return Ok(all.into_iter().take(count).map(|t| t.2).collect());
    }
    // deep levels: the left-first vertex and its right-turn variants near the bottom
    let (_, best) = crate::harmonic::level_minimum(phi, depth)?;
    let mut out = vec![best.clone()];
    let mut k = 0;
    while out.len() < count && k < depth {
        let mut v = best.clone();
        let bits: Vec<bool> = v.bits().collect();
        v = SkeletonPath::from_bits(bits.iter().enumerate().map(|(i, &b)| if i as u32 == depth - 1 - k { !b } else { b }));
        out.push(v);
        k += 1;
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct HairEstimate {
    pub n: u32,
    #[serde(with = "crate::value::as_str")]
    pub lhs: Value,
    #[serde(with = "crate::value::as_str")]
    pub rhs: Value,
    pub holds: bool,
}

/// `a_{n²} − a_{n²−n} ≤ (a_{n²} − a_0)/n` for the hair sequence `a_m = φ(z^{(+m)})`.
pub fn hair_estimate_check(graph: &SchreierGraph, phi: &dyn crate::harmonic::VertexFn, z: &Dyadic, n: u32) -> Result<HairEstimate> {
    let StructuralAddress::Skeleton(base) = graph.classify(z)? else {
        return Err(Error::PreconditionFailed(format!("{z} is not a skeleton vertex")));
    };
    let a = |m: u32| phi.value(&graph.hair_address(&base, m));
    let lhs = a(n * n) - a(n * n - n);
    let rhs = (a(n * n) - a(0)) / int(n as i64);
    Ok(HairEstimate { n, holds: lhs <= rhs, lhs, rhs })
}

/// The skeleton base of a hair point of a constructed E_n.
pub fn hair_base(graph: &SchreierGraph, x: &Dyadic) -> Result<Dyadic> {
    let addr = graph.classify(x)?;
    Ok(graph.realize(&StructuralAddress::Skeleton(addr.base().clone())))
}
