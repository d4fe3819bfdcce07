//! Superharmonic set functions: min-functions, weighted and countable sums,
//! Markov images, and generalized min-functions built from a symmetric
//! concave r.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::address::{Orientation, StructuralAddress};
use crate::config::Config;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::harmonic::{eval_at, markov_apply_x, SharedFn};
use crate::lamplighter::{apply_letter, markov_iterate, Caps, Letter, SetFn, SharedSetFn};
use crate::schreier::SchreierGraph;
use crate::value::{int, pow2, ratio, Value};
use crate::word::Gen;

/// `f(E) = min_{x∈E} φ(x)`, `f(∅) = φ(p)`.
pub struct MinFn {
    pub phi: SharedFn,
    pub graph: Arc<SchreierGraph>,
    /// Set when a probe found φ above φ(p) somewhere.
    pub warning: Option<String>,
}

pub const MAX_PROBE_RADIUS: u32 = 4;

pub fn minfun(graph: Arc<SchreierGraph>, phi: SharedFn) -> MinFn {
    let warning = probe_max_at_root(&graph, phi.as_ref()).err();
    MinFn { phi, graph, warning }
}

fn probe_max_at_root(graph: &SchreierGraph, phi: &dyn crate::harmonic::VertexFn) -> std::result::Result<(), String> {
    let top = phi.value(&StructuralAddress::root());
    let ball = graph.ball(&Dyadic::root(), MAX_PROBE_RADIUS).map_err(|e| e.to_string())?;
    for x in &ball.vertices {
        let v = eval_at(graph, phi, x).map_err(|e| e.to_string())?;
        if v > top {
            return Err(format!("{} exceeds φ(p) at {x}", phi.label()));
        }
    }
    Ok(())
}

impl SetFn for MinFn {
    fn eval(&self, e: &Config) -> Result<Value> {
        let mut best: Option<Value> = None;
        for x in e {
            let v = self.phi.value(&self.graph.classify(x)?);
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        }
        Ok(best.unwrap_or_else(|| self.phi.value(&StructuralAddress::root())))
    }

    fn eval_addresses(&self, pts: &[StructuralAddress]) -> Option<Value> {
        Some(
            pts.iter()
                .map(|a| self.phi.value(a))
                .min()
                .unwrap_or_else(|| self.phi.value(&StructuralAddress::root())),
        )
    }

    fn label(&self) -> String {
        format!("minfun:{}", self.phi.label())
    }

    fn claims_switch_invariant(&self) -> bool {
        self.warning.is_none()
    }

    fn min_level_phi(&self) -> Option<SharedFn> {
        self.phi.log2_level(0, None).map(|_| self.phi.clone())
    }
}

/// `α·(average over a, b, a⁻¹, b⁻¹ of F(gE)) + (1−α)·F(E Δ {p})`.
pub fn t_operator(f: &dyn SetFn, e: &Config, alpha: &Value) -> Result<Value> {
    if !alpha.is_positive() || *alpha >= Value::one() {
        return Err(Error::PreconditionFailed(format!("alpha {alpha} not in (0,1)")));
    }
    let mut t1 = Value::zero();
    for g in Gen::ALL {
        t1 += f.eval(&e.apply_gen(g))?;
    }
    t1 /= int(4);
    let t2 = f.eval(&apply_letter(e, Letter::Switch))?;
    Ok(alpha * t1 + (Value::one() - alpha) * t2)
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferReport {
    pub q: Dyadic,
    #[serde(with = "crate::value::as_str")]
    pub phi_q: Value,
    #[serde(with = "crate::value::as_str")]
    pub p_phi_q: Value,
    /// `F({q}) − PF({q})`, negative at a violation.
    #[serde(with = "crate::value::as_str")]
    pub margin: Value,
    /// `(4φ(q) − Σ φ(r_i)) / 5`, the same quantity from the vertex side.
    #[serde(with = "crate::value::as_str")]
    pub vertex_side: Value,
}

impl TransferReport {
    pub fn violated(&self) -> bool {
        self.margin.is_negative()
    }
}

/// A vertex violation `φ(q) < Pφ(q)` becomes a set violation of minfun(φ) at `{q}`.
pub fn non_superharmonic_transfer(graph: &Arc<SchreierGraph>, phi: SharedFn, q: &Dyadic) -> Result<TransferReport> {
    let phi_q = eval_at(graph, phi.as_ref(), q)?;
    let p_phi_q = markov_apply_x(graph, phi.as_ref(), q)?;
    if phi_q >= p_phi_q {
        return Err(Error::PreconditionFailed(format!("φ is superharmonic at {q}")));
    }
    if *q == Dyadic::root() {
        return Err(Error::PreconditionFailed("q must differ from p".into()));
    }
    probe_max_at_root(graph, phi.as_ref()).map_err(Error::PreconditionFailed)?;
    let f = minfun(graph.clone(), phi);
    let e = Config::singleton(q.clone());
    let margin = f.eval(&e)? - crate::lamplighter::markov_apply_set(&f, &e)?;
    let vertex_side = (int(4) * &phi_q - int(4) * &p_phi_q) / int(5);
    Ok(TransferReport { q: q.clone(), phi_q, p_phi_q, margin, vertex_side })
}

/// `Σ λ_i F_i`.
pub struct WeightedSum {
    pub terms: Vec<(SharedSetFn, Value)>,
}

pub fn weighted_sum(fs: Vec<SharedSetFn>, lambdas: Vec<Value>) -> Result<WeightedSum> {
    if fs.len() != lambdas.len() || fs.is_empty() {
        return Err(Error::PreconditionFailed("weighted_sum needs equal nonempty lists".into()));
    }
    if let Some(l) = lambdas.iter().find(|l| !l.is_positive()) {
        return Err(Error::PreconditionFailed(format!("weight {l} is not positive")));
    }
    Ok(WeightedSum { terms: fs.into_iter().zip(lambdas).collect() })
}

impl SetFn for WeightedSum {
    fn eval(&self, e: &Config) -> Result<Value> {
        let mut s = Value::zero();
        for (f, l) in &self.terms {
            s += f.eval(e)? * l;
        }
        Ok(s)
    }
    fn eval_addresses(&self, pts: &[StructuralAddress]) -> Option<Value> {
        let mut s = Value::zero();
        for (f, l) in &self.terms {
            s += f.eval_addresses(pts)? * l;
        }
        Some(s)
    }
    fn label(&self) -> String {
        let parts: Vec<String> = self.terms.iter().map(|(f, l)| format!("{l}*{}", f.label())).collect();
        format!("wsum({})", parts.join("+"))
    }
    fn claims_switch_invariant(&self) -> bool {
        self.terms.iter().all(|(f, _)| f.claims_switch_invariant())
    }
}

/// `N(ε)` such that the tail beyond term N has total root value below ε.
pub type TailBound = Arc<dyn Fn(&Value) -> u32 + Send + Sync>;

/// Truncation of `Σ_{i≥0} F_i` at `N(ε)`; each dropped `F_i` is at most its root value.
pub struct CountableSum {
    pub label: String,
    pub eps: Value,
    pub terms: Vec<SharedSetFn>,
}

impl CountableSum {
    /// Index of the last kept term.
    pub fn n_terms(&self) -> u32 {
        self.terms.len() as u32 - 1
    }
}

pub fn countable_sum(
    label: &str,
    family: impl Fn(u32) -> SharedSetFn,
    tail: Option<TailBound>,
    eps: Value,
) -> Result<CountableSum> {
    let tail = tail.ok_or(Error::MissingTailBound)?;
    if !eps.is_positive() {
        return Err(Error::PreconditionFailed(format!("eps {eps} must be positive")));
    }
    let n = tail(&eps);
    Ok(CountableSum { label: format!("sum:{label}:eps={eps}"), eps, terms: (0..=n).map(family).collect() })
}

impl SetFn for CountableSum {
    fn eval(&self, e: &Config) -> Result<Value> {
        let mut s = Value::zero();
        for f in &self.terms {
            s += f.eval(e)?;
        }
        Ok(s)
    }
    fn eval_addresses(&self, pts: &[StructuralAddress]) -> Option<Value> {
        let mut s = Value::zero();
        for f in &self.terms {
            s += f.eval_addresses(pts)?;
        }
        Some(s)
    }
    fn label(&self) -> String {
        self.label.clone()
    }
    fn claims_switch_invariant(&self) -> bool {
        self.terms.iter().all(|f| f.claims_switch_invariant())
    }
}

/// Smallest N with `Σ_{i>N} 2^{-i} = 2^{-N} < ε`.
pub fn phi_family_tail() -> TailBound {
    Arc::new(|eps: &Value| {
        let mut n = 0u32;
        while pow2(-(n as i64)) >= *eps {
            n += 1;
        }
        n
    })
}

/// Truncated sum of the minfun(φ_i) over the φ family.
pub fn phi_family_countable(graph: Arc<SchreierGraph>, eps: Value) -> Result<CountableSum> {
    let o = graph.orientation();
    countable_sum(
        "phi_family",
        move |i| Arc::new(minfun(graph.clone(), crate::harmonic::phi_family(i, o))) as SharedSetFn,
        Some(phi_family_tail()),
        eps,
    )
}

/// The full sum `Σ_{i≥0} minfun(φ_i)` in closed form:
/// `2 − Σ_{i : E∩T_i ≠ ∅} (2^{-i} − 2^{-D_i})`, D_i the largest depth of E in T_i.
pub struct PhiFamilySum {
    pub graph: Arc<SchreierGraph>,
    pub orientation: Orientation,
}

impl PhiFamilySum {
    pub fn new(graph: Arc<SchreierGraph>) -> Self {
        let orientation = graph.orientation();
        PhiFamilySum { graph, orientation }
    }

    fn value_of_depths(&self, it: impl Iterator<Item = (u32, Option<u32>)>) -> Value {
        let mut deepest: BTreeMap<u32, u32> = BTreeMap::new();
        for (depth, t) in it {
            if let Some(t) = t {
                let d = deepest.entry(t).or_insert(depth);
                *d = (*d).max(depth);
            }
        }
        let mut s = int(2);
        for (t, d) in deepest {
            s -= pow2(-(t as i64)) - pow2(-(d as i64));
        }
        s
    }
}

impl SetFn for PhiFamilySum {
    fn eval(&self, e: &Config) -> Result<Value> {
        let mut v = Vec::with_capacity(e.len());
        for x in e {
            let a = self.graph.classify(x)?;
            v.push((a.depth(), a.t_index(self.orientation)));
        }
        Ok(self.value_of_depths(v.into_iter()))
    }
    fn eval_addresses(&self, pts: &[StructuralAddress]) -> Option<Value> {
        Some(self.value_of_depths(pts.iter().map(|a| (a.depth(), a.t_index(self.orientation)))))
    }
    fn label(&self) -> String {
        "sum:phi_family".into()
    }
    fn claims_switch_invariant(&self) -> bool {
        true
    }
}

/// `E ↦ P^n F(E)`.
pub struct MarkovImage {
    pub inner: SharedSetFn,
    pub n: usize,
    pub caps: Caps,
}

pub fn markov_image(inner: SharedSetFn, n: usize, caps: Caps) -> Result<MarkovImage> {
    if n > caps.word_len {
        return Err(Error::CapExceeded { what: "Markov power", requested: n, cap: caps.word_len });
    }
    Ok(MarkovImage { inner, n, caps })
}

impl SetFn for MarkovImage {
    fn eval(&self, e: &Config) -> Result<Value> {
        markov_iterate(self.inner.as_ref(), e, self.n, &self.caps)
    }
    fn label(&self) -> String {
        format!("markov:{}:{}", self.n, self.inner.label())
    }
    fn claims_switch_invariant(&self) -> bool {
        self.inner.claims_switch_invariant()
    }
}

pub type RealFn = Arc<dyn Fn(&[Value]) -> Value + Send + Sync>;

/// A function on `(0,1]^m` declared symmetric, concave, non-decreasing and nonnegative.
#[derive(Clone)]
pub struct SymmetricConcaveFn {
    pub arity: usize,
    pub label: String,
    pub f: RealFn,
}

impl SymmetricConcaveFn {
    pub fn eval(&self, x: &[Value]) -> Value {
        debug_assert_eq!(x.len(), self.arity);
        (self.f)(x)
    }

    /// Random probes of symmetry, midpoint concavity, monotonicity and sign,
    /// `probes` of each, from a fixed seed.
    pub fn self_test(&self, probes: usize, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = self.arity;
        let fail = |what: &str, x: &[Value]| {
            let pts: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            Err(Error::PropertySelfTestFailed(format!("{}: {what} at ({})", self.label, pts.join(","))))
        };
        for _ in 0..probes {
            let u = random_point(&mut rng, m);
            let v = random_point(&mut rng, m);
            let fu = self.eval(&u);
            if fu.is_negative() {
                return fail("negative value", &u);
            }
            let mut perm = u.clone();
            perm.shuffle(&mut rng);
            if self.eval(&perm) != fu {
                return fail("not symmetric", &u);
            }
            let mid: Vec<Value> = u.iter().zip(&v).map(|(a, b)| (a + b) / int(2)).collect();
            if self.eval(&mid) * int(2) < &fu + self.eval(&v) {
                return fail("not midpoint concave", &mid);
            }
            let k = rng.random_range(0..m);
            let mut up = u.clone();
            up[k] = (&up[k] + Value::one()) / int(2);
            if self.eval(&up) < fu {
                return fail("not non-decreasing", &u);
            }
        }
        Ok(())
    }
}

/// A random point of `(0,1]^m` with dyadic coordinates `k/2^10`.
fn random_point<R: Rng>(rng: &mut R, m: usize) -> Vec<Value> {
    (0..m).map(|_| ratio(rng.random_range(1..=1024), 1024)).collect()
}

/// Mean of the k smallest of m coordinates.
pub fn r_family_kmean(k: usize, m: usize) -> Result<SymmetricConcaveFn> {
    if k == 0 || k > m {
        return Err(Error::PreconditionFailed(format!("kmean needs 1 <= k <= m, got k={k}, m={m}")));
    }
    Ok(SymmetricConcaveFn {
        arity: m,
        label: format!("kmean:{k}:{m}"),
        f: Arc::new(move |x: &[Value]| {
            let mut v = x.to_vec();
            v.sort();
            v.into_iter().take(k).sum::<Value>() / int(k as i64)
        }),
    })
}

/// `|r(x) − r(y)| ≤ L·max|x_i − y_i|` on random pairs; returns the worst observed ratio.
pub fn lipschitz_probe(r: &SymmetricConcaveFn, probes: usize, seed: u64) -> Value {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = Value::zero();
    for _ in 0..probes {
        let x = random_point(&mut rng, r.arity);
        let y = random_point(&mut rng, r.arity);
        let d = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).max().unwrap_or_default();
        if d.is_zero() {
            continue;
        }
        let q = (r.eval(&x) - r.eval(&y)).abs() / d;
        if q > worst {
            worst = q;
        }
    }
    worst
}

/// `F(E) = φ(p) · r(sorted φ(x)/φ(p) over E, truncated to m, padded with 1)`.
pub struct GeneralizedMinFn {
    pub r: SymmetricConcaveFn,
    pub phi: SharedFn,
    pub graph: Arc<SchreierGraph>,
    /// φ(p), divided out before r and multiplied back after.
    pub factor: Value,
}

pub const SELF_TEST_PROBES: usize = 1000;

pub fn generalized_minfun(r: SymmetricConcaveFn, phi: SharedFn, graph: Arc<SchreierGraph>) -> Result<GeneralizedMinFn> {
    r.self_test(SELF_TEST_PROBES, 0x5eed)?;
    let factor = phi.value(&StructuralAddress::root());
    if !factor.is_positive() {
        return Err(Error::ZeroBase);
    }
    Ok(GeneralizedMinFn { r, phi, graph, factor })
}

impl GeneralizedMinFn {
    fn value_of(&self, mut vals: Vec<Value>) -> Value {
        vals.sort();
        vals.truncate(self.r.arity);
        let mut args: Vec<Value> = vals.into_iter().map(|v| v / &self.factor).collect();
        args.resize(self.r.arity, Value::one());
        self.r.eval(&args) * &self.factor
    }
}

impl SetFn for GeneralizedMinFn {
    fn eval(&self, e: &Config) -> Result<Value> {
        let mut vals = Vec::with_capacity(e.len());
        for x in e {
            vals.push(self.phi.value(&self.graph.classify(x)?));
        }
        Ok(self.value_of(vals))
    }
    fn eval_addresses(&self, pts: &[StructuralAddress]) -> Option<Value> {
        Some(self.value_of(pts.iter().map(|a| self.phi.value(a)).collect()))
    }
    fn label(&self) -> String {
        format!("gmin:{}:{}", self.r.label, self.phi.label())
    }
    fn claims_switch_invariant(&self) -> bool {
        true
    }
}

/// If every `a_i/b_i` lies in `(α, β)` then so does `min a / min b`.
pub fn min_ratio_bracketed(a: &[Value], b: &[Value], alpha: &Value, beta: &Value) -> bool {
    let hyp = a.iter().zip(b).all(|(x, y)| {
        let q = x / y;
        q > *alpha && q < *beta
    });
    if !hyp {
        return true;
    }
    let q = a.iter().min().unwrap() / b.iter().min().unwrap();
    q > *alpha && q < *beta
}

#[derive(Clone, Debug, Serialize)]
pub struct SetSuperharmonicReport {
    pub function: String,
    pub checked: usize,
    /// Configurations with `PF(E) > F(E)`.
    pub violations: Vec<Config>,
}

impl SetSuperharmonicReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `PF(E) ≤ F(E)` on each sample, exactly.
pub fn set_superharmonic_check(f: &dyn SetFn, samples: &[Config]) -> Result<SetSuperharmonicReport> {
    use rayon::prelude::*;
    let bad: Vec<Option<Config>> = samples
        .par_iter()
        .map(|e| Ok((crate::lamplighter::markov_apply_set(f, e)? > f.eval(e)?).then(|| e.clone())))
        .collect::<Result<_>>()?;
    Ok(SetSuperharmonicReport { function: f.label(), checked: samples.len(), violations: bad.into_iter().flatten().collect() })
}
