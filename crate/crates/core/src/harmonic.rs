//! Functions on vertices of X, the simple-walk Markov operator, and the
//! structural checks on hairs and skeleton levels.

use std::fmt::Write as _;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::address::{Orientation, SkeletonPath, StructuralAddress};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::schreier::{Ball, SchreierGraph};
use crate::value::{int, pow2, Value};
use crate::word::Gen;

/// A nonnegative function on vertices, evaluated on structural addresses.
pub trait VertexFn: Send + Sync {
    fn value(&self, x: &StructuralAddress) -> Value;

    fn label(&self) -> String;

    /// `log2 φ(x)` when φ only depends on the skeleton depth and T-index of x
    /// and takes power-of-two values. Enables level scans without enumeration.
    fn log2_level(&self, _depth: u32, _t_index: Option<u32>) -> Option<i64> {
        None
    }

    fn orientation(&self) -> Orientation {
        Orientation::Lr
    }

    fn infimum(&self) -> Option<Value> {
        None
    }
}

pub type SharedFn = Arc<dyn VertexFn>;

/// Evaluate at a dyadic vertex.
pub fn eval_at(graph: &SchreierGraph, phi: &dyn VertexFn, x: &Dyadic) -> Result<Value> {
    Ok(phi.value(&graph.classify(x)?))
}

#[derive(Clone, Debug)]
pub struct Constant(pub Value);

impl VertexFn for Constant {
    fn value(&self, _: &StructuralAddress) -> Value {
        self.0.clone()
    }
    fn label(&self) -> String {
        format!("const:{}", self.0)
    }
    fn infimum(&self) -> Option<Value> {
        Some(self.0.clone())
    }
}

/// φ(x) = 2^{2−u(x)}, u = skeleton depth of the vertex nearest to x.
#[derive(Clone, Copy, Debug, Default)]
pub struct PhiU;

impl VertexFn for PhiU {
    fn value(&self, x: &StructuralAddress) -> Value {
        pow2(2 - x.depth() as i64)
    }
    fn label(&self) -> String {
        "phi_u".into()
    }
    fn log2_level(&self, depth: u32, _: Option<u32>) -> Option<i64> {
        Some(2 - depth as i64)
    }
    fn infimum(&self) -> Option<Value> {
        Some(Value::zero())
    }
}

pub fn canonical_phi_u() -> SharedFn {
    Arc::new(PhiU)
}

/// φ_n: 1/2^n off T_n, 1/2^d on the skeleton of T_n (d = depth), constant on hairs.
#[derive(Clone, Copy, Debug)]
pub struct PhiFamily {
    pub n: u32,
    pub orientation: Orientation,
}

impl VertexFn for PhiFamily {
    fn value(&self, x: &StructuralAddress) -> Value {
        pow2(self.log2_level(x.depth(), x.t_index(self.orientation)).unwrap())
    }
    fn label(&self) -> String {
        format!("phi:{}", self.n)
    }
    fn log2_level(&self, depth: u32, t: Option<u32>) -> Option<i64> {
        Some(if t == Some(self.n) { -(depth as i64) } else { -(self.n as i64) })
    }
    fn orientation(&self) -> Orientation {
        self.orientation
    }
    fn infimum(&self) -> Option<Value> {
        Some(Value::zero())
    }
}

pub fn phi_family(n: u32, orientation: Orientation) -> SharedFn {
    Arc::new(PhiFamily { n, orientation })
}

/// `factor · inner`.
pub struct Scaled {
    pub inner: SharedFn,
    pub factor: Value,
}

impl VertexFn for Scaled {
    fn value(&self, x: &StructuralAddress) -> Value {
        &self.factor * self.inner.value(x)
    }
    fn label(&self) -> String {
        format!("{}*{}", self.factor, self.inner.label())
    }
    fn orientation(&self) -> Orientation {
        self.inner.orientation()
    }
    fn infimum(&self) -> Option<Value> {
        self.inner.infimum().map(|v| v * &self.factor)
    }
}

/// `inner − by`, the shift that moves the infimum to 0.
pub struct Shifted {
    pub inner: SharedFn,
    pub by: Value,
}

impl VertexFn for Shifted {
    fn value(&self, x: &StructuralAddress) -> Value {
        self.inner.value(x) - &self.by
    }
    fn label(&self) -> String {
        format!("{}-{}", self.inner.label(), self.by)
    }
    fn log2_level(&self, depth: u32, t: Option<u32>) -> Option<i64> {
        if self.by.is_zero() {
            self.inner.log2_level(depth, t)
        } else {
            None
        }
    }
    fn orientation(&self) -> Orientation {
        self.inner.orientation()
    }
    fn infimum(&self) -> Option<Value> {
        self.inner.infimum().map(|v| v - &self.by)
    }
}

/// Shift φ by its infimum; φ unchanged when the infimum is already 0 or unknown.
pub fn shift_to_zero_inf(phi: SharedFn) -> SharedFn {
    match phi.infimum() {
        Some(r) if !r.is_zero() => Arc::new(Shifted { inner: phi, by: r }),
        _ => phi,
    }
}

/// `inner` with the value at one vertex overridden.
pub struct Perturbed {
    pub inner: SharedFn,
    pub at: StructuralAddress,
    pub value: Value,
}

impl VertexFn for Perturbed {
    fn value(&self, x: &StructuralAddress) -> Value {
        if *x == self.at {
            self.value.clone()
        } else {
            self.inner.value(x)
        }
    }
    fn label(&self) -> String {
        format!("{}[{}:={}]", self.inner.label(), self.at, self.value)
    }
    fn orientation(&self) -> Orientation {
        self.inner.orientation()
    }
}

/// Function given by a closure, for ad-hoc and user-supplied evaluators.
pub struct FromFn<F> {
    pub label: String,
    pub f: F,
}

impl<F> VertexFn for FromFn<F>
where
    F: Fn(&StructuralAddress) -> Value + Send + Sync,
{
    fn value(&self, x: &StructuralAddress) -> Value {
        (self.f)(x)
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

/// `(Pφ)(x) = ¼ Σ φ(g·x)` over the four labeled edges.
pub fn markov_apply_x(graph: &SchreierGraph, phi: &dyn VertexFn, x: &Dyadic) -> Result<Value> {
    let mut s = Value::zero();
    for (_, y) in graph.neighbors(x) {
        s += eval_at(graph, phi, &y)?;
    }
    Ok(s / int(4))
}

/// Same operator computed from the structural rules alone.
pub fn markov_apply_structural(phi: &dyn VertexFn, x: &StructuralAddress) -> Value {
    let s: Value = Gen::ALL.iter().map(|&g| phi.value(&x.apply(g))).sum();
    s / int(4)
}

#[derive(Clone, Debug, Serialize)]
pub struct MarginRow {
    pub vertex: Dyadic,
    pub address: StructuralAddress,
    #[serde(with = "crate::value::as_str")]
    pub value: Value,
    #[serde(with = "crate::value::as_str")]
    pub p_value: Value,
    #[serde(with = "crate::value::as_str")]
    pub margin: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuperharmonicReport {
    pub function: String,
    pub checked: usize,
    pub rows: Vec<MarginRow>,
    /// Indices into `rows` with margin below `-tolerance`.
    pub violations: Vec<usize>,
}

impl SuperharmonicReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn margin_at(&self, x: &Dyadic) -> Option<&Value> {
        self.rows.iter().find(|r| &r.vertex == x).map(|r| &r.margin)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("vertex,address,phi,p_phi,margin\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{},{}", r.vertex, r.address, r.value, r.p_value, r.margin);
        }
        s
    }
}

/// Margins `φ − Pφ` on the interior of `region`; violations are margins
/// below `-tolerance` (zero tolerance for exact functions).
pub fn is_superharmonic_on(
    graph: &SchreierGraph,
    phi: &dyn VertexFn,
    region: &Ball,
    tolerance: &Value,
) -> Result<SuperharmonicReport> {
    let interior: Vec<&Dyadic> = region.interior().collect();
    let rows = interior
        .par_iter()
        .map(|x| {
            let address = graph.classify(x)?;
            let value = phi.value(&address);
            let p_value = markov_apply_x(graph, phi, x)?;
            let margin = &value - &p_value;
            Ok(MarginRow { vertex: (*x).clone(), address, value, p_value, margin })
        })
        .collect::<Result<Vec<_>>>()?;
    let neg_tol = -tolerance.clone();
    let violations = rows.iter().enumerate().filter(|(_, r)| r.margin < neg_tol).map(|(i, _)| i).collect();
    Ok(SuperharmonicReport { function: phi.label(), checked: rows.len(), rows, violations })
}

/// Values along the golden path i under φ.
pub fn golden_path_values(graph: &SchreierGraph, phi: &dyn VertexFn, i: u32) -> Result<Vec<Value>> {
    graph.golden_path(i).iter().map(|x| eval_at(graph, phi, x)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct HairReport {
    pub function: String,
    pub base: Dyadic,
    pub max_offset: u32,
    #[serde(with = "crate::value::as_str_vec")]
    pub values: Vec<Value>,
    pub concave: bool,
    pub non_decreasing: bool,
    pub linear_bound: bool,
    /// First failing check as (name, offset).
    pub first_failure: Option<(String, u32)>,
}

impl HairReport {
    pub fn ok(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Concavity of increments, monotonicity, and `φ(z^{(+m)}) ≤ (3m+1) φ(z)`
/// along the hair at `base`, for offsets up to `m_max`.
pub fn hair_property_suite(graph: &SchreierGraph, phi: &dyn VertexFn, base: &Dyadic, m_max: u32) -> Result<HairReport> {
    let base_addr = graph.classify(base)?;
    let StructuralAddress::Skeleton(bpath) = &base_addr else {
        return Err(Error::PreconditionFailed(format!("{base} is not a skeleton vertex")));
    };
    // superharmonicity on a covering region: a small ball at the base plus the hair itself
    let covering = graph.ball(base, 2)?;
    let zero = Value::zero();
    if !is_superharmonic_on(graph, phi, &covering, &zero)?.ok() {
        return Err(Error::PreconditionFailed(format!("{} is not superharmonic near {base}", phi.label())));
    }
    let mut values = Vec::with_capacity(m_max as usize + 2);
    for m in 0..=m_max + 1 {
        let y = graph.realize(&graph.hair_address(bpath, m));
        if m >= 1 && markov_apply_x(graph, phi, &y)? > eval_at(graph, phi, &y)? {
            return Err(Error::PreconditionFailed(format!(
                "{} is not superharmonic at hair offset {m} of {base}",
                phi.label()
            )));
        }
        values.push(eval_at(graph, phi, &y)?);
    }
    if values.iter().any(|v| v.is_negative()) {
        return Err(Error::PreconditionFailed(format!("{} takes negative values", phi.label())));
    }
    let mut first_failure = None;
    let (mut concave, mut non_decreasing, mut linear_bound) = (true, true, true);
    for m in 0..=m_max as usize {
        if values[m + 1] < values[m] && non_decreasing {
            non_decreasing = false;
            first_failure.get_or_insert(("non_decreasing".to_string(), m as u32));
        }
        if m >= 1 && (&values[m + 1] - &values[m]) > (&values[m] - &values[m - 1]) && concave {
            concave = false;
            first_failure.get_or_insert(("concave".to_string(), m as u32));
        }
        if values[m] > int(3 * m as i64 + 1) * &values[0] && linear_bound {
            linear_bound = false;
            first_failure.get_or_insert(("linear_bound".to_string(), m as u32));
        }
    }
    Ok(HairReport {
        function: phi.label(),
        base: base.clone(),
        max_offset: m_max,
        values,
        concave,
        non_decreasing,
        linear_bound,
        first_failure,
    })
}

/// Minimum of φ over the skeleton levels 0..=n, with a witness on level n.
#[derive(Clone, Debug, Serialize)]
pub struct LevelMin {
    pub n: u32,
    #[serde(with = "crate::value::as_str")]
    pub value: Value,
    pub witness: StructuralAddress,
    /// Minimum of each level 0..=n.
    #[serde(with = "crate::value::as_str_vec")]
    pub per_level: Vec<Value>,
}

/// Largest level enumerated vertex by vertex when φ has no level form.
pub const LEVEL_ENUM_CAP: u32 = 20;

/// Minimum over one skeleton level, and the left-first first vertex attaining it.
pub fn level_minimum(phi: &dyn VertexFn, depth: u32) -> Result<(Value, SkeletonPath)> {
    let o = phi.orientation();
    if phi.log2_level(0, None).is_some() {
        // classes by T-index, visited in left-first order of their first member
        let l = o.left_bit();
        let mut best: Option<(i64, Option<u32>)> = None;
        let classes = std::iter::once(None).chain((0..depth).rev().map(Some));
        for t in classes {
            let e = phi.log2_level(depth, t).expect("level form is total");
            if best.is_none_or(|(b, _)| e < b) {
                best = Some((e, t));
            }
        }
        let (e, t) = best.expect("at least the spine class");
        let path = SkeletonPath::from_bits((0..depth).map(|k| if Some(k) == t { !l } else { l }));
        return Ok((pow2(e), path));
    }
    if depth > LEVEL_ENUM_CAP {
        return Err(Error::CapExceeded { what: "level enumeration depth", requested: depth as usize, cap: LEVEL_ENUM_CAP as usize });
    }
    let mut best: Option<(Value, SkeletonPath)> = None;
    for path in level_paths(depth, o) {
        let v = phi.value(&StructuralAddress::Skeleton(path.clone()));
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, path));
        }
    }
    Ok(best.expect("levels are nonempty"))
}

/// All paths of a level in left-first lexicographic order.
pub fn level_paths(depth: u32, o: Orientation) -> impl Iterator<Item = SkeletonPath> {
    let l = o.left_bit();
    (0u64..1u64 << depth).map(move |code| {
        SkeletonPath::from_bits((0..depth).map(|k| {
            let bit = (code >> (depth - 1 - k)) & 1 == 1;
            bit != l
        }))
    })
}

fn check_max_at_root(graph: &SchreierGraph, phi: &dyn VertexFn, probe: &Ball) -> Result<()> {
    let top = phi.value(&StructuralAddress::root());
    for x in &probe.vertices {
        if eval_at(graph, phi, x)? > top {
            return Err(Error::PreconditionFailed(format!("{} exceeds its root value at {x}", phi.label())));
        }
    }
    Ok(())
}

/// Superharmonic, nonnegative, maximal at p, checked on `ball(p, radius)`.
pub fn check_level_preconditions(graph: &SchreierGraph, phi: &dyn VertexFn, radius: u32) -> Result<()> {
    let probe = graph.ball(&Dyadic::root(), radius)?;
    let rep = is_superharmonic_on(graph, phi, &probe, &Value::zero())?;
    if !rep.ok() {
        return Err(Error::PreconditionFailed(format!("{} is not superharmonic near p", phi.label())));
    }
    if rep.rows.iter().any(|r| r.value.is_negative()) {
        return Err(Error::PreconditionFailed(format!("{} takes negative values", phi.label())));
    }
    check_max_at_root(graph, phi, &probe)
}

pub const LEVEL_PROBE_RADIUS: u32 = 6;

/// `r_n`: minimum of φ over levels 0..=n, witness on level n.
pub fn level_min(graph: &SchreierGraph, phi: &dyn VertexFn, n: u32) -> Result<LevelMin> {
    check_level_preconditions(graph, phi, LEVEL_PROBE_RADIUS.min(n + 1))?;
    level_min_unchecked(phi, n)
}

pub(crate) fn level_min_unchecked(phi: &dyn VertexFn, n: u32) -> Result<LevelMin> {
    let mut per_level = Vec::with_capacity(n as usize + 1);
    for d in 0..=n {
        per_level.push(level_minimum(phi, d)?.0);
    }
    let value = per_level.iter().min().cloned().expect("n+1 levels");
    // witness: first vertex on level n attaining r_n; fall back to the deepest level attaining it
    let mut witness = None;
    for d in (0..=n).rev() {
        if per_level[d as usize] == value {
            let (_, path) = level_minimum(phi, d)?;
            witness = Some(StructuralAddress::Skeleton(path));
            break;
        }
    }
    Ok(LevelMin { n, value, witness: witness.expect("minimum is attained"), per_level })
}

/// First vertex of `region` (in ball order) with `h(y) > sup − 1/(n·d^n)`.
pub fn harmonic_witness_search(
    graph: &SchreierGraph,
    h: &dyn VertexFn,
    sup: &Value,
    n: u32,
    d: u32,
    region: &Ball,
) -> Result<Option<Dyadic>> {
    if n == 0 || d == 0 {
        return Err(Error::PreconditionFailed("n and d must be positive".into()));
    }
    let eps = Value::one() / (int(n as i64) * num_traits::pow(int(d as i64), n as usize));
    let threshold = sup - eps;
    for y in &region.vertices {
        if eval_at(graph, h, y)? > threshold {
            return Ok(Some(y.clone()));
        }
    }
    Ok(None)
}
