//! The lamplighter action on finite subsets: letters a, a⁻¹, b, b⁻¹ move every
//! point, σ toggles the root p. Set-level Markov operator with exact iteration.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::address::StructuralAddress;
use crate::config::Config;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::harmonic::SharedFn;
use crate::schreier::Ball;
use crate::value::{int, Value};
use crate::word::Gen;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    Gen(Gen),
    Switch,
}

impl Letter {
    /// Order of the five-term average: a, b, a⁻¹, b⁻¹, σ.
    pub const ALL: [Letter; 5] = [
        Letter::Gen(Gen::A),
        Letter::Gen(Gen::B),
        Letter::Gen(Gen::AInv),
        Letter::Gen(Gen::BInv),
        Letter::Switch,
    ];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::Gen(g) => Letter::Gen(g.inverse()),
            Letter::Switch => Letter::Switch,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::Gen(g) => g.as_char(),
            Letter::Switch => 's',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        if c == 's' {
            Some(Letter::Switch)
        } else {
            Gen::from_char(c).map(Letter::Gen)
        }
    }
}

/// Word over `{a, A, b, B, s}` in written order; the rightmost letter acts first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LampWord(pub Vec<Letter>);

impl LampWord {
    pub fn empty() -> Self {
        LampWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> LampWord {
        LampWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// `s · self`: `s` acts after the whole of `self`.
    pub fn prepend(&self, s: Letter) -> LampWord {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(s);
        v.extend_from_slice(&self.0);
        LampWord(v)
    }

    pub fn concat(&self, other: &LampWord) -> LampWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        LampWord(v)
    }
}

impl fmt::Display for LampWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for LampWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "e" {
            return Ok(LampWord::empty());
        }
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| Letter::from_char(c).ok_or_else(|| Error::Parse(format!("bad letter {c:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(LampWord)
    }
}

impl Serialize for LampWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn apply_letter(e: &Config, s: Letter) -> Config {
    match s {
        Letter::Gen(g) => e.apply_gen(g),
        Letter::Switch => e.toggled(&Dyadic::root()),
    }
}

pub fn apply_word(e: &Config, w: &LampWord) -> Config {
    let mut c = e.clone();
    for &l in w.0.iter().rev() {
        c = apply_letter(&c, l);
    }
    c
}

/// A nonnegative function on configurations.
pub trait SetFn: Send + Sync {
    fn eval(&self, e: &Config) -> Result<Value>;

    fn label(&self) -> String;

    /// Evaluation from structural addresses alone (used by walkers that never
    /// materialize dyadics). `None` when the function needs the graph.
    fn eval_addresses(&self, _pts: &[StructuralAddress]) -> Option<Value> {
        None
    }

    /// Claimed invariance under σ; checked, never trusted.
    fn claims_switch_invariant(&self) -> bool {
        false
    }

    /// `Some(φ)` when this is the min-function of a φ with a level form.
    fn min_level_phi(&self) -> Option<SharedFn> {
        None
    }
}

pub type SharedSetFn = Arc<dyn SetFn>;

/// `F(E) = c`.
pub struct ConstSet(pub Value);

impl SetFn for ConstSet {
    fn eval(&self, _: &Config) -> Result<Value> {
        Ok(self.0.clone())
    }
    fn label(&self) -> String {
        format!("const:{}", self.0)
    }
    fn eval_addresses(&self, _: &[StructuralAddress]) -> Option<Value> {
        Some(self.0.clone())
    }
    fn claims_switch_invariant(&self) -> bool {
        true
    }
}

/// `F(E) = |E|`, a handy non-invariant example.
pub struct Cardinality;

impl SetFn for Cardinality {
    fn eval(&self, e: &Config) -> Result<Value> {
        Ok(int(e.len() as i64))
    }
    fn label(&self) -> String {
        "card".into()
    }
    fn eval_addresses(&self, pts: &[StructuralAddress]) -> Option<Value> {
        Some(int(pts.len() as i64))
    }
}

/// `(PF)(E) = (F(aE) + F(bE) + F(a⁻¹E) + F(b⁻¹E) + F(E Δ {p})) / 5`.
pub fn markov_apply_set(f: &dyn SetFn, e: &Config) -> Result<Value> {
    let mut s = Value::zero();
    for l in Letter::ALL {
        s += f.eval(&apply_letter(e, l))?;
    }
    Ok(s / int(5))
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Caps {
    pub word_len: usize,
    pub orbit_size: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { word_len: 8, orbit_size: 1_000_000 }
    }
}

/// Number of length-n letter sequences reaching each configuration from `e`.
pub fn walk_counts(e: &Config, n: usize, caps: &Caps) -> Result<HashMap<Config, BigUint>> {
    if n > caps.word_len {
        return Err(Error::CapExceeded { what: "word length", requested: n, cap: caps.word_len });
    }
    let mut layer: HashMap<Config, BigUint> = HashMap::from([(e.clone(), BigUint::one())]);
    for _ in 0..n {
        let mut next: HashMap<Config, BigUint> = HashMap::with_capacity(layer.len() * 3);
        for (c, w) in &layer {
            for l in Letter::ALL {
                *next.entry(apply_letter(c, l)).or_insert_with(BigUint::zero) += w;
            }
        }
        if next.len() > caps.orbit_size {
            return Err(Error::CapExceeded { what: "distinct configurations", requested: next.len(), cap: caps.orbit_size });
        }
        layer = next;
    }
    Ok(layer)
}

/// `P^n F(E)`, exactly, by accumulating weights per distinct configuration.
pub fn markov_iterate(f: &dyn SetFn, e: &Config, n: usize, caps: &Caps) -> Result<Value> {
    if n == 0 {
        return f.eval(e);
    }
    let counts = walk_counts(e, n, caps)?;
    let entries: Vec<(&Config, &BigUint)> = counts.iter().collect();
    let total = entries
        .par_iter()
        .map(|(c, w)| Ok(f.eval(c)? * Value::from_integer((*w).clone().into())))
        .collect::<Result<Vec<Value>>>()?
        .into_iter()
        .fold(Value::zero(), |a, b| a + b);
    let denom = num_traits::pow(BigUint::from(5u32), n);
    Ok(total / Value::from_integer(denom.into()))
}

/// Configurations reachable by words of length ≤ n, each with one witness word
/// of minimal length. BFS order is deterministic.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub configs: Vec<Config>,
    pub witness: Vec<LampWord>,
    /// `layer_end[k]` = number of configurations reachable within k letters.
    pub layer_end: Vec<usize>,
    index: HashMap<Config, usize>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn contains(&self, c: &Config) -> bool {
        self.index.contains_key(c)
    }

    pub fn witness_of(&self, c: &Config) -> Option<&LampWord> {
        self.index.get(c).map(|&i| &self.witness[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Config, &LampWord)> {
        self.configs.iter().zip(&self.witness)
    }
}

pub fn orbit_enumerate(e: &Config, n: usize, caps: &Caps) -> Result<Orbit> {
    if n > caps.word_len {
        return Err(Error::CapExceeded { what: "word length", requested: n, cap: caps.word_len });
    }
    let mut configs = vec![e.clone()];
    let mut witness = vec![LampWord::empty()];
    let mut index = HashMap::from([(e.clone(), 0usize)]);
    let mut layer_end = vec![1usize];
    let mut start = 0;
    for _ in 0..n {
        let end = configs.len();
        for i in start..end {
            for l in Letter::ALL {
                let c = apply_letter(&configs[i], l);
                if !index.contains_key(&c) {
                    if configs.len() >= caps.orbit_size {
                        return Err(Error::CapExceeded { what: "orbit size", requested: configs.len() + 1, cap: caps.orbit_size });
                    }
                    let w = witness[i].prepend(l);
                    index.insert(c.clone(), configs.len());
                    configs.push(c);
                    witness.push(w);
                }
            }
        }
        start = end;
        layer_end.push(configs.len());
    }
    Ok(Orbit { configs, witness, layer_end, index })
}

#[derive(Clone, Debug, Serialize)]
pub struct SwitchReport {
    pub function: String,
    pub checked: usize,
    pub failures: Vec<Config>,
}

impl SwitchReport {
    pub fn invariant(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `F(E) = F(E Δ {p})` on each sample.
pub fn switch_invariant_check(f: &dyn SetFn, samples: &[Config]) -> Result<SwitchReport> {
    let p = Dyadic::root();
    let mut failures = Vec::new();
    for e in samples {
        if f.eval(e)? != f.eval(&e.toggled(&p))? {
            failures.push(e.clone());
        }
    }
    Ok(SwitchReport { function: f.label(), checked: samples.len(), failures })
}

/// Uniformly random configuration of the given size drawn from `ball`.
pub fn random_config<R: Rng>(rng: &mut R, ball: &Ball, size: usize) -> Config {
    let size = size.min(ball.len());
    let mut pts: Vec<Dyadic> = Vec::with_capacity(size);
    while pts.len() < size {
        let x = &ball.vertices[rng.random_range(0..ball.len())];
        if !pts.contains(x) {
            pts.push(x.clone());
        }
    }
    Config::new(pts)
}
