//! The graph Z: the right Cayley graph of the free group on a, b with the
//! branch through `a` replaced by an infinite tail. Its min-function admits
//! no strong approximation although the action is amenable.
//!
//! Words act in right notation here: `E·g₁g₂` applies g₁ first.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::value::{int, Value};
use crate::word::Gen;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ZVertex {
    /// Reduced word not beginning with `a`; the empty word is e.
    Word(Vec<Gen>),
    /// k-th point of the tail, k ≥ 1.
    Tail(u64),
}

impl ZVertex {
    pub fn e() -> Self {
        ZVertex::Word(Vec::new())
    }

    pub fn word(letters: &[Gen]) -> Result<Self> {
        let reduced = letters.windows(2).all(|w| w[0] != w[1].inverse());
        if !reduced || letters.first() == Some(&Gen::A) {
            return Err(Error::Parse(format!("{} is not a reduced word avoiding the a-branch", fmt_word(letters))));
        }
        Ok(ZVertex::Word(letters.to_vec()))
    }

    pub fn is_e(&self) -> bool {
        matches!(self, ZVertex::Word(w) if w.is_empty())
    }

    /// Right multiplication by one letter.
    pub fn mul(&self, s: Gen) -> ZVertex {
        match self {
            ZVertex::Tail(k) => match s {
                Gen::A => ZVertex::Tail(k + 1),
                Gen::AInv if *k == 1 => ZVertex::e(),
                Gen::AInv => ZVertex::Tail(k - 1),
                Gen::B | Gen::BInv => self.clone(),
            },
            ZVertex::Word(w) => {
                if w.is_empty() && s == Gen::A {
                    return ZVertex::Tail(1);
                }
                let mut v = w.clone();
                if v.last() == Some(&s.inverse()) {
                    v.pop();
                } else {
                    v.push(s);
                }
                ZVertex::Word(v)
            }
        }
    }

    pub fn dist_to_e(&self) -> u64 {
        match self {
            ZVertex::Tail(k) => *k,
            ZVertex::Word(w) => w.len() as u64,
        }
    }
}

fn fmt_word(w: &[Gen]) -> String {
    if w.is_empty() {
        "e".into()
    } else {
        w.iter().map(|g| g.as_char()).collect()
    }
}

impl fmt::Display for ZVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZVertex::Tail(k) => write!(f, "t:{k}"),
            ZVertex::Word(w) => f.write_str(&fmt_word(w)),
        }
    }
}

impl FromStr for ZVertex {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if let Some(k) = s.strip_prefix("t:") {
            let k: u64 = k.parse().map_err(|_| Error::Parse(format!("bad tail index in {s:?}")))?;
            if k == 0 {
                return Err(Error::Parse("tail index must be positive".into()));
            }
            return Ok(ZVertex::Tail(k));
        }
        if s == "e" {
            return Ok(ZVertex::e());
        }
        let letters = s
            .chars()
            .map(|c| Gen::from_char(c).ok_or_else(|| Error::Parse(format!("bad letter {c:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        ZVertex::word(&letters)
    }
}

impl Serialize for ZVertex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The four labeled neighbors, in the order a, b, a⁻¹, b⁻¹.
pub fn z_neighbors(v: &ZVertex) -> [(Gen, ZVertex); 4] {
    Gen::ALL.map(|g| (g, v.mul(g)))
}

/// 1 on the tail, `3^{-|x|}` on words.
pub fn phi_z(v: &ZVertex) -> Value {
    match v {
        ZVertex::Tail(_) => Value::one(),
        ZVertex::Word(w) => Value::new(1.into(), num_traits::pow(num_bigint::BigInt::from(3), w.len())),
    }
}

pub type ZSet = BTreeSet<ZVertex>;

/// `f(E) = min φ_Z`, `f(∅) = 1`.
pub fn minfun_z(e: &ZSet) -> Value {
    e.iter().map(phi_z).min().unwrap_or_else(Value::one)
}

/// Letters of the lamplighter over Z: the four generators and the switch at e.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ZLetter {
    Gen(Gen),
    Switch,
}

impl ZLetter {
    pub const ALL: [ZLetter; 5] =
        [ZLetter::Gen(Gen::A), ZLetter::Gen(Gen::B), ZLetter::Gen(Gen::AInv), ZLetter::Gen(Gen::BInv), ZLetter::Switch];

    pub fn as_str(self) -> String {
        match self {
            ZLetter::Gen(g) => g.as_char().to_string(),
            ZLetter::Switch => "s".into(),
        }
    }
}

pub fn z_apply(e: &ZSet, l: ZLetter) -> ZSet {
    match l {
        ZLetter::Gen(g) => e.iter().map(|v| v.mul(g)).collect(),
        ZLetter::Switch => {
            let mut out = e.clone();
            if !out.remove(&ZVertex::e()) {
                out.insert(ZVertex::e());
            }
            out
        }
    }
}

/// Right notation: the leftmost letter acts first.
pub fn z_apply_word(e: &ZSet, w: &[ZLetter]) -> ZSet {
    w.iter().fold(e.clone(), |acc, &l| z_apply(&acc, l))
}

/// `(1/5)(f(Ea) + f(Eb) + f(Ea⁻¹) + f(Eb⁻¹) + f(E Δ {e}))`.
pub fn markov_apply_z(e: &ZSet) -> Value {
    let s: Value = ZLetter::ALL.iter().map(|&l| minfun_z(&z_apply(e, l))).sum();
    s / int(5)
}

#[derive(Clone, Debug, Serialize)]
pub struct ZWitness {
    pub word: Vec<ZLetter>,
    pub word_str: String,
    #[serde(with = "crate::value::as_str")]
    pub before: Value,
    #[serde(with = "crate::value::as_str")]
    pub after: Value,
    #[serde(with = "crate::value::as_str")]
    pub ratio: Value,
    /// Case 1 (only tail points) or Case 2 (a word point attains the minimum).
    pub case: u8,
}

/// A word of length ≤ 2 with `f(E·w) ≤ f(E)/3`.
pub fn witness_word(e: &ZSet) -> ZWitness {
    let argmin = e.iter().filter(|v| matches!(v, ZVertex::Word(_))).max_by_key(|v| v.dist_to_e());
    let (word, case) = match argmin {
        None => (vec![ZLetter::Switch, ZLetter::Gen(Gen::B)], 1),
        Some(ZVertex::Word(x)) => {
            let s = [Gen::A, Gen::B, Gen::AInv, Gen::BInv]
                .into_iter()
                .find(|&s| x.last() != Some(&s.inverse()) && !(x.is_empty() && s == Gen::A))
                .expect("three admissible letters");
            (vec![ZLetter::Gen(s)], 2)
        }
        Some(ZVertex::Tail(_)) => unreachable!(),
    };
    let before = minfun_z(e);
    let after = minfun_z(&z_apply_word(e, &word));
    let word_str = word.iter().map(|l| l.as_str()).collect();
    ZWitness { ratio: &after / &before, word, word_str, before, after, case }
}

/// Every point's image keeps `φ_Z ≥ φ_Z(x)/3`, x the minimizer; so the
/// witness value comes from x alone.
pub fn witness_unspoiled(e: &ZSet, w: &ZWitness) -> bool {
    let floor = minfun_z(e) / int(3);
    let mut moved: Vec<ZVertex> = e.iter().cloned().collect();
    for &l in &w.word {
        if let ZLetter::Gen(g) = l {
            moved = moved.iter().map(|v| v.mul(g)).collect();
        }
    }
    moved.iter().all(|v| phi_z(v) >= floor)
}

/// BFS ball around e, in neighbor order.
pub fn z_ball(radius: u64) -> Vec<ZVertex> {
    let mut seen: HashSet<ZVertex> = HashSet::from([ZVertex::e()]);
    let mut out = vec![ZVertex::e()];
    let mut q = VecDeque::from([(ZVertex::e(), 0u64)]);
    while let Some((v, d)) = q.pop_front() {
        if d == radius {
            continue;
        }
        for (_, w) in z_neighbors(&v) {
            if seen.insert(w.clone()) {
                out.push(w.clone());
                q.push_back((w, d + 1));
            }
        }
    }
    out
}

/// Random subset of `ball` with at most `max_size` points.
pub fn random_zset<R: Rng>(rng: &mut R, ball: &[ZVertex], max_size: usize) -> ZSet {
    let size = rng.random_range(0..=max_size);
    (0..size).map(|_| ball[rng.random_range(0..ball.len())].clone()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct FolnerRow {
    pub len: u64,
    pub boundary_edges: u64,
    /// Leaving edges per vertex of the segment, `|∂S|/|S|`.
    #[serde(with = "crate::value::as_str")]
    pub ratio: Value,
}

/// Tail segment `{t:1, …, t:L}`.
pub fn tail_folner(len: u64) -> FolnerRow {
    let mut boundary = 0;
    for k in 1..=len {
        for (_, w) in z_neighbors(&ZVertex::Tail(k)) {
            let inside = matches!(w, ZVertex::Tail(j) if (1..=len).contains(&j));
            if !inside {
                boundary += 1;
            }
        }
    }
    let ratio = if len == 0 { Value::zero() } else { Value::new(boundary.into(), len.into()) };
    FolnerRow { len, boundary_edges: boundary as u64, ratio }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::ratio;

    fn set(items: &[&str]) -> ZSet {
        items.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn neighbors_of_e() {
        let n = z_neighbors(&ZVertex::e());
        let s: Vec<String> = n.iter().map(|(_, v)| v.to_string()).collect();
        assert_eq!(s, ["t:1", "b", "A", "B"]);
        assert_eq!(ZVertex::Tail(4).mul(Gen::B), ZVertex::Tail(4));
        assert_eq!(ZVertex::Tail(1).mul(Gen::AInv), ZVertex::e());
        for v in z_ball(3) {
            assert_eq!(v.mul(Gen::A).mul(Gen::AInv), v);
        }
        assert!("ab".parse::<ZVertex>().is_err());
        assert!("bB".parse::<ZVertex>().is_err());
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi_z(&ZVertex::Tail(7)), int(1));
        assert_eq!(phi_z(&"bab".parse().unwrap()), ratio(1, 27));
        assert_eq!(phi_z(&ZVertex::e()), int(1));
        assert_eq!(minfun_z(&ZSet::new()), int(1));
        assert_eq!(minfun_z(&set(&["t:3", "b"])), ratio(1, 3));
    }

    #[test]
    fn witnesses() {
        let w = witness_word(&ZSet::new());
        assert_eq!((w.word_str.as_str(), w.ratio.clone()), ("sb", ratio(1, 3)));
        let w = witness_word(&set(&["b"]));
        assert_eq!(w.ratio, ratio(1, 3));
        assert_ne!(w.word_str, "B");
        let w = witness_word(&set(&["t:5"]));
        assert_eq!((w.case, w.ratio.clone()), (1, ratio(1, 3)));
    }

    #[test]
    fn folner_tail() {
        for l in [10, 100] {
            assert_eq!(tail_folner(l).ratio, ratio(2, l as i64));
        }
    }
}
