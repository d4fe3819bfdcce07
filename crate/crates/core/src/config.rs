//! Finite subsets of vertices: the states of the lamplighter walk.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::word::Gen;

/// A finite set of vertices, kept sorted ascending without duplicates so that
/// equality and hashing are exact.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config(Vec<Dyadic>);

impl Config {
    pub fn empty() -> Self {
        Config(Vec::new())
    }

    pub fn singleton(x: Dyadic) -> Self {
        Config(vec![x])
    }

    pub fn new(points: impl IntoIterator<Item = Dyadic>) -> Self {
        let mut v: Vec<Dyadic> = points.into_iter().collect();
        v.sort();
        v.dedup();
        Config(v)
    }

    pub fn points(&self) -> &[Dyadic] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        self.0.binary_search(x).is_ok()
    }

    /// Symmetric difference with `{x}`.
    pub fn toggle(&mut self, x: &Dyadic) {
        match self.0.binary_search(x) {
            Ok(i) => {
                self.0.remove(i);
            }
            Err(i) => self.0.insert(i, x.clone()),
        }
    }

    pub fn toggled(&self, x: &Dyadic) -> Config {
        let mut c = self.clone();
        c.toggle(x);
        c
    }

    /// Image under a generator. Elements of F are increasing maps, so the
    /// sorted order survives without re-sorting.
    pub fn apply_gen(&self, g: Gen) -> Config {
        let v: Vec<Dyadic> = self.0.iter().map(|x| g.apply(x)).collect();
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Config(v)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Dyadic> {
        self.0.iter()
    }
}

impl<'a> IntoIterator for &'a Config {
    type Item = &'a Dyadic;
    type IntoIter = std::slice::Iter<'a, Dyadic>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl FromIterator<Dyadic> for Config {
    fn from_iter<I: IntoIterator<Item = Dyadic>>(iter: I) -> Self {
        Config::new(iter)
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("{}");
        }
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Config[{self}]")
    }
}

impl FromStr for Config {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "{}" {
            return Ok(Config::empty());
        }
        let pts = s
            .split(',')
            .map(|t| t.parse::<Dyadic>())
            .collect::<Result<Vec<_>>>()?;
        if let Some(x) = pts.iter().find(|x| !x.is_vertex()) {
            return Err(Error::parse(format!("{x} is not a vertex in (0,1)")));
        }
        Ok(Config::new(pts))
    }
}

impl Serialize for Config {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Config {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
