//! Generators of F, words over them, and their direct action on dyadics.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// One of `a, a⁻¹, b, b⁻¹` where `a = g1 g0⁻¹` and `b = g1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gen {
    A,
    AInv,
    B,
    BInv,
}

impl Gen {
    /// Neighbor order used everywhere: a, b, a⁻¹, b⁻¹.
    pub const ALL: [Gen; 4] = [Gen::A, Gen::B, Gen::AInv, Gen::BInv];

    pub fn inverse(self) -> Gen {
        match self {
            Gen::A => Gen::AInv,
            Gen::AInv => Gen::A,
            Gen::B => Gen::BInv,
            Gen::BInv => Gen::B,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Gen::A => 'a',
            Gen::AInv => 'A',
            Gen::B => 'b',
            Gen::BInv => 'B',
        }
    }

    pub fn from_char(c: char) -> Option<Gen> {
        Some(match c {
            'a' => Gen::A,
            'A' => Gen::AInv,
            'b' => Gen::B,
            'B' => Gen::BInv,
            _ => return None,
        })
    }

    pub fn is_inverse(self) -> bool {
        matches!(self, Gen::AInv | Gen::BInv)
    }

    /// Image of `x` under this generator.
    pub fn apply(self, x: &Dyadic) -> Dyadic {
        match self {
            Gen::A => g1_apply(&g0_inv_apply(x)),
            Gen::AInv => g0_apply(&g1_inv_apply(x)),
            Gen::B => g1_apply(x),
            Gen::BInv => g1_inv_apply(x),
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

pub fn g0_apply(x: &Dyadic) -> Dyadic {
    if x.cmp_ratio(1, 1) != Ordering::Greater {
        x.mul_pow2(-1)
    } else if x.cmp_ratio(3, 2) != Ordering::Greater {
        x.add_ratio(-1, 2)
    } else {
        x.mul_pow2(1).add_ratio(-1, 0)
    }
}

pub fn g0_inv_apply(y: &Dyadic) -> Dyadic {
    if y.cmp_ratio(1, 2) != Ordering::Greater {
        y.mul_pow2(1)
    } else if y.cmp_ratio(1, 1) != Ordering::Greater {
        y.add_ratio(1, 2)
    } else {
        y.add_ratio(1, 0).mul_pow2(-1)
    }
}

pub fn g1_apply(x: &Dyadic) -> Dyadic {
    if x.cmp_ratio(1, 1) != Ordering::Greater {
        x.clone()
    } else if x.cmp_ratio(3, 2) != Ordering::Greater {
        x.mul_pow2(-1).add_ratio(1, 2)
    } else if x.cmp_ratio(7, 3) != Ordering::Greater {
        x.add_ratio(-1, 3)
    } else {
        x.mul_pow2(1).add_ratio(-1, 0)
    }
}

pub fn g1_inv_apply(y: &Dyadic) -> Dyadic {
    if y.cmp_ratio(1, 1) != Ordering::Greater {
        y.clone()
    } else if y.cmp_ratio(5, 3) != Ordering::Greater {
        y.add_ratio(-1, 2).mul_pow2(1)
    } else if y.cmp_ratio(3, 2) != Ordering::Greater {
        y.add_ratio(1, 3)
    } else {
        y.add_ratio(1, 0).mul_pow2(-1)
    }
}

/// A word over `{a, a⁻¹, b, b⁻¹}`, stored in written order. The rightmost
/// letter acts first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FWord(pub Vec<Gen>);

impl FWord {
    pub fn empty() -> Self {
        FWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Gen] {
        &self.0
    }

    pub fn inverse(&self) -> FWord {
        FWord(self.0.iter().rev().map(|g| g.inverse()).collect())
    }

    pub fn freely_reduced(&self) -> FWord {
        let mut out: Vec<Gen> = Vec::with_capacity(self.0.len());
        for &g in &self.0 {
            if out.last() == Some(&g.inverse()) {
                out.pop();
            } else {
                out.push(g);
            }
        }
        FWord(out)
    }

    /// Concatenation `self · other`; `other` acts first.
    pub fn concat(&self, other: &FWord) -> FWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        FWord(v)
    }

    pub fn apply(&self, x: &Dyadic) -> Dyadic {
        let mut y = x.clone();
        for g in self.0.iter().rev() {
            y = g.apply(&y);
        }
        y
    }
}

impl fmt::Display for FWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for g in &self.0 {
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for FWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "e" {
            return Ok(FWord::empty());
        }
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| Gen::from_char(c).ok_or_else(|| Error::parse(format!("bad letter {c:?} in word {s:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(FWord)
    }
}
