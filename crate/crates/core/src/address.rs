//! Structural coordinates on the Schreier graph: skeleton paths and hair offsets.
//!
//! The dyadic action is the ground truth; the rules in [`StructuralAddress::apply`]
//! are what the classifier observes and are cross-checked against it in tests.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{FWord, Gen};

/// Which child is drawn on the left. `Lr` puts the a-child on the left, so the
/// left spine is `p, a·p, a²·p, …`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Lr,
    Rl,
}

impl Orientation {
    /// Path bit of a left child (bit `false` = a-child, `true` = b-child).
    pub fn left_bit(self) -> bool {
        matches!(self, Orientation::Rl)
    }

    pub fn flipped(self) -> Orientation {
        match self {
            Orientation::Lr => Orientation::Rl,
            Orientation::Rl => Orientation::Lr,
        }
    }

    pub fn left_gen(self) -> Gen {
        if self.left_bit() {
            Gen::B
        } else {
            Gen::A
        }
    }

    pub fn right_gen(self) -> Gen {
        if self.left_bit() {
            Gen::A
        } else {
            Gen::B
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Lr => "lr",
            Orientation::Rl => "rl",
        })
    }
}

impl FromStr for Orientation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lr" => Ok(Orientation::Lr),
            "rl" => Ok(Orientation::Rl),
            _ => Err(Error::parse(format!("orientation must be lr or rl, got {s:?}"))),
        }
    }
}

/// Path from the root down the binary skeleton. Bit `false` means "a-child"
/// (reached by applying a), `true` means "b-child".
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct SkeletonPath {
    words: Vec<u64>,
    len: u32,
}

impl SkeletonPath {
    pub fn root() -> Self {
        SkeletonPath::default()
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut p = SkeletonPath::root();
        for b in bits {
            p.push(b);
        }
        p
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_root(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: u32) -> bool {
        debug_assert!(i < self.len);
        (self.words[(i / 64) as usize] >> (i % 64)) & 1 == 1
    }

    pub fn push(&mut self, bit: bool) {
        let i = self.len;
        if i % 64 == 0 {
            self.words.push(0);
        }
        if bit {
            self.words[(i / 64) as usize] |= 1 << (i % 64);
        }
        self.len += 1;
    }

    pub fn pop(&mut self) -> Option<bool> {
        if self.len == 0 {
            return None;
        }
        let bit = self.get(self.len - 1);
        self.len -= 1;
        let i = self.len;
        self.words[(i / 64) as usize] &= !(1 << (i % 64));
        if i % 64 == 0 {
            self.words.pop();
        }
        Some(bit)
    }

    pub fn last(&self) -> Option<bool> {
        (self.len > 0).then(|| self.get(self.len - 1))
    }

    pub fn child(&self, bit: bool) -> SkeletonPath {
        let mut c = self.clone();
        c.push(bit);
        c
    }

    pub fn parent(&self) -> Option<SkeletonPath> {
        let mut c = self.clone();
        c.pop().map(|_| c)
    }

    pub fn bits(&self) -> impl DoubleEndedIterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    /// First position holding `bit`, if any.
    pub fn first_index_of(&self, bit: bool) -> Option<u32> {
        for (wi, &w) in self.words.iter().enumerate() {
            let cand = if bit { w } else { !w };
            if cand != 0 {
                let pos = wi as u32 * 64 + cand.trailing_zeros();
                return (pos < self.len).then_some(pos);
            }
        }
        None
    }

    /// Word in F carrying p to this vertex (rightmost letter acts first).
    pub fn to_word(&self) -> FWord {
        FWord(self.bits().rev().map(|b| if b { Gen::B } else { Gen::A }).collect())
    }

    /// Lexicographic order with left children first, then by length.
    pub fn cmp_left_first(&self, other: &SkeletonPath, o: Orientation) -> Ordering {
        let lb = o.left_bit();
        for (x, y) in self.bits().zip(other.bits()) {
            if x != y {
                return if x == lb { Ordering::Less } else { Ordering::Greater };
            }
        }
        self.len.cmp(&other.len)
    }
}

impl fmt::Display for SkeletonPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "b" } else { "a" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for SkeletonPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "path({self})")
    }
}

impl Ord for SkeletonPath {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_left_first(other, Orientation::Lr)
    }
}

impl PartialOrd for SkeletonPath {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Which inverse generator walks outward along a hair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HairSide {
    /// a⁻¹ moves away from the base, a moves back, b± are loops.
    A,
    /// b⁻¹ moves away from the base, b moves back, a± are loops.
    B,
}

impl HairSide {
    pub fn outward(self) -> Gen {
        match self {
            HairSide::A => Gen::AInv,
            HairSide::B => Gen::BInv,
        }
    }

    pub fn inward(self) -> Gen {
        self.outward().inverse()
    }

    /// The single hair of a non-root skeleton vertex: an a-child carries a
    /// b⁻¹ hair (its a⁻¹ edge is the parent), a b-child an a⁻¹ hair.
    pub fn of_child(last_bit: bool) -> HairSide {
        if last_bit {
            HairSide::A
        } else {
            HairSide::B
        }
    }

    pub fn as_char(self) -> char {
        match self {
            HairSide::A => 'A',
            HairSide::B => 'B',
        }
    }
}

/// Structural position of a vertex relative to the root p.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum StructuralAddress {
    Skeleton(SkeletonPath),
    Hair {
        base: SkeletonPath,
        side: HairSide,
        offset: u32,
    },
}

impl StructuralAddress {
    pub fn root() -> Self {
        StructuralAddress::Skeleton(SkeletonPath::root())
    }

    pub fn hair(base: SkeletonPath, side: HairSide, offset: u32) -> Self {
        if offset == 0 {
            StructuralAddress::Skeleton(base)
        } else {
            StructuralAddress::Hair { base, side, offset }
        }
    }

    pub fn base(&self) -> &SkeletonPath {
        match self {
            StructuralAddress::Skeleton(p) => p,
            StructuralAddress::Hair { base, .. } => base,
        }
    }

    /// Skeleton depth u(x): distance from p to the nearest skeleton vertex.
    pub fn depth(&self) -> u32 {
        self.base().len()
    }

    pub fn offset(&self) -> u32 {
        match self {
            StructuralAddress::Skeleton(_) => 0,
            StructuralAddress::Hair { offset, .. } => *offset,
        }
    }

    pub fn is_skeleton(&self) -> bool {
        matches!(self, StructuralAddress::Skeleton(_))
    }

    pub fn is_root(&self) -> bool {
        matches!(self, StructuralAddress::Skeleton(p) if p.is_root())
    }

    /// Graph distance to p.
    pub fn dist_to_root(&self) -> u64 {
        self.depth() as u64 + self.offset() as u64
    }

    /// Index i of the subtree T_i containing this vertex's base, i.e. the
    /// position of the first right turn. `None` on the left spine.
    pub fn t_index(&self, o: Orientation) -> Option<u32> {
        self.base().first_index_of(!o.left_bit())
    }

    pub fn apply(&self, g: Gen) -> StructuralAddress {
        let mut x = self.clone();
        x.apply_mut(g);
        x
    }

    pub fn apply_mut(&mut self, g: Gen) {
        match self {
            StructuralAddress::Skeleton(path) => match g {
                Gen::A => path.push(false),
                Gen::B => path.push(true),
                Gen::AInv | Gen::BInv => {
                    // the parent edge of an a-child is a⁻¹, of a b-child b⁻¹
                    let parent_bit = g == Gen::BInv;
                    if path.last() == Some(parent_bit) {
                        path.pop();
                    } else {
                        let side = if g == Gen::AInv { HairSide::A } else { HairSide::B };
                        let base = std::mem::take(path);
                        *self = StructuralAddress::Hair { base, side, offset: 1 };
                    }
                }
            },
            StructuralAddress::Hair { base, side, offset } => {
                if g == side.outward() {
                    *offset += 1;
                } else if g == side.inward() {
                    *offset -= 1;
                    if *offset == 0 {
                        let base = std::mem::take(base);
                        *self = StructuralAddress::Skeleton(base);
                    }
                }
            }
        }
    }

    pub fn apply_word(&self, w: &FWord) -> StructuralAddress {
        let mut x = self.clone();
        for &g in w.letters().iter().rev() {
            x.apply_mut(g);
        }
        x
    }

    /// Word carrying p to this vertex.
    pub fn to_word(&self) -> FWord {
        let mut w = self.base().to_word();
        if let StructuralAddress::Hair { side, offset, .. } = self {
            let mut v = vec![side.outward(); *offset as usize];
            v.extend(w.0);
            w = FWord(v);
        }
        w
    }
}

impl fmt::Display for StructuralAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructuralAddress::Skeleton(p) => write!(f, "sk({p})"),
            StructuralAddress::Hair { base, side, offset } => {
                write!(f, "hair({base};{}+{offset})", side.as_char())
            }
        }
    }
}

impl fmt::Debug for StructuralAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for StructuralAddress {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_push_pop_across_word_boundary() {
        let mut p = SkeletonPath::root();
        let bits: Vec<bool> = (0..130).map(|i| i % 3 == 0).collect();
        for &b in &bits {
            p.push(b);
        }
        assert_eq!(p.len(), 130);
        assert_eq!(p.bits().collect::<Vec<_>>(), bits);
        for &b in bits.iter().rev() {
            assert_eq!(p.pop(), Some(b));
        }
        assert_eq!(p, SkeletonPath::root());
        assert_eq!(p.pop(), None);
    }

    #[test]
    fn first_index() {
        let p = SkeletonPath::from_bits((0..70).map(|i| i == 66));
        assert_eq!(p.first_index_of(true), Some(66));
        assert_eq!(p.first_index_of(false), Some(0));
        let q = SkeletonPath::from_bits([false; 5]);
        assert_eq!(q.first_index_of(true), None);
        let mut r = SkeletonPath::from_bits([false, true]);
        r.pop();
        assert_eq!(r.first_index_of(true), None);
    }

    #[test]
    fn structural_moves_are_invertible() {
        let start = StructuralAddress::Skeleton(SkeletonPath::from_bits([true, false, true]));
        let mut x = start.clone();
        let w: Vec<Gen> = "AABBbaAbBBa".chars().map(|c| Gen::from_char(c).unwrap()).collect();
        for &g in &w {
            x.apply_mut(g);
        }
        for &g in w.iter().rev() {
            x.apply_mut(g.inverse());
        }
        assert_eq!(x, start);
    }

    #[test]
    fn t_index_by_orientation() {
        let x = StructuralAddress::Skeleton(SkeletonPath::from_bits([false, false, true, false]));
        assert_eq!(x.t_index(Orientation::Lr), Some(2));
        assert_eq!(x.t_index(Orientation::Rl), Some(0));
        assert_eq!(StructuralAddress::root().t_index(Orientation::Lr), None);
    }
}
