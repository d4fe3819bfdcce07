//! Elements of Thompson's group F as piecewise-linear maps of [0, 1], and the
//! derivative-ratio cocycle.

use std::fmt;

use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::word::{FWord, Gen};

/// Piecewise-linear homeomorphism of [0, 1] with dyadic breakpoints and slopes
/// `2^e`. Always kept canonical (no two adjacent pieces share a slope), so
/// derived equality is equality of maps.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PLMap {
    breaks: Vec<Dyadic>,
    images: Vec<Dyadic>,
    slopes: Vec<i32>,
}

impl PLMap {
    pub fn identity() -> Self {
        PLMap {
            breaks: vec![Dyadic::zero(), Dyadic::one()],
            images: vec![Dyadic::zero(), Dyadic::one()],
            slopes: vec![0],
        }
    }

    /// Build from breakpoints and slope exponents; images follow from
    /// continuity starting at f(0) = 0.
    pub fn from_slopes(breaks: Vec<Dyadic>, slopes: Vec<i32>) -> Result<Self> {
        if breaks.len() != slopes.len() + 1 || breaks.len() < 2 {
            return Err(Error::parse("need one more breakpoint than slopes"));
        }
        let mut images = Vec::with_capacity(breaks.len());
        images.push(Dyadic::zero());
        for i in 0..slopes.len() {
            let len = &breaks[i + 1] - &breaks[i];
            let next = &images[i] + &len.mul_pow2(slopes[i]);
            images.push(next);
        }
        let f = PLMap { breaks, images, slopes }.fused();
        f.validate()?;
        Ok(f)
    }

    pub fn g0() -> Self {
        let b = |s: &str| s.parse::<Dyadic>().unwrap();
        PLMap::from_slopes(vec![b("0"), b("1/2"), b("3/4"), b("1")], vec![-1, 0, 1]).unwrap()
    }

    pub fn g1() -> Self {
        let b = |s: &str| s.parse::<Dyadic>().unwrap();
        PLMap::from_slopes(vec![b("0"), b("1/2"), b("3/4"), b("7/8"), b("1")], vec![0, -1, 0, 1]).unwrap()
    }

    pub fn gen(g: Gen) -> Self {
        match g {
            Gen::A => gen_a(),
            Gen::AInv => gen_a().invert(),
            Gen::B => gen_b(),
            Gen::BInv => gen_b().invert(),
        }
    }

    pub fn breakpoints(&self) -> &[Dyadic] {
        &self.breaks
    }

    pub fn slopes(&self) -> &[i32] {
        &self.slopes
    }

    /// Interior breakpoints (where the slope actually changes).
    pub fn interior_breakpoints(&self) -> &[Dyadic] {
        &self.breaks[1..self.breaks.len() - 1]
    }

    pub fn is_identity(&self) -> bool {
        *self == PLMap::identity()
    }

    /// Index of the piece `[b_i, b_{i+1})` containing `x` (the last piece for x = 1).
    fn piece_right(&self, x: &Dyadic) -> usize {
        let i = self.breaks.partition_point(|b| b <= x);
        i.saturating_sub(1).min(self.slopes.len() - 1)
    }

    /// Index of the piece `(b_i, b_{i+1}]` containing `x` (the first piece for x = 0).
    fn piece_left(&self, x: &Dyadic) -> usize {
        let i = self.breaks.partition_point(|b| b < x);
        i.saturating_sub(1).min(self.slopes.len() - 1)
    }

    pub fn apply(&self, x: &Dyadic) -> Dyadic {
        let i = self.piece_right(x);
        let dx = x - &self.breaks[i];
        &self.images[i] + &dx.mul_pow2(self.slopes[i])
    }

    pub fn slope_right(&self, x: &Dyadic) -> i32 {
        self.slopes[self.piece_right(x)]
    }

    pub fn slope_left(&self, x: &Dyadic) -> i32 {
        self.slopes[self.piece_left(x)]
    }

    pub fn invert(&self) -> PLMap {
        PLMap {
            breaks: self.images.clone(),
            images: self.breaks.clone(),
            slopes: self.slopes.iter().map(|s| -s).collect(),
        }
    }

    /// `self ∘ g` (g acts first).
    pub fn compose(&self, g: &PLMap) -> PLMap {
        let g_inv = g.invert();
        let mut pts: Vec<Dyadic> = g.breaks.clone();
        pts.extend(self.breaks.iter().map(|b| g_inv.apply(b)));
        pts.sort();
        pts.dedup();
        let mut images = Vec::with_capacity(pts.len());
        let mut slopes = Vec::with_capacity(pts.len() - 1);
        for (k, x) in pts.iter().enumerate() {
            let gx = g.apply(x);
            if k + 1 < pts.len() {
                slopes.push(g.slope_right(x) + self.slope_right(&gx));
            }
            images.push(self.apply(&gx));
        }
        PLMap { breaks: pts, images, slopes }.fused()
    }

    fn fused(self) -> PLMap {
        let PLMap { breaks, images, slopes } = self;
        let mut nb = vec![breaks[0].clone()];
        let mut ni = vec![images[0].clone()];
        let mut ns: Vec<i32> = Vec::new();
        for i in 0..slopes.len() {
            if ns.last() == Some(&slopes[i]) {
                *nb.last_mut().unwrap() = breaks[i + 1].clone();
                *ni.last_mut().unwrap() = images[i + 1].clone();
            } else {
                ns.push(slopes[i]);
                nb.push(breaks[i + 1].clone());
                ni.push(images[i + 1].clone());
            }
        }
        PLMap { breaks: nb, images: ni, slopes: ns }
    }

    /// Check the structural invariants of an element of F.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::StructuralAssertFailed(format!("invalid PL map: {m}")));
        if self.breaks.first() != Some(&Dyadic::zero()) || self.breaks.last() != Some(&Dyadic::one()) {
            return bad("domain must be [0,1]");
        }
        if self.images.first() != Some(&Dyadic::zero()) || self.images.last() != Some(&Dyadic::one()) {
            return bad("must fix 0 and 1");
        }
        if self.breaks.windows(2).any(|w| w[0] >= w[1]) || self.images.windows(2).any(|w| w[0] >= w[1]) {
            return bad("not strictly increasing");
        }
        for i in 0..self.slopes.len() {
            let dx = &self.breaks[i + 1] - &self.breaks[i];
            let dy = &self.images[i + 1] - &self.images[i];
            if dx.mul_pow2(self.slopes[i]) != dy {
                return bad("slope inconsistent with images");
            }
        }
        if self.slopes.windows(2).any(|w| w[0] == w[1]) {
            return bad("not canonical");
        }
        Ok(())
    }
}

impl fmt::Debug for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PLMap[")?;
        for i in 0..self.slopes.len() {
            write!(f, "[{}, {}]→2^{} ", self.breaks[i], self.breaks[i + 1], self.slopes[i])?;
        }
        write!(f, "]")
    }
}

/// a = g1 ∘ g0⁻¹ (g0⁻¹ acts first).
pub fn gen_a() -> PLMap {
    PLMap::g1().compose(&PLMap::g0().invert())
}

/// b = g1.
pub fn gen_b() -> PLMap {
    PLMap::g1()
}

/// Right-to-left composite of the generator maps; the empty word is the identity.
pub fn word_to_pl(w: &FWord) -> PLMap {
    let mut acc = PLMap::identity();
    for &g in w.letters() {
        acc = acc.compose(&PLMap::gen(g));
    }
    acc
}

/// Exponent `e` with `g'₊(x) / g'₋(x) = 2^e`.
pub fn cocycle_eval(g: &PLMap, x: &Dyadic) -> i32 {
    g.slope_right(x) - g.slope_left(x)
}

/// `c(g∘h)(x) = c(g)(h(x)) + c(h)(x)`.
pub fn cocycle_identity_check(g: &PLMap, h: &PLMap, x: &Dyadic) -> bool {
    let lhs = cocycle_eval(&g.compose(h), x);
    let rhs = cocycle_eval(g, &h.apply(x)) + cocycle_eval(h, x);
    lhs == rhs
}

/// Outcome of probing a nonidentity element for a nonzero cocycle value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelSample {
    pub has_breakpoint: bool,
    /// First interior breakpoint with a nonzero cocycle value, if any.
    pub nonzero_at: Option<Dyadic>,
}

/// Probe the interior breakpoints of `g`. Only sampled evidence: the cocycle
/// kernel is not certified trivial.
pub fn kernel_sample(g: &PLMap) -> KernelSample {
    let inner = g.interior_breakpoints();
    KernelSample {
        has_breakpoint: !inner.is_empty(),
        nonzero_at: inner.iter().find(|x| cocycle_eval(g, x) != 0).cloned(),
    }
}
