use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact dyadic rational `num / 2^exp` in canonical form: either `exp == 0`
/// or `num` is odd.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, exp: u32) -> Self {
        let mut num = num.into();
        let mut exp = exp;
        if num.is_zero() {
            return Dyadic { num, exp: 0 };
        }
        if exp > 0 {
            let tz = num.trailing_zeros().unwrap_or(0).min(exp as u64) as u32;
            if tz > 0 {
                num >>= tz as usize;
                exp -= tz;
            }
        }
        Dyadic { num, exp }
    }

    pub fn zero() -> Self {
        Dyadic { num: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { num: BigInt::one(), exp: 0 }
    }

    /// The root vertex p = 5/8.
    pub fn root() -> Self {
        Dyadic::new(5, 3)
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    /// Strictly inside (0, 1), i.e. a vertex of the Schreier graph.
    pub fn is_vertex(&self) -> bool {
        self.num.sign() == Sign::Plus && self.num.bits() <= self.exp as u64 && self.exp > 0
    }

    pub fn in_unit_interval(&self) -> bool {
        !self.num.is_negative() && (self.num.bits() <= self.exp as u64 || self.is_one())
    }

    fn is_one(&self) -> bool {
        self.exp == 0 && self.num.is_one()
    }

    /// `self * 2^k`.
    pub fn mul_pow2(&self, k: i32) -> Dyadic {
        if self.num.is_zero() {
            return Dyadic::zero();
        }
        if k <= 0 {
            Dyadic::new(self.num.clone(), self.exp + (-k) as u32)
        } else if (k as u32) <= self.exp {
            Dyadic { num: self.num.clone(), exp: self.exp - k as u32 }
        } else {
            Dyadic { num: &self.num << (k as u32 - self.exp) as usize, exp: 0 }
        }
    }

    /// `self + k / 2^j`.
    pub fn add_ratio(&self, k: i64, j: u32) -> Dyadic {
        if self.exp >= j {
            let shifted = BigInt::from(k) << (self.exp - j) as usize;
            Dyadic::new(&self.num + shifted, self.exp)
        } else {
            let shifted = &self.num << (j - self.exp) as usize;
            Dyadic::new(shifted + k, j)
        }
    }

    /// Compare against `k / 2^j` without building a second big integer in the
    /// common case `0 < self < 1`, `exp > j`.
    pub fn cmp_ratio(&self, k: u64, j: u32) -> Ordering {
        if self.exp > j && self.num.sign() == Sign::Plus && self.num.bits() <= self.exp as u64 {
            let mut top = 0u64;
            for b in 0..j {
                let pos = (self.exp - 1 - b) as u64;
                top = (top << 1) | self.num.bit(pos) as u64;
            }
            // num is odd here, so equality is impossible
            return if top < k { Ordering::Less } else { Ordering::Greater };
        }
        self.cmp(&Dyadic::new(k, j))
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), BigInt::one() << self.exp as usize)
    }

    pub fn to_f64(&self) -> f64 {
        let n = self.num.to_f64().unwrap_or(f64::NAN);
        n * (-(self.exp as f64)).exp2()
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.exp.cmp(&other.exp) {
            Ordering::Equal => self.num.cmp(&other.num),
            Ordering::Greater => {
                let o = &other.num << (self.exp - other.exp) as usize;
                self.num.cmp(&o)
            }
            Ordering::Less => {
                let s = &self.num << (other.exp - self.exp) as usize;
                s.cmp(&other.num)
            }
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        let a = &self.num << (e - self.exp) as usize;
        let b = &rhs.num << (e - rhs.exp) as usize;
        Dyadic::new(a + b, e)
    }
}

impl std::ops::Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        let a = &self.num << (e - self.exp) as usize;
        let b = &rhs.num << (e - rhs.exp) as usize;
        Dyadic::new(a - b, e)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Accepts `p`, `num/2^exp`, `num/den` with `den` a power of two, or an integer.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "p" {
            return Ok(Dyadic::root());
        }
        let bad = || Error::parse(format!("not a dyadic rational: {s:?}"));
        let Some((n, d)) = s.split_once('/') else {
            let num: BigInt = s.parse().map_err(|_| bad())?;
            return Ok(Dyadic::new(num, 0));
        };
        let num: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d = d.trim();
        if let Some(e) = d.strip_prefix("2^") {
            let exp: u32 = e.parse().map_err(|_| bad())?;
            return Ok(Dyadic::new(num, exp));
        }
        let den: BigInt = d.parse().map_err(|_| bad())?;
        if !den.is_positive() || den.is_odd() && !den.is_one() {
            return Err(bad());
        }
        let exp = den.trailing_zeros().unwrap_or(0);
        if den != BigInt::one() << exp as usize {
            return Err(bad());
        }
        Ok(Dyadic::new(num, exp as u32))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_strips_factors_of_two() {
        let x = Dyadic::new(10, 4);
        assert_eq!(x.num(), &BigInt::from(5));
        assert_eq!(x.exp(), 3);
        assert_eq!(Dyadic::new(0, 7), Dyadic::zero());
        assert_eq!(Dyadic::new(4, 2), Dyadic::one());
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["5/2^3", "1/2^1", "0", "1", "11/2^4"] {
            let x: Dyadic = s.parse().unwrap();
            assert_eq!(x.to_string(), s);
        }
        assert_eq!("5/8".parse::<Dyadic>().unwrap(), Dyadic::root());
        assert_eq!("p".parse::<Dyadic>().unwrap(), Dyadic::root());
        assert!("1/3".parse::<Dyadic>().is_err());
        assert!("x".parse::<Dyadic>().is_err());
    }

    #[test]
    fn cmp_ratio_matches_generic_compare() {
        for exp in 0..7u32 {
            for num in 0..=(1i64 << exp) {
                let x = Dyadic::new(num, exp);
                for j in 0..4u32 {
                    for k in 0..=(1u64 << j) {
                        let y = Dyadic::new(k as i64, j);
                        assert_eq!(x.cmp_ratio(k, j), x.cmp(&y), "{x} vs {y}");
                    }
                }
            }
        }
    }

    #[test]
    fn arithmetic() {
        let x = Dyadic::root();
        assert_eq!(x.add_ratio(-1, 2), Dyadic::new(3, 3));
        assert_eq!(x.mul_pow2(1).add_ratio(-1, 0), Dyadic::new(1, 2));
        assert_eq!(&x + &Dyadic::new(3, 3), Dyadic::one());
        assert_eq!(&x - &x, Dyadic::zero());
        assert!(x.is_vertex());
        assert!(!Dyadic::one().is_vertex());
        assert!(!Dyadic::zero().is_vertex());
    }
}
