//! Exact values used by functions on vertices and configurations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Value = BigRational;

/// `2^e` as an exact rational.
pub fn pow2(e: i64) -> Value {
    let m = BigInt::one() << e.unsigned_abs() as usize;
    if e >= 0 {
        Value::from_integer(m)
    } else {
        Value::new(BigInt::one(), m)
    }
}

pub fn int(k: i64) -> Value {
    Value::from_integer(BigInt::from(k))
}

pub fn ratio(n: i64, d: i64) -> Value {
    Value::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(v: &Value) -> f64 {
    v.to_f64().unwrap_or_else(|| {
        // huge numerators/denominators: scale by bit length first
        let nb = v.numer().bits() as i64;
        let db = v.denom().bits() as i64;
        let shift = nb.max(db) - 60;
        let n = (v.numer() >> shift.max(0) as usize).to_f64().unwrap_or(0.0);
        let d = (v.denom() >> shift.max(0) as usize).to_f64().unwrap_or(1.0);
        n / d
    })
}

/// `|num/den − 1|` for `den > 0`.
pub fn deviation(num: &Value, den: &Value) -> Value {
    (num / den - Value::one()).abs()
}

pub fn is_zero(v: &Value) -> bool {
    v.is_zero()
}

/// Parse a decimal or fraction literal ("1e-6", "0.25", "3/4", "2^-20") exactly.
pub fn parse_value(s: &str) -> Option<Value> {
    let s = s.trim();
    if let Some(e) = s.strip_prefix("2^") {
        return e.parse::<i64>().ok().map(pow2);
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Value::new(n, d));
    }
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().ok()?),
        None => (s, 0),
    };
    let neg = mant.starts_with('-');
    let mant = mant.trim_start_matches(['-', '+']);
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    let digits: BigInt = format!("{ip}{fp}").parse().ok()?;
    let scale = exp - fp.len() as i64;
    let ten = BigInt::from(10);
    let v = if scale >= 0 {
        Value::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Value::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    Some(if neg { -v } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_literals() {
        assert_eq!(parse_value("1e-6").unwrap(), ratio(1, 1_000_000));
        assert_eq!(parse_value("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_value("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_value("2^-20").unwrap(), pow2(-20));
        assert_eq!(parse_value("-1.5").unwrap(), ratio(-3, 2));
        assert!(parse_value("x").is_none());
    }

    #[test]
    fn pow2_and_float() {
        assert_eq!(pow2(3), int(8));
        assert_eq!(pow2(-3), ratio(1, 8));
        assert!((to_f64(&pow2(-2000)) - 0.0).abs() < 1e-300);
        assert_eq!(deviation(&int(3), &int(4)), ratio(1, 4));
    }
}

/// Serde adapters writing exact values as `"n/d"` strings.
pub mod as_str {
    use super::Value;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Value, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Value, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_value(&s).ok_or_else(|| serde::de::Error::custom(format!("bad value {s:?}")))
    }
}

pub mod as_str_vec {
    use super::Value;
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &[Value], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }
}

pub mod as_str_opt {
    use super::Value;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<Value>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.collect_str(x),
            None => s.serialize_none(),
        }
    }
}
