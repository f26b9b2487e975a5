//! JSON conventions shared by every report: big integers as decimal strings,
//! rationals as `"n/d"` strings, and a `schema` tag on top-level records.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Version tag written into every top-level JSON record.
pub const SCHEMA: &str = "wreathgen/1";

pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.trim().parse().map_err(|_| Error::input(format!("bad rational {s:?}")))?;
    let d: BigInt = d.trim().parse().map_err(|_| Error::input(format!("bad rational {s:?}")))?;
    if d == BigInt::from(0) {
        return Err(Error::input(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

/// Pretty JSON with a trailing newline. Field order follows struct order, so
/// equal values always serialize to equal bytes.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::invariant(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// `#[serde(with = "crate::io::ratio")]`
pub mod ratio {
    use super::*;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        ratio_string(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_ratio(&s).map_err(serde::de::Error::custom)
    }
}

pub mod opt_ratio {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        r.as_ref().map(ratio_string).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<BigRational>, D::Error> {
        Option::<String>::deserialize(d)?.map(|s| parse_ratio(&s).map_err(serde::de::Error::custom)).transpose()
    }
}

/// `#[serde(with = "crate::io::uint")]`
pub mod uint {
    use super::*;

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
        n.to_string().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub mod opt_uint {
    use super::*;

    pub fn serialize<S: Serializer>(n: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
        n.as_ref().map(|n| n.to_string()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<BigUint>, D::Error> {
        Option::<String>::deserialize(d)?.map(|s| s.parse().map_err(serde::de::Error::custom)).transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        let r = BigRational::new(38.into(), 60.into());
        assert_eq!(ratio_string(&r), "19/30");
        assert_eq!(parse_ratio("19/30").unwrap(), r);
        assert_eq!(parse_ratio("3").unwrap(), BigRational::from_integer(3.into()));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
    }
}
