//! Serde adapters for big integers in JSON.
//!
//! Integers that fit in 64 bits are written as JSON numbers, larger ones as
//! decimal strings; both forms are accepted on input.

use num_bigint::{BigInt, BigUint};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NumOrStr {
    I(i64),
    U(u64),
    S(String),
}

fn to_repr(x: &BigInt) -> NumOrStr {
    if let Ok(v) = i64::try_from(x) {
        NumOrStr::I(v)
    } else {
        NumOrStr::S(x.to_string())
    }
}

fn from_repr<E: serde::de::Error>(r: NumOrStr) -> Result<BigInt, E> {
    match r {
        NumOrStr::I(v) => Ok(BigInt::from(v)),
        NumOrStr::U(v) => Ok(BigInt::from(v)),
        NumOrStr::S(s) => s.parse().map_err(|_| E::custom(format!("bad integer {s:?}"))),
    }
}

/// BigInt as number-or-string.
pub mod bigint {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        to_repr(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        from_repr(NumOrStr::deserialize(d)?)
    }
}

/// BigInt always as a decimal string.
pub mod bigint_str {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        from_repr(NumOrStr::deserialize(d)?)
    }
}

/// BigUint as number-or-string.
pub mod biguint {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        to_repr(&BigInt::from(x.clone())).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let v = from_repr::<D::Error>(NumOrStr::deserialize(d)?)?;
        BigUint::try_from(v).map_err(|_| D::Error::custom("negative value"))
    }
}

/// Vec<BigInt> as an array of number-or-string.
pub mod bigint_vec {
    use super::*;

    pub fn serialize<S: Serializer>(x: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        x.iter().map(to_repr).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<NumOrStr>::deserialize(d)?
            .into_iter()
            .map(from_repr)
            .collect()
    }
}

/// Vec<Vec<BigInt>> (e.g. a list of coefficient arrays).
pub mod bigint_vec_vec {
    use super::*;

    pub fn serialize<S: Serializer>(x: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        x.iter()
            .map(|v| v.iter().map(to_repr).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        Vec::<Vec<NumOrStr>>::deserialize(d)?
            .into_iter()
            .map(|v| v.into_iter().map(from_repr).collect())
            .collect()
    }
}
