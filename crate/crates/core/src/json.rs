//! Serde adapters that write integers of any size as plain JSON numbers.

use serde::de::Error as _;
use serde::ser::{Error as _, SerializeSeq};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::Int;

/// Wrapper giving any [`Int`] a JSON-number representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JsonInt<T>(pub T);

impl<T: Int> Serialize for JsonInt<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n: serde_json::Number = self.0.to_string().parse().map_err(S::Error::custom)?;
        n.serialize(s)
    }
}

impl<'de, T: Int> Deserialize<'de> for JsonInt<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let n = serde_json::Number::deserialize(d)?;
        let text = n.to_string();
        T::parse_decimal(&text)
            .map(JsonInt)
            .ok_or_else(|| D::Error::custom(format!("not an integer of the expected width: {text}")))
    }
}

pub mod int {
    use super::*;

    pub fn serialize<T: Int, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        JsonInt(v.clone()).serialize(s)
    }

    pub fn deserialize<'de, T: Int, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        JsonInt::<T>::deserialize(d).map(|j| j.0)
    }
}

pub mod int_vec {
    use super::*;

    pub fn serialize<T: Int, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&JsonInt(x.clone()))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, T: Int, D: Deserializer<'de>>(d: D) -> Result<Vec<T>, D::Error> {
        Vec::<JsonInt<T>>::deserialize(d).map(|v| v.into_iter().map(|j| j.0).collect())
    }
}
