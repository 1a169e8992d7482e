//! Serde adapters encoding complex scalars as `[re, im]` pairs.

pub mod scalar {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::banded::{pair_to_scalar, scalar_to_pair, Scalar};

    pub fn serialize<S: Serializer>(v: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        scalar_to_pair(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        <[f64; 2]>::deserialize(d).map(pair_to_scalar)
    }
}

pub mod scalars {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::banded::{pair_to_scalar, scalar_to_pair, Scalar};

    pub fn serialize<S: Serializer>(v: &[Scalar], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .copied()
            .map(scalar_to_pair)
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Scalar>, D::Error> {
        Ok(Vec::<[f64; 2]>::deserialize(d)?
            .into_iter()
            .map(pair_to_scalar)
            .collect())
    }
}
