//! Serde adapters: scalars as `[re, im]`, vectors as lists of scalars,
//! matrices as `{"rows", "cols", "data"}` in row-major order.

use crate::numerics::{CMatrix, CVector, C64};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub fn scalar_pair(z: &C64) -> [f64; 2] {
    [z.re, z.im]
}

fn from_pair<E: serde::de::Error>(p: [f64; 2]) -> Result<C64, E> {
    crate::numerics::complex(p[0], p[1]).map_err(|e| E::custom(e.to_string()))
}

pub mod scalar {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        scalar_pair(z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        from_pair(<[f64; 2]>::deserialize(d)?)
    }
}

pub mod vector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &CVector, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(scalar_pair).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CVector, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        let entries = pairs.into_iter().map(from_pair).collect::<Result<Vec<_>, _>>()?;
        Ok(CVector::from_vec(entries))
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        let mut data = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                data.push(scalar_pair(&m[(r, c)]));
            }
        }
        MatrixRepr { rows: m.nrows(), cols: m.ncols(), data }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        if repr.data.len() != repr.rows * repr.cols {
            return Err(D::Error::custom(format!(
                "matrix data has {} entries, expected {}",
                repr.data.len(),
                repr.rows * repr.cols
            )));
        }
        let entries = repr.data.into_iter().map(from_pair).collect::<Result<Vec<_>, _>>()?;
        Ok(CMatrix::from_row_slice(repr.rows, repr.cols, &entries))
    }
}

pub mod opt_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &Option<CMatrix>, s: S) -> Result<S::Ok, S::Error> {
        match m {
            Some(m) => super::matrix::serialize(m, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<CMatrix>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "super::matrix")] CMatrix);
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

struct Canonical;

impl serde_json::ser::Formatter for Canonical {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        write!(w, "{value:.16e}")
    }
}

/// Compact JSON with sorted object keys and every float printed with 17
/// significant digits, so equal values always give identical bytes.
pub fn to_canonical_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let value = serde_json::to_value(value)?;
    let mut out = Vec::new();
    value.serialize(&mut serde_json::Serializer::with_formatter(&mut out, Canonical))?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}
