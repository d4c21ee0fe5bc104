//! JSON encodings: a scalar is the string "num/den" (integers are also
//! accepted on input), a series is its coefficient list, a bivariate
//! polynomial is its list of x-rows and a germ is its list of components.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::bipoly::BiPoly;
use super::germ::MultiGerm;
use super::scalar::{format_scalar, parse_scalar, Scalar};
use super::series::TruncSeries;

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarText {
    Text(String),
    Int(i64),
}

/// Serde adapter for a single `Scalar` field (`#[serde(with = ...)]`).
pub mod scalar {
    use super::*;

    pub fn serialize<S: Serializer>(s: &Scalar, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format_scalar(s))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Scalar, D::Error> {
        match ScalarText::deserialize(de)? {
            ScalarText::Text(t) => parse_scalar(&t).map_err(D::Error::custom),
            ScalarText::Int(k) => Ok(super::super::scalar::int(k)),
        }
    }
}

/// Serde adapter for `Vec<Scalar>`.
pub mod scalars {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct One(#[serde(with = "super::scalar")] Scalar);

    pub fn serialize<S: Serializer>(v: &[Scalar], ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(v.iter().map(format_scalar))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Scalar>, D::Error> {
        let raw: Vec<One> = Vec::deserialize(de)?;
        Ok(raw.into_iter().map(|o| o.0).collect())
    }
}

impl Serialize for TruncSeries {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        scalars::serialize(self.coeffs(), ser)
    }
}

impl<'de> Deserialize<'de> for TruncSeries {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let c = scalars::deserialize(de)?;
        TruncSeries::new(c).map_err(D::Error::custom)
    }
}

impl Serialize for BiPoly {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<TruncSeries> = (0..self.xdeg()).map(|a| self.x_row(a)).collect();
        rows.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BiPoly {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let rows: Vec<TruncSeries> = Vec::deserialize(de)?;
        BiPoly::from_rows(&rows).map_err(D::Error::custom)
    }
}

impl<C: Serialize> Serialize for MultiGerm<C> {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        self.components.serialize(ser)
    }
}

impl<'de, C: Deserialize<'de>> Deserialize<'de> for MultiGerm<C> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        Ok(MultiGerm::new(Vec::deserialize(de)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::frac;

    #[test]
    fn series_round_trip() {
        let s = TruncSeries::new(vec![frac(1, 2), frac(-3, 1), frac(0, 1)]).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"["1/2","-3/1","0/1"]"#);
        assert_eq!(serde_json::from_str::<TruncSeries>(&text).unwrap(), s);
        let loose: TruncSeries = serde_json::from_str(r#"[1, "-3", "0/5"]"#).unwrap();
        assert_eq!(loose, TruncSeries::from_ints(&[1, -3, 0]));
    }

    #[test]
    fn bipoly_rows() {
        let rows = vec![
            TruncSeries::from_ints(&[1, 2]),
            TruncSeries::from_ints(&[0, 5]),
        ];
        let b = BiPoly::from_rows(&rows).unwrap();
        assert_eq!(*b.coeff(1, 1), frac(5, 1));
        let text = serde_json::to_string(&b).unwrap();
        assert_eq!(serde_json::from_str::<BiPoly>(&text).unwrap(), b);
    }

    #[test]
    fn bad_scalar_is_rejected() {
        assert!(serde_json::from_str::<TruncSeries>(r#"["1/0"]"#).is_err());
        assert!(serde_json::from_str::<TruncSeries>(r#"[]"#).is_err());
        assert!(serde_json::from_str::<TruncSeries>(r#"["x"]"#).is_err());
    }
}
