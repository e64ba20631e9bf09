//! JSON encodings: exact rationals as `"num/den"` strings and certified values
//! as decimal midpoint/radius strings that reload bit-identically.

use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::{parse_rational, rational_to_string, Complex, Mag, Real};
use crate::error::{Error, Result};

pub mod rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }
}

pub mod rational_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(rational_to_string).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let strings = Vec::<String>::deserialize(d)?;
        strings
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}"))))
            .collect()
    }
}

fn mag_to_string(m: &Mag) -> String {
    if !m.is_finite() {
        return "inf".into();
    }
    m.to_float(53).to_string_radix(10, None)
}

fn mag_from_str(s: &str) -> Option<Mag> {
    if s == "inf" {
        return Some(Mag::inf());
    }
    let f = Float::with_val(53, Float::parse(s).ok()?);
    Some(Mag::from_float(&f))
}

fn float_from_str(s: &str, prec: u32) -> Option<Float> {
    Some(Float::with_val(prec, Float::parse(s).ok()?))
}

/// Serialized certified complex value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedJson {
    pub mid_re: String,
    pub mid_im: String,
    /// Bound on `|z - mid|`.
    pub radius: String,
    pub radius_re: String,
    pub radius_im: String,
    pub prec: u32,
}

impl From<&Complex> for CertifiedJson {
    fn from(z: &Complex) -> Self {
        CertifiedJson {
            mid_re: z.re.mid().to_string_radix(10, None),
            mid_im: z.im.mid().to_string_radix(10, None),
            radius: mag_to_string(&z.rad()),
            radius_re: mag_to_string(&z.re.rad()),
            radius_im: mag_to_string(&z.im.rad()),
            prec: z.prec(),
        }
    }
}

impl CertifiedJson {
    pub fn to_complex(&self) -> Result<Complex> {
        let bad = |what: &str| Error::invalid(format!("malformed certified value: {what}"));
        let re = float_from_str(&self.mid_re, self.prec).ok_or_else(|| bad("mid_re"))?;
        let im = float_from_str(&self.mid_im, self.prec).ok_or_else(|| bad("mid_im"))?;
        let rr = mag_from_str(&self.radius_re).ok_or_else(|| bad("radius_re"))?;
        let ri = mag_from_str(&self.radius_im).ok_or_else(|| bad("radius_im"))?;
        Ok(Complex::new(Real::with_rad(re, rr), Real::with_rad(im, ri)))
    }
}

pub mod complex_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex], s: S) -> std::result::Result<S::Ok, S::Error> {
        let items: Vec<CertifiedJson> = v.iter().map(CertifiedJson::from).collect();
        items.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Complex>, D::Error> {
        let items = Vec::<CertifiedJson>::deserialize(d)?;
        items
            .iter()
            .map(|c| c.to_complex().map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod complex {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex, s: S) -> std::result::Result<S::Ok, S::Error> {
        CertifiedJson::from(z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Complex, D::Error> {
        CertifiedJson::deserialize(d)?
            .to_complex()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certified_round_trip_is_exact() {
        let mut z = Complex::from_rationals(256, &Rational::from((1, 3)), &Rational::from((-22, 7)));
        z.re.add_error(Mag::pow2(-700));
        let z = &z * &z;
        let json = CertifiedJson::from(&z);
        let back = json.to_complex().unwrap();
        assert_eq!(back, z);
    }
}
