//! JSON forms: rationals as `"p/q"` strings, algebraic numbers as
//! `{"poly": [c0, c1, ..], "isolator": ["p/q", "p/q"]}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::algebraic::AlgebraicNumber;
use super::interval::RatInterval;
use super::poly::IntPolynomial;
use super::rational::{format_rat, parse_rat};
use super::scalar::ExactScalar;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Small(i64),
    Big(String),
}

impl IntRepr {
    fn from_big(b: &BigInt) -> Self {
        match b.to_i64() {
            Some(v) if v.unsigned_abs() < (1u64 << 53) => IntRepr::Small(v),
            _ => IntRepr::Big(b.to_string()),
        }
    }

    fn to_big<E: serde::de::Error>(&self) -> Result<BigInt, E> {
        match self {
            IntRepr::Small(v) => Ok(BigInt::from(*v)),
            IntRepr::Big(s) => s.parse().map_err(|_| E::custom(format!("bad integer {s:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgRepr {
    poly: Vec<IntRepr>,
    isolator: [String; 2],
}

fn alg_to_repr(a: &AlgebraicNumber) -> AlgRepr {
    let iso = a.isolator();
    AlgRepr {
        poly: a.defining().coeffs().iter().map(IntRepr::from_big).collect(),
        isolator: [format_rat(&iso.lo), format_rat(&iso.hi)],
    }
}

fn repr_to_alg<E: serde::de::Error>(r: AlgRepr) -> Result<AlgebraicNumber, E> {
    let coeffs = r.poly.iter().map(|c| c.to_big()).collect::<Result<Vec<_>, E>>()?;
    let lo = parse_rat(&r.isolator[0]).map_err(E::custom)?;
    let hi = parse_rat(&r.isolator[1]).map_err(E::custom)?;
    if lo > hi {
        return Err(E::custom("isolator with lo > hi"));
    }
    let p = IntPolynomial::new(coeffs);
    if p.primitive() != p || !p.is_square_free() {
        return Err(E::custom("defining polynomial must be primitive and square-free"));
    }
    let a = AlgebraicNumber::new(p.clone(), RatInterval::new(lo, hi)).map_err(E::custom)?;
    if a.defining() != &p || a.isolator() != &RatInterval::new(parse_rat(&r.isolator[0]).unwrap(), parse_rat(&r.isolator[1]).unwrap()) {
        return Err(E::custom("non-canonical algebraic number"));
    }
    Ok(a)
}

impl Serialize for AlgebraicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        alg_to_repr(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgebraicNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        repr_to_alg(AlgRepr::deserialize(d)?)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Rat(String),
    Alg(AlgRepr),
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExactScalar::Rat(r) => s.serialize_str(&format_rat(r)),
            ExactScalar::Alg(_) => alg_to_repr(&self.to_algebraic()).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match ScalarRepr::deserialize(d)? {
            ScalarRepr::Rat(s) => Ok(ExactScalar::Rat(parse_rat(&s).map_err(D::Error::custom)?)),
            ScalarRepr::Alg(r) => {
                let a = repr_to_alg::<D::Error>(r)?;
                if a.as_rational().is_some() {
                    return Err(D::Error::custom("rational value must be written as \"p/q\""));
                }
                Ok(ExactScalar::from_algebraic(a))
            }
        }
    }
}

/// `serde(with = "rat_str")` for `BigRational` fields.
pub mod rat_str {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(D::Error::custom)
    }
}

/// `serde(with = "opt_rat_str")` for `Option<BigRational>` fields (`null` when absent).
pub mod opt_rat_str {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(r) => s.serialize_str(&format_rat(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| parse_rat(&s).map_err(D::Error::custom)).transpose()
    }
}

/// `serde(with = "vec_rat_str")` for `Vec<BigRational>` fields.
pub mod vec_rat_str {
    use super::*;

    pub fn serialize<S: Serializer>(x: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = x.iter().map(format_rat).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_rat(s).map_err(D::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::algebraic::isolate_real_roots;
    use crate::exactnum::rational::{int, rat};

    #[test]
    fn rational_round_trip() {
        let x = ExactScalar::from(rat(3, 1));
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, "\"3/1\"");
        let y: ExactScalar = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn algebraic_round_trip() {
        let p = IntPolynomial::from_i64(&[-1, 1, 1]);
        let g = isolate_real_roots(&p, &RatInterval::new(rat(1, 2), int(1))).unwrap().remove(0);
        let s = serde_json::to_string(&ExactScalar::from_algebraic(g.clone())).unwrap();
        let back: ExactScalar = serde_json::from_str(&s).unwrap();
        let a = back.to_algebraic();
        assert_eq!(a.defining(), g.defining());
        assert_eq!(a.isolator(), g.isolator());
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }

    #[test]
    fn rejects_bad_isolator() {
        // x^2 - 2 has no root in (0, 1)
        let bad = r#"{"poly":[-2,0,1],"isolator":["0/1","1/1"]}"#;
        assert!(serde_json::from_str::<ExactScalar>(bad).is_err());
        let extra = r#"{"poly":[-2,0,1],"isolator":["1/1","2/1"],"x":1}"#;
        assert!(serde_json::from_str::<ExactScalar>(extra).is_err());
    }
}
