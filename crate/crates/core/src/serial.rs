//! JSON representations of the exact types.
//!
//! Rationals are written as strings `"p/q"` (or `"p"`), so files round-trip
//! without loss. Polynomials list their terms in graded-lex order.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exactalg::{format_rat, parse_rat, Rat, RatMatrix};
use crate::polyring::{MatPoly, Monomial, Poly};
use crate::polytope::HPolyhedron;

/// `#[serde(with = ...)]` adapter for a single rational.
pub mod rat {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(D::Error::custom)
    }
}

/// `#[serde(with = ...)]` adapter for an optional rational (`null` when absent).
pub mod opt_rat {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rat(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rat>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_rat(&s).map_err(D::Error::custom))
            .transpose()
    }
}

/// `#[serde(with = ...)]` adapter for a vector of rationals.
pub mod rat_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rat))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_rat(s).map_err(D::Error::custom))
            .collect()
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.exponents().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Monomial::new(Vec::<u32>::deserialize(d)?))
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows())
            .map(|i| self.row(i).iter().map(format_rat).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        RatMatrix::from_rows(rows).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRepr {
    exp: Vec<u32>,
    #[serde(with = "rat")]
    coef: Rat,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyRepr {
    vars: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyRepr {
            vars: self.nvars(),
            terms: self
                .terms()
                .map(|(m, c)| TermRepr {
                    exp: m.exponents().to_vec(),
                    coef: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = PolyRepr::deserialize(d)?;
        Poly::from_terms(
            r.vars,
            r.terms.into_iter().map(|t| (Monomial::new(t.exp), t.coef)),
        )
        .map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatPolyRepr {
    t: usize,
    vars: usize,
    entries: Vec<Vec<Poly>>,
}

impl Serialize for MatPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatPolyRepr {
            t: self.size(),
            vars: self.nvars(),
            entries: self.to_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = MatPolyRepr::deserialize(d)?;
        if r.entries.len() != r.t {
            return Err(D::Error::custom(format!(
                "matrix has {} rows, expected {}",
                r.entries.len(),
                r.t
            )));
        }
        if let Some(p) = r.entries.iter().flatten().find(|p| p.nvars() != r.vars) {
            return Err(D::Error::custom(format!(
                "entry has {} variables, expected {}",
                p.nvars(),
                r.vars
            )));
        }
        MatPoly::from_rows(r.entries).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HPolyhedronRepr {
    n: usize,
    forms: Vec<Poly>,
}

impl Serialize for HPolyhedron {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        HPolyhedronRepr {
            n: self.dim(),
            forms: self.forms().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HPolyhedron {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = HPolyhedronRepr::deserialize(d)?;
        HPolyhedron::new(r.n, r.forms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    #[test]
    fn poly_round_trip_and_layout() {
        let p = Poly::affine(rat(-1, 2), &[rat(1, 1), rat(3, 4)]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(
            json,
            r#"{"vars":2,"terms":[{"exp":[0,0],"coef":"-1/2"},{"exp":[1,0],"coef":"1"},{"exp":[0,1],"coef":"3/4"}]}"#
        );
        assert_eq!(serde_json::from_str::<Poly>(&json).unwrap(), p);
    }

    #[test]
    fn matpoly_round_trip() {
        let f = crate::examples::square_matrix();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<MatPoly>(&json).unwrap(), f);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(serde_json::from_str::<Poly>(r#"{"vars":1,"terms":[{"exp":[1,0],"coef":"1"}]}"#).is_err());
        assert!(serde_json::from_str::<Poly>(r#"{"vars":1,"terms":[{"exp":[1],"coef":"1/0"}]}"#).is_err());
        let asym = r#"{"t":2,"vars":1,"entries":[
            [{"vars":1,"terms":[]},{"vars":1,"terms":[{"exp":[1],"coef":"1"}]}],
            [{"vars":1,"terms":[]},{"vars":1,"terms":[]}]]}"#;
        assert!(serde_json::from_str::<MatPoly>(asym).is_err());
    }

    #[test]
    fn polyhedron_round_trip() {
        let p = crate::examples::square();
        let json = serde_json::to_string(&p).unwrap();
        let back: HPolyhedron = serde_json::from_str(&json).unwrap();
        assert_eq!(back.forms(), p.forms());
    }
}
