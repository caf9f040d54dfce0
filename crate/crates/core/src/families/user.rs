//! Families given as polynomial expressions in named parameters.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::template::{MapTemplate, Template};
use super::Side;
use crate::error::{Error, Result};
use crate::exactnum::MPoly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserMap {
    pub label: String,
    pub ratio: String,
    pub t: Vec<String>,
}

/// Maps of the `U` and `V` sides in their own parameters; the joint system
/// is the union by label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserFamily {
    pub dim: usize,
    pub u_params: Vec<String>,
    pub v_params: Vec<String>,
    pub u_maps: Vec<UserMap>,
    pub v_maps: Vec<UserMap>,
}

impl UserFamily {
    pub(crate) fn template(&self, side: Side) -> Result<Template> {
        let build = |maps: &[UserMap], vars: &[String]| -> Result<Vec<MapTemplate>> {
            maps.iter()
                .map(|m| {
                    if m.t.len() != self.dim {
                        return Err(Error::DimensionMismatch(self.dim, m.t.len()));
                    }
                    Ok(MapTemplate {
                        label: m.label.clone(),
                        ratio: parse_poly(&m.ratio, vars)?,
                        t: m.t.iter().map(|s| parse_poly(s, vars)).collect::<Result<_>>()?,
                    })
                })
                .collect()
        };
        let joint: Vec<String> = self.u_params.iter().chain(&self.v_params).cloned().collect();
        let maps = match side {
            Side::U => build(&self.u_maps, &self.u_params)?,
            Side::V => build(&self.v_maps, &self.v_params)?,
            Side::Joint => {
                let mut all = build(&self.u_maps, &joint)?;
                for m in build(&self.v_maps, &joint)? {
                    match all.iter().find(|x| x.label == m.label) {
                        Some(x) if *x == m => {}
                        Some(_) => return Err(Error::InvalidInput(format!("label `{}` names two different maps", m.label))),
                        None => all.push(m),
                    }
                }
                all
            }
        };
        let nvars = match side {
            Side::U => self.u_params.len(),
            Side::V => self.v_params.len(),
            Side::Joint => joint.len(),
        };
        Ok(Template { nvars, dim: self.dim, maps })
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Num(cs[st..i].iter().collect::<String>().parse().unwrap()));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected `{c}` in `{s}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MPoly> {
        let neg = self.eat('-');
        let mut acc = self.term()?;
        if neg {
            acc = acc.neg();
        }
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MPoly> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MPoly> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(k)) => {
                    self.pos += 1;
                    let k: u32 = k.try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
                    return Ok(base.pow(k));
                }
                _ => return Err(Error::Parse("expected an integer exponent".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MPoly> {
        let n = self.vars.len();
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(p)) => {
                self.pos += 1;
                if self.eat('/') {
                    let Some(Tok::Num(q)) = self.toks.get(self.pos).cloned() else {
                        return Err(Error::Parse("expected a denominator".into()));
                    };
                    self.pos += 1;
                    if q == BigInt::from(0) {
                        return Err(Error::DivisionByZero);
                    }
                    return Ok(MPoly::constant(n, BigRational::new(p, q)));
                }
                Ok(MPoly::constant(n, BigRational::from_integer(p)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let i = self.vars.iter().position(|v| *v == name).ok_or_else(|| Error::Parse(format!("unknown parameter `{name}`")))?;
                Ok(MPoly::var(n, i))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                Ok(e)
            }
            _ => Err(Error::Parse("expected a number, parameter or `(`".into())),
        }
    }
}

/// Parses a polynomial such as `1/3*u + 2*u*v^2 - 1`.
pub fn parse_poly(s: &str, vars: &[String]) -> Result<MPoly> {
    let mut p = Parser { toks: lex(s)?, pos: 0, vars };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input in `{s}`")));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::rat;

    #[test]
    fn parses() {
        let vars = vec!["u".to_string(), "v".to_string()];
        let p = parse_poly("1/3*(u + 1) - v^2*2", &vars).unwrap();
        assert_eq!(p.eval_rat(&[rat(1, 2), rat(1, 1)]), rat(1, 2) - rat(2, 1));
        assert!(parse_poly("w", &vars).is_err());
        assert!(parse_poly("u +", &vars).is_err());
        assert_eq!(parse_poly("-u", &vars).unwrap(), MPoly::var(2, 0).neg());
    }
}
