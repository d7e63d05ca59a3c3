//! Exact arithmetic expressions over the integers `q, l, n1, n2`, the
//! lengths `L1, L2, L3` and `pi`, evaluated to Laurent polynomials in π.
//!
//! Grammar: sums and differences of products and quotients of powers.
//! Division is allowed by anything that evaluates to a single monomial.

use crate::pipoly::PiPoly;
use crate::rational::{parse_q, Q};
use crate::trig::DomainLengths;
use std::collections::BTreeMap;

#[derive(Clone, Debug, Default)]
pub struct Env {
    pub ints: BTreeMap<String, i64>,
    pub lengths: Option<DomainLengths>,
}

impl Env {
    pub fn new(lengths: &DomainLengths) -> Self {
        Env {
            ints: BTreeMap::new(),
            lengths: Some(lengths.clone()),
        }
    }

    pub fn with(mut self, name: &str, v: i64) -> Self {
        self.ints.insert(name.to_string(), v);
        self
    }

    pub fn set(&mut self, name: &str, v: i64) {
        self.ints.insert(name.to_string(), v);
    }

    fn lookup(&self, name: &str) -> Result<PiPoly, String> {
        match name {
            "pi" => Ok(PiPoly::pi()),
            "L1" | "L2" | "L3" => {
                let l = self.lengths.as_ref().ok_or("lengths not bound")?;
                let axis = name[1..].parse::<usize>().unwrap() - 1;
                Ok(PiPoly::rational(l.get(axis).clone()))
            }
            _ => self
                .ints
                .get(name)
                .map(|v| PiPoly::rational(Q::from_integer((*v).into())))
                .ok_or_else(|| format!("unbound variable `{name}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            out.push(Tok::Num(cs[st..i].iter().collect()));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(format!("unexpected character `{c}` in `{s}`"));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    env: &'a Env,
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

    fn expr(&mut self) -> Result<PiPoly, String> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<PiPoly, String> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                acc = acc
                    .div_monomial(&d)
                    .ok_or_else(|| format!("cannot divide by `{d}`"))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<PiPoly, String> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<PiPoly, String> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let e = match self.toks.get(self.pos) {
                Some(Tok::Num(n)) => n
                    .parse::<u32>()
                    .map_err(|_| format!("bad exponent `{n}`"))?,
                t => return Err(format!("expected exponent, found {t:?}")),
            };
            self.pos += 1;
            let mut r = PiPoly::one();
            for _ in 0..e {
                r = r * base.clone();
            }
            if neg {
                r = PiPoly::one()
                    .div_monomial(&r)
                    .ok_or("negative power of a non-monomial")?;
            }
            return Ok(r);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<PiPoly, String> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        match t {
            Some(Tok::Num(n)) => Ok(PiPoly::rational(parse_q(&n)?)),
            Some(Tok::Ident(id)) => self.env.lookup(&id),
            Some(Tok::Op('(')) => {
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err("missing `)`".into());
                }
                Ok(v)
            }
            other => Err(format!("unexpected token {other:?}")),
        }
    }
}

pub fn eval(s: &str, env: &Env) -> Result<PiPoly, String> {
    let toks = lex(s)?;
    let mut p = Parser { toks, pos: 0, env };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(format!("trailing input in `{s}`"));
    }
    Ok(v)
}

/// Evaluates to a nonnegative integer (index entries).
pub fn eval_index(s: &str, env: &Env) -> Result<u32, String> {
    let v = eval(s, env)?;
    let r = v
        .as_rational()
        .ok_or_else(|| format!("`{s}` is not rational"))?;
    if !r.is_integer() || r < Q::from_integer(0.into()) {
        return Err(format!("`{s}` = {r} is not a nonnegative integer"));
    }
    Ok(r.to_integer()
        .try_into()
        .map_err(|_| format!("`{s}` too large"))?)
}

pub fn eval_rational(s: &str, env: &Env) -> Result<Q, String> {
    let v = eval(s, env)?;
    v.as_rational().ok_or_else(|| format!("`{s}` involves pi"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    #[test]
    fn arithmetic() {
        let l = DomainLengths::new(frac(2, 3), q(1), frac(3, 2)).unwrap();
        let env = Env::new(&l).with("q", 4);
        assert_eq!(
            eval("-pi/2*L1*q^2", &env).unwrap(),
            PiPoly::monomial(frac(-16, 3), 1)
        );
        assert_eq!(eval("(q+1)*(q-1)", &env).unwrap(), PiPoly::rational(q(15)));
        assert_eq!(
            eval("32/pi^2*L2", &env).unwrap(),
            PiPoly::monomial(q(32), -2)
        );
        assert_eq!(eval("1 - -2", &env).unwrap(), PiPoly::rational(q(3)));
        assert_eq!(eval("pi^-1", &env).unwrap(), PiPoly::monomial(q(1), -1));
        assert_eq!(eval_index("q+1", &env).unwrap(), 5);
        assert!(eval("x", &env).is_err());
        assert!(eval("1/(1+pi)", &env).is_err());
        assert!(eval("(1", &env).is_err());
    }
}
