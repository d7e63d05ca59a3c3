//! Laurent polynomials in π with rational coefficients.
//!
//! Coefficients of trig fields are mostly a single rational times a power of
//! π; sums of powers only show up in inner products of fields whose x1/x2
//! parities do not match, where the half-range sin·cos integrals carry a 1/π.

use crate::rational::{fmt_q, to_f64, Q};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct PiPoly {
    // sorted by exponent, no zero coefficients
    terms: Vec<(i32, Q)>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct PiTerm {
    pub coeff: String,
    pub pi_pow: i32,
}

impl PiPoly {
    pub fn zero() -> Self {
        PiPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::rational(Q::one())
    }

    pub fn rational(c: Q) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: Q, pi_pow: i32) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            PiPoly {
                terms: vec![(pi_pow, c)],
            }
        }
    }

    pub fn pi() -> Self {
        Self::monomial(Q::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(i32, Q)] {
        &self.terms
    }

    /// `Some((c, p))` when the value is `c·π^p` (zero gives `(0, 0)`).
    pub fn as_monomial(&self) -> Option<(Q, i32)> {
        match self.terms.len() {
            0 => Some((Q::zero(), 0)),
            1 => Some((self.terms[0].1.clone(), self.terms[0].0)),
            _ => None,
        }
    }

    /// The rational value when no π appears.
    pub fn as_rational(&self) -> Option<Q> {
        match self.as_monomial() {
            Some((c, 0)) => Some(c),
            Some((c, _)) if c.is_zero() => Some(c),
            _ => None,
        }
    }

    pub fn coeff(&self, pi_pow: i32) -> Q {
        self.terms
            .iter()
            .find(|(p, _)| *p == pi_pow)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Q::zero)
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        PiPoly {
            terms: self.terms.iter().map(|(p, x)| (*p, x * c)).collect(),
        }
    }

    pub fn shift_pi(&self, by: i32) -> Self {
        PiPoly {
            terms: self
                .terms
                .iter()
                .map(|(p, x)| (p + by, x.clone()))
                .collect(),
        }
    }

    pub fn add_assign_ref(&mut self, other: &PiPoly) {
        if other.is_zero() {
            return;
        }
        if self.terms.len() == 1 && other.terms.len() == 1 && self.terms[0].0 == other.terms[0].0 {
            let c = &mut self.terms[0].1;
            *c += &other.terms[0].1;
            if c.is_zero() {
                self.terms.clear();
            }
            return;
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = std::mem::take(&mut self.terms);
        while i < a.len() || j < other.terms.len() {
            if j == other.terms.len() || (i < a.len() && a[i].0 < other.terms[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || other.terms[j].0 < a[i].0 {
                out.push(other.terms[j].clone());
                j += 1;
            } else {
                let c = &a[i].1 + &other.terms[j].1;
                if !c.is_zero() {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        self.terms = out;
    }

    pub fn mul_ref(&self, other: &PiPoly) -> PiPoly {
        if self.is_zero() || other.is_zero() {
            return PiPoly::zero();
        }
        if self.terms.len() == 1 && other.terms.len() == 1 {
            let (p, a) = &self.terms[0];
            let (r, b) = &other.terms[0];
            return PiPoly {
                terms: vec![(p + r, a * b)],
            };
        }
        let mut out = PiPoly::zero();
        for (p, a) in &self.terms {
            for (r, b) in &other.terms {
                out.add_assign_ref(&PiPoly::monomial(a * b, p + r));
            }
        }
        out
    }

    /// Exact division by a nonzero monomial-valued polynomial.
    pub fn div_monomial(&self, d: &PiPoly) -> Option<PiPoly> {
        let (c, p) = d.as_monomial()?;
        if c.is_zero() {
            return None;
        }
        let inv = Q::one() / c;
        Some(self.scale(&inv).shift_pi(-p))
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(p, c)| to_f64(c) * std::f64::consts::PI.powi(*p))
            .sum()
    }

    pub fn to_terms(&self) -> Vec<PiTerm> {
        self.terms
            .iter()
            .map(|(p, c)| PiTerm {
                coeff: fmt_q(c),
                pi_pow: *p,
            })
            .collect()
    }

    pub fn from_terms(ts: &[PiTerm]) -> Result<PiPoly, String> {
        let mut out = PiPoly::zero();
        for t in ts {
            out.add_assign_ref(&PiPoly::monomial(
                crate::rational::parse_q(&t.coeff)?,
                t.pi_pow,
            ));
        }
        Ok(out)
    }
}

impl From<Q> for PiPoly {
    fn from(c: Q) -> Self {
        PiPoly::rational(c)
    }
}

impl Add for &PiPoly {
    type Output = PiPoly;
    fn add(self, o: &PiPoly) -> PiPoly {
        let mut r = self.clone();
        r.add_assign_ref(o);
        r
    }
}

impl Add for PiPoly {
    type Output = PiPoly;
    fn add(mut self, o: PiPoly) -> PiPoly {
        self.add_assign_ref(&o);
        self
    }
}

impl Neg for &PiPoly {
    type Output = PiPoly;
    fn neg(self) -> PiPoly {
        PiPoly {
            terms: self.terms.iter().map(|(p, c)| (*p, -c)).collect(),
        }
    }
}

impl Neg for PiPoly {
    type Output = PiPoly;
    fn neg(self) -> PiPoly {
        -&self
    }
}

impl Sub for &PiPoly {
    type Output = PiPoly;
    fn sub(self, o: &PiPoly) -> PiPoly {
        self + &(-o)
    }
}

impl Sub for PiPoly {
    type Output = PiPoly;
    fn sub(self, o: PiPoly) -> PiPoly {
        &self - &o
    }
}

impl Mul for &PiPoly {
    type Output = PiPoly;
    fn mul(self, o: &PiPoly) -> PiPoly {
        self.mul_ref(o)
    }
}

impl Mul for PiPoly {
    type Output = PiPoly;
    fn mul(self, o: PiPoly) -> PiPoly {
        self.mul_ref(&o)
    }
}

impl fmt::Display for PiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match *p {
                0 => write!(f, "{}", fmt_q(c))?,
                1 => write!(f, "{}*pi", fmt_q(c))?,
                _ => write!(f, "{}*pi^{}", fmt_q(c), p)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    #[test]
    fn arithmetic() {
        let a = PiPoly::monomial(frac(1, 2), 1);
        let b = PiPoly::monomial(q(3), -1);
        let s = &a + &b;
        assert_eq!(s.terms().len(), 2);
        assert_eq!(s.coeff(1), frac(1, 2));
        let z = &s - &s;
        assert!(z.is_zero());
        let p = &a * &b;
        assert_eq!(p.as_monomial(), Some((frac(3, 2), 0)));
        assert!(
            (s.to_f64() - (0.5 * std::f64::consts::PI + 3.0 / std::f64::consts::PI)).abs() < 1e-12
        );
    }

    #[test]
    fn roundtrip_terms() {
        let a = &PiPoly::monomial(frac(-7, 3), 2) + &PiPoly::rational(q(5));
        assert_eq!(PiPoly::from_terms(&a.to_terms()).unwrap(), a);
        assert_eq!(a.to_string(), "5 + -7/3*pi^2");
    }
}
