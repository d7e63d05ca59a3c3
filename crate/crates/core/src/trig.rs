//! Exact calculus on separable trig polynomials over the cylinder
//! `(0,L1) x (0,L2) x (periodic, length 2 L3)`.
//!
//! A scalar is a finite sum of `c · f1(k1 π x1/L1) f2(k2 π x2/L2) f3(k3 π x3/L3)`
//! with `f_i ∈ {sin, cos}`, `k_i ≥ 0` and `c` a Laurent polynomial in π.

use crate::pipoly::{PiPoly, PiTerm};
use crate::rational::{fmt_q, parse_q, q, to_f64, Q};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt;

pub type Index3 = [u32; 3];

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Factor {
    Sin,
    Cos,
}

pub type Pattern = [Factor; 3];

use Factor::{Cos, Sin};

pub fn pattern_str(p: &Pattern) -> String {
    p.iter()
        .map(|f| if *f == Sin { 'S' } else { 'C' })
        .collect()
}

pub fn parse_pattern(s: &str) -> Result<Pattern, String> {
    let cs: Vec<char> = s.chars().collect();
    if cs.len() != 3 {
        return Err(format!("factor pattern {s:?} must have 3 letters"));
    }
    let mut p = [Cos; 3];
    for (i, c) in cs.iter().enumerate() {
        p[i] = match c {
            'S' | 's' => Sin,
            'C' | 'c' => Cos,
            _ => return Err(format!("bad factor letter {c:?} in {s:?}")),
        };
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DomainLengths {
    l: [Q; 3],
    lf: [f64; 3],
}

impl DomainLengths {
    pub fn new(l1: Q, l2: Q, l3: Q) -> Result<Self, String> {
        let l = [l1, l2, l3];
        if l.iter().any(|x| !x.is_positive()) {
            return Err("domain lengths must be strictly positive".into());
        }
        let lf = [to_f64(&l[0]), to_f64(&l[1]), to_f64(&l[2])];
        Ok(DomainLengths { l, lf })
    }

    pub fn unit() -> Self {
        Self::new(q(1), q(1), q(1)).unwrap()
    }

    pub fn parse(parts: &[&str]) -> Result<Self, String> {
        if parts.len() != 3 {
            return Err(format!("expected 3 lengths, got {}", parts.len()));
        }
        Self::new(parse_q(parts[0])?, parse_q(parts[1])?, parse_q(parts[2])?)
    }

    /// Zero-based axis.
    pub fn get(&self, axis: usize) -> &Q {
        &self.l[axis]
    }

    pub fn as_array(&self) -> &[Q; 3] {
        &self.l
    }

    pub fn f64(&self, axis: usize) -> f64 {
        self.lf[axis]
    }

    pub fn to_strings(&self) -> [String; 3] {
        [fmt_q(&self.l[0]), fmt_q(&self.l[1]), fmt_q(&self.l[2])]
    }
}

impl fmt::Display for DomainLengths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.to_strings();
        write!(f, "({}, {}, {})", s[0], s[1], s[2])
    }
}

impl Serialize for DomainLengths {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DomainLengths {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        let r: Vec<&str> = v.iter().map(|s| s.as_str()).collect();
        DomainLengths::parse(&r).map_err(serde::de::Error::custom)
    }
}

type Key = (Index3, Pattern);

/// Canonical scalar trig polynomial. Terms are keyed and ordered by
/// `(index, pattern)`; zero coefficients and `sin(0)` factors never appear.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct TrigScalar {
    terms: BTreeMap<Key, PiPoly>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrigMonomial {
    pub k: Index3,
    pub factors: Pattern,
    pub coeff: PiPoly,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct MonomialJson {
    pub factors: String,
    pub k: [u32; 3],
    pub coeff: String,
    pub pi_pow: i32,
}

// one-dimensional product-to-sum: f(a)·g(b) = Σ sign/2 · h(c)
fn product_1d(fa: Factor, a: u32, fb: Factor, b: u32) -> [(Factor, u32, i8); 2] {
    let d = a.abs_diff(b);
    match (fa, fb) {
        (Sin, Sin) => [(Cos, d, 1), (Cos, a + b, -1)],
        (Cos, Cos) => [(Cos, d, 1), (Cos, a + b, 1)],
        (Sin, Cos) => [(Sin, a + b, 1), (Sin, d, if a >= b { 1 } else { -1 })],
        (Cos, Sin) => [(Sin, a + b, 1), (Sin, d, if b >= a { 1 } else { -1 })],
    }
}

impl TrigScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: PiPoly) -> Self {
        let mut s = Self::zero();
        s.add_term([0, 0, 0], [Cos; 3], c);
        s
    }

    pub fn monomial(k: Index3, factors: Pattern, coeff: PiPoly) -> Self {
        let mut s = Self::zero();
        s.add_term(k, factors, coeff);
        s
    }

    pub fn add_term(&mut self, k: Index3, factors: Pattern, coeff: PiPoly) {
        if coeff.is_zero() || (0..3).any(|i| factors[i] == Sin && k[i] == 0) {
            return;
        }
        match self.terms.entry((k, factors)) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_assign_ref(&coeff);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Index3, &Pattern, &PiPoly)> {
        self.terms.iter().map(|((k, p), c)| (k, p, c))
    }

    pub fn monomials(&self) -> Vec<TrigMonomial> {
        self.iter()
            .map(|(k, p, c)| TrigMonomial {
                k: *k,
                factors: *p,
                coeff: c.clone(),
            })
            .collect()
    }

    pub fn coeff(&self, k: Index3, factors: Pattern) -> PiPoly {
        self.terms.get(&(k, factors)).cloned().unwrap_or_default()
    }

    pub fn max_index(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|(k, _)| k.iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Rebuilds the term map through `add_term`; a no-op on values produced by
    /// this module.
    pub fn normalize(&self) -> Self {
        let mut s = Self::zero();
        for (k, p, c) in self.iter() {
            s.add_term(*k, *p, c.clone());
        }
        s
    }

    pub fn add(&self, other: &TrigScalar) -> TrigScalar {
        let mut s = self.clone();
        s.add_assign(other);
        s
    }

    pub fn add_assign(&mut self, other: &TrigScalar) {
        for (k, p, c) in other.iter() {
            self.add_term(*k, *p, c.clone());
        }
    }

    pub fn neg(&self) -> TrigScalar {
        TrigScalar {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &TrigScalar) -> TrigScalar {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &PiPoly) -> TrigScalar {
        let mut s = Self::zero();
        for (k, p, x) in self.iter() {
            s.add_term(*k, *p, x * c);
        }
        s
    }

    pub fn scale_q(&self, c: &Q) -> TrigScalar {
        if c.is_zero() {
            return Self::zero();
        }
        TrigScalar {
            terms: self.terms.iter().map(|(k, x)| (*k, x.scale(c))).collect(),
        }
    }

    /// Exact product, expanded back into monomials by product-to-sum.
    pub fn mul(&self, other: &TrigScalar) -> TrigScalar {
        let eighth = Q::new(1.into(), 8.into());
        let mut out = Self::zero();
        for ((ka, pa), ca) in &self.terms {
            for ((kb, pb), cb) in &other.terms {
                let base = (ca * cb).scale(&eighth);
                let ax: [[(Factor, u32, i8); 2]; 3] = [
                    product_1d(pa[0], ka[0], pb[0], kb[0]),
                    product_1d(pa[1], ka[1], pb[1], kb[1]),
                    product_1d(pa[2], ka[2], pb[2], kb[2]),
                ];
                for t0 in &ax[0] {
                    for t1 in &ax[1] {
                        for t2 in &ax[2] {
                            let sign = t0.2 * t1.2 * t2.2;
                            let c = if sign > 0 { base.clone() } else { -&base };
                            out.add_term([t0.1, t1.1, t2.1], [t0.0, t1.0, t2.0], c);
                        }
                    }
                }
            }
        }
        out
    }

    /// Partial derivative along a zero-based axis.
    pub fn diff(&self, axis: usize, lengths: &DomainLengths) -> TrigScalar {
        let inv_l = Q::one() / lengths.get(axis);
        let mut out = Self::zero();
        for ((k, p), c) in &self.terms {
            let ki = k[axis];
            if ki == 0 {
                continue;
            }
            let factor = &inv_l * q(ki as i64);
            let mut np = *p;
            let c = c.scale(&factor).shift_pi(1);
            let c = match p[axis] {
                Sin => {
                    np[axis] = Cos;
                    c
                }
                Cos => {
                    np[axis] = Sin;
                    -c
                }
            };
            out.add_term(*k, np, c);
        }
        out
    }

    pub fn laplacian(&self, lengths: &DomainLengths) -> TrigScalar {
        let mut out = Self::zero();
        for a in 0..3 {
            out.add_assign(&self.diff(a, lengths).diff(a, lengths));
        }
        out
    }

    pub fn eval(&self, x: [f64; 3], lengths: &DomainLengths) -> f64 {
        let mut acc = 0.0;
        for ((k, p), c) in &self.terms {
            let mut v = c.to_f64();
            for a in 0..3 {
                let arg = k[a] as f64 * PI * x[a] / lengths.f64(a);
                v *= if p[a] == Sin { arg.sin() } else { arg.cos() };
            }
            acc += v;
        }
        acc
    }

    /// Restricts to the plane `x_axis = 0` or `x_axis = L_axis`. Only the
    /// two bounded axes make sense here.
    pub fn restrict(&self, axis: usize, at_upper: bool) -> TrigScalar {
        let mut out = Self::zero();
        for ((k, p), c) in &self.terms {
            let v = match p[axis] {
                Sin => continue,
                Cos => {
                    if at_upper && k[axis] % 2 == 1 {
                        -c
                    } else {
                        c.clone()
                    }
                }
            };
            let mut nk = *k;
            nk[axis] = 0;
            let mut np = *p;
            np[axis] = Cos;
            out.add_term(nk, np, v);
        }
        out
    }

    pub fn to_json(&self) -> Vec<MonomialJson> {
        let mut v = Vec::new();
        for ((k, p), c) in &self.terms {
            for t in c.to_terms() {
                v.push(MonomialJson {
                    factors: pattern_str(p),
                    k: *k,
                    coeff: t.coeff,
                    pi_pow: t.pi_pow,
                });
            }
        }
        v
    }

    pub fn from_json(v: &[MonomialJson]) -> Result<Self, String> {
        let mut s = Self::zero();
        for m in v {
            let c = PiPoly::from_terms(&[PiTerm {
                coeff: m.coeff.clone(),
                pi_pow: m.pi_pow,
            }])?;
            s.add_term(m.k, parse_pattern(&m.factors)?, c);
        }
        Ok(s)
    }
}

// ∫ f(aπx/L) g(bπx/L) dx over one axis, as (rational, π power)
fn integral_1d(
    fa: Factor,
    a: u32,
    fb: Factor,
    b: u32,
    axis: usize,
    lengths: &DomainLengths,
) -> Option<(Q, i32)> {
    let l = lengths.get(axis);
    if axis == 2 {
        // full periods on (0, 2 L3)
        if fa != fb || a != b {
            return None;
        }
        return match (fa, a) {
            (Sin, 0) => None,
            (Cos, 0) => Some((l * q(2), 0)),
            _ => Some((l.clone(), 0)),
        };
    }
    match (fa, fb) {
        (Sin, Sin) | (Cos, Cos) => {
            if a != b {
                return None;
            }
            match (fa, a) {
                (Sin, 0) => None,
                (Cos, 0) => Some((l.clone(), 0)),
                _ => Some((l / q(2), 0)),
            }
        }
        (Sin, Cos) | (Cos, Sin) => {
            let (s, c) = if fa == Sin { (a, b) } else { (b, a) };
            if s == 0 || (s + c) % 2 == 0 {
                return None;
            }
            let (s, c) = (s as i64, c as i64);
            Some((l * Q::new((2 * s).into(), (s * s - c * c).into()), -1))
        }
    }
}

pub fn inner_scalar(u: &TrigScalar, v: &TrigScalar, lengths: &DomainLengths) -> PiPoly {
    let mut by_pattern: HashMap<Pattern, BTreeMap<Index3, &PiPoly>> = HashMap::new();
    for ((k, p), c) in &v.terms {
        by_pattern.entry(*p).or_default().insert(*k, c);
    }
    let mut acc = PiPoly::zero();
    for ((ka, pa), ca) in &u.terms {
        for (pb, group) in &by_pattern {
            if pb[2] != pa[2] {
                continue;
            }
            if pb == pa {
                if let Some(cb) = group.get(ka) {
                    if let Some(w) = monomial_weight(*ka, *pa, *ka, *pb, lengths) {
                        acc.add_assign_ref(&(ca * *cb).mul_ref(&w));
                    }
                }
                continue;
            }
            for (kb, cb) in group {
                if let Some(w) = monomial_weight(*ka, *pa, *kb, *pb, lengths) {
                    acc.add_assign_ref(&(ca * *cb).mul_ref(&w));
                }
            }
        }
    }
    acc
}

/// Integral of the product of two monomials with unit coefficients.
pub fn monomial_weight(
    ka: Index3,
    pa: Pattern,
    kb: Index3,
    pb: Pattern,
    lengths: &DomainLengths,
) -> Option<PiPoly> {
    let mut c = Q::one();
    let mut p = 0;
    for a in 0..3 {
        let (x, e) = integral_1d(pa[a], ka[a], pb[a], kb[a], a, lengths)?;
        c *= x;
        p += e;
    }
    Some(PiPoly::monomial(c, p))
}

/// Vector field with three canonical trig components.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct TrigVectorField {
    pub c: [TrigScalar; 3],
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct FieldJson {
    pub u1: Vec<MonomialJson>,
    pub u2: Vec<MonomialJson>,
    pub u3: Vec<MonomialJson>,
}

impl TrigVectorField {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(c1: TrigScalar, c2: TrigScalar, c3: TrigScalar) -> Self {
        TrigVectorField { c: [c1, c2, c3] }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|s| s.is_zero())
    }

    pub fn max_index(&self) -> u32 {
        self.c.iter().map(|s| s.max_index()).max().unwrap()
    }

    pub fn term_count(&self) -> usize {
        self.c.iter().map(|s| s.len()).sum()
    }

    pub fn add(&self, o: &Self) -> Self {
        TrigVectorField {
            c: [
                self.c[0].add(&o.c[0]),
                self.c[1].add(&o.c[1]),
                self.c[2].add(&o.c[2]),
            ],
        }
    }

    pub fn add_assign(&mut self, o: &Self) {
        for i in 0..3 {
            self.c[i].add_assign(&o.c[i]);
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        TrigVectorField {
            c: [
                self.c[0].sub(&o.c[0]),
                self.c[1].sub(&o.c[1]),
                self.c[2].sub(&o.c[2]),
            ],
        }
    }

    pub fn scale(&self, s: &PiPoly) -> Self {
        TrigVectorField {
            c: [self.c[0].scale(s), self.c[1].scale(s), self.c[2].scale(s)],
        }
    }

    pub fn scale_q(&self, s: &Q) -> Self {
        TrigVectorField {
            c: [
                self.c[0].scale_q(s),
                self.c[1].scale_q(s),
                self.c[2].scale_q(s),
            ],
        }
    }

    pub fn normalize(&self) -> Self {
        TrigVectorField {
            c: [
                self.c[0].normalize(),
                self.c[1].normalize(),
                self.c[2].normalize(),
            ],
        }
    }

    pub fn eval(&self, x: [f64; 3], lengths: &DomainLengths) -> [f64; 3] {
        [
            self.c[0].eval(x, lengths),
            self.c[1].eval(x, lengths),
            self.c[2].eval(x, lengths),
        ]
    }

    pub fn laplacian(&self, lengths: &DomainLengths) -> Self {
        TrigVectorField {
            c: [
                self.c[0].laplacian(lengths),
                self.c[1].laplacian(lengths),
                self.c[2].laplacian(lengths),
            ],
        }
    }

    pub fn to_json(&self) -> FieldJson {
        FieldJson {
            u1: self.c[0].to_json(),
            u2: self.c[1].to_json(),
            u3: self.c[2].to_json(),
        }
    }

    pub fn from_json(j: &FieldJson) -> Result<Self, String> {
        Ok(TrigVectorField {
            c: [
                TrigScalar::from_json(&j.u1)?,
                TrigScalar::from_json(&j.u2)?,
                TrigScalar::from_json(&j.u3)?,
            ],
        })
    }
}

pub fn gradient(f: &TrigScalar, lengths: &DomainLengths) -> TrigVectorField {
    TrigVectorField {
        c: [f.diff(0, lengths), f.diff(1, lengths), f.diff(2, lengths)],
    }
}

pub fn divergence(u: &TrigVectorField, lengths: &DomainLengths) -> TrigScalar {
    let mut s = u.c[0].diff(0, lengths);
    s.add_assign(&u.c[1].diff(1, lengths));
    s.add_assign(&u.c[2].diff(2, lengths));
    s
}

pub fn curl(u: &TrigVectorField, lengths: &DomainLengths) -> TrigVectorField {
    let d = |i: usize, a: usize| u.c[i].diff(a, lengths);
    TrigVectorField {
        c: [
            d(2, 1).sub(&d(1, 2)),
            d(0, 2).sub(&d(2, 0)),
            d(1, 0).sub(&d(0, 1)),
        ],
    }
}

/// `(u·∇)v`.
pub fn advect(
    u: &TrigVectorField,
    v: &TrigVectorField,
    lengths: &DomainLengths,
) -> TrigVectorField {
    let mut out = TrigVectorField::zero();
    for i in 0..3 {
        for j in 0..3 {
            if u.c[j].is_zero() {
                continue;
            }
            let dv = v.c[i].diff(j, lengths);
            if dv.is_zero() {
                continue;
            }
            out.c[i].add_assign(&u.c[j].mul(&dv));
        }
    }
    out
}

/// L2 inner product over the cylinder cell.
pub fn inner(u: &TrigVectorField, v: &TrigVectorField, lengths: &DomainLengths) -> PiPoly {
    let mut acc = PiPoly::zero();
    for i in 0..3 {
        acc.add_assign_ref(&inner_scalar(&u.c[i], &v.c[i], lengths));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn s(k: Index3, p: &str, c: Q, pp: i32) -> TrigScalar {
        TrigScalar::monomial(k, parse_pattern(p).unwrap(), PiPoly::monomial(c, pp))
    }

    #[test]
    fn sin_cos_same_axis() {
        let a = s([1, 0, 0], "SCC", q(1), 0);
        let b = s([1, 0, 0], "CCC", q(1), 0);
        let p = a.mul(&b);
        assert_eq!(p, s([2, 0, 0], "SCC", frac(1, 2), 0));
    }

    #[test]
    fn cos_squared() {
        let c = s([0, 3, 0], "CCC", q(1), 0);
        let p = c.mul(&c);
        let mut want = TrigScalar::constant(PiPoly::rational(frac(1, 2)));
        want.add_assign(&s([0, 6, 0], "CCC", frac(1, 2), 0));
        assert_eq!(p, want);
    }

    #[test]
    fn sin_zero_dropped() {
        assert!(s([0, 1, 1], "SCC", q(1), 0).is_zero());
    }

    #[test]
    fn derivative() {
        let l = DomainLengths::new(frac(1, 2), q(1), q(1)).unwrap();
        let f = s([3, 0, 0], "SCC", q(1), 0);
        assert_eq!(f.diff(0, &l), s([3, 0, 0], "CCC", q(6), 1));
        assert!(TrigScalar::constant(PiPoly::one()).diff(2, &l).is_zero());
    }

    #[test]
    fn half_range_sin_cos() {
        // ∫_0^1 sin(πx) cos(0) dx = 2/π
        let l = DomainLengths::unit();
        let a = s([1, 0, 0], "SCC", q(1), 0);
        let b = s([0, 0, 0], "CCC", q(1), 0);
        let v = inner_scalar(&a, &b, &l);
        // x2 integral 1, x3 integral 2
        assert_eq!(v, PiPoly::monomial(q(4), -1));
    }

    #[test]
    fn restrict_upper() {
        let f = s([3, 2, 1], "CSS", q(1), 0);
        assert_eq!(f.restrict(0, true), s([0, 2, 1], "CSS", q(-1), 0));
        assert!(s([3, 2, 1], "SSS", q(1), 0).restrict(0, false).is_zero());
    }

    #[test]
    fn json_roundtrip() {
        let mut f = s([1, 2, 0], "SCC", frac(-3, 4), 1);
        f.add_term([1, 2, 0], [Sin, Cos, Cos], PiPoly::monomial(q(2), -1));
        let v = TrigVectorField::new(f, TrigScalar::zero(), s([0, 0, 0], "CCC", q(1), 0));
        let j = serde_json::to_string(&v.to_json()).unwrap();
        let back: FieldJson = serde_json::from_str(&j).unwrap();
        assert_eq!(TrigVectorField::from_json(&back).unwrap(), v);
    }
}
