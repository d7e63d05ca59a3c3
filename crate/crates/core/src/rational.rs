//! Small helpers around `BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"17/2"`, `"-3"` or `"0.25"` style strings.
pub fn parse_q(s: &str) -> Result<Q, String> {
    let t = s.trim();
    if t.is_empty() {
        return Err("empty rational".into());
    }
    if let Some((a, b)) = t.split_once('/') {
        let n: BigInt = a
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: BigInt = b
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in {s:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Q::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.trim_start().starts_with('-');
        let ip = ip.trim().trim_start_matches(['-', '+']);
        if !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(format!("bad decimal {s:?}"));
        }
        let whole: BigInt = if ip.is_empty() {
            BigInt::zero()
        } else {
            ip.parse().map_err(|_| format!("bad decimal {s:?}"))?
        };
        let frac_part: BigInt = if fp.is_empty() {
            BigInt::zero()
        } else {
            fp.parse().unwrap()
        };
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        let v = Q::new(whole * &scale + frac_part, scale);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = t.parse().map_err(|_| format!("bad rational {s:?}"))?;
    Ok(Q::from_integer(n))
}

pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // very large numerators/denominators
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

/// Divides an integer-valued vector by the gcd of its entries and makes the
/// first nonzero entry positive.
pub fn primitive_direction(v: [Q; 3]) -> [Q; 3] {
    use num_integer::Integer;
    let mut l = BigInt::one();
    for x in &v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * Q::from_integer(l.clone())).to_integer())
        .collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v;
    }
    let sign = ints
        .iter()
        .find(|x| !x.is_zero())
        .map(|x| x.signum())
        .unwrap();
    let g = g * sign;
    [
        Q::from_integer(&ints[0] / &g),
        Q::from_integer(&ints[1] / &g),
        Q::from_integer(&ints[2] / &g),
    ]
}

pub mod serde_q {
    use super::{fmt_q, parse_q, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("17/2").unwrap(), frac(17, 2));
        assert_eq!(parse_q("-3").unwrap(), q(-3));
        assert_eq!(parse_q("0.25").unwrap(), frac(1, 4));
        assert_eq!(parse_q("-1.5").unwrap(), frac(-3, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn primitive() {
        let v = primitive_direction([frac(-2, 3), q(0), frac(4, 3)]);
        assert_eq!(v, [q(1), q(0), q(-2)]);
    }
}
