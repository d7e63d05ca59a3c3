//! Stokes eigenfunctions of the cylinder under Lions boundary conditions.
//!
//! Two shapes share an index `k`:
//!
//! ```text
//! Y = ( w1 S1 C2 C3,  w2 C1 S2 C3,  w3 C1 C2 S3)
//! Z = ( w1 S1 C2 S3,  w2 C1 S2 S3, -w3 C1 C2 C3)
//! ```
//!
//! with `S_i = sin(k_i π x_i / L_i)`, `C_i = cos(...)`, `(w,k)_[L] = 0` and
//! `w_i = 0` whenever `k_i = 0`. Z modes with `k3 = 0` reduce to
//! `(0, 0, -w3 C1 C2)`, so for them only `w = (0,0,w3)` is meaningful.

use crate::pipoly::PiPoly;
use crate::rational::{fmt_q, primitive_direction, q, Q};
use crate::trig::{
    curl, divergence, inner, DomainLengths, Factor, Index3, TrigScalar, TrigVectorField,
};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

use Factor::{Cos, Sin};

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Family {
    Y,
    Z,
}

/// Identifier of one eigenfunction. Ordered by index first, then family and
/// `j`; this order is also the pivot order of the span engine.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct EigenId {
    pub family: Family,
    pub k: Index3,
    pub j: u8,
}

impl EigenId {
    pub fn y(k: Index3, j: u8) -> Self {
        EigenId {
            family: Family::Y,
            k,
            j,
        }
    }

    pub fn z(k: Index3, j: u8) -> Self {
        EigenId {
            family: Family::Z,
            k,
            j,
        }
    }

    pub fn z000() -> Self {
        Self::z([0, 0, 0], 1)
    }

    pub fn max_index(&self) -> u32 {
        *self.k.iter().max().unwrap()
    }

    /// Checks the admissibility rules of the two families.
    pub fn check(&self) -> Result<(), EigenError> {
        let z = zeros(&self.k);
        let fam = self.family;
        if self.j == 0 || self.j > 2 {
            return Err(EigenError::Rule(format!("{self}: j must be 1 or 2")));
        }
        match fam {
            Family::Y => {
                if z > 1 {
                    return Err(EigenError::Rule(format!(
                        "{self}: Y needs at most one zero index entry"
                    )));
                }
            }
            Family::Z => {
                if self.k[2] == 0 {
                    if self.j != 1 {
                        return Err(EigenError::Rule(format!(
                            "{self}: Z with k3 = 0 only has j = 1"
                        )));
                    }
                    return Ok(());
                }
                if z > 1 {
                    return Err(EigenError::Rule(format!(
                        "{self}: Z with k3 > 0 needs at most one zero index entry"
                    )));
                }
            }
        }
        if self.j as usize > 2 - z {
            return Err(EigenError::Rule(format!("{self}: j exceeds 2 - #0(k)")));
        }
        Ok(())
    }
}

impl Ord for EigenId {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        (self.k, self.family, self.j).cmp(&(o.k, o.family, o.j))
    }
}

impl PartialOrd for EigenId {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for EigenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?}{}({},{},{})",
            self.family, self.j, self.k[0], self.k[1], self.k[2]
        )
    }
}

impl std::str::FromStr for EigenId {
    type Err = String;

    /// Parses the display form, e.g. `Y2(1,2,3)` or `Z1(0,0,0)`.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let bad = || format!("malformed eigenfunction id `{s}` (expected e.g. Y1(1,2,3))");
        let family = match s.chars().next() {
            Some('Y') => Family::Y,
            Some('Z') => Family::Z,
            _ => return Err(bad()),
        };
        let open = s.find('(').ok_or_else(bad)?;
        let j: u8 = s[1..open].parse().map_err(|_| bad())?;
        let inner = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let k: Vec<u32> = inner
            .split(',')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let k: Index3 = k.try_into().map_err(|_| bad())?;
        let id = EigenId { family, k, j };
        id.check().map_err(|e| e.to_string())?;
        Ok(id)
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum EigenError {
    #[error("rule violated: {0}")]
    Rule(String),
}

pub fn zeros(k: &Index3) -> usize {
    k.iter().filter(|x| **x == 0).count()
}

/// `(x, y)_[L] = Σ x_i y_i / L_i`.
pub fn l_dot(x: &[Q; 3], k: &Index3, lengths: &DomainLengths) -> Q {
    let mut s = Q::zero();
    for i in 0..3 {
        s += &x[i] * q(k[i] as i64) / lengths.get(i);
    }
    s
}

fn cross(a: &[Q; 3], b: &[Q; 3]) -> [Q; 3] {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

/// Canonical basis of `{w : (w,k)_[L] = 0, w_i = 0 if k_i = 0}`.
pub fn perp_basis(k: &Index3, lengths: &DomainLengths) -> Result<Vec<[Q; 3]>, EigenError> {
    let [l1, l2, l3] = lengths.as_array();
    let [k1, k2, k3] = [q(k[0] as i64), q(k[1] as i64), q(k[2] as i64)];
    match zeros(k) {
        0 => {
            let w1 = primitive_direction([l1 * &k2, -(l2 * &k1), Q::zero()]);
            let normal = [&k1 / l1, &k2 / l2, &k3 / l3];
            let w2 = primitive_direction(cross(&normal, &w1));
            Ok(vec![w1, w2])
        }
        1 => {
            let w = if k[0] == 0 {
                [Q::zero(), l2 * &k3, -(l3 * &k2)]
            } else if k[1] == 0 {
                [l1 * &k3, Q::zero(), -(l3 * &k1)]
            } else {
                [l1 * &k2, -(l2 * &k1), Q::zero()]
            };
            Ok(vec![primitive_direction(w)])
        }
        _ => Err(EigenError::Rule(format!(
            "perp basis needs at most one zero entry, got k = ({},{},{})",
            k[0], k[1], k[2]
        ))),
    }
}

#[derive(Clone, Debug)]
pub struct Eigenfunction {
    pub id: EigenId,
    pub w: [Q; 3],
    pub field: TrigVectorField,
    /// λ / (ν π²) = Σ (k_i/L_i)²
    pub eigen_coeff: Q,
    /// ⟨e, e⟩
    pub norm2: Q,
}

impl Eigenfunction {
    /// λ as a floating value for a given viscosity.
    pub fn eigenvalue(&self, nu: f64) -> f64 {
        nu * std::f64::consts::PI.powi(2) * crate::rational::to_f64(&self.eigen_coeff)
    }
}

fn eigen_coeff(k: &Index3, lengths: &DomainLengths) -> Q {
    let mut s = Q::zero();
    for i in 0..3 {
        let r = q(k[i] as i64) / lengths.get(i);
        s += &r * &r;
    }
    s
}

fn check_perp(
    k: &Index3,
    w: &[Q; 3],
    lengths: &DomainLengths,
    what: &str,
) -> Result<(), EigenError> {
    if w.iter().all(|x| x.is_zero()) {
        return Err(EigenError::Rule(format!("{what}: w must be nonzero")));
    }
    for i in 0..3 {
        if k[i] == 0 && !w[i].is_zero() {
            return Err(EigenError::Rule(format!(
                "{what}: w_{} must vanish because k_{} = 0",
                i + 1,
                i + 1
            )));
        }
    }
    if !l_dot(w, k, lengths).is_zero() {
        return Err(EigenError::Rule(format!("{what}: (w,k)_[L] must be 0")));
    }
    Ok(())
}

fn mono(k: Index3, p: [Factor; 3], c: &Q) -> TrigScalar {
    TrigScalar::monomial(k, p, PiPoly::rational(c.clone()))
}

pub fn y_field(k: Index3, w: &[Q; 3]) -> TrigVectorField {
    TrigVectorField::new(
        mono(k, [Sin, Cos, Cos], &w[0]),
        mono(k, [Cos, Sin, Cos], &w[1]),
        mono(k, [Cos, Cos, Sin], &w[2]),
    )
}

pub fn z_field(k: Index3, w: &[Q; 3]) -> TrigVectorField {
    TrigVectorField::new(
        mono(k, [Sin, Cos, Sin], &w[0]),
        mono(k, [Cos, Sin, Sin], &w[1]),
        mono(k, [Cos, Cos, Cos], &-&w[2]),
    )
}

fn finish(
    id: EigenId,
    w: [Q; 3],
    field: TrigVectorField,
    lengths: &DomainLengths,
) -> Eigenfunction {
    let norm2 = inner(&field, &field, lengths)
        .as_rational()
        .expect("eigenfunction norm is rational");
    Eigenfunction {
        id,
        eigen_coeff: eigen_coeff(&id.k, lengths),
        w,
        field,
        norm2,
    }
}

pub fn build_y(
    k: Index3,
    w: [Q; 3],
    j: u8,
    lengths: &DomainLengths,
) -> Result<Eigenfunction, EigenError> {
    let id = EigenId::y(k, j);
    id.check()?;
    check_perp(&k, &w, lengths, &id.to_string())?;
    let f = y_field(k, &w);
    Ok(finish(id, w, f, lengths))
}

pub fn build_z(
    k: Index3,
    w: [Q; 3],
    j: u8,
    lengths: &DomainLengths,
) -> Result<Eigenfunction, EigenError> {
    let id = EigenId::z(k, j);
    id.check()?;
    if k[2] == 0 {
        if !w[0].is_zero() || !w[1].is_zero() || w[2].is_zero() {
            return Err(EigenError::Rule(format!(
                "{id}: Z with k3 = 0 needs w = (0,0,w3), w3 != 0"
            )));
        }
    } else {
        check_perp(&k, &w, lengths, &id.to_string())?;
    }
    let f = z_field(k, &w);
    Ok(finish(id, w, f, lengths))
}

/// The canonical eigenfunction behind an id.
pub fn canonical(id: EigenId, lengths: &DomainLengths) -> Result<Eigenfunction, EigenError> {
    id.check()?;
    let w = match id.family {
        Family::Z if id.k == [0, 0, 0] => [Q::zero(), Q::zero(), -Q::one()],
        Family::Z if id.k[2] == 0 => [Q::zero(), Q::zero(), Q::one()],
        _ => perp_basis(&id.k, lengths)?[(id.j - 1) as usize].clone(),
    };
    match id.family {
        Family::Y => build_y(id.k, w, id.j, lengths),
        Family::Z => build_z(id.k, w, id.j, lengths),
    }
}

pub fn fmt_w(w: &[Q; 3]) -> String {
    format!("({}, {}, {})", fmt_q(&w[0]), fmt_q(&w[1]), fmt_q(&w[2]))
}

/// Selection of eigenfunction ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "selector", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SetSpec {
    /// Y and Z with entries ≤ 4, the axis modes `(n,0,0)`, `(0,n,0)` with
    /// `n ≤ 4`, and the constant mode.
    Thm33,
    /// As `Thm33` but with Y entries ≤ 3.
    Cor310,
    /// Y modes with entries ≤ q (the rectangle set for q = 3).
    RectQ {
        q: u32,
    },
    /// All cylinder modes with entries ≤ q.
    CqC {
        q: u32,
    },
    /// Y modes with entries ≤ q.
    CqR {
        q: u32,
    },
    Custom {
        ids: Vec<EigenId>,
    },
    Minus {
        base: Box<SetSpec>,
        remove: Vec<EigenId>,
    },
}

fn y_modes(bound: u32, out: &mut BTreeSet<EigenId>) {
    for k in index_box(bound) {
        let z = zeros(&k);
        if z <= 1 {
            for j in 1..=(2 - z) as u8 {
                out.insert(EigenId::y(k, j));
            }
        }
    }
}

// Z modes over S_R (entries ≤ bound, at most one zero)
fn z_modes(bound: u32, out: &mut BTreeSet<EigenId>) {
    for k in index_box(bound) {
        let z = zeros(&k);
        if z <= 1 {
            let jmax = if k[2] == 0 { 1 } else { 2 - z };
            for j in 1..=jmax as u8 {
                out.insert(EigenId::z(k, j));
            }
        }
    }
}

fn axis_modes(bound: u32, out: &mut BTreeSet<EigenId>) {
    for n in 1..=bound {
        out.insert(EigenId::z([n, 0, 0], 1));
        out.insert(EigenId::z([0, n, 0], 1));
    }
}

pub fn index_box(bound: u32) -> impl Iterator<Item = Index3> {
    (0..=bound)
        .flat_map(move |a| (0..=bound).flat_map(move |b| (0..=bound).map(move |c| [a, b, c])))
}

/// Deterministic, sorted, duplicate-free enumeration.
pub fn enumerate_set(spec: &SetSpec) -> Vec<EigenId> {
    let mut s = BTreeSet::new();
    match spec {
        SetSpec::Thm33 => {
            y_modes(4, &mut s);
            z_modes(4, &mut s);
            axis_modes(4, &mut s);
            s.insert(EigenId::z000());
        }
        SetSpec::Cor310 => {
            y_modes(3, &mut s);
            z_modes(4, &mut s);
            axis_modes(4, &mut s);
            s.insert(EigenId::z000());
        }
        SetSpec::RectQ { q } | SetSpec::CqR { q } => y_modes(*q, &mut s),
        SetSpec::CqC { q } => {
            y_modes(*q, &mut s);
            z_modes(*q, &mut s);
            axis_modes(*q, &mut s);
            s.insert(EigenId::z000());
        }
        SetSpec::Custom { ids } => s.extend(ids.iter().copied()),
        SetSpec::Minus { base, remove } => {
            s.extend(enumerate_set(base));
            for r in remove {
                s.remove(r);
            }
        }
    }
    s.into_iter().collect()
}

impl SetSpec {
    /// Parses `thm33`, `cor310`, `rect-qN`, `cq-c:N`, `cq-r:N` and
    /// `<name>-minus-z000`.
    pub fn parse(s: &str) -> Result<SetSpec, String> {
        let s = s.trim();
        if let Some(base) = s.strip_suffix("-minus-z000") {
            return Ok(SetSpec::Minus {
                base: Box::new(SetSpec::parse(base)?),
                remove: vec![EigenId::z000()],
            });
        }
        let num = |t: &str| {
            t.parse::<u32>()
                .map_err(|_| format!("bad bound in set spec `{s}`"))
        };
        match s {
            "thm33" => Ok(SetSpec::Thm33),
            "cor310" => Ok(SetSpec::Cor310),
            _ => {
                if let Some(n) = s.strip_prefix("rect-q") {
                    Ok(SetSpec::RectQ { q: num(n)? })
                } else if let Some(n) = s.strip_prefix("cq-c:") {
                    Ok(SetSpec::CqC { q: num(n)? })
                } else if let Some(n) = s.strip_prefix("cq-r:") {
                    Ok(SetSpec::CqR { q: num(n)? })
                } else {
                    Err(format!("unknown set spec `{s}` (thm33, cor310, rect-qN, cq-c:N, cq-r:N, <set>-minus-z000)"))
                }
            }
        }
    }

    pub fn max_index(&self) -> u32 {
        enumerate_set(self)
            .iter()
            .map(|i| i.max_index())
            .max()
            .unwrap_or(0)
    }

    /// Element counts quoted alongside these sets in the literature.
    pub fn quoted_count(&self) -> Option<usize> {
        match self {
            SetSpec::Thm33 => Some(355),
            SetSpec::Cor310 => Some(260),
            SetSpec::RectQ { q: 3 } | SetSpec::CqR { q: 3 } => Some(81),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            SetSpec::Thm33 => "thm33".into(),
            SetSpec::Cor310 => "cor310".into(),
            SetSpec::RectQ { q } => format!("rect-q{q}"),
            SetSpec::CqC { q } => format!("cq-c:{q}"),
            SetSpec::CqR { q } => format!("cq-r:{q}"),
            SetSpec::Custom { ids } => format!("custom[{}]", ids.len()),
            SetSpec::Minus { base, remove } => {
                let r: Vec<String> = remove.iter().map(|i| i.to_string()).collect();
                format!("{}-minus-[{}]", base.label(), r.join(","))
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub id: EigenId,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn check(name: &str, ok: bool, detail: impl FnOnce() -> String) -> Check {
    Check {
        name: name.into(),
        passed: ok,
        detail: if ok { None } else { Some(detail()) },
    }
}

/// Exact symbolic checks: divergence, wall conditions, eigen relation.
pub fn validate_eigenfunction(e: &Eigenfunction, lengths: &DomainLengths) -> ValidationReport {
    let f = &e.field;
    let mut checks = Vec::new();
    let div = divergence(f, lengths);
    checks.push(check("divergence", div.is_zero(), || {
        format!("{} residual terms", div.len())
    }));
    let names = ["x1", "x2"];
    for axis in 0..2 {
        for upper in [false, true] {
            let side = if upper { "L" } else { "0" };
            let un = f.c[axis].restrict(axis, upper);
            checks.push(check(
                &format!("normal velocity at {}={side}", names[axis]),
                un.is_zero(),
                || format!("{} residual terms", un.len()),
            ));
        }
    }
    let cu = curl(f, lengths);
    for axis in 0..2 {
        for upper in [false, true] {
            let side = if upper { "L" } else { "0" };
            let bad: usize = (0..3)
                .filter(|c| *c != axis)
                .map(|c| cu.c[c].restrict(axis, upper).len())
                .sum();
            checks.push(check(
                &format!("tangential curl at {}={side}", names[axis]),
                bad == 0,
                || format!("{bad} residual terms"),
            ));
        }
    }
    let lam = PiPoly::monomial(e.eigen_coeff.clone(), 2);
    let lap = f.laplacian(lengths);
    let res = lap.add(&f.scale(&lam));
    checks.push(check("-laplacian = lambda/nu", res.is_zero(), || {
        format!("{} residual terms", res.term_count())
    }));
    let cc = curl(&cu, lengths);
    let res2 = cc.sub(&f.scale(&lam));
    checks.push(check("curl curl = lambda/nu", res2.is_zero(), || {
        format!("{} residual terms", res2.term_count())
    }));
    let n2 = inner(f, f, lengths);
    let pos = n2.as_rational().map(|x| x > Q::zero()).unwrap_or(false);
    checks.push(check("positive norm", pos, || format!("norm^2 = {n2}")));
    ValidationReport { id: e.id, checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn perp_examples() {
        let l = DomainLengths::unit();
        let b = perp_basis(&[1, 1, 1], &l).unwrap();
        assert_eq!(b[0], [q(1), q(-1), q(0)]);
        assert_eq!(b[1], [q(1), q(1), q(-2)]);
        let l = DomainLengths::new(frac(2, 3), frac(5, 7), frac(3, 2)).unwrap();
        let b = perp_basis(&[0, 1, 1], &l).unwrap();
        // proportional to (0, L2, -L3) = (0, 5/7, -3/2) -> (0, 10, -21)
        assert_eq!(b[0], [q(0), q(10), q(-21)]);
        let b = perp_basis(&[1, 0, 4], &l).unwrap();
        // (4 L1, 0, -L3) = (8/3, 0, -3/2) -> (16, 0, -9)
        assert_eq!(b[0], [q(16), q(0), q(-9)]);
        assert!(perp_basis(&[1, 0, 0], &l).is_err());
    }

    #[test]
    fn z000_is_constant() {
        let e = canonical(EigenId::z000(), &DomainLengths::unit()).unwrap();
        assert_eq!(
            e.field.eval([0.3, 0.7, 1.1], &DomainLengths::unit()),
            [0.0, 0.0, 1.0]
        );
        assert!(e.eigen_coeff.is_zero());
    }

    #[test]
    fn y_axis_rejected() {
        let l = DomainLengths::unit();
        assert!(build_y([1, 0, 0], [q(1), q(0), q(0)], 1, &l).is_err());
    }

    #[test]
    fn eigenvalue_unit_cube() {
        let e = canonical(EigenId::y([1, 1, 1], 1), &DomainLengths::unit()).unwrap();
        assert_eq!(e.eigen_coeff, q(3));
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_set(&SetSpec::CqR { q: 3 }).len(), 81);
        assert_eq!(enumerate_set(&SetSpec::Custom { ids: vec![] }).len(), 0);
        assert_eq!(enumerate_set(&SetSpec::Thm33).len(), 361);
        assert_eq!(enumerate_set(&SetSpec::Cor310).len(), 266);
        assert_eq!(
            enumerate_set(&SetSpec::CqC { q: 4 }),
            enumerate_set(&SetSpec::Thm33)
        );
    }

    #[test]
    fn broken_w_fails_divergence() {
        let l = DomainLengths::unit();
        let f = y_field([1, 1, 1], &[q(1), q(1), q(1)]);
        let e = Eigenfunction {
            id: EigenId::y([1, 1, 1], 1),
            w: [q(1), q(1), q(1)],
            field: f,
            eigen_coeff: q(3),
            norm2: q(1),
        };
        let r = validate_eigenfunction(&e, &l);
        assert!(!r.checks[0].passed);
    }

    #[test]
    fn parse_ids_and_specs() {
        let id: EigenId = "Z1(5,0,0)".parse().unwrap();
        assert_eq!(id, EigenId::z([5, 0, 0], 1));
        assert_eq!(id.to_string().parse::<EigenId>().unwrap(), id);
        assert!("Y3(1,1,1)".parse::<EigenId>().is_err());
        assert!("Q1(1,1,1)".parse::<EigenId>().is_err());
        assert_eq!(SetSpec::parse("cq-c:2").unwrap(), SetSpec::CqC { q: 2 });
        assert_eq!(enumerate_set(&SetSpec::parse("rect-q3").unwrap()).len(), 81);
        let m = SetSpec::parse("thm33-minus-z000").unwrap();
        assert_eq!(
            enumerate_set(&m).len() + 1,
            enumerate_set(&SetSpec::Thm33).len()
        );
        assert!(SetSpec::parse("thm34").is_err());
    }
}
