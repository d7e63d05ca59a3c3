//! Symmetrized convection bracket `𝓑(a,b) = Π((a·∇)b) + Π((b·∇)a)`.
//!
//! Two routes: the generic one advects the trig fields and projects, the
//! closed-form one assembles the Y–Z mix from β coefficients.

use crate::eigen::{EigenId, Eigenfunction, Family};
use crate::pipoly::PiPoly;
use crate::projector::{project, shape_of, shape_pattern, EigenCoords, ProjectError, Universe};
use crate::rational::{q, Q};
use crate::trig::{advect, DomainLengths, Index3, TrigScalar, TrigVectorField};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type SignTriple = [i8; 3];

/// `(π/8)(s1 w1 m1/L1 + s2 w2 m2/L2 + s3 w3 m3/L3)`.
pub fn beta(w: &[Q; 3], m: &Index3, s: SignTriple, lengths: &DomainLengths) -> PiPoly {
    let mut acc = Q::zero();
    for i in 0..3 {
        let t = &w[i] * q(m[i] as i64) / lengths.get(i);
        if s[i] > 0 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    PiPoly::monomial(acc / q(8), 1)
}

/// One shape term `𝒵^k_z` (or the Y analogue): components `z_i` times the
/// shape's trig patterns at index `k`, with no sign flip on the third entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeTerm {
    pub shape: Family,
    pub k: Index3,
    pub z: [PiPoly; 3],
}

impl ShapeTerm {
    pub fn field(&self) -> TrigVectorField {
        shape_field(self.shape, self.k, &self.z)
    }
}

pub fn shape_field(shape: Family, k: Index3, z: &[PiPoly; 3]) -> TrigVectorField {
    let mut f = TrigVectorField::zero();
    for i in 0..3 {
        f.c[i] = TrigScalar::monomial(k, shape_pattern(shape, i), z[i].clone());
    }
    f
}

/// Splits a field into shape terms grouped by index. Returns `None` when
/// some term fits neither shape.
pub fn decompose(f: &TrigVectorField) -> Option<Vec<ShapeTerm>> {
    let mut m: BTreeMap<(Index3, Family), [PiPoly; 3]> = BTreeMap::new();
    for comp in 0..3 {
        for (k, p, c) in f.c[comp].iter() {
            let fam = shape_of(comp, p)?;
            m.entry((*k, fam)).or_default()[comp].add_assign_ref(c);
        }
    }
    Some(
        m.into_iter()
            .map(|((k, shape), z)| ShapeTerm { shape, k, z })
            .collect(),
    )
}

#[derive(Clone, Debug)]
pub struct BracketResult {
    pub projected: EigenCoords,
    pub unprojected: Vec<ShapeTerm>,
}

pub fn raw_bracket(
    a: &TrigVectorField,
    b: &TrigVectorField,
    lengths: &DomainLengths,
) -> TrigVectorField {
    let mut f = advect(a, b, lengths);
    f.add_assign(&advect(b, a, lengths));
    f
}

pub fn bracket_generic(
    a: &Eigenfunction,
    b: &Eigenfunction,
    uni: &Universe,
) -> Result<BracketResult, ProjectError> {
    let f = raw_bracket(&a.field, &b.field, &uni.lengths);
    let projected = project(&f, uni)?;
    let unprojected = decompose(&f).expect("eigenfunction brackets split into shapes");
    Ok(BracketResult {
        projected,
        unprojected,
    })
}

/// Bracket of two fields given as eigen-coordinates, bilinear expansion of
/// the generic route.
pub fn bracket_fields(
    a: &TrigVectorField,
    b: &TrigVectorField,
    uni: &Universe,
) -> Result<EigenCoords, ProjectError> {
    project(&raw_bracket(a, b, &uni.lengths), uni)
}

// (sign on w^m β_{w^k,m}, sign on w^k β_{w^m,k}, β signs, index signs)
type Row = (i8, i8, SignTriple, SignTriple);

const P: i8 = 1;
const M: i8 = -1;

const FIRST: [Row; 8] = [
    (P, P, [P, P, P], [P, P, P]),
    (M, P, [P, P, P], [M, M, M]),
    (M, M, [P, P, M], [P, P, M]),
    (P, M, [P, P, M], [M, M, P]),
    (P, P, [P, M, P], [P, M, P]),
    (M, P, [P, M, P], [M, P, M]),
    (M, M, [P, M, M], [P, M, M]),
    (P, M, [P, M, M], [M, P, P]),
];

const SECOND: [Row; 8] = [
    (P, P, [P, P, P], [P, P, P]),
    (M, P, [P, P, P], [M, M, M]),
    (M, M, [P, P, M], [P, P, M]),
    (P, M, [P, P, M], [M, M, P]),
    (M, P, [P, M, P], [P, M, P]),
    (P, P, [P, M, P], [M, P, M]),
    (P, M, [P, M, M], [P, M, M]),
    (M, M, [P, M, M], [M, P, P]),
];

const THIRD: [Row; 8] = [
    (M, M, [P, P, P], [P, P, P]),
    (P, M, [P, P, P], [M, M, M]),
    (M, P, [P, P, M], [P, P, M]),
    (P, P, [P, P, M], [M, M, P]),
    (M, M, [P, M, P], [P, M, P]),
    (P, M, [P, M, P], [M, P, M]),
    (M, P, [P, M, M], [P, M, M]),
    (P, P, [P, M, M], [M, P, P]),
];

/// `(Y^k·∇)Z^m + (Z^m·∇)Y^k` from the β tables, grouped into Z-shape terms.
/// `(k, wk)` is the Y datum and `(m, wm)` the Z datum; no admissibility
/// check is made on either.
pub fn yz_mix_closed_form(
    k: &Index3,
    wk: &[Q; 3],
    m: &Index3,
    wm: &[Q; 3],
    lengths: &DomainLengths,
) -> Vec<ShapeTerm> {
    let mut acc: BTreeMap<Index3, [PiPoly; 3]> = BTreeMap::new();
    let tables = [&FIRST, &SECOND, &THIRD];
    for (comp, table) in tables.iter().enumerate() {
        let pat = shape_pattern(Family::Z, comp);
        for &(sa, sb, bs, is) in table.iter() {
            let b1 = beta(wk, m, bs, lengths).scale(&wm[comp]);
            let b2 = beta(wm, k, bs, lengths).scale(&wk[comp]);
            let mut c = if sa > 0 { b1 } else { -b1 };
            c.add_assign_ref(&if sb > 0 { b2 } else { -b2 });
            if c.is_zero() {
                continue;
            }
            let mut idx = [0u32; 3];
            let mut neg = false;
            let mut vanish = false;
            for ax in 0..3 {
                let v = k[ax] as i64 + is[ax] as i64 * m[ax] as i64;
                idx[ax] = v.unsigned_abs() as u32;
                if pat[ax] == crate::trig::Factor::Sin {
                    if v == 0 {
                        vanish = true;
                    }
                    if v < 0 {
                        neg = !neg;
                    }
                }
            }
            if vanish {
                continue;
            }
            let c = if neg { -c } else { c };
            acc.entry(idx).or_default()[comp].add_assign_ref(&c);
        }
    }
    acc.into_iter()
        .filter(|(_, z)| z.iter().any(|x| !x.is_zero()))
        .map(|(k, z)| ShapeTerm {
            shape: Family::Z,
            k,
            z,
        })
        .collect()
}

pub fn closed_form_field(terms: &[ShapeTerm]) -> TrigVectorField {
    let mut f = TrigVectorField::zero();
    for t in terms {
        f.add_assign(&t.field());
    }
    f
}

/// Projected closed-form mix.
pub fn yz_mix_projected(
    y: &Eigenfunction,
    z: &Eigenfunction,
    uni: &Universe,
) -> Result<EigenCoords, ProjectError> {
    let terms = yz_mix_closed_form(&y.id.k, &y.w, &z.id.k, &z.w, &uni.lengths);
    project(&closed_form_field(&terms), uni)
}

pub fn det3<T>(a: &[T; 3], b: &[T; 3], c: &[T; 3]) -> T
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
    for<'x> &'x T: std::ops::Mul<&'x T, Output = T>,
{
    // columns a, b, c
    let m1 = (&b[1] * &c[2]) - (&b[2] * &c[1]);
    let m2 = (&b[0] * &c[2]) - (&b[2] * &c[0]);
    let m3 = (&b[0] * &c[1]) - (&b[1] * &c[0]);
    (&a[0] * &m1) - (&a[1] * &m2) + (&a[2] * &m3)
}

/// Direction of the gradient part inside the Z-shape space at index `k`,
/// in z-coordinates: `(k1/L1, k2/L2, -k3/L3)`.
pub fn z_gradient_direction(k: &Index3, lengths: &DomainLengths) -> [Q; 3] {
    [
        q(k[0] as i64) / lengths.get(0),
        q(k[1] as i64) / lengths.get(1),
        -(q(k[2] as i64) / lengths.get(2)),
    ]
}

pub fn k_as_q(k: &Index3) -> [Q; 3] {
    [q(k[0] as i64), q(k[1] as i64), q(k[2] as i64)]
}

/// `det(k | α | γ)` with the index vector itself as first column.
pub fn index_det(alpha: &[Q; 3], gamma: &[Q; 3], k: &Index3) -> Q {
    det3(&k_as_q(k), alpha, gamma)
}

/// Rank of the projections of `𝒵^k_z` for the given z-vectors.
pub fn projected_rank(zs: &[[Q; 3]], k: &Index3, lengths: &DomainLengths) -> usize {
    let ids: Vec<EigenId> = local_ids(k);
    if ids.is_empty() {
        return 0;
    }
    let uni = Universe::from_ids(ids, lengths).expect("admissible local ids");
    let rows: Vec<Vec<Q>> = zs
        .iter()
        .map(|z| {
            let zp = [
                PiPoly::rational(z[0].clone()),
                PiPoly::rational(z[1].clone()),
                PiPoly::rational(z[2].clone()),
            ];
            let c = project(&shape_field(Family::Z, *k, &zp), &uni).expect("local projection");
            uni.ids()
                .iter()
                .map(|id| {
                    c.get(id)
                        .and_then(|v| v.as_rational())
                        .unwrap_or_else(Q::zero)
                })
                .collect()
        })
        .collect();
    rank(rows)
}

fn local_ids(k: &Index3) -> Vec<EigenId> {
    [EigenId::z(*k, 1), EigenId::z(*k, 2)]
        .into_iter()
        .filter(|i| i.check().is_ok())
        .collect()
}

/// Number of Z eigenfunctions at index `k`.
pub fn z_local_dim(k: &Index3) -> usize {
    local_ids(k).len()
}

/// `span{Π𝒵^k_α, Π𝒵^k_γ}` is the whole Z-space at `k` when this returns true.
/// Decided through the projected rank, which coincides with
/// `det(g | α | γ) ≠ 0` for `g` the gradient direction when `k` has no zero.
pub fn check_lin_indep_pair(
    alpha: &[Q; 3],
    gamma: &[Q; 3],
    k: &Index3,
    lengths: &DomainLengths,
) -> bool {
    let full = local_ids(k).len();
    full > 0 && projected_rank(&[alpha.clone(), gamma.clone()], k, lengths) == full
}

pub fn check_lin_indep_triple(
    a: &[Q; 3],
    g: &[Q; 3],
    d: &[Q; 3],
    k: &Index3,
    lengths: &DomainLengths,
) -> bool {
    let full = local_ids(k).len();
    full > 0 && projected_rank(&[a.clone(), g.clone(), d.clone()], k, lengths) == full
}

/// Rank over Q by fraction-based elimination.
pub fn rank(mut rows: Vec<Vec<Q>>) -> usize {
    let n = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let piv = rows[r][col].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = &rows[i][col] / &piv;
                for j in col..n {
                    let v = &rows[i][j] - &f * &rows[r][j];
                    rows[i][j] = v;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ShapeTermJson {
    pub shape: Family,
    pub k: Index3,
    pub z: [Vec<crate::pipoly::PiTerm>; 3],
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct BracketJson {
    pub projected: Vec<crate::projector::CoordJson>,
    pub unprojected: Vec<ShapeTermJson>,
}

impl BracketResult {
    pub fn to_json(&self) -> BracketJson {
        BracketJson {
            projected: crate::projector::coords_to_json(&self.projected),
            unprojected: self
                .unprojected
                .iter()
                .map(|t| ShapeTermJson {
                    shape: t.shape,
                    k: t.k,
                    z: [t.z[0].to_terms(), t.z[1].to_terms(), t.z[2].to_terms()],
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{build_y, build_z, canonical};
    use crate::rational::frac;

    #[test]
    fn beta_examples() {
        let l = DomainLengths::new(frac(2, 3), frac(5, 7), frac(3, 2)).unwrap();
        let qq = 6;
        let w = [l.get(0) * q(qq), q(0), -l.get(2).clone()];
        for s in [[P, P, P], [M, P, P], [P, M, P], [M, M, P]] {
            assert_eq!(
                beta(&w, &[0, 1, 1], s, &l),
                PiPoly::monomial(frac(-1, 8), 1)
            );
        }
        let wm = [q(0), l.get(1).clone(), -l.get(2).clone()];
        assert_eq!(
            beta(&wm, &[1, 0, qq as u32], [P, M, P], &l),
            PiPoly::monomial(frac(-qq, 8), 1)
        );
        assert!(beta(&w, &[0, 0, 0], [M, M, M], &l).is_zero());
    }

    #[test]
    fn closed_form_first_quadruple() {
        let l = DomainLengths::new(frac(2, 3), frac(5, 7), frac(3, 2)).unwrap();
        let qq: i64 = 5;
        let (l1, l2, l3) = (l.get(0).clone(), l.get(1).clone(), l.get(2).clone());
        let k = [1, 0, qq as u32];
        let wk = [&l1 * q(qq), q(0), -l3.clone()];
        let m = [0, 1, 1];
        let wm = [q(0), l2.clone(), -l3.clone()];
        let terms = yz_mix_closed_form(&k, &wk, &m, &wm, &l);
        let t = terms.iter().find(|t| t.k == [1, 1, qq as u32 + 1]).unwrap();
        let h = frac(-1, 2);
        assert_eq!(t.z[0], PiPoly::monomial(&h * &l1 * q(qq * qq), 1));
        assert_eq!(t.z[1], PiPoly::monomial(&h * &l2, 1));
        assert_eq!(t.z[2], PiPoly::monomial(&h * &l3 * q(qq + 1), 1));
        for t in &terms {
            for ax in 0..3 {
                let s = k[ax] + m[ax];
                let d = k[ax].abs_diff(m[ax]);
                assert!(t.k[ax] == s || t.k[ax] == d);
            }
        }
    }

    #[test]
    fn closed_form_k3_zero_case() {
        let l = DomainLengths::unit();
        let (qq, ll) = (5i64, 3i64);
        let k = [qq as u32, ll as u32, 0];
        let wk = [q(ll), q(-qq), q(0)];
        let terms = yz_mix_closed_form(&k, &wk, &[1, 0, 0], &[q(0), q(0), q(1)], &l);
        let t = terms
            .iter()
            .find(|t| t.k == [qq as u32 + 1, ll as u32, 0])
            .unwrap();
        assert!(t.z[0].is_zero() && t.z[1].is_zero());
        // Z^(1,0,0) = (0,0,-cos), hence the minus sign
        assert_eq!(t.z[2], PiPoly::monomial(frac(-ll, 2), 1));
    }

    #[test]
    fn generic_agrees_with_closed_form_sample() {
        let l = DomainLengths::new(frac(2, 3), frac(5, 7), frac(3, 2)).unwrap();
        let uni = Universe::new(5, &l);
        let y = canonical(EigenId::y([1, 2, 1], 2), &l).unwrap();
        let z = canonical(EigenId::z([2, 0, 3], 1), &l).unwrap();
        let g = bracket_generic(&y, &z, &uni).unwrap();
        assert_eq!(g.projected, yz_mix_projected(&y, &z, &uni).unwrap());
        let back = bracket_generic(&z, &y, &uni).unwrap();
        assert_eq!(back.projected, g.projected);
    }

    #[test]
    fn z000_self_bracket_vanishes() {
        let l = DomainLengths::unit();
        let uni = Universe::new(1, &l);
        let z = canonical(EigenId::z000(), &l).unwrap();
        assert!(bracket_generic(&z, &z, &uni).unwrap().projected.is_empty());
    }

    #[test]
    fn pair_checks() {
        let l = DomainLengths::unit();
        let e = |a: i64, b: i64, c: i64| [q(a), q(b), q(c)];
        assert!(check_lin_indep_pair(
            &e(1, 0, 0),
            &e(0, 1, 0),
            &[1, 1, 1],
            &l
        ));
        assert!(!check_lin_indep_pair(
            &e(1, 2, 3),
            &e(1, 2, 3),
            &[1, 1, 1],
            &l
        ));
        // the index vector and the gradient direction differ in the third sign
        let (a, g) = (e(1, 0, 1), e(0, 1, 1));
        assert!(index_det(&a, &g, &[1, 1, 2]).is_zero());
        assert!(check_lin_indep_pair(&a, &g, &[1, 1, 2], &l));
        let _ = build_y([1, 1, 1], e(1, -1, 0), 1, &l).unwrap();
        let _ = build_z([1, 1, 1], e(1, -1, 0), 1, &l).unwrap();
    }
}
