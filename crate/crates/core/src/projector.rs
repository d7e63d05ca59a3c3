//! Orthogonal projection onto divergence-free, wall-tangent fields, realized
//! by expansion in the eigenfunction system over a finite index box.

use crate::eigen::{canonical, enumerate_set, EigenError, EigenId, Eigenfunction, Family, SetSpec};
use crate::pipoly::{PiPoly, PiTerm};
use crate::rational::Q;
use crate::trig::{
    inner, monomial_weight, DomainLengths, Factor, Index3, Pattern, TrigVectorField,
};
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

use Factor::{Cos, Sin};

pub type EigenCoords = BTreeMap<EigenId, PiPoly>;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ProjectError {
    #[error("mode index ({0},{1},{2}) exceeds the universe cap {3}")]
    Overflow(u32, u32, u32, u32),
    #[error("{0} is not in the universe")]
    UnknownId(EigenId),
}

/// Pattern of component `i` for each shape.
pub fn shape_pattern(family: Family, comp: usize) -> Pattern {
    match (family, comp) {
        (Family::Y, 0) => [Sin, Cos, Cos],
        (Family::Y, 1) => [Cos, Sin, Cos],
        (Family::Y, _) => [Cos, Cos, Sin],
        (Family::Z, 0) => [Sin, Cos, Sin],
        (Family::Z, 1) => [Cos, Sin, Sin],
        (Family::Z, _) => [Cos, Cos, Cos],
    }
}

pub fn shape_of(comp: usize, p: &Pattern) -> Option<Family> {
    if *p == shape_pattern(Family::Y, comp) {
        Some(Family::Y)
    } else if *p == shape_pattern(Family::Z, comp) {
        Some(Family::Z)
    } else {
        None
    }
}

/// Ordered set of eigenfunctions, all with entries ≤ `cap`.
#[derive(Clone, Debug)]
pub struct Universe {
    pub cap: u32,
    pub lengths: DomainLengths,
    ids: Vec<EigenId>,
    funcs: Vec<Eigenfunction>,
    pos: HashMap<EigenId, usize>,
    by_index: HashMap<(Index3, Family), Vec<usize>>,
}

impl Universe {
    /// Every eigenfunction with entries ≤ cap.
    pub fn new(cap: u32, lengths: &DomainLengths) -> Self {
        Self::from_ids(enumerate_set(&SetSpec::CqC { q: cap }), lengths).expect("canonical ids")
    }

    pub fn from_ids(mut ids: Vec<EigenId>, lengths: &DomainLengths) -> Result<Self, EigenError> {
        ids.sort();
        ids.dedup();
        let funcs = ids
            .iter()
            .map(|id| canonical(*id, lengths))
            .collect::<Result<Vec<_>, _>>()?;
        let cap = ids.iter().map(|i| i.max_index()).max().unwrap_or(0);
        let pos = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let mut by_index: HashMap<(Index3, Family), Vec<usize>> = HashMap::new();
        for (i, id) in ids.iter().enumerate() {
            by_index.entry((id.k, id.family)).or_default().push(i);
        }
        Ok(Universe {
            cap,
            lengths: lengths.clone(),
            ids,
            funcs,
            pos,
            by_index,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[EigenId] {
        &self.ids
    }

    pub fn position(&self, id: &EigenId) -> Option<usize> {
        self.pos.get(id).copied()
    }

    pub fn get(&self, i: usize) -> &Eigenfunction {
        &self.funcs[i]
    }

    pub fn func(&self, id: &EigenId) -> Option<&Eigenfunction> {
        self.position(id).map(|i| &self.funcs[i])
    }

    pub fn at_index(&self, k: Index3, family: Family) -> &[usize] {
        self.by_index
            .get(&(k, family))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    pub fn contains_index(&self, k: &Index3) -> bool {
        k.iter().all(|x| *x <= self.cap)
    }
}

fn eigen_comp_coeff(e: &Eigenfunction, comp: usize) -> Q {
    if e.id.family == Family::Z && comp == 2 {
        -e.w[2].clone()
    } else {
        e.w[comp].clone()
    }
}

/// Unnormalized `⟨u, e⟩` for every universe eigenfunction that u touches.
fn raw_inner(u: &TrigVectorField, uni: &Universe) -> Result<BTreeMap<usize, PiPoly>, ProjectError> {
    let mut acc: BTreeMap<usize, PiPoly> = BTreeMap::new();
    let mut off = TrigVectorField::zero();
    for comp in 0..3 {
        for (k, p, c) in u.c[comp].iter() {
            if !uni.contains_index(k) {
                return Err(ProjectError::Overflow(k[0], k[1], k[2], uni.cap));
            }
            let Some(fam) = shape_of(comp, p) else {
                off.c[comp].add_term(*k, *p, c.clone());
                continue;
            };
            let hits = uni.at_index(*k, fam);
            if hits.is_empty() {
                continue;
            }
            let w = monomial_weight(*k, *p, *k, *p, &uni.lengths).expect("diagonal weight");
            let cw = c * &w;
            for &i in hits {
                let ec = eigen_comp_coeff(uni.get(i), comp);
                if ec == Q::from_integer(0.into()) {
                    continue;
                }
                acc.entry(i).or_default().add_assign_ref(&cw.scale(&ec));
            }
        }
    }
    if !off.is_zero() {
        // parity-mismatched terms couple to many indices; take the slow path
        for i in 0..uni.len() {
            let v = inner(&off, &uni.get(i).field, &uni.lengths);
            if !v.is_zero() {
                acc.entry(i).or_default().add_assign_ref(&v);
            }
        }
    }
    acc.retain(|_, v| !v.is_zero());
    Ok(acc)
}

/// `coords[e] = ⟨u,e⟩ / ⟨e,e⟩` over the universe. Fields whose x1/x2
/// parities do not match any eigenfunction component have infinite
/// expansions; for those the result is the truncation to the universe.
pub fn project(u: &TrigVectorField, uni: &Universe) -> Result<EigenCoords, ProjectError> {
    let raw = raw_inner(u, uni)?;
    Ok(raw
        .into_iter()
        .map(|(i, v)| {
            let e = uni.get(i);
            (e.id, v.scale(&(Q::one() / &e.norm2)))
        })
        .collect())
}

/// Projection coordinates by universe position.
pub fn project_indexed(
    u: &TrigVectorField,
    uni: &Universe,
) -> Result<Vec<(usize, PiPoly)>, ProjectError> {
    let raw = raw_inner(u, uni)?;
    Ok(raw
        .into_iter()
        .map(|(i, v)| {
            let n = &uni.get(i).norm2;
            (i, v.scale(&(Q::one() / n)))
        })
        .collect())
}

pub fn expand(c: &EigenCoords, uni: &Universe) -> Result<TrigVectorField, ProjectError> {
    let mut f = TrigVectorField::zero();
    for (id, v) in c {
        let e = uni.func(id).ok_or(ProjectError::UnknownId(*id))?;
        f.add_assign(&e.field.scale(v));
    }
    Ok(f)
}

/// Checks exactly that `u - expand(project(u))` is orthogonal to the universe.
pub fn residual_is_orthogonal(u: &TrigVectorField, uni: &Universe) -> Result<bool, ProjectError> {
    let c = project(u, uni)?;
    let r = u.sub(&expand(&c, uni)?);
    Ok(raw_inner(&r, uni)?.is_empty())
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CoordJson {
    pub id: EigenId,
    pub coeff: String,
    pub pi_pow: i32,
}

pub fn coords_to_json(c: &EigenCoords) -> Vec<CoordJson> {
    let mut v = Vec::new();
    for (id, p) in c {
        for PiTerm { coeff, pi_pow } in p.to_terms() {
            v.push(CoordJson {
                id: *id,
                coeff,
                pi_pow,
            });
        }
    }
    v
}

pub fn coords_from_json(v: &[CoordJson]) -> Result<EigenCoords, String> {
    let mut c = EigenCoords::new();
    for x in v {
        let t = PiPoly::from_terms(&[PiTerm {
            coeff: x.coeff.clone(),
            pi_pow: x.pi_pow,
        }])?;
        c.entry(x.id).or_default().add_assign_ref(&t);
    }
    c.retain(|_, v| !v.is_zero());
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    #[test]
    fn basis_fixpoint() {
        let l = DomainLengths::new(frac(3, 2), q(1), frac(2, 3)).unwrap();
        let uni = Universe::new(2, &l);
        for i in 0..uni.len() {
            let e = uni.get(i);
            let c = project(&e.field, &uni).unwrap();
            assert_eq!(c.len(), 1, "{}", e.id);
            assert_eq!(c[&e.id], PiPoly::one());
        }
    }

    #[test]
    fn overflow_named() {
        let uni = Universe::new(1, &DomainLengths::unit());
        let e = canonical(EigenId::y([2, 1, 1], 1), &DomainLengths::unit()).unwrap();
        assert_eq!(
            project(&e.field, &uni),
            Err(ProjectError::Overflow(2, 1, 1, 1))
        );
    }

    #[test]
    fn empty_expand() {
        let uni = Universe::new(1, &DomainLengths::unit());
        assert!(expand(&EigenCoords::new(), &uni).unwrap().is_zero());
    }

    #[test]
    fn universe_sizes() {
        let l = DomainLengths::unit();
        assert_eq!(Universe::new(2, &l).len(), 61);
        assert_eq!(Universe::new(4, &l).len(), 361);
    }
}
