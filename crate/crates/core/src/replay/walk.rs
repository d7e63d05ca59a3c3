//! Mechanical version of the level-raising argument: assuming every mode
//! with entries ≤ q is reached, walk the new modes with entries ≤ q+1 in a
//! fixed order of regions and check that each region is spanned by single
//! brackets with a generator, modulo the level-q modes and the regions
//! already done.

use crate::bracket::raw_bracket;
use crate::eigen::{enumerate_set, y_field, z_field, EigenId, Family, SetSpec};
use crate::projector::{project_indexed, Universe};
use crate::rational::Q;
use crate::span::{ChainEngine, OverflowPolicy, SpanError, SparseVec, Subspace};
use crate::trig::DomainLengths;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// Z, `n3 = q+1`, `n1, n2 ≤ q`, not both zero
    TopFace,
    /// Z, one of `n1, n2` is `q+1`, the other entries ≤ q, not both zero
    SideFaces,
    /// Z at `(q+1,0,0)` and `(0,q+1,0)`
    Axes,
    /// Z with exactly two entries equal to `q+1`
    Lines,
    /// Z at `(q+1,q+1,q+1)`
    Corner,
    /// every other new mode, Y included
    Rest,
}

pub const DEFAULT_ORDER: [Region; 6] = [
    Region::TopFace,
    Region::SideFaces,
    Region::Axes,
    Region::Lines,
    Region::Corner,
    Region::Rest,
];

fn region_of(id: &EigenId, q: u32) -> Region {
    if id.family == Family::Y {
        return Region::Rest;
    }
    let t = q + 1;
    let k = id.k;
    let tops = k.iter().filter(|x| **x == t).count();
    match tops {
        3 => Region::Corner,
        2 => Region::Lines,
        1 if k[2] == t => Region::TopFace,
        1 => {
            let others: Vec<u32> = (0..3).filter(|i| k[*i] != t).map(|i| k[i]).collect();
            if k[2] == 0 && others.iter().all(|x| *x == 0) {
                Region::Axes
            } else {
                Region::SideFaces
            }
        }
        _ => Region::Rest,
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct RegionReport {
    pub region: Region,
    pub targets: usize,
    pub reached: usize,
    pub missing: Vec<EigenId>,
    pub holds: bool,
    /// same check without crediting earlier regions
    pub holds_alone: bool,
}

/// The single bracket `(Y^{(q,0,1)}·∇)Z^{(1,0,1)} + …` used for the axis
/// mode, expanded: which new modes it touches and their regions.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct AxisBracket {
    pub touches: Vec<(EigenId, Region)>,
    /// reduces to the axis mode modulo level-q modes alone
    pub lands_on_axis_alone: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct WalkReport {
    pub schema: String,
    pub q: u32,
    pub lengths: [String; 3],
    pub order: Vec<Region>,
    pub generators: usize,
    pub base_modes: usize,
    pub new_modes: usize,
    pub brackets_in_cap: usize,
    pub brackets_discarded: usize,
    pub regions: Vec<RegionReport>,
    pub axis_first: RegionReport,
    pub axis_bracket: AxisBracket,
    pub holds: bool,
    pub seconds: f64,
}

/// Walks level `q → q+1` with generators `C^4_C`.
pub fn induction_walk(
    q: u32,
    lengths: &DomainLengths,
    order: &[Region],
) -> Result<WalkReport, SpanError> {
    let t0 = Instant::now();
    let gens = enumerate_set(&SetSpec::CqC { q: 4 });
    let mut eng = ChainEngine::new(gens.clone(), q + 1, OverflowPolicy::Discard, lengths)?;
    let uni = eng.uni.clone();
    let base: Vec<usize> = (0..uni.len())
        .filter(|i| uni.ids()[*i].max_index() <= q)
        .collect();
    let new_ids: Vec<EigenId> = uni
        .ids()
        .iter()
        .filter(|id| id.max_index() == q + 1)
        .copied()
        .collect();
    let nuni = Arc::new(Universe::from_ids(new_ids.clone(), lengths)?);
    let to_new: HashMap<usize, usize> = (0..uni.len())
        .filter_map(|i| nuni.position(&uni.ids()[i]).map(|p| (i, p)))
        .collect();

    let units: Vec<SparseVec> = base
        .iter()
        .map(|i| vec![(*i, Q::from_integer(1.into()))])
        .collect();
    let cands = eng.brackets_of(&units)?;
    let restricted: Vec<SparseVec> = cands
        .iter()
        .map(|v| {
            v.iter()
                .filter_map(|(i, x)| to_new.get(i).map(|p| (*p, x.clone())))
                .collect::<SparseVec>()
        })
        .filter(|v| !v.is_empty())
        .collect();

    let targets_of = |r: Region| -> Vec<usize> {
        (0..nuni.len())
            .filter(|i| region_of(&nuni.ids()[*i], q) == r)
            .collect()
    };
    let run = |r: Region, credited: &BTreeSet<usize>| -> RegionReport {
        let tg = targets_of(r);
        let tset: BTreeSet<usize> = tg.iter().copied().collect();
        let mut s = Subspace::new(nuni.clone());
        for c in credited {
            s.add_sparse(vec![(*c, Q::from_integer(1.into()))]);
        }
        let mut missing: Vec<usize> = tg.clone();
        for chunk in restricted.chunks(256) {
            for v in chunk {
                if v.iter().any(|(i, _)| tset.contains(i)) {
                    s.add_filtered(v.clone());
                }
            }
            missing.retain(|i| !s.contains_sparse(&vec![(*i, Q::from_integer(1.into()))]));
            if missing.is_empty() {
                break;
            }
        }
        RegionReport {
            region: r,
            targets: tg.len(),
            reached: tg.len() - missing.len(),
            missing: missing.iter().map(|i| nuni.ids()[*i]).collect(),
            holds: missing.is_empty(),
            holds_alone: false,
        }
    };

    let mut credited: BTreeSet<usize> = BTreeSet::new();
    let mut regions = Vec::new();
    for r in order {
        let mut rep = run(*r, &credited);
        rep.holds_alone = if credited.is_empty() {
            rep.holds
        } else {
            run(*r, &BTreeSet::new()).holds
        };
        for i in targets_of(*r) {
            if !rep.missing.contains(&nuni.ids()[i]) {
                credited.insert(i);
            }
        }
        regions.push(rep);
    }
    let mut axis_first = run(Region::Axes, &BTreeSet::new());
    axis_first.holds_alone = axis_first.holds;

    let yk = y_field(
        [q, 0, 1],
        &[
            lengths.get(0).clone(),
            Q::zero(),
            -(lengths.get(2) * Q::from_integer(q.into())),
        ],
    );
    let zm = z_field(
        [1, 0, 1],
        &[lengths.get(0).clone(), Q::zero(), -lengths.get(2).clone()],
    );
    let f = raw_bracket(&yk, &zm, lengths);
    let c = project_indexed(&f, &uni)?;
    let touches: Vec<(EigenId, Region)> = c
        .iter()
        .filter(|(i, v)| !v.is_zero() && to_new.contains_key(i))
        .map(|(i, _)| (uni.ids()[*i], region_of(&uni.ids()[*i], q)))
        .collect();
    let lands = !touches.is_empty() && touches.iter().all(|(_, r)| *r == Region::Axes);

    let holds = regions.iter().all(|r| r.holds)
        && regions.iter().map(|r| r.targets).sum::<usize>() == nuni.len();
    Ok(WalkReport {
        schema: "induction-walk/1".into(),
        q,
        lengths: lengths.to_strings(),
        order: order.to_vec(),
        generators: gens.len(),
        base_modes: base.len(),
        new_modes: nuni.len(),
        brackets_in_cap: cands.len(),
        brackets_discarded: eng.discarded,
        regions,
        axis_first,
        axis_bracket: AxisBracket {
            touches,
            lands_on_axis_alone: lands,
        },
        holds,
        seconds: t0.elapsed().as_secs_f64(),
    })
}
