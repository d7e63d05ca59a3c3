//! Exact subspaces of eigen-coordinates and the generation chain
//! `G^0 = span C`, `G^{j+1} = G^j + span{𝓑(a,b) : a ∈ C, b ∈ G^j}`.
//!
//! A subspace keeps the exact rational vectors that were accepted, a dense
//! reduced echelon form of them modulo the prime `2^61 - 1`, and (lazily) an
//! exact rational echelon form. A vector that is independent modulo the
//! prime is independent over Q, so acceptance through the modular form is
//! always sound.

use crate::bracket::raw_bracket;
use crate::eigen::{canonical, enumerate_set, EigenError, EigenId, Eigenfunction, Family, SetSpec};
use crate::pipoly::PiPoly;
use crate::projector::{project_indexed, EigenCoords, ProjectError, Universe};
use crate::rational::Q;
use crate::trig::DomainLengths;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use std::time::Instant;
use thiserror::Error;

pub type SparseVec = Vec<(usize, Q)>;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SpanError {
    #[error(
        "bracket output reaches index {required} beyond cap {cap}; rerun with --cap {required}"
    )]
    CapOverflow { cap: u32, required: u32 },
    #[error("{0} is not in the universe")]
    UnknownId(EigenId),
    #[error("coordinates mix powers of pi: {0}")]
    Inhomogeneous(String),
    #[error(transparent)]
    Project(#[from] ProjectError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverflowPolicy {
    /// Any bracket output beyond the cap is an error.
    Abort,
    /// Bracket outputs beyond the cap are left out. The computed spaces are
    /// then subspaces of the true ones, so found inclusions still hold.
    Discard,
}

const P: u64 = (1u64 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn submod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn invmod(a: u64) -> u64 {
    powmod(a, P - 2)
}

fn bigint_mod(x: &BigInt) -> u64 {
    let m = BigInt::from(P);
    let r = ((x % &m) + &m) % &m;
    r.to_u64().unwrap()
}

/// `None` when the denominator vanishes modulo the prime.
fn q_mod(x: &Q) -> Option<u64> {
    let d = bigint_mod(x.denom());
    if d == 0 {
        return None;
    }
    Some(mulmod(bigint_mod(x.numer()), invmod(d)))
}

#[derive(Clone, Debug, Default)]
struct ModpEchelon {
    n: usize,
    // pivot column -> dense row, reduced: zero on every other pivot column
    rows: BTreeMap<usize, Vec<u64>>,
}

impl ModpEchelon {
    fn new(n: usize) -> Self {
        ModpEchelon {
            n,
            rows: BTreeMap::new(),
        }
    }

    fn residual(&self, v: &SparseVec) -> Option<Vec<u64>> {
        let mut w = vec![0u64; self.n];
        for (i, x) in v {
            w[*i] = q_mod(x)?;
        }
        for (i, _) in v {
            if let Some(row) = self.rows.get(i) {
                let f = w[*i];
                if f == 0 {
                    continue;
                }
                for (j, r) in row.iter().enumerate() {
                    if *r != 0 {
                        w[j] = submod(w[j], mulmod(f, *r));
                    }
                }
            }
        }
        // entries created by the subtraction at pivot columns cannot appear:
        // rows vanish on the other pivot columns
        Some(w)
    }

    fn insert(&mut self, mut w: Vec<u64>) -> bool {
        let Some(p) = w.iter().position(|x| *x != 0) else {
            return false;
        };
        let inv = invmod(w[p]);
        for x in w.iter_mut() {
            if *x != 0 {
                *x = mulmod(*x, inv);
            }
        }
        for row in self.rows.values_mut() {
            let f = row[p];
            if f != 0 {
                for (j, x) in w.iter().enumerate() {
                    if *x != 0 {
                        row[j] = submod(row[j], mulmod(f, *x));
                    }
                }
            }
        }
        self.rows.insert(p, w);
        true
    }
}

#[derive(Clone, Debug, Default)]
struct ExactEchelon {
    // pivot -> row with leading entry 1 at the pivot
    rows: BTreeMap<usize, SparseVec>,
}

impl ExactEchelon {
    fn reduce(&self, v: &SparseVec) -> BTreeMap<usize, Q> {
        let mut w: BTreeMap<usize, Q> = v.iter().cloned().collect();
        let mut cursor = 0usize;
        loop {
            let next = w
                .range(cursor..)
                .map(|(c, _)| *c)
                .find(|c| self.rows.contains_key(c));
            let Some(c) = next else { break };
            let f = w.remove(&c).unwrap();
            for (j, x) in &self.rows[&c][1..] {
                let e = w.entry(*j).or_insert_with(Q::zero);
                *e -= &f * x;
                if e.is_zero() {
                    w.remove(j);
                }
            }
            cursor = c + 1;
        }
        w
    }

    fn insert_reduced(&mut self, w: BTreeMap<usize, Q>) -> bool {
        let Some((&p, lead)) = w.iter().next() else {
            return false;
        };
        let inv = Q::one() / lead;
        let row: SparseVec = w.iter().map(|(j, x)| (*j, x * &inv)).collect();
        self.rows.insert(p, row);
        true
    }
}

/// Subspace of the coordinate space of a universe.
#[derive(Clone, Debug)]
pub struct Subspace {
    uni: Arc<Universe>,
    basis: Vec<SparseVec>,
    modp: ModpEchelon,
    exact: Option<ExactEchelon>,
    block_size: [usize; 2],
    block_rank: [usize; 2],
    modp_ok: bool,
}

fn block_of(f: Family) -> usize {
    match f {
        Family::Y => 0,
        Family::Z => 1,
    }
}

impl Subspace {
    pub fn new(uni: Arc<Universe>) -> Self {
        let mut block_size = [0, 0];
        for id in uni.ids() {
            block_size[block_of(id.family)] += 1;
        }
        let n = uni.len();
        Subspace {
            uni,
            basis: Vec::new(),
            modp: ModpEchelon::new(n),
            exact: None,
            block_size,
            block_rank: [0, 0],
            modp_ok: true,
        }
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.uni
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.uni.len()
    }

    /// Accepted vectors, in insertion order.
    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn block_dims(&self) -> [usize; 2] {
        self.block_rank
    }

    /// Converts eigen-coordinates to a rational sparse vector, dividing out
    /// the common power of π.
    pub fn to_sparse(&self, v: &EigenCoords) -> Result<SparseVec, SpanError> {
        let mut out = Vec::with_capacity(v.len());
        let mut power: Option<i32> = None;
        for (id, c) in v {
            let i = self.uni.position(id).ok_or(SpanError::UnknownId(*id))?;
            let (x, p) = c
                .as_monomial()
                .ok_or_else(|| SpanError::Inhomogeneous(format!("{id}: {c}")))?;
            if x.is_zero() {
                continue;
            }
            match power {
                None => power = Some(p),
                Some(pp) if pp != p => return Err(SpanError::Inhomogeneous(format!("{id}: {c}"))),
                _ => {}
            }
            out.push((i, x));
        }
        out.sort_by_key(|(i, _)| *i);
        Ok(out)
    }

    pub fn unit(&self, id: &EigenId) -> Result<SparseVec, SpanError> {
        let i = self.uni.position(id).ok_or(SpanError::UnknownId(*id))?;
        Ok(vec![(i, Q::one())])
    }

    fn modp_residual(&self, v: &SparseVec) -> Option<Vec<u64>> {
        if self.modp_ok {
            self.modp.residual(v)
        } else {
            None
        }
    }

    fn single_block(&self, v: &SparseVec) -> Option<usize> {
        let mut b = None;
        for (i, _) in v {
            let bi = block_of(self.uni.ids()[*i].family);
            match b {
                None => b = Some(bi),
                Some(x) if x != bi => return None,
                _ => {}
            }
        }
        b
    }

    fn recount_blocks(&mut self) {
        let mut r = [0, 0];
        let pivots: Vec<usize> = match (&self.exact, self.modp_ok) {
            (_, true) => self.modp.rows.keys().copied().collect(),
            (Some(e), false) => e.rows.keys().copied().collect(),
            (None, false) => unreachable!(),
        };
        for p in pivots {
            r[block_of(self.uni.ids()[p].family)] += 1;
        }
        self.block_rank = r;
    }

    fn exact(&mut self) -> &ExactEchelon {
        if self.exact.is_none() {
            let mut e = ExactEchelon::default();
            for v in &self.basis {
                let w = e.reduce(v);
                e.insert_reduced(w);
            }
            self.exact = Some(e);
        }
        self.exact.as_ref().unwrap()
    }

    fn accept(
        &mut self,
        v: SparseVec,
        residual: Option<Vec<u64>>,
        exact_residual: Option<BTreeMap<usize, Q>>,
    ) {
        match residual {
            Some(w) if self.modp_ok && w.iter().any(|x| *x != 0) => {
                self.modp.insert(w);
            }
            _ => {
                // the prime divides a denominator or the vector is dependent
                // only modulo the prime; from here on only the exact form is
                // trusted
                self.modp_ok = false;
                self.exact();
            }
        }
        if let Some(e) = self.exact.as_mut() {
            let w = exact_residual.unwrap_or_else(|| e.reduce(&v));
            e.insert_reduced(w);
        }
        self.basis.push(v);
        self.recount_blocks();
    }

    /// Exact insertion; true iff the dimension grew.
    pub fn add_sparse(&mut self, v: SparseVec) -> bool {
        if v.is_empty() {
            return false;
        }
        match self.modp_residual(&v) {
            Some(w) if w.iter().any(|x| *x != 0) => {
                self.accept(v, Some(w), None);
                true
            }
            _ => {
                let r = self.exact().reduce(&v);
                if r.is_empty() {
                    return false;
                }
                let w = self.modp_residual(&v);
                self.accept(v, w, Some(r));
                true
            }
        }
    }

    /// Insertion that trusts the modular test for dependence. Never adds a
    /// dependent vector; may in principle skip an independent one.
    pub fn add_filtered(&mut self, v: SparseVec) -> bool {
        if v.is_empty() {
            return false;
        }
        match self.modp_residual(&v) {
            Some(w) if w.iter().any(|x| *x != 0) => {
                self.accept(v, Some(w), None);
                true
            }
            Some(_) => false,
            None => self.add_sparse(v),
        }
    }

    pub fn add(&mut self, v: &EigenCoords) -> Result<bool, SpanError> {
        let s = self.to_sparse(v)?;
        Ok(self.add_sparse(s))
    }

    /// Exact membership.
    pub fn contains_sparse(&mut self, v: &SparseVec) -> bool {
        if v.is_empty() {
            return true;
        }
        if let Some(b) = self.single_block(v) {
            if self.block_rank[b] == self.block_size[b] {
                return true;
            }
        }
        if let Some(w) = self.modp_residual(v) {
            if w.iter().any(|x| *x != 0) {
                return false;
            }
        }
        self.exact().reduce(v).is_empty()
    }

    pub fn contains(&mut self, v: &EigenCoords) -> Result<bool, SpanError> {
        let s = self.to_sparse(v)?;
        Ok(self.contains_sparse(&s))
    }

    pub fn contains_id(&mut self, id: &EigenId) -> Result<bool, SpanError> {
        let u = self.unit(id)?;
        Ok(self.contains_sparse(&u))
    }

    /// Exact reduced row echelon basis, pivots ascending.
    pub fn reduced_basis(&mut self) -> Vec<SparseVec> {
        let e = self.exact().clone();
        let mut done: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for (&p, row) in e.rows.iter().rev() {
            let mut w: BTreeMap<usize, Q> = row.iter().cloned().collect();
            for (&q, r) in done.iter() {
                if let Some(f) = w.get(&q).cloned() {
                    for (j, x) in r {
                        let ent = w.entry(*j).or_insert_with(Q::zero);
                        *ent -= &f * x;
                        if ent.is_zero() {
                            w.remove(j);
                        }
                    }
                }
            }
            done.insert(p, w.into_iter().collect());
        }
        done.into_values().collect()
    }

    pub fn to_coords(&self, v: &SparseVec) -> EigenCoords {
        v.iter()
            .map(|(i, x)| (self.uni.ids()[*i], PiPoly::rational(x.clone())))
            .collect()
    }
}

/// Bracket machinery for one generator set over one universe.
pub struct ChainEngine {
    pub uni: Arc<Universe>,
    ext: Arc<Universe>,
    pub generators: Vec<Eigenfunction>,
    pub policy: OverflowPolicy,
    /// skip the modular shortcut and reduce every candidate exactly
    pub exhaustive: bool,
    ext_to_uni: Vec<Option<usize>>,
    table: HashMap<(usize, usize), Arc<SparseVec>>,
    pub overflow_seen: u32,
    pub discarded: usize,
}

impl ChainEngine {
    pub fn new(
        generators: Vec<EigenId>,
        cap: u32,
        policy: OverflowPolicy,
        lengths: &DomainLengths,
    ) -> Result<Self, SpanError> {
        let uni = Arc::new(Universe::new(cap, lengths));
        let gmax = generators.iter().map(|g| g.max_index()).max().unwrap_or(0);
        let ext = Arc::new(Universe::new(cap + gmax, lengths));
        let gens = generators
            .iter()
            .map(|g| canonical(*g, lengths))
            .collect::<Result<Vec<_>, _>>()?;
        let ext_to_uni = ext.ids().iter().map(|id| uni.position(id)).collect();
        Ok(ChainEngine {
            uni,
            ext,
            generators: gens,
            policy,
            exhaustive: false,
            ext_to_uni,
            table: HashMap::new(),
            overflow_seen: 0,
            discarded: 0,
        })
    }

    pub fn seed(&self) -> Result<Subspace, SpanError> {
        let mut s = Subspace::new(self.uni.clone());
        for g in &self.generators {
            let u = s.unit(&g.id)?;
            s.add_sparse(u);
        }
        Ok(s)
    }

    fn table_entry(
        gen: &Eigenfunction,
        e: &Eigenfunction,
        ext: &Universe,
    ) -> Result<SparseVec, SpanError> {
        let f = raw_bracket(&gen.field, &e.field, &ext.lengths);
        let c = project_indexed(&f, ext)?;
        let mut out = Vec::with_capacity(c.len());
        for (i, v) in c {
            let (x, p) = v
                .as_monomial()
                .ok_or_else(|| SpanError::Inhomogeneous(v.to_string()))?;
            debug_assert_eq!(p, 1);
            if !x.is_zero() {
                out.push((i, x));
            }
        }
        Ok(out)
    }

    fn ensure_table(&mut self, needed: &[(usize, usize)]) -> Result<(), SpanError> {
        let mut missing: Vec<(usize, usize)> = needed
            .iter()
            .copied()
            .filter(|k| !self.table.contains_key(k))
            .collect();
        missing.sort();
        missing.dedup();
        let gens = &self.generators;
        let uni = &self.uni;
        let ext = &self.ext;
        let computed: Vec<((usize, usize), Result<SparseVec, SpanError>)> = missing
            .par_iter()
            .map(|&(g, e)| ((g, e), Self::table_entry(&gens[g], uni.get(e), ext)))
            .collect();
        for (k, v) in computed {
            self.table.insert(k, Arc::new(v?));
        }
        Ok(())
    }

    /// `𝓑(generator g, b)` in universe coordinates (π divided out), or the
    /// largest index met when it leaves the cap.
    fn candidate(&self, g: usize, b: &SparseVec) -> Result<SparseVec, u32> {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (e, c) in b {
            for (i, x) in self.table[&(g, *e)].iter() {
                let ent = acc.entry(*i).or_insert_with(Q::zero);
                *ent += c * x;
            }
        }
        let mut out = Vec::with_capacity(acc.len());
        let mut over = 0u32;
        for (i, x) in acc {
            if x.is_zero() {
                continue;
            }
            match self.ext_to_uni[i] {
                Some(u) => out.push((u, x)),
                None => over = over.max(self.ext.ids()[i].max_index()),
            }
        }
        if over > 0 {
            return Err(over);
        }
        out.sort_by_key(|(i, _)| *i);
        Ok(out)
    }

    /// One application of the generation map, bracketing only the basis
    /// vectors of `e` from position `from` on (earlier ones were handled by
    /// the step that produced `e`).
    pub fn fl_step_from(&mut self, e: &Subspace, from: usize) -> Result<Subspace, SpanError> {
        let mut out = e.clone();
        let new_b: Vec<SparseVec> = e.basis()[from..].to_vec();
        let ng = self.generators.len();
        const CHUNK: usize = 64;
        for chunk in new_b.chunks(CHUNK) {
            if out.is_full() {
                break;
            }
            let mut need = Vec::new();
            for b in chunk {
                for g in 0..ng {
                    for (ei, _) in b {
                        need.push((g, *ei));
                    }
                }
            }
            self.ensure_table(&need)?;
            let this = &*self;
            let cands: Vec<Result<SparseVec, u32>> = chunk
                .par_iter()
                .flat_map_iter(|b| (0..ng).map(move |g| this.candidate(g, b)))
                .collect();
            for c in cands {
                match c {
                    Ok(v) => {
                        if self.exhaustive {
                            out.add_sparse(v);
                        } else {
                            out.add_filtered(v);
                        }
                        if out.is_full() {
                            break;
                        }
                    }
                    Err(idx) => {
                        self.overflow_seen = self.overflow_seen.max(idx);
                        match self.policy {
                            OverflowPolicy::Abort => {
                                return Err(SpanError::CapOverflow {
                                    cap: self.uni.cap,
                                    required: idx,
                                });
                            }
                            OverflowPolicy::Discard => self.discarded += 1,
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `𝓑(a, b)` for every generator `a` and every `b`, keeping those inside
    /// the cap. Out-of-cap brackets follow the overflow policy.
    pub fn brackets_of(&mut self, bs: &[SparseVec]) -> Result<Vec<SparseVec>, SpanError> {
        let ng = self.generators.len();
        let need: Vec<(usize, usize)> = bs
            .iter()
            .flat_map(|b| (0..ng).flat_map(move |g| b.iter().map(move |(e, _)| (g, *e))))
            .collect();
        self.ensure_table(&need)?;
        let this = &*self;
        let cands: Vec<Result<SparseVec, u32>> = bs
            .par_iter()
            .flat_map_iter(|b| (0..ng).map(move |g| this.candidate(g, b)))
            .collect();
        let mut out = Vec::with_capacity(cands.len());
        for c in cands {
            match c {
                Ok(v) => out.push(v),
                Err(idx) => {
                    self.overflow_seen = self.overflow_seen.max(idx);
                    match self.policy {
                        OverflowPolicy::Abort => {
                            return Err(SpanError::CapOverflow {
                                cap: self.uni.cap,
                                required: idx,
                            })
                        }
                        OverflowPolicy::Discard => self.discarded += 1,
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn fl_step(&mut self, e: &Subspace) -> Result<Subspace, SpanError> {
        self.fl_step_from(e, 0)
    }

    /// `G^0 .. G^jmax`.
    pub fn chain(&mut self, jmax: usize) -> Result<Vec<Subspace>, SpanError> {
        let mut out = vec![self.seed()?];
        let mut from = 0;
        for _ in 0..jmax {
            let last = out.last().unwrap();
            let next = if last.is_full() {
                last.clone()
            } else {
                self.fl_step_from(last, from)?
            };
            from = last.dim();
            out.push(next);
        }
        Ok(out)
    }
}

/// `F_L(E)` for explicit generators, bracketing every basis vector of `E`.
pub fn fl_step(
    generators: &[EigenId],
    e: &Subspace,
    policy: OverflowPolicy,
) -> Result<Subspace, SpanError> {
    let uni = e.universe().clone();
    let mut eng = ChainEngine::new(generators.to_vec(), uni.cap, policy, &uni.lengths)?;
    eng.uni = uni;
    eng.ext_to_uni = eng
        .ext
        .ids()
        .iter()
        .map(|id| eng.uni.position(id))
        .collect();
    eng.fl_step(e)
}

pub fn generate_chain(
    spec: &SetSpec,
    jmax: usize,
    cap: u32,
    policy: OverflowPolicy,
    lengths: &DomainLengths,
) -> Result<Vec<Subspace>, SpanError> {
    let ids = enumerate_set(spec);
    let mut eng = ChainEngine::new(ids, cap, policy, lengths)?;
    eng.chain(jmax)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct InclusionResult {
    pub target: String,
    pub checked: usize,
    pub missing: Vec<EigenId>,
    pub holds: bool,
}

pub fn verify_inclusion(target: &SetSpec, s: &mut Subspace) -> Result<InclusionResult, SpanError> {
    let ids = enumerate_set(target);
    verify_ids(&target.label(), &ids, s)
}

pub fn verify_ids(
    label: &str,
    ids: &[EigenId],
    s: &mut Subspace,
) -> Result<InclusionResult, SpanError> {
    let mut missing = Vec::new();
    for id in ids {
        if !s.contains_id(id)? {
            missing.push(*id);
        }
    }
    Ok(InclusionResult {
        target: label.into(),
        checked: ids.len(),
        holds: missing.is_empty(),
        missing,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QVerdict {
    pub q: u32,
    pub level: usize,
    pub inclusion: InclusionResult,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SaturationReport {
    pub schema: String,
    pub seed: String,
    pub seed_size: usize,
    pub lengths: DomainLengths,
    pub cap: u32,
    pub policy: OverflowPolicy,
    pub qmax: u32,
    pub universe_size: usize,
    pub dims: Vec<usize>,
    pub verdicts: Vec<QVerdict>,
    pub discarded_brackets: usize,
    pub largest_index_seen: u32,
    pub seconds: f64,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: SetSpec,
    pub lengths: DomainLengths,
    pub qmax: u32,
    pub cap: u32,
    pub policy: OverflowPolicy,
    /// targets checked at each q; `None` means every mode with entries ≤ q
    pub targets: Option<fn(u32) -> SetSpec>,
    /// keep only targets of this family
    pub family: Option<Family>,
}

impl VerifyConfig {
    pub fn new(seed: SetSpec, lengths: DomainLengths, qmax: u32) -> Self {
        VerifyConfig {
            seed,
            lengths,
            qmax,
            cap: qmax,
            policy: OverflowPolicy::Discard,
            targets: None,
            family: None,
        }
    }
}

/// Checks `C^q ⊆ G^{q-1}` for q = 4..=qmax.
pub fn run_verification(cfg: &VerifyConfig) -> Result<SaturationReport, SpanError> {
    let t0 = Instant::now();
    let seed_ids = enumerate_set(&cfg.seed);
    let mut eng = ChainEngine::new(seed_ids.clone(), cfg.cap, cfg.policy, &cfg.lengths)?;
    let jmax = cfg.qmax.saturating_sub(1) as usize;
    let mut chain = eng.chain(jmax)?;
    let mut verdicts = Vec::new();
    for q in 4..=cfg.qmax {
        let level = (q - 1) as usize;
        let spec = cfg.targets.map(|f| f(q)).unwrap_or(SetSpec::CqC { q });
        let ids: Vec<EigenId> = enumerate_set(&spec)
            .into_iter()
            .filter(|i| cfg.family.is_none_or(|f| i.family == f))
            .collect();
        let label = match cfg.family {
            Some(f) => format!("{} ({:?} only)", spec.label(), f),
            None => spec.label(),
        };
        let inc = verify_ids(&label, &ids, &mut chain[level])?;
        verdicts.push(QVerdict {
            q,
            level,
            inclusion: inc,
        });
    }
    let holds = verdicts.iter().all(|v| v.inclusion.holds);
    Ok(SaturationReport {
        schema: "saturation-report/1".into(),
        seed: cfg.seed.label(),
        seed_size: seed_ids.len(),
        lengths: cfg.lengths.clone(),
        cap: cfg.cap,
        policy: cfg.policy,
        qmax: cfg.qmax,
        universe_size: eng.uni.len(),
        dims: chain.iter().map(|s| s.dim()).collect(),
        verdicts,
        discarded_brackets: eng.discarded,
        largest_index_seen: eng.overflow_seen,
        seconds: t0.elapsed().as_secs_f64(),
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    fn uni(cap: u32) -> Arc<Universe> {
        Arc::new(Universe::new(cap, &DomainLengths::unit()))
    }

    #[test]
    fn zero_and_unit() {
        let mut s = Subspace::new(uni(1));
        assert!(!s.add(&EigenCoords::new()).unwrap());
        let id = EigenId::y([1, 1, 1], 1);
        let mut c = EigenCoords::new();
        c.insert(id, PiPoly::one());
        assert!(s.add(&c).unwrap());
        assert!(!s.add(&c).unwrap());
        assert_eq!(s.dim(), 1);
    }

    #[test]
    fn idempotent_and_membership() {
        let u = uni(1);
        let mut s = Subspace::new(u.clone());
        let a = vec![(0, q(1)), (3, frac(2, 3))];
        let b = vec![(3, q(1)), (5, q(-4))];
        assert!(s.add_sparse(a.clone()));
        assert!(s.add_sparse(b.clone()));
        let comb = vec![(0, q(3)), (3, q(3)), (5, q(-4))];
        assert!(s.contains_sparse(&comb));
        assert!(!s.add_sparse(comb));
        assert!(!s.contains_sparse(&vec![(5, q(1))]));
        let r = s.reduced_basis();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0][0], (0, q(1)));
    }

    #[test]
    fn inhomogeneous_rejected() {
        let mut s = Subspace::new(uni(1));
        let mut c = EigenCoords::new();
        c.insert(EigenId::y([1, 1, 1], 1), PiPoly::one());
        c.insert(EigenId::y([1, 1, 1], 2), PiPoly::pi());
        assert!(matches!(s.add(&c), Err(SpanError::Inhomogeneous(_))));
    }

    #[test]
    fn filtered_matches_exhaustive_small() {
        let l = DomainLengths::unit();
        let seed = enumerate_set(&SetSpec::CqC { q: 1 });
        let mut a = ChainEngine::new(seed.clone(), 3, OverflowPolicy::Discard, &l).unwrap();
        let mut b = ChainEngine::new(seed, 3, OverflowPolicy::Discard, &l).unwrap();
        b.exhaustive = true;
        let ca = a.chain(2).unwrap();
        let cb = b.chain(2).unwrap();
        for (x, y) in ca.iter().zip(cb.iter()) {
            assert_eq!(x.dim(), y.dim());
        }
    }

    #[test]
    fn abort_reports_required_cap() {
        let l = DomainLengths::unit();
        let seed = enumerate_set(&SetSpec::CqC { q: 1 });
        let mut e = ChainEngine::new(seed, 2, OverflowPolicy::Abort, &l).unwrap();
        let g = e.chain(1).unwrap();
        assert!(!g[1].is_full());
        match e.chain(2) {
            Err(err) => assert_eq!(
                err,
                SpanError::CapOverflow {
                    cap: 2,
                    required: 3
                }
            ),
            Ok(_) => panic!("expected overflow"),
        }
    }

    #[test]
    fn first_level_at_cap8_regression() {
        // cap 8 holds every bracket of two seed modes, so no bracket is dropped
        let l = DomainLengths::unit();
        let mut e =
            ChainEngine::new(enumerate_set(&SetSpec::Thm33), 8, OverflowPolicy::Abort, &l).unwrap();
        let g = e.chain(1).unwrap();
        assert_eq!(e.uni.len(), 2449);
        assert_eq!(g[1].dim(), 2436);
        assert_eq!(g[1].block_dims(), [1210, 1226]);
    }
}
